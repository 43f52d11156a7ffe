#pragma once

// Heralded entanglement bookkeeping.
//
// A single photon in |+i> = (|up> + i|down>)/sqrt(2) visits node 1 on the
// upper path and node 2 on the lower path. Each node multiplies its path
// amplitude by f_s or f_g depending on its qubit. Detecting the photon in
// |+i> / |-i> applies the diagonal Kraus maps (f1 + f2)/2 and (f1 - f2)/2;
// the adaptive corrections (Z on the first qubit for +i, Y on the second for
// -i) bring both outcomes to (|ss> + |gg>)/sqrt(2).
//
// Noise: each detector also fires with probability q = (nu1 + nu2)/2 per
// window, independently of the signal. A window counts as a success when any
// detector fires. A clean signal click (the other detector silent) heralds
// the corrected Bell state; a double click or a click without the signal
// photon leaves the addressed pair in the uniform mixture I/4. Double clicks
// are split evenly between the two outcome records.

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cqi/core_model.hpp"

namespace cqi::protocol {

/// Qubit labels used throughout: index 0 is |s>, index 1 is |g>.
struct NodeResponse {
    Complex f_s{1.0, 0.0};   ///< qubit in |s>, uncoupled
    Complex f_g{-1.0, 0.0};  ///< qubit in |g>, coupled
    double nu = 0.0;         ///< noise click probability per detection window

    void validate() const;
};

struct Outcome {
    double probability = 0.0;
    double fidelity = 0.0;    ///< conditional, after correction
    Eigen::Matrix4cd state;   ///< normalized conditional state, after correction
};

struct LinkResult {
    double fidelity = 0.0;
    double success_prob = 0.0;
    double no_click_prob = 0.0;
    std::array<Outcome, 2> per_outcome;  ///< [0]: click +i, [1]: click -i

    double figure_of_merit() const { return fidelity * success_prob; }
};

/// P = (|f_s|^2 + |f_g|^2)/2, F = |f_s - f_g|^2 / (4P). Requires nu = 0.
LinkResult link_closed_form(const NodeResponse& node);

/// Exact two-node bookkeeping including noise clicks. `transmission` is an
/// amplitude factor applied to both paths (fiber loss).
LinkResult link_entangle(const NodeResponse& node1, const NodeResponse& node2, double transmission = 1.0);

struct LinkSpec {
    NodeResponse first;
    NodeResponse second;
    double transmission = 1.0;
};

struct NetworkResult {
    int n_nodes = 0;
    double ghz_fidelity = 0.0;
    double total_success = 0.0;
    double figure_of_merit = 0.0;
    std::vector<double> round_success;  ///< conditional click probability of each photon round
};

/// Exact N-node chain. links[0 .. N/2-1] create Bell pairs on (1,2), (3,4), ...;
/// links[N/2 .. N-2] merge neighbouring pairs through qubits (2,3), (4,5), ...
/// Both outcomes of every round are kept and corrected, so the result is the
/// probability-weighted ensemble. Fidelity is against (|s..s> + |g..g>)/sqrt(2).
NetworkResult ghz_chain(std::span<const LinkSpec> links, int n_nodes);

/// Identical links composed multiplicatively: F^(N-1), P^(N-1).
NetworkResult compose_network(const LinkResult& link, int n_nodes);

/// Ratio of figures of merit F*P (CQI over CAS).
double zeta(const NetworkResult& cqi, const NetworkResult& cas);
double zeta(const LinkResult& cqi, const LinkResult& cas);

/// Fidelity assigned to a heralded window whose pair state is I/4.
inline constexpr double kNoiseClickFidelity = 0.25;

}  // namespace cqi::protocol
