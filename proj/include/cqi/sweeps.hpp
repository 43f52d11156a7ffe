#pragma once

// Parameter sweeps over both interface schemes.
//
// A sweep point evaluates the two-node link of each selected scheme: node
// amplitudes from the closed forms, noise click probabilities from
// zero-drive master-equation fluxes (skipped whenever n_th * kappa_b_o = 0).
// Rows come back in grid order no matter how many workers ran.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cqi/core_model.hpp"
#include "cqi/lindblad.hpp"
#include "cqi/protocol.hpp"

namespace cqi::sweeps {

enum class Variable { kappa_b_o, n_th, delta, nodes };
enum class SchemeSelect { cqi, cas, both };

const char* to_string(Variable v);
const char* to_string(SchemeSelect s);
Variable parse_variable(const std::string& name);
SchemeSelect parse_scheme_select(const std::string& name);

struct ProtocolSettings {
    std::optional<double> detection_window;  ///< tau_w; defaults to 20 / kappa_a
    double transmission = 1.0;                ///< per-link amplitude factor

    double window(const DeviceParams& p) const;
    void validate() const;
};

struct EvalOptions {
    ProtocolSettings protocol;
    std::optional<lindblad::FockConfig> fock;  ///< default_fock(n_th) when unset
    unsigned workers = 0;                      ///< 0: hardware concurrency

    lindblad::FockConfig fock_for(double n_th) const;
};

/// Detuning-independent noise data of one scheme at one parameter set.
struct NoiseModel {
    Scheme scheme = Scheme::cqi;
    double window = 0.0;
    double cqi_coupled = 0.0;  ///< CQI detector fluxes per qubit state
    double cqi_uncoupled = 0.0;
    lindblad::CascadeFluxes cas_coupled;
    lindblad::CascadeFluxes cas_uncoupled;

    /// Click probability per window, averaged over the two qubit states.
    double nu(const DeviceParams& p, double delta) const;
};

NoiseModel noise_model(const DeviceParams& p, Scheme scheme, const EvalOptions& opts);

/// f_s, f_g at `delta` plus the noise click probability.
protocol::NodeResponse node_response(const DeviceParams& p, Scheme scheme, double delta, const NoiseModel& noise);

/// Link result for identical nodes at `delta`.
protocol::LinkResult evaluate_link(const DeviceParams& p, Scheme scheme, double delta, const NoiseModel& noise,
                                   const ProtocolSettings& settings);

struct DetuningOptimum {
    double delta_star = 0.0;
    double f_star = 0.0;
    double f_at_zero = 0.0;
};

/// Link fidelity maximum over [-3G, 3G]. Golden-section searches on
/// [-3G, 0], [-G, G] and [0, 3G] each run down to a bracket of 1e-7, and the
/// starts -G, 0, G are kept as candidates. Ties resolve to the nonnegative detuning.
DetuningOptimum optimize_detuning(const DeviceParams& p, Scheme scheme, const NoiseModel& noise,
                                  const ProtocolSettings& settings);
DetuningOptimum optimize_detuning(const DeviceParams& p, double n_th, Scheme scheme, const EvalOptions& opts = {});

struct SweepSpec {
    Variable variable = Variable::kappa_b_o;
    std::vector<double> grid;
    DeviceParams base;
    SchemeSelect scheme = SchemeSelect::both;
    bool optimize_detuning = false;
    double delta = 0.0;    ///< probe detuning when not swept or optimized
    int n_nodes = 2;       ///< chain length for the zeta column
    void validate() const;
};

struct SweepRow {
    double value = 0.0;
    std::optional<double> n_th;
    std::optional<double> f_cqi;
    std::optional<double> p_cqi;
    std::optional<double> f_cas;
    std::optional<double> p_cas;
    std::optional<double> infidelity_ratio;
    std::optional<double> efficiency_ratio;
    std::optional<double> zeta;
    std::optional<double> log_zeta;
    std::optional<double> zeta_exact;  ///< zeta from the exact chain tracker (N <= 16)
    std::optional<double> delta_star;
    std::string error;
    std::vector<std::string> warnings;
};

using RowSink = std::function<void(const SweepRow&)>;

/// One grid point of `spec` (value substituted into the swept variable).
SweepRow evaluate_point(const SweepSpec& spec, double value, const EvalOptions& opts);

/// Dispatches on spec.variable. `sink`, if given, sees each row in grid
/// order as soon as every earlier row is done.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, const EvalOptions& opts = {}, const RowSink& sink = {});

std::vector<SweepRow> sweep_kappa_b(const SweepSpec& spec, const EvalOptions& opts = {}, const RowSink& sink = {});
std::vector<SweepRow> sweep_nth(const SweepSpec& spec, const EvalOptions& opts = {}, const RowSink& sink = {});

/// Rows per (N, n_th), N-major. value = N. zeta composes the per-link ratio
/// over N - 1 rounds; zeta_exact runs the chain tracker on the same links.
std::vector<SweepRow> scaling_sweep(const std::vector<int>& n_grid, const std::vector<double>& n_th_list,
                                    const DeviceParams& params, bool optimize = false, const EvalOptions& opts = {},
                                    const RowSink& sink = {});

/// Grids used to regenerate the figure data.
std::vector<double> default_kappa_b_grid();  ///< 31 log-spaced points on [1e-2, 1]
std::vector<double> default_nth_grid();      ///< 21 points on [0, 1]
std::vector<int> default_node_grid();        ///< 2, 4, ..., 10

}  // namespace cqi::sweeps
