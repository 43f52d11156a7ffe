#include "cqi/protocol.hpp"

#include <cmath>
#include <string>

#include "cqi/error.hpp"

namespace cqi::protocol {

namespace {

constexpr Complex I{0.0, 1.0};

Complex amplitude(const NodeResponse& node, int qubit)
{
    return qubit == 0 ? node.f_s : node.f_g;
}

void validate_transmission(double t)
{
    if (!std::isfinite(t) || t < 0.0 || t > 1.0) throw InvalidArgument("link transmission must lie in [0, 1]");
}

double noise_click_probability(const NodeResponse& n1, const NodeResponse& n2)
{
    return 0.5 * (n1.nu + n2.nu);
}

// Probability mass, per outcome record, of windows that herald the pair in I/4:
// half of all double clicks plus single noise clicks after the photon was lost.
double mixed_mass_per_outcome(double q, double p_signal)
{
    return 0.5 * q * p_signal + q * (1.0 - 0.5 * q) * (1.0 - p_signal);
}

// ---------------------------------------------------------------------------
// Explicit register of m qubits; qubit 0 is the most significant bit.

int bit(int index, int qubit, int m)
{
    return (index >> (m - 1 - qubit)) & 1;
}

struct Round {
    int x = 0;                 // first addressed qubit (upper path)
    int y = 1;                 // second addressed qubit (lower path)
    std::vector<int> x_flips;  // extra X corrections applied with Y on y after a -i click
};

// Unitary correction as a signed permutation: U|c> = phase[c] |perm[c]>.
struct Correction {
    std::vector<int> perm;
    std::vector<Complex> phase;
};

Correction plus_correction(const Round& r, int m)
{
    const int dim = 1 << m;
    Correction c{std::vector<int>(dim), std::vector<Complex>(dim)};
    for (int i = 0; i < dim; ++i) {
        c.perm[i] = i;
        c.phase[i] = bit(i, r.x, m) == 0 ? 1.0 : -1.0;  // Z on x
    }
    return c;
}

Correction minus_correction(const Round& r, int m)
{
    const int dim = 1 << m;
    Correction c{std::vector<int>(dim), std::vector<Complex>(dim)};
    for (int i = 0; i < dim; ++i) {
        int j = i ^ (1 << (m - 1 - r.y));  // Y on y: |s> -> i|g>, |g> -> -i|s>
        c.phase[i] = bit(i, r.y, m) == 0 ? I : -I;
        for (int q : r.x_flips) j ^= 1 << (m - 1 - q);
        c.perm[i] = j;
    }
    return c;
}

Eigen::MatrixXcd conjugate_by(const Correction& u, const Eigen::MatrixXcd& rho)
{
    const auto dim = rho.rows();
    Eigen::MatrixXcd out(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c)
        for (Eigen::Index d = 0; d < dim; ++d)
            out(u.perm[c], u.perm[d]) = u.phase[c] * rho(c, d) * std::conj(u.phase[d]);
    return out;
}

// Tr_xy(rho) (x) I_xy / 4
Eigen::MatrixXcd mix_pair(const Eigen::MatrixXcd& rho, int x, int y, int m)
{
    const int dim = 1 << m;
    const int mx = 1 << (m - 1 - x);
    const int my = 1 << (m - 1 - y);
    const int pair_mask = mx | my;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
    for (int c = 0; c < dim; ++c) {
        for (int d = 0; d < dim; ++d) {
            if ((c & pair_mask) != (d & pair_mask)) continue;
            Complex acc = 0.0;
            for (int e : {0, mx, my, mx | my}) acc += rho((c & ~pair_mask) | e, (d & ~pair_mask) | e);
            out(c, d) = 0.25 * acc;
        }
    }
    return out;
}

// One photon round on qubits (x, y); returns the unnormalized, corrected
// state of each outcome record.
std::array<Eigen::MatrixXcd, 2> photon_round(const Eigen::MatrixXcd& rho, int m, const Round& r, const LinkSpec& link)
{
    link.first.validate();
    link.second.validate();
    validate_transmission(link.transmission);
    const int dim = 1 << m;
    const double t = link.transmission;
    const double q = noise_click_probability(link.first, link.second);

    Eigen::VectorXcd k_plus(dim);
    Eigen::VectorXcd k_minus(dim);
    Eigen::VectorXd lost(dim);
    for (int c = 0; c < dim; ++c) {
        const Complex fx = t * amplitude(link.first, bit(c, r.x, m));
        const Complex fy = t * amplitude(link.second, bit(c, r.y, m));
        k_plus(c) = 0.5 * (fx + fy);
        k_minus(c) = 0.5 * (fx - fy);
        lost(c) = 1.0 - 0.5 * (std::norm(fx) + std::norm(fy));
        if (lost(c) < -1e-12) throw ModelValidityError("node amplitudes exceed unit magnitude (non-passive response)");
    }

    auto sandwich = [&](const Eigen::VectorXcd& k) {
        Eigen::MatrixXcd out(dim, dim);
        for (int c = 0; c < dim; ++c)
            for (int d = 0; d < dim; ++d) out(c, d) = k(c) * rho(c, d) * std::conj(k(d));
        return out;
    };
    const Eigen::MatrixXcd sig_plus = sandwich(k_plus);
    const Eigen::MatrixXcd sig_minus = sandwich(k_minus);
    // photon lost: only the addressed pair is disturbed, and mix_pair traces it out anyway
    const Eigen::MatrixXcd dark = sandwich(lost.cwiseMax(0.0).cwiseSqrt().cast<Complex>());

    const Eigen::MatrixXcd mixed =
        mix_pair(0.5 * q * (sig_plus + sig_minus) + q * (1.0 - 0.5 * q) * dark, r.x, r.y, m);

    return {conjugate_by(plus_correction(r, m), (1.0 - q) * sig_plus + mixed),
            conjugate_by(minus_correction(r, m), (1.0 - q) * sig_minus + mixed)};
}

Eigen::MatrixXcd plus_state_pair()
{
    return Eigen::MatrixXcd::Constant(4, 4, Complex(0.25));
}

Eigen::Vector4cd bell_target()
{
    Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
    v(0) = v(3) = 1.0 / std::sqrt(2.0);
    return v;
}

}  // namespace

void NodeResponse::validate() const
{
    if (!std::isfinite(f_s.real()) || !std::isfinite(f_s.imag()) || !std::isfinite(f_g.real()) ||
        !std::isfinite(f_g.imag()))
        throw InvalidArgument("node amplitudes must be finite");
    if (!std::isfinite(nu) || nu < 0.0) throw InvalidArgument("noise click probability must be finite and >= 0");
    if (nu > 1.0)
        throw ModelValidityError("noise click probability " + std::to_string(nu) +
                                 " exceeds 1: detection window too long or noise flux too high");
}

LinkResult link_closed_form(const NodeResponse& node)
{
    node.validate();
    if (node.nu != 0.0) throw InvalidArgument("closed-form link requires a noiseless node (nu = 0)");
    const double norm_s = std::norm(node.f_s);
    const double norm_g = std::norm(node.f_g);
    const double contrast = std::norm(node.f_s - node.f_g);

    LinkResult res;
    res.success_prob = 0.5 * (norm_s + norm_g);
    if (res.success_prob == 0.0) throw ModelValidityError("fidelity undefined: success probability is zero");
    res.fidelity = contrast / (4.0 * res.success_prob);
    res.no_click_prob = 1.0 - res.success_prob;

    // outcome split: P(+i) = (|f_s|^2 + |f_g|^2)/4 + |f_s + f_g|^2/8, P(-i) = |f_s - f_g|^2/8,
    // each carrying a Bell-state overlap of |f_s - f_g|^2/8
    const double overlap = contrast / 8.0;
    const std::array<double, 2> probs{0.25 * (norm_s + norm_g) + std::norm(node.f_s + node.f_g) / 8.0, overlap};
    for (int o = 0; o < 2; ++o) {
        res.per_outcome[o].probability = probs[o];
        res.per_outcome[o].fidelity = probs[o] > 0.0 ? overlap / probs[o] : 0.0;
    }
    // conditional states from the explicit route
    const LinkResult explicit_states = link_entangle(node, node);
    for (int o = 0; o < 2; ++o) res.per_outcome[o].state = explicit_states.per_outcome[o].state;
    return res;
}

LinkResult link_entangle(const NodeResponse& node1, const NodeResponse& node2, double transmission)
{
    node1.validate();
    node2.validate();
    validate_transmission(transmission);
    const double q = noise_click_probability(node1, node2);

    // photon amplitudes per qubit configuration |q1 q2>, qubits start in (|s> + |g>)/sqrt(2)
    std::array<Eigen::Vector4cd, 2> branch;
    for (int c = 0; c < 4; ++c) {
        const Complex f1 = transmission * amplitude(node1, c >> 1);
        const Complex f2 = transmission * amplitude(node2, c & 1);
        branch[0](c) = 0.5 * (f1 + f2) / 2.0;
        branch[1](c) = 0.5 * (f1 - f2) / 2.0;
    }
    const double p_signal = branch[0].squaredNorm() + branch[1].squaredNorm();
    if (p_signal > 1.0 + 1e-12) throw ModelValidityError("node amplitudes exceed unit magnitude (non-passive response)");

    // +i: Z on qubit 1.  -i: Y on qubit 2.
    std::array<Eigen::Vector4cd, 2> corrected;
    for (int c = 0; c < 4; ++c) corrected[0](c) = ((c >> 1) == 0 ? 1.0 : -1.0) * branch[0](c);
    for (int q1 = 0; q1 < 2; ++q1) {
        corrected[1](2 * q1 + 1) = I * branch[1](2 * q1);
        corrected[1](2 * q1) = -I * branch[1](2 * q1 + 1);
    }

    const double mixed_mass = mixed_mass_per_outcome(q, p_signal);
    const Eigen::Vector4cd target = bell_target();

    LinkResult res;
    double weighted = 0.0;
    for (int o = 0; o < 2; ++o) {
        const Eigen::Vector4cd& v = corrected[o];
        Eigen::Matrix4cd rho = (1.0 - q) * v * v.adjoint() + (mixed_mass / 4.0) * Eigen::Matrix4cd::Identity();
        const double p = rho.trace().real();
        const double overlap = (1.0 - q) * std::norm(target.dot(v)) + mixed_mass * kNoiseClickFidelity;
        Outcome& out = res.per_outcome[o];
        out.probability = p;
        out.fidelity = p > 0.0 ? overlap / p : 0.0;
        out.state = p > 0.0 ? Eigen::Matrix4cd(rho / p) : Eigen::Matrix4cd::Zero();
        weighted += overlap;
        res.success_prob += p;
    }
    res.no_click_prob = (1.0 - p_signal) * (1.0 - q) * (1.0 - q);
    if (res.success_prob == 0.0) throw ModelValidityError("fidelity undefined: success probability is zero");
    res.fidelity = weighted / res.success_prob;
    return res;
}

NetworkResult ghz_chain(std::span<const LinkSpec> links, int n_nodes)
{
    if (n_nodes < 2 || n_nodes % 2 != 0) throw InvalidArgument("node count must be even and >= 2");
    if (n_nodes > 16) throw InvalidArgument("node count above 16 is not supported");
    if (static_cast<int>(links.size()) != n_nodes - 1)
        throw InvalidArgument("a chain of " + std::to_string(n_nodes) + " nodes needs " +
                              std::to_string(n_nodes - 1) + " links, got " + std::to_string(links.size()));

    const int pairs = n_nodes / 2;
    NetworkResult res;
    res.n_nodes = n_nodes;

    std::vector<Eigen::MatrixXcd> pair_states;
    const Round bell_round{0, 1, {}};
    for (int k = 0; k < pairs; ++k) {
        const auto outcomes = photon_round(plus_state_pair(), 2, bell_round, links[k]);
        pair_states.push_back(outcomes[0] + outcomes[1]);
        res.round_success.push_back(pair_states.back().trace().real());
    }

    // Merges only ever touch the newest qubit of the growing block, so the
    // qubits behind it are summarised by the blocks the final GHZ overlap and
    // trace need: equal[a][b] = rho(a..a u, b..b v) and traced = sum_r rho(r u, r v).
    using Block = Eigen::Matrix2cd;
    std::array<std::array<Block, 2>, 2> equal;
    Block traced = Block::Zero();
    const Eigen::MatrixXcd& first = pair_states[0];
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int u = 0; u < 2; ++u)
                for (int v = 0; v < 2; ++v) equal[a][b](u, v) = first(2 * a + u, 2 * b + v);
    for (int r = 0; r < 2; ++r)
        for (int u = 0; u < 2; ++u)
            for (int v = 0; v < 2; ++v) traced(u, v) += first(2 * r + u, 2 * r + v);

    // explicit register during a merge: (newest qubit, fresh pair qubit 1, fresh pair qubit 2)
    const Round merge_round{0, 1, {2}};
    for (int k = 1; k < pairs; ++k) {
        const LinkSpec& link = links[pairs + k - 1];
        const Eigen::MatrixXcd& fresh = pair_states[k];
        auto evolve = [&](const Block& block) {
            Eigen::MatrixXcd joint(8, 8);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) joint.block(4 * i, 4 * j, 4, 4) = block(i, j) * fresh;
            const auto outcomes = photon_round(joint, 3, merge_round, link);
            return Eigen::MatrixXcd(outcomes[0] + outcomes[1]);
        };
        const double before = traced.trace().real() * fresh.trace().real();

        std::array<std::array<Block, 2>, 2> next_equal;
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                const Eigen::MatrixXcd out = evolve(equal[a][b]);
                for (int u = 0; u < 2; ++u)
                    for (int v = 0; v < 2; ++v) next_equal[a][b](u, v) = out(6 * a + u, 6 * b + v);
            }
        }
        const Eigen::MatrixXcd out = evolve(traced);
        Block next_traced = Block::Zero();
        for (int lp = 0; lp < 4; ++lp)
            for (int u = 0; u < 2; ++u)
                for (int v = 0; v < 2; ++v) next_traced(u, v) += out(2 * lp + u, 2 * lp + v);

        equal = next_equal;
        traced = next_traced;
        res.round_success.push_back(before > 0.0 ? traced.trace().real() / before : 0.0);
    }

    res.total_success = traced.trace().real();
    double overlap = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) overlap += 0.5 * equal[a][b](a, b).real();
    if (res.total_success <= 0.0) throw ModelValidityError("fidelity undefined: chain success probability is zero");
    res.figure_of_merit = overlap;
    res.ghz_fidelity = overlap / res.total_success;
    return res;
}

NetworkResult compose_network(const LinkResult& link, int n_nodes)
{
    if (n_nodes < 2 || n_nodes % 2 != 0) throw InvalidArgument("node count must be even and >= 2");
    NetworkResult res;
    res.n_nodes = n_nodes;
    const int rounds = n_nodes - 1;
    res.ghz_fidelity = std::pow(link.fidelity, rounds);
    res.total_success = std::pow(link.success_prob, rounds);
    res.figure_of_merit = std::pow(link.figure_of_merit(), rounds);
    res.round_success.assign(static_cast<std::size_t>(rounds), link.success_prob);
    return res;
}

double zeta(const NetworkResult& cqi, const NetworkResult& cas)
{
    if (!(cas.figure_of_merit > 0.0)) throw InvalidArgument("zeta undefined: cascaded figure of merit is zero");
    return cqi.figure_of_merit / cas.figure_of_merit;
}

double zeta(const LinkResult& cqi, const LinkResult& cas)
{
    if (!(cas.figure_of_merit() > 0.0)) throw InvalidArgument("zeta undefined: cascaded figure of merit is zero");
    return cqi.figure_of_merit() / cas.figure_of_merit();
}

}  // namespace cqi::protocol
