#include "oracles.hpp"

#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

namespace oracle {

namespace {

constexpr Complex I{0.0, 1.0};

Eigen::MatrixXcd destroy(int n)
{
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (int k = 1; k < n; ++k) m(k - 1, k) = std::sqrt(double(k));
    return m;
}

Eigen::MatrixXcd kron3(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y, const Eigen::MatrixXcd& z)
{
    const Eigen::MatrixXcd yz = Eigen::kroneckerProduct(y, z);
    return Eigen::kroneckerProduct(x, yz);
}

Eigen::Matrix2cd pauli(int k)
{
    Eigen::Matrix2cd p;
    switch (k) {
    case 0: p << 1, 0, 0, 1; break;
    case 1: p << 0, 1, 1, 0; break;
    case 2: p << 0, -I, I, 0; break;
    default: p << 1, 0, 0, -1; break;
    }
    return p;
}

// single-qubit operator on qubit j of n (qubit 0 most significant)
Eigen::MatrixXcd on_qubit(const Eigen::Matrix2cd& op, int j, int n)
{
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (int k = 0; k < n; ++k) {
        const Eigen::MatrixXcd f = k == j ? Eigen::MatrixXcd(op) : Eigen::MatrixXcd(Eigen::Matrix2cd::Identity());
        out = Eigen::kroneckerProduct(out, f).eval();
    }
    return out;
}

int bit_of(int c, int j, int n)
{
    return (c >> (n - 1 - j)) & 1;
}

Complex amp(const cqi::protocol::NodeResponse& node, int q)
{
    return q == 0 ? node.f_s : node.f_g;
}

void dense_round(Eigen::MatrixXcd& rho, int n, int x, int y, const std::vector<int>& flips,
                 const cqi::protocol::LinkSpec& link)
{
    const int dim = 1 << n;
    const double q = 0.5 * (link.first.nu + link.second.nu);
    Eigen::VectorXcd kp(dim), km(dim), lh(dim);
    for (int c = 0; c < dim; ++c) {
        const Complex fx = link.transmission * amp(link.first, bit_of(c, x, n));
        const Complex fy = link.transmission * amp(link.second, bit_of(c, y, n));
        kp(c) = (fx + fy) / 2.0;
        km(c) = (fx - fy) / 2.0;
        lh(c) = std::sqrt(std::max(0.0, 1.0 - 0.5 * (std::norm(fx) + std::norm(fy))));
    }
    const Eigen::MatrixXcd sp = kp.asDiagonal() * rho * kp.conjugate().asDiagonal();
    const Eigen::MatrixXcd sm = km.asDiagonal() * rho * km.conjugate().asDiagonal();
    const Eigen::MatrixXcd dark = lh.asDiagonal() * rho * lh.conjugate().asDiagonal();
    const Eigen::MatrixXcd noisy = 0.5 * q * (sp + sm) + q * (1.0 - 0.5 * q) * dark;

    // two-qubit Pauli twirl = Tr_xy (.) (x) I/4
    Eigen::MatrixXcd mixed = Eigen::MatrixXcd::Zero(dim, dim);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const Eigen::MatrixXcd P = on_qubit(pauli(i), x, n) * on_qubit(pauli(j), y, n);
            mixed += P * noisy * P.adjoint() / 16.0;
        }
    }

    const Eigen::MatrixXcd u_plus = on_qubit(pauli(3), x, n);
    Eigen::MatrixXcd u_minus = on_qubit(pauli(2), y, n);
    for (int f : flips) u_minus = on_qubit(pauli(1), f, n) * u_minus;

    rho = u_plus * ((1.0 - q) * sp + mixed) * u_plus.adjoint() + u_minus * ((1.0 - q) * sm + mixed) * u_minus.adjoint();
}

}  // namespace

Eigen::VectorXcd coupled_modes(const Eigen::MatrixXcd& m, double kappa_in)
{
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(m.rows());
    rhs(0) = std::sqrt(kappa_in);
    return m.fullPivLu().solve(rhs);
}

Complex cqi(const DeviceParams& p, double d, bool coupled)
{
    const double mu = coupled ? p.mu : 0.0;
    Eigen::Matrix3cd m;
    m << I * d + p.kappa_a() / 2.0, I * p.g_conv, 0.0, I * p.g_conv,
        I * (d + p.delta_b_offset) + p.kappa_b_cqi() / 2.0, I * mu, 0.0, I * mu,
        I * (d + p.delta_q_offset) + p.gamma / 2.0;
    return 1.0 - std::sqrt(p.kappa_a_ex) * coupled_modes(m, p.kappa_a_ex)(0);
}

Complex converter(const DeviceParams& p, double d)
{
    Eigen::Matrix2cd m;
    m << I * d + p.kappa_a() / 2.0, I * p.g_conv, I * p.g_conv, I * (d + p.delta_b_offset) + p.kappa_b_bus() / 2.0;
    return -std::sqrt(p.kappa_b_ex) * coupled_modes(m, p.kappa_a_ex)(1);
}

Complex converter_reflection(const DeviceParams& p, double d)
{
    Eigen::Matrix2cd m;
    m << I * d + p.kappa_a() / 2.0, I * p.g_conv, I * p.g_conv, I * (d + p.delta_b_offset) + p.kappa_b_bus() / 2.0;
    return 1.0 - std::sqrt(p.kappa_a_ex) * coupled_modes(m, p.kappa_a_ex)(0);
}

Complex cavity(const DeviceParams& p, double d, bool coupled)
{
    const double mu = coupled ? p.mu : 0.0;
    Eigen::Matrix2cd m;
    m << I * (d + p.delta_b_offset) + p.kappa_b_bus() / 2.0, I * mu, I * mu, I * (d + p.delta_q_offset) + p.gamma / 2.0;
    return 1.0 - std::sqrt(p.kappa_b_ex) * coupled_modes(m, p.kappa_b_ex)(0);
}

DenseOps dense_ops(int dim_q, int dim_a, int dim_b)
{
    const Eigen::MatrixXcd iq = Eigen::MatrixXcd::Identity(dim_q, dim_q);
    const Eigen::MatrixXcd ia = Eigen::MatrixXcd::Identity(dim_a, dim_a);
    const Eigen::MatrixXcd ib = Eigen::MatrixXcd::Identity(dim_b, dim_b);
    DenseOps ops;
    ops.a = kron3(iq, destroy(dim_a), ib);
    ops.b = kron3(iq, ia, destroy(dim_b));
    ops.sm = kron3(destroy(dim_q), ia, ib);
    ops.id = Eigen::MatrixXcd::Identity(dim_q * dim_a * dim_b, dim_q * dim_a * dim_b);
    return ops;
}

Eigen::MatrixXcd lindblad_rhs(const Eigen::MatrixXcd& H, const std::vector<std::pair<Eigen::MatrixXcd, double>>& jumps,
                              const Eigen::MatrixXcd& rho)
{
    Eigen::MatrixXcd out = -I * (H * rho - rho * H);
    for (const auto& [c, rate] : jumps) {
        const Eigen::MatrixXcd cdc = c.adjoint() * c;
        out += rate * (c * rho * c.adjoint() - 0.5 * (cdc * rho + rho * cdc));
    }
    return out;
}

double rate_equation_occupation(double n_th, double kappa_hot, double kappa_cold, int levels)
{
    // stationary birth-death chain: up n -> n+1 at kappa_hot n_th (n+1),
    // down n+1 -> n at (kappa_hot (n_th+1) + kappa_cold) (n+1)
    std::vector<double> p(static_cast<std::size_t>(levels));
    p[0] = 1.0;
    for (int k = 0; k + 1 < levels; ++k) {
        const double up = kappa_hot * n_th * (k + 1);
        const double down = (kappa_hot * (n_th + 1.0) + kappa_cold) * (k + 1);
        p[k + 1] = p[k] * up / down;
    }
    double z = 0.0, mean = 0.0;
    for (int k = 0; k < levels; ++k) {
        z += p[k];
        mean += k * p[k];
    }
    return mean / z;
}

ChainResult dense_chain(const std::vector<cqi::protocol::LinkSpec>& links, int n)
{
    const int dim = 1 << n;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Constant(dim, dim, Complex(1.0 / dim));
    const int pairs = n / 2;
    for (int k = 0; k < pairs; ++k) dense_round(rho, n, 2 * k, 2 * k + 1, {}, links[k]);
    for (int k = 1; k < pairs; ++k) dense_round(rho, n, 2 * k - 1, 2 * k, {2 * k + 1}, links[pairs + k - 1]);

    Eigen::VectorXcd ghz = Eigen::VectorXcd::Zero(dim);
    ghz(0) = ghz(dim - 1) = 1.0 / std::sqrt(2.0);
    ChainResult r;
    r.state = rho;
    r.success = rho.trace().real();
    r.fidelity = (ghz.adjoint() * rho * ghz)(0, 0).real() / r.success;
    return r;
}

MonteCarlo monte_carlo_link(const cqi::protocol::NodeResponse& node, long samples, std::uint64_t seed)
{
    // signal branches over qubit configs |q1 q2>, qubits start in |+>|+>
    Eigen::Vector4cd vp, vm;
    for (int c = 0; c < 4; ++c) {
        const Complex f1 = amp(node, c >> 1);
        const Complex f2 = amp(node, c & 1);
        vp(c) = (f1 + f2) / 4.0;
        vm(c) = (f1 - f2) / 4.0;
    }
    // corrected overlaps with (|ss> + |gg>)/sqrt(2): +i gets Z on qubit 1, -i gets Y on qubit 2
    const double pp = vp.squaredNorm();
    const double pm = vm.squaredNorm();
    const double fp = pp > 0 ? std::norm(vp(0) - vp(3)) / 2.0 / pp : 0.0;
    const double fm = pm > 0 ? std::norm(-I * vm(1) + I * vm(2)) / 2.0 / pm : 0.0;
    const double q = node.nu;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    long clicks = 0;
    double sum = 0.0, sum2 = 0.0;
    for (long i = 0; i < samples; ++i) {
        const double r = u(rng);
        const int signal = r < pp ? 1 : (r < pp + pm ? 2 : 0);
        const bool noise_p = u(rng) < q;
        const bool noise_m = u(rng) < q;
        const bool fired_p = signal == 1 || noise_p;
        const bool fired_m = signal == 2 || noise_m;
        if (!fired_p && !fired_m) continue;
        ++clicks;
        double f = 0.25;
        if (fired_p != fired_m) {
            if (fired_p && signal == 1) f = fp;
            if (fired_m && signal == 2) f = fm;
        } else {
            (void)u(rng);  // record chosen at random; both records hold I/4
        }
        sum += f;
        sum2 += f * f;
    }
    MonteCarlo mc;
    mc.success = double(clicks) / samples;
    mc.success_sigma = std::sqrt(mc.success * (1.0 - mc.success) / samples);
    mc.fidelity = sum / clicks;
    mc.fidelity_sigma = std::sqrt(std::max(0.0, sum2 / clicks - mc.fidelity * mc.fidelity) / clicks);
    return mc;
}

DeviceParams random_passive(std::mt19937_64& rng)
{
    DeviceParams p;
    p.kappa_a_o = uniform(rng, 0.0, 5.0);
    p.kappa_a_ex = uniform(rng, 0.1, 20.0);
    p.kappa_b_o = uniform(rng, 0.01, 2.0);
    p.kappa_b_ex = uniform(rng, 0.0, 20.0);
    p.g_conv = uniform(rng, 0.0, 20.0);
    p.mu = uniform(rng, 0.0, 20.0);
    p.gamma = uniform(rng, 0.2, 3.0);
    p.cqi_b_external_is_loss = uniform(rng, 0.0, 1.0) < 0.5;
    return p;
}

}  // namespace oracle
