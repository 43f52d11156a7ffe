#include "cqi/core_model.hpp"

#include <cmath>
#include <string>

#include "cqi/error.hpp"

namespace cqi {

const char* to_string(Scheme s)
{
    return s == Scheme::cqi ? "cqi" : "cas";
}

namespace {

void require_finite_nonneg(double v, const char* name)
{
    if (!std::isfinite(v)) throw InvalidArgument(std::string(name) + " must be finite");
    if (v < 0.0) throw InvalidArgument(std::string(name) + " must be >= 0");
}

}  // namespace

void DeviceParams::validate() const
{
    require_finite_nonneg(kappa_a_o, "kappa_a_o");
    require_finite_nonneg(kappa_a_ex, "kappa_a_ex");
    require_finite_nonneg(kappa_b_o, "kappa_b_o");
    require_finite_nonneg(kappa_b_ex, "kappa_b_ex");
    require_finite_nonneg(g_conv, "g_conv");
    require_finite_nonneg(mu, "mu");
    require_finite_nonneg(n_th, "n_th");
    if (!std::isfinite(gamma) || gamma <= 0.0) throw InvalidArgument("gamma must be finite and > 0");
    if (!std::isfinite(delta_b_offset) || !std::isfinite(delta_q_offset))
        throw InvalidArgument("detuning offsets must be finite");
    if (kappa_a() <= 0.0) throw InvalidArgument("kappa_a = kappa_a_o + kappa_a_ex must be > 0");
}

namespace model {

namespace {

constexpr Complex I{0.0, 1.0};

void check_delta(double delta)
{
    if (!std::isfinite(delta)) throw InvalidArgument("probe detuning must be finite");
}

// Response of a port-coupled mode (port rate kappa_port, total rate kappa)
// that also couples with strength `coupling` to a second mode whose
// self-energy is `inner_num / inner_den`:
//     1 - kappa_port * inner_den / ((i d + kappa/2) inner_den + coupling^2 inner_num)
// Written as a single fraction so that decoupled sub-systems never produce 0/0.
Complex port_response(double kappa_port, Complex self, double coupling, Complex inner_num, Complex inner_den)
{
    if (kappa_port == 0.0) return 1.0;
    const Complex den = self * inner_den + coupling * coupling * inner_num;
    if (std::abs(den) == 0.0) throw SingularInput("response denominator vanishes (lossless pole)");
    return 1.0 - kappa_port * inner_den / den;
}

}  // namespace

Cooperativities cooperativities(const DeviceParams& p, Scheme scheme)
{
    p.validate();
    const double kb = scheme == Scheme::cqi ? p.kappa_b_cqi() : p.kappa_b_bus();
    if (kb <= 0.0) throw InvalidArgument("total b decay must be > 0 for cooperativities");
    Cooperativities c;
    c.c_ab = 4.0 * p.g_conv * p.g_conv / (p.kappa_a() * kb);
    c.c_bq = 4.0 * p.mu * p.mu / (p.gamma * kb);
    return c;
}

Complex cqi_response(const DeviceParams& p, double delta, bool qubit_coupled)
{
    p.validate();
    check_delta(delta);
    const double mu = qubit_coupled ? p.mu : 0.0;
    const Complex a_self = I * delta + p.kappa_a() / 2.0;
    const Complex b_self = I * (delta + p.delta_b_offset) + p.kappa_b_cqi() / 2.0;
    const Complex q_self = I * (delta + p.delta_q_offset) + p.gamma / 2.0;
    // b's dressed self-energy b_self + mu^2 / q_self = (b_self q_self + mu^2) / q_self;
    // a sees G^2 / (dressed b) = G^2 q_self / (b_self q_self + mu^2).
    return port_response(p.kappa_a_ex, a_self, p.g_conv, q_self, b_self * q_self + mu * mu);
}

double cqi_response_on_resonance(const DeviceParams& p, bool qubit_coupled)
{
    const Cooperativities c = cooperativities(p, Scheme::cqi);
    const double c_bq = qubit_coupled ? c.c_bq : 0.0;
    return 1.0 - (2.0 * p.kappa_a_ex / p.kappa_a()) / (1.0 + c.c_ab / (1.0 + c_bq));
}

Complex converter_transmission(const DeviceParams& p, double delta)
{
    p.validate();
    check_delta(delta);
    // b_out = -sqrt(kappa_b_ex) b with b = -i G a / (i d + kappa_b / 2)
    const Complex num = I * p.g_conv * std::sqrt(p.kappa_a_ex * p.kappa_b_ex);
    if (num == 0.0) return 0.0;
    const Complex den = (I * delta + p.kappa_a() / 2.0) *
                            (I * (delta + p.delta_b_offset) + p.kappa_b_bus() / 2.0) +
                        p.g_conv * p.g_conv;
    if (std::abs(den) == 0.0) throw SingularInput("converter denominator vanishes");
    return num / den;
}

Complex qubit_cavity_response(const DeviceParams& p, double delta, bool qubit_coupled)
{
    p.validate();
    check_delta(delta);
    const double mu = qubit_coupled ? p.mu : 0.0;
    const Complex b_self = I * (delta + p.delta_b_offset) + p.kappa_b_bus() / 2.0;
    const Complex q_self = I * (delta + p.delta_q_offset) + p.gamma / 2.0;
    return port_response(p.kappa_b_ex, b_self, mu, 1.0, q_self);
}

Complex cas_response(const DeviceParams& p, double delta, bool qubit_coupled)
{
    const Complex t = converter_transmission(p, delta);
    if (t == 0.0) return 0.0;
    return t * qubit_cavity_response(p, delta, qubit_coupled) * t;
}

Complex response(Scheme scheme, const DeviceParams& p, double delta, bool qubit_coupled)
{
    return scheme == Scheme::cqi ? cqi_response(p, delta, qubit_coupled)
                                 : cas_response(p, delta, qubit_coupled);
}

double conversion_efficiency(const DeviceParams& p)
{
    return std::norm(converter_transmission(p, 0.0));
}

double conversion_efficiency_bound(const DeviceParams& p)
{
    p.validate();
    const double kb = p.kappa_b_bus();
    if (kb <= 0.0) return 0.0;
    return p.kappa_a_ex * p.kappa_b_ex / (p.kappa_a() * kb);
}

double noise_transfer_cqi(const DeviceParams& p, double delta)
{
    p.validate();
    check_delta(delta);
    const double num = std::sqrt(p.kappa_a_ex * p.kappa_b_o) * p.g_conv;
    if (num == 0.0) return 0.0;
    const Complex den = (I * delta + p.kappa_a() / 2.0) *
                            (I * (delta + p.delta_b_offset) + p.kappa_b_cqi() / 2.0) +
                        p.g_conv * p.g_conv;
    if (std::abs(den) == 0.0) throw SingularInput("noise transfer denominator vanishes");
    return std::norm(num / den);
}

std::pair<double, double> supermode_splitting(const DeviceParams& p)
{
    p.validate();
    // eigenvalues of [[0, G], [G, delta_b]]
    const double mid = p.delta_b_offset / 2.0;
    const double half = std::hypot(p.delta_b_offset / 2.0, p.g_conv);
    return {mid - half, mid + half};
}

double matched_kappa_b(const DeviceParams& p)
{
    p.validate();
    if (p.kappa_a_ex <= 0.0) throw InvalidArgument("impedance matching needs kappa_a_ex > 0");
    // C_ab^2 = 1 + C_bq with kappa_a = kappa_a_ex:
    //   kb^2 + beta kb - alpha^2 = 0, alpha = 4G^2/kappa_a, beta = 4 mu^2/gamma
    const double alpha = 4.0 * p.g_conv * p.g_conv / p.kappa_a_ex;
    const double beta = 4.0 * p.mu * p.mu / p.gamma;
    if (alpha == 0.0) throw InvalidArgument("impedance matching needs G > 0");
    // numerically stable positive root of kb^2 + beta kb - alpha^2
    return 2.0 * alpha * alpha / (beta + std::sqrt(beta * beta + 4.0 * alpha * alpha));
}

DeviceParams impedance_matched(const DeviceParams& p)
{
    DeviceParams out = p;
    out.kappa_a_o = 0.0;
    const double kb = matched_kappa_b(out);
    if (out.cqi_b_external_is_loss) {
        if (out.kappa_b_o > kb)
            throw InvalidArgument("kappa_b_o exceeds the impedance-matched b decay");
        out.kappa_b_ex = kb - out.kappa_b_o;
    } else {
        out.kappa_b_o = kb;
    }
    return out;
}

}  // namespace model
}  // namespace cqi
