#pragma once

// Frequency-domain input-output model of a single interface node.
//
// All rates, couplings and detunings are in units of the qubit decay rate
// gamma. Output amplitudes follow the convention
//     out = in - sqrt(kappa_ex) * (intracavity amplitude),
// so a bare cavity on resonance reflects 1 - 2 kappa_ex / kappa.

#include <complex>
#include <utility>

namespace cqi {

using Complex = std::complex<double>;

enum class Scheme { cqi, cas };

const char* to_string(Scheme s);

struct DeviceParams {
    double kappa_a_o = 1.0;    ///< intrinsic decay of telecom mode a
    double kappa_a_ex = 14.0;  ///< waveguide coupling of mode a
    double kappa_b_o = 0.1;    ///< intrinsic (thermal) decay of intermediate mode b
    double kappa_b_ex = 10.0;  ///< bus coupling of mode b
    double g_conv = 10.0;      ///< conversion coupling G between a and b
    double mu = 10.0;          ///< qubit - mode b coupling
    double gamma = 1.0;        ///< qubit decay
    double n_th = 0.0;         ///< thermal occupation of mode b's intrinsic bath
    double delta_b_offset = 0.0;
    double delta_q_offset = 0.0;
    /// Whether kappa_b_ex acts as an extra loss port of the CQI's b mode.
    bool cqi_b_external_is_loss = true;

    double kappa_a() const { return kappa_a_o + kappa_a_ex; }
    /// Total b decay of the integrated device.
    double kappa_b_cqi() const { return kappa_b_o + (cqi_b_external_is_loss ? kappa_b_ex : 0.0); }
    /// Total b decay of a cascaded device; its b mode always couples to the bus.
    double kappa_b_bus() const { return kappa_b_o + kappa_b_ex; }

    /// Throws InvalidArgument unless every field is finite, rates are
    /// non-negative, gamma > 0 and the a-mode total decay is positive.
    void validate() const;

    friend bool operator==(const DeviceParams&, const DeviceParams&) = default;
};

struct Cooperativities {
    double c_ab = 0.0;
    double c_bq = 0.0;
};

namespace model {

/// C_ab = 4G^2/(kappa_a kappa_b), C_bq = 4 mu^2/(gamma kappa_b) with the
/// b total of the chosen scheme (kappa_b_cqi for CQI, kappa_b_bus for CAS).
Cooperativities cooperativities(const DeviceParams& p, Scheme scheme = Scheme::cqi);

/// Output amplitude of the integrated interface at probe detuning delta.
/// `qubit_coupled` selects the qubit in |g> (mu active) versus |s> (mu = 0).
Complex cqi_response(const DeviceParams& p, double delta, bool qubit_coupled);

/// Resonant amplitude rebuilt from the cooperativities:
/// 1 - (2 kappa_a_ex / kappa_a) / (1 + C_ab / (1 + C_bq)).
double cqi_response_on_resonance(const DeviceParams& p, bool qubit_coupled);

/// a -> b transmission of an isolated two-mode converter.
Complex converter_transmission(const DeviceParams& p, double delta);

/// All-pass response of the bus-coupled qubit cavity used in the cascade.
Complex qubit_cavity_response(const DeviceParams& p, double delta, bool qubit_coupled);

/// converter -> qubit cavity -> converter, all sharing one parameter set.
Complex cas_response(const DeviceParams& p, double delta, bool qubit_coupled);

Complex response(Scheme scheme, const DeviceParams& p, double delta, bool qubit_coupled);

/// eta_FC = |t(0)|^2.
double conversion_efficiency(const DeviceParams& p);

/// Upper bound kappa_a_ex kappa_b_ex / (kappa_a kappa_b), reached at G^2 = kappa_a kappa_b / 4.
double conversion_efficiency_bound(const DeviceParams& p);

/// |S_{b,o -> a,out}(delta)|^2 for the integrated device with the qubit decoupled.
double noise_transfer_cqi(const DeviceParams& p, double delta);

/// Frequencies of the hybridized a/b modes (eigenvalues of [[0, G], [G, delta_b]]), ascending.
std::pair<double, double> supermode_splitting(const DeviceParams& p);

/// CQI b-mode total decay at which the lossless device is impedance matched
/// (C_ab^2 = 1 + C_bq, i.e. f_s = -f_g), for the current G, mu, kappa_a_ex, gamma.
double matched_kappa_b(const DeviceParams& p);

/// Lossless (kappa_a_o = 0) copy of `p` whose CQI b total is tuned to the
/// impedance-matching point by adjusting kappa_b_ex (or kappa_b_o when the
/// bus port is not counted as loss). Throws when kappa_b_o already exceeds it.
DeviceParams impedance_matched(const DeviceParams& p);

}  // namespace model
}  // namespace cqi
