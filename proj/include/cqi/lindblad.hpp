#pragma once

// Truncated-Fock-space master equation for one device under a weak coherent
// probe, with mode b's intrinsic port attached to a thermal bath.
//
// Basis ordering is qubit (x) a (x) b, row-major:
//     index = (q * dim_a + n_a) * dim_b + n_b.
// Density matrices are vectorized row-major, vec(rho)[i * n + j] = rho(i, j),
// so vec(A rho B) = (A (x) B^T) vec(rho).

#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "cqi/core_model.hpp"

namespace cqi::lindblad {

using SparseMatrix = Eigen::SparseMatrix<Complex>;

/// Which physical device the Liouvillian describes.
///   cqi          : a, b and (optionally) the qubit; probe enters through a.
///   converter    : a and b of an isolated converter; b always couples to the bus.
///   qubit_cavity : b and (optionally) the qubit; probe enters through the bus.
enum class Device { cqi, converter, qubit_cavity };

struct FockConfig {
    int dim_a = 3;
    int dim_b = 4;
    bool include_qubit = true;
    int max_dim = 512;

    int hilbert_dim() const { return dim_a * dim_b * (include_qubit ? 2 : 1); }
    void validate() const;

    friend bool operator==(const FockConfig&, const FockConfig&) = default;
};

struct DriveSpec {
    double amplitude = 0.0;  ///< epsilon, sqrt(photons / time) in units of gamma
    double detuning = 0.0;   ///< probe detuning from the carrier
};

/// Mode dimensions actually realised for a device (absent modes have dim 1).
struct Layout {
    int dim_q = 1;
    int dim_a = 1;
    int dim_b = 1;

    int size() const { return dim_q * dim_a * dim_b; }
    int index(int q, int na, int nb) const { return (q * dim_a + na) * dim_b + nb; }

    friend bool operator==(const Layout&, const Layout&) = default;
};

/// Ladder operators on a Layout (sparse, n x n).
struct Operators {
    SparseMatrix a;
    SparseMatrix b;
    SparseMatrix sigma_minus;
};

Operators make_operators(const Layout& layout);

class Liouvillian {
public:
    Liouvillian(Layout layout, Device device, SparseMatrix matrix);

    const Layout& layout() const { return layout_; }
    Device device() const { return device_; }
    const SparseMatrix& matrix() const { return matrix_; }
    /// Induced 1-norm (largest absolute column sum).
    double norm() const { return norm_; }

private:
    Layout layout_;
    Device device_;
    SparseMatrix matrix_;
    double norm_ = 0.0;
};

class DensityMatrix {
public:
    DensityMatrix(Layout layout, Eigen::MatrixXcd rho);

    const Layout& layout() const { return layout_; }
    const Eigen::MatrixXcd& matrix() const { return rho_; }
    int dim() const { return static_cast<int>(rho_.rows()); }

    Complex trace() const { return rho_.trace(); }
    /// Tr(rho * op) for an operator on the same layout.
    Complex expect(const SparseMatrix& op) const;

    Complex mean_a() const;
    double photons_a() const;
    Complex mean_b() const;
    double photons_b() const;
    double qubit_excitation() const;

    double hermiticity_error() const { return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff(); }
    double min_eigenvalue() const;

    /// Throws SolverError unless Hermitian to 1e-10, trace 1 to 1e-10 and
    /// eigenvalues >= -1e-8.
    void check_invariants() const;

private:
    Layout layout_;
    Eigen::MatrixXcd rho_;
};

Layout device_layout(Device device, const FockConfig& fock, bool qubit_coupled);

/// Builds L for H = Delta a^dag a + (Delta + delta_b) b^dag b + (Delta + delta_q) s+ s-
///                + G (a^dag b + a b^dag) + mu (s+ b + s- b^dag) + drive,
/// with kappa_a D[a], kappa_b_ex D[b] (cold), kappa_b_o (n_th + 1) D[b],
/// kappa_b_o n_th D[b^dag] and gamma D[s-]. Terms absent from `device` are dropped.
/// `qubit_coupled == false` removes the two-level system entirely.
Liouvillian build_liouvillian(const DeviceParams& params, const DriveSpec& drive, bool qubit_coupled,
                              const FockConfig& fock, Device device = Device::cqi);

struct SolveReport {
    double residual = 0.0;           ///< ||L rho||_2 for the returned state
    double relative_residual = 0.0;  ///< residual / ||L||
    int hilbert_dim = 0;
    bool used_time_stepping = false;
    double seconds = 0.0;
};

/// Unique steady state via a sparse LU solve with the trace functional in
/// place of the first row. Falls back to time stepping when the direct
/// answer misses the residual target. Throws SolverError on a singular or
/// degenerate steady space.
DensityMatrix steady_state(const Liouvillian& L, SolveReport* report = nullptr);

/// Adaptive Runge-Kutta integration of d rho/dt = L rho until
/// ||L rho|| <= tol * ||L|| or `max_time` elapses (SolverError).
DensityMatrix integrate_to_steady_state(const Liouvillian& L, const DensityMatrix& initial, double tol = 1e-10,
                                        double max_time = 1e5);

struct Readout {
    std::optional<Complex> f;  ///< absent when the drive is zero
    double phi_inc = 0.0;      ///< incoherent output flux, photons / time
};

/// f = 1 - sqrt(kappa_port) <c> / eps and phi_inc = kappa_port (<c^dag c> - |<c>|^2)
/// for the device's probe port (a for cqi/converter, b for qubit_cavity).
Readout extract_response(const DensityMatrix& rho, const DeviceParams& params, const DriveSpec& drive,
                         Device device = Device::cqi);

/// Solve + extract, enforcing the weak-drive check: repeating the solve at
/// eps / 2 must move f by less than 1e-4 (ModelValidityError otherwise).
Readout me_response(const DeviceParams& params, const DriveSpec& drive, bool qubit_coupled, const FockConfig& fock,
                    Device device = Device::cqi);

struct Observables {
    Complex mean_a;
    double photons_a = 0.0;
    double photons_b = 0.0;
};

struct TruncationReport {
    bool passed = false;
    FockConfig base;
    FockConfig refined;
    Observables base_values;
    Observables refined_values;
};

/// Re-solves at (dim_a + 1, dim_b + 2); passes iff <a>, <a^dag a>, <b^dag b>
/// each change by less than 1e-6 relative. `fock.include_qubit` selects the
/// coupled (|g>) or decoupled (|s>) qubit.
TruncationReport truncation_check(const DeviceParams& params, const DriveSpec& drive, const FockConfig& fock,
                                  Device device = Device::cqi);

/// Steady state at the smallest truncation (starting from `fock`, stepping
/// (+1, +2)) that passes truncation_check. Throws SolverError at the cap.
DensityMatrix converged_steady_state(const DeviceParams& params, const DriveSpec& drive, bool qubit_coupled,
                                     const FockConfig& fock, Device device = Device::cqi,
                                     FockConfig* used = nullptr);

/// Zero-drive fluxes of the three cascaded devices, each into its forward port.
/// Undriven steady states do not depend on the probe detuning (it multiplies
/// the conserved excitation number), so these are computed once per parameter set.
struct CascadeFluxes {
    double converter_bus = 0.0;     ///< kappa_b_ex <b^dag b> of a converter
    double converter_port_a = 0.0;  ///< kappa_a_ex <a^dag a> of a converter
    double cavity_bus = 0.0;        ///< kappa_b_ex <b^dag b> of the qubit cavity
};

CascadeFluxes cascade_device_fluxes(const DeviceParams& params, bool qubit_coupled, const FockConfig& fock);

/// Downstream attenuation at the probe detuning: first converter through the
/// cavity and the last converter, cavity through the last converter, plus the last converter.
double compose_cascade_flux(const CascadeFluxes& fluxes, const DeviceParams& params, double delta,
                            bool qubit_coupled);

/// Zero-drive thermal flux reaching the detector.
///   CQI: kappa_a_ex <a^dag a>.
///   CAS: sum_i phi_i prod_{j > i} |t_j(delta)|^2 over converter (bus port),
///        qubit cavity (bus port) and converter (a port).
double thermal_leak_flux(const DeviceParams& params, double delta, bool qubit_coupled, const FockConfig& fock,
                         Scheme scheme = Scheme::cqi);

/// Default truncation: (3, 4) for n_th <= 0.5, grown with n_th above that.
FockConfig default_fock(double n_th);

}  // namespace cqi::lindblad
