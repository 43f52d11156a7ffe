#include "cqi/lindblad.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include <Eigen/SparseLU>
#include <boost/numeric/odeint.hpp>

#include "cqi/error.hpp"

namespace cqi::lindblad {

namespace {

using Triplet = Eigen::Triplet<Complex>;
constexpr Complex I{0.0, 1.0};

SparseMatrix identity(int n)
{
    SparseMatrix id(n, n);
    id.setIdentity();
    return id;
}

// Kronecker product of two sparse matrices.
SparseMatrix kron(const SparseMatrix& A, const SparseMatrix& B)
{
    const Eigen::Index rb = B.rows();
    const Eigen::Index cb = B.cols();
    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(A.nonZeros()) * static_cast<std::size_t>(B.nonZeros()));
    for (int ka = 0; ka < A.outerSize(); ++ka) {
        for (SparseMatrix::InnerIterator ia(A, ka); ia; ++ia) {
            for (int kb = 0; kb < B.outerSize(); ++kb) {
                for (SparseMatrix::InnerIterator ib(B, kb); ib; ++ib) {
                    trips.emplace_back(static_cast<int>(ia.row() * rb + ib.row()),
                                       static_cast<int>(ia.col() * cb + ib.col()), ia.value() * ib.value());
                }
            }
        }
    }
    SparseMatrix out(A.rows() * rb, A.cols() * cb);
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

SparseMatrix transpose(const SparseMatrix& m)
{
    return SparseMatrix(m.transpose());
}

SparseMatrix adjoint(const SparseMatrix& m)
{
    return SparseMatrix(m.adjoint());
}

// rate * (c rho c^dag - 1/2 {c^dag c, rho}) in row-major vectorized form.
SparseMatrix dissipator(const SparseMatrix& c, double rate, const SparseMatrix& id)
{
    const SparseMatrix cdc = adjoint(c) * c;
    SparseMatrix d = kron(c, SparseMatrix(c.conjugate())) - 0.5 * kron(cdc, id) - 0.5 * kron(id, transpose(cdc));
    return rate * d;
}

double induced_one_norm(const SparseMatrix& m)
{
    double best = 0.0;
    for (int k = 0; k < m.outerSize(); ++k) {
        double col = 0.0;
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) col += std::abs(it.value());
        best = std::max(best, col);
    }
    return best;
}

Eigen::MatrixXcd unvec(const Eigen::VectorXcd& x, int n)
{
    using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    return Eigen::Map<const RowMajor>(x.data(), n, n);
}

Eigen::VectorXcd vec(const Eigen::MatrixXcd& rho)
{
    using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const RowMajor r = rho;
    return Eigen::Map<const Eigen::VectorXcd>(r.data(), r.size());
}

DensityMatrix to_density(const Layout& layout, const Eigen::VectorXcd& x)
{
    Eigen::MatrixXcd rho = unvec(x, layout.size());
    DensityMatrix raw(layout, rho);
    raw.check_invariants();
    // strip the residual anti-Hermitian part left by the solver
    return DensityMatrix(layout, 0.5 * (rho + rho.adjoint()));
}

bool close_relative(double x, double y)
{
    constexpr double rel = 1e-6;
    constexpr double floor = 1e-14;
    return std::abs(x - y) <= rel * std::max(std::abs(x), std::abs(y)) + floor;
}

bool close_relative(Complex x, Complex y)
{
    constexpr double rel = 1e-6;
    constexpr double floor = 1e-14;
    return std::abs(x - y) <= rel * std::max(std::abs(x), std::abs(y)) + floor;
}

Observables observe(const DensityMatrix& rho)
{
    return {rho.mean_a(), rho.photons_a(), rho.photons_b()};
}

FockConfig grown(FockConfig f)
{
    f.dim_a += 1;
    f.dim_b += 2;
    return f;
}

DensityMatrix solve(const DeviceParams& params, const DriveSpec& drive, bool qubit_coupled, const FockConfig& fock,
                    Device device)
{
    return steady_state(build_liouvillian(params, drive, qubit_coupled, fock, device));
}

}  // namespace

void FockConfig::validate() const
{
    if (dim_a < 2 || dim_b < 2) throw InvalidArgument("Fock truncations must be >= 2");
    if (max_dim < 1) throw InvalidArgument("max_dim must be positive");
    if (hilbert_dim() > max_dim)
        throw InvalidArgument("Hilbert dimension " + std::to_string(hilbert_dim()) + " exceeds cap " +
                              std::to_string(max_dim));
}

Operators make_operators(const Layout& layout)
{
    const int n = layout.size();
    std::vector<Triplet> ta;
    std::vector<Triplet> tb;
    std::vector<Triplet> ts;
    for (int q = 0; q < layout.dim_q; ++q) {
        for (int na = 0; na < layout.dim_a; ++na) {
            for (int nb = 0; nb < layout.dim_b; ++nb) {
                const int col = layout.index(q, na, nb);
                if (na > 0) ta.emplace_back(layout.index(q, na - 1, nb), col, std::sqrt(double(na)));
                if (nb > 0) tb.emplace_back(layout.index(q, na, nb - 1), col, std::sqrt(double(nb)));
                if (q == 1) ts.emplace_back(layout.index(0, na, nb), col, 1.0);
            }
        }
    }
    Operators ops{SparseMatrix(n, n), SparseMatrix(n, n), SparseMatrix(n, n)};
    ops.a.setFromTriplets(ta.begin(), ta.end());
    ops.b.setFromTriplets(tb.begin(), tb.end());
    ops.sigma_minus.setFromTriplets(ts.begin(), ts.end());
    return ops;
}

Liouvillian::Liouvillian(Layout layout, Device device, SparseMatrix matrix)
    : layout_(layout), device_(device), matrix_(std::move(matrix)), norm_(induced_one_norm(matrix_))
{
}

DensityMatrix::DensityMatrix(Layout layout, Eigen::MatrixXcd rho) : layout_(layout), rho_(std::move(rho))
{
    if (rho_.rows() != layout_.size() || rho_.cols() != layout_.size())
        throw InvalidArgument("density matrix shape does not match its layout");
}

Complex DensityMatrix::expect(const SparseMatrix& op) const
{
    Complex acc = 0.0;
    for (int k = 0; k < op.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(op, k); it; ++it) acc += rho_(it.col(), it.row()) * it.value();
    }
    return acc;
}

Complex DensityMatrix::mean_a() const
{
    return expect(make_operators(layout_).a);
}

double DensityMatrix::photons_a() const
{
    const auto ops = make_operators(layout_);
    return expect(SparseMatrix(adjoint(ops.a) * ops.a)).real();
}

Complex DensityMatrix::mean_b() const
{
    return expect(make_operators(layout_).b);
}

double DensityMatrix::photons_b() const
{
    const auto ops = make_operators(layout_);
    return expect(SparseMatrix(adjoint(ops.b) * ops.b)).real();
}

double DensityMatrix::qubit_excitation() const
{
    const auto ops = make_operators(layout_);
    return expect(SparseMatrix(adjoint(ops.sigma_minus) * ops.sigma_minus)).real();
}

double DensityMatrix::min_eigenvalue() const
{
    const Eigen::MatrixXcd h = 0.5 * (rho_ + rho_.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

void DensityMatrix::check_invariants() const
{
    if (!rho_.allFinite()) throw SolverError("density matrix has non-finite entries");
    const double herm = hermiticity_error();
    if (herm > 1e-10) throw SolverError("density matrix not Hermitian (deviation " + std::to_string(herm) + ")");
    const Complex tr = trace();
    if (std::abs(tr - 1.0) > 1e-10) throw SolverError("density matrix trace deviates from 1");
    const double lo = min_eigenvalue();
    if (lo < -1e-8) throw SolverError("density matrix has negative eigenvalue " + std::to_string(lo));
}

Layout device_layout(Device device, const FockConfig& fock, bool qubit_coupled)
{
    fock.validate();
    Layout l;
    l.dim_q = (qubit_coupled && fock.include_qubit && device != Device::converter) ? 2 : 1;
    l.dim_a = device == Device::qubit_cavity ? 1 : fock.dim_a;
    l.dim_b = fock.dim_b;
    return l;
}

Liouvillian build_liouvillian(const DeviceParams& params, const DriveSpec& drive, bool qubit_coupled,
                              const FockConfig& fock, Device device)
{
    params.validate();
    if (!std::isfinite(drive.amplitude) || drive.amplitude < 0.0)
        throw InvalidArgument("drive amplitude must be finite and >= 0");
    if (!std::isfinite(drive.detuning)) throw InvalidArgument("drive detuning must be finite");

    const Layout layout = device_layout(device, fock, qubit_coupled);
    const int n = layout.size();
    const Operators ops = make_operators(layout);
    const SparseMatrix ad = adjoint(ops.a);
    const SparseMatrix bd = adjoint(ops.b);
    const SparseMatrix sp = adjoint(ops.sigma_minus);
    const SparseMatrix id = identity(n);

    const double delta = drive.detuning;
    const bool has_a = device != Device::qubit_cavity;
    const bool has_q = layout.dim_q == 2;

    SparseMatrix H(n, n);
    H += (delta + params.delta_b_offset) * SparseMatrix(bd * ops.b);
    if (has_a) {
        H += delta * SparseMatrix(ad * ops.a);
        H += params.g_conv * SparseMatrix(ad * ops.b + ops.a * bd);
    }
    if (has_q) {
        H += (delta + params.delta_q_offset) * SparseMatrix(sp * ops.sigma_minus);
        H += params.mu * SparseMatrix(sp * ops.b + ops.sigma_minus * bd);
    }
    if (drive.amplitude > 0.0) {
        // i sqrt(kappa_port) (eps c^dag - eps c) on the probe port
        const bool via_a = device != Device::qubit_cavity;
        const double port = via_a ? params.kappa_a_ex : params.kappa_b_ex;
        const SparseMatrix& c = via_a ? ops.a : ops.b;
        const SparseMatrix& cd = via_a ? ad : bd;
        H += (I * std::sqrt(port) * drive.amplitude) * SparseMatrix(cd - c);
    }

    SparseMatrix L = (-I) * (kron(H, id) - kron(id, transpose(H)));

    if (has_a) L += dissipator(ops.a, params.kappa_a(), id);
    const bool bus_loss = device != Device::cqi || params.cqi_b_external_is_loss;
    if (bus_loss && params.kappa_b_ex > 0.0) L += dissipator(ops.b, params.kappa_b_ex, id);
    if (params.kappa_b_o > 0.0) {
        L += dissipator(ops.b, params.kappa_b_o * (params.n_th + 1.0), id);
        if (params.n_th > 0.0) L += dissipator(bd, params.kappa_b_o * params.n_th, id);
    }
    if (has_q) L += dissipator(ops.sigma_minus, params.gamma, id);

    L.prune(Complex(0.0));
    L.makeCompressed();
    return Liouvillian(layout, device, std::move(L));
}

DensityMatrix steady_state(const Liouvillian& L, SolveReport* report)
{
    const auto start = std::chrono::steady_clock::now();
    const int n = L.layout().size();
    const int N = n * n;
    const SparseMatrix& M = L.matrix();

    // Replace the first row (d rho_00 / dt) with the trace functional.
    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(M.nonZeros()) + static_cast<std::size_t>(n));
    for (int k = 0; k < M.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(M, k); it; ++it) {
            if (it.row() != 0) trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
        }
    }
    for (int i = 0; i < n; ++i) trips.emplace_back(0, i * n + i, 1.0);
    SparseMatrix A(N, N);
    A.setFromTriplets(trips.begin(), trips.end());
    A.makeCompressed();

    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success)
        throw SolverError("steady state is not unique (singular Liouvillian with trace constraint): " +
                          lu.lastErrorMessage());

    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(N);
    rhs(0) = 1.0;
    Eigen::VectorXcd x = lu.solve(rhs);
    for (int sweep = 0; sweep < 2; ++sweep) {
        const Eigen::VectorXcd r = rhs - A * x;
        x += lu.solve(r);
    }
    if (!x.allFinite()) throw SolverError("steady state solve produced non-finite values");

    const double tol = 1e-10;
    double residual = (M * x).norm();
    bool stepped = false;
    if (residual > tol * L.norm()) {
        DensityMatrix start_state(L.layout(), unvec(x, n));
        const DensityMatrix relaxed = integrate_to_steady_state(L, start_state, tol);
        x = vec(relaxed.matrix());
        residual = (M * x).norm();
        stepped = true;
    }

    DensityMatrix rho = to_density(L.layout(), x);
    if (report != nullptr) {
        report->residual = residual;
        report->relative_residual = L.norm() > 0.0 ? residual / L.norm() : residual;
        report->hilbert_dim = n;
        report->used_time_stepping = stepped;
        report->seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    return rho;
}

DensityMatrix integrate_to_steady_state(const Liouvillian& L, const DensityMatrix& initial, double tol,
                                        double max_time)
{
    namespace odeint = boost::numeric::odeint;
    using State = std::vector<double>;

    const int n = L.layout().size();
    const int N = n * n;
    const SparseMatrix& M = L.matrix();

    const Eigen::VectorXcd x0 = vec(initial.matrix());
    State y(2 * static_cast<std::size_t>(N));
    for (int k = 0; k < N; ++k) {
        y[2 * k] = x0(k).real();
        y[2 * k + 1] = x0(k).imag();
    }

    Eigen::VectorXcd work(N);
    Eigen::VectorXcd deriv(N);
    auto to_complex = [&](const State& s, Eigen::VectorXcd& out) {
        for (int k = 0; k < N; ++k) out(k) = Complex(s[2 * k], s[2 * k + 1]);
    };
    auto rhs = [&](const State& s, State& ds, double) {
        to_complex(s, work);
        deriv.noalias() = M * work;
        for (int k = 0; k < N; ++k) {
            ds[2 * k] = deriv(k).real();
            ds[2 * k + 1] = deriv(k).imag();
        }
    };

    auto stepper = odeint::make_controlled(1e-13, 1e-11, odeint::runge_kutta_dopri5<State>());
    const double target = tol * L.norm();
    const double chunk = 10.0 / std::max(1e-3, L.norm() / double(N));
    double t = 0.0;
    double dt = 1e-3;
    while (t < max_time) {
        odeint::integrate_adaptive(stepper, rhs, y, t, t + chunk, dt);
        t += chunk;
        to_complex(y, work);
        // keep the trace pinned; rounding drift accumulates over long runs
        Complex tr = 0.0;
        for (int i = 0; i < n; ++i) tr += work(i * n + i);
        work /= tr;
        for (int k = 0; k < N; ++k) {
            y[2 * k] = work(k).real();
            y[2 * k + 1] = work(k).imag();
        }
        if ((M * work).norm() <= target) return to_density(L.layout(), work);
    }
    throw SolverError("time stepping did not reach the steady-state residual target");
}

Readout extract_response(const DensityMatrix& rho, const DeviceParams& params, const DriveSpec& drive, Device device)
{
    const auto ops = make_operators(rho.layout());
    const bool via_a = device != Device::qubit_cavity;
    const double port = via_a ? params.kappa_a_ex : params.kappa_b_ex;
    const SparseMatrix& c = via_a ? ops.a : ops.b;
    const Complex mean = rho.expect(c);
    const double photons = rho.expect(SparseMatrix(adjoint(c) * c)).real();

    Readout out;
    out.phi_inc = std::max(0.0, port * (photons - std::norm(mean)));
    if (drive.amplitude > 0.0) out.f = 1.0 - std::sqrt(port) * mean / drive.amplitude;
    return out;
}

Readout me_response(const DeviceParams& params, const DriveSpec& drive, bool qubit_coupled, const FockConfig& fock,
                    Device device)
{
    const Readout full = extract_response(solve(params, drive, qubit_coupled, fock, device), params, drive, device);
    if (drive.amplitude > 0.0) {
        DriveSpec half = drive;
        half.amplitude = drive.amplitude / 2.0;
        const Readout weaker = extract_response(solve(params, half, qubit_coupled, fock, device), params, half, device);
        if (std::abs(*full.f - *weaker.f) >= 1e-4)
            throw ModelValidityError("weak-drive check failed: f moved by " +
                                     std::to_string(std::abs(*full.f - *weaker.f)) +
                                     " when halving epsilon; use a smaller drive or a larger truncation");
    }
    return full;
}

TruncationReport truncation_check(const DeviceParams& params, const DriveSpec& drive, const FockConfig& fock,
                                  Device device)
{
    TruncationReport rep;
    rep.base = fock;
    rep.refined = grown(fock);
    rep.base_values = observe(solve(params, drive, fock.include_qubit, fock, device));
    if (rep.refined.hilbert_dim() > rep.refined.max_dim) {
        rep.refined_values = rep.base_values;
        rep.passed = false;
        return rep;
    }
    rep.refined_values = observe(solve(params, drive, fock.include_qubit, rep.refined, device));
    rep.passed = close_relative(rep.base_values.mean_a, rep.refined_values.mean_a) &&
                 close_relative(rep.base_values.photons_a, rep.refined_values.photons_a) &&
                 close_relative(rep.base_values.photons_b, rep.refined_values.photons_b);
    return rep;
}

DensityMatrix converged_steady_state(const DeviceParams& params, const DriveSpec& drive, bool qubit_coupled,
                                     const FockConfig& fock, Device device, FockConfig* used)
{
    FockConfig current = fock;
    DensityMatrix rho = solve(params, drive, qubit_coupled, current, device);
    for (;;) {
        const FockConfig next = grown(current);
        if (next.hilbert_dim() > next.max_dim)
            throw SolverError("Fock truncation did not converge below the dimension cap " +
                              std::to_string(fock.max_dim));
        DensityMatrix finer = solve(params, drive, qubit_coupled, next, device);
        const Observables a = observe(rho);
        const Observables b = observe(finer);
        if (close_relative(a.mean_a, b.mean_a) && close_relative(a.photons_a, b.photons_a) &&
            close_relative(a.photons_b, b.photons_b)) {
            if (used != nullptr) *used = current;
            return rho;
        }
        current = next;
        rho = std::move(finer);
    }
}

double thermal_leak_flux(const DeviceParams& params, double delta, bool qubit_coupled, const FockConfig& fock,
                         Scheme scheme)
{
    params.validate();
    if (!std::isfinite(delta)) throw InvalidArgument("probe detuning must be finite");
    // no thermal source: the undriven steady state is the vacuum
    if (params.n_th == 0.0 || params.kappa_b_o == 0.0) return 0.0;

    const DriveSpec dark{0.0, delta};
    if (scheme == Scheme::cqi) {
        if (params.kappa_a_ex == 0.0) return 0.0;
        const DensityMatrix rho = converged_steady_state(params, dark, qubit_coupled, fock, Device::cqi);
        return params.kappa_a_ex * rho.photons_a();
    }

    return compose_cascade_flux(cascade_device_fluxes(params, qubit_coupled, fock), params, delta, qubit_coupled);
}

CascadeFluxes cascade_device_fluxes(const DeviceParams& params, bool qubit_coupled, const FockConfig& fock)
{
    params.validate();
    CascadeFluxes out;
    if (params.n_th == 0.0 || params.kappa_b_o == 0.0) return out;
    const DriveSpec dark{0.0, 0.0};
    const DensityMatrix conv = converged_steady_state(params, dark, false, fock, Device::converter);
    const DensityMatrix cav = converged_steady_state(params, dark, qubit_coupled, fock, Device::qubit_cavity);
    out.converter_bus = params.kappa_b_ex * conv.photons_b();
    out.converter_port_a = params.kappa_a_ex * conv.photons_a();
    out.cavity_bus = params.kappa_b_ex * cav.photons_b();
    return out;
}

double compose_cascade_flux(const CascadeFluxes& fluxes, const DeviceParams& params, double delta, bool qubit_coupled)
{
    const double t2 = std::norm(model::converter_transmission(params, delta));
    const double r2 = std::norm(model::qubit_cavity_response(params, delta, qubit_coupled));
    return fluxes.converter_bus * r2 * t2 + fluxes.cavity_bus * t2 + fluxes.converter_port_a;
}

FockConfig default_fock(double n_th)
{
    FockConfig f;
    if (n_th > 0.5) {
        f.dim_a = 4;
        f.dim_b = 4 + 2 * static_cast<int>(std::ceil(n_th));
    }
    return f;
}

}  // namespace cqi::lindblad
