#include "cqi/sweeps.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "cqi/error.hpp"

namespace cqi::sweeps {

namespace {

struct SchemeData {
    protocol::NodeResponse node;
    protocol::LinkResult link;
};

struct PointData {
    std::optional<SchemeData> cqi;
    std::optional<SchemeData> cas;
    std::optional<double> delta_star;
};

bool wants(SchemeSelect sel, Scheme s)
{
    return sel == SchemeSelect::both || (sel == SchemeSelect::cqi) == (s == Scheme::cqi);
}

PointData evaluate_schemes(const DeviceParams& p, SchemeSelect sel, bool optimize, double delta,
                           const EvalOptions& opts)
{
    PointData out;
    for (Scheme s : {Scheme::cqi, Scheme::cas}) {
        if (!wants(sel, s)) continue;
        const NoiseModel noise = noise_model(p, s, opts);
        double d = delta;
        if (optimize && s == Scheme::cqi) {
            d = optimize_detuning(p, s, noise, opts.protocol).delta_star;
            out.delta_star = d;
        }
        SchemeData data;
        data.node = node_response(p, s, d, noise);
        data.link = protocol::link_entangle(data.node, data.node, opts.protocol.transmission);
        (s == Scheme::cqi ? out.cqi : out.cas) = data;
    }
    return out;
}

double exact_figure_of_merit(const SchemeData& d, int n_nodes, double transmission)
{
    const std::vector<protocol::LinkSpec> links(static_cast<std::size_t>(n_nodes - 1),
                                                protocol::LinkSpec{d.node, d.node, transmission});
    return protocol::ghz_chain(links, n_nodes).figure_of_merit;
}

void fill_row(SweepRow& row, const PointData& data, int n_nodes, double transmission)
{
    std::optional<protocol::NetworkResult> net_cqi;
    std::optional<protocol::NetworkResult> net_cas;
    if (data.cqi) {
        net_cqi = protocol::compose_network(data.cqi->link, n_nodes);
        row.f_cqi = net_cqi->ghz_fidelity;
        row.p_cqi = net_cqi->total_success;
    }
    if (data.cas) {
        net_cas = protocol::compose_network(data.cas->link, n_nodes);
        row.f_cas = net_cas->ghz_fidelity;
        row.p_cas = net_cas->total_success;
    }
    row.delta_star = data.delta_star;
    if (!net_cqi || !net_cas) return;

    const double inf_cqi = 1.0 - *row.f_cqi;
    if (inf_cqi > 0.0)
        row.infidelity_ratio = (1.0 - *row.f_cas) / inf_cqi;
    else
        row.warnings.emplace_back("CQI infidelity is zero; infidelity ratio undefined");
    if (*row.p_cas > 0.0)
        row.efficiency_ratio = *row.p_cqi / *row.p_cas;
    else
        row.warnings.emplace_back("CAS success probability is zero; efficiency ratio undefined");

    if (net_cas->figure_of_merit > 0.0) {
        row.zeta = protocol::zeta(*net_cqi, *net_cas);
        if (*row.zeta > 0.0) row.log_zeta = std::log(*row.zeta);
        if (n_nodes <= 16) {
            const double cas_exact = exact_figure_of_merit(*data.cas, n_nodes, transmission);
            if (cas_exact > 0.0) row.zeta_exact = exact_figure_of_merit(*data.cqi, n_nodes, transmission) / cas_exact;
        }
    } else {
        row.warnings.emplace_back("CAS figure of merit is zero; zeta undefined");
    }
}

void mark_failed(SweepRow& row, const std::string& message)
{
    SweepRow failed;
    failed.value = row.value;
    failed.n_th = row.n_th;
    failed.warnings = std::move(row.warnings);
    failed.error = message;
    row = std::move(failed);
}

using Decorate = std::function<void(SweepRow&)>;

// Evaluates eval(0..n-1) on a pool; rows reach `decorate` and `sink` in index order.
std::vector<SweepRow> ordered_pool(std::size_t n, const std::function<SweepRow(std::size_t)>& eval, unsigned workers,
                                   const Decorate& decorate, const RowSink& sink)
{
    std::vector<std::optional<SweepRow>> slots(n);
    std::mutex lock;
    std::size_t next_emit = 0;
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;

    auto work = [&] {
        for (;;) {
            const std::size_t i = next++;
            if (i >= n) return;
            SweepRow row;
            try {
                row = eval(i);
            } catch (...) {
                std::lock_guard<std::mutex> g(lock);
                if (!failure) failure = std::current_exception();
                next = n;
                return;
            }
            std::lock_guard<std::mutex> g(lock);
            slots[i] = std::move(row);
            while (next_emit < n && slots[next_emit] && !failure) {
                if (decorate) decorate(*slots[next_emit]);
                if (sink) sink(*slots[next_emit]);
                ++next_emit;
            }
        }
    };

    unsigned threads = workers != 0 ? workers : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<SweepRow> rows;
    rows.reserve(n);
    for (auto& s : slots) rows.push_back(std::move(*s));
    return rows;
}

std::vector<SweepRow> grid_sweep(const SweepSpec& spec, const EvalOptions& opts, const Decorate& decorate,
                                 const RowSink& sink)
{
    spec.validate();
    opts.protocol.validate();
    return ordered_pool(
        spec.grid.size(), [&](std::size_t i) { return evaluate_point(spec, spec.grid[i], opts); }, opts.workers,
        decorate, sink);
}

// Golden-section maximisation of g on [lo, hi]; returns (x, g(x)).
std::pair<double, double> golden_max(const std::function<double(double)>& g, double lo, double hi)
{
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double gc = g(c);
    double gd = g(d);
    for (int it = 0; it < 200 && hi - lo > 1e-7; ++it) {
        if (gc >= gd) {
            hi = d;
            d = c;
            gd = gc;
            c = hi - inv_phi * (hi - lo);
            gc = g(c);
        } else {
            lo = c;
            c = d;
            gc = gd;
            d = lo + inv_phi * (hi - lo);
            gd = g(d);
        }
    }
    return gc >= gd ? std::pair{c, gc} : std::pair{d, gd};
}

}  // namespace

const char* to_string(Variable v)
{
    switch (v) {
    case Variable::kappa_b_o: return "kappa_b_o";
    case Variable::n_th: return "n_th";
    case Variable::delta: return "delta";
    case Variable::nodes: return "N";
    }
    return "?";
}

const char* to_string(SchemeSelect s)
{
    switch (s) {
    case SchemeSelect::cqi: return "cqi";
    case SchemeSelect::cas: return "cas";
    case SchemeSelect::both: return "both";
    }
    return "?";
}

Variable parse_variable(const std::string& name)
{
    if (name == "kappa_b_o") return Variable::kappa_b_o;
    if (name == "n_th") return Variable::n_th;
    if (name == "delta") return Variable::delta;
    if (name == "N" || name == "nodes") return Variable::nodes;
    throw InvalidArgument("unknown sweep variable '" + name + "' (expected kappa_b_o, n_th, delta or N)");
}

SchemeSelect parse_scheme_select(const std::string& name)
{
    if (name == "cqi") return SchemeSelect::cqi;
    if (name == "cas") return SchemeSelect::cas;
    if (name == "both") return SchemeSelect::both;
    throw InvalidArgument("unknown scheme '" + name + "' (expected cqi, cas or both)");
}

double ProtocolSettings::window(const DeviceParams& p) const
{
    return detection_window ? *detection_window : 20.0 / p.kappa_a();
}

void ProtocolSettings::validate() const
{
    if (detection_window && (!std::isfinite(*detection_window) || *detection_window < 0.0))
        throw InvalidArgument("detection window must be finite and >= 0");
    if (!std::isfinite(transmission) || transmission < 0.0 || transmission > 1.0)
        throw InvalidArgument("link transmission must lie in [0, 1]");
}

lindblad::FockConfig EvalOptions::fock_for(double n_th) const
{
    return fock ? *fock : lindblad::default_fock(n_th);
}

double NoiseModel::nu(const DeviceParams& p, double delta) const
{
    if (scheme == Scheme::cqi) return window * 0.5 * (cqi_coupled + cqi_uncoupled);
    return window * 0.5 *
           (lindblad::compose_cascade_flux(cas_coupled, p, delta, true) +
            lindblad::compose_cascade_flux(cas_uncoupled, p, delta, false));
}

NoiseModel noise_model(const DeviceParams& p, Scheme scheme, const EvalOptions& opts)
{
    p.validate();
    NoiseModel m;
    m.scheme = scheme;
    m.window = opts.protocol.window(p);
    if (p.n_th == 0.0 || p.kappa_b_o == 0.0) return m;
    const lindblad::FockConfig fock = opts.fock_for(p.n_th);
    if (scheme == Scheme::cqi) {
        // the undriven CQI flux does not depend on the probe detuning
        m.cqi_coupled = lindblad::thermal_leak_flux(p, 0.0, true, fock, Scheme::cqi);
        m.cqi_uncoupled = lindblad::thermal_leak_flux(p, 0.0, false, fock, Scheme::cqi);
    } else {
        m.cas_coupled = lindblad::cascade_device_fluxes(p, true, fock);
        m.cas_uncoupled = lindblad::cascade_device_fluxes(p, false, fock);
    }
    return m;
}

protocol::NodeResponse node_response(const DeviceParams& p, Scheme scheme, double delta, const NoiseModel& noise)
{
    protocol::NodeResponse node;
    node.f_s = model::response(scheme, p, delta, false);
    node.f_g = model::response(scheme, p, delta, true);
    node.nu = noise.nu(p, delta);
    return node;
}

protocol::LinkResult evaluate_link(const DeviceParams& p, Scheme scheme, double delta, const NoiseModel& noise,
                                   const ProtocolSettings& settings)
{
    const protocol::NodeResponse node = node_response(p, scheme, delta, noise);
    return protocol::link_entangle(node, node, settings.transmission);
}

DetuningOptimum optimize_detuning(const DeviceParams& p, Scheme scheme, const NoiseModel& noise,
                                  const ProtocolSettings& settings)
{
    auto objective = [&](double delta) {
        const double f = evaluate_link(p, scheme, delta, noise, settings).fidelity;
        if (!std::isfinite(f)) throw SolverError("non-finite link fidelity at detuning " + std::to_string(delta));
        return f;
    };

    DetuningOptimum best;
    best.f_at_zero = objective(0.0);
    best.delta_star = 0.0;
    best.f_star = best.f_at_zero;
    const double G = p.g_conv;
    if (G == 0.0) return best;

    auto consider = [&](double x, double fx) {
        if (fx > best.f_star) {
            best.delta_star = x;
            best.f_star = fx;
        }
    };
    consider(-G, objective(-G));
    consider(G, objective(G));
    for (auto [lo, hi] : {std::pair{-3.0 * G, 0.0}, std::pair{-G, G}, std::pair{0.0, 3.0 * G}}) {
        const auto [x, fx] = golden_max(objective, lo, hi);
        consider(x, fx);
    }

    if (best.delta_star < 0.0) {
        const double mirrored = objective(-best.delta_star);
        if (mirrored >= best.f_star - 1e-10) {
            best.delta_star = -best.delta_star;
            best.f_star = std::max(best.f_star, mirrored);
        }
    }
    return best;
}

DetuningOptimum optimize_detuning(const DeviceParams& p, double n_th, Scheme scheme, const EvalOptions& opts)
{
    DeviceParams q = p;
    q.n_th = n_th;
    return optimize_detuning(q, scheme, noise_model(q, scheme, opts), opts.protocol);
}

void SweepSpec::validate() const
{
    base.validate();
    if (grid.empty()) throw InvalidArgument("sweep grid is empty");
    for (double v : grid)
        if (!std::isfinite(v)) throw InvalidArgument("sweep grid values must be finite");
    if (grid.size() > 1) {
        const bool up = grid[1] > grid[0];
        for (std::size_t i = 1; i < grid.size(); ++i)
            if (up ? !(grid[i] > grid[i - 1]) : !(grid[i] < grid[i - 1]))
                throw InvalidArgument("sweep grid must be strictly monotone");
    }
    if (variable == Variable::kappa_b_o || variable == Variable::n_th)
        for (double v : grid)
            if (v < 0.0) throw InvalidArgument(std::string(to_string(variable)) + " grid values must be >= 0");
    if (variable == Variable::nodes)
        for (double v : grid)
            if (v != std::floor(v) || v < 2.0 || static_cast<long long>(v) % 2 != 0)
                throw InvalidArgument("node counts must be even integers >= 2");
    if (variable == Variable::delta && optimize_detuning)
        throw InvalidArgument("detuning optimization cannot be combined with a detuning sweep");
    if (!std::isfinite(delta)) throw InvalidArgument("probe detuning must be finite");
    if (n_nodes < 2 || n_nodes % 2 != 0) throw InvalidArgument("node count must be even and >= 2");
}

SweepRow evaluate_point(const SweepSpec& spec, double value, const EvalOptions& opts)
{
    DeviceParams p = spec.base;
    double delta = spec.delta;
    int n_nodes = spec.n_nodes;
    switch (spec.variable) {
    case Variable::kappa_b_o: p.kappa_b_o = value; break;
    case Variable::n_th: p.n_th = value; break;
    case Variable::delta: delta = value; break;
    case Variable::nodes: n_nodes = static_cast<int>(value); break;
    }

    SweepRow row;
    row.value = value;
    row.n_th = p.n_th;
    try {
        const PointData data = evaluate_schemes(p, spec.scheme, spec.optimize_detuning, delta, opts);
        fill_row(row, data, n_nodes, opts.protocol.transmission);
    } catch (const Error& e) {
        mark_failed(row, e.what());
    }
    return row;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const EvalOptions& opts, const RowSink& sink)
{
    switch (spec.variable) {
    case Variable::kappa_b_o: return sweep_kappa_b(spec, opts, sink);
    case Variable::n_th: return sweep_nth(spec, opts, sink);
    default: return grid_sweep(spec, opts, {}, sink);
    }
}

std::vector<SweepRow> sweep_kappa_b(const SweepSpec& spec, const EvalOptions& opts, const RowSink& sink)
{
    if (spec.variable != Variable::kappa_b_o) throw InvalidArgument("sweep_kappa_b needs variable kappa_b_o");
    const bool ascending = spec.grid.size() < 2 || spec.grid[1] > spec.grid[0];
    std::optional<double> previous;
    auto trend = [&](SweepRow& row) {
        if (!row.f_cqi) return;
        if (previous) {
            const bool rose = ascending ? *row.f_cqi > *previous + 1e-12 : *row.f_cqi < *previous - 1e-12;
            if (rose) row.warnings.emplace_back("F_cqi increased with kappa_b_o");
        }
        previous = row.f_cqi;
    };
    return grid_sweep(spec, opts, trend, sink);
}

std::vector<SweepRow> sweep_nth(const SweepSpec& spec, const EvalOptions& opts, const RowSink& sink)
{
    if (spec.variable != Variable::n_th) throw InvalidArgument("sweep_nth needs variable n_th");
    return grid_sweep(spec, opts, {}, sink);
}

std::vector<SweepRow> scaling_sweep(const std::vector<int>& n_grid, const std::vector<double>& n_th_list,
                                    const DeviceParams& params, bool optimize, const EvalOptions& opts,
                                    const RowSink& sink)
{
    if (n_grid.empty() || n_th_list.empty()) throw InvalidArgument("scaling sweep needs nonempty grids");
    for (int n : n_grid)
        if (n < 2 || n % 2 != 0) throw InvalidArgument("node counts must be even integers >= 2");
    for (double t : n_th_list)
        if (!std::isfinite(t) || t < 0.0) throw InvalidArgument("n_th values must be finite and >= 0");
    params.validate();
    opts.protocol.validate();

    // links depend on n_th only; evaluate those concurrently, then compose per N
    std::vector<std::optional<PointData>> links(n_th_list.size());
    std::vector<std::string> errors(n_th_list.size());
    ordered_pool(
        n_th_list.size(),
        [&](std::size_t i) {
            DeviceParams p = params;
            p.n_th = n_th_list[i];
            try {
                links[i] = evaluate_schemes(p, SchemeSelect::both, optimize, 0.0, opts);
            } catch (const Error& e) {
                errors[i] = e.what();
            }
            return SweepRow{};
        },
        opts.workers, {}, {});

    std::vector<SweepRow> rows;
    for (int n : n_grid) {
        for (std::size_t i = 0; i < n_th_list.size(); ++i) {
            SweepRow row;
            row.value = n;
            row.n_th = n_th_list[i];
            if (links[i]) {
                try {
                    fill_row(row, *links[i], n, opts.protocol.transmission);
                } catch (const Error& e) {
                    mark_failed(row, e.what());
                }
            } else {
                mark_failed(row, errors[i]);
            }
            if (sink) sink(row);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::vector<double> default_kappa_b_grid()
{
    std::vector<double> g(31);
    for (int k = 0; k <= 30; ++k) g[k] = std::pow(10.0, -2.0 + 2.0 * k / 30.0);
    return g;
}

std::vector<double> default_nth_grid()
{
    std::vector<double> g(21);
    for (int k = 0; k <= 20; ++k) g[k] = k / 20.0;
    return g;
}

std::vector<int> default_node_grid()
{
    return {2, 4, 6, 8, 10};
}

}  // namespace cqi::sweeps
