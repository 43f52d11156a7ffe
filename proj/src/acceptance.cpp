#include "cqi/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "cqi/core_model.hpp"
#include "cqi/error.hpp"
#include "cqi/format.hpp"
#include "cqi/lindblad.hpp"
#include "cqi/protocol.hpp"
#include "cqi/sweeps.hpp"

namespace cqi::acceptance {

namespace {

using Clock = std::chrono::steady_clock;
using Rng = std::mt19937_64;
constexpr Complex I{0.0, 1.0};

double uniform(Rng& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::string num(double v)
{
    return format_number(v, 6);
}

std::string yes_no(bool b)
{
    return b ? "yes" : "no";
}

DeviceParams random_passive(Rng& rng)
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

// Steady-state coupled-mode equations 0 = -M x + sqrt(kappa_in) e_0 with unit input,
// solved densely. Rows: (i d + kappa/2) on the diagonal, i * coupling off it.
Eigen::VectorXcd coupled_mode_solve(const Eigen::MatrixXcd& m, double kappa_in)
{
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(m.rows());
    rhs(0) = std::sqrt(kappa_in);
    return m.fullPivLu().solve(rhs);
}

Complex oracle_cqi(const DeviceParams& p, double d, bool coupled)
{
    const double mu = coupled ? p.mu : 0.0;
    Eigen::Matrix3cd m;
    m << I * d + p.kappa_a() / 2.0, I * p.g_conv, 0.0,
         I * p.g_conv, I * (d + p.delta_b_offset) + p.kappa_b_cqi() / 2.0, I * mu,
         0.0, I * mu, I * (d + p.delta_q_offset) + p.gamma / 2.0;
    return 1.0 - std::sqrt(p.kappa_a_ex) * coupled_mode_solve(m, p.kappa_a_ex)(0);
}

Complex oracle_converter(const DeviceParams& p, double d)
{
    Eigen::Matrix2cd m;
    m << I * d + p.kappa_a() / 2.0, I * p.g_conv,
         I * p.g_conv, I * (d + p.delta_b_offset) + p.kappa_b_bus() / 2.0;
    return -std::sqrt(p.kappa_b_ex) * coupled_mode_solve(m, p.kappa_a_ex)(1);
}

Complex oracle_cavity(const DeviceParams& p, double d, bool coupled)
{
    const double mu = coupled ? p.mu : 0.0;
    Eigen::Matrix2cd m;
    m << I * (d + p.delta_b_offset) + p.kappa_b_bus() / 2.0, I * mu,
         I * mu, I * (d + p.delta_q_offset) + p.gamma / 2.0;
    return 1.0 - std::sqrt(p.kappa_b_ex) * coupled_mode_solve(m, p.kappa_b_ex)(0);
}

CriterionResult resonance_identity()
{
    CriterionResult r{1, "resonance identity from cooperativities", false, "", "max |diff| < 1e-12, 100 random sets"};
    Rng rng(101);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const DeviceParams p = random_passive(rng);
        for (bool coupled : {false, true}) {
            const double kb = p.kappa_b_cqi();
            const double c_ab = 4.0 * p.g_conv * p.g_conv / (p.kappa_a() * kb);
            const double c_bq = coupled ? 4.0 * p.mu * p.mu / (p.gamma * kb) : 0.0;
            const double expect = 1.0 - (2.0 * p.kappa_a_ex / p.kappa_a()) / (1.0 + c_ab / (1.0 + c_bq));
            worst = std::max(worst, std::abs(model::cqi_response(p, 0.0, coupled) - expect));
        }
    }
    r.passed = worst < 1e-12;
    r.measured = "max |diff| = " + num(worst);
    return r;
}

CriterionResult dense_oracle()
{
    CriterionResult r{2, "closed forms vs dense coupled-mode solve", false, "",
                      "max |diff| < 1e-12 (CQI 3x3, converter and cavity 2x2, chain)"};
    Rng rng(202);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        DeviceParams p = random_passive(rng);
        p.delta_b_offset = uniform(rng, -3.0, 3.0);
        p.delta_q_offset = uniform(rng, -3.0, 3.0);
        for (int k = 0; k < 5; ++k) {
            const double d = uniform(rng, -2.0 * p.g_conv - 5.0, 2.0 * p.g_conv + 5.0);
            const Complex t = oracle_converter(p, d);
            worst = std::max(worst, std::abs(model::converter_transmission(p, d) - t));
            for (bool coupled : {false, true}) {
                worst = std::max(worst, std::abs(model::cqi_response(p, d, coupled) - oracle_cqi(p, d, coupled)));
                const Complex rc = oracle_cavity(p, d, coupled);
                worst = std::max(worst, std::abs(model::qubit_cavity_response(p, d, coupled) - rc));
                worst = std::max(worst, std::abs(model::cas_response(p, d, coupled) - t * rc * t));
            }
        }
    }
    r.passed = worst < 1e-12;
    r.measured = "max |diff| = " + num(worst);
    return r;
}

CriterionResult master_equation_agreement()
{
    CriterionResult r{3, "zero-temperature master equation vs closed form", false, "",
                      "max |f_ME - f| < 1e-3, 20 random sets, eps = 1e-3 sqrt(kappa_a), dims (3,3)"};
    Rng rng(303);
    lindblad::FockConfig fock;
    fock.dim_a = 3;
    fock.dim_b = 3;
    double worst = 0.0;
    try {
        for (int i = 0; i < 20; ++i) {
            DeviceParams p;
            p.kappa_a_o = uniform(rng, 0.0, 3.0);
            p.kappa_a_ex = uniform(rng, 1.0, 20.0);
            p.kappa_b_o = uniform(rng, 0.01, 1.0);
            p.kappa_b_ex = uniform(rng, 0.0, 15.0);
            p.g_conv = uniform(rng, 0.0, 15.0);
            p.mu = uniform(rng, 0.0, 15.0);
            p.gamma = uniform(rng, 0.5, 2.0);
            p.cqi_b_external_is_loss = uniform(rng, 0.0, 1.0) < 0.5;
            const lindblad::DriveSpec drive{1e-3 * std::sqrt(p.kappa_a()), uniform(rng, -3.0, 3.0)};
            for (bool coupled : {true, false}) {
                const lindblad::Readout out = lindblad::me_response(p, drive, coupled, fock);
                worst = std::max(worst, std::abs(*out.f - model::cqi_response(p, drive.detuning, coupled)));
            }
        }
    } catch (const Error& e) {
        r.measured = std::string("solver error: ") + e.what();
        return r;
    }
    r.passed = worst < 1e-3;
    r.measured = "max |diff| = " + num(worst);
    return r;
}

CriterionResult detailed_balance()
{
    CriterionResult r{4, "thermal detailed balance of the bare cavity", false, "",
                      "|<b^dag b> - n_th kappa_b_o / kappa_b| < 1e-6"};
    struct Case {
        double n_th, kbo, kbex;
    };
    double worst = 0.0;
    double headline = 0.0;
    try {
        for (const Case c : {Case{0.5, 0.1, 10.0}, Case{1.0, 0.1, 10.0}, Case{2.0, 0.5, 5.0}}) {
            DeviceParams p;
            p.g_conv = 0.0;
            p.mu = 0.0;
            p.n_th = c.n_th;
            p.kappa_b_o = c.kbo;
            p.kappa_b_ex = c.kbex;
            const auto rho = lindblad::converged_steady_state(p, {0.0, 0.0}, false, lindblad::default_fock(c.n_th));
            const double n = rho.photons_b();
            if (c.n_th == 0.5) headline = n;
            worst = std::max(worst, std::abs(n - c.n_th * c.kbo / (c.kbo + c.kbex)));
        }
    } catch (const Error& e) {
        r.measured = std::string("solver error: ") + e.what();
        return r;
    }
    r.passed = worst < 1e-6;
    r.measured = "<b^dag b> = " + format_number(headline, 8) + " at n_th 0.5; max |diff| = " + num(worst);
    return r;
}

CriterionResult protocol_identity()
{
    CriterionResult r{5, "link bookkeeping vs closed-form F and P", false, "",
                      "max |diff| < 1e-12 over random amplitudes; ideal nodes give F = P = 1"};
    Rng rng(505);
    double worst = 0.0;
    double worst_sum = 0.0;
    auto draw = [&] { return std::polar(std::sqrt(uniform(rng, 0.0, 1.0)), uniform(rng, 0.0, 2.0 * std::numbers::pi)); };
    for (int i = 0; i < 500; ++i) {
        protocol::NodeResponse node;
        node.f_s = draw();
        node.f_g = draw();
        const protocol::LinkResult res = protocol::link_entangle(node, node);
        const double p = 0.5 * (std::norm(node.f_s) + std::norm(node.f_g));
        const double f = std::norm(node.f_s - node.f_g) / (4.0 * p);
        worst = std::max({worst, std::abs(res.fidelity - f), std::abs(res.success_prob - p)});
        worst_sum = std::max(worst_sum, std::abs(res.success_prob + res.no_click_prob - 1.0));
    }
    const protocol::LinkResult ideal = protocol::link_entangle(protocol::NodeResponse{}, protocol::NodeResponse{});
    const double ideal_dev = std::max(std::abs(ideal.fidelity - 1.0), std::abs(ideal.success_prob - 1.0));
    r.passed = worst < 1e-12 && worst_sum < 1e-12 && ideal_dev <= 4.0 * std::numeric_limits<double>::epsilon();
    r.measured = "max |diff| = " + num(worst) + "; outcome sum error = " + num(worst_sum) +
                 "; ideal |F-1|, |P-1| <= " + num(ideal_dev);
    return r;
}

CriterionResult kappa_b_trends()
{
    CriterionResult r{6, "loss sweep trends at default parameters", false, "",
                      "F_cqi nonincreasing; F_cqi > F_cas and P_cqi/P_cas > 1 on kappa_b_o in [0.01, 1]; matched F_cqi > 0.999"};
    sweeps::SweepSpec spec;
    spec.variable = sweeps::Variable::kappa_b_o;
    spec.grid = sweeps::default_kappa_b_grid();
    sweeps::EvalOptions opts;
    opts.workers = 1;
    const auto rows = sweeps::sweep_kappa_b(spec, opts);

    int increases = 0;
    int errors = 0;
    double min_gap = std::numeric_limits<double>::infinity();
    double min_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (!row.error.empty() || !row.f_cqi || !row.f_cas || !row.efficiency_ratio) {
            ++errors;
            continue;
        }
        if (i > 0 && rows[i - 1].f_cqi && *row.f_cqi > *rows[i - 1].f_cqi + 1e-12) ++increases;
        min_gap = std::min(min_gap, *row.f_cqi - *row.f_cas);
        min_ratio = std::min(min_ratio, *row.efficiency_ratio);
    }

    DeviceParams lossless;
    lossless.kappa_b_o = spec.grid.front();
    const DeviceParams matched = model::impedance_matched(lossless);
    protocol::NodeResponse node;
    node.f_s = model::cqi_response(matched, 0.0, false);
    node.f_g = model::cqi_response(matched, 0.0, true);
    const double f_matched = protocol::link_closed_form(node).fidelity;

    r.passed = errors == 0 && increases == 0 && min_gap > 0.0 && min_ratio > 1.0 && f_matched > 0.999;
    r.measured = "F_cqi increases: " + std::to_string(increases) + "; min(F_cqi - F_cas) = " + num(min_gap) +
                 "; min P_cqi/P_cas = " + num(min_ratio) + "; matched F_cqi = " + num(f_matched) +
                 (errors ? "; rows with errors: " + std::to_string(errors) : "");
    return r;
}

CriterionResult noise_trends()
{
    CriterionResult r{7, "thermal noise trends with detuning optimization", false, "",
                      "(1-F_cas)/(1-F_cqi) strictly increasing and > 1 on n_th 0.1..0.5; F_cqi(delta*) >= F_cqi(0) at n_th 0.5"};
    sweeps::SweepSpec spec;
    spec.variable = sweeps::Variable::n_th;
    spec.grid = {0.1, 0.2, 0.3, 0.4, 0.5};
    spec.optimize_detuning = true;
    sweeps::EvalOptions opts;
    opts.workers = 1;
    const auto rows = sweeps::sweep_nth(spec, opts);

    std::string ratios;
    bool increasing = true;
    bool above_one = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].error.empty() || !rows[i].infidelity_ratio) {
            r.measured = "row n_th " + num(rows[i].value) + " failed: " + rows[i].error;
            return r;
        }
        const double q = *rows[i].infidelity_ratio;
        ratios += (i ? ", " : "") + num(q);
        if (q <= 1.0) above_one = false;
        if (i > 0 && !(q > *rows[i - 1].infidelity_ratio)) increasing = false;
    }

    DeviceParams p;
    const auto opt = sweeps::optimize_detuning(p, 0.5, Scheme::cqi, opts);
    const bool improved = opt.f_star >= opt.f_at_zero;

    r.passed = increasing && above_one && improved;
    r.measured = "ratios [" + ratios + "]; increasing: " + yes_no(increasing) + "; all > 1: " + yes_no(above_one) +
                 "; delta* = " + num(opt.delta_star) + ", F(delta*) - F(0) = " + num(opt.f_star - opt.f_at_zero);
    return r;
}

CriterionResult scaling()
{
    CriterionResult r{8, "multi-node scaling of zeta", false, "",
                      "zeta(N) = zeta(2)^(N-1) to 1e-9 and log zeta linear (residual < 1e-9) for N = 2..10; zeta rises with n_th at N = 4, 6"};
    const std::vector<int> nodes = sweeps::default_node_grid();
    const std::vector<double> nth = {0.1, 0.3, 0.5};
    sweeps::EvalOptions opts;
    opts.workers = 1;
    const auto rows = sweeps::scaling_sweep(nodes, nth, DeviceParams{}, true, opts);

    // rows are N-major: rows[n * nth.size() + k]
    auto at = [&](std::size_t n, std::size_t k) -> const sweeps::SweepRow& { return rows[n * nth.size() + k]; };
    double worst_power = 0.0;
    double worst_fit = 0.0;
    for (std::size_t k = 0; k < nth.size(); ++k) {
        std::vector<double> x;
        std::vector<double> y;
        for (std::size_t n = 0; n < nodes.size(); ++n) {
            const auto& row = at(n, k);
            if (!row.error.empty() || !row.zeta || !row.log_zeta) {
                r.measured = "row N " + num(row.value) + " n_th " + num(*row.n_th) + " failed: " + row.error;
                return r;
            }
            const double expect = std::pow(*at(0, k).zeta, nodes[n] - 1);
            worst_power = std::max(worst_power, std::abs(*row.zeta - expect) / expect);
            x.push_back(nodes[n]);
            y.push_back(*row.log_zeta);
        }
        // least-squares line through (N, log zeta)
        const double n = static_cast<double>(x.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            sx += x[i];
            sy += y[i];
            sxx += x[i] * x[i];
            sxy += x[i] * y[i];
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        const double icpt = (sy - slope * sx) / n;
        for (std::size_t i = 0; i < x.size(); ++i) worst_fit = std::max(worst_fit, std::abs(y[i] - slope * x[i] - icpt));
    }

    bool rising = true;
    std::string values;
    for (int target : {4, 6}) {
        const std::size_t n = static_cast<std::size_t>(std::find(nodes.begin(), nodes.end(), target) - nodes.begin());
        values += (target == 4 ? "" : "; ") + std::string("N ") + std::to_string(target) + ": ";
        for (std::size_t k = 0; k < nth.size(); ++k) {
            values += (k ? ", " : "") + num(*at(n, k).zeta);
            if (k > 0 && !(*at(n, k).zeta > *at(n, k - 1).zeta)) rising = false;
        }
    }

    r.passed = worst_power < 1e-9 && worst_fit < 1e-9 && rising;
    r.measured = "power-law error = " + num(worst_power) + "; fit residual = " + num(worst_fit) +
                 "; zeta at n_th 0.1, 0.3, 0.5 -> " + values;
    return r;
}

CriterionResult efficiency_bound()
{
    CriterionResult r{9, "converter efficiency bound", false, "",
                      "eta <= kappa_a_ex kappa_b_ex / (kappa_a kappa_b); maximum at G^2 = kappa_a kappa_b / 4 within one grid step; bound 0.9241"};
    DeviceParams p;
    const double bound = model::conversion_efficiency_bound(p);
    const double step = 0.01;
    double worst_excess = -std::numeric_limits<double>::infinity();
    double best_g = 0.0;
    double best_eta = -1.0;
    for (int k = 0; k <= 3000; ++k) {
        p.g_conv = 0.01 + step * k;
        const double eta = model::conversion_efficiency(p);
        worst_excess = std::max(worst_excess, eta - bound);
        if (eta > best_eta) {
            best_eta = eta;
            best_g = p.g_conv;
        }
    }
    const double g_opt = std::sqrt(p.kappa_a() * p.kappa_b_bus()) / 2.0;
    p.g_conv = g_opt;
    const double at_opt = model::conversion_efficiency(p);

    r.passed = worst_excess <= 1e-12 && std::abs(best_g - g_opt) <= step && std::abs(at_opt - bound) < 1e-12 &&
               std::abs(bound - 0.9241) < 5e-5;
    r.measured = "bound = " + num(bound) + "; max(eta - bound) = " + num(worst_excess) + "; grid argmax G = " +
                 num(best_g) + " vs " + num(g_opt) + "; |eta(G*) - bound| = " + num(std::abs(at_opt - bound));
    return r;
}

using Check = std::function<CriterionResult()>;

struct Entry {
    Check check;
    double budget;
    bool closed_form;
};

const std::vector<Entry>& entries()
{
    static const std::vector<Entry> list = {
        {resonance_identity, 1.0, true},   {dense_oracle, 1.0, true},        {master_equation_agreement, 60.0, false},
        {detailed_balance, 5.0, false},    {protocol_identity, 1.0, true},   {kappa_b_trends, 30.0, true},
        {noise_trends, 600.0, false},      {scaling, 300.0, false},          {efficiency_bound, 1.0, true},
    };
    return list;
}

std::vector<CriterionResult> run_checks(bool quick, std::ostream* progress)
{
    std::vector<CriterionResult> out;
    for (const Entry& e : entries()) {
        if (quick && !e.closed_form) continue;
        const auto start = Clock::now();
        CriterionResult res;
        try {
            res = e.check();
        } catch (const std::exception& ex) {
            res.measured = std::string("unexpected error: ") + ex.what();
        }
        res.seconds = std::chrono::duration<double>(Clock::now() - start).count();
        res.budget_seconds = e.budget;
        if (res.seconds >= e.budget) {
            res.passed = false;
            res.measured += "; runtime over budget";
        }
        if (progress)
            *progress << "criterion " << res.id << ": " << format_number(res.seconds, 3) << " s (budget "
                      << format_number(e.budget, 3) << " s)\n";
        out.push_back(std::move(res));
    }
    return out;
}

CriterionResult determinism(const std::vector<CriterionResult>& first, Clock::time_point suite_start,
                            std::ostream* progress)
{
    CriterionResult r{10, "determinism and runtime", false, "",
                      "report byte-identical across runs; (4,6)+qubit solve < 1 s; suite < 15 min"};
    const auto start = Clock::now();
    const std::vector<CriterionResult> second = run_checks(false, nullptr);
    const bool identical = render(first) == render(second);

    DeviceParams p;
    p.n_th = 0.5;
    lindblad::FockConfig fock;
    fock.dim_a = 4;
    fock.dim_b = 6;
    double solve_seconds = 0.0;
    std::string solve_note;
    try {
        const auto t0 = Clock::now();
        const auto L = lindblad::build_liouvillian(p, {1e-3, 0.0}, true, fock);
        lindblad::steady_state(L);
        solve_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    } catch (const Error& e) {
        solve_note = std::string("; solver error: ") + e.what();
        solve_seconds = std::numeric_limits<double>::infinity();
    }
    const bool fast_solve = solve_seconds < 1.0;
    const double total = std::chrono::duration<double>(Clock::now() - suite_start).count();
    const bool in_budget = total < 900.0;

    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    r.budget_seconds = 900.0;
    if (progress)
        *progress << "criterion 10: solve at (4,6)+qubit " << format_number(solve_seconds, 3) << " s; suite "
                  << format_number(total, 4) << " s\n";
    r.passed = identical && fast_solve && in_budget;
    r.measured = "identical: " + yes_no(identical) + "; solve under 1 s: " + yes_no(fast_solve) +
                 "; suite under 15 min: " + yes_no(in_budget) + solve_note;
    return r;
}

}  // namespace

std::vector<CriterionResult> run(const Options& opts)
{
    const auto start = Clock::now();
    std::vector<CriterionResult> results = run_checks(opts.quick, opts.progress);
    if (!opts.quick) results.push_back(determinism(results, start, opts.progress));
    return results;
}

std::string render(const std::vector<CriterionResult>& results)
{
    std::ostringstream out;
    int passed = 0;
    for (const auto& r : results) {
        out << (r.passed ? "PASS " : "FAIL ") << r.id << " " << r.title << " | measured: " << r.measured
            << " | expected: " << r.expected << "\n";
        passed += r.passed ? 1 : 0;
    }
    out << "SUMMARY " << passed << "/" << results.size() << " criteria passed\n";
    return out.str();
}

bool all_passed(const std::vector<CriterionResult>& results)
{
    for (const auto& r : results)
        if (!r.passed) return false;
    return !results.empty();
}

}  // namespace cqi::acceptance
