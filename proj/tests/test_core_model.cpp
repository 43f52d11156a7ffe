#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "cqi/core_model.hpp"
#include "cqi/error.hpp"
#include "oracles.hpp"

using namespace cqi;

namespace {

DeviceParams lossless_matched_converter(double G)
{
    DeviceParams p;
    p.kappa_a_o = 0.0;
    p.kappa_b_o = 0.0;
    p.kappa_a_ex = 2.0 * G;
    p.kappa_b_ex = 2.0 * G;
    p.g_conv = G;
    p.mu = 0.0;
    return p;
}

}  // namespace

TEST_CASE("cooperativities at default parameters")
{
    const Cooperativities c = model::cooperativities(DeviceParams{});
    CHECK(c.c_ab == doctest::Approx(2.6403).epsilon(1e-4));
    CHECK(c.c_bq == doctest::Approx(39.604).epsilon(1e-4));
    CHECK(c.c_ab == doctest::Approx(400.0 / (15.0 * 10.1)).epsilon(1e-14));

    DeviceParams p;
    p.g_conv = 0.0;
    CHECK(model::cooperativities(p).c_ab == 0.0);
    p = DeviceParams{};
    p.mu = 0.0;
    CHECK(model::cooperativities(p).c_bq == 0.0);
}

TEST_CASE("cascade cooperativities use the bus-coupled b total")
{
    DeviceParams p;
    p.cqi_b_external_is_loss = false;
    const auto cqi = model::cooperativities(p, Scheme::cqi);
    const auto cas = model::cooperativities(p, Scheme::cas);
    CHECK(cqi.c_bq == doctest::Approx(4.0 * 100.0 / 0.1));
    CHECK(cas.c_bq == doctest::Approx(4.0 * 100.0 / 10.1));
}

TEST_CASE("invalid parameters are rejected")
{
    DeviceParams p;
    p.kappa_a_o = -1.0;
    CHECK_THROWS_AS(model::cooperativities(p), InvalidArgument);
    p = DeviceParams{};
    p.gamma = 0.0;
    CHECK_THROWS_AS(model::cqi_response(p, 0.0, true), InvalidArgument);
    p = DeviceParams{};
    p.mu = std::nan("");
    CHECK_THROWS_AS(model::cqi_response(p, 0.0, true), InvalidArgument);
    CHECK_THROWS_AS(model::cqi_response(DeviceParams{}, INFINITY, true), InvalidArgument);
    p = DeviceParams{};
    p.kappa_b_o = 0.0;
    p.kappa_b_ex = 0.0;
    CHECK_THROWS_AS(model::cooperativities(p), InvalidArgument);
}

TEST_CASE("resonant CQI amplitudes match the coupled-mode solve")
{
    const DeviceParams p;
    const Complex fg = model::cqi_response(p, 0.0, true);
    const Complex fs = model::cqi_response(p, 0.0, false);
    CHECK(std::abs(fg - oracle::cqi(p, 0.0, true)) < 1e-12);
    CHECK(std::abs(fs - oracle::cqi(p, 0.0, false)) < 1e-12);
    CHECK(fg.real() == doctest::Approx(-0.7527).epsilon(1e-4));
    CHECK(fs.real() == doctest::Approx(0.4872).epsilon(1e-4));
    CHECK(std::abs(fg.imag()) < 1e-15);
}

TEST_CASE("empty overcoupled resonator reflects -1")
{
    DeviceParams p;
    p.g_conv = 0.0;
    p.mu = 0.0;
    p.kappa_a_o = 0.0;
    CHECK(std::abs(model::cqi_response(p, 0.0, true) - Complex(-1.0)) < 1e-15);
}

TEST_CASE("resonance identity holds for random passive parameters")
{
    std::mt19937_64 rng(11);
    for (int i = 0; i < 100; ++i) {
        const DeviceParams p = oracle::random_passive(rng);
        for (bool coupled : {false, true}) {
            const double f = model::cqi_response_on_resonance(p, coupled);
            CHECK(std::abs(model::cqi_response(p, 0.0, coupled) - f) < 1e-12);
        }
    }
}

TEST_CASE("detuned responses match the dense coupled-mode solves")
{
    std::mt19937_64 rng(12);
    for (int i = 0; i < 200; ++i) {
        DeviceParams p = oracle::random_passive(rng);
        p.delta_b_offset = oracle::uniform(rng, -4.0, 4.0);
        p.delta_q_offset = oracle::uniform(rng, -4.0, 4.0);
        const double d = oracle::uniform(rng, -40.0, 40.0);
        for (bool coupled : {false, true}) {
            CHECK(std::abs(model::cqi_response(p, d, coupled) - oracle::cqi(p, d, coupled)) < 1e-12);
            CHECK(std::abs(model::qubit_cavity_response(p, d, coupled) - oracle::cavity(p, d, coupled)) < 1e-12);
        }
        CHECK(std::abs(model::converter_transmission(p, d) - oracle::converter(p, d)) < 1e-12);
    }
}

TEST_CASE("passivity over random parameters and detunings")
{
    std::mt19937_64 rng(13);
    for (int i = 0; i < 300; ++i) {
        const DeviceParams p = oracle::random_passive(rng);
        const double d = oracle::uniform(rng, -50.0, 50.0);
        for (bool coupled : {false, true}) {
            CHECK(std::abs(model::cqi_response(p, d, coupled)) <= 1.0 + 1e-9);
            CHECK(std::abs(model::qubit_cavity_response(p, d, coupled)) <= 1.0 + 1e-9);
            CHECK(std::abs(model::cas_response(p, d, coupled)) <= 1.0 + 1e-9);
        }
        CHECK(std::abs(model::converter_transmission(p, d)) <= 1.0 + 1e-9);
    }
}

TEST_CASE("lossless matched converter is reciprocal and transmits fully")
{
    std::mt19937_64 rng(14);
    for (int i = 0; i < 50; ++i) {
        const DeviceParams p = lossless_matched_converter(oracle::uniform(rng, 0.5, 20.0));
        const double d = oracle::uniform(rng, -30.0, 30.0);
        const double t2 = std::norm(model::converter_transmission(p, d));
        CHECK(t2 + std::norm(oracle::converter_reflection(p, d)) == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK(std::norm(model::converter_transmission(lossless_matched_converter(5.0), 0.0)) ==
          doctest::Approx(1.0).epsilon(1e-14));
    DeviceParams p;
    p.g_conv = 0.0;
    CHECK(model::converter_transmission(p, 0.0) == Complex(0.0));
}

TEST_CASE("converter efficiency bound and its optimum")
{
    DeviceParams p;
    const double bound = model::conversion_efficiency_bound(p);
    CHECK(bound == doctest::Approx(0.9241).epsilon(5e-5));
    // scalar grid search for the maximum over G
    double best_g = 0.0, best = -1.0;
    for (int k = 1; k <= 40000; ++k) {
        p.g_conv = 0.001 * k;
        const double eta = model::conversion_efficiency(p);
        CHECK(eta <= bound + 1e-12);
        if (eta > best) {
            best = eta;
            best_g = p.g_conv;
        }
    }
    CHECK(best_g == doctest::Approx(std::sqrt(15.0 * 10.1) / 2.0).epsilon(1e-3 / 6.0));
    CHECK(best == doctest::Approx(bound).epsilon(1e-9));

    p.kappa_b_ex = 0.0;
    CHECK(model::conversion_efficiency(p) == 0.0);
    CHECK(model::conversion_efficiency(lossless_matched_converter(3.0)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("efficiency never exceeds the bound for random parameters")
{
    std::mt19937_64 rng(15);
    for (int i = 0; i < 500; ++i) {
        DeviceParams p = oracle::random_passive(rng);
        CHECK(model::conversion_efficiency(p) <= model::conversion_efficiency_bound(p) + 1e-12);
        p.g_conv = std::sqrt(p.kappa_a() * p.kappa_b_bus()) / 2.0;
        CHECK(model::conversion_efficiency(p) == doctest::Approx(model::conversion_efficiency_bound(p)).epsilon(1e-12));
    }
}

TEST_CASE("qubit cavity response")
{
    DeviceParams p;
    p.mu = 0.0;
    p.kappa_b_o = 0.0;
    CHECK(std::abs(model::qubit_cavity_response(p, 0.0, true) - Complex(-1.0)) < 1e-15);

    // the coupled value at default parameters is 1 - 20 / (10.1 + 400)
    const Complex r = model::qubit_cavity_response(DeviceParams{}, 0.0, true);
    CHECK(std::abs(r - oracle::cavity(DeviceParams{}, 0.0, true)) < 1e-12);
    CHECK(r.real() == doctest::Approx(1.0 - 20.0 / 410.1).epsilon(1e-14));
    CHECK(r.real() == doctest::Approx(0.951231).epsilon(1e-6));

    p = DeviceParams{};
    p.mu = 1e6;
    CHECK(std::abs(model::qubit_cavity_response(p, 0.0, true) - Complex(1.0)) < 1e-9);
}

TEST_CASE("cascade composition")
{
    DeviceParams p = lossless_matched_converter(4.0);
    CHECK(std::abs(model::cas_response(p, 0.0, true)) == doctest::Approx(1.0).epsilon(1e-14));

    p = DeviceParams{};
    p.g_conv = 0.0;
    CHECK(model::cas_response(p, 0.0, true) == Complex(0.0));
    CHECK(model::cas_response(p, 0.0, false) == Complex(0.0));

    const DeviceParams d;
    for (bool coupled : {false, true}) {
        const Complex t = oracle::converter(d, 0.0);
        CHECK(std::abs(model::cas_response(d, 0.0, coupled) - t * oracle::cavity(d, 0.0, coupled) * t) < 1e-12);
    }
    // the cascade is weaker than the integrated device only when the qubit is coupled
    CHECK(std::abs(model::cas_response(d, 0.0, true)) < std::abs(model::cqi_response(d, 0.0, true)));
    CHECK(std::abs(model::cas_response(d, 0.0, false)) > std::abs(model::cqi_response(d, 0.0, false)));
    CHECK(model::cas_response(d, 0.0, true).real() == doctest::Approx(-0.70055).epsilon(1e-5));
    CHECK(model::cas_response(d, 0.0, false).real() == doctest::Approx(0.72189).epsilon(1e-5));
}

TEST_CASE("strong qubit coupling recovers the bare cavity")
{
    DeviceParams p;
    p.mu = 1e6;
    CHECK(std::abs(model::cqi_response(p, 0.0, true) - Complex(1.0 - 2.0 * 14.0 / 15.0)) < 1e-6);
    p.kappa_a_o = 0.0;
    CHECK(std::abs(model::cqi_response(p, 0.0, true) - Complex(-1.0)) < 1e-6);
}

TEST_CASE("noise transfer")
{
    DeviceParams p;
    p.kappa_b_o = 0.0;
    for (double d : {-20.0, -10.0, 0.0, 3.0, 10.0}) CHECK(model::noise_transfer_cqi(p, d) == 0.0);
    p = DeviceParams{};
    p.g_conv = 0.0;
    CHECK(model::noise_transfer_cqi(p, 0.0) == 0.0);

    // grid scan: leakage peaks near the supermodes and is smallest between them
    const DeviceParams d;
    double lo = INFINITY, lo_at = -1.0;
    for (int k = 0; k <= 1000; ++k) {
        const double delta = 10.0 * k / 1000.0;
        const double v = model::noise_transfer_cqi(d, delta);
        if (v < lo) {
            lo = v;
            lo_at = delta;
        }
    }
    CHECK(lo_at == 0.0);
    CHECK(model::noise_transfer_cqi(d, 0.0) < model::noise_transfer_cqi(d, 10.0));
    CHECK(model::noise_transfer_cqi(d, 0.0) < model::noise_transfer_cqi(d, -10.0));
    const double direct = std::norm(std::sqrt(14.0 * 0.1) * 10.0 / (7.5 * 5.05 + 100.0));
    CHECK(model::noise_transfer_cqi(d, 0.0) == doctest::Approx(direct).epsilon(1e-14));
}

TEST_CASE("supermode splitting")
{
    DeviceParams p;
    auto [lo, hi] = model::supermode_splitting(p);
    CHECK(lo == -10.0);
    CHECK(hi == 10.0);
    p.g_conv = 0.0;
    std::tie(lo, hi) = model::supermode_splitting(p);
    CHECK(lo == 0.0);
    CHECK(hi == 0.0);

    std::mt19937_64 rng(16);
    for (int i = 0; i < 50; ++i) {
        p.g_conv = oracle::uniform(rng, 0.0, 20.0);
        p.delta_b_offset = oracle::uniform(rng, -10.0, 10.0);
        Eigen::Matrix2d m;
        m << 0.0, p.g_conv, p.g_conv, p.delta_b_offset;
        const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(m).eigenvalues();
        std::tie(lo, hi) = model::supermode_splitting(p);
        CHECK(lo == doctest::Approx(ev(0)).epsilon(1e-12));
        CHECK(hi == doctest::Approx(ev(1)).epsilon(1e-12));
    }
}

TEST_CASE("impedance matching gives opposite amplitudes")
{
    for (bool flag : {true, false}) {
        DeviceParams p;
        p.cqi_b_external_is_loss = flag;
        p.kappa_b_o = 0.01;
        const DeviceParams m = model::impedance_matched(p);
        const Cooperativities c = model::cooperativities(m);
        CHECK(c.c_ab * c.c_ab == doctest::Approx(1.0 + c.c_bq).epsilon(1e-12));
        const Complex fs = model::cqi_response(m, 0.0, false);
        const Complex fg = model::cqi_response(m, 0.0, true);
        CHECK(std::abs(fs + fg) < 1e-12);
    }
    DeviceParams p;
    p.kappa_b_o = 50.0;
    CHECK_THROWS_AS(model::impedance_matched(p), InvalidArgument);
}
