#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cqi/cli.hpp"
#include "cqi/error.hpp"
#include "cqi/protocol.hpp"
#include "oracles.hpp"

using namespace cqi;
using namespace cqi::cli;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run_cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "cqi");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string write_temp(const std::string& name, const std::string& text)
{
    const auto path = std::filesystem::temp_directory_path() / ("cqi_test_" + name);
    std::ofstream(path) << text;
    return path.string();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

RunConfig parse(const std::string& text)
{
    std::istringstream in(text);
    return parse_config(in);
}

}  // namespace

TEST_CASE("grid syntax")
{
    CHECK(parse_grid("0.1, 0.2,0.5") == std::vector<double>{0.1, 0.2, 0.5});
    CHECK(parse_grid("") == std::vector<double>{});
    const auto lin = parse_grid("lin:-1:1:5");
    CHECK(lin == std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0});
    const auto log = parse_grid("log:0.01:1:3");
    REQUIRE(log.size() == 3);
    CHECK(log[1] == doctest::Approx(0.1));
    CHECK_THROWS_AS(parse_grid("1,abc"), ConfigError);
    CHECK_THROWS_AS(parse_grid("log:0:1:3"), ConfigError);
    CHECK_THROWS_AS(parse_grid("lin:0:1"), ConfigError);
    CHECK_THROWS_AS(parse_grid("lin:0:1:0"), ConfigError);
}

TEST_CASE("config defaults and overrides")
{
    const RunConfig d = parse("");
    CHECK(d.device == DeviceParams{});
    CHECK_FALSE(d.fock.has_value());
    CHECK(d.deltas == std::vector<double>{0.0});
    CHECK(d.format == Format::csv);

    const RunConfig c = parse(
        "# comment\n[device]\nn_th = 0.3\nmu = 7\ncqi_b_external_is_loss = false\n"
        "[fock]\ndim_b = 6\n[protocol]\ndetection_window = 2.5\n[probe]\ndelta = lin:0:2:3\n"
        "[sweep]\nvariable = n_th\nscheme = cqi\nworkers = 2\n[output]\nformat = jsonl\n");
    CHECK(c.device.n_th == 0.3);
    CHECK(c.device.mu == 7.0);
    CHECK_FALSE(c.device.cqi_b_external_is_loss);
    REQUIRE(c.fock.has_value());
    CHECK(c.fock->dim_a == 3);
    CHECK(c.fock->dim_b == 6);
    CHECK(*c.protocol.detection_window == 2.5);
    CHECK(c.deltas == std::vector<double>{0.0, 1.0, 2.0});
    CHECK(c.variable == sweeps::Variable::n_th);
    CHECK(c.scheme == sweeps::SchemeSelect::cqi);
    CHECK(c.workers == 2);
    CHECK(c.format == Format::jsonl);
}

TEST_CASE("config errors")
{
    CHECK_THROWS_AS(parse("[device]\nkappa = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[detector]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[device]\nmu = ten\n"), ConfigError);
    CHECK_THROWS_AS(parse("[device]\nmu = 1e999\n"), ConfigError);
    CHECK_THROWS_AS(parse("[device]\ngamma = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse("[device]\nkappa_b_o = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[sweep]\nvariable = gamma\n"), ConfigError);
    CHECK_THROWS_AS(parse("[sweep]\ngrid = \n"), ConfigError);
    CHECK_THROWS_AS(parse("[protocol]\ntransmission = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse("[device\nmu = 1\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/cqi.ini"), ConfigError);
}

TEST_CASE("response rows reproduce the amplitudes")
{
    const Run r = run_cli({"response", "--delta", "0,2.5"});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == std::vector<std::string>{"scheme", "delta", "re_f_s", "im_f_s", "re_f_g", "im_f_g", "abs_f_s",
                                              "abs_f_g"});
    CHECK(rows[1][0] == "cqi");
    CHECK(rows[3][0] == "cas");
    const DeviceParams p;
    const Complex fs = oracle::cqi(p, 2.5, false);
    const Complex fg = oracle::cqi(p, 2.5, true);
    CHECK(std::stod(rows[2][2]) == doctest::Approx(fs.real()).epsilon(1e-10));
    CHECK(std::stod(rows[2][3]) == doctest::Approx(fs.imag()).epsilon(1e-10));
    CHECK(std::stod(rows[2][4]) == doctest::Approx(fg.real()).epsilon(1e-10));
    CHECK(std::stod(rows[2][5]) == doctest::Approx(fg.imag()).epsilon(1e-10));
}

TEST_CASE("cascade without conversion transmits nothing")
{
    const std::string cfg = write_temp("g0.ini", "[device]\ng_conv = 0\n");
    const Run r = run_cli({"response", "--config", cfg, "--scheme", "cas"});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(std::stod(rows[1][6]) == 0.0);
    CHECK(std::stod(rows[1][7]) == 0.0);
}

TEST_CASE("link rows")
{
    const Run ideal = run_cli({"link", "--ideal"});
    REQUIRE(ideal.code == 0);
    const auto irows = parse_csv(ideal.out);
    REQUIRE(irows.size() == 2);
    CHECK(irows[1][0] == "ideal");
    CHECK(irows[1][3] == "1");
    CHECK(irows[1][4] == "1");

    const Run r = run_cli({"link", "--scheme", "cqi"});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 2);
    const DeviceParams p;
    protocol::NodeResponse node;
    node.f_s = oracle::cqi(p, 0.0, false);
    node.f_g = oracle::cqi(p, 0.0, true);
    const double fs = std::abs(node.f_s - node.f_g);
    const double P = 0.5 * (std::norm(node.f_s) + std::norm(node.f_g));
    CHECK(std::stod(rows[1][2]) == 0.0);
    CHECK(std::stod(rows[1][3]) == doctest::Approx(fs * fs / (4.0 * P)).epsilon(1e-10));
    CHECK(std::stod(rows[1][4]) == doctest::Approx(P).epsilon(1e-10));
}

TEST_CASE("network rows")
{
    const Run r = run_cli({"network", "--nodes", "4", "--ideal"});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[1][0] == "exact");
    CHECK(rows[2][0] == "composed");
    CHECK(rows[1][1] == "4");
    CHECK(std::stod(rows[1][2]) == doctest::Approx(1.0));
    CHECK(std::stod(rows[1][8]) == doctest::Approx(1.0));

    const Run odd = run_cli({"network", "--nodes", "3"});
    CHECK(odd.code == 2);
    CHECK(odd.out.empty());
    CHECK(odd.err.find("even") != std::string::npos);
}

TEST_CASE("usage and configuration failures exit with 2")
{
    CHECK(run_cli({}).code == 2);
    CHECK(run_cli({"bogus"}).code == 2);
    CHECK(run_cli({"response", "--delta", ""}).code == 2);
    CHECK(run_cli({"response", "--format", "xml"}).code == 2);
    CHECK(run_cli({"sweep", "--variable", "n_th", "--grid", "0.3,0.1,0.2"}).code == 2);
    const std::string bad = write_temp("bad.ini", "[device]\nmu = ten\n");
    const Run r = run_cli({"selftest", "--quick", "--config", bad});
    CHECK(r.code == 2);
    CHECK(r.out.empty());
    CHECK(r.err.find("device.mu") != std::string::npos);
    CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("solver failures exit with 3")
{
    const std::string cfg = write_temp("cap.ini", "[device]\nn_th = 5\n[fock]\ndim_a = 2\ndim_b = 2\nmax_dim = 40\n");
    const Run r = run_cli({"link", "--config", cfg, "--scheme", "cqi"});
    CHECK(r.code == 3);
    CHECK_FALSE(r.err.empty());
}

TEST_CASE("output is byte-identical across runs")
{
    const std::vector<std::string> args{"sweep", "--variable", "n_th", "--grid", "0,0.25,0.5", "--optimize-detuning"};
    const Run a = run_cli(args);
    const Run b = run_cli(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const auto rows = parse_csv(a.out);
    REQUIRE(rows.size() == 5);
    CHECK(rows[4][0] == "summary");
    CHECK(rows[4][1] == "3");
}

TEST_CASE("JSON lines use null for missing values")
{
    const Run r = run_cli({"sweep", "--format", "jsonl", "--scheme", "cqi", "--variable", "kappa_b_o", "--grid", "0.1"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string line;
    std::vector<nlohmann::json> rows;
    while (std::getline(in, line)) rows.push_back(nlohmann::json::parse(line));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0]["variable"] == "kappa_b_o");
    CHECK(rows[0]["f_cas"].is_null());
    CHECK(rows[0]["f_cqi"].is_number());
    CHECK(rows[1]["variable"] == "summary");
}

TEST_CASE("output file option")
{
    const auto path = std::filesystem::temp_directory_path() / "cqi_test_out.csv";
    std::filesystem::remove(path);
    const Run r = run_cli({"link", "--ideal", "--out", path.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header.rfind("scheme,delta,nu,fidelity", 0) == 0);
}
