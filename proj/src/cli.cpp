#include "cqi/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <functional>
#include <sstream>
#include <variant>

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "cqi/acceptance.hpp"
#include "cqi/error.hpp"
#include "cqi/format.hpp"
#include "cqi/protocol.hpp"

namespace cqi::cli {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& raw, const std::string& what)
{
    const std::string s = trim(raw);
    double v = 0.0;
    const char* first = s.data();
    if (!s.empty() && s[0] == '+') ++first;
    const auto res = std::from_chars(first, s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ConfigError(what + ": '" + s + "' is not a number");
    if (!std::isfinite(v)) throw ConfigError(what + ": value must be finite");
    return v;
}

long long parse_int(const std::string& raw, const std::string& what)
{
    const std::string s = trim(raw);
    long long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ConfigError(what + ": '" + s + "' is not an integer");
    return v;
}

bool parse_bool(const std::string& raw, const std::string& what)
{
    const std::string s = trim(raw);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError(what + ": '" + s + "' is not a boolean");
}

Format parse_format(const std::string& s)
{
    if (s == "csv") return Format::csv;
    if (s == "jsonl") return Format::jsonl;
    throw ConfigError("unknown output format '" + s + "' (expected csv or jsonl)");
}

template <typename F>
auto config_guard(F&& f)
{
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

// ---------------------------------------------------------------------------
// Output tables

using Cell = std::variant<std::monostate, double, long long, std::string>;

Cell opt(const std::optional<double>& v)
{
    return v ? Cell{*v} : Cell{};
}

class TableWriter {
public:
    TableWriter(std::ostream& out, Format format, std::vector<std::string> columns)
        : out_(out), format_(format), columns_(std::move(columns))
    {
        if (format_ == Format::csv) {
            for (std::size_t i = 0; i < columns_.size(); ++i) out_ << (i ? "," : "") << columns_[i];
            out_ << "\n";
        }
    }

    void row(const std::vector<Cell>& cells)
    {
        if (cells.size() != columns_.size()) throw std::logic_error("row width does not match the header");
        if (format_ == Format::csv) {
            for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << csv(cells[i]);
        } else {
            out_ << "{";
            for (std::size_t i = 0; i < cells.size(); ++i)
                out_ << (i ? "," : "") << nlohmann::json(columns_[i]).dump() << ":" << json(cells[i]);
            out_ << "}";
        }
        out_ << "\n";
        out_.flush();
    }

private:
    static std::string csv(const Cell& c)
    {
        if (std::holds_alternative<double>(c)) return format_number(std::get<double>(c));
        if (std::holds_alternative<long long>(c)) return std::to_string(std::get<long long>(c));
        if (std::holds_alternative<std::string>(c)) {
            const std::string& s = std::get<std::string>(c);
            if (s.find_first_of(",\"\n") == std::string::npos) return s;
            std::string q = "\"";
            for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
            return q + "\"";
        }
        return "";
    }

    static std::string json(const Cell& c)
    {
        if (std::holds_alternative<double>(c)) {
            const double v = std::get<double>(c);
            return std::isfinite(v) ? format_number(v) : "null";
        }
        if (std::holds_alternative<long long>(c)) return std::to_string(std::get<long long>(c));
        if (std::holds_alternative<std::string>(c)) return nlohmann::json(std::get<std::string>(c)).dump();
        return "null";
    }

    std::ostream& out_;
    Format format_;
    std::vector<std::string> columns_;
};

// ---------------------------------------------------------------------------
// Subcommands

struct Flags {
    std::string config;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<std::string> scheme;
    std::optional<double> nth;
    bool optimize = false;
    bool ideal = false;
    bool quick = false;
    std::optional<int> nodes;
    std::optional<std::string> delta;
    std::optional<std::string> variable;
    std::optional<std::string> grid;
};

std::vector<Scheme> schemes_of(sweeps::SchemeSelect sel)
{
    switch (sel) {
    case sweeps::SchemeSelect::cqi: return {Scheme::cqi};
    case sweeps::SchemeSelect::cas: return {Scheme::cas};
    case sweeps::SchemeSelect::both: break;
    }
    return {Scheme::cqi, Scheme::cas};
}

sweeps::EvalOptions eval_options(const RunConfig& cfg)
{
    sweeps::EvalOptions opts;
    opts.protocol = cfg.protocol;
    opts.fock = cfg.fock;
    opts.workers = cfg.workers;
    return opts;
}

struct NodeChoice {
    protocol::NodeResponse node;
    double delta = 0.0;
};

// Node response of one scheme at the configured probe detuning, or at the
// optimum when requested (CQI only), or the ideal node.
NodeChoice choose_node(const RunConfig& cfg, Scheme s, double delta, bool ideal)
{
    if (ideal) return {protocol::NodeResponse{}, delta};
    const sweeps::EvalOptions opts = eval_options(cfg);
    const sweeps::NoiseModel noise = sweeps::noise_model(cfg.device, s, opts);
    if (cfg.optimize_detuning && s == Scheme::cqi)
        delta = sweeps::optimize_detuning(cfg.device, s, noise, cfg.protocol).delta_star;
    return {sweeps::node_response(cfg.device, s, delta, noise), delta};
}

void cmd_response(const RunConfig& cfg, std::ostream& out)
{
    if (cfg.deltas.empty()) throw ConfigError("probe detuning grid is empty");
    TableWriter table(out, cfg.format,
                      {"scheme", "delta", "re_f_s", "im_f_s", "re_f_g", "im_f_g", "abs_f_s", "abs_f_g"});
    for (Scheme s : schemes_of(cfg.scheme)) {
        for (double d : cfg.deltas) {
            const Complex fs = model::response(s, cfg.device, d, false);
            const Complex fg = model::response(s, cfg.device, d, true);
            table.row({std::string(to_string(s)), d, fs.real(), fs.imag(), fg.real(), fg.imag(), std::abs(fs),
                       std::abs(fg)});
        }
    }
}

void cmd_link(const RunConfig& cfg, bool ideal, std::ostream& out)
{
    if (cfg.deltas.empty()) throw ConfigError("probe detuning grid is empty");
    TableWriter table(out, cfg.format,
                      {"scheme", "delta", "nu", "fidelity", "success_prob", "figure_of_merit", "p_plus", "p_minus",
                       "fidelity_plus", "fidelity_minus"});
    const std::vector<double> deltas =
        cfg.optimize_detuning && !ideal ? std::vector<double>{cfg.deltas.front()} : cfg.deltas;
    for (Scheme s : schemes_of(cfg.scheme)) {
        for (double d : deltas) {
            const NodeChoice c = choose_node(cfg, s, d, ideal);
            const protocol::LinkResult link = protocol::link_entangle(c.node, c.node, cfg.protocol.transmission);
            table.row({std::string(ideal ? "ideal" : to_string(s)), c.delta, c.node.nu, link.fidelity,
                       link.success_prob, link.figure_of_merit(), link.per_outcome[0].probability,
                       link.per_outcome[1].probability, link.per_outcome[0].fidelity, link.per_outcome[1].fidelity});
            if (ideal) return;
        }
    }
}

void cmd_network(const RunConfig& cfg, bool ideal, std::ostream& out)
{
    const int n = cfg.nodes;
    if (n < 2 || n % 2 != 0) throw ConfigError("node count must be even and >= 2 (got " + std::to_string(n) + ")");
    if (cfg.deltas.empty()) throw ConfigError("probe detuning grid is empty");

    struct Side {
        std::optional<protocol::NetworkResult> exact;
        protocol::NetworkResult composed;
    };
    std::map<Scheme, Side> sides;
    for (Scheme s : schemes_of(cfg.scheme)) {
        const NodeChoice c = choose_node(cfg, s, cfg.deltas.front(), ideal);
        Side side;
        const protocol::LinkResult link = protocol::link_entangle(c.node, c.node, cfg.protocol.transmission);
        side.composed = protocol::compose_network(link, n);
        if (n <= 16) {
            const std::vector<protocol::LinkSpec> links(static_cast<std::size_t>(n - 1),
                                                        protocol::LinkSpec{c.node, c.node, cfg.protocol.transmission});
            side.exact = protocol::ghz_chain(links, n);
        }
        sides[s] = side;
    }

    TableWriter table(out, cfg.format,
                      {"method", "n_nodes", "f_cqi", "p_cqi", "fom_cqi", "f_cas", "p_cas", "fom_cas", "zeta"});
    auto emit = [&](const std::string& method, auto pick) {
        std::vector<Cell> row{method, static_cast<long long>(n)};
        std::optional<double> fom[2];
        int k = 0;
        for (Scheme s : {Scheme::cqi, Scheme::cas}) {
            const auto it = sides.find(s);
            const protocol::NetworkResult* r = it == sides.end() ? nullptr : pick(it->second);
            if (r) {
                row.insert(row.end(), {r->ghz_fidelity, r->total_success, r->figure_of_merit});
                fom[k] = r->figure_of_merit;
            } else {
                row.insert(row.end(), {Cell{}, Cell{}, Cell{}});
            }
            ++k;
        }
        row.push_back(fom[0] && fom[1] && *fom[1] > 0.0 ? Cell{*fom[0] / *fom[1]} : Cell{});
        table.row(row);
    };
    if (n <= 16) emit("exact", [](const Side& s) { return s.exact ? &*s.exact : nullptr; });
    emit("composed", [](const Side& s) { return &s.composed; });
}

std::vector<double> default_grid(const RunConfig& cfg)
{
    switch (cfg.variable) {
    case sweeps::Variable::kappa_b_o: return sweeps::default_kappa_b_grid();
    case sweeps::Variable::n_th: return sweeps::default_nth_grid();
    case sweeps::Variable::nodes: {
        std::vector<double> g;
        for (int n : sweeps::default_node_grid()) g.push_back(n);
        return g;
    }
    case sweeps::Variable::delta: {
        std::vector<double> g;
        const double G = cfg.device.g_conv;
        for (int k = 0; k <= 60; ++k) g.push_back(-3.0 * G + 6.0 * G * k / 60.0);
        return g;
    }
    }
    return {};
}

void cmd_sweep(const RunConfig& cfg, std::ostream& out)
{
    const std::vector<double> grid = cfg.grid ? *cfg.grid : default_grid(cfg);
    TableWriter table(out, cfg.format,
                      {"variable", "value", "n_th", "f_cqi", "p_cqi", "f_cas", "p_cas", "infidelity_ratio",
                       "efficiency_ratio", "zeta", "log_zeta", "zeta_exact", "delta_star", "error", "warnings"});
    const std::string name = sweeps::to_string(cfg.variable);
    long long failed = 0;
    long long warned = 0;
    long long count = 0;
    auto sink = [&](const sweeps::SweepRow& r) {
        std::string warnings;
        for (std::size_t i = 0; i < r.warnings.size(); ++i) warnings += (i ? "; " : "") + r.warnings[i];
        table.row({name, r.value, opt(r.n_th), opt(r.f_cqi), opt(r.p_cqi), opt(r.f_cas), opt(r.p_cas),
                   opt(r.infidelity_ratio), opt(r.efficiency_ratio), opt(r.zeta), opt(r.log_zeta), opt(r.zeta_exact),
                   opt(r.delta_star), r.error.empty() ? Cell{} : Cell{r.error},
                   warnings.empty() ? Cell{} : Cell{warnings}});
        ++count;
        failed += r.error.empty() ? 0 : 1;
        warned += r.warnings.empty() ? 0 : 1;
    };

    const sweeps::EvalOptions opts = eval_options(cfg);
    if (cfg.variable == sweeps::Variable::nodes && cfg.n_th_list) {
        std::vector<int> nodes;
        for (double v : grid) {
            if (v != std::floor(v) || v < 2.0 || static_cast<long long>(v) % 2 != 0)
                throw ConfigError("node counts must be even integers >= 2");
            nodes.push_back(static_cast<int>(v));
        }
        sweeps::scaling_sweep(nodes, *cfg.n_th_list, cfg.device, cfg.optimize_detuning, opts, sink);
    } else {
        sweeps::SweepSpec spec;
        spec.variable = cfg.variable;
        spec.grid = grid;
        spec.base = cfg.device;
        spec.scheme = cfg.scheme;
        spec.optimize_detuning = cfg.optimize_detuning;
        spec.delta = cfg.deltas.empty() ? 0.0 : cfg.deltas.front();
        spec.n_nodes = cfg.variable == sweeps::Variable::nodes ? 2 : cfg.nodes;
        config_guard([&] {
            spec.validate();
            return 0;
        });
        sweeps::run_sweep(spec, opts, sink);
    }
    table.row({std::string("summary"), static_cast<double>(count), Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{},
               Cell{}, Cell{}, Cell{}, Cell{}, Cell{},
               failed ? Cell{std::to_string(failed) + " rows failed"} : Cell{},
               warned ? Cell{std::to_string(warned) + " rows with warnings"} : Cell{}});
}

int cmd_selftest(bool quick, std::ostream& out, std::ostream& err)
{
    acceptance::Options opts;
    opts.quick = quick;
    opts.progress = &err;
    const auto results = acceptance::run(opts);
    out << acceptance::render(results);
    out.flush();
    return acceptance::all_passed(results) ? 0 : 1;
}

RunConfig resolve(const Flags& f)
{
    RunConfig cfg = f.config.empty() ? RunConfig{} : load_config(f.config);
    if (f.out) cfg.out_path = *f.out;
    if (f.format) cfg.format = parse_format(*f.format);
    if (f.scheme) cfg.scheme = config_guard([&] { return sweeps::parse_scheme_select(*f.scheme); });
    if (f.nth) cfg.device.n_th = *f.nth;
    if (f.optimize) cfg.optimize_detuning = true;
    if (f.nodes) cfg.nodes = *f.nodes;
    if (f.delta) cfg.deltas = parse_grid(*f.delta);
    if (f.variable) cfg.variable = config_guard([&] { return sweeps::parse_variable(*f.variable); });
    if (f.grid) cfg.grid = parse_grid(*f.grid);
    cfg.validate();
    return cfg;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text)
{
    const std::string s = trim(text);
    if (s.empty()) return {};
    const bool lin = s.rfind("lin:", 0) == 0;
    const bool log = s.rfind("log:", 0) == 0;
    if (lin || log) {
        std::vector<std::string> parts;
        std::stringstream ss(s.substr(4));
        std::string item;
        while (std::getline(ss, item, ':')) parts.push_back(item);
        if (parts.size() != 3) throw ConfigError("range grid must be lin|log:start:stop:count");
        const double a = parse_double(parts[0], "grid start");
        const double b = parse_double(parts[1], "grid stop");
        const long long n = parse_int(parts[2], "grid count");
        if (n < 1) throw ConfigError("grid count must be >= 1");
        if (log && (a <= 0.0 || b <= 0.0)) throw ConfigError("log grid bounds must be > 0");
        std::vector<double> g(static_cast<std::size_t>(n));
        for (long long k = 0; k < n; ++k) {
            const double t = n == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(n - 1);
            g[k] = lin ? a + (b - a) * t : std::pow(10.0, std::log10(a) + (std::log10(b) - std::log10(a)) * t);
        }
        return g;
    }
    std::vector<double> g;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) g.push_back(parse_double(item, "grid value"));
    return g;
}

void RunConfig::validate() const
{
    config_guard([&] {
        device.validate();
        if (fock) fock->validate();
        protocol.validate();
        if (grid && grid->empty()) throw ConfigError("sweep grid is empty");
        if (n_th_list) {
            if (n_th_list->empty()) throw ConfigError("n_th_list is empty");
            for (double t : *n_th_list)
                if (t < 0.0) throw ConfigError("n_th_list values must be >= 0");
        }
        return 0;
    });
}

RunConfig parse_config(std::istream& in)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
    }

    RunConfig cfg;
    lindblad::FockConfig fock;
    bool fock_seen = false;
    using Setter = std::function<void(const std::string&)>;
    const std::map<std::string, std::map<std::string, Setter>> schema = {
        {"device",
         {{"kappa_a_o", [&](const std::string& v) { cfg.device.kappa_a_o = parse_double(v, "device.kappa_a_o"); }},
          {"kappa_a_ex", [&](const std::string& v) { cfg.device.kappa_a_ex = parse_double(v, "device.kappa_a_ex"); }},
          {"kappa_b_o", [&](const std::string& v) { cfg.device.kappa_b_o = parse_double(v, "device.kappa_b_o"); }},
          {"kappa_b_ex", [&](const std::string& v) { cfg.device.kappa_b_ex = parse_double(v, "device.kappa_b_ex"); }},
          {"g_conv", [&](const std::string& v) { cfg.device.g_conv = parse_double(v, "device.g_conv"); }},
          {"mu", [&](const std::string& v) { cfg.device.mu = parse_double(v, "device.mu"); }},
          {"gamma", [&](const std::string& v) { cfg.device.gamma = parse_double(v, "device.gamma"); }},
          {"n_th", [&](const std::string& v) { cfg.device.n_th = parse_double(v, "device.n_th"); }},
          {"delta_b_offset",
           [&](const std::string& v) { cfg.device.delta_b_offset = parse_double(v, "device.delta_b_offset"); }},
          {"delta_q_offset",
           [&](const std::string& v) { cfg.device.delta_q_offset = parse_double(v, "device.delta_q_offset"); }},
          {"cqi_b_external_is_loss", [&](const std::string& v) {
               cfg.device.cqi_b_external_is_loss = parse_bool(v, "device.cqi_b_external_is_loss");
           }}}},
        {"fock",
         {{"dim_a", [&](const std::string& v) { fock.dim_a = static_cast<int>(parse_int(v, "fock.dim_a")); fock_seen = true; }},
          {"dim_b", [&](const std::string& v) { fock.dim_b = static_cast<int>(parse_int(v, "fock.dim_b")); fock_seen = true; }},
          {"max_dim",
           [&](const std::string& v) { fock.max_dim = static_cast<int>(parse_int(v, "fock.max_dim")); fock_seen = true; }}}},
        {"protocol",
         {{"detection_window",
           [&](const std::string& v) { cfg.protocol.detection_window = parse_double(v, "protocol.detection_window"); }},
          {"transmission",
           [&](const std::string& v) { cfg.protocol.transmission = parse_double(v, "protocol.transmission"); }}}},
        {"probe", {{"delta", [&](const std::string& v) { cfg.deltas = parse_grid(v); }}}},
        {"sweep",
         {{"variable",
           [&](const std::string& v) { cfg.variable = config_guard([&] { return sweeps::parse_variable(trim(v)); }); }},
          {"grid", [&](const std::string& v) { cfg.grid = parse_grid(v); }},
          {"scheme",
           [&](const std::string& v) {
               cfg.scheme = config_guard([&] { return sweeps::parse_scheme_select(trim(v)); });
           }},
          {"optimize_detuning",
           [&](const std::string& v) { cfg.optimize_detuning = parse_bool(v, "sweep.optimize_detuning"); }},
          {"nodes", [&](const std::string& v) { cfg.nodes = static_cast<int>(parse_int(v, "sweep.nodes")); }},
          {"n_th_list", [&](const std::string& v) { cfg.n_th_list = parse_grid(v); }},
          {"workers", [&](const std::string& v) {
               const long long w = parse_int(v, "sweep.workers");
               if (w < 0) throw ConfigError("sweep.workers must be >= 0");
               cfg.workers = static_cast<unsigned>(w);
           }}}},
        {"output",
         {{"path", [&](const std::string& v) { cfg.out_path = trim(v); }},
          {"format", [&](const std::string& v) { cfg.format = parse_format(trim(v)); }}}},
    };

    for (const auto& [section, body] : tree) {
        const auto sec = schema.find(section);
        if (sec == schema.end()) {
            if (body.empty()) throw ConfigError("key '" + section + "' outside any section");
            throw ConfigError("unknown config section [" + section + "]");
        }
        for (const auto& [key, value] : body) {
            const auto setter = sec->second.find(key);
            if (setter == sec->second.end()) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
            setter->second(value.data());
        }
    }
    if (fock_seen) cfg.fock = fock;
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Cooperative vs cascaded quantum interface simulator"};
    app.require_subcommand(1);
    Flags f;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", f.config, "sectioned key=value config file");
        sub->add_option("--out", f.out, "output file (default stdout)");
        sub->add_option("--format", f.format, "csv or jsonl");
        sub->add_option("--scheme", f.scheme, "cqi, cas or both");
        sub->add_option("--nth", f.nth, "thermal occupation of mode b's bath");
        sub->add_option("--delta", f.delta, "probe detuning grid: a,b,c or lin|log:start:stop:count");
    };

    CLI::App* response = app.add_subcommand("response", "output amplitudes f_s and f_g");
    add_common(response);
    CLI::App* link = app.add_subcommand("link", "two-node link fidelity and success probability");
    add_common(link);
    link->add_flag("--optimize-detuning", f.optimize, "optimize the CQI probe detuning");
    link->add_flag("--ideal", f.ideal, "use ideal nodes f_s = 1, f_g = -1");
    CLI::App* network = app.add_subcommand("network", "N-node GHZ chain");
    add_common(network);
    network->add_option("--nodes", f.nodes, "even node count");
    network->add_flag("--optimize-detuning", f.optimize, "optimize the CQI probe detuning");
    network->add_flag("--ideal", f.ideal, "use ideal nodes f_s = 1, f_g = -1");
    CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep over kappa_b_o, n_th, delta or N");
    add_common(sweep);
    sweep->add_flag("--optimize-detuning", f.optimize, "optimize the CQI probe detuning per point");
    sweep->add_option("--nodes", f.nodes, "chain length for the zeta column");
    sweep->add_option("--variable", f.variable, "kappa_b_o, n_th, delta or N");
    sweep->add_option("--grid", f.grid, "grid: a,b,c or lin|log:start:stop:count");
    CLI::App* selftest = app.add_subcommand("selftest", "run the acceptance suite");
    selftest->add_option("--config", f.config, "config file (validated only)");
    selftest->add_flag("--quick", f.quick, "closed-form criteria only");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        const RunConfig cfg = resolve(f);
        if (selftest->parsed()) return cmd_selftest(f.quick, out, err);

        std::ofstream file;
        if (!cfg.out_path.empty()) {
            file.open(cfg.out_path, std::ios::binary);
            if (!file) throw ConfigError("cannot open output file '" + cfg.out_path + "'");
        }
        std::ostream& sink = cfg.out_path.empty() ? out : file;
        if (response->parsed()) cmd_response(cfg, sink);
        if (link->parsed()) cmd_link(cfg, f.ideal, sink);
        if (network->parsed()) cmd_network(cfg, f.ideal, sink);
        if (sweep->parsed()) cmd_sweep(cfg, sink);
        return 0;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidArgument& e) {
        err << "invalid argument: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "numerical error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace cqi::cli
