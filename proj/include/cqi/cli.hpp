#pragma once

// Command-line front end.
//
// Config files are sectioned key = value text ('#' or ';' comments):
//
//   [device]    kappa_a_o kappa_a_ex kappa_b_o kappa_b_ex g_conv mu gamma n_th
//               delta_b_offset delta_q_offset cqi_b_external_is_loss
//   [fock]      dim_a dim_b max_dim
//   [protocol]  detection_window transmission
//   [probe]     delta            (grid, see parse_grid)
//   [sweep]     variable grid scheme optimize_detuning nodes n_th_list workers
//   [output]    path format
//
// Unknown sections or keys are rejected. Exit codes: 0 success, 1 selftest
// failure, 2 configuration or usage error, 3 numerical or solver error.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cqi/core_model.hpp"
#include "cqi/lindblad.hpp"
#include "cqi/sweeps.hpp"

namespace cqi::cli {

enum class Format { csv, jsonl };

struct RunConfig {
    DeviceParams device;
    std::optional<lindblad::FockConfig> fock;
    sweeps::ProtocolSettings protocol;
    std::vector<double> deltas{0.0};
    sweeps::Variable variable = sweeps::Variable::kappa_b_o;
    std::optional<std::vector<double>> grid;  ///< per-variable default when unset
    sweeps::SchemeSelect scheme = sweeps::SchemeSelect::both;
    bool optimize_detuning = false;
    int nodes = 4;
    std::optional<std::vector<double>> n_th_list;  ///< node sweeps only
    unsigned workers = 0;
    std::string out_path;
    Format format = Format::csv;

    /// Re-runs every module validation; throws ConfigError.
    void validate() const;
};

/// "a,b,c", "lin:start:stop:count" or "log:start:stop:count". Empty text gives an empty grid.
std::vector<double> parse_grid(const std::string& text);

RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cqi::cli
