#pragma once

// Command-line front end: solve, sweep, poles, snb and limits workflows
// writing JSON, CSV and SVG reports.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "helm/mp.hpp"
#include "helm/netmodel.hpp"
#include "helm/stability.hpp"

namespace helm::cli {

/// Process exit codes.
enum ExitCode : int { kFeasible = 0, kUsage = 1, kInfeasible = 2, kIndeterminate = 3 };

struct RunConfig {
    std::string command;
    /// Exactly one of these names the network.
    std::optional<std::string> network_path;
    std::optional<std::string> fixture;
    /// "bus<N>.p=x", "bus<N>.qload=x", "bus<N>.q=x" or "bus<N>.v=x".
    std::vector<std::string> sets;
    /// "bus<N>=x" reactive limits of PV buses.
    std::vector<std::string> q_max;
    std::vector<std::string> q_min;
    std::vector<int> schedule{20, 30, 40, 50, 60};
    /// 0 selects the precision policy for the top order.
    unsigned digits = 0;
    double delta_tol = 5e-5;
    int max_half_order = 160;
    std::string out_dir = ".";
    /// Subset of json, csv, svg; empty selects the command's default.
    std::vector<std::string> formats;

    // sweep and snb
    std::optional<std::string> param;
    double from = 0.0;
    double to = 0.0;
    double step = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    double tol_param = 1e-3;

    // poles
    int order = 50;
    std::vector<int> buses;
    /// JSON file {"coefficients": [...]} holding a series to analyse in
    /// place of a network.
    std::optional<std::string> series_path;
};

/// Parses argv into a config. Throws std::invalid_argument on usage errors;
/// returns nullopt after printing help.
std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out);

/// Applies one "bus<N>.field=value" override.
void apply_set(Network& net, std::string_view assignment);
/// Applies one "bus<N>=value" reactive limit.
void apply_limit(Network& net, std::string_view assignment, bool upper);

/// Fixture or file, with every override applied and revalidated.
Network resolve_network(const RunConfig& cfg);

stability::SolveOptions solve_options(const RunConfig& cfg);

/// Series coefficients from {"coefficients": [c0, c1, ...]}; each entry is
/// a number, a decimal string, or a [re, im] pair of either, parsed at the
/// working precision.
std::vector<mp::Complex> parse_series(std::string_view text);

/// Runs a parsed config; reports go to cfg.out_dir, a short summary to
/// `out` and diagnostics to `err`.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// parse_args + run, mapping usage errors to exit code 1.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace helm::cli
