// SPDX-License-Identifier: Apache-2.0
//
// Front-end operations behind the command-line tool: bound-vs-SAA tables,
// the end-to-end optimizer report, parameter sweeps and the self-test.

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsma/allocation_optimizer.hpp"
#include "rsma/channel_model.hpp"
#include "rsma/monte_carlo.hpp"
#include "rsma/schemes.hpp"

namespace rsma {

inline constexpr int kDefaultTrials = 10000;

/// Formats a double with the shortest round-trip representation, "nan" or
/// "inf"; independent of the C locale.
std::string format_number(double value);

// ---- bound ----------------------------------------------------------------

struct BoundOptions {
    std::vector<double> t_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    int trials = kDefaultTrials;
    std::uint64_t seed = 1;
    std::optional<double> zeta_override = 1000.0;  ///< per-user zeta; nullopt keeps the path loss
};

struct BoundRow {
    double t = 0.0;
    double closed_form_sum = 0.0;
    double saa_sum = 0.0;
    double gap = 0.0;  ///< (saa - closed_form) / saa
};

/// Closed-form sum-rate bound and its SAA counterpart at uniform mu, one row
/// per grid value. Throws DomainError on an empty grid.
std::vector<BoundRow> run_bound(const SystemConfig& config, const BoundOptions& options);
void write_bound_csv(std::ostream& out, const std::vector<BoundRow>& rows);

// ---- optimize ---------------------------------------------------------------

struct OptimizeOutcome {
    OptimizationReport report;
    RateEstimate validated;  ///< SAA rates of the final allocation
    nlohmann::json document;
    std::string summary;
    int exit_code = 0;  ///< 2 when the QoS targets are not met
};

OptimizeOutcome run_optimize(const SystemConfig& config, int trials, std::uint64_t seed);

// ---- sweep ------------------------------------------------------------------

enum class SweepAxis { tx_power_dBm, velocity_kmh, blocklength, global_t };

std::string to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(const std::string& name);

struct SweepSpec {
    SweepAxis axis = SweepAxis::tx_power_dBm;
    std::vector<double> values;
    std::vector<SchemeSpec> schemes;
    int trials = kDefaultTrials;
    std::uint64_t seed = 1;
    std::string output_path;
    std::string svg_path;  ///< empty: no SVG
    SystemConfig scenario;

    void validate() const;
};

/// Parses a sweep document. "scenario" is either an inline SystemConfig object
/// or a path resolved against `base_dir`; schemes are names or objects.
SweepSpec parse_sweep_spec(const std::string& text, const std::string& source, const std::string& base_dir = ".");
SweepSpec load_sweep_spec(const std::string& path);

/// Applies one axis value to a scenario. global_t leaves it unchanged.
SystemConfig apply_axis(const SystemConfig& base, SweepAxis axis, double value);

struct SweepRow {
    std::string scheme;
    double p_dBm = 0.0;
    double velocity = 0.0;  ///< mean over users
    double epsilon = 0.0;   ///< mean over users
    double t = 0.0;
    double sum_rate = 0.0;
    double min_rate = 0.0;
    double r_common = 0.0;
    std::vector<double> r_private;
    int trials = 0;
    std::uint64_t seed = 0;
    double axis_value = 0.0;
    double sum_std_error = 0.0;
    std::string status;
};

/// Rows in (value, scheme) order. Points run concurrently; a point that fails
/// yields a row with NaN rates and status "error: ...".
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

/// One sweep point at a fixed global t (global_t axis).
SchemeResult evaluate_at_fixed_t(const SchemeSpec& spec, const SystemConfig& config, const DerivedLink& link,
                                 double t, int trials, std::uint64_t seed);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, int users);
std::string sweep_csv_header(int users);

/// Static line chart of sum_rate against the axis value, one polyline per scheme.
std::string render_sweep_svg(const std::vector<SweepRow>& rows, SweepAxis axis);

// ---- selftest ---------------------------------------------------------------

struct SelftestHooks {
    std::function<double(double, double)> exp_integral;  ///< (v, x) -> E_v(x); empty uses the library
    int saa_trials = 1000;
};

struct SelftestCheck {
    std::string name;
    bool passed = false;
    double expected = 0.0;
    double actual = 0.0;
    double tolerance = 0.0;
};

std::vector<SelftestCheck> run_selftest(const SelftestHooks& hooks = {});

/// Prints one line per check and returns 0 when all pass, 1 otherwise.
int report_selftest(const std::vector<SelftestCheck>& checks, std::ostream& out);

}  // namespace rsma
