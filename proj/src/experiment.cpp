// SPDX-License-Identifier: Apache-2.0

#include "rsma/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "rsma/closed_form_bounds.hpp"
#include "rsma/config_io.hpp"
#include "rsma/errors.hpp"
#include "rsma/special_functions.hpp"

namespace rsma {

using nlohmann::json;

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

namespace {

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::vector<double> uniform_mu(int k) { return std::vector<double>(static_cast<std::size_t>(k), 1.0 / k); }

}  // namespace

// ---- bound ----------------------------------------------------------------

std::vector<BoundRow> run_bound(const SystemConfig& config, const BoundOptions& options) {
    if (options.t_grid.empty()) throw DomainError("bound: the t grid is empty");
    for (double t : options.t_grid)
        if (!(t >= 0.0 && t <= 1.0)) throw DomainError("bound: grid value " + format_number(t) + " outside [0,1]");
    if (options.trials < 1) throw DomainError("bound: trials must be >= 1");
    DerivedLink link = derive_link(config);
    if (options.zeta_override) {
        if (!(*options.zeta_override > 0.0)) throw DomainError("bound: zeta override must be > 0");
        std::fill(link.zeta.begin(), link.zeta.end(), *options.zeta_override);
    }
    const BoundEvaluator bounds(config, link);
    const GainSet gains = build_gain_set(config, link, options.trials, options.seed);
    const FblPenalties pen = FblPenalties::from_config(config);
    const std::vector<double> mu = uniform_mu(config.num_users);

    std::vector<BoundRow> rows;
    for (double t : options.t_grid) {
        BoundRow r;
        r.t = t;
        r.closed_form_sum = bounds.sum(t, mu);
        PowerAllocation a;
        a.t = t;
        a.mu = mu;
        r.saa_sum = saa_rates_from_gains(gains, a, link, pen).sum_rate;
        r.gap = r.saa_sum > 0.0 ? (r.saa_sum - r.closed_form_sum) / r.saa_sum
                                : std::numeric_limits<double>::quiet_NaN();
        rows.push_back(r);
    }
    return rows;
}

void write_bound_csv(std::ostream& out, const std::vector<BoundRow>& rows) {
    out << "t,closed_form_sum,saa_sum,gap\n";
    for (const auto& r : rows)
        out << format_number(r.t) << ',' << format_number(r.closed_form_sum) << ',' << format_number(r.saa_sum) << ','
            << format_number(r.gap) << '\n';
}

// ---- optimize ---------------------------------------------------------------

OptimizeOutcome run_optimize(const SystemConfig& config, int trials, std::uint64_t seed) {
    if (trials < 1) throw DomainError("optimize: trials must be >= 1");
    const DerivedLink link = derive_link(config);
    OptimizerSettings settings;
    settings.saa_seed = seed;
    OptimizeOutcome out;
    out.report = single_step_update(config, link, settings);
    // Validation uses a seed disjoint from the one that chose the split.
    out.validated = saa_rates(out.report.allocation, config, link, trials, seed + 1);
    out.exit_code = out.report.qos_feasible ? 0 : 2;

    json doc;
    doc["config"] = to_json(config);
    doc["link"] = {{"epsilon", link.epsilon}, {"zeta", link.zeta}};
    doc["trials"] = trials;
    doc["seed"] = seed;
    doc["report"] = to_json(out.report);
    doc["validated"] = to_json(out.validated);
    out.document = std::move(doc);

    std::ostringstream s;
    const auto& a = out.report.allocation;
    s << "branch: " << out.report.branch << " (global t* = " << format_number(out.report.t_star_global) << ", "
      << out.report.iterations_global << " iterations; private split: " << out.report.iterations_stage2 << " iterations)\n";
    s << "t = " << format_number(a.t) << "\nmu =";
    for (double m : a.mu) s << ' ' << format_number(m);
    s << "\nc =";
    for (double c : a.c) s << ' ' << format_number(c);
    s << "\npredicted: common " << format_number(out.report.predicted_common) << ", private";
    for (double r : out.report.predicted_private) s << ' ' << format_number(r);
    s << "\nSAA (M=" << trials << "): sum " << format_number(out.validated.sum_rate) << " +/- "
      << format_number(out.validated.se_sum) << ", min " << format_number(out.validated.min_rate) << '\n';
    if (out.report.qos_feasible) {
        s << "QoS: all users meet R_min = " << format_number(config.qos_min_rate) << '\n';
    } else {
        s << "QoS infeasible for users:";
        for (int u : out.report.violated_users) s << ' ' << u;
        s << '\n';
    }
    out.summary = s.str();
    return out;
}

// ---- sweep ------------------------------------------------------------------

std::string to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::tx_power_dBm: return "tx_power_dBm";
        case SweepAxis::velocity_kmh: return "velocity_kmh";
        case SweepAxis::blocklength: return "blocklength";
        case SweepAxis::global_t: return "global_t";
    }
    return "unknown";
}

SweepAxis parse_sweep_axis(const std::string& name) {
    for (SweepAxis a : {SweepAxis::tx_power_dBm, SweepAxis::velocity_kmh, SweepAxis::blocklength, SweepAxis::global_t})
        if (to_string(a) == name) return a;
    throw ConfigError("unknown sweep axis '" + name + "'");
}

void SweepSpec::validate() const {
    if (values.empty()) throw ConfigError("sweep: 'values' must be nonempty");
    if (schemes.empty()) throw ConfigError("sweep: 'schemes' must be nonempty");
    if (trials < 1) throw ConfigError("sweep: 'trials' must be >= 1");
    for (double v : values) {
        if (!std::isfinite(v)) throw ConfigError("sweep: nonfinite axis value");
        if (axis == SweepAxis::blocklength && (v < 1.0 || v != std::floor(v)))
            throw ConfigError("sweep: blocklength values must be positive integers");
        if (axis == SweepAxis::velocity_kmh && v < 0.0) throw ConfigError("sweep: velocities must be >= 0");
        if (axis == SweepAxis::global_t && !(v >= 0.0 && v <= 1.0))
            throw ConfigError("sweep: global_t values must lie in [0,1]");
    }
    for (const auto& s : schemes) s.validate();
    scenario.validate();
}

namespace {

SchemeSpec scheme_from_json(const json& j, const std::string& where) {
    SchemeSpec s;
    if (j.is_string()) {
        s.kind = parse_scheme_kind(j.get<std::string>());
        return s;
    }
    if (!j.is_object()) throw ConfigError(where + ": expected a scheme name or object");
    for (const auto& item : j.items()) {
        const std::string& key = item.key();
        const json& v = item.value();
        auto need_number = [&] {
            if (!v.is_number()) throw ConfigError(where + ": field '" + key + "': expected a number");
        };
        auto need_integer = [&] {
            if (!v.is_number_integer()) throw ConfigError(where + ": field '" + key + "': expected an integer");
        };
        if (key == "kind") {
            if (!v.is_string()) throw ConfigError(where + ": field 'kind': expected a string");
            s.kind = parse_scheme_kind(v.get<std::string>());
        } else if (key == "ftpa_decay") {
            need_number();
            s.ftpa_decay = v.get<double>();
        } else if (key == "t_granularity") {
            need_number();
            s.t_granularity = v.get<double>();
        } else if (key == "mu_granularity") {
            need_number();
            s.mu_granularity = v.get<double>();
        } else if (key == "coarse_trials") {
            need_integer();
            s.coarse_trials = v.get<int>();
        } else if (key == "evaluation_budget") {
            need_integer();
            s.evaluation_budget = v.get<long long>();
        } else if (key == "private_grid_restart") {
            if (!v.is_boolean()) throw ConfigError(where + ": field '" + key + "': expected a boolean");
            s.optimizer.private_grid_restart = v.get<bool>();
        } else {
            throw ConfigError(where + ": unknown field '" + key + "'");
        }
    }
    if (!j.contains("kind")) throw ConfigError(where + ": missing field 'kind'");
    return s;
}

}  // namespace

SweepSpec parse_sweep_spec(const std::string& text, const std::string& source, const std::string& base_dir) {
    const json j = parse_json_document(text, source);
    if (!j.is_object()) throw ConfigError(source + ": top-level value must be a JSON object");
    SweepSpec spec;
    bool have_axis = false;
    bool have_values = false;
    bool have_schemes = false;
    for (const auto& item : j.items()) {
        const std::string& key = item.key();
        const json& v = item.value();
        const std::string where = source + ": field '" + key + "'";
        if (key == "axis") {
            if (!v.is_string()) throw ConfigError(where + ": expected a string");
            spec.axis = parse_sweep_axis(v.get<std::string>());
            have_axis = true;
        } else if (key == "values") {
            if (!v.is_array()) throw ConfigError(where + ": expected an array");
            for (const auto& x : v) {
                if (!x.is_number()) throw ConfigError(where + ": expected numbers");
                spec.values.push_back(x.get<double>());
            }
            have_values = true;
        } else if (key == "schemes") {
            if (!v.is_array()) throw ConfigError(where + ": expected an array");
            for (std::size_t i = 0; i < v.size(); ++i)
                spec.schemes.push_back(scheme_from_json(v[i], source + ": schemes[" + std::to_string(i) + "]"));
            have_schemes = true;
        } else if (key == "trials") {
            if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
            spec.trials = v.get<int>();
        } else if (key == "seed") {
            if (!v.is_number_unsigned()) throw ConfigError(where + ": expected a nonnegative integer");
            spec.seed = v.get<std::uint64_t>();
        } else if (key == "output_path") {
            if (!v.is_string()) throw ConfigError(where + ": expected a string");
            spec.output_path = v.get<std::string>();
        } else if (key == "svg_path") {
            if (!v.is_string()) throw ConfigError(where + ": expected a string");
            spec.svg_path = v.get<std::string>();
        } else if (key == "scenario") {
            if (v.is_object()) {
                spec.scenario = system_config_from_json(v, source + ": scenario");
            } else if (v.is_string()) {
                std::filesystem::path p(v.get<std::string>());
                if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
                spec.scenario = load_system_config(p.string());
            } else {
                throw ConfigError(where + ": expected an object or a path");
            }
        } else {
            throw ConfigError(source + ": unknown field '" + key + "'");
        }
    }
    if (!have_axis) throw ConfigError(source + ": missing field 'axis'");
    if (!have_values) throw ConfigError(source + ": missing field 'values'");
    if (!have_schemes) throw ConfigError(source + ": missing field 'schemes'");
    if (!j.contains("scenario")) spec.scenario = SystemConfig::defaults();
    try {
        spec.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(source + ": " + e.what());
    }
    return spec;
}

SweepSpec load_sweep_spec(const std::string& path) {
    const std::filesystem::path p(path);
    const std::string dir = p.has_parent_path() ? p.parent_path().string() : ".";
    return parse_sweep_spec(read_text_file(path), path, dir);
}

SystemConfig apply_axis(const SystemConfig& base, SweepAxis axis, double value) {
    SystemConfig c = base;
    switch (axis) {
        case SweepAxis::tx_power_dBm: c.tx_power_dBm = value; break;
        case SweepAxis::velocity_kmh: std::fill(c.velocities_kmh.begin(), c.velocities_kmh.end(), value); break;
        case SweepAxis::blocklength: {
            const int l = static_cast<int>(value);
            c.blocklength_common = l;
            std::fill(c.blocklength_private.begin(), c.blocklength_private.end(), l);
            break;
        }
        case SweepAxis::global_t: break;
    }
    c.validate();
    return c;
}

SchemeResult evaluate_at_fixed_t(const SchemeSpec& spec, const SystemConfig& config, const DerivedLink& link,
                                 double t, int trials, std::uint64_t seed) {
    const bool rsma = spec.kind == SchemeKind::rsma_proposed || spec.kind == SchemeKind::rsma_proposed_equal ||
                      spec.kind == SchemeKind::rsma_exhaustive_equal;
    if (!rsma) return evaluate_scheme(spec, config, link, trials, seed);
    SchemeResult res;
    res.kind = spec.kind;
    PowerAllocation a;
    a.t = t;
    a.mu = uniform_mu(config.num_users);
    if (spec.kind == SchemeKind::rsma_proposed && t > 0.0) {
        const BoundEvaluator bounds(config, link);
        const StageResult p2 = solve_private_power(t, bounds, spec.optimizer);
        a.mu.assign(p2.x.data(), p2.x.data() + p2.x.size());
    }
    const GainSet gains = build_gain_set(config, link, trials, seed);
    const FblPenalties pen = FblPenalties::from_config(config);
    const RateEstimate first = saa_rates_from_gains(gains, a, link, pen);
    a.c = waterfill_common_rate(first.r_common, first.r_private);
    res.estimate = saa_rates_from_gains(gains, a, link, pen);
    res.allocation = a;
    return res;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    spec.validate();
    const std::size_t ns = spec.schemes.size();
    const std::size_t tasks = spec.values.size() * ns;
    const int k = spec.scenario.num_users;
    std::vector<SweepRow> rows(tasks);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(tasks); ++i) {
        const double value = spec.values[static_cast<std::size_t>(i) / ns];
        const SchemeSpec& scheme = spec.schemes[static_cast<std::size_t>(i) % ns];
        SweepRow& row = rows[static_cast<std::size_t>(i)];
        row.scheme = to_string(scheme.kind);
        row.axis_value = value;
        row.trials = spec.trials;
        row.seed = spec.seed;
        try {
            const SystemConfig cfg = apply_axis(spec.scenario, spec.axis, value);
            const DerivedLink link = derive_link(cfg);
            row.p_dBm = cfg.tx_power_dBm;
            row.velocity = mean_of(cfg.velocities_kmh);
            row.epsilon = mean_of(link.epsilon);
            const SchemeResult r = spec.axis == SweepAxis::global_t
                                       ? evaluate_at_fixed_t(scheme, cfg, link, value, spec.trials, spec.seed)
                                       : evaluate_scheme(scheme, cfg, link, spec.trials, spec.seed);
            row.t = r.allocation.t;
            row.sum_rate = r.estimate.sum_rate;
            row.min_rate = r.estimate.min_rate;
            row.r_common = r.estimate.r_common;
            row.r_private = r.estimate.r_private;
            row.sum_std_error = r.estimate.se_sum;
            row.status = r.status;
        } catch (const BudgetError& e) {
            row.status = std::string("error: budget: ") + e.what();
        } catch (const std::exception& e) {
            row.status = std::string("error: ") + e.what();
        }
        if (row.status.rfind("error", 0) == 0) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            row.t = row.sum_rate = row.min_rate = row.r_common = row.sum_std_error = nan;
            row.r_private.assign(static_cast<std::size_t>(k), nan);
        }
    }
    return rows;
}

std::string sweep_csv_header(int users) {
    std::string h = "scheme,P_dBm,velocity,epsilon,t,sum_rate,min_rate,r_common";
    for (int i = 1; i <= users; ++i) h += ",r_private_" + std::to_string(i);
    h += ",M,seed,axis_value,sum_std_error,status";
    return h;
}

namespace {

// Status strings are free text; keep the CSV one field per column.
std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else if (c == '\n' || c == '\r') out += ' ';
        else out += c;
    }
    return out + "\"";
}

}  // namespace

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, int users) {
    out << sweep_csv_header(users) << '\n';
    for (const auto& r : rows) {
        out << r.scheme << ',' << format_number(r.p_dBm) << ',' << format_number(r.velocity) << ','
            << format_number(r.epsilon) << ',' << format_number(r.t) << ',' << format_number(r.sum_rate) << ','
            << format_number(r.min_rate) << ',' << format_number(r.r_common);
        for (int i = 0; i < users; ++i)
            out << ',' << format_number(i < static_cast<int>(r.r_private.size()) ? r.r_private[i] : 0.0);
        out << ',' << r.trials << ',' << r.seed << ',' << format_number(r.axis_value) << ','
            << format_number(r.sum_std_error) << ',' << csv_field(r.status) << '\n';
    }
}

std::string render_sweep_svg(const std::vector<SweepRow>& rows, SweepAxis axis) {
    constexpr double width = 720.0;
    constexpr double height = 440.0;
    constexpr double left = 70.0;
    constexpr double right = 170.0;
    constexpr double top = 20.0;
    constexpr double bottom = 50.0;
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

    std::vector<std::string> order;
    std::map<std::string, std::vector<std::pair<double, double>>> series;
    double xmin = std::numeric_limits<double>::infinity();
    double xmax = -xmin;
    double ymax = 0.0;
    for (const auto& r : rows) {
        if (!series.count(r.scheme)) order.push_back(r.scheme);
        auto& s = series[r.scheme];
        if (!std::isfinite(r.sum_rate)) continue;
        s.emplace_back(r.axis_value, r.sum_rate);
        xmin = std::min(xmin, r.axis_value);
        xmax = std::max(xmax, r.axis_value);
        ymax = std::max(ymax, r.sum_rate);
    }
    if (!std::isfinite(xmin)) {
        xmin = 0.0;
        xmax = 1.0;
    }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax <= 0.0) ymax = 1.0;
    ymax *= 1.05;
    const double pw = width - left - right;
    const double ph = height - top - bottom;
    auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double y) { return top + ph - y / ymax * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double yv = ymax * i / 4.0;
        const double xv = xmin + (xmax - xmin) * i / 4.0;
        o << "<text x=\"" << left - 6 << "\" y=\"" << sy(yv) + 4 << "\" text-anchor=\"end\">"
          << format_number(std::round(yv * 100.0) / 100.0) << "</text>\n";
        o << "<text x=\"" << sx(xv) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
          << format_number(std::round(xv * 1000.0) / 1000.0) << "</text>\n";
    }
    o << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 10 << "\" text-anchor=\"middle\">" << to_string(axis)
      << "</text>\n";
    o << "<text x=\"16\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << top + ph / 2 << ")\">sum rate [bit/s/Hz]</text>\n";
    for (std::size_t i = 0; i < order.size(); ++i) {
        const char* color = palette[i % (sizeof(palette) / sizeof(palette[0]))];
        const auto& pts = series[order[i]];
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t j = 0; j < pts.size(); ++j)
            o << (j ? " " : "") << sx(pts[j].first) << ',' << sy(pts[j].second);
        o << "\"/>\n";
        for (const auto& p : pts)
            o << "<circle cx=\"" << sx(p.first) << "\" cy=\"" << sy(p.second) << "\" r=\"3\" fill=\"" << color
              << "\"/>\n";
        const double ly = top + 16.0 + 18.0 * static_cast<double>(i);
        o << "<line x1=\"" << width - right + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << width - right + 32
          << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << width - right + 38 << "\" y=\"" << ly << "\">" << order[i] << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

// ---- selftest ---------------------------------------------------------------

namespace {

SelftestCheck check(std::string name, double expected, double actual, double tolerance) {
    SelftestCheck c;
    c.name = std::move(name);
    c.expected = expected;
    c.actual = actual;
    c.tolerance = tolerance;
    c.passed = std::isfinite(actual) && std::abs(actual - expected) <= tolerance;
    return c;
}

// Worst-case outcome over a family of sub-checks.
struct Worst {
    std::string name;
    double tolerance;
    double expected = 0.0;
    double actual = 0.0;
    double err = -1.0;
    bool bad = false;

    void add(double exp, double act) {
        if (bad) return;
        const double e = std::abs(act - exp);
        if (!std::isfinite(e)) bad = true;
        if (bad || e > err) {
            err = e;
            expected = exp;
            actual = act;
        }
    }
    SelftestCheck result() const {
        SelftestCheck c = check(name, expected, actual, tolerance);
        if (bad) c.passed = false;
        return c;
    }
};

double j0_series(double x) {
    long double term = 1.0L;
    long double sum = 1.0L;
    const long double q = static_cast<long double>(x) * x / 4.0L;
    for (int m = 1; m < 80; ++m) {
        term *= -q / (static_cast<long double>(m) * m);
        sum += term;
    }
    return static_cast<double>(sum);
}

}  // namespace

std::vector<SelftestCheck> run_selftest(const SelftestHooks& hooks) {
    std::vector<SelftestCheck> out;
    const auto ev = hooks.exp_integral ? hooks.exp_integral
                                       : std::function<double(double, double)>([](double v, double x) {
                                             return exp_integral_generalized(v, x);
                                         });

    {
        Worst w{"exp_integral recurrence v E_{v+1} + x E_v = e^{-x}", 1e-10};
        for (double v : {0.5, 1.0, 1.5, 2.0, 3.0, 4.5, 6.0})
            for (double x : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) w.add(std::exp(-x), v * ev(v + 1.0, x) + x * ev(v, x));
        out.push_back(w.result());
    }
    {
        Worst w{"gauss_q(gauss_q_inv(b)) relative round trip", 1e-8};
        for (double b : {1e-9, 1e-7, 1e-6, 1e-5, 1e-3, 0.01, 0.1, 0.3, 0.5, 0.7, 0.9})
            w.add(1.0, gauss_q(gauss_q_inv(b)) / b);
        out.push_back(w.result());
    }
    {
        Worst w{"digamma recurrence psi(x+1) - psi(x) = 1/x", 1e-10};
        for (double x : {0.05, 0.3, 1.0, 2.5, 7.0488, 20.0, 150.0}) w.add(1.0 / x, digamma(x + 1.0) - digamma(x));
        out.push_back(w.result());
    }
    {
        Worst w{"bessel_j0 against power series on [0,10]", 1e-9};
        for (int i = 0; i <= 100; ++i) {
            const double x = 0.1 * i;
            w.add(j0_series(x), bessel_j0(x));
        }
        out.push_back(w.result());
    }
    {
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> shape(0.5, 10.0);
        std::uniform_real_distribution<double> scale(0.01, 5.0);
        Worst wm{"gamma_moment_match first moment (relative)", 1e-13};
        Worst wv{"gamma_moment_match second moment (relative)", 1e-13};
        for (int n = 0; n < 100; ++n) {
            std::vector<GammaParams> comps(static_cast<std::size_t>(2 + n % 5));
            double m = 0.0;
            double v = 0.0;
            for (auto& c : comps) {
                c.shape = shape(rng);
                c.scale = scale(rng);
                m += c.shape * c.scale;
                v += c.shape * c.scale * c.scale;
            }
            const GammaParams g = gamma_moment_match(comps);
            wm.add(1.0, g.shape * g.scale / m);
            wv.add(1.0, g.shape * g.scale * g.scale / v);
        }
        out.push_back(wm.result());
        out.push_back(wv.result());
    }
    {
        std::mt19937_64 rng(77);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        Worst w{"water-filling min-rate versus 0.01 brute force (shortfall)", 1e-12};
        for (int n = 0; n < 20; ++n) {
            const int k = 2 + n % 2;
            const double rc = 2.0 * u(rng);
            std::vector<double> r(static_cast<std::size_t>(k));
            for (double& x : r) x = 2.0 * u(rng);
            const std::vector<double> c = waterfill_common_rate(rc, r);
            double got = std::numeric_limits<double>::infinity();
            for (int i = 0; i < k; ++i) got = std::min(got, c[i] + r[i]);
            double best = 0.0;
            for (const auto& p : simplex_grid(k, 0.01, 1000000)) {
                double mr = std::numeric_limits<double>::infinity();
                for (int i = 0; i < k; ++i) mr = std::min(mr, p[i] * rc + r[i]);
                best = std::max(best, mr);
            }
            w.add(0.0, std::max(0.0, best - got));
        }
        out.push_back(w.result());
    }
    {
        SystemConfig cfg = SystemConfig::defaults(1);
        BoundOptions opt;
        opt.t_grid = {0.5};
        opt.trials = hooks.saa_trials;
        opt.seed = 1;
        const BoundRow row = run_bound(cfg, opt).front();
        // Closed form may exceed SAA by at most 3% (plus Monte Carlo noise).
        const double excess = (row.closed_form_sum - row.saa_sum) / row.saa_sum;
        SelftestCheck c;
        c.name = "reduced bound-vs-SAA at t=0.5, zeta=1000: (closed - saa)/saa <= 0.03";
        c.expected = 0.0;
        c.actual = excess;
        c.tolerance = 0.03;
        c.passed = std::isfinite(excess) && excess <= 0.03;
        out.push_back(c);
    }
    return out;
}

int report_selftest(const std::vector<SelftestCheck>& checks, std::ostream& out) {
    int failed = 0;
    for (const auto& c : checks) {
        out << (c.passed ? "PASS " : "FAIL ") << c.name;
        if (!c.passed) {
            out << " (expected " << format_number(c.expected) << ", actual " << format_number(c.actual)
                << ", tolerance " << format_number(c.tolerance) << ')';
            ++failed;
        }
        out << '\n';
    }
    out << (failed == 0 ? "selftest: all " + std::to_string(checks.size()) + " checks passed\n"
                        : "selftest: " + std::to_string(failed) + " of " + std::to_string(checks.size()) +
                              " checks failed\n");
    return failed == 0 ? 0 : 1;
}

}  // namespace rsma
