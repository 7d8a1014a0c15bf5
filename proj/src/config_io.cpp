// SPDX-License-Identifier: Apache-2.0

#include "rsma/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "rsma/errors.hpp"

namespace rsma {

namespace {

using nlohmann::json;

class FieldReader {
public:
    FieldReader(const json& j, std::string source) : j_(j), source_(std::move(source)) {
        if (!j_.is_object()) throw ConfigError(source_ + ": top-level value must be a JSON object");
    }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        throw ConfigError(source_ + ": field '" + key + "': " + what);
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key);
    }

    void real(const std::string& key, double& out) {
        if (!has(key)) return;
        if (!j_[key].is_number()) fail(key, "expected a number");
        out = j_[key].get<double>();
    }

    void integer(const std::string& key, int& out) {
        if (!has(key)) return;
        if (!j_[key].is_number_integer()) fail(key, "expected an integer");
        out = j_[key].get<int>();
    }

    void unsigned64(const std::string& key, std::uint64_t& out) {
        if (!has(key)) return;
        if (!j_[key].is_number_unsigned() && !(j_[key].is_number_integer() && j_[key].get<long long>() >= 0))
            fail(key, "expected a nonnegative integer");
        out = j_[key].get<std::uint64_t>();
    }

    template <typename T>
    void array(const std::string& key, std::vector<T>& out) {
        if (!has(key)) return;
        const json& a = j_[key];
        if (!a.is_array()) fail(key, "expected an array");
        out.clear();
        for (std::size_t i = 0; i < a.size(); ++i) {
            const bool ok = std::is_integral_v<T> ? a[i].is_number_integer() : a[i].is_number();
            if (!ok) fail(key + "[" + std::to_string(i) + "]", std::is_integral_v<T> ? "expected an integer" : "expected a number");
            out.push_back(a[i].get<T>());
        }
    }

    void text(const std::string& key, std::string& out) {
        if (!has(key)) return;
        if (!j_[key].is_string()) fail(key, "expected a string");
        out = j_[key].get<std::string>();
    }

    void reject_unknown() const {
        for (const auto& item : j_.items())
            if (!seen_.count(item.key())) throw ConfigError(source_ + ": unknown field '" + item.key() + "'");
    }

private:
    const json& j_;
    std::string source_;
    std::set<std::string> seen_;
};

}  // namespace

std::string to_string(CommonPrecoderMode mode) {
    return mode == CommonPrecoderMode::isotropic_random ? "isotropic_random" : "dominant_left_singular";
}

CommonPrecoderMode parse_precoder_mode(const std::string& name) {
    if (name == "isotropic_random") return CommonPrecoderMode::isotropic_random;
    if (name == "dominant_left_singular") return CommonPrecoderMode::dominant_left_singular;
    throw ConfigError("unknown common_precoder_mode '" + name + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_json_document(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        std::size_t col = 1;
        const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        for (std::size_t i = 0; i < end; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": JSON syntax error: " +
                          e.what());
    }
}

SystemConfig system_config_from_json(const json& j, const std::string& source) {
    SystemConfig c;
    FieldReader r(j, source);
    r.integer("num_tx_antennas", c.num_tx_antennas);
    r.integer("num_users", c.num_users);
    r.real("tx_power_dBm", c.tx_power_dBm);
    r.real("carrier_freq_Hz", c.carrier_freq_Hz);
    r.real("bandwidth_Hz", c.bandwidth_Hz);
    r.real("noise_density_dBm_per_Hz", c.noise_density_dBm_per_Hz);
    r.real("csi_delay_s", c.csi_delay_s);
    r.integer("blocklength_common", c.blocklength_common);
    r.array("blocklength_private", c.blocklength_private);
    r.array("bler_common", c.bler_common);
    r.array("bler_private", c.bler_private);
    r.array("velocities_kmh", c.velocities_kmh);
    r.array("distances_m", c.distances_m);
    r.real("pathloss_ref_dB", c.pathloss_ref_dB);
    r.real("pathloss_exponent", c.pathloss_exponent);
    r.real("ref_distance_m", c.ref_distance_m);
    r.real("qos_min_rate", c.qos_min_rate);
    std::string mode = to_string(c.common_precoder_mode);
    r.text("common_precoder_mode", mode);
    r.unsigned64("rng_seed", c.rng_seed);
    r.reject_unknown();
    try {
        c.common_precoder_mode = parse_precoder_mode(mode);
    } catch (const ConfigError& e) {
        r.fail("common_precoder_mode", e.what());
    }
    if (c.num_users < 1) r.fail("num_users", "must be >= 1");
    const auto k = static_cast<std::size_t>(c.num_users);
    if (c.blocklength_private.empty()) c.blocklength_private.assign(k, 300);
    if (c.bler_common.empty()) c.bler_common.assign(k, 1e-6);
    if (c.bler_private.empty()) c.bler_private.assign(k, 1e-6);
    if (c.velocities_kmh.empty()) c.velocities_kmh.assign(k, 110.0);
    resolve_distances(c);
    try {
        c.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(source + ": " + e.what());
    }
    return c;
}

SystemConfig parse_system_config(const std::string& text, const std::string& source) {
    return system_config_from_json(parse_json_document(text, source), source);
}

SystemConfig load_system_config(const std::string& path) { return parse_system_config(read_text_file(path), path); }

json to_json(const SystemConfig& c) {
    json j;
    j["num_tx_antennas"] = c.num_tx_antennas;
    j["num_users"] = c.num_users;
    j["tx_power_dBm"] = c.tx_power_dBm;
    j["carrier_freq_Hz"] = c.carrier_freq_Hz;
    j["bandwidth_Hz"] = c.bandwidth_Hz;
    j["noise_density_dBm_per_Hz"] = c.noise_density_dBm_per_Hz;
    j["csi_delay_s"] = c.csi_delay_s;
    j["blocklength_common"] = c.blocklength_common;
    j["blocklength_private"] = c.blocklength_private;
    j["bler_common"] = c.bler_common;
    j["bler_private"] = c.bler_private;
    j["velocities_kmh"] = c.velocities_kmh;
    j["distances_m"] = c.distances_m;
    j["pathloss_ref_dB"] = c.pathloss_ref_dB;
    j["pathloss_exponent"] = c.pathloss_exponent;
    j["ref_distance_m"] = c.ref_distance_m;
    j["qos_min_rate"] = c.qos_min_rate;
    j["common_precoder_mode"] = to_string(c.common_precoder_mode);
    j["rng_seed"] = c.rng_seed;
    return j;
}

json to_json(const RateEstimate& e) {
    return {{"r_common", e.r_common},   {"r_private", e.r_private}, {"sum_rate", e.sum_rate},
            {"min_rate", e.min_rate},   {"trials", e.trials},       {"se_common", e.se_common},
            {"se_private", e.se_private}, {"se_sum", e.se_sum},     {"se_min", e.se_min}};
}

json to_json(const PowerAllocation& a) { return {{"t", a.t}, {"mu", a.mu}, {"c", a.c}}; }

json to_json(const OptimizationReport& r) {
    json j;
    j["allocation"] = to_json(r.allocation);
    j["t_star_global"] = r.t_star_global;
    j["common_active"] = r.common_active;
    j["branch"] = r.branch;
    j["iterations_global"] = r.iterations_global;
    j["iterations_stage2"] = r.iterations_stage2;
    j["converged_global"] = r.converged_global;
    j["converged_stage2"] = r.converged_stage2;
    j["objective_trace_global"] = r.objective_trace_global;
    j["objective_trace_stage2"] = r.objective_trace_stage2;
    j["restoration_used"] = r.restoration_used;
    j["qos_feasible"] = r.qos_feasible;
    j["violated_users"] = r.violated_users;
    j["qos_residuals"] = r.qos_residuals;
    j["simplex_residual"] = r.simplex_residual;
    j["predicted_common"] = r.predicted_common;
    j["predicted_private"] = r.predicted_private;
    j["split_estimate"] = r.split_estimate ? to_json(*r.split_estimate) : json(nullptr);
    return j;
}

}  // namespace rsma
