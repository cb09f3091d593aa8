#pragma once

// Run configuration: JSON schema, validation, and round-trip serialization.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "channel.hpp"
#include "region.hpp"

namespace icdisp {

inline constexpr int kReportSchemaVersion = 1;

/// Bad or missing configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A violated runtime precondition such as too few trials (CLI exit code 3).
struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Json = nlohmann::ordered_json;

namespace detail {

inline const Json& need(const Json& j, const std::string& key, const std::string& path) {
    if (!j.is_object() || !j.contains(key))
        throw ConfigError("config: missing field '" + path + "'");
    return j.at(key);
}

inline double need_number(const Json& j, const std::string& key, const std::string& path) {
    const Json& v = need(j, key, path);
    if (!v.is_number()) throw ConfigError("config: field '" + path + "' must be a number");
    return v.get<double>();
}

inline double opt_number(const Json& j, const std::string& key, double fallback) {
    if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
    if (!j.at(key).is_number())
        throw ConfigError("config: field '" + key + "' must be a number");
    return j.at(key).get<double>();
}

inline std::uint64_t opt_count(const Json& j, const std::string& key, std::uint64_t fallback) {
    if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
    if (!j.at(key).is_number_unsigned() && !j.at(key).is_number_integer())
        throw ConfigError("config: field '" + key + "' must be an integer");
    const auto v = j.at(key).get<std::int64_t>();
    if (v < 0) throw ConfigError("config: field '" + key + "' must be nonnegative");
    return static_cast<std::uint64_t>(v);
}

} // namespace detail

/// Target operating point: explicit kappas, or the capacity corner.
struct TargetConfig {
    double epsilon = 0.001;
    bool at_corner = true;
    double kappa1 = 0.0, kappa2 = 0.0; // used when !at_corner

    TargetPoint resolve(const ChannelParams& ch) const {
        if (at_corner) {
            const FirstOrder fo = first_order(ch);
            return TargetPoint{fo.i11, fo.i21, epsilon};
        }
        return TargetPoint{kappa1, kappa2, epsilon};
    }
};

struct RegionConfig {
    TargetConfig target;
    int grid = 257;
};

struct SimulateConfig {
    TargetConfig target;
    bool symmetric_boundary = true; // place (l1,l2) on the symmetric boundary point
    double l1 = 0.0, l2 = 0.0;      // used when !symmetric_boundary
    std::vector<int> n_list = {100, 200, 400};
    std::uint64_t trials = 100000;
    std::optional<double> gamma;
};

struct VerifyConfig {
    int n = 100;
    std::uint64_t trials = 20000;
    std::uint64_t u_draws = 200000;
    std::uint64_t tau_blocks = 200;
    int ratio_n = 50;
    std::uint64_t ratio_samples = 2000;
    // test hook: perturbs one entry of the analytic vd target so the
    // corresponding check must fail (sensitivity canary)
    std::optional<std::array<double, 3>> perturb_vd; // {i, j, delta}
};

struct RunConfig {
    ChannelParams channel{};
    std::uint64_t seed = 1;
    int threads = 1;
    RegionConfig region;
    SimulateConfig simulate;
    VerifyConfig verify;

    static RunConfig from_json(const Json& j);
    Json to_json() const;
    static RunConfig load(const std::string& path);
};

namespace detail {

inline TargetConfig parse_target(const Json& j, const std::string& path) {
    TargetConfig t;
    t.epsilon = need_number(j, "epsilon", path + ".epsilon");
    if (!(t.epsilon > 0.0 && t.epsilon < 1.0))
        throw ConfigError("config: field '" + path + ".epsilon' must lie in (0,1)");
    if (j.contains("point") && j.at("point").is_string()) {
        const std::string p = j.at("point").get<std::string>();
        if (p != "corner")
            throw ConfigError("config: field '" + path + ".point' must be \"corner\"");
        t.at_corner = true;
    } else {
        t.at_corner = false;
        t.kappa1 = need_number(j, "kappa1", path + ".kappa1");
        t.kappa2 = need_number(j, "kappa2", path + ".kappa2");
    }
    return t;
}

inline Json target_json(const TargetConfig& t) {
    Json j;
    j["epsilon"] = t.epsilon;
    if (t.at_corner) {
        j["point"] = "corner";
    } else {
        j["kappa1"] = t.kappa1;
        j["kappa2"] = t.kappa2;
    }
    return j;
}

} // namespace detail

inline RunConfig RunConfig::from_json(const Json& j) {
    RunConfig cfg;
    const Json& ch = detail::need(j, "channel", "channel");
    cfg.channel.h11 = detail::need_number(ch, "h11", "channel.h11");
    cfg.channel.h12 = detail::need_number(ch, "h12", "channel.h12");
    cfg.channel.h21 = detail::need_number(ch, "h21", "channel.h21");
    cfg.channel.h22 = detail::need_number(ch, "h22", "channel.h22");
    cfg.channel.p1 = detail::need_number(ch, "p1", "channel.p1");
    cfg.channel.p2 = detail::need_number(ch, "p2", "channel.p2");
    try {
        cfg.channel.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: field 'channel': ") + e.what());
    }
    cfg.seed = detail::opt_count(j, "seed", 1);
    cfg.threads = static_cast<int>(detail::opt_count(j, "threads", 1));
    if (cfg.threads < 1) cfg.threads = 1;

    if (j.contains("region")) {
        const Json& r = j.at("region");
        cfg.region.target = detail::parse_target(r, "region");
        cfg.region.grid = static_cast<int>(detail::opt_count(r, "grid", 257));
    }
    if (j.contains("simulate")) {
        const Json& s = j.at("simulate");
        cfg.simulate.target = detail::parse_target(s, "simulate");
        if (s.contains("l1") || s.contains("l2")) {
            cfg.simulate.symmetric_boundary = false;
            cfg.simulate.l1 = detail::need_number(s, "l1", "simulate.l1");
            cfg.simulate.l2 = detail::need_number(s, "l2", "simulate.l2");
        }
        if (s.contains("n_list")) {
            if (!s.at("n_list").is_array() || s.at("n_list").empty())
                throw ConfigError("config: field 'simulate.n_list' must be a nonempty array");
            cfg.simulate.n_list.clear();
            for (const auto& v : s.at("n_list")) {
                if (!v.is_number_integer() && !v.is_number_unsigned())
                    throw ConfigError("config: field 'simulate.n_list' must hold integers");
                cfg.simulate.n_list.push_back(v.get<int>());
            }
        }
        cfg.simulate.trials = detail::opt_count(s, "trials", cfg.simulate.trials);
        if (s.contains("gamma") && !s.at("gamma").is_null())
            cfg.simulate.gamma = detail::need_number(s, "gamma", "simulate.gamma");
    }
    if (j.contains("verify")) {
        const Json& v = j.at("verify");
        cfg.verify.n = static_cast<int>(detail::opt_count(v, "n", 100));
        cfg.verify.trials = detail::opt_count(v, "trials", cfg.verify.trials);
        cfg.verify.u_draws = detail::opt_count(v, "u_draws", cfg.verify.u_draws);
        cfg.verify.tau_blocks = detail::opt_count(v, "tau_blocks", cfg.verify.tau_blocks);
        cfg.verify.ratio_n = static_cast<int>(detail::opt_count(v, "ratio_n", 50));
        cfg.verify.ratio_samples =
            detail::opt_count(v, "ratio_samples", cfg.verify.ratio_samples);
        if (v.contains("_perturb_vd")) {
            const Json& p = v.at("_perturb_vd");
            cfg.verify.perturb_vd = {detail::need_number(p, "i", "verify._perturb_vd.i"),
                                     detail::need_number(p, "j", "verify._perturb_vd.j"),
                                     detail::need_number(p, "delta", "verify._perturb_vd.delta")};
        }
    }
    return cfg;
}

inline Json RunConfig::to_json() const {
    Json j;
    j["channel"] = {{"h11", channel.h11}, {"h12", channel.h12}, {"h21", channel.h21},
                    {"h22", channel.h22}, {"p1", channel.p1},   {"p2", channel.p2}};
    j["seed"] = seed;
    j["threads"] = threads;
    j["region"] = detail::target_json(region.target);
    j["region"]["grid"] = region.grid;
    j["simulate"] = detail::target_json(simulate.target);
    if (!simulate.symmetric_boundary) {
        j["simulate"]["l1"] = simulate.l1;
        j["simulate"]["l2"] = simulate.l2;
    }
    j["simulate"]["n_list"] = simulate.n_list;
    j["simulate"]["trials"] = simulate.trials;
    if (simulate.gamma) j["simulate"]["gamma"] = *simulate.gamma;
    j["verify"] = {{"n", verify.n},
                   {"trials", verify.trials},
                   {"u_draws", verify.u_draws},
                   {"tau_blocks", verify.tau_blocks},
                   {"ratio_n", verify.ratio_n},
                   {"ratio_samples", verify.ratio_samples}};
    if (verify.perturb_vd) {
        j["verify"]["_perturb_vd"] = {{"i", (*verify.perturb_vd)[0]},
                                      {"j", (*verify.perturb_vd)[1]},
                                      {"delta", (*verify.perturb_vd)[2]}};
    }
    return j;
}

inline RunConfig RunConfig::load(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw ConfigError("config: cannot open '" + path + "'");
    std::string text;
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof(buf), f)) > 0) text.append(buf, got);
    std::fclose(f);
    Json j;
    try {
        j = Json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    return from_json(j);
}

} // namespace icdisp
