#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <string>
#include <type_traits>
#include <unordered_set>
#include <utility>
#include <vector>

#include "arident/errors.hpp"
#include "arident/noise.hpp"
#include "arident/system.hpp"

namespace arident {

/// One named experiment: process parameters, sampling plan, and optional
/// acceptance bands.  Band keys are absent unless a check is wanted, so a
/// plain scenario just simulates and reports.
struct ScenarioConfig {
    std::string name = "default";

    double lambda = 1.0 / 3.0;
    double qbar = 0.0;
    double delta2 = 4.0;
    double vbar = 0.0;
    double xi2 = 9.0;
    NoiseKind noise = NoiseKind::White;
    double noise_coeff = 0.0;

    std::size_t n = 1000;
    std::size_t alpha = 1;
    std::size_t kappa = 100;
    int order = 1;
    std::uint64_t seed = 1;
    std::size_t burn_in = kDefaultBurnIn;

    // Theory expectations, checked against the closed-form block.
    std::optional<double> expect_mean;
    std::optional<double> expect_variance;
    std::optional<double> expect_phi1;
    std::optional<double> expect_phi2;
    std::optional<double> expect_pev;
    std::optional<double> expect_tol;

    // Empirical bands, checked against the batch statistics.
    std::optional<double> mean_tol;
    std::optional<double> var_lo;
    std::optional<double> var_hi;
    std::optional<std::string> var_decrease_vs;
    std::optional<double> bias_reference;
    std::optional<double> bias_min_distance;

    std::size_t effective_n() const noexcept { return n * alpha; }
};

inline SystemParams system_params(const ScenarioConfig& sc) {
    SystemParams params;
    params.lambda = sc.lambda;
    params.q = sc.noise == NoiseKind::White
                   ? NoiseSpec::white(sc.qbar, sc.delta2)
                   : NoiseSpec::colored_ar1(sc.noise_coeff, sc.delta2);
    params.v = NoiseSpec::white(sc.vbar, sc.xi2);
    return params;
}

/// Parses a noise field: "white" or "colored:<coeff>".
inline std::pair<NoiseKind, double> parse_noise_token(const std::string& token) {
    if (token == "white") return {NoiseKind::White, 0.0};
    const std::string prefix = "colored:";
    if (token.rfind(prefix, 0) == 0) {
        const std::string coeff_str = token.substr(prefix.size());
        try {
            std::size_t used = 0;
            const double coeff = std::stod(coeff_str, &used);
            if (used == coeff_str.size()) return {NoiseKind::ColoredAR1, coeff};
        } catch (const std::exception&) {
            // fall through to the shared error below
        }
    }
    throw spec_error("noise must be 'white' or 'colored:<coeff>', got '" + token + "'");
}

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

struct ConfigErrors {
    std::vector<std::string> messages;

    void add(const std::string& scenario, const std::string& field,
             const std::string& what) {
        messages.push_back("scenario '" + scenario + "', " + field + ": " + what);
    }

    void raise_if_any() const {
        if (messages.empty()) return;
        std::string joined = "invalid configuration:";
        for (const std::string& m : messages) joined += "\n  " + m;
        throw spec_error(joined);
    }
};

inline bool parse_real(const std::string& value, double& out) {
    try {
        std::size_t used = 0;
        out = std::stod(value, &used);
        return used == value.size();
    } catch (const std::exception&) {
        return false;
    }
}

inline bool parse_count(const std::string& value, std::uint64_t& out) {
    try {
        if (!value.empty() && value[0] == '-') return false;
        std::size_t used = 0;
        out = std::stoull(value, &used);
        return used == value.size();
    } catch (const std::exception&) {
        return false;
    }
}

inline void assign_key(ScenarioConfig& sc, const std::string& key,
                       const std::string& value, ConfigErrors& errors) {
    auto real_field = [&](double& slot) {
        double parsed = 0.0;
        if (parse_real(value, parsed)) {
            slot = parsed;
        } else {
            errors.add(sc.name, key, "expected a decimal real, got '" + value + "'");
        }
    };
    auto opt_real_field = [&](std::optional<double>& slot) {
        double parsed = 0.0;
        if (parse_real(value, parsed)) {
            slot = parsed;
        } else {
            errors.add(sc.name, key, "expected a decimal real, got '" + value + "'");
        }
    };
    auto count_field = [&](auto& slot) {
        std::uint64_t parsed = 0;
        if (parse_count(value, parsed)) {
            slot = static_cast<std::remove_reference_t<decltype(slot)>>(parsed);
        } else {
            errors.add(sc.name, key, "expected a nonnegative integer, got '" + value + "'");
        }
    };

    if (key == "lambda") real_field(sc.lambda);
    else if (key == "qbar") real_field(sc.qbar);
    else if (key == "delta2") real_field(sc.delta2);
    else if (key == "vbar") real_field(sc.vbar);
    else if (key == "xi2") real_field(sc.xi2);
    else if (key == "noise") {
        try {
            const auto [kind, coeff] = parse_noise_token(value);
            sc.noise = kind;
            sc.noise_coeff = coeff;
        } catch (const spec_error& e) {
            errors.add(sc.name, key, e.what());
        }
    } else if (key == "n") count_field(sc.n);
    else if (key == "alpha") count_field(sc.alpha);
    else if (key == "kappa") count_field(sc.kappa);
    else if (key == "order") count_field(sc.order);
    else if (key == "seed") count_field(sc.seed);
    else if (key == "burn_in") count_field(sc.burn_in);
    else if (key == "expect_mean") opt_real_field(sc.expect_mean);
    else if (key == "expect_variance") opt_real_field(sc.expect_variance);
    else if (key == "expect_phi1") opt_real_field(sc.expect_phi1);
    else if (key == "expect_phi2") opt_real_field(sc.expect_phi2);
    else if (key == "expect_pev") opt_real_field(sc.expect_pev);
    else if (key == "expect_tol") opt_real_field(sc.expect_tol);
    else if (key == "mean_tol") opt_real_field(sc.mean_tol);
    else if (key == "var_lo") opt_real_field(sc.var_lo);
    else if (key == "var_hi") opt_real_field(sc.var_hi);
    else if (key == "var_decrease_vs") sc.var_decrease_vs = value;
    else if (key == "bias_reference") opt_real_field(sc.bias_reference);
    else if (key == "bias_min_distance") opt_real_field(sc.bias_min_distance);
    else errors.add(sc.name, key, "unknown key");
}

} // namespace detail

/// Semantic checks shared by the config loader and the CLI flag path.
/// Collects every violation instead of stopping at the first.
inline std::vector<std::string> scenario_problems(const ScenarioConfig& sc) {
    std::vector<std::string> problems;
    auto field = [&](const std::string& name, const std::string& what) {
        problems.push_back("scenario '" + sc.name + "', " + name + ": " + what);
    };
    if (!(std::abs(sc.lambda) < 1.0)) field("lambda", "pole must satisfy |lambda| < 1");
    if (!(sc.delta2 >= 0.0)) field("delta2", "variance must be nonnegative");
    if (!(sc.xi2 >= 0.0)) field("xi2", "variance must be nonnegative");
    if (sc.noise == NoiseKind::ColoredAR1) {
        if (!(std::abs(sc.noise_coeff) < 1.0)) {
            field("noise", "colored filter coefficient must satisfy |coeff| < 1");
        }
        if (sc.qbar != 0.0) field("qbar", "colored input noise must be zero-mean");
    }
    if (sc.n < 3) field("n", "trajectory length must be at least 3");
    if (sc.alpha < 1) field("alpha", "length multiplier must be at least 1");
    if (sc.order != 1 && sc.order != 2) field("order", "predictor order must be 1 or 2");
    if (sc.var_lo && sc.var_hi && *sc.var_lo > *sc.var_hi) {
        field("var_lo", "lower variance bound exceeds var_hi");
    }
    if (sc.bias_reference.has_value() != sc.bias_min_distance.has_value()) {
        field("bias_reference", "bias_reference and bias_min_distance go together");
    }
    return problems;
}

inline void validate_scenario(const ScenarioConfig& sc) {
    const std::vector<std::string> problems = scenario_problems(sc);
    if (!problems.empty()) {
        std::string joined = "invalid scenario:";
        for (const std::string& p : problems) joined += "\n  " + p;
        throw spec_error(joined);
    }
}

/// Reads scenario sections of the form
///
///   [scenario.<name>]
///   key = value        # comment
///
/// Unknown keys, malformed values, duplicate names, and keys outside a
/// section are all reported together, with the scenario and field named.
inline std::vector<ScenarioConfig> parse_config(std::istream& in) {
    std::vector<ScenarioConfig> scenarios;
    detail::ConfigErrors errors;
    std::unordered_set<std::string> seen_names;
    bool in_section = false;
    std::string line;
    std::size_t line_no = 0;

    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            const std::string prefix = "[scenario.";
            if (line.rfind(prefix, 0) != 0 || line.back() != ']' ||
                line.size() <= prefix.size() + 1) {
                errors.messages.push_back("line " + std::to_string(line_no) +
                                          ": expected [scenario.<name>], got '" +
                                          line + "'");
                in_section = false;
                continue;
            }
            const std::string name =
                line.substr(prefix.size(), line.size() - prefix.size() - 1);
            if (!seen_names.insert(name).second) {
                errors.messages.push_back("line " + std::to_string(line_no) +
                                          ": duplicate scenario name '" + name + "'");
            }
            scenarios.emplace_back();
            scenarios.back().name = name;
            in_section = true;
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            errors.messages.push_back("line " + std::to_string(line_no) +
                                      ": expected key = value, got '" + line + "'");
            continue;
        }
        if (!in_section) {
            errors.messages.push_back("line " + std::to_string(line_no) +
                                      ": key outside any [scenario.<name>] section");
            continue;
        }
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        detail::assign_key(scenarios.back(), key, value, errors);
    }

    for (const ScenarioConfig& sc : scenarios) {
        for (const std::string& p : scenario_problems(sc)) {
            errors.messages.push_back(p);
        }
    }
    errors.raise_if_any();
    if (scenarios.empty()) {
        throw spec_error("configuration defines no scenarios");
    }
    return scenarios;
}

inline std::vector<ScenarioConfig> load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw spec_error("cannot open config file: " + path);
    }
    return parse_config(in);
}

} // namespace arident
