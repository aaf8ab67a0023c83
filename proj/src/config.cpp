#include "sfde/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "sfde/errors.hpp"

namespace sfde {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

const std::string* find_key(const ConfigMap& config, const std::string& section,
                            const std::string& key) {
    const auto sec = config.find(section);
    if (sec == config.end()) return nullptr;
    const auto it = sec->second.find(key);
    return it == sec->second.end() ? nullptr : &it->second;
}

std::string require_key(const ConfigMap& config, const std::string& section,
                        const std::string& key) {
    const std::string* v = find_key(config, section, key);
    if (!v) throw InvalidParameterError("config: missing [" + section + "] " + key);
    return *v;
}

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
    ConfigMap config;
    std::istringstream is(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') {
                throw InvalidParameterError("config line " + std::to_string(line_no) +
                                            ": unterminated section header");
            }
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty()) {
                throw InvalidParameterError("config line " + std::to_string(line_no) +
                                            ": empty section name");
            }
            config[section];
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw InvalidParameterError("config line " + std::to_string(line_no) +
                                        ": expected key = value");
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) {
            throw InvalidParameterError("config line " + std::to_string(line_no) + ": empty key");
        }
        if (section.empty()) {
            throw InvalidParameterError("config line " + std::to_string(line_no) +
                                        ": key outside any section");
        }
        config[section][key] = value;
    }
    return config;
}

std::string canonical_config_text(const ConfigMap& config) {
    std::string out;
    bool first = true;
    for (const auto& [section, entries] : config) {
        if (!first) out += '\n';
        first = false;
        out += '[' + section + "]\n";
        for (const auto& [key, value] : entries) {
            out += key + " = " + value + '\n';
        }
    }
    return out;
}

double parse_double(const std::string& text, const std::string& what) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0') {
        throw InvalidParameterError("config: " + what + ": not a number: '" + text + "'");
    }
    return v;
}

long long parse_int(const std::string& text, const std::string& what) {
    char* end = nullptr;
    const long long v = std::strtoll(text.c_str(), &end, 10);
    if (end == text.c_str() || *end != '\0') {
        throw InvalidParameterError("config: " + what + ": not an integer: '" + text + "'");
    }
    return v;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        const std::string t = trim(cell);
        if (t.empty()) continue;
        out.push_back(static_cast<int>(parse_int(t, what)));
    }
    if (out.empty()) throw InvalidParameterError("config: " + what + ": empty list");
    return out;
}

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

ProblemSpec problem_from_config(const ConfigMap& config) {
    const std::string builtin = require_key(config, "problem", "builtin");
    std::map<std::string, double> params;
    if (const auto sec = config.find("problem.params"); sec != config.end()) {
        for (const auto& [key, value] : sec->second) {
            params[key] = parse_double(value, "problem.params." + key);
        }
    }
    if (const std::string* v = find_key(config, "problem", "horizon")) {
        params["horizon"] = parse_double(*v, "problem.horizon");
    }
    if (const std::string* v = find_key(config, "problem", "delay")) {
        params["delay"] = parse_double(*v, "problem.delay");
    }
    if (const auto sec = config.find("constants"); sec != config.end()) {
        for (const auto& [key, value] : sec->second) {
            if (key != "c" && key != "a" && key != "p" && key != "beta" && key != "epsilon") {
                throw InvalidParameterError("config: unknown constant: " + key);
            }
            params[key] = parse_double(value, "constants." + key);
        }
    }
    return builtin_problem(builtin, params);
}

ConfigMap problem_to_config(const ProblemSpec& problem) {
    ConfigMap config;
    auto& prob = config["problem"];
    prob["builtin"] = problem.name;
    prob["dim_state"] = std::to_string(problem.dim_state);
    prob["dim_noise"] = std::to_string(problem.dim_noise);
    prob["horizon"] = format_double(problem.horizon);
    prob["delay"] = format_double(problem.delay);
    auto& params = config["problem.params"];
    for (const auto& [key, value] : problem.params) {
        params[key] = format_double(value);
    }
    auto& constants = config["constants"];
    constants["c"] = format_double(problem.constants.c);
    constants["a"] = format_double(problem.constants.a);
    constants["p"] = format_double(problem.constants.p);
    constants["beta"] = format_double(problem.constants.beta);
    constants["epsilon"] = format_double(problem.constants.epsilon);
    return config;
}

ErrorStudyConfig study_from_config(const ConfigMap& config) {
    ErrorStudyConfig study;
    study.coarse_ns = parse_int_list(require_key(config, "study", "coarse_ns"), "study.coarse_ns");
    study.n_fine = static_cast<int>(parse_int(require_key(config, "study", "n_fine"),
                                              "study.n_fine"));
    study.num_paths = static_cast<int>(parse_int(require_key(config, "study", "num_paths"),
                                                 "study.num_paths"));
    if (const std::string* v = find_key(config, "study", "q")) {
        study.q = parse_double(*v, "study.q");
    }
    if (const std::string* v = find_key(config, "study", "seed")) {
        study.seed = static_cast<std::uint64_t>(parse_int(*v, "study.seed"));
    }
    if (const std::string* v = find_key(config, "study", "bootstrap_resamples")) {
        study.bootstrap_resamples = static_cast<int>(parse_int(*v, "study.bootstrap_resamples"));
    }
    if (const std::string* v = find_key(config, "study", "reference")) {
        if (*v == "fine") {
            study.reference = ErrorReference::FineProxy;
        } else if (*v == "oracle") {
            study.reference = ErrorReference::Oracle;
        } else {
            throw InvalidParameterError("config: study.reference must be 'fine' or 'oracle'");
        }
    }
    return study;
}

ConfigMap study_to_config(const ErrorStudyConfig& study) {
    ConfigMap config;
    auto& sec = config["study"];
    std::string ns;
    for (std::size_t i = 0; i < study.coarse_ns.size(); ++i) {
        if (i) ns += ',';
        ns += std::to_string(study.coarse_ns[i]);
    }
    sec["coarse_ns"] = ns;
    sec["n_fine"] = std::to_string(study.n_fine);
    sec["num_paths"] = std::to_string(study.num_paths);
    sec["q"] = format_double(study.q);
    sec["seed"] = std::to_string(study.seed);
    sec["bootstrap_resamples"] = std::to_string(study.bootstrap_resamples);
    sec["reference"] = study.reference == ErrorReference::Oracle ? "oracle" : "fine";
    return config;
}

std::string problem_hash(const ProblemSpec& problem) {
    const std::string text = canonical_config_text(problem_to_config(problem));
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace sfde
