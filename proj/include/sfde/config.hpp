#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "sfde/montecarlo.hpp"
#include "sfde/problem.hpp"

namespace sfde {

// Flat structured text: [section] headers and key = value lines; '#' or ';'
// start a comment. Sections and keys are kept sorted, which makes the
// serialized form canonical.
using ConfigMap = std::map<std::string, std::map<std::string, std::string>>;

ConfigMap parse_config_text(const std::string& text);
std::string canonical_config_text(const ConfigMap& config);

// [problem] builtin/horizon/delay, [problem.params] builtin parameters,
// [constants] c/a/p/beta/epsilon.
ProblemSpec problem_from_config(const ConfigMap& config);
ConfigMap problem_to_config(const ProblemSpec& problem);

// [study] coarse_ns, n_fine, num_paths, q, seed, bootstrap_resamples,
// reference (fine|oracle). Threads come from the command line only.
ErrorStudyConfig study_from_config(const ConfigMap& config);
ConfigMap study_to_config(const ErrorStudyConfig& study);

// FNV-1a over the canonical problem config text, as 16 hex digits.
std::string problem_hash(const ProblemSpec& problem);

double parse_double(const std::string& text, const std::string& what);
long long parse_int(const std::string& text, const std::string& what);
std::vector<int> parse_int_list(const std::string& text, const std::string& what);
std::string format_double(double x);  // %.17g

}  // namespace sfde
