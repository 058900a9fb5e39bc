#pragma once

// key=value experiment configuration.
//
//   # comment
//   mode=accel_to_response        # or period_to_peak
//   record=chamoli_ne.txt         # relative to the config file
//   omega=0.5
//   damping=0.05
//   damping_kind=ratio            # none | rate | ratio
//   factors=0.5,0.8,1.0,1.2
//   hidden=10
//   beta=0.05
//
// Unknown or repeated keys are errors.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "quakenet/pipeline.hpp"

namespace quakenet {

/// Keys accepted by parse_experiment_config, in documentation order.
const std::vector<std::string>& experiment_config_keys();

/// base_dir resolves relative record paths. seed_override replaces the
/// file's seed when set. Throws UsageError for unknown keys or bad values;
/// record loading errors propagate as InputError.
ExperimentSpec parse_experiment_config(std::istream& in, const std::string& base_dir,
                                       std::optional<std::uint64_t> seed_override = {});

ExperimentSpec load_experiment_config(const std::string& path,
                                      std::optional<std::uint64_t> seed_override = {});

DampingSpec::Kind parse_damping_kind(const std::string& name);
KernelFrequency parse_kernel_frequency(const std::string& name);
ExperimentMode parse_experiment_mode(const std::string& name);

/// Comma separated list of numbers; throws UsageError.
std::vector<double> parse_number_list(const std::string& text);

}  // namespace quakenet
