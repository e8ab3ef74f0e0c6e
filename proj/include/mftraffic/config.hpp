#pragma once

#include <filesystem>
#include <string>

#include "mftraffic/experiment.hpp"

namespace mftraffic {

/// Parse an experiment config file (INI-style sections, `key = value`
/// pairs, `#` comments; see configs/paper-sweep.cfg for the commented
/// reference). Errors name the offending section.key and line.
ExperimentConfig load_experiment_config(const std::filesystem::path& p);

/// Parse from text (path only used in error messages).
ExperimentConfig parse_experiment_config(const std::string& text, const std::string& origin);

}  // namespace mftraffic
