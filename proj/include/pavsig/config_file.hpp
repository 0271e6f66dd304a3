#pragma once

// Plain-text world configuration: one `key = value` per line, `#` starts a
// comment. Recognized keys:
//   tick_ms, max_step, walls (= left,right), left_wall, right_wall,
//   jitter_bins, overshoot_prob, seed, backoff_bins, motions_per_trial,
//   contact_high, contact_detect_threshold, bins
// Unknown keys are an error.

#include <filesystem>
#include <string_view>

#include "pavsig/harness.hpp"

namespace pavsig {

// Applies the settings in `text` on top of `cfg`. Throws
// std::invalid_argument with the offending line number.
void apply_config_text(std::string_view text, ExperimentConfig& cfg);
void apply_config_file(const std::filesystem::path& path, ExperimentConfig& cfg);

}  // namespace pavsig
