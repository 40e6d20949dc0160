#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "kgbox/bbox.hpp"
#include "kgbox/encoder.hpp"
#include "kgbox/evalkit.hpp"
#include "kgbox/grouping.hpp"

namespace kgbox {

// Ground truth JSON Lines: {"x_min", "y_min", "x_max", "y_max"[, "mask_path"]}
// per line. Relative mask paths resolve against the file's directory.
std::vector<GtInstance> parse_ground_truth(std::string_view text, const std::string& source,
                                           const std::filesystem::path& base_dir = {});
std::vector<GtInstance> read_ground_truth(const std::filesystem::path& path);

// `mask_paths`, when given, is written verbatim next to each instance.
std::string format_ground_truth(std::span<const GtInstance> instances,
                                std::span<const std::string> mask_paths = {});

// Box JSON Lines: {"x_min", "y_min", "x_max", "y_max", "score"}; a missing
// score reads as 1.
std::vector<BBox> parse_boxes(std::string_view text, const std::string& source);
std::vector<BBox> read_boxes(const std::filesystem::path& path);
std::string format_boxes(std::span<const BBox> boxes);

nlohmann::json to_json(const Detection& d);
nlohmann::json to_json(const KeypointGroup& g);
nlohmann::json to_json(const EvalReport& report);

}  // namespace kgbox
