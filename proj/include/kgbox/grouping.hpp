#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "kgbox/keypoints.hpp"
#include "kgbox/voting.hpp"

namespace kgbox {

// Keypoints believed to belong to one instance, at most one per type.
struct KeypointGroup {
    std::array<std::optional<Detection>, kKeypointTypes> slots;
    int scale_index = 0;

    const std::optional<Detection>& slot(KeypointType t) const { return slots[static_cast<std::size_t>(index_of(t))]; }
    std::optional<Detection>& slot(KeypointType t) { return slots[static_cast<std::size_t>(index_of(t))]; }
    KeypointMask filled() const;
};

struct GroupConfig {
    double match_radius = 5.0;
    double duplicate_radius = 5.0;
};

void require_valid(const GroupConfig& cfg);

// Strict total order used for the grouping queue: score descending, then
// larger y, then larger x, then smaller type index.
bool detection_precedes(const Detection& a, const Detection& b);

// Greedy score-ordered grouping. Each unclaimed, non-duplicate detection
// seeds a group; for every other type the partner is the nearest unclaimed
// detection within match_radius of seed + g_{seed,type}(seed).
std::vector<KeypointGroup> group_keypoints(std::span<const Detection> detections, const ChannelGrid& group_offsets,
                                           const GroupConfig& cfg, int scale_index = 0);

}  // namespace kgbox
