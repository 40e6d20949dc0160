#include "kgbox/grouping.hpp"

#include <algorithm>
#include <numeric>

#include "kgbox/errors.hpp"

namespace kgbox {

KeypointMask KeypointGroup::filled() const
{
    KeypointMask mask;
    for (auto t : kAllKeypointTypes) {
        if (slot(t)) {
            mask.set(t);
        }
    }
    return mask;
}

void require_valid(const GroupConfig& cfg)
{
    if (!(cfg.match_radius > 0.0) || !(cfg.duplicate_radius > 0.0)) {
        throw ValidationError("group match and duplicate radii must be positive");
    }
}

bool detection_precedes(const Detection& a, const Detection& b)
{
    if (a.score != b.score) {
        return a.score > b.score;
    }
    if (a.position.y != b.position.y) {
        return a.position.y > b.position.y;
    }
    if (a.position.x != b.position.x) {
        return a.position.x > b.position.x;
    }
    return index_of(a.kind) < index_of(b.kind);
}

std::vector<KeypointGroup> group_keypoints(std::span<const Detection> detections, const ChannelGrid& group_offsets,
                                           const GroupConfig& cfg, int scale_index)
{
    require_valid(cfg);
    if (group_offsets.channels() != kGroupOffsetChannels) {
        throw ValidationError("group offsets must have 40 channels");
    }
    for (const auto& d : detections) {
        if (d.position.x < 0 || d.position.y < 0 || d.position.x > group_offsets.width() - 1 ||
            d.position.y > group_offsets.height() - 1) {
            throw ValidationError("detection lies outside the group offset grid");
        }
    }

    std::vector<std::size_t> order(detections.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return detection_precedes(detections[a], detections[b]); });

    // Same order, so partner search and ties are independent of input order.
    std::vector<Detection> sorted;
    sorted.reserve(order.size());
    for (auto i : order) {
        sorted.push_back(detections[i]);
    }

    std::vector<bool> consumed(sorted.size(), false);
    std::vector<KeypointGroup> groups;
    std::array<std::vector<Point2>, kKeypointTypes> grouped;

    for (std::size_t s = 0; s < sorted.size(); ++s) {
        if (consumed[s]) {
            continue;
        }
        consumed[s] = true;
        const Detection& seed = sorted[s];
        const int k = index_of(seed.kind);

        const auto& same_type = grouped[static_cast<std::size_t>(k)];
        const bool duplicate = std::any_of(same_type.begin(), same_type.end(), [&](Point2 p) {
            return distance(p, seed.position) <= cfg.duplicate_radius;
        });
        if (duplicate) {
            continue;
        }

        KeypointGroup group;
        group.scale_index = scale_index;
        group.slot(seed.kind) = seed;

        for (int l = 0; l < kKeypointTypes; ++l) {
            if (l == k) {
                continue;
            }
            const int p = pair_index(seed.kind, keypoint_from_index(l));
            const Point2 predicted{seed.position.x + bilinear_sample(group_offsets, 2 * p, seed.position),
                                   seed.position.y + bilinear_sample(group_offsets, 2 * p + 1, seed.position)};

            std::optional<std::size_t> best;
            double best_distance = cfg.match_radius;
            for (std::size_t c = s + 1; c < sorted.size(); ++c) {
                if (consumed[c] || index_of(sorted[c].kind) != l) {
                    continue;
                }
                const double d = distance(sorted[c].position, predicted);
                // Strict '<' after the first hit keeps the earlier candidate in queue order on ties.
                if (d < best_distance || (!best && d == best_distance)) {
                    best = c;
                    best_distance = d;
                }
            }
            if (best) {
                consumed[*best] = true;
                group.slot(keypoint_from_index(l)) = sorted[*best];
            }
        }

        for (auto t : kAllKeypointTypes) {
            if (const auto& d = group.slot(t)) {
                grouped[static_cast<std::size_t>(index_of(t))].push_back(d->position);
            }
        }
        groups.push_back(std::move(group));
    }
    return groups;
}

}  // namespace kgbox
