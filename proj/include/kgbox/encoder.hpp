#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "kgbox/bbox.hpp"
#include "kgbox/grid.hpp"
#include "kgbox/keypoints.hpp"

namespace kgbox {

struct DiscSpec {
    double radius = 5.0;
};

void require_valid(const DiscSpec& disc);

struct GtInstance {
    BBox box;
    std::optional<ChannelGrid> mask;  // one binary channel, scene-sized
};

// Training targets of one scale.
struct TargetSet {
    ChannelGrid heatmap;         // 5 channels
    ChannelGrid single_offsets;  // 10 channels: type t -> (2t, 2t+1) = (dx, dy)
    ChannelGrid group_offsets;   // 40 channels: pair_index(k, l) = p -> (2p, 2p+1)

    friend bool operator==(const TargetSet&, const TargetSet&) = default;
};

using KeypointSet = std::array<Point2, kKeypointTypes>;

// Corners and centre of a non-degenerate box, indexed by KeypointType.
KeypointSet keypoints_of_box(const BBox& box);

// For every keypoint type, the instance index that owns each cell (or -1).
// A cell belongs to the nearest same-type keypoint within the disc radius;
// equal distances go to the lower instance index.
struct Ownership {
    GridShape shape;
    std::array<std::vector<int>, kKeypointTypes> owner;

    int at(KeypointType t, int y, int x) const
    {
        return owner[static_cast<std::size_t>(index_of(t))][static_cast<std::size_t>(y) * shape.width + x];
    }
};

Ownership compute_ownership(std::span<const GtInstance> instances, GridShape shape, const DiscSpec& disc);

ChannelGrid encode_heatmap(std::span<const GtInstance> instances, GridShape shape, const DiscSpec& disc);
ChannelGrid encode_single_offsets(std::span<const GtInstance> instances, GridShape shape, const DiscSpec& disc);
ChannelGrid encode_group_offsets(std::span<const GtInstance> instances, GridShape shape, const DiscSpec& disc);

// All three targets from one ownership pass.
TargetSet encode_targets(std::span<const GtInstance> instances, GridShape shape, const DiscSpec& disc);

// Divides box coordinates by `stride` so a scene can be encoded at a coarser scale.
std::vector<GtInstance> scale_instances(std::span<const GtInstance> instances, int stride);

}  // namespace kgbox
