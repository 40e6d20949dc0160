#include "kgbox/encoder.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "kgbox/errors.hpp"

namespace kgbox {

namespace {

void validate_instances(std::span<const GtInstance> instances, GridShape shape)
{
    if (shape.height < 1 || shape.width < 1) {
        throw ValidationError("grid shape must be positive");
    }
    for (std::size_t i = 0; i < instances.size(); ++i) {
        if (!instances[i].box.valid()) {
            throw ValidationError("instance " + std::to_string(i) + " has a degenerate box");
        }
    }
}

// Invokes fn(instance, type, cell_x, cell_y, keypoint) for every owned cell.
template <typename Fn>
void for_each_owned_cell(std::span<const GtInstance> instances, const Ownership& own, Fn&& fn)
{
    const GridShape shape = own.shape;
    std::vector<KeypointSet> keypoints;
    keypoints.reserve(instances.size());
    for (const auto& inst : instances) {
        keypoints.push_back(keypoints_of_box(inst.box));
    }
    for (int t = 0; t < kKeypointTypes; ++t) {
        const auto& owner = own.owner[static_cast<std::size_t>(t)];
        for (int y = 0; y < shape.height; ++y) {
            for (int x = 0; x < shape.width; ++x) {
                const int i = owner[static_cast<std::size_t>(y) * shape.width + x];
                if (i >= 0) {
                    fn(i, t, x, y, keypoints[static_cast<std::size_t>(i)]);
                }
            }
        }
    }
}

}  // namespace

void require_valid(const DiscSpec& disc)
{
    if (!(disc.radius > 0.0) || !std::isfinite(disc.radius)) {
        throw ValidationError("disc radius must be positive and finite");
    }
}

KeypointSet keypoints_of_box(const BBox& box)
{
    require_valid(box);
    KeypointSet kp;
    kp[index_of(KeypointType::TL)] = {box.x_min, box.y_min};
    kp[index_of(KeypointType::TR)] = {box.x_max, box.y_min};
    kp[index_of(KeypointType::BL)] = {box.x_min, box.y_max};
    kp[index_of(KeypointType::BR)] = {box.x_max, box.y_max};
    kp[index_of(KeypointType::C)] = box.center();
    return kp;
}

Ownership compute_ownership(std::span<const GtInstance> instances, GridShape shape, const DiscSpec& disc)
{
    require_valid(disc);
    validate_instances(instances, shape);

    Ownership own{shape, {}};
    const double r = disc.radius;
    const double r2 = r * r;
    std::vector<double> best(shape.pixel_count());

    for (int t = 0; t < kKeypointTypes; ++t) {
        auto& owner = own.owner[static_cast<std::size_t>(t)];
        owner.assign(shape.pixel_count(), -1);
        std::fill(best.begin(), best.end(), std::numeric_limits<double>::infinity());

        for (std::size_t i = 0; i < instances.size(); ++i) {
            const Point2 k = keypoints_of_box(instances[i].box)[static_cast<std::size_t>(t)];
            const int x_lo = std::max(0, static_cast<int>(std::ceil(k.x - r)));
            const int x_hi = std::min(shape.width - 1, static_cast<int>(std::floor(k.x + r)));
            const int y_lo = std::max(0, static_cast<int>(std::ceil(k.y - r)));
            const int y_hi = std::min(shape.height - 1, static_cast<int>(std::floor(k.y + r)));
            for (int y = y_lo; y <= y_hi; ++y) {
                for (int x = x_lo; x <= x_hi; ++x) {
                    const double dx = x - k.x;
                    const double dy = y - k.y;
                    const double d2 = dx * dx + dy * dy;
                    const std::size_t cell = static_cast<std::size_t>(y) * shape.width + x;
                    // Strict '<' keeps the lower instance index on ties.
                    if (d2 <= r2 && d2 < best[cell]) {
                        best[cell] = d2;
                        owner[cell] = static_cast<int>(i);
                    }
                }
            }
        }
    }
    return own;
}

ChannelGrid encode_heatmap(std::span<const GtInstance> instances, GridShape shape, const DiscSpec& disc)
{
    return encode_targets(instances, shape, disc).heatmap;
}

ChannelGrid encode_single_offsets(std::span<const GtInstance> instances, GridShape shape, const DiscSpec& disc)
{
    return encode_targets(instances, shape, disc).single_offsets;
}

ChannelGrid encode_group_offsets(std::span<const GtInstance> instances, GridShape shape, const DiscSpec& disc)
{
    return encode_targets(instances, shape, disc).group_offsets;
}

TargetSet encode_targets(std::span<const GtInstance> instances, GridShape shape, const DiscSpec& disc)
{
    const Ownership own = compute_ownership(instances, shape, disc);
    TargetSet targets{ChannelGrid(kHeatmapChannels, shape), ChannelGrid(kSingleOffsetChannels, shape),
                      ChannelGrid(kGroupOffsetChannels, shape)};

    for_each_owned_cell(instances, own, [&](int, int t, int x, int y, const KeypointSet& kp) {
        const Point2 self = kp[static_cast<std::size_t>(t)];
        targets.heatmap.at(t, y, x) = 1.0f;
        targets.single_offsets.at(2 * t, y, x) = static_cast<float>(self.x - x);
        targets.single_offsets.at(2 * t + 1, y, x) = static_cast<float>(self.y - y);
        for (int l = 0; l < kKeypointTypes; ++l) {
            if (l == t) {
                continue;
            }
            const Point2 partner = kp[static_cast<std::size_t>(l)];
            const int p = pair_index(keypoint_from_index(t), keypoint_from_index(l));
            targets.group_offsets.at(2 * p, y, x) = static_cast<float>(partner.x - x);
            targets.group_offsets.at(2 * p + 1, y, x) = static_cast<float>(partner.y - y);
        }
    });
    return targets;
}

std::vector<GtInstance> scale_instances(std::span<const GtInstance> instances, int stride)
{
    if (stride < 1) {
        throw ValidationError("stride must be >= 1");
    }
    std::vector<GtInstance> out;
    out.reserve(instances.size());
    for (const auto& inst : instances) {
        GtInstance scaled{inst.box, std::nullopt};
        scaled.box.x_min /= stride;
        scaled.box.y_min /= stride;
        scaled.box.x_max /= stride;
        scaled.box.y_max /= stride;
        out.push_back(std::move(scaled));
    }
    return out;
}

}  // namespace kgbox
