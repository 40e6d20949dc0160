#include "kgbox/boxes.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kgbox/errors.hpp"

namespace kgbox {

namespace {

struct EdgeEvidence {
    double sum = 0.0;
    int count = 0;

    void add(double v)
    {
        sum += v;
        ++count;
    }
    double mean() const { return sum / count; }
};

}  // namespace

void require_valid(const ScaleConfig& cfg)
{
    if (cfg.strides.empty()) {
        throw ValidationError("at least one stride is required");
    }
    for (std::size_t i = 0; i < cfg.strides.size(); ++i) {
        if (cfg.strides[i] < 1 || (i > 0 && cfg.strides[i] <= cfg.strides[i - 1])) {
            throw ValidationError("strides must be strictly increasing positive integers");
        }
    }
}

bool is_minimal_valid_set(KeypointMask mask)
{
    using K = KeypointType;
    if (mask.count() >= 3) {
        return true;
    }
    if (mask == KeypointMask{K::TL, K::BR} || mask == KeypointMask{K::TR, K::BL}) {
        return true;
    }
    return mask.count() == 2 && mask.contains(K::C);
}

std::optional<BBox> box_from_group(const KeypointGroup& group)
{
    using K = KeypointType;
    if (!is_minimal_valid_set(group.filled())) {
        return std::nullopt;
    }

    EdgeEvidence left, top, right, bottom;
    double score_sum = 0.0;
    int members = 0;
    for (auto t : kAllKeypointTypes) {
        if (const auto& d = group.slot(t)) {
            score_sum += d->score;
            ++members;
        }
    }

    const auto& tl = group.slot(K::TL);
    const auto& tr = group.slot(K::TR);
    const auto& bl = group.slot(K::BL);
    const auto& br = group.slot(K::BR);
    const auto& c = group.slot(K::C);

    if (tl) {
        left.add(tl->position.x);
        top.add(tl->position.y);
    }
    if (tr) {
        right.add(tr->position.x);
        top.add(tr->position.y);
    }
    if (bl) {
        left.add(bl->position.x);
        bottom.add(bl->position.y);
    }
    if (br) {
        right.add(br->position.x);
        bottom.add(br->position.y);
    }
    if (c) {
        // Reflect each corner through the centre onto the opposite edges.
        const Point2 cp = c->position;
        if (tl) {
            right.add(2.0 * cp.x - tl->position.x);
            bottom.add(2.0 * cp.y - tl->position.y);
        }
        if (tr) {
            left.add(2.0 * cp.x - tr->position.x);
            bottom.add(2.0 * cp.y - tr->position.y);
        }
        if (bl) {
            right.add(2.0 * cp.x - bl->position.x);
            top.add(2.0 * cp.y - bl->position.y);
        }
        if (br) {
            left.add(2.0 * cp.x - br->position.x);
            top.add(2.0 * cp.y - br->position.y);
        }
    }

    if (left.count == 0 || top.count == 0 || right.count == 0 || bottom.count == 0) {
        return std::nullopt;
    }
    BBox box{left.mean(), top.mean(), right.mean(), bottom.mean(),
             std::clamp(score_sum / members, 0.0, 1.0)};
    if (!box.valid()) {
        return std::nullopt;
    }
    return box;
}

BBox lift_to_image(const BBox& box, int stride)
{
    if (stride < 1) {
        throw ValidationError("stride must be >= 1");
    }
    return {box.x_min * stride, box.y_min * stride, box.x_max * stride, box.y_max * stride, box.score};
}

bool box_precedes(const BBox& a, const BBox& b)
{
    if (a.score != b.score) {
        return a.score > b.score;
    }
    if (a.x_min != b.x_min) {
        return a.x_min < b.x_min;
    }
    return a.y_min < b.y_min;
}

std::vector<BBox> nms(std::span<const BBox> boxes, double iou_threshold)
{
    if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
        throw ValidationError("NMS IoU threshold must lie in (0, 1]");
    }
    std::vector<BBox> sorted(boxes.begin(), boxes.end());
    std::stable_sort(sorted.begin(), sorted.end(), box_precedes);

    std::vector<BBox> kept;
    for (const auto& b : sorted) {
        const bool suppressed =
            std::any_of(kept.begin(), kept.end(), [&](const BBox& k) { return iou(b, k) >= iou_threshold; });
        if (!suppressed) {
            kept.push_back(b);
        }
    }
    return kept;
}

std::vector<BBox> aggregate_scales(std::span<const std::vector<BBox>> per_scale_boxes, const ScaleConfig& scales,
                                   double nms_iou)
{
    require_valid(scales);
    if (per_scale_boxes.size() != scales.strides.size()) {
        throw ValidationError("got box lists for " + std::to_string(per_scale_boxes.size()) + " scales but " +
                              std::to_string(scales.strides.size()) + " strides are configured");
    }
    std::vector<BBox> lifted;
    for (std::size_t i = 0; i < per_scale_boxes.size(); ++i) {
        for (const auto& b : per_scale_boxes[i]) {
            lifted.push_back(lift_to_image(b, scales.strides[i]));
        }
    }
    return nms(lifted, nms_iou);
}

RoiCrop crop_roi(const ChannelGrid& grid, const BBox& box, double pad)
{
    require_valid(box);
    if (!(pad >= 0.0)) {
        throw ValidationError("ROI pad must be non-negative");
    }
    const double fx0 = std::floor(box.x_min - pad);
    const double fy0 = std::floor(box.y_min - pad);
    const double fx1 = std::ceil(box.x_max + pad);
    const double fy1 = std::ceil(box.y_max + pad);
    if (fx1 < 0 || fy1 < 0 || fx0 > grid.width() - 1 || fy0 > grid.height() - 1) {
        throw ValidationError("ROI lies entirely outside the grid");
    }
    RoiCrop crop;
    crop.x0 = static_cast<int>(std::max(fx0, 0.0));
    crop.y0 = static_cast<int>(std::max(fy0, 0.0));
    crop.x1 = static_cast<int>(std::min(fx1, static_cast<double>(grid.width() - 1)));
    crop.y1 = static_cast<int>(std::min(fy1, static_cast<double>(grid.height() - 1)));

    const GridShape shape{crop.y1 - crop.y0 + 1, crop.x1 - crop.x0 + 1};
    crop.grid = ChannelGrid(grid.channels(), shape);
    for (int c = 0; c < grid.channels(); ++c) {
        for (int y = 0; y < shape.height; ++y) {
            for (int x = 0; x < shape.width; ++x) {
                crop.grid.at(c, y, x) = grid.at(c, crop.y0 + y, crop.x0 + x);
            }
        }
    }
    return crop;
}

}  // namespace kgbox
