#pragma once

#include <optional>
#include <span>
#include <vector>

#include "kgbox/bbox.hpp"
#include "kgbox/grid.hpp"
#include "kgbox/grouping.hpp"

namespace kgbox {

struct ScaleConfig {
    std::vector<int> strides{4, 8, 16, 32};
};

void require_valid(const ScaleConfig& cfg);

// True iff the keypoint types in `mask` pin down all four box edges: any
// three types, a corner diagonal (TL+BR, TR+BL), or the centre plus a corner.
bool is_minimal_valid_set(KeypointMask mask);

// Each edge is the mean of the evidence available for it; for example the
// left edge averages TL.x, BL.x, 2*C.x - TR.x and 2*C.x - BR.x over filled
// slots. Score is the mean member score clamped to [0, 1]. Returns nothing
// for insufficient sets or when the estimate is degenerate.
std::optional<BBox> box_from_group(const KeypointGroup& group);

BBox lift_to_image(const BBox& box, int stride);

// Greedy NMS. Order: score descending, then smaller x_min, then smaller y_min.
// A box is kept iff its IoU with every kept box is below the threshold.
std::vector<BBox> nms(std::span<const BBox> boxes, double iou_threshold);

// Lifts scale i by strides[i], concatenates, and applies nms.
std::vector<BBox> aggregate_scales(std::span<const std::vector<BBox>> per_scale_boxes, const ScaleConfig& scales,
                                   double nms_iou);

struct RoiCrop {
    ChannelGrid grid;
    // Inclusive cell range of the crop in the source grid.
    int x0 = 0;
    int y0 = 0;
    int x1 = 0;
    int y1 = 0;
};

// Cells floor(x_min - pad) .. ceil(x_max + pad), clamped to the grid.
RoiCrop crop_roi(const ChannelGrid& grid, const BBox& box, double pad);

// Ranking order shared by nms and evaluation.
bool box_precedes(const BBox& a, const BBox& b);

}  // namespace kgbox
