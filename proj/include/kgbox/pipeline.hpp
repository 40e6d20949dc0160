#pragma once

#include <optional>
#include <span>
#include <vector>

#include "kgbox/boxes.hpp"
#include "kgbox/encoder.hpp"
#include "kgbox/grouping.hpp"
#include "kgbox/voting.hpp"

namespace kgbox {

struct PipelineConfig {
    DiscSpec disc;
    PeakConfig peaks;
    // Both radii default to the disc radius.
    std::optional<double> match_radius;
    std::optional<double> duplicate_radius;
    ScaleConfig scales;
    double nms_iou = 0.5;
    std::vector<double> eval_thresholds{0.5, 0.7};

    GroupConfig group_config() const;
};

void require_valid(const PipelineConfig& cfg);

struct ScaleDecode {
    std::vector<Detection> detections;
    std::vector<KeypointGroup> groups;
    std::vector<BBox> boxes;  // feature-map coordinates
};

// vote -> peaks -> group -> box for one scale.
ScaleDecode decode_scale(const TargetSet& maps, const PipelineConfig& cfg, int scale_index);

struct DecodeResult {
    std::vector<ScaleDecode> scales;
    std::vector<BBox> boxes;  // image coordinates, after cross-scale NMS
};

// One map set per configured stride, finest first.
DecodeResult decode(std::span<const TargetSet> per_scale, const PipelineConfig& cfg);

}  // namespace kgbox
