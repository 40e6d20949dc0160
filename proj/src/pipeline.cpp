#include "kgbox/pipeline.hpp"

#include <string>

#include "kgbox/errors.hpp"

namespace kgbox {

GroupConfig PipelineConfig::group_config() const
{
    return {match_radius.value_or(disc.radius), duplicate_radius.value_or(disc.radius)};
}

void require_valid(const PipelineConfig& cfg)
{
    require_valid(cfg.disc);
    require_valid(cfg.peaks);
    require_valid(cfg.group_config());
    require_valid(cfg.scales);
    if (!(cfg.nms_iou > 0.0 && cfg.nms_iou <= 1.0)) {
        throw ValidationError("NMS IoU threshold must lie in (0, 1]");
    }
    for (double t : cfg.eval_thresholds) {
        if (!(t > 0.0 && t <= 1.0)) {
            throw ValidationError("evaluation thresholds must lie in (0, 1]");
        }
    }
}

ScaleDecode decode_scale(const TargetSet& maps, const PipelineConfig& cfg, int scale_index)
{
    const GridShape shape = maps.heatmap.shape();
    if (maps.single_offsets.shape() != shape || maps.group_offsets.shape() != shape) {
        throw ValidationError("scale " + std::to_string(scale_index) + ": heatmap and offset maps differ in shape");
    }
    if (maps.group_offsets.channels() != kGroupOffsetChannels) {
        throw ValidationError("scale " + std::to_string(scale_index) + ": group offsets must have 40 channels");
    }
    ScaleDecode out;
    const ScoreMap score = hough_vote(maps.heatmap, maps.single_offsets, cfg.disc);
    out.detections = extract_peaks(score, maps.single_offsets, cfg.peaks);
    out.groups = group_keypoints(out.detections, maps.group_offsets, cfg.group_config(), scale_index);
    for (const auto& g : out.groups) {
        if (auto box = box_from_group(g)) {
            out.boxes.push_back(*box);
        }
    }
    return out;
}

DecodeResult decode(std::span<const TargetSet> per_scale, const PipelineConfig& cfg)
{
    require_valid(cfg);
    if (per_scale.size() != cfg.scales.strides.size()) {
        throw ValidationError("got maps for " + std::to_string(per_scale.size()) + " scales but " +
                              std::to_string(cfg.scales.strides.size()) + " strides are configured");
    }
    DecodeResult result;
    std::vector<std::vector<BBox>> boxes;
    for (std::size_t i = 0; i < per_scale.size(); ++i) {
        result.scales.push_back(decode_scale(per_scale[i], cfg, static_cast<int>(i)));
        boxes.push_back(result.scales.back().boxes);
    }
    result.boxes = aggregate_scales(boxes, cfg.scales, cfg.nms_iou);
    return result;
}

}  // namespace kgbox
