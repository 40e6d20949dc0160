#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "kgbox/bbox.hpp"
#include "kgbox/grid.hpp"

namespace kgbox {

struct MatchResult {
    // Indexed like the input predictions.
    std::vector<bool> true_positive;
    std::vector<std::optional<std::size_t>> matched_gt;
    std::vector<double> matched_iou;
    // Prediction indices in ranking order.
    std::vector<std::size_t> ranking;
    std::size_t false_negatives = 0;

    std::size_t true_positives() const;
};

// Predictions are visited in ranking order (box_precedes); each claims the
// unclaimed ground truth of highest IoU when that IoU reaches the threshold.
MatchResult match_detections(std::span<const BBox> preds, std::span<const BBox> gts, double iou_threshold);

struct PrPoint {
    double recall = 0.0;
    double precision = 0.0;
};

// Area under the max-interpolated precision/recall curve for a ranked list
// of TP flags. 1 when there is nothing to find and nothing was predicted.
double average_precision_from_ranking(const std::vector<bool>& ranked_tp, std::size_t num_gt);
std::vector<PrPoint> pr_curve_from_ranking(const std::vector<bool>& ranked_tp, std::size_t num_gt);

double average_precision(std::span<const BBox> preds, std::span<const BBox> gts, double iou_threshold);

// Mean IoU over matched pairs; 0 when nothing matched.
double mean_matched_iou(std::span<const BBox> preds, std::span<const BBox> gts, double iou_threshold);

// |a and b| / |a or b| over binary single-channel masks; 1 when both are empty.
double mask_iou(const ChannelGrid& a, const ChannelGrid& b);

struct ImageDetections {
    std::vector<BBox> preds;
    std::vector<BBox> gts;
};

enum class EvalMode { Pooled, PerImage };

struct ThresholdReport {
    double threshold = 0.5;
    double ap = 0.0;
    double mean_iou = 0.0;
    std::size_t true_positives = 0;
    std::size_t false_positives = 0;
    std::size_t false_negatives = 0;
    std::vector<PrPoint> pr_curve;  // pooled over all images
};

struct EvalReport {
    EvalMode mode = EvalMode::Pooled;
    std::size_t images = 0;
    std::size_t num_gt = 0;
    std::size_t num_pred = 0;
    std::vector<ThresholdReport> thresholds;

    const ThresholdReport& at(double threshold) const;
};

EvalReport evaluate(std::span<const ImageDetections> images, std::span<const double> thresholds,
                    EvalMode mode = EvalMode::Pooled);

}  // namespace kgbox
