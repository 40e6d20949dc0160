#include "kgbox/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

#include "kgbox/boxes.hpp"
#include "kgbox/errors.hpp"

namespace kgbox {

namespace {

void check_threshold(double t)
{
    if (!(t > 0.0 && t <= 1.0)) {
        throw ValidationError("IoU threshold must lie in (0, 1], got " + std::to_string(t));
    }
}

}  // namespace

std::size_t MatchResult::true_positives() const
{
    return static_cast<std::size_t>(std::count(true_positive.begin(), true_positive.end(), true));
}

MatchResult match_detections(std::span<const BBox> preds, std::span<const BBox> gts, double iou_threshold)
{
    check_threshold(iou_threshold);
    MatchResult result;
    result.true_positive.assign(preds.size(), false);
    result.matched_gt.assign(preds.size(), std::nullopt);
    result.matched_iou.assign(preds.size(), 0.0);
    result.ranking.resize(preds.size());
    std::iota(result.ranking.begin(), result.ranking.end(), std::size_t{0});
    std::stable_sort(result.ranking.begin(), result.ranking.end(),
                     [&](std::size_t a, std::size_t b) { return box_precedes(preds[a], preds[b]); });

    std::vector<bool> claimed(gts.size(), false);
    for (auto p : result.ranking) {
        std::optional<std::size_t> best;
        double best_iou = -1.0;
        for (std::size_t g = 0; g < gts.size(); ++g) {
            if (claimed[g]) {
                continue;
            }
            const double v = iou(preds[p], gts[g]);
            if (v > best_iou) {
                best_iou = v;
                best = g;
            }
        }
        if (best && best_iou >= iou_threshold) {
            claimed[*best] = true;
            result.true_positive[p] = true;
            result.matched_gt[p] = best;
            result.matched_iou[p] = best_iou;
        }
    }
    result.false_negatives = static_cast<std::size_t>(std::count(claimed.begin(), claimed.end(), false));
    return result;
}

std::vector<PrPoint> pr_curve_from_ranking(const std::vector<bool>& ranked_tp, std::size_t num_gt)
{
    std::vector<PrPoint> curve;
    curve.reserve(ranked_tp.size());
    std::size_t tp = 0;
    for (std::size_t i = 0; i < ranked_tp.size(); ++i) {
        tp += ranked_tp[i] ? 1 : 0;
        const double recall = num_gt == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(num_gt);
        curve.push_back({recall, static_cast<double>(tp) / static_cast<double>(i + 1)});
    }
    return curve;
}

double average_precision_from_ranking(const std::vector<bool>& ranked_tp, std::size_t num_gt)
{
    if (num_gt == 0) {
        return ranked_tp.empty() ? 1.0 : 0.0;
    }
    const auto curve = pr_curve_from_ranking(ranked_tp, num_gt);
    if (curve.empty()) {
        return 0.0;
    }
    // Precision envelope from the right, then integrate over recall steps.
    std::vector<double> envelope(curve.size());
    double running = 0.0;
    for (std::size_t i = curve.size(); i-- > 0;) {
        running = std::max(running, curve[i].precision);
        envelope[i] = running;
    }
    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (curve[i].recall > prev_recall) {
            ap += (curve[i].recall - prev_recall) * envelope[i];
            prev_recall = curve[i].recall;
        }
    }
    return ap;
}

double average_precision(std::span<const BBox> preds, std::span<const BBox> gts, double iou_threshold)
{
    const MatchResult m = match_detections(preds, gts, iou_threshold);
    std::vector<bool> ranked;
    ranked.reserve(m.ranking.size());
    for (auto p : m.ranking) {
        ranked.push_back(m.true_positive[p]);
    }
    return average_precision_from_ranking(ranked, gts.size());
}

double mean_matched_iou(std::span<const BBox> preds, std::span<const BBox> gts, double iou_threshold)
{
    const MatchResult m = match_detections(preds, gts, iou_threshold);
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t p = 0; p < preds.size(); ++p) {
        if (m.true_positive[p]) {
            sum += m.matched_iou[p];
            ++n;
        }
    }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

double mask_iou(const ChannelGrid& a, const ChannelGrid& b)
{
    if (a.channels() != 1 || b.channels() != 1 || a.shape() != b.shape()) {
        throw ValidationError("mask_iou requires two single-channel masks of equal shape");
    }
    std::size_t inter = 0;
    std::size_t uni = 0;
    const auto da = a.data();
    const auto db = b.data();
    for (std::size_t i = 0; i < da.size(); ++i) {
        const bool in_a = da[i] > 0.5f;
        const bool in_b = db[i] > 0.5f;
        inter += (in_a && in_b) ? 1 : 0;
        uni += (in_a || in_b) ? 1 : 0;
    }
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

const ThresholdReport& EvalReport::at(double threshold) const
{
    for (const auto& t : thresholds) {
        if (std::abs(t.threshold - threshold) < 1e-12) {
            return t;
        }
    }
    throw IndexError("no report for IoU threshold " + std::to_string(threshold));
}

EvalReport evaluate(std::span<const ImageDetections> images, std::span<const double> thresholds, EvalMode mode)
{
    EvalReport report;
    report.mode = mode;
    report.images = images.size();
    for (const auto& img : images) {
        report.num_gt += img.gts.size();
        report.num_pred += img.preds.size();
    }

    for (double threshold : thresholds) {
        check_threshold(threshold);
        ThresholdReport tr;
        tr.threshold = threshold;

        // (box, image, tp) for pooled ranking.
        std::vector<std::tuple<BBox, std::size_t, bool>> pooled;
        double iou_sum = 0.0;
        std::size_t matched = 0;
        double per_image_ap = 0.0;
        double per_image_iou = 0.0;

        for (std::size_t i = 0; i < images.size(); ++i) {
            const auto& img = images[i];
            const MatchResult m = match_detections(img.preds, img.gts, threshold);
            double img_iou_sum = 0.0;
            std::vector<bool> ranked;
            for (auto p : m.ranking) {
                ranked.push_back(m.true_positive[p]);
            }
            for (std::size_t p = 0; p < img.preds.size(); ++p) {
                pooled.emplace_back(img.preds[p], i, m.true_positive[p]);
                if (m.true_positive[p]) {
                    img_iou_sum += m.matched_iou[p];
                }
            }
            const std::size_t img_tp = m.true_positives();
            iou_sum += img_iou_sum;
            matched += img_tp;
            tr.true_positives += img_tp;
            tr.false_positives += img.preds.size() - img_tp;
            tr.false_negatives += m.false_negatives;
            per_image_ap += average_precision_from_ranking(ranked, img.gts.size());
            per_image_iou += img_tp == 0 ? 0.0 : img_iou_sum / static_cast<double>(img_tp);
        }

        std::stable_sort(pooled.begin(), pooled.end(), [](const auto& a, const auto& b) {
            if (box_precedes(std::get<0>(a), std::get<0>(b))) {
                return true;
            }
            if (box_precedes(std::get<0>(b), std::get<0>(a))) {
                return false;
            }
            return std::get<1>(a) < std::get<1>(b);
        });
        std::vector<bool> ranked;
        ranked.reserve(pooled.size());
        for (const auto& entry : pooled) {
            ranked.push_back(std::get<2>(entry));
        }
        tr.pr_curve = pr_curve_from_ranking(ranked, report.num_gt);

        if (mode == EvalMode::Pooled) {
            tr.ap = average_precision_from_ranking(ranked, report.num_gt);
            tr.mean_iou = matched == 0 ? 0.0 : iou_sum / static_cast<double>(matched);
        } else {
            const double n = images.empty() ? 1.0 : static_cast<double>(images.size());
            tr.ap = images.empty() ? 1.0 : per_image_ap / n;
            tr.mean_iou = per_image_iou / n;
        }
        report.thresholds.push_back(std::move(tr));
    }
    return report;
}

}  // namespace kgbox
