#include "kgbox/voting.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "kgbox/errors.hpp"

namespace kgbox {

namespace {

void splat(std::span<float> out, GridShape shape, double px, double py, double weight)
{
    const double fx0 = std::floor(px);
    const double fy0 = std::floor(py);
    const double fx = px - fx0;
    const double fy = py - fy0;
    // Skip votes that are wholly off-grid before converting to int.
    if (fx0 < -1.0 || fy0 < -1.0 || fx0 > shape.width || fy0 > shape.height) {
        return;
    }
    const int x0 = static_cast<int>(fx0);
    const int y0 = static_cast<int>(fy0);
    const int xs[2] = {x0, x0 + 1};
    const int ys[2] = {y0, y0 + 1};
    const double wx[2] = {1.0 - fx, fx};
    const double wy[2] = {1.0 - fy, fy};
    for (int j = 0; j < 2; ++j) {
        for (int i = 0; i < 2; ++i) {
            const double w = wx[i] * wy[j];
            if (w == 0.0 || !shape.contains(xs[i], ys[j])) {
                continue;
            }
            out[static_cast<std::size_t>(ys[j]) * shape.width + xs[i]] += static_cast<float>(weight * w);
        }
    }
}

}  // namespace

void require_valid(const PeakConfig& cfg)
{
    if (!(cfg.threshold > 0.0)) {
        throw ValidationError("peak threshold must be positive");
    }
    if (cfg.window < 3 || cfg.window % 2 == 0) {
        throw ValidationError("peak window must be odd and >= 3, got " + std::to_string(cfg.window));
    }
}

ScoreMap hough_vote(const ChannelGrid& heatmap, const ChannelGrid& single_offsets, const DiscSpec& disc)
{
    require_valid(disc);
    if (heatmap.channels() != kHeatmapChannels || single_offsets.channels() != kSingleOffsetChannels) {
        throw ValidationError("hough_vote expects 5 heatmap and 10 offset channels, got " +
                              std::to_string(heatmap.channels()) + " and " +
                              std::to_string(single_offsets.channels()));
    }
    if (heatmap.shape() != single_offsets.shape()) {
        throw ValidationError("heatmap and single offset shapes differ");
    }

    const GridShape shape = heatmap.shape();
    const double norm = 1.0 / (std::numbers::pi * disc.radius * disc.radius);
    ScoreMap result{ChannelGrid(kHeatmapChannels, shape), disc};

    for (int t = 0; t < kHeatmapChannels; ++t) {
        auto out = result.grid.channel(t);
        for (int y = 0; y < shape.height; ++y) {
            for (int x = 0; x < shape.width; ++x) {
                const float h = heatmap.at(t, y, x);
                if (h <= 0.0f) {
                    continue;
                }
                const double px = x + static_cast<double>(single_offsets.at(2 * t, y, x));
                const double py = y + static_cast<double>(single_offsets.at(2 * t + 1, y, x));
                splat(out, shape, px, py, h * norm);
            }
        }
    }
    return result;
}

std::vector<Detection> extract_peaks(const ScoreMap& score_map, const ChannelGrid& single_offsets,
                                     const PeakConfig& cfg)
{
    require_valid(cfg);
    const ChannelGrid& grid = score_map.grid;
    if (grid.channels() != kHeatmapChannels || single_offsets.channels() != kSingleOffsetChannels ||
        grid.shape() != single_offsets.shape()) {
        throw ValidationError("extract_peaks: score map and single offsets do not match");
    }

    const GridShape shape = grid.shape();
    const int half = cfg.window / 2;
    std::vector<Detection> detections;

    for (int t = 0; t < kHeatmapChannels; ++t) {
        for (int y = 0; y < shape.height; ++y) {
            for (int x = 0; x < shape.width; ++x) {
                const float v = grid.at(t, y, x);
                if (v < cfg.threshold) {
                    continue;
                }
                bool is_peak = true;
                for (int ny = std::max(0, y - half); is_peak && ny <= std::min(shape.height - 1, y + half); ++ny) {
                    for (int nx = std::max(0, x - half); nx <= std::min(shape.width - 1, x + half); ++nx) {
                        const float n = grid.at(t, ny, nx);
                        const bool earlier = ny < y || (ny == y && nx < x);
                        if (n > v || (n == v && earlier)) {
                            is_peak = false;
                            break;
                        }
                    }
                }
                if (!is_peak) {
                    continue;
                }
                Point2 pos{x + static_cast<double>(single_offsets.at(2 * t, y, x)),
                           y + static_cast<double>(single_offsets.at(2 * t + 1, y, x))};
                pos.x = std::clamp(pos.x, 0.0, static_cast<double>(shape.width - 1));
                pos.y = std::clamp(pos.y, 0.0, static_cast<double>(shape.height - 1));
                detections.push_back({keypoint_from_index(t), pos, v});
            }
        }
    }
    return detections;
}

}  // namespace kgbox
