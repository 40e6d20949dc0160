#pragma once

#include <vector>

#include "kgbox/encoder.hpp"
#include "kgbox/grid.hpp"
#include "kgbox/keypoints.hpp"

namespace kgbox {

// Voted keypoint confidence h'(x), one channel per keypoint type.
struct ScoreMap {
    ChannelGrid grid;
    DiscSpec disc;
};

struct Detection {
    KeypointType kind = KeypointType::TL;
    Point2 position;  // sub-pixel, feature-map units
    float score = 0.0f;

    friend bool operator==(const Detection&, const Detection&) = default;
};

struct PeakConfig {
    double threshold = 0.004;
    int window = 3;  // odd, >= 3
};

void require_valid(const PeakConfig& cfg);

// Every cell x_i with h(x_i) > 0 casts weight h(x_i) / (pi r^2) at x_i + s(x_i),
// splatted onto the four surrounding cells with bilinear weights. Splat
// corners outside the grid are dropped. Cells are visited in row-major order.
ScoreMap hough_vote(const ChannelGrid& heatmap, const ChannelGrid& single_offsets, const DiscSpec& disc);

// Cells that reach the threshold and are the maximum of their window. Among
// equal values in a window the smallest (y, x) wins. Positions are refined
// with the single offset stored at the peak cell.
std::vector<Detection> extract_peaks(const ScoreMap& score_map, const ChannelGrid& single_offsets,
                                     const PeakConfig& cfg);

}  // namespace kgbox
