#pragma once

#include <span>
#include <string>

#include "kgbox/bbox.hpp"
#include "kgbox/grouping.hpp"

namespace kgbox {

struct Rgb {
    unsigned char r = 0, g = 0, b = 0;
};

// TL red, TR blue, BL pink, BR green, C yellow.
Rgb keypoint_color(KeypointType t);

struct OverlayLayer {
    std::span<const KeypointGroup> groups;
    int stride = 1;
};

// Binary PPM (P6) on a black canvas: boxes as 1-px white rectangles,
// grouped keypoints as 3-px crosses, all in image coordinates.
std::string render_overlay(GridShape image_shape, std::span<const BBox> boxes, std::span<const OverlayLayer> layers);

}  // namespace kgbox
