#pragma once

#include "kgbox/grid.hpp"

namespace kgbox {

// Axis-aligned box in continuous pixel coordinates.
struct BBox {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;
    double score = 1.0;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double area() const { return width() * height(); }
    Point2 center() const { return {(x_min + x_max) / 2.0, (y_min + y_max) / 2.0}; }

    // x_min < x_max, y_min < y_max, all fields finite.
    bool valid() const;

    friend bool operator==(const BBox&, const BBox&) = default;
};

// Throws ValidationError unless box.valid().
void require_valid(const BBox& box);

// Intersection over union; 0 for disjoint boxes.
double iou(const BBox& a, const BBox& b);

}  // namespace kgbox
