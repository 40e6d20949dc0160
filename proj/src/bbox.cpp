#include "kgbox/bbox.hpp"

#include <algorithm>
#include <cmath>

#include "kgbox/errors.hpp"

namespace kgbox {

bool BBox::valid() const
{
    return std::isfinite(x_min) && std::isfinite(y_min) && std::isfinite(x_max) && std::isfinite(y_max) &&
           std::isfinite(score) && x_min < x_max && y_min < y_max;
}

void require_valid(const BBox& box)
{
    if (!box.valid()) {
        throw ValidationError("degenerate or non-finite box (" + std::to_string(box.x_min) + ", " +
                              std::to_string(box.y_min) + ", " + std::to_string(box.x_max) + ", " +
                              std::to_string(box.y_max) + ")");
    }
}

double iou(const BBox& a, const BBox& b)
{
    const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
    const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
    if (iw <= 0.0 || ih <= 0.0) {
        return 0.0;
    }
    const double inter = iw * ih;
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? std::clamp(inter / uni, 0.0, 1.0) : 0.0;
}

}  // namespace kgbox
