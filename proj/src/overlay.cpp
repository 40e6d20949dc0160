#include "kgbox/overlay.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace kgbox {

namespace {

class Canvas {
public:
    explicit Canvas(GridShape shape)
        : shape_(shape)
        , pixels_(shape.pixel_count() * 3, 0)
    {
    }

    void put(int x, int y, Rgb c)
    {
        if (!shape_.contains(x, y)) {
            return;
        }
        const std::size_t i = (static_cast<std::size_t>(y) * shape_.width + x) * 3;
        pixels_[i] = c.r;
        pixels_[i + 1] = c.g;
        pixels_[i + 2] = c.b;
    }

    std::string to_ppm() const
    {
        std::string out = "P6\n" + std::to_string(shape_.width) + " " + std::to_string(shape_.height) + "\n255\n";
        out.append(reinterpret_cast<const char*>(pixels_.data()), pixels_.size());
        return out;
    }

private:
    GridShape shape_;
    std::vector<unsigned char> pixels_;
};

}  // namespace

Rgb keypoint_color(KeypointType t)
{
    static constexpr std::array<Rgb, kKeypointTypes> colors = {{
        {255, 0, 0},      // TL red
        {0, 0, 255},      // TR blue
        {255, 105, 180},  // BL pink
        {0, 255, 0},      // BR green
        {255, 255, 0},    // C yellow
    }};
    return colors[static_cast<std::size_t>(index_of(t))];
}

std::string render_overlay(GridShape image_shape, std::span<const BBox> boxes, std::span<const OverlayLayer> layers)
{
    Canvas canvas(image_shape);
    const Rgb white{255, 255, 255};
    for (const auto& b : boxes) {
        const int x0 = static_cast<int>(std::lround(b.x_min));
        const int x1 = static_cast<int>(std::lround(b.x_max));
        const int y0 = static_cast<int>(std::lround(b.y_min));
        const int y1 = static_cast<int>(std::lround(b.y_max));
        for (int x = x0; x <= x1; ++x) {
            canvas.put(x, y0, white);
            canvas.put(x, y1, white);
        }
        for (int y = y0; y <= y1; ++y) {
            canvas.put(x0, y, white);
            canvas.put(x1, y, white);
        }
    }
    for (const auto& layer : layers) {
        for (const auto& g : layer.groups) {
            for (auto t : kAllKeypointTypes) {
                const auto& d = g.slot(t);
                if (!d) {
                    continue;
                }
                const int cx = static_cast<int>(std::lround(d->position.x * layer.stride));
                const int cy = static_cast<int>(std::lround(d->position.y * layer.stride));
                const Rgb c = keypoint_color(t);
                for (int k = -1; k <= 1; ++k) {
                    canvas.put(cx + k, cy, c);
                    canvas.put(cx, cy + k, c);
                }
            }
        }
    }
    return canvas.to_ppm();
}

}  // namespace kgbox
