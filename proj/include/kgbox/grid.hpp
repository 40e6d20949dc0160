#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kgbox {

struct GridShape {
    int height = 1;
    int width = 1;

    std::size_t pixel_count() const { return static_cast<std::size_t>(height) * static_cast<std::size_t>(width); }
    bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }

    friend bool operator==(const GridShape&, const GridShape&) = default;
};

// Continuous pixel coordinate. Origin is the centre of the top-left pixel,
// +x runs along columns (right), +y along rows (down).
struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
double distance(Point2 a, Point2 b);

// Multi-channel float grid stored channel-major, then row-major.
class ChannelGrid {
public:
    ChannelGrid() = default;

    // Zero-filled grid. Throws ValidationError on non-positive dimensions.
    ChannelGrid(int channels, GridShape shape);

    // Takes ownership of `data`; rejects length mismatch and non-finite values.
    ChannelGrid(int channels, GridShape shape, std::vector<float> data);

    int channels() const { return channels_; }
    GridShape shape() const { return shape_; }
    int height() const { return shape_.height; }
    int width() const { return shape_.width; }

    float at(int c, int y, int x) const { return data_[index(c, y, x)]; }
    float& at(int c, int y, int x) { return data_[index(c, y, x)]; }

    // Bounds-checked variant of at(); throws IndexError.
    float checked_at(int c, int y, int x) const;

    std::span<const float> channel(int c) const;
    std::span<float> channel(int c);

    std::span<const float> data() const { return data_; }

    friend bool operator==(const ChannelGrid&, const ChannelGrid&) = default;

private:
    std::size_t index(int c, int y, int x) const
    {
        return (static_cast<std::size_t>(c) * shape_.height + static_cast<std::size_t>(y)) * shape_.width +
               static_cast<std::size_t>(x);
    }

    int channels_ = 0;
    GridShape shape_{};
    std::vector<float> data_;
};

// Bilinear interpolation of one channel at a continuous position. Positions
// outside [0, w-1] x [0, h-1] are clamped to the border.
float bilinear_sample(const ChannelGrid& grid, int channel, Point2 p);

}  // namespace kgbox
