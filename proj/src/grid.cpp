#include "kgbox/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kgbox/errors.hpp"

namespace kgbox {

namespace {

void check_dimensions(int channels, GridShape shape)
{
    if (channels < 1 || shape.height < 1 || shape.width < 1) {
        throw ValidationError("grid dimensions must be positive, got c=" + std::to_string(channels) +
                              " h=" + std::to_string(shape.height) + " w=" + std::to_string(shape.width));
    }
}

}  // namespace

double distance(Point2 a, Point2 b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

ChannelGrid::ChannelGrid(int channels, GridShape shape)
    : channels_(channels)
    , shape_(shape)
{
    check_dimensions(channels, shape);
    data_.assign(static_cast<std::size_t>(channels) * shape.pixel_count(), 0.0f);
}

ChannelGrid::ChannelGrid(int channels, GridShape shape, std::vector<float> data)
    : channels_(channels)
    , shape_(shape)
    , data_(std::move(data))
{
    check_dimensions(channels, shape);
    const std::size_t expected = static_cast<std::size_t>(channels) * shape.pixel_count();
    if (data_.size() != expected) {
        throw ValidationError("grid data length " + std::to_string(data_.size()) + " does not match " +
                              std::to_string(expected));
    }
    const auto bad = std::find_if(data_.begin(), data_.end(), [](float v) { return !std::isfinite(v); });
    if (bad != data_.end()) {
        throw ValidationError("grid contains a non-finite value at flat index " +
                              std::to_string(std::distance(data_.begin(), bad)));
    }
}

float ChannelGrid::checked_at(int c, int y, int x) const
{
    if (c < 0 || c >= channels_ || !shape_.contains(x, y)) {
        throw IndexError("grid index (c=" + std::to_string(c) + ", y=" + std::to_string(y) +
                         ", x=" + std::to_string(x) + ") out of range");
    }
    return at(c, y, x);
}

std::span<const float> ChannelGrid::channel(int c) const
{
    if (c < 0 || c >= channels_) {
        throw IndexError("channel " + std::to_string(c) + " out of range [0, " + std::to_string(channels_) + ")");
    }
    return std::span<const float>(data_).subspan(static_cast<std::size_t>(c) * shape_.pixel_count(),
                                                 shape_.pixel_count());
}

std::span<float> ChannelGrid::channel(int c)
{
    if (c < 0 || c >= channels_) {
        throw IndexError("channel " + std::to_string(c) + " out of range [0, " + std::to_string(channels_) + ")");
    }
    return std::span<float>(data_).subspan(static_cast<std::size_t>(c) * shape_.pixel_count(),
                                           shape_.pixel_count());
}

float bilinear_sample(const ChannelGrid& grid, int channel, Point2 p)
{
    if (channel < 0 || channel >= grid.channels()) {
        throw IndexError("channel " + std::to_string(channel) + " out of range [0, " +
                         std::to_string(grid.channels()) + ")");
    }
    const double x = std::clamp(p.x, 0.0, static_cast<double>(grid.width() - 1));
    const double y = std::clamp(p.y, 0.0, static_cast<double>(grid.height() - 1));

    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, grid.width() - 1);
    const int y1 = std::min(y0 + 1, grid.height() - 1);
    const double fx = x - x0;
    const double fy = y - y0;

    const double top = (1.0 - fx) * grid.at(channel, y0, x0) + fx * grid.at(channel, y0, x1);
    const double bottom = (1.0 - fx) * grid.at(channel, y1, x0) + fx * grid.at(channel, y1, x1);
    return static_cast<float>((1.0 - fy) * top + fy * bottom);
}

}  // namespace kgbox
