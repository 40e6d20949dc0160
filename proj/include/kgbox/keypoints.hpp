#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace kgbox {

// Channel index of each keypoint type in the heatmap.
enum class KeypointType : std::uint8_t { TL = 0, TR = 1, BL = 2, BR = 3, C = 4 };

inline constexpr int kKeypointTypes = 5;
inline constexpr int kHeatmapChannels = kKeypointTypes;
inline constexpr int kSingleOffsetChannels = 2 * kKeypointTypes;
inline constexpr int kPairCount = kKeypointTypes * (kKeypointTypes - 1);
inline constexpr int kGroupOffsetChannels = 2 * kPairCount;

inline constexpr std::array<KeypointType, kKeypointTypes> kAllKeypointTypes = {
    KeypointType::TL, KeypointType::TR, KeypointType::BL, KeypointType::BR, KeypointType::C};

constexpr int index_of(KeypointType t) { return static_cast<int>(t); }
constexpr KeypointType keypoint_from_index(int i) { return static_cast<KeypointType>(i); }

std::string_view keypoint_name(KeypointType t);
std::optional<KeypointType> parse_keypoint_name(std::string_view name);

// Ordered pairs (k, l), k != l, enumerated lexicographically.
constexpr int pair_index(KeypointType from, KeypointType to)
{
    const int k = index_of(from);
    const int l = index_of(to);
    return k * (kKeypointTypes - 1) + (l < k ? l : l - 1);
}

// Set of keypoint types as a 5-bit mask.
class KeypointMask {
public:
    constexpr KeypointMask() = default;
    constexpr explicit KeypointMask(std::uint8_t bits)
        : bits_(bits & 0x1F)
    {
    }
    constexpr KeypointMask(std::initializer_list<KeypointType> types)
    {
        for (auto t : types) {
            set(t);
        }
    }

    static constexpr KeypointMask all() { return KeypointMask(0x1F); }

    constexpr bool contains(KeypointType t) const { return (bits_ >> index_of(t)) & 1u; }
    constexpr void set(KeypointType t) { bits_ = static_cast<std::uint8_t>(bits_ | (1u << index_of(t))); }
    constexpr void reset(KeypointType t) { bits_ = static_cast<std::uint8_t>(bits_ & ~(1u << index_of(t))); }
    constexpr int count() const { return __builtin_popcount(bits_); }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr std::uint8_t bits() const { return bits_; }
    constexpr KeypointMask complement() const { return KeypointMask(static_cast<std::uint8_t>(~bits_)); }

    friend constexpr bool operator==(KeypointMask, KeypointMask) = default;

private:
    std::uint8_t bits_ = 0;
};

}  // namespace kgbox
