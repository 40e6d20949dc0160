#include "kgbox/keypoints.hpp"

namespace kgbox {

namespace {
constexpr std::array<std::string_view, kKeypointTypes> kNames = {"TL", "TR", "BL", "BR", "C"};
}

std::string_view keypoint_name(KeypointType t)
{
    return kNames[static_cast<std::size_t>(index_of(t))];
}

std::optional<KeypointType> parse_keypoint_name(std::string_view name)
{
    for (int i = 0; i < kKeypointTypes; ++i) {
        if (kNames[static_cast<std::size_t>(i)] == name) {
            return keypoint_from_index(i);
        }
    }
    return std::nullopt;
}

}  // namespace kgbox
