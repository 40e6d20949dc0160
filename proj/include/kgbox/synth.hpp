#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "kgbox/encoder.hpp"
#include "kgbox/keypoints.hpp"

namespace kgbox {

struct SceneSpec {
    GridShape shape{512, 512};
    int min_instances = 5;
    int max_instances = 15;
    double min_box_size = 20.0;
    double max_box_size = 120.0;
    // Minimum distance between same-type keypoints of different instances.
    double min_keypoint_separation = 12.0;
    // Pairwise ground-truth IoU must stay strictly below this.
    double max_pairwise_iou = 0.5;
    // Box coordinates are multiples of this step.
    double coordinate_step = 1.0;
    bool with_masks = false;
    int attempts_per_instance = 1000;
    std::uint64_t seed = 0;
};

void require_valid(const SceneSpec& spec);

// Rejection-samples boxes inside the grid. Deterministic per seed; throws
// GenerationError when an instance cannot be placed within the attempt budget.
std::vector<GtInstance> generate_scene(const SceneSpec& spec);

// Filled-rectangle mask covering cells ceil(min) .. floor(max).
ChannelGrid rectangle_mask(const BBox& box, GridShape shape);

struct Perturbation {
    // Independent per-type drop probability, drawn per instance.
    std::array<double, kKeypointTypes> drop_probability{};
    // Dropped for every instance.
    KeypointMask drop_types;
    // Number of distinct types dropped uniformly at random per instance.
    int drop_random_types = 0;
    // Explicit per-instance drops, keyed by instance index.
    std::map<std::size_t, KeypointMask> drop_for_instance;
    double offset_noise_sigma = 0.0;
    double heatmap_flip_rate = 0.0;
    std::uint64_t seed = 0;
};

void require_valid(const Perturbation& p);

// Union of every dropout rule for one instance.
KeypointMask dropped_keypoints(const Perturbation& p, std::size_t instance);

// Dropout zeroes the owned disc cells (heatmap and offsets) of each dropped
// keypoint; Gaussian noise is added to single and group offsets inside the
// surviving discs; flips set random heatmap cells to 1.
TargetSet perturb_targets(const TargetSet& targets, std::span<const GtInstance> instances, const DiscSpec& disc,
                          const Perturbation& perturbation);

}  // namespace kgbox
