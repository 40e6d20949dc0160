#include "kgbox/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "kgbox/errors.hpp"
#include "kgbox/random.hpp"

namespace kgbox {

namespace {

enum StreamTag : std::uint64_t {
    kCountStream = 1,
    kBoxStream = 2,
    kDropProbStream = 3,
    kDropChoiceStream = 4,
    kNoiseStream = 5,
    kFlipStream = 6,
};

double quantize(double v, double step)
{
    return std::floor(v / step) * step;
}

bool separated(const KeypointSet& a, const KeypointSet& b, double min_separation)
{
    for (std::size_t t = 0; t < a.size(); ++t) {
        if (distance(a[t], b[t]) < min_separation) {
            return false;
        }
    }
    return true;
}

}  // namespace

void require_valid(const SceneSpec& spec)
{
    if (spec.shape.height < 1 || spec.shape.width < 1) {
        throw ValidationError("scene shape must be positive");
    }
    if (spec.min_instances < 0 || spec.max_instances < spec.min_instances) {
        throw ValidationError("instance count range is empty or negative");
    }
    if (!(spec.min_box_size > 0.0) || spec.max_box_size < spec.min_box_size) {
        throw ValidationError("box size range must be positive and non-empty");
    }
    if (spec.max_box_size > std::min(spec.shape.width, spec.shape.height) - 1) {
        throw ValidationError("maximum box size does not fit inside the scene");
    }
    if (!(spec.min_keypoint_separation >= 0.0)) {
        throw ValidationError("keypoint separation must be non-negative");
    }
    if (!(spec.max_pairwise_iou > 0.0 && spec.max_pairwise_iou <= 1.0)) {
        throw ValidationError("max pairwise IoU must lie in (0, 1]");
    }
    if (!(spec.coordinate_step > 0.0)) {
        throw ValidationError("coordinate step must be positive");
    }
    if (spec.attempts_per_instance < 1) {
        throw ValidationError("attempt budget must be at least 1");
    }
}

ChannelGrid rectangle_mask(const BBox& box, GridShape shape)
{
    ChannelGrid mask(1, shape);
    const int x0 = std::max(0, static_cast<int>(std::ceil(box.x_min)));
    const int x1 = std::min(shape.width - 1, static_cast<int>(std::floor(box.x_max)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(box.y_min)));
    const int y1 = std::min(shape.height - 1, static_cast<int>(std::floor(box.y_max)));
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            mask.at(0, y, x) = 1.0f;
        }
    }
    return mask;
}

std::vector<GtInstance> generate_scene(const SceneSpec& spec)
{
    require_valid(spec);
    CounterRng count_rng(stream_key({spec.seed, kCountStream}));
    const auto count = static_cast<std::size_t>(count_rng.uniform_int(spec.min_instances, spec.max_instances));

    const double step = spec.coordinate_step;
    std::vector<GtInstance> instances;
    std::vector<KeypointSet> keypoints;

    for (std::size_t i = 0; i < count; ++i) {
        CounterRng rng(stream_key({spec.seed, kBoxStream, i}));
        bool placed = false;
        int separation_rejects = 0;
        int overlap_rejects = 0;
        for (int attempt = 0; attempt < spec.attempts_per_instance && !placed; ++attempt) {
            const double w = std::max(step, quantize(rng.uniform(spec.min_box_size, spec.max_box_size), step));
            const double h = std::max(step, quantize(rng.uniform(spec.min_box_size, spec.max_box_size), step));
            const double x0 = quantize(rng.uniform(0.0, spec.shape.width - 1 - w), step);
            const double y0 = quantize(rng.uniform(0.0, spec.shape.height - 1 - h), step);
            const BBox box{x0, y0, x0 + w, y0 + h, 1.0};
            const KeypointSet kp = keypoints_of_box(box);

            const bool far_enough = std::all_of(keypoints.begin(), keypoints.end(), [&](const KeypointSet& other) {
                return separated(kp, other, spec.min_keypoint_separation);
            });
            if (!far_enough) {
                ++separation_rejects;
                continue;
            }
            const bool low_overlap = std::all_of(instances.begin(), instances.end(), [&](const GtInstance& other) {
                return iou(box, other.box) < spec.max_pairwise_iou;
            });
            if (!low_overlap) {
                ++overlap_rejects;
                continue;
            }
            GtInstance inst{box, std::nullopt};
            if (spec.with_masks) {
                inst.mask = rectangle_mask(box, spec.shape);
            }
            instances.push_back(std::move(inst));
            keypoints.push_back(kp);
            placed = true;
        }
        if (!placed) {
            const char* constraint =
                separation_rejects >= overlap_rejects ? "min_keypoint_separation" : "max_pairwise_iou";
            throw GenerationError("could not place instance " + std::to_string(i) + " of " + std::to_string(count) +
                                  " within " + std::to_string(spec.attempts_per_instance) +
                                  " attempts; binding constraint: " + constraint);
        }
    }
    return instances;
}

void require_valid(const Perturbation& p)
{
    for (double prob : p.drop_probability) {
        if (!(prob >= 0.0 && prob <= 1.0)) {
            throw ValidationError("drop probabilities must lie in [0, 1]");
        }
    }
    if (p.drop_random_types < 0 || p.drop_random_types > kKeypointTypes) {
        throw ValidationError("random drop count must lie in [0, 5]");
    }
    if (!(p.offset_noise_sigma >= 0.0)) {
        throw ValidationError("offset noise sigma must be non-negative");
    }
    if (!(p.heatmap_flip_rate >= 0.0 && p.heatmap_flip_rate <= 1.0)) {
        throw ValidationError("heatmap flip rate must lie in [0, 1]");
    }
}

KeypointMask dropped_keypoints(const Perturbation& p, std::size_t instance)
{
    KeypointMask dropped = p.drop_types;
    if (const auto it = p.drop_for_instance.find(instance); it != p.drop_for_instance.end()) {
        dropped = KeypointMask(static_cast<std::uint8_t>(dropped.bits() | it->second.bits()));
    }
    for (int t = 0; t < kKeypointTypes; ++t) {
        const double prob = p.drop_probability[static_cast<std::size_t>(t)];
        if (prob > 0.0) {
            CounterRng rng(stream_key({p.seed, kDropProbStream, instance, static_cast<std::uint64_t>(t)}));
            if (rng.uniform() < prob) {
                dropped.set(keypoint_from_index(t));
            }
        }
    }
    if (p.drop_random_types > 0) {
        CounterRng rng(stream_key({p.seed, kDropChoiceStream, instance}));
        std::array<int, kKeypointTypes> types{};
        std::iota(types.begin(), types.end(), 0);
        // Partial Fisher-Yates: the first k entries are a uniform k-subset.
        for (int j = 0; j < p.drop_random_types; ++j) {
            const auto pick = static_cast<std::size_t>(rng.uniform_int(j, kKeypointTypes - 1));
            std::swap(types[static_cast<std::size_t>(j)], types[pick]);
            dropped.set(keypoint_from_index(types[static_cast<std::size_t>(j)]));
        }
    }
    return dropped;
}

TargetSet perturb_targets(const TargetSet& targets, std::span<const GtInstance> instances, const DiscSpec& disc,
                          const Perturbation& perturbation)
{
    require_valid(perturbation);
    const GridShape shape = targets.heatmap.shape();
    if (targets.heatmap.channels() != kHeatmapChannels ||
        targets.single_offsets.channels() != kSingleOffsetChannels ||
        targets.group_offsets.channels() != kGroupOffsetChannels || targets.single_offsets.shape() != shape ||
        targets.group_offsets.shape() != shape) {
        throw ValidationError("perturb_targets: inconsistent target set");
    }

    TargetSet out = targets;

    std::vector<KeypointMask> drops(instances.size());
    bool any_drop = false;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        drops[i] = dropped_keypoints(perturbation, i);
        any_drop = any_drop || !drops[i].empty();
    }

    if (any_drop) {
        const Ownership own = compute_ownership(instances, shape, disc);
        for (auto type : kAllKeypointTypes) {
            const int t = index_of(type);
            for (int y = 0; y < shape.height; ++y) {
                for (int x = 0; x < shape.width; ++x) {
                    const int owner = own.at(type, y, x);
                    if (owner < 0 || !drops[static_cast<std::size_t>(owner)].contains(type)) {
                        continue;
                    }
                    out.heatmap.at(t, y, x) = 0.0f;
                    out.single_offsets.at(2 * t, y, x) = 0.0f;
                    out.single_offsets.at(2 * t + 1, y, x) = 0.0f;
                    for (int l = 0; l < kKeypointTypes; ++l) {
                        if (l != t) {
                            const int p = pair_index(type, keypoint_from_index(l));
                            out.group_offsets.at(2 * p, y, x) = 0.0f;
                            out.group_offsets.at(2 * p + 1, y, x) = 0.0f;
                        }
                    }
                }
            }
        }
    }

    if (perturbation.offset_noise_sigma > 0.0) {
        const double sigma = perturbation.offset_noise_sigma;
        const std::uint64_t pixels = shape.pixel_count();
        auto noisy = [&](ChannelGrid& grid, int channel, int y, int x) {
            const std::uint64_t cell = static_cast<std::uint64_t>(y) * shape.width + x;
            CounterRng rng(stream_key({perturbation.seed, kNoiseStream,
                                       static_cast<std::uint64_t>(grid.channels()),
                                       static_cast<std::uint64_t>(channel) * pixels + cell}));
            grid.at(channel, y, x) += static_cast<float>(sigma * rng.normal());
        };
        for (int t = 0; t < kKeypointTypes; ++t) {
            for (int y = 0; y < shape.height; ++y) {
                for (int x = 0; x < shape.width; ++x) {
                    if (out.heatmap.at(t, y, x) != 1.0f) {
                        continue;
                    }
                    noisy(out.single_offsets, 2 * t, y, x);
                    noisy(out.single_offsets, 2 * t + 1, y, x);
                    for (int l = 0; l < kKeypointTypes; ++l) {
                        if (l != t) {
                            const int p = pair_index(keypoint_from_index(t), keypoint_from_index(l));
                            noisy(out.group_offsets, 2 * p, y, x);
                            noisy(out.group_offsets, 2 * p + 1, y, x);
                        }
                    }
                }
            }
        }
    }

    if (perturbation.heatmap_flip_rate > 0.0) {
        for (int t = 0; t < kKeypointTypes; ++t) {
            CounterRng rng(stream_key({perturbation.seed, kFlipStream, static_cast<std::uint64_t>(t)}));
            for (int y = 0; y < shape.height; ++y) {
                for (int x = 0; x < shape.width; ++x) {
                    if (rng.uniform() < perturbation.heatmap_flip_rate) {
                        out.heatmap.at(t, y, x) = 1.0f;
                    }
                }
            }
        }
    }
    return out;
}

}  // namespace kgbox
