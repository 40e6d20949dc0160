#pragma once

#include <cstdint>
#include <vector>

#include "kgbox/evalkit.hpp"
#include "kgbox/pipeline.hpp"
#include "kgbox/synth.hpp"

namespace kgbox {

struct RoundtripSpec {
    SceneSpec scene;
    int scene_count = 20;
    Perturbation perturbation;
    PipelineConfig pipeline;
    EvalMode mode = EvalMode::Pooled;
    int threads = 0;  // 0 = hardware concurrency
};

struct SceneOutcome {
    std::uint64_t seed = 0;
    std::vector<GtInstance> instances;
    std::vector<KeypointMask> dropped;  // per instance
    std::vector<BBox> boxes;            // decoded, image coordinates
};

struct RoundtripResult {
    std::vector<SceneOutcome> scenes;
    EvalReport report;
};

// Seed of scene i in a batch generated from `base_seed`.
std::uint64_t scene_seed(std::uint64_t base_seed, std::size_t index);

// Encodes a scene at every configured stride (feature map = ceil(image / stride)).
std::vector<TargetSet> encode_scales(std::span<const GtInstance> instances, GridShape image_shape,
                                     const PipelineConfig& cfg);

// Synthesize -> encode -> perturb -> decode -> evaluate, scenes in parallel.
// Scene i uses scene_seed(spec.scene.seed, i) for generation and
// scene_seed(spec.perturbation.seed, i) for perturbation.
RoundtripResult run_roundtrip(const RoundtripSpec& spec);

}  // namespace kgbox
