#include "kgbox/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "kgbox/errors.hpp"
#include "kgbox/random.hpp"

namespace kgbox {

std::uint64_t scene_seed(std::uint64_t base_seed, std::size_t index)
{
    return stream_key({base_seed, 0x5CE4Eull, index});
}

std::vector<TargetSet> encode_scales(std::span<const GtInstance> instances, GridShape image_shape,
                                     const PipelineConfig& cfg)
{
    std::vector<TargetSet> out;
    for (int stride : cfg.scales.strides) {
        const GridShape shape{(image_shape.height + stride - 1) / stride, (image_shape.width + stride - 1) / stride};
        const auto scaled = scale_instances(instances, stride);
        out.push_back(encode_targets(scaled, shape, cfg.disc));
    }
    return out;
}

namespace {

SceneOutcome run_scene(const RoundtripSpec& spec, std::size_t index)
{
    SceneOutcome outcome;
    SceneSpec scene = spec.scene;
    scene.seed = scene_seed(spec.scene.seed, index);
    outcome.seed = scene.seed;
    outcome.instances = generate_scene(scene);

    Perturbation perturbation = spec.perturbation;
    perturbation.seed = scene_seed(spec.perturbation.seed, index);
    for (std::size_t i = 0; i < outcome.instances.size(); ++i) {
        outcome.dropped.push_back(dropped_keypoints(perturbation, i));
    }

    std::vector<TargetSet> maps = encode_scales(outcome.instances, scene.shape, spec.pipeline);
    for (std::size_t s = 0; s < maps.size(); ++s) {
        const auto scaled = scale_instances(outcome.instances, spec.pipeline.scales.strides[s]);
        maps[s] = perturb_targets(maps[s], scaled, spec.pipeline.disc, perturbation);
    }
    outcome.boxes = decode(maps, spec.pipeline).boxes;
    return outcome;
}

}  // namespace

RoundtripResult run_roundtrip(const RoundtripSpec& spec)
{
    require_valid(spec.scene);
    require_valid(spec.perturbation);
    require_valid(spec.pipeline);
    if (spec.scene_count < 0) {
        throw ValidationError("scene count must be non-negative");
    }

    const auto count = static_cast<std::size_t>(spec.scene_count);
    RoundtripResult result;
    result.scenes.resize(count);

    unsigned workers = spec.threads > 0 ? static_cast<unsigned>(spec.threads) : std::thread::hardware_concurrency();
    workers = std::clamp(workers, 1u, static_cast<unsigned>(std::max<std::size_t>(count, 1)));

    std::atomic<std::size_t> next{0};
    // One slot per scene so the reported error does not depend on scheduling.
    std::vector<std::exception_ptr> failures(count);
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                result.scenes[i] = run_scene(spec, i);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) {
        pool.emplace_back(work);
    }
    work();
    for (auto& t : pool) {
        t.join();
    }
    for (const auto& f : failures) {
        if (f) {
            std::rethrow_exception(f);
        }
    }

    std::vector<ImageDetections> images;
    images.reserve(count);
    for (const auto& s : result.scenes) {
        ImageDetections img;
        img.preds = s.boxes;
        for (const auto& inst : s.instances) {
            img.gts.push_back(inst.box);
        }
        images.push_back(std::move(img));
    }
    result.report = evaluate(images, spec.pipeline.eval_thresholds, spec.mode);
    return result;
}

}  // namespace kgbox
