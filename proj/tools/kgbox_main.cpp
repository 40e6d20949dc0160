// kgbox command-line driver: encode, decode, eval, synth, roundtrip.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kgbox/errors.hpp"
#include "kgbox/evalkit.hpp"
#include "kgbox/experiment.hpp"
#include "kgbox/overlay.hpp"
#include "kgbox/pipeline.hpp"
#include "kgbox/random.hpp"
#include "kgbox/serialize.hpp"
#include "kgbox/synth.hpp"
#include "kgbox/tensor_io.hpp"

namespace fs = std::filesystem;
using namespace kgbox;

namespace {

constexpr const char* kHeatmapFile = "heatmap.kgten";
constexpr const char* kSingleOffsetFile = "single_offsets.kgten";
constexpr const char* kGroupOffsetFile = "group_offsets.kgten";

struct SharedOptions {
    double radius = 5.0;
    double peak_threshold = 0.004;
    int peak_window = 3;
    std::optional<double> match_radius;
    double nms_iou = 0.5;
    std::vector<int> strides{4, 8, 16, 32};
    std::vector<double> iou_thresholds{0.5, 0.7};
    std::uint64_t seed = 0;

    PipelineConfig pipeline() const
    {
        PipelineConfig cfg;
        cfg.disc.radius = radius;
        cfg.peaks = {peak_threshold, peak_window};
        cfg.match_radius = match_radius;
        cfg.scales.strides = strides;
        cfg.nms_iou = nms_iou;
        cfg.eval_thresholds = iou_thresholds;
        require_valid(cfg);
        return cfg;
    }
};

void add_shared(CLI::App* cmd, SharedOptions& o)
{
    cmd->add_option("--radius", o.radius, "Keypoint disc radius in feature-map pixels")->capture_default_str();
    cmd->add_option("--peak-threshold", o.peak_threshold, "Minimum voted score for a keypoint")->capture_default_str();
    cmd->add_option("--peak-window", o.peak_window, "Maximum-filter window (odd)")->capture_default_str();
    cmd->add_option("--match-radius", o.match_radius, "Grouping match radius (default: --radius)");
    cmd->add_option("--nms-iou", o.nms_iou, "NMS IoU threshold")->capture_default_str();
    cmd->add_option("--strides", o.strides, "Stride of each scale, finest first")->delimiter(',')->capture_default_str();
    cmd->add_option("--iou-thresholds", o.iou_thresholds, "Evaluation IoU thresholds")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
}

struct SceneOptions {
    int height = 512;
    int width = 512;
    int min_instances = 5;
    int max_instances = 15;
    double min_size = 20.0;
    double max_size = 120.0;
    std::optional<double> separation;
    double max_iou = 0.5;
    double coord_step = 1.0;
    int scenes = 1;

    SceneSpec spec(const SharedOptions& shared) const
    {
        SceneSpec s;
        s.shape = {height, width};
        s.min_instances = min_instances;
        s.max_instances = max_instances;
        s.min_box_size = min_size;
        s.max_box_size = max_size;
        s.min_keypoint_separation = separation.value_or(2.0 * shared.radius + 2.0);
        s.max_pairwise_iou = max_iou;
        s.coordinate_step = coord_step;
        s.seed = shared.seed;
        return s;
    }
};

void add_scene(CLI::App* cmd, SceneOptions& o, int default_scenes)
{
    o.scenes = default_scenes;
    cmd->add_option("--height", o.height, "Image height")->capture_default_str();
    cmd->add_option("--width", o.width, "Image width")->capture_default_str();
    cmd->add_option("--min-instances", o.min_instances)->capture_default_str();
    cmd->add_option("--max-instances", o.max_instances)->capture_default_str();
    cmd->add_option("--min-size", o.min_size, "Minimum box side")->capture_default_str();
    cmd->add_option("--max-size", o.max_size, "Maximum box side")->capture_default_str();
    cmd->add_option("--separation", o.separation, "Same-type keypoint separation (default: 2*radius+2)");
    cmd->add_option("--max-iou", o.max_iou, "Pairwise ground-truth IoU must stay below this")->capture_default_str();
    cmd->add_option("--coord-step", o.coord_step, "Box coordinate quantum")->capture_default_str();
    cmd->add_option("--scenes", o.scenes, "Number of scenes")->capture_default_str();
}

struct PerturbOptions {
    std::vector<std::string> drop_types;
    int drop_random = 0;
    double drop_prob = 0.0;
    double noise_sigma = 0.0;
    double flip_rate = 0.0;
    std::optional<std::uint64_t> perturb_seed;

    Perturbation perturbation(const SharedOptions& shared) const
    {
        Perturbation p;
        for (const auto& name : drop_types) {
            const auto t = parse_keypoint_name(name);
            if (!t) {
                throw ValidationError("unknown keypoint type '" + name + "' (expected TL, TR, BL, BR, C)");
            }
            p.drop_types.set(*t);
        }
        p.drop_random_types = drop_random;
        p.drop_probability.fill(drop_prob);
        p.offset_noise_sigma = noise_sigma;
        p.heatmap_flip_rate = flip_rate;
        p.seed = perturb_seed.value_or(stream_key({shared.seed, 0x9E47ull}));
        require_valid(p);
        return p;
    }
};

void add_perturb(CLI::App* cmd, PerturbOptions& o)
{
    cmd->add_option("--drop-types", o.drop_types, "Keypoint types removed from every instance")->delimiter(',');
    cmd->add_option("--drop-random", o.drop_random, "Distinct random types removed per instance")
        ->capture_default_str();
    cmd->add_option("--drop-prob", o.drop_prob, "Independent per-keypoint drop probability")->capture_default_str();
    cmd->add_option("--noise-sigma", o.noise_sigma, "Gaussian offset noise (pixels)")->capture_default_str();
    cmd->add_option("--flip-rate", o.flip_rate, "Rate of spurious heatmap cells")->capture_default_str();
    cmd->add_option("--perturb-seed", o.perturb_seed, "Perturbation seed (default: derived from --seed)");
}

fs::path scale_dir(const fs::path& root, int stride)
{
    return root / ("s" + std::to_string(stride));
}

void write_targets(const TargetSet& t, const fs::path& dir)
{
    fs::create_directories(dir);
    write_tensor(t.heatmap, dir / kHeatmapFile);
    write_tensor(t.single_offsets, dir / kSingleOffsetFile);
    write_tensor(t.group_offsets, dir / kGroupOffsetFile);
}

ChannelGrid read_required(const fs::path& path)
{
    if (!fs::exists(path)) {
        throw IoError("missing input: " + path.string());
    }
    return read_tensor(path);
}

TargetSet read_targets(const fs::path& dir)
{
    TargetSet t{read_required(dir / kHeatmapFile), read_required(dir / kSingleOffsetFile),
                read_required(dir / kGroupOffsetFile)};
    if (t.heatmap.channels() != kHeatmapChannels || t.single_offsets.channels() != kSingleOffsetChannels ||
        t.group_offsets.channels() != kGroupOffsetChannels) {
        throw ValidationError(dir.string() + ": expected 5/10/40 channels in heatmap/single/group offsets");
    }
    if (t.single_offsets.shape() != t.heatmap.shape() || t.group_offsets.shape() != t.heatmap.shape()) {
        throw ValidationError(dir.string() + ": tensors differ in shape");
    }
    return t;
}

std::string format_table(const EvalReport& report)
{
    std::ostringstream out;
    char line[96];
    std::snprintf(line, sizeof line, "%-8s %-10s %-10s %6s %6s %6s\n", "IoU", "AP", "meanIoU", "TP", "FP", "FN");
    out << line;
    for (const auto& t : report.thresholds) {
        std::snprintf(line, sizeof line, "%-8.2f %-10.6f %-10.6f %6zu %6zu %6zu\n", t.threshold, t.ap, t.mean_iou,
                      t.true_positives, t.false_positives, t.false_negatives);
        out << line;
    }
    return out.str();
}

void emit_report(const EvalReport& report, const std::string& out_path)
{
    const std::string json = to_json(report).dump() + "\n";
    if (out_path.empty()) {
        std::cout << json;
    } else {
        write_file_atomic(out_path, json);
        std::cout << format_table(report);
    }
}

std::string scene_name(std::size_t i)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "scene_%03zu", i);
    return buf;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Keypoint-graph bounding box decoding and evaluation"};
    app.require_subcommand(1);

    // encode
    SharedOptions enc_shared;
    std::string enc_gt, enc_out;
    int enc_height = 0, enc_width = 0;
    auto* encode = app.add_subcommand("encode", "Encode ground-truth boxes into heatmap and offset tensors");
    add_shared(encode, enc_shared);
    encode->add_option("--gt", enc_gt, "Ground truth JSON Lines")->required();
    encode->add_option("--height", enc_height, "Image height")->required();
    encode->add_option("--width", enc_width, "Image width")->required();
    encode->add_option("--out-dir", enc_out, "Output directory (one s<stride>/ per scale)")->required();

    // decode
    SharedOptions dec_shared;
    std::string dec_in, dec_out, dec_groups, dec_overlay;
    auto* decode_cmd = app.add_subcommand("decode", "Decode tensors into boxes");
    add_shared(decode_cmd, dec_shared);
    decode_cmd->add_option("--input", dec_in, "Directory holding s<stride>/ tensor sets")->required();
    decode_cmd->add_option("--out", dec_out, "Boxes JSON Lines")->required();
    decode_cmd->add_option("--groups", dec_groups, "Optional keypoint groups JSON");
    decode_cmd->add_option("--overlay", dec_overlay, "Optional PPM overlay");

    // eval
    SharedOptions eval_shared;
    std::vector<std::string> eval_pred, eval_gt;
    std::string eval_out;
    bool eval_per_image = false;
    auto* eval = app.add_subcommand("eval", "Evaluate predicted boxes against ground truth");
    add_shared(eval, eval_shared);
    eval->add_option("--pred", eval_pred, "Predicted boxes JSON Lines, one per image")->required();
    eval->add_option("--gt", eval_gt, "Ground truth JSON Lines, one per image")->required();
    eval->add_option("--out", eval_out, "Report JSON (default: stdout)");
    eval->add_flag("--per-image", eval_per_image, "Average AP per image instead of pooling");

    // synth
    SharedOptions syn_shared;
    SceneOptions syn_scene;
    PerturbOptions syn_perturb;
    std::string syn_out;
    bool syn_masks = false;
    auto* synth = app.add_subcommand("synth", "Generate synthetic scenes with targets");
    add_shared(synth, syn_shared);
    add_scene(synth, syn_scene, 1);
    add_perturb(synth, syn_perturb);
    synth->add_option("--out-dir", syn_out, "Output directory")->required();
    synth->add_flag("--masks", syn_masks, "Also write filled-rectangle instance masks");

    // roundtrip
    SharedOptions rt_shared;
    rt_shared.strides = {1};
    SceneOptions rt_scene;
    PerturbOptions rt_perturb;
    std::string rt_out;
    bool rt_per_image = false;
    int rt_threads = 0;
    auto* roundtrip = app.add_subcommand("roundtrip", "Synthesize, encode, perturb, decode and evaluate");
    add_shared(roundtrip, rt_shared);
    add_scene(roundtrip, rt_scene, 20);
    add_perturb(roundtrip, rt_perturb);
    roundtrip->add_option("--out", rt_out, "Report JSON (default: stdout)");
    roundtrip->add_flag("--per-image", rt_per_image, "Average AP per image instead of pooling");
    roundtrip->add_option("--threads", rt_threads, "Worker threads (0 = all cores)")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*encode) {
            const PipelineConfig cfg = enc_shared.pipeline();
            const auto instances = read_ground_truth(enc_gt);
            const auto maps = encode_scales(instances, GridShape{enc_height, enc_width}, cfg);
            for (std::size_t s = 0; s < maps.size(); ++s) {
                write_targets(maps[s], scale_dir(enc_out, cfg.scales.strides[s]));
            }
        } else if (*decode_cmd) {
            const PipelineConfig cfg = dec_shared.pipeline();
            std::vector<TargetSet> maps;
            for (int stride : cfg.scales.strides) {
                maps.push_back(read_targets(scale_dir(dec_in, stride)));
            }
            const DecodeResult result = decode(maps, cfg);
            write_file_atomic(dec_out, format_boxes(result.boxes));
            if (!dec_groups.empty()) {
                nlohmann::json groups = nlohmann::json::array();
                for (const auto& scale : result.scales) {
                    for (const auto& g : scale.groups) {
                        groups.push_back(to_json(g));
                    }
                }
                nlohmann::json doc = {{"strides", cfg.scales.strides}, {"groups", groups}};
                write_file_atomic(dec_groups, doc.dump(2) + "\n");
            }
            if (!dec_overlay.empty()) {
                const GridShape fine = maps.front().heatmap.shape();
                const int s0 = cfg.scales.strides.front();
                std::vector<OverlayLayer> layers;
                for (std::size_t s = 0; s < result.scales.size(); ++s) {
                    layers.push_back({result.scales[s].groups, cfg.scales.strides[s]});
                }
                write_file_atomic(dec_overlay,
                                  render_overlay({fine.height * s0, fine.width * s0}, result.boxes, layers));
            }
        } else if (*eval) {
            if (eval_pred.size() != eval_gt.size()) {
                throw ValidationError("--pred and --gt must be given the same number of times");
            }
            std::vector<ImageDetections> images;
            for (std::size_t i = 0; i < eval_pred.size(); ++i) {
                ImageDetections img;
                img.preds = read_boxes(eval_pred[i]);
                for (const auto& inst : read_ground_truth(eval_gt[i])) {
                    img.gts.push_back(inst.box);
                }
                images.push_back(std::move(img));
            }
            const auto report = evaluate(images, eval_shared.iou_thresholds,
                                         eval_per_image ? EvalMode::PerImage : EvalMode::Pooled);
            emit_report(report, eval_out);
        } else if (*synth) {
            const PipelineConfig cfg = syn_shared.pipeline();
            const Perturbation base_perturbation = syn_perturb.perturbation(syn_shared);
            SceneSpec spec = syn_scene.spec(syn_shared);
            spec.with_masks = syn_masks;
            for (int i = 0; i < syn_scene.scenes; ++i) {
                SceneSpec scene = spec;
                scene.seed = scene_seed(spec.seed, static_cast<std::size_t>(i));
                const auto instances = generate_scene(scene);
                const fs::path dir = fs::path(syn_out) / scene_name(static_cast<std::size_t>(i));
                fs::create_directories(dir);

                std::vector<std::string> mask_paths;
                if (syn_masks) {
                    fs::create_directories(dir / "masks");
                    for (std::size_t k = 0; k < instances.size(); ++k) {
                        char name[32];
                        std::snprintf(name, sizeof name, "masks/mask_%03zu.kgten", k);
                        write_tensor(*instances[k].mask, dir / name);
                        mask_paths.emplace_back(name);
                    }
                }
                write_file_atomic(dir / "gt.jsonl", format_ground_truth(instances, mask_paths));

                Perturbation perturbation = base_perturbation;
                perturbation.seed = scene_seed(base_perturbation.seed, static_cast<std::size_t>(i));
                auto maps = encode_scales(instances, scene.shape, cfg);
                for (std::size_t s = 0; s < maps.size(); ++s) {
                    const int stride = cfg.scales.strides[s];
                    maps[s] = perturb_targets(maps[s], scale_instances(instances, stride), cfg.disc, perturbation);
                    write_targets(maps[s], scale_dir(dir, stride));
                }
            }
        } else if (*roundtrip) {
            RoundtripSpec spec;
            spec.pipeline = rt_shared.pipeline();
            spec.scene = rt_scene.spec(rt_shared);
            spec.scene_count = rt_scene.scenes;
            spec.perturbation = rt_perturb.perturbation(rt_shared);
            spec.mode = rt_per_image ? EvalMode::PerImage : EvalMode::Pooled;
            spec.threads = rt_threads;
            const auto result = run_roundtrip(spec);
            emit_report(result.report, rt_out);
        }
    } catch (const kgbox::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
