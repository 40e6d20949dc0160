#include "kgbox/serialize.hpp"

#include <cstdio>

#include "kgbox/errors.hpp"
#include "kgbox/tensor_io.hpp"

namespace kgbox {

namespace {

using nlohmann::json;

template <typename Fn>
void for_each_line(std::string_view text, const std::string& source, Fn&& fn)
{
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
            continue;
        }
        try {
            fn(json::parse(line));
        } catch (const json::exception& e) {
            throw ParseError(source + ":" + std::to_string(line_no) + ": " + e.what());
        } catch (const ValidationError& e) {
            throw ParseError(source + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

BBox box_from_json(const json& j, bool with_score)
{
    if (!j.is_object()) {
        throw ValidationError("expected a JSON object");
    }
    BBox b{j.at("x_min").get<double>(), j.at("y_min").get<double>(), j.at("x_max").get<double>(),
           j.at("y_max").get<double>(), 1.0};
    if (with_score && j.contains("score")) {
        b.score = j.at("score").get<double>();
    }
    require_valid(b);
    return b;
}

std::string threshold_key(double threshold)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", threshold);
    return buf;
}

}  // namespace

std::vector<GtInstance> parse_ground_truth(std::string_view text, const std::string& source,
                                           const std::filesystem::path& base_dir)
{
    std::vector<GtInstance> out;
    for_each_line(text, source, [&](const json& j) {
        GtInstance inst{box_from_json(j, false), std::nullopt};
        if (j.contains("mask_path")) {
            std::filesystem::path mask = j.at("mask_path").get<std::string>();
            if (mask.is_relative()) {
                mask = base_dir / mask;
            }
            ChannelGrid grid = read_tensor(mask);
            if (grid.channels() != 1) {
                throw ValidationError("mask '" + mask.string() + "' must have one channel");
            }
            inst.mask = std::move(grid);
        }
        out.push_back(std::move(inst));
    });
    return out;
}

std::vector<GtInstance> read_ground_truth(const std::filesystem::path& path)
{
    return parse_ground_truth(read_file(path), path.string(), path.parent_path());
}

std::string format_ground_truth(std::span<const GtInstance> instances, std::span<const std::string> mask_paths)
{
    std::string out;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const auto& b = instances[i].box;
        json j = {{"x_min", b.x_min}, {"y_min", b.y_min}, {"x_max", b.x_max}, {"y_max", b.y_max}};
        if (i < mask_paths.size() && !mask_paths[i].empty()) {
            j["mask_path"] = mask_paths[i];
        }
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::vector<BBox> parse_boxes(std::string_view text, const std::string& source)
{
    std::vector<BBox> out;
    for_each_line(text, source, [&](const json& j) { out.push_back(box_from_json(j, true)); });
    return out;
}

std::vector<BBox> read_boxes(const std::filesystem::path& path)
{
    return parse_boxes(read_file(path), path.string());
}

std::string format_boxes(std::span<const BBox> boxes)
{
    std::string out;
    for (const auto& b : boxes) {
        const json j = {{"x_min", b.x_min}, {"y_min", b.y_min}, {"x_max", b.x_max}, {"y_max", b.y_max},
                        {"score", b.score}};
        out += j.dump();
        out += '\n';
    }
    return out;
}

json to_json(const Detection& d)
{
    return {{"type", std::string(keypoint_name(d.kind))}, {"x", d.position.x}, {"y", d.position.y},
            {"score", d.score}};
}

json to_json(const KeypointGroup& g)
{
    json slots = json::object();
    for (auto t : kAllKeypointTypes) {
        const auto& d = g.slot(t);
        slots[std::string(keypoint_name(t))] =
            d ? json{{"x", d->position.x}, {"y", d->position.y}, {"score", d->score}} : json(nullptr);
    }
    return {{"scale_index", g.scale_index}, {"slots", slots}};
}

json to_json(const EvalReport& report)
{
    json ap = json::object();
    json mean_iou = json::object();
    json curves = json::object();
    json counts = json::object();
    for (const auto& t : report.thresholds) {
        const std::string key = threshold_key(t.threshold);
        ap[key] = t.ap;
        mean_iou[key] = t.mean_iou;
        json curve = json::array();
        for (const auto& p : t.pr_curve) {
            curve.push_back({p.recall, p.precision});
        }
        curves[key] = std::move(curve);
        counts[key] = {{"tp", t.true_positives}, {"fp", t.false_positives}, {"fn", t.false_negatives}};
    }
    return {{"mode", report.mode == EvalMode::Pooled ? "pooled" : "per_image"},
            {"images", report.images},
            {"num_gt", report.num_gt},
            {"num_pred", report.num_pred},
            {"ap", ap},
            {"mean_iou", mean_iou},
            {"counts", counts},
            {"pr_curve", curves}};
}

}  // namespace kgbox
