#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "kgbox/encoder.hpp"
#include "kgbox/errors.hpp"
#include "kgbox/voting.hpp"
#include "oracles.hpp"

using namespace kgbox;

namespace {

struct VoteInput {
    ChannelGrid heatmap;
    ChannelGrid offsets;
};

// Random heatmap values in [0, 1] with ~25% support, offsets within +-r.
VoteInput random_vote_input(std::mt19937& rng, GridShape shape, double r, bool interior_only)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_real_distribution<double> off(-r, r);
    VoteInput in{ChannelGrid(5, shape), ChannelGrid(10, shape)};
    for (int t = 0; t < 5; ++t) {
        for (int y = 0; y < shape.height; ++y) {
            for (int x = 0; x < shape.width; ++x) {
                if (u(rng) > 0.25) {
                    continue;
                }
                double dx = off(rng), dy = off(rng);
                if (interior_only) {
                    dx = std::clamp(x + dx, 0.5, shape.width - 1.5) - x;
                    dy = std::clamp(y + dy, 0.5, shape.height - 1.5) - y;
                }
                in.heatmap.at(t, y, x) = static_cast<float>(u(rng));
                in.offsets.at(2 * t, y, x) = static_cast<float>(dx);
                in.offsets.at(2 * t + 1, y, x) = static_cast<float>(dy);
            }
        }
    }
    return in;
}

}  // namespace

TEST_CASE("hough_vote examples")
{
    const DiscSpec disc{5.0};
    SUBCASE("zero heatmap")
    {
        const auto s = hough_vote(ChannelGrid(5, {16, 16}), ChannelGrid(10, {16, 16}), disc);
        CHECK(s.grid == ChannelGrid(5, {16, 16}));
    }
    SUBCASE("single unit vote")
    {
        ChannelGrid h(5, {16, 16});
        h.at(2, 7, 9) = 1.0f;
        const auto s = hough_vote(h, ChannelGrid(10, {16, 16}), disc);
        CHECK(s.grid.at(2, 7, 9) == doctest::Approx(0.0127324).epsilon(1e-5));
        CHECK(s.grid.at(2, 7, 9) == doctest::Approx(oracle::direct_score_map(h, ChannelGrid(10, {16, 16}), 2, 5.0)[7 * 16 + 9]));
    }
    SUBCASE("full clean disc votes 81/(25 pi) onto the keypoint")
    {
        const std::vector<GtInstance> one{{BBox{20, 20, 40, 40, 1}, std::nullopt}};
        const TargetSet t = encode_targets(one, {64, 64}, disc);
        const auto s = hough_vote(t.heatmap, t.single_offsets, disc);
        const auto direct = oracle::direct_score_map(t.heatmap, t.single_offsets, 0, 5.0);
        CHECK(direct[20 * 64 + 20] == doctest::Approx(1.03132).epsilon(1e-5));
        CHECK(s.grid.at(0, 20, 20) == doctest::Approx(direct[20 * 64 + 20]).epsilon(1e-6));
    }
    SUBCASE("channel mismatch")
    {
        CHECK_THROWS_AS(hough_vote(ChannelGrid(4, {8, 8}), ChannelGrid(10, {8, 8}), disc), ValidationError);
        CHECK_THROWS_AS(hough_vote(ChannelGrid(5, {8, 8}), ChannelGrid(10, {8, 9}), disc), ValidationError);
    }
}

TEST_CASE("hough_vote matches direct evaluation and conserves mass")
{
    std::mt19937 rng(314);
    for (int trial = 0; trial < 10; ++trial) {
        const GridShape shape{8 + trial * 3, 10 + trial * 2};
        const double r = 5.0;
        const bool interior = trial % 2 == 0;
        const VoteInput in = random_vote_input(rng, shape, r, interior);
        const ScoreMap s = hough_vote(in.heatmap, in.offsets, DiscSpec{r});
        for (int t = 0; t < 5; ++t) {
            const auto direct = oracle::direct_score_map(in.heatmap, in.offsets, t, r);
            double max_err = 0.0;
            for (std::size_t i = 0; i < direct.size(); ++i) {
                max_err = std::max(max_err, std::abs(direct[i] - s.grid.channel(t)[i]));
                CHECK(s.grid.channel(t)[i] >= 0.0f);
            }
            CHECK(max_err < 1e-6);
            if (interior) {
                const auto hc = in.heatmap.channel(t);
                const auto sc = s.grid.channel(t);
                const double mass_in = std::accumulate(hc.begin(), hc.end(), 0.0) / (M_PI * r * r);
                const double mass_out = std::accumulate(sc.begin(), sc.end(), 0.0);
                CHECK(std::abs(mass_in - mass_out) < 1e-6);
            }
        }
    }
}

TEST_CASE("extract_peaks examples")
{
    const ChannelGrid offsets(10, {16, 16});
    SUBCASE("isolated peak")
    {
        ScoreMap s{ChannelGrid(5, {16, 16}), DiscSpec{}};
        s.grid.at(1, 9, 7) = 0.01f;
        const auto d = extract_peaks(s, offsets, PeakConfig{});
        REQUIRE(d.size() == 1);
        CHECK(d[0].kind == KeypointType::TR);
        CHECK(d[0].position == Point2{7, 9});
        CHECK(d[0].score == 0.01f);
    }
    SUBCASE("below the 0.004 threshold")
    {
        ScoreMap s{ChannelGrid(5, {16, 16}), DiscSpec{}};
        s.grid.at(0, 9, 7) = 0.003f;
        CHECK(extract_peaks(s, offsets, PeakConfig{}).empty());
        CHECK(PeakConfig{}.threshold == 0.004);
    }
    SUBCASE("plateau keeps the smaller (y, x)")
    {
        ScoreMap s{ChannelGrid(5, {16, 16}), DiscSpec{}};
        s.grid.at(0, 5, 5) = 0.5f;
        s.grid.at(0, 5, 6) = 0.5f;
        auto d = extract_peaks(s, offsets, PeakConfig{});
        REQUIRE(d.size() == 1);
        CHECK(d[0].position == Point2{5, 5});

        ScoreMap v{ChannelGrid(5, {16, 16}), DiscSpec{}};
        v.grid.at(0, 6, 3) = 0.5f;
        v.grid.at(0, 5, 4) = 0.5f;
        d = extract_peaks(v, offsets, PeakConfig{});
        REQUIRE(d.size() == 1);
        CHECK(d[0].position == Point2{4, 5});
    }
    SUBCASE("position refined by the single offset")
    {
        ScoreMap s{ChannelGrid(5, {16, 16}), DiscSpec{}};
        ChannelGrid off(10, {16, 16});
        s.grid.at(4, 8, 8) = 0.2f;
        off.at(8, 8, 8) = 0.25f;
        off.at(9, 8, 8) = -0.5f;
        const auto d = extract_peaks(s, off, PeakConfig{});
        REQUIRE(d.size() == 1);
        CHECK(d[0].position.x == doctest::Approx(8.25));
        CHECK(d[0].position.y == doctest::Approx(7.5));
    }
    SUBCASE("bad config")
    {
        ScoreMap s{ChannelGrid(5, {4, 4}), DiscSpec{}};
        CHECK_THROWS_AS(extract_peaks(s, ChannelGrid(10, {4, 4}), PeakConfig{0.004, 4}), ValidationError);
        CHECK_THROWS_AS(extract_peaks(s, ChannelGrid(10, {4, 4}), PeakConfig{0.0, 3}), ValidationError);
    }
}

TEST_CASE("every detection is a window maximum above threshold")
{
    std::mt19937 rng(8);
    std::uniform_real_distribution<float> u(0.0f, 0.02f);
    for (int window : {3, 5, 7}) {
        ScoreMap s{ChannelGrid(5, {24, 20}), DiscSpec{}};
        for (int t = 0; t < 5; ++t) {
            for (auto& v : s.grid.channel(t)) {
                // Coarse quantisation produces plenty of ties.
                v = std::round(u(rng) * 500.0f) / 500.0f;
            }
        }
        const PeakConfig cfg{0.004, window};
        const auto dets = extract_peaks(s, ChannelGrid(10, {24, 20}), cfg);
        CHECK(!dets.empty());
        for (const auto& d : dets) {
            const int t = index_of(d.kind), x = static_cast<int>(d.position.x), y = static_cast<int>(d.position.y);
            CHECK(d.score >= 0.004f);
            for (int ny = std::max(0, y - window / 2); ny <= std::min(23, y + window / 2); ++ny) {
                for (int nx = std::max(0, x - window / 2); nx <= std::min(19, x + window / 2); ++nx) {
                    CHECK(s.grid.at(t, ny, nx) <= d.score);
                }
            }
        }
    }
}

TEST_CASE("encode -> vote -> extract recovers the five keypoints")
{
    for (const BBox box : {BBox{10, 12, 40, 33, 1}, BBox{10.25, 12.5, 40.75, 33.125, 1}, BBox{0, 0, 20, 20, 1}}) {
        const std::vector<GtInstance> one{{box, std::nullopt}};
        const TargetSet t = encode_targets(one, {48, 48}, DiscSpec{5.0});
        const auto s = hough_vote(t.heatmap, t.single_offsets, DiscSpec{5.0});
        const auto dets = extract_peaks(s, t.single_offsets, PeakConfig{});
        REQUIRE(dets.size() == 5);
        const auto kp = keypoints_of_box(box);
        for (const auto& d : dets) {
            CHECK(std::abs(d.position.x - kp[index_of(d.kind)].x) < 1e-4);
            CHECK(std::abs(d.position.y - kp[index_of(d.kind)].y) < 1e-4);
        }
    }
}
