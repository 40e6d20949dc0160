#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>
#include <vector>

#include "kgbox/encoder.hpp"
#include "kgbox/errors.hpp"
#include "oracles.hpp"

using namespace kgbox;
using K = KeypointType;

namespace {

GtInstance inst(double x0, double y0, double x1, double y1)
{
    return GtInstance{BBox{x0, y0, x1, y1, 1.0}, std::nullopt};
}

int count_ones(const ChannelGrid& g, int channel)
{
    const auto c = g.channel(channel);
    return static_cast<int>(std::count(c.begin(), c.end(), 1.0f));
}

}  // namespace

TEST_CASE("keypoints_of_box")
{
    const auto a = keypoints_of_box({0, 0, 10, 20, 1});
    CHECK(a[index_of(K::C)] == Point2{5, 10});

    const auto b = keypoints_of_box({10, 20, 50, 60, 1});
    CHECK(b[index_of(K::TL)] == Point2{10, 20});
    CHECK(b[index_of(K::TR)] == Point2{50, 20});
    CHECK(b[index_of(K::BL)] == Point2{10, 60});
    CHECK(b[index_of(K::BR)] == Point2{50, 60});

    CHECK_THROWS_AS(keypoints_of_box({3, 3, 3, 9, 1}), ValidationError);
    CHECK_THROWS_AS(keypoints_of_box({3, 9, 8, 2, 1}), ValidationError);
}

TEST_CASE("pair index layout is lexicographic over k != l")
{
    int expected = 0;
    for (int k = 0; k < kKeypointTypes; ++k) {
        for (int l = 0; l < kKeypointTypes; ++l) {
            if (k != l) {
                CHECK(pair_index(keypoint_from_index(k), keypoint_from_index(l)) == expected++);
            }
        }
    }
    CHECK(expected == kPairCount);
    CHECK(kGroupOffsetChannels == 40);
}

TEST_CASE("encode_heatmap")
{
    const std::vector<GtInstance> one{inst(10, 10, 30, 30)};

    SUBCASE("disc centre and outside, r=2")
    {
        const auto h = encode_heatmap(one, {40, 40}, DiscSpec{2.0});
        CHECK(h.channels() == 5);
        CHECK(h.at(index_of(K::TL), 10, 10) == 1.0f);
        CHECK(h.at(index_of(K::TL), 10, 13) == 0.0f);
        CHECK(h.at(index_of(K::TL), 13, 10) == 0.0f);
    }
    SUBCASE("81 cells per interior disc at r=5")
    {
        const auto h = encode_heatmap(one, {40, 40}, DiscSpec{5.0});
        for (int t = 0; t < kKeypointTypes; ++t) {
            CHECK(count_ones(h, t) == oracle::lattice_points_in_disc(5));
        }
        CHECK(oracle::lattice_points_in_disc(5) == 81);
    }
    SUBCASE("empty instance list")
    {
        const auto h = encode_heatmap({}, {8, 8}, DiscSpec{5.0});
        CHECK(h == ChannelGrid(5, {8, 8}));
    }
    SUBCASE("disc clipped at the border")
    {
        const auto h = encode_heatmap(std::vector{inst(0, 0, 20, 20)}, {30, 30}, DiscSpec{5.0});
        // Quarter disc including the axes: x, y in [0, 5] with x^2 + y^2 <= 25.
        int expected = 0;
        for (int y = 0; y <= 5; ++y) {
            for (int x = 0; x <= 5; ++x) {
                expected += (x * x + y * y <= 25) ? 1 : 0;
            }
        }
        CHECK(count_ones(h, index_of(K::TL)) == expected);
    }
}

TEST_CASE("encode_single_offsets")
{
    SUBCASE("offset is keypoint minus cell")
    {
        // TL of this box is (10, 10).
        const auto s = encode_single_offsets(std::vector{inst(10, 10, 40, 40)}, {50, 50}, DiscSpec{5.0});
        CHECK(s.channels() == 10);
        CHECK(s.at(0, 9, 12) == -2.0f);
        CHECK(s.at(1, 9, 12) == 1.0f);
        CHECK(s.at(0, 10, 10) == 0.0f);
        CHECK(s.at(1, 10, 10) == 0.0f);
    }
    SUBCASE("overlapping same-type discs resolve to the nearer keypoint")
    {
        const std::vector<GtInstance> two{inst(0, 0, 20, 20), inst(8, 0, 30, 20)};
        const auto s = encode_single_offsets(two, {30, 40}, DiscSpec{5.0});
        CHECK(s.at(0, 0, 3) == -3.0f);
        CHECK(s.at(1, 0, 3) == 0.0f);
        CHECK(s.at(0, 0, 5) == 3.0f);  // nearer to (8, 0)
    }
    SUBCASE("equidistant cell goes to the lower instance index")
    {
        const std::vector<GtInstance> two{inst(0, 0, 20, 20), inst(8, 0, 30, 20)};
        const auto s = encode_single_offsets(two, {30, 40}, DiscSpec{5.0});
        CHECK(s.at(0, 0, 4) == -4.0f);
        const std::vector<GtInstance> swapped{two[1], two[0]};
        const auto s2 = encode_single_offsets(swapped, {30, 40}, DiscSpec{5.0});
        CHECK(s2.at(0, 0, 4) == 4.0f);
    }
}

TEST_CASE("encode_group_offsets")
{
    const std::vector<GtInstance> one{inst(10, 10, 20, 20)};
    const auto g = encode_group_offsets(one, {40, 40}, DiscSpec{5.0});
    CHECK(g.channels() == 40);

    const int tl_br = pair_index(K::TL, K::BR);
    CHECK(g.at(2 * tl_br, 10, 10) == 10.0f);
    CHECK(g.at(2 * tl_br + 1, 10, 10) == 10.0f);

    const int br_tl = pair_index(K::BR, K::TL);
    CHECK(g.at(2 * br_tl, 20, 20) == -10.0f);
    CHECK(g.at(2 * br_tl + 1, 20, 20) == -10.0f);

    const int tl_c = pair_index(K::TL, K::C);
    CHECK(g.at(2 * tl_c, 9, 8) == 7.0f);
    CHECK(g.at(2 * tl_c + 1, 9, 8) == 6.0f);

    // Outside every TL disc the TL->* pairs stay zero.
    CHECK(g.at(2 * tl_c, 30, 30) == 0.0f);
}

TEST_CASE("encoder invariants on random scenes (brute force)")
{
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> coord(0.0, 50.0);
    std::uniform_real_distribution<double> size(6.0, 25.0);
    std::uniform_real_distribution<double> radius(1.5, 6.0);

    for (int trial = 0; trial < 30; ++trial) {
        const GridShape shape{64, 72};
        const DiscSpec disc{radius(rng)};
        std::vector<GtInstance> instances;
        const int n = 1 + trial % 4;
        for (int i = 0; i < n; ++i) {
            const double x0 = std::round(coord(rng) * 4) / 4, y0 = std::round(coord(rng) * 4) / 4;
            instances.push_back(inst(x0, y0, std::min(70.0, x0 + size(rng)), std::min(62.0, y0 + size(rng))));
        }
        const TargetSet t = encode_targets(instances, shape, disc);

        for (int type = 0; type < kKeypointTypes; ++type) {
            for (int y = 0; y < shape.height; ++y) {
                for (int x = 0; x < shape.width; ++x) {
                    // Brute-force nearest same-type keypoint, lower index on ties.
                    int owner = -1;
                    double best = 0.0;
                    for (int i = 0; i < n; ++i) {
                        const Point2 k = keypoints_of_box(instances[i].box)[type];
                        const double d2 = (x - k.x) * (x - k.x) + (y - k.y) * (y - k.y);
                        if (d2 <= disc.radius * disc.radius && (owner < 0 || d2 < best)) {
                            owner = i;
                            best = d2;
                        }
                    }
                    const float h = t.heatmap.at(type, y, x);
                    REQUIRE((h == 0.0f || h == 1.0f));
                    REQUIRE((h == 1.0f) == (owner >= 0));
                    if (owner < 0) {
                        CHECK(t.single_offsets.at(2 * type, y, x) == 0.0f);
                        CHECK(t.single_offsets.at(2 * type + 1, y, x) == 0.0f);
                        continue;
                    }
                    const auto kp = keypoints_of_box(instances[owner].box);
                    CHECK(x + t.single_offsets.at(2 * type, y, x) == doctest::Approx(kp[type].x).epsilon(1e-6));
                    CHECK(y + t.single_offsets.at(2 * type + 1, y, x) == doctest::Approx(kp[type].y).epsilon(1e-6));
                    for (int l = 0; l < kKeypointTypes; ++l) {
                        if (l == type) {
                            continue;
                        }
                        const int p = pair_index(keypoint_from_index(type), keypoint_from_index(l));
                        CHECK(x + t.group_offsets.at(2 * p, y, x) == doctest::Approx(kp[l].x).epsilon(1e-6));
                        CHECK(y + t.group_offsets.at(2 * p + 1, y, x) == doctest::Approx(kp[l].y).epsilon(1e-6));
                    }
                }
            }
        }
    }
}

TEST_CASE("encoder is independent of instance order when discs do not overlap")
{
    const std::vector<GtInstance> a{inst(2, 2, 20, 20), inst(30, 5, 50, 28), inst(10, 30, 40, 55)};
    const std::vector<GtInstance> b{a[2], a[0], a[1]};
    CHECK(encode_targets(a, {60, 60}, DiscSpec{5.0}) == encode_targets(b, {60, 60}, DiscSpec{5.0}));
}

TEST_CASE("encoder validation")
{
    CHECK_THROWS_AS(encode_heatmap(std::vector{inst(3, 3, 3, 9)}, {10, 10}, DiscSpec{5.0}), ValidationError);
    CHECK_THROWS_AS(encode_heatmap(std::vector{inst(1, 1, 5, 5)}, {10, 10}, DiscSpec{0.0}), ValidationError);
    CHECK_THROWS_AS(encode_heatmap({}, {0, 10}, DiscSpec{5.0}), ValidationError);
}
