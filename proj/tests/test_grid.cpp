#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>

#include "kgbox/errors.hpp"
#include "kgbox/grid.hpp"
#include "kgbox/tensor_io.hpp"

using namespace kgbox;
namespace fs = std::filesystem;

namespace {

fs::path temp_path(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "kgbox_test_grid";
    fs::create_directories(dir);
    return dir / name;
}

ChannelGrid random_grid(std::mt19937& rng)
{
    std::uniform_int_distribution<int> dim(1, 9);
    std::uniform_real_distribution<float> val(-100.0f, 100.0f);
    const int c = dim(rng), h = dim(rng), w = dim(rng);
    std::vector<float> data(static_cast<std::size_t>(c * h * w));
    for (auto& v : data) {
        v = val(rng);
    }
    return ChannelGrid(c, GridShape{h, w}, std::move(data));
}

}  // namespace

TEST_CASE("grid constructors reject bad input")
{
    CHECK_THROWS_AS(ChannelGrid(0, GridShape{2, 2}), ValidationError);
    CHECK_THROWS_AS(ChannelGrid(1, GridShape{0, 2}), ValidationError);
    CHECK_THROWS_AS(ChannelGrid(1, GridShape{2, 2}, std::vector<float>(3)), ValidationError);
    CHECK_THROWS_AS(ChannelGrid(1, GridShape{1, 2}, {1.0f, std::numeric_limits<float>::quiet_NaN()}),
                    ValidationError);
    CHECK_THROWS_AS(ChannelGrid(1, GridShape{1, 1}, {std::numeric_limits<float>::infinity()}), ValidationError);
}

TEST_CASE("channel-major layout")
{
    ChannelGrid g(2, GridShape{2, 3});
    g.at(1, 1, 2) = 7.0f;
    CHECK(g.data()[1 * 6 + 1 * 3 + 2] == 7.0f);
    CHECK(g.channel(1)[5] == 7.0f);
    CHECK_THROWS_AS(g.checked_at(2, 0, 0), IndexError);
    CHECK_THROWS_AS(g.checked_at(0, 2, 0), IndexError);
}

TEST_CASE("bilinear_sample")
{
    SUBCASE("node value at integer position")
    {
        ChannelGrid g(1, GridShape{6, 6});
        g.at(0, 4, 3) = 2.5f;
        CHECK(bilinear_sample(g, 0, {3.0, 4.0}) == 2.5f);
    }
    SUBCASE("midpoint of [[0,1],[0,1]]")
    {
        ChannelGrid g(1, GridShape{2, 2}, {0, 1, 0, 1});
        CHECK(bilinear_sample(g, 0, {0.5, 0.5}) == doctest::Approx(0.5));
    }
    SUBCASE("weights 0.75/0.25 along a row")
    {
        ChannelGrid g(1, GridShape{2, 3}, {0, 4, 8, 0, 0, 0});
        CHECK(bilinear_sample(g, 0, {0.25, 0.0}) == doctest::Approx(1.0));
    }
    SUBCASE("clamped outside the grid")
    {
        ChannelGrid g(1, GridShape{2, 2}, {1, 2, 3, 4});
        CHECK(bilinear_sample(g, 0, {-5.0, -5.0}) == 1.0f);
        CHECK(bilinear_sample(g, 0, {9.0, 9.0}) == 4.0f);
        CHECK(bilinear_sample(g, 0, {9.0, 0.0}) == 2.0f);
    }
    SUBCASE("channel out of range")
    {
        ChannelGrid g(2, GridShape{2, 2});
        CHECK_THROWS_AS(bilinear_sample(g, 2, {0, 0}), IndexError);
        CHECK_THROWS_AS(bilinear_sample(g, -1, {0, 0}), IndexError);
    }
}

TEST_CASE("bilinear_sample is linear in grid values")
{
    std::mt19937 rng(11);
    std::uniform_real_distribution<float> val(-3.0f, 3.0f);
    std::uniform_real_distribution<double> pos(0.0, 4.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<float> a(25), b(25), sum(25);
        for (int i = 0; i < 25; ++i) {
            a[i] = val(rng);
            b[i] = val(rng);
            sum[i] = a[i] + b[i];
        }
        const ChannelGrid ga(1, {5, 5}, a), gb(1, {5, 5}, b), gs(1, {5, 5}, sum);
        const Point2 p{pos(rng), pos(rng)};
        CHECK(bilinear_sample(gs, 0, p) ==
              doctest::Approx(bilinear_sample(ga, 0, p) + bilinear_sample(gb, 0, p)).epsilon(1e-5));
    }
}

TEST_CASE("KGTEN encoding")
{
    SUBCASE("1x1x1 grid of 3.5")
    {
        const std::string bytes = encode_tensor(ChannelGrid(1, {1, 1}, {3.5f}));
        const std::string header = "KGTEN\ndtype=f32 order=chw c=1 h=1 w=1\n";
        REQUIRE(bytes.size() == header.size() + 4);
        CHECK(bytes.substr(0, header.size()) == header);
        const unsigned char expected[4] = {0x00, 0x00, 0x60, 0x40};  // 3.5f little-endian
        CHECK(std::memcmp(bytes.data() + header.size(), expected, 4) == 0);
    }
    SUBCASE("zero tensor from hand-written bytes")
    {
        std::string bytes = "KGTEN\ndtype=f32 order=chw c=1 h=2 w=2\n";
        bytes.append(16, '\0');
        const ChannelGrid g = decode_tensor(bytes);
        CHECK(g.channels() == 1);
        CHECK(g.shape() == GridShape{2, 2});
        CHECK(g == ChannelGrid(1, {2, 2}));
    }
    SUBCASE("payload size for 5x512x512")
    {
        const std::string bytes = encode_tensor(ChannelGrid(5, {512, 512}));
        const std::string header = "KGTEN\ndtype=f32 order=chw c=5 h=512 w=512\n";
        CHECK(bytes.size() == header.size() + 5u * 512u * 512u * 4u);
    }
    SUBCASE("errors")
    {
        std::string good = encode_tensor(ChannelGrid(1, {2, 2}));
        CHECK_THROWS_AS(decode_tensor(good.substr(0, good.size() - 4)), TruncationError);
        CHECK_THROWS_AS(decode_tensor(good + "x"), TruncationError);
        CHECK_THROWS_AS(decode_tensor("KGTEM\n" + good.substr(6)), FormatError);
        CHECK_THROWS_AS(decode_tensor("KGTEN\ndtype=f64 order=chw c=1 h=1 w=1\n0000"), FormatError);
        CHECK_THROWS_AS(decode_tensor("KGTEN\ndtype=f32 order=chw c=1 h=x w=1\n0000"), FormatError);
        CHECK_THROWS_AS(decode_tensor("KGTEN\ndtype=f32 order=chw c=0 h=1 w=1\n"), FormatError);
        CHECK_THROWS_AS(decode_tensor("KGTEN\ndtype=f32 order=chw c=1 h=1 w=1 \n0000"), FormatError);

        std::string nan = "KGTEN\ndtype=f32 order=chw c=1 h=1 w=1\n";
        const unsigned char qnan[4] = {0x00, 0x00, 0xC0, 0x7F};
        nan.append(reinterpret_cast<const char*>(qnan), 4);
        CHECK_THROWS_AS(decode_tensor(nan), ValidationError);
    }
}

TEST_CASE("read(write(g)) == g for random grids")
{
    std::mt19937 rng(2024);
    const fs::path path = temp_path("roundtrip.kgten");
    for (int trial = 0; trial < 50; ++trial) {
        const ChannelGrid g = random_grid(rng);
        write_tensor(g, path);
        const ChannelGrid back = read_tensor(path);
        CHECK(back == g);
        CHECK(std::memcmp(back.data().data(), g.data().data(), g.data().size() * sizeof(float)) == 0);
    }
}

TEST_CASE("write_tensor is deterministic and reports I/O failures")
{
    std::mt19937 rng(5);
    const ChannelGrid g = random_grid(rng);
    const fs::path a = temp_path("a.kgten"), b = temp_path("b.kgten");
    write_tensor(g, a);
    write_tensor(g, b);
    CHECK(read_file(a) == read_file(b));
    CHECK_THROWS_AS(write_tensor(g, temp_path("no_such_dir") / "x.kgten"), IoError);
    CHECK_THROWS_AS(read_tensor(temp_path("missing.kgten")), IoError);

    const std::string truncated = encode_tensor(g);
    write_file_atomic(a, truncated.substr(0, truncated.size() - 1));
    try {
        read_tensor(a);
        FAIL("expected TruncationError");
    } catch (const TruncationError& e) {
        CHECK(std::string(e.what()).find(a.string()) != std::string::npos);
    }
}
