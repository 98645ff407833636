#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "doctest.h"

#include "support/testutil.hpp"
#include "turtleid/error.hpp"
#include "turtleid/hog.hpp"

using namespace turtleid;

namespace {

// Finite-difference oracle, written independently of compute_gradients.
void gradient_oracle(const GrayImage& img, int x, int y, double& mag, double& orient) {
    auto px = [&](int xx, int yy) {
        xx = std::clamp(xx, 0, img.width - 1);
        yy = std::clamp(yy, 0, img.height - 1);
        return img.pixels[static_cast<std::size_t>(yy) * img.width + xx];
    };
    double gx = (px(x + 1, y) - px(x - 1, y)) * 0.5;
    double gy = (px(x, y + 1) - px(x, y - 1)) * 0.5;
    mag = std::sqrt(gx * gx + gy * gy);
    orient = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
    if (orient < 0.0) orient += 180.0;
    if (orient >= 180.0) orient -= 180.0;
}

double block_norm(const HogDescriptor& d, int block_index) {
    int len = d.params.block * d.params.block * d.params.bins;
    double e = 0.0;
    for (int i = 0; i < len; ++i) {
        double v = d.values[static_cast<std::size_t>(block_index * len + i)];
        e += v * v;
    }
    return std::sqrt(e);
}

int block_count(const HogDescriptor& d) {
    return static_cast<int>(d.values.size()) / (d.params.block * d.params.block * d.params.bins);
}

}  // namespace

TEST_SUITE("hog") {

TEST_CASE("descriptor length closed form") {
    CHECK(descriptor_len(HogParams{}) == 5940);  // 11 * 15 * 4 * 9

    HogParams narrow;
    narrow.window_w = 64;
    CHECK(descriptor_len(narrow) == 3780);

    HogParams tiny;
    tiny.window_w = 16;
    tiny.window_h = 16;
    CHECK(descriptor_len(tiny) == 36);  // single block
}

TEST_CASE("window not divisible by cell raises IncompatibleGeometry") {
    HogParams p;
    p.window_w = 97;
    CHECK_THROWS_AS(descriptor_len(p), IncompatibleGeometry);
    p.window_w = 8;
    p.window_h = 8;  // one cell, no complete 2x2 block
    CHECK_THROWS_AS(descriptor_len(p), IncompatibleGeometry);
}

TEST_CASE("constant images have zero gradients") {
    GradientField g = compute_gradients(GrayImage(12, 8, 57.f));
    for (double m : g.magnitude) CHECK(m == 0.0);
}

TEST_CASE("horizontal ramp has unit gradient pointing at 0 degrees") {
    GrayImage img(16, 16);
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x) img.at(x, y) = x;
    GradientField g = compute_gradients(img);
    for (int y = 0; y < 16; ++y)
        for (int x = 1; x < 15; ++x) {
            CHECK(g.magnitude[g.idx(x, y)] == doctest::Approx(1.0));
            CHECK(g.orientation[g.idx(x, y)] == doctest::Approx(0.0));
        }
    // replicated borders see half the slope
    CHECK(g.magnitude[g.idx(0, 3)] == doctest::Approx(0.5));
}

TEST_CASE("vertical step edge confines gradient to the two-pixel band") {
    GrayImage img(16, 16);
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x) img.at(x, y) = x < 8 ? 10.0 : 200.0;
    GradientField g = compute_gradients(img);
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x) {
            double mag_oracle, orient_oracle;
            gradient_oracle(img, x, y, mag_oracle, orient_oracle);
            CHECK(g.magnitude[g.idx(x, y)] == mag_oracle);
            if (x == 7 || x == 8) {
                CHECK(g.magnitude[g.idx(x, y)] == doctest::Approx(95.0));
                CHECK(g.orientation[g.idx(x, y)] == doctest::Approx(0.0));
            } else {
                CHECK(g.magnitude[g.idx(x, y)] == 0.0);
            }
        }
}

TEST_CASE("gradients equal the finite-difference oracle exactly on 100 random images") {
    for (int trial = 0; trial < 100; ++trial) {
        GrayImage img = testutil::random_gray(16, 16, 1000 + static_cast<std::uint64_t>(trial));
        GradientField g = compute_gradients(img);
        for (int y = 0; y < 16; ++y)
            for (int x = 0; x < 16; ++x) {
                double mag, orient;
                gradient_oracle(img, x, y, mag, orient);
                CHECK(g.magnitude[g.idx(x, y)] == mag);
                CHECK(g.orientation[g.idx(x, y)] == orient);
            }
    }
}

TEST_CASE("zero magnitudes give zero histograms") {
    HogParams p;
    p.window_w = 16;
    p.window_h = 16;
    GradientField g;
    g.width = 16;
    g.height = 16;
    g.magnitude.assign(256, 0.0);
    g.orientation.assign(256, 0.0);
    CellGrid cells = cell_histograms(g, p);
    for (double v : cells.histograms) CHECK(v == 0.0);
}

TEST_CASE("votes land on bin centers whole and between centers split") {
    HogParams p;
    p.window_w = 16;
    p.window_h = 16;
    GradientField g;
    g.width = 16;
    g.height = 16;
    g.magnitude.assign(256, 0.0);
    g.orientation.assign(256, 0.0);

    SUBCASE("orientation exactly at the bin 0 center") {
        g.magnitude[0] = 1.0;
        g.orientation[0] = 10.0;
        CellGrid cells = cell_histograms(g, p);
        CHECK(cells.at(0, 0, 0) == doctest::Approx(1.0));
        for (int b = 1; b < 9; ++b) CHECK(cells.at(0, 0, b) == 0.0);
    }
    SUBCASE("orientation on the boundary splits half and half") {
        g.magnitude[0] = 1.0;
        g.orientation[0] = 20.0;
        CellGrid cells = cell_histograms(g, p);
        CHECK(cells.at(0, 0, 0) == doctest::Approx(0.5));
        CHECK(cells.at(0, 0, 1) == doctest::Approx(0.5));
    }
    SUBCASE("orientation below the first center wraps circularly") {
        g.magnitude[0] = 1.0;
        g.orientation[0] = 0.0;
        CellGrid cells = cell_histograms(g, p);
        CHECK(cells.at(0, 0, 0) == doctest::Approx(0.5));
        CHECK(cells.at(0, 0, 8) == doctest::Approx(0.5));
    }
}

TEST_CASE("all-zero cells normalize to an all-zero descriptor") {
    HogParams p;
    p.window_w = 16;
    p.window_h = 16;
    CellGrid cells;
    cells.cells_x = 2;
    cells.cells_y = 2;
    cells.bins = 9;
    cells.histograms.assign(36, 0.0);
    HogDescriptor d = block_normalize(cells, p);
    REQUIRE(d.values.size() == 36);
    for (float v : d.values) CHECK(v == 0.f);
}

TEST_CASE("a dominant single entry normalizes to about 1") {
    HogParams p;
    p.window_w = 16;
    p.window_h = 16;
    CellGrid cells;
    cells.cells_x = 2;
    cells.cells_y = 2;
    cells.bins = 9;
    cells.histograms.assign(36, 0.0);
    cells.histograms[4] = 50.0;  // far above epsilon
    HogDescriptor d = block_normalize(cells, p);
    CHECK(d.values[4] == doctest::Approx(1.0).epsilon(1e-6));
    for (std::size_t i = 0; i < d.values.size(); ++i)
        if (i != 4) CHECK(d.values[i] == 0.f);
}

TEST_CASE("default geometry emits 165 blocks") {
    GrayImage img = testutil::random_gray(96, 128, 77);
    HogDescriptor d = compute_hog(img);
    CHECK(block_count(d) == 165);
    CHECK(d.values.size() == 5940);
}

TEST_CASE("constant image gives a zero descriptor") {
    HogDescriptor d = compute_hog(GrayImage(96, 128, 123.0));
    for (float v : d.values) CHECK(v == 0.f);
}

TEST_CASE("wrong input resolution raises IncompatibleGeometry") {
    CHECK_THROWS_AS(compute_hog(GrayImage(95, 128)), IncompatibleGeometry);
}

TEST_CASE("every block norm stays at or below 1") {
    for (int trial = 0; trial < 10; ++trial) {
        GrayImage img = testutil::random_gray(96, 128, 500 + static_cast<std::uint64_t>(trial));
        HogDescriptor d = compute_hog(img);
        CHECK(static_cast<int>(d.values.size()) == descriptor_len(d.params));
        for (float v : d.values) CHECK(v >= 0.f);
        for (int b = 0; b < block_count(d); ++b) CHECK(block_norm(d, b) <= 1.0 + 1e-6);
    }
}

TEST_CASE("intensity gain cancels out away from epsilon-dominated blocks") {
    // random texture keeps every block's energy far above epsilon
    GrayImage img = testutil::random_gray(96, 128, 31, 20.f, 120.f);
    HogDescriptor base = compute_hog(img);
    for (double c : {0.5, 1.3, 2.0}) {
        GrayImage scaled(img.width, img.height);
        for (std::size_t i = 0; i < img.pixels.size(); ++i)
            scaled.pixels[i] = img.pixels[i] * c;
        HogDescriptor d = compute_hog(scaled);
        double worst = 0.0;
        for (std::size_t i = 0; i < d.values.size(); ++i)
            worst = std::max(worst, std::abs(static_cast<double>(d.values[i]) - base.values[i]));
        CHECK(worst < 1e-5);
    }
}

TEST_CASE("identical input bytes give bitwise-identical descriptors") {
    GrayImage img = testutil::random_gray(96, 128, 99);
    HogDescriptor a = compute_hog(img);
    HogDescriptor b = compute_hog(img);
    REQUIRE(a.values.size() == b.values.size());
    CHECK(std::memcmp(a.values.data(), b.values.data(), a.values.size() * sizeof(float)) == 0);
}

TEST_CASE("hog distance basics") {
    HogParams p;
    p.window_w = 16;
    p.window_h = 16;
    HogDescriptor a, b;
    a.params = b.params = p;
    a.values.assign(36, 0.f);
    b.values.assign(36, 0.f);
    CHECK(hog_distance(a, a) == 0.0);
    b.values[7] = 3.f;
    CHECK(hog_distance(a, b) == doctest::Approx(3.0));

    HogDescriptor c;
    c.params = p;
    c.values.assign(35, 0.f);
    CHECK_THROWS_AS(hog_distance(a, c), LengthMismatch);
}

TEST_CASE("binary cache round-trips bit for bit") {
    GrayImage img = testutil::random_gray(96, 128, 13);
    HogDescriptor d = compute_hog(img);
    auto path = std::filesystem::temp_directory_path() / "turtleid_desc.hogf";
    save_descriptor(d, path);
    HogDescriptor back = load_descriptor(path);
    REQUIRE(back.values.size() == d.values.size());
    CHECK(std::memcmp(back.values.data(), d.values.data(), d.values.size() * sizeof(float)) == 0);

    HogParams other;
    other.window_w = 64;
    CHECK_THROWS_AS(load_descriptor(path, other), DecodeError);
}

TEST_CASE("corrupt cache files are rejected") {
    auto path = std::filesystem::temp_directory_path() / "turtleid_bad.hogf";
    std::ofstream(path, std::ios::binary) << "definitely not a descriptor";
    CHECK_THROWS_AS(load_descriptor(path), DecodeError);
}

TEST_CASE("json export carries geometry and values") {
    GrayImage img = testutil::random_gray(96, 128, 14);
    HogDescriptor d = compute_hog(img);
    auto j = descriptor_to_json(d);
    CHECK(j["length"] == 5940);
    CHECK(j["values"].size() == 5940);
    CHECK(j["params"]["cell"] == 8);
}

}  // TEST_SUITE
