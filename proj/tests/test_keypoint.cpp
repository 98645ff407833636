#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "doctest.h"

#include "support/testutil.hpp"
#include "turtleid/brief_pattern.hpp"
#include "turtleid/error.hpp"
#include "turtleid/imgproc.hpp"
#include "turtleid/keypoint.hpp"

using namespace turtleid;

namespace {

// Brute-force FAST-9 segment test over every eligible pixel, coded from
// the definition (independent of detect_fast's bitmask path).
bool oracle_segment_test(const GrayImage& img, int x, int y, double t) {
    static const int circle[16][2] = {{0, -3}, {1, -3}, {2, -2}, {3, -1}, {3, 0},   {3, 1},
                                      {2, 2},  {1, 3},  {0, 3},  {-1, 3}, {-2, 2},  {-3, 1},
                                      {-3, 0}, {-3, -1}, {-2, -2}, {-1, -3}};
    double p = img.at(x, y);
    for (int start = 0; start < 16; ++start) {
        bool all_bright = true, all_dark = true;
        for (int i = 0; i < 9; ++i) {
            const int* o = circle[(start + i) % 16];
            double v = img.at(x + o[0], y + o[1]);
            if (!(v > p + t)) all_bright = false;
            if (!(v < p - t)) all_dark = false;
        }
        if (all_bright || all_dark) return true;
    }
    return false;
}

GrayImage squares_image() {
    GrayImage img(96, 96, 30.0);
    // well-separated bright 3x3 squares away from the margin; the graded
    // fill gives every pixel a distinct corner response, so non-maximal
    // suppression has a unique winner per square
    for (auto [cx, cy] : {std::pair{30, 30}, {64, 28}, {32, 66}, {70, 68}})
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx)
                img.at(cx + dx, cy + dy) = 200 + dx * 5 + dy * 9;
    return img;
}

BinaryDescriptor random_descriptor(std::mt19937_64& rng) {
    BinaryDescriptor d;
    for (auto& w : d.bits) w = rng();
    return d;
}

// A grid of small squares whose pixels are individually random, so every
// corner has a distinctive neighbourhood.
GrayImage corner_rich_image(int w, int h, std::uint64_t seed) {
    GrayImage img(w, h, 20.0);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> level(100.0, 250.0);
    for (int gy = 20; gy < h - 20; gy += 12)
        for (int gx = 20; gx < w - 20; gx += 12)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) img.at(gx + dx, gy + dy) = level(rng);
    return img;
}

}  // namespace

TEST_SUITE("keypoint") {

TEST_CASE("constant images yield no keypoints") {
    CHECK(detect_fast(GrayImage(64, 64, 128.0)).empty());
}

TEST_CASE("small bright squares produce corners that pass the brute-force oracle") {
    GrayImage img = squares_image();
    auto kps = detect_fast(img, 20.0, 500);
    REQUIRE(!kps.empty());
    for (const auto& kp : kps)
        CHECK(oracle_segment_test(img, static_cast<int>(kp.x), static_cast<int>(kp.y), 20.0));
    // every square attracts at least one keypoint within 2 pixels
    for (auto [cx, cy] : {std::pair{30, 30}, {64, 28}, {32, 66}, {70, 68}}) {
        bool found = false;
        for (const auto& kp : kps)
            if (std::abs(kp.x - cx) <= 2.f && std::abs(kp.y - cy) <= 2.f) found = true;
        CHECK(found);
    }
    // and conversely, every oracle corner is represented nearby (NMS keeps
    // one winner per 3x3 square)
    for (int y = kKeypointMargin; y < img.height - kKeypointMargin; ++y)
        for (int x = kKeypointMargin; x < img.width - kKeypointMargin; ++x)
            if (oracle_segment_test(img, x, y, 20.0)) {
                bool near = false;
                for (const auto& kp : kps)
                    if (std::abs(kp.x - x) <= 3.f && std::abs(kp.y - y) <= 3.f) near = true;
                CHECK(near);
            }
}

TEST_CASE("keypoints follow a 90-degree rotation within a pixel") {
    GrayImage img = squares_image();
    GrayImage rot = rotate(img, 90.0);
    auto kps = detect_fast(img, 20.0, 500);
    auto kps_rot = detect_fast(rot, 20.0, 500);
    REQUIRE(!kps.empty());
    CHECK(kps.size() == kps_rot.size());
    for (const auto& kp : kps) {
        // (x, y) lands on (y, W-1-x) after the CCW quarter turn
        float ex = kp.y, ey = static_cast<float>(img.width - 1) - kp.x;
        bool found = false;
        for (const auto& rkp : kps_rot)
            if (std::abs(rkp.x - ex) <= 1.f && std::abs(rkp.y - ey) <= 1.f) found = true;
        CHECK(found);
    }
}

TEST_CASE("detection is deterministic") {
    GrayImage img = testutil::random_gray(80, 80, 21);
    auto a = detect_fast(img, 20.0, 100);
    auto b = detect_fast(img, 20.0, 100);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].x == b[i].x);
        CHECK(a[i].y == b[i].y);
        CHECK(a[i].response == b[i].response);
        CHECK(a[i].orientation == b[i].orientation);
    }
}

TEST_CASE("smoothed low-contrast carapace-like images starve the detector") {
    // scute-like ridges at ~8 intensity levels of contrast
    GrayImage img(96, 128, 120.0);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            img.at(x, y) = 120.0 + 4.0 * (std::sin(x / 7.0) + std::sin(y / 9.0));
    GrayImage smoothed = gaussian_smooth(img, gaussian_kernel(4, 1.0));
    CHECK(detect_fast(smoothed, 20.0, 500).size() < 5);
}

TEST_CASE("pattern table file matches the embedded table") {
    auto file = load_brief_pattern(std::string(TURTLEID_DATA_DIR) + "/brief_pattern.txt");
    const auto& embedded = brief_pattern();
    REQUIRE(file.size() == embedded.size());
    for (std::size_t i = 0; i < file.size(); ++i) {
        CHECK(file[i].x1 == embedded[i].x1);
        CHECK(file[i].y1 == embedded[i].y1);
        CHECK(file[i].x2 == embedded[i].x2);
        CHECK(file[i].y2 == embedded[i].y2);
    }
}

TEST_CASE("constant patches describe as all-zero bits") {
    GrayImage img(64, 64, 99.0);
    Keypoint kp{32.f, 32.f, 1.0, 0.0};
    BinaryDescriptor d = describe_brief(img, kp);
    for (auto w : d.bits) CHECK(w == 0ull);
}

TEST_CASE("patches too close to the border are rejected") {
    GrayImage img(64, 64, 0.0);
    CHECK_THROWS_AS(describe_brief(img, Keypoint{10.f, 32.f, 1.0, 0.0}), PatchOutOfBounds);
}

TEST_CASE("the pattern rotates with the keypoint: 12-degree synthetic rotation is exact") {
    // Build B random, then pull A's values through the rotated sampling
    // map so descriptor(A, 0 deg) must equal descriptor(B, 12 deg).
    const int c = 40;
    GrayImage b_img = testutil::random_gray(80, 80, 55);
    GrayImage a_img(80, 80, 0.0);
    double rad = 12.0 * std::numbers::pi / 180.0;
    double co = std::cos(rad), si = std::sin(rad);
    const auto& pattern = brief_pattern();
    auto pull = [&](int px, int py) {
        int rx = static_cast<int>(std::lround(px * co - py * si));
        int ry = static_cast<int>(std::lround(px * si + py * co));
        return b_img.at(c + rx, c + ry);
    };
    for (const auto& p : pattern) {
        a_img.at(c + p.x1, c + p.y1) = pull(p.x1, p.y1);
        a_img.at(c + p.x2, c + p.y2) = pull(p.x2, p.y2);
    }
    BinaryDescriptor da = describe_brief(a_img, Keypoint{c, c, 1.0, 0.0});
    BinaryDescriptor db = describe_brief(b_img, Keypoint{c, c, 1.0, 12.0});
    CHECK(da == db);
}

TEST_CASE("inverting a patch complements every non-tied bit") {
    GrayImage img = testutil::random_gray(64, 64, 66);
    GrayImage inv(64, 64);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) inv.pixels[i] = 255.0 - img.pixels[i];
    Keypoint kp{32.f, 32.f, 1.0, 0.0};
    BinaryDescriptor d = describe_brief(img, kp);
    BinaryDescriptor di = describe_brief(inv, kp);

    const auto& pattern = brief_pattern();
    for (int i = 0; i < kBriefBits; ++i) {
        const auto& p = pattern[static_cast<std::size_t>(i)];
        double v1 = img.at(32 + p.x1, 32 + p.y1), v2 = img.at(32 + p.x2, 32 + p.y2);
        bool bit = (d.bits[static_cast<std::size_t>(i) / 64] >> (i % 64)) & 1;
        bool bit_inv = (di.bits[static_cast<std::size_t>(i) / 64] >> (i % 64)) & 1;
        if (v1 == v2)
            CHECK((!bit && !bit_inv));
        else
            CHECK(bit != bit_inv);
    }
}

TEST_CASE("hamming distance is a metric") {
    std::mt19937_64 rng(77);
    BinaryDescriptor zero;
    CHECK(hamming_distance(zero, zero) == 0);
    for (int trial = 0; trial < 200; ++trial) {
        BinaryDescriptor a = random_descriptor(rng);
        BinaryDescriptor b = random_descriptor(rng);
        BinaryDescriptor c = random_descriptor(rng);
        CHECK(hamming_distance(a, a) == 0);
        CHECK(hamming_distance(a, b) == hamming_distance(b, a));
        CHECK(hamming_distance(a, c) <= hamming_distance(a, b) + hamming_distance(b, c));
        CHECK(hamming_distance(a, b) >= 0);
        CHECK(hamming_distance(a, b) <= 256);
    }
}

TEST_CASE("a clear nearest neighbour passes the ratio test") {
    std::mt19937_64 rng(88);
    BinaryDescriptor q = random_descriptor(rng);
    BinaryDescriptor far1 = q, far2 = q;
    for (int w = 0; w < 4; ++w) {
        far1.bits[static_cast<std::size_t>(w)] ^= 0xffffffffull;          // distance 128
        far2.bits[static_cast<std::size_t>(w)] ^= 0xffffffff00000000ull;  // distance 128
    }
    auto result = match_keypoints({q}, {q, far1, far2}, 0.5);
    REQUIRE(result.positive_match_count == 1);
    CHECK(result.matches[0].query_index == 0);
    CHECK(result.matches[0].gallery_index == 0);
    CHECK(result.matches[0].distance == 0);
}

TEST_CASE("equidistant gallery entries tie at ratio 1 and are rejected") {
    BinaryDescriptor q;
    BinaryDescriptor g1, g2;
    g1.bits[0] = 0xff;        // distance 8
    g2.bits[1] = 0xff;        // distance 8
    auto result = match_keypoints({q}, {g1, g2}, 0.99);
    CHECK(result.positive_match_count == 0);
}

TEST_CASE("galleries below two descriptors cannot run the ratio test") {
    BinaryDescriptor q;
    CHECK_THROWS_AS(match_keypoints({q}, {q}, 0.8), EmptyGallery);
    CHECK_THROWS_AS(match_keypoints({q}, {}, 0.8), EmptyGallery);
}

TEST_CASE("each query index appears at most once in the match list") {
    std::mt19937_64 rng(99);
    std::vector<BinaryDescriptor> query, gallery;
    for (int i = 0; i < 30; ++i) query.push_back(random_descriptor(rng));
    for (int i = 0; i < 50; ++i) gallery.push_back(random_descriptor(rng));
    auto result = match_keypoints(query, gallery, 0.95);
    std::set<int> seen;
    for (const auto& m : result.matches) CHECK(seen.insert(m.query_index).second);
    CHECK(result.positive_match_count == static_cast<int>(result.matches.size()));
}

TEST_CASE("an image matched with itself recovers nearly all keypoints") {
    GrayImage img = corner_rich_image(96, 128, 123);
    GrayImage smoothed = gaussian_smooth(img, gaussian_kernel(4, 1.0));
    auto kps = detect_fast(smoothed, 20.0, 500);
    REQUIRE(kps.size() >= 10);
    int score = keypoint_image_score(img, img, 0.8);
    CHECK(score >= static_cast<int>(0.9 * static_cast<double>(kps.size())));
}

TEST_CASE("two constant images score zero") {
    CHECK(keypoint_image_score(GrayImage(64, 64, 50.0), GrayImage(64, 64, 90.0), 0.8) == 0);
}

TEST_CASE("texture matched against unrelated noise stays under 10 percent") {
    GrayImage textured = corner_rich_image(96, 96, 314);
    GrayImage smoothed = gaussian_smooth(textured, gaussian_kernel(4, 1.0));
    std::size_t detected = detect_fast(smoothed, 20.0, 500).size();
    REQUIRE(detected > 0);
    int total = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        GrayImage noise = testutil::random_gray(96, 96, 7000 + seed);
        total += keypoint_image_score(textured, noise, 0.8);
    }
    CHECK(total < static_cast<int>(0.10 * 20 * static_cast<double>(detected)) + 1);
}

}  // TEST_SUITE
