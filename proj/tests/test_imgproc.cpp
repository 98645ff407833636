#include <cmath>
#include <random>

#include "doctest.h"

#include "support/testutil.hpp"
#include "turtleid/error.hpp"
#include "turtleid/imgproc.hpp"

using namespace turtleid;

namespace {

GrayImage smooth_wave(int w, int h) {
    GrayImage img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            img.at(x, y) = 100.0 + 80.0 * std::sin(x / 10.0) * std::cos(y / 12.0);
    return img;
}

// Direct convolution written from the definition, independent of the
// library path.
GrayImage convolve_oracle(const GrayImage& img, const Kernel& k) {
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int j = 0; j < k.size; ++j)
                for (int i = 0; i < k.size; ++i)
                    acc += k.weights[static_cast<std::size_t>(j) * k.size + i] *
                           img.at_clamped(x + i - k.anchor, y + j - k.anchor);
            out.at(x, y) = acc;
        }
    return out;
}

// Kernel composition: applying a then b equals one pass with this kernel.
Kernel compose(const Kernel& a, const Kernel& b) {
    Kernel c;
    c.size = a.size + b.size - 1;
    c.anchor = a.anchor + b.anchor;
    c.weights.assign(static_cast<std::size_t>(c.size) * c.size, 0.0);
    for (int ja = 0; ja < a.size; ++ja)
        for (int ia = 0; ia < a.size; ++ia)
            for (int jb = 0; jb < b.size; ++jb)
                for (int ib = 0; ib < b.size; ++ib)
                    c.weights[static_cast<std::size_t>(ja + jb) * c.size + (ia + ib)] +=
                        a.weights[static_cast<std::size_t>(ja) * a.size + ia] *
                        b.weights[static_cast<std::size_t>(jb) * b.size + ib];
    return c;
}

// Independent bilinear resize on the same half-pixel grid.
double resize_oracle_at(const GrayImage& img, int out_w, int out_h, int x, int y) {
    double sx = (x + 0.5) * img.width / static_cast<double>(out_w) - 0.5;
    double sy = (y + 0.5) * img.height / static_cast<double>(out_h) - 0.5;
    int x0 = static_cast<int>(std::floor(sx)), y0 = static_cast<int>(std::floor(sy));
    double ax = sx - x0, ay = sy - y0;
    double v = 0.0;
    for (int dy = 0; dy <= 1; ++dy)
        for (int dx = 0; dx <= 1; ++dx) {
            double w = (dx ? ax : 1.0 - ax) * (dy ? ay : 1.0 - ay);
            v += w * img.at_clamped(x0 + dx, y0 + dy);
        }
    return v;
}

}  // namespace

TEST_SUITE("imgproc") {

TEST_CASE("grayscale maps white to 255, black to 0 and pure red to 76.245") {
    RgbImage img(2, 2);
    auto fill = [&](int x, int y, int r, int g, int b) {
        auto* p = img.px(x, y);
        p[0] = static_cast<std::uint8_t>(r);
        p[1] = static_cast<std::uint8_t>(g);
        p[2] = static_cast<std::uint8_t>(b);
    };
    fill(0, 0, 255, 255, 255);
    fill(1, 0, 0, 0, 0);
    fill(0, 1, 255, 0, 0);
    fill(1, 1, 0, 255, 0);
    GrayImage g = to_grayscale(img);
    CHECK(g.at(0, 0) == doctest::Approx(255.0));
    CHECK(g.at(1, 0) == doctest::Approx(0.0));
    CHECK(g.at(0, 1) == doctest::Approx(76.245));  // 0.299 * 255
    CHECK(g.at(1, 1) == doctest::Approx(149.685)); // 0.587 * 255
}

TEST_CASE("rotate by 0 is the identity") {
    GrayImage img = testutil::random_gray(13, 9, 1);
    GrayImage out = rotate(img, 0.0);
    REQUIRE(out.same_size(img));
    CHECK(testutil::max_abs_diff(out, img) == 0.0);
}

TEST_CASE("rotate by 90 matches the index-permutation oracle") {
    GrayImage img = testutil::random_gray(11, 7, 2);
    GrayImage out = rotate(img, 90.0);
    REQUIRE(out.width == img.height);
    REQUIRE(out.height == img.width);
    // CCW quarter turn: output (x', y') reads input (W-1-y', x')
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x)
            CHECK(out.at(x, y) == img.at(img.width - 1 - y, x));
}

TEST_CASE("rotate by 360 equals rotate by 0 within 1e-6") {
    GrayImage img = testutil::random_gray(16, 10, 3);
    GrayImage out = rotate(img, 360.0);
    REQUIRE(out.same_size(img));
    CHECK(testutil::max_abs_diff(out, img) < 1e-6);
}

TEST_CASE("rotate there and back loses only interpolation") {
    GrayImage img = smooth_wave(120, 120);
    GrayImage once = rotate(img, 30.0);
    GrayImage back = rotate(once, -30.0);
    REQUIRE(back.width >= img.width);
    REQUIRE(back.height >= img.height);
    REQUIRE((back.width - img.width) % 2 == 0);  // integral centering offset
    REQUIRE((back.height - img.height) % 2 == 0);
    int ox = (back.width - img.width) / 2;
    int oy = (back.height - img.height) / 2;
    GrayImage cropped = crop_roi(back, {ox, oy, img.width, img.height});
    const int margin = 6;
    double worst = 0.0;
    for (int y = margin; y < img.height - margin; ++y)
        for (int x = margin; x < img.width - margin; ++x)
            worst = std::max(worst, std::abs(static_cast<double>(cropped.at(x, y)) - img.at(x, y)));
    CHECK(worst <= 2.0);
}

TEST_CASE("full-image crop is the identity, 1x1 crop picks one pixel") {
    GrayImage img = testutil::random_gray(8, 6, 4);
    CHECK(testutil::max_abs_diff(crop_roi(img, {0, 0, 8, 6}), img) == 0.0);
    GrayImage one = crop_roi(img, {0, 0, 1, 1});
    CHECK(one.width == 1);
    CHECK(one.at(0, 0) == img.at(0, 0));
}

TEST_CASE("crop past the edge raises RoiOutOfBounds") {
    GrayImage img(8, 6);
    CHECK_THROWS_AS(crop_roi(img, {4, 0, 5, 6}), RoiOutOfBounds);
    CHECK_THROWS_AS(crop_roi(img, {0, 4, 8, 3}), RoiOutOfBounds);
    CHECK_THROWS_AS(crop_roi(img, {-1, 0, 4, 4}), RoiOutOfBounds);
}

TEST_CASE("nested crops compose") {
    GrayImage img = testutil::random_gray(20, 16, 5);
    RoiRect outer{3, 2, 12, 10};
    RoiRect inner{4, 1, 5, 6};
    GrayImage two_step = crop_roi(crop_roi(img, outer), inner);
    GrayImage one_step = crop_roi(img, {outer.x + inner.x, outer.y + inner.y, inner.w, inner.h});
    CHECK(testutil::max_abs_diff(two_step, one_step) == 0.0);
}

TEST_CASE("default 4x4 kernel is normalized with the documented anchor") {
    Kernel k = gaussian_kernel(4, 1.0);
    CHECK(k.size == 4);
    CHECK(k.anchor == 1);
    double sum = 0.0;
    for (double w : k.weights) sum += w;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    // symmetric in both axes
    CHECK(k.at(0, 0) == doctest::Approx(k.at(3, 3)));
    CHECK(k.at(1, 0) == doctest::Approx(k.at(2, 3)));
}

TEST_CASE("smoothing preserves constant images exactly") {
    GrayImage img(10, 10, 42.5);
    GrayImage out = gaussian_smooth(img, gaussian_kernel(4, 1.0));
    for (double v : out.pixels) CHECK(v == doctest::Approx(42.5).epsilon(1e-9));
}

TEST_CASE("impulse response reproduces the kernel weights (direct convolution oracle)") {
    Kernel k = gaussian_kernel(4, 1.0);
    GrayImage img(17, 15, 0.0);
    img.at(8, 7) = 1.0;
    GrayImage out = gaussian_smooth(img, k);
    GrayImage expected = convolve_oracle(img, k);
    CHECK(testutil::max_abs_diff(out, expected) < 1e-12);
    // the impulse spreads the weights around itself
    CHECK(out.at(8, 7) == doctest::Approx(k.at(1, 1)));
    CHECK(out.at(7, 6) == doctest::Approx(k.at(2, 2)));
    CHECK(out.at(9, 8) == doctest::Approx(k.at(0, 0)));
}

TEST_CASE("double smoothing equals one pass with the self-convolved kernel") {
    Kernel k = gaussian_kernel(4, 1.0);
    Kernel kk = compose(k, k);
    // constant border band keeps edge replication out of the comparison
    GrayImage img = testutil::random_gray(24, 20, 6);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            if (x < 6 || y < 6 || x >= img.width - 6 || y >= img.height - 6) img.at(x, y) = 90.0;
    GrayImage twice = gaussian_smooth(gaussian_smooth(img, k), k);
    GrayImage composed = gaussian_smooth(img, kk);
    CHECK(testutil::max_abs_diff(twice, composed) < 1e-6);
}

TEST_CASE("smoothing stays within the input range") {
    GrayImage img = testutil::random_gray(15, 11, 7);
    double lo = 255.0, hi = 0.0;
    for (double v : img.pixels) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    for (int size : {3, 4, 5}) {
        GrayImage out = gaussian_smooth(img, gaussian_kernel(size, 1.0));
        for (double v : out.pixels) {
            CHECK(v >= lo - 1e-9);
            CHECK(v <= hi + 1e-9);
        }
    }
}

TEST_CASE("unnormalized kernels are rejected") {
    Kernel k = gaussian_kernel(4, 1.0);
    k.weights[0] += 0.5;
    CHECK_THROWS_AS(gaussian_smooth(GrayImage(4, 4), k), Error);
}

TEST_CASE("resize to the same size is the identity") {
    GrayImage img = testutil::random_gray(12, 9, 8);
    CHECK(testutil::max_abs_diff(resize(img, 12, 9), img) < 1e-6);
}

TEST_CASE("resize keeps constants constant") {
    GrayImage img(7, 5, 33.0);
    GrayImage out = resize(img, 19, 3);
    for (double v : out.pixels) CHECK(v == doctest::Approx(33.0));
}

TEST_CASE("2x2 checkerboard averaged into one pixel gives 127.5") {
    GrayImage img(2, 2);
    img.at(0, 0) = 0.0;
    img.at(1, 0) = 255.0;
    img.at(0, 1) = 255.0;
    img.at(1, 1) = 0.0;
    GrayImage out = resize(img, 1, 1);
    CHECK(out.at(0, 0) == doctest::Approx(127.5));
    CHECK(out.at(0, 0) == doctest::Approx(resize_oracle_at(img, 1, 1, 0, 0)));
}

TEST_CASE("resize matches the brute-force bilinear oracle") {
    GrayImage img = testutil::random_gray(14, 10, 9);
    for (auto [w, h] : {std::pair{7, 5}, {29, 3}, {14, 10}, {96, 128}}) {
        GrayImage out = resize(img, w, h);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                CHECK(out.at(x, y) == doctest::Approx(resize_oracle_at(img, w, h, x, y)).epsilon(1e-9));
    }
}

TEST_CASE("degenerate resize targets are rejected") {
    CHECK_THROWS_AS(resize(GrayImage(4, 4), 0, 4), Error);
}

}  // TEST_SUITE
