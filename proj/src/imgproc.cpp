#include "turtleid/imgproc.hpp"

#include <cmath>
#include <numbers>

#include "turtleid/error.hpp"

namespace turtleid {

namespace {

constexpr double kNormTolerance = 1e-9;

void require_normalized(const Kernel& k) {
    double sum = 0.0;
    for (double w : k.weights) sum += w;
    if (std::abs(sum - 1.0) > kNormTolerance) throw Error("kernel weights must sum to 1");
}

// Bilinear sample treating everything outside the source as 0.
double sample_or_zero(const GrayImage& img, double sx, double sy) {
    double fx = std::floor(sx), fy = std::floor(sy);
    int x0 = static_cast<int>(fx), y0 = static_cast<int>(fy);
    double ax = sx - fx, ay = sy - fy;
    auto tap = [&](int x, int y) -> double {
        if (x < 0 || y < 0 || x >= img.width || y >= img.height) return 0.0;
        return img.at(x, y);
    };
    double top = tap(x0, y0) * (1.0 - ax) + tap(x0 + 1, y0) * ax;
    double bot = tap(x0, y0 + 1) * (1.0 - ax) + tap(x0 + 1, y0 + 1) * ax;
    return top * (1.0 - ay) + bot * ay;
}

// Bilinear sample with edge replication.
double sample_clamped(const GrayImage& img, double sx, double sy) {
    double fx = std::floor(sx), fy = std::floor(sy);
    int x0 = static_cast<int>(fx), y0 = static_cast<int>(fy);
    double ax = sx - fx, ay = sy - fy;
    double top = img.at_clamped(x0, y0) * (1.0 - ax) + img.at_clamped(x0 + 1, y0) * ax;
    double bot = img.at_clamped(x0, y0 + 1) * (1.0 - ax) + img.at_clamped(x0 + 1, y0 + 1) * ax;
    return top * (1.0 - ay) + bot * ay;
}

double snap_trig(double v) {
    for (double target : {-1.0, 0.0, 1.0})
        if (std::abs(v - target) < 1e-12) return target;
    return v;
}

}  // namespace

Kernel gaussian_kernel(int size, double sigma) {
    if (size < 1) throw Error("kernel size must be >= 1");
    if (!(sigma > 0.0)) throw Error("sigma must be positive");
    Kernel k;
    k.size = size;
    k.anchor = (size - 1) / 2;
    k.weights.resize(static_cast<std::size_t>(size) * size);
    double half = (size - 1) / 2.0;
    double sum = 0.0;
    for (int j = 0; j < size; ++j)
        for (int i = 0; i < size; ++i) {
            double dx = i - half, dy = j - half;
            double w = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            k.weights[static_cast<std::size_t>(j) * size + i] = w;
            sum += w;
        }
    for (double& w : k.weights) w /= sum;
    return k;
}

GrayImage to_grayscale(const RgbImage& img) {
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const std::uint8_t* p = img.px(x, y);
            out.at(x, y) = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
        }
    return out;
}

GrayImage rotate(const GrayImage& img, double deg) {
    if (!std::isfinite(deg)) throw Error("rotation angle must be finite");
    double rad = deg * std::numbers::pi / 180.0;
    double c = snap_trig(std::cos(rad));
    double s = snap_trig(std::sin(rad));

    int out_w = std::max<int>(1, static_cast<int>(std::lround(std::abs(c) * img.width +
                                                              std::abs(s) * img.height)));
    int out_h = std::max<int>(1, static_cast<int>(std::lround(std::abs(s) * img.width +
                                                              std::abs(c) * img.height)));
    double cx = (img.width - 1) / 2.0, cy = (img.height - 1) / 2.0;
    double ox = (out_w - 1) / 2.0, oy = (out_h - 1) / 2.0;

    GrayImage out(out_w, out_h);
    for (int y = 0; y < out_h; ++y)
        for (int x = 0; x < out_w; ++x) {
            double dx = x - ox, dy = y - oy;
            // inverse of the screen-CCW rotation
            double sx = c * dx - s * dy + cx;
            double sy = s * dx + c * dy + cy;
            out.at(x, y) = sample_or_zero(img, sx, sy);
        }
    return out;
}

GrayImage crop_roi(const GrayImage& img, const RoiRect& roi) {
    if (roi.w < 1 || roi.h < 1 || roi.x < 0 || roi.y < 0 || roi.x + roi.w > img.width ||
        roi.y + roi.h > img.height)
        throw RoiOutOfBounds("roi " + std::to_string(roi.x) + "," + std::to_string(roi.y) + " " +
                             std::to_string(roi.w) + "x" + std::to_string(roi.h) +
                             " outside image " + std::to_string(img.width) + "x" +
                             std::to_string(img.height));
    GrayImage out(roi.w, roi.h);
    for (int y = 0; y < roi.h; ++y)
        for (int x = 0; x < roi.w; ++x) out.at(x, y) = img.at(roi.x + x, roi.y + y);
    return out;
}

GrayImage gaussian_smooth(const GrayImage& img, const Kernel& kernel) {
    require_normalized(kernel);
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int ky = 0; ky < kernel.size; ++ky)
                for (int kx = 0; kx < kernel.size; ++kx)
                    acc += kernel.at(kx, ky) *
                           img.at_clamped(x + kx - kernel.anchor, y + ky - kernel.anchor);
            out.at(x, y) = acc;
        }
    return out;
}

GrayImage resize(const GrayImage& img, int out_w, int out_h) {
    if (out_w < 1 || out_h < 1) throw Error("resize target must be at least 1x1");
    GrayImage out(out_w, out_h);
    double scale_x = static_cast<double>(img.width) / out_w;
    double scale_y = static_cast<double>(img.height) / out_h;
    for (int y = 0; y < out_h; ++y) {
        double sy = (y + 0.5) * scale_y - 0.5;
        for (int x = 0; x < out_w; ++x) {
            double sx = (x + 0.5) * scale_x - 0.5;
            out.at(x, y) = sample_clamped(img, sx, sy);
        }
    }
    return out;
}

}  // namespace turtleid
