#include "turtleid/keypoint.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "turtleid/brief_pattern.hpp"
#include "turtleid/error.hpp"
#include "turtleid/imgproc.hpp"

namespace turtleid {

namespace {

// 16-pixel Bresenham circle of radius 3, clockwise from 12 o'clock.
constexpr int kCircle[16][2] = {{0, -3}, {1, -3}, {2, -2}, {3, -1}, {3, 0},   {3, 1},
                                {2, 2},  {1, 3},  {0, 3},  {-1, 3}, {-2, 2},  {-3, 1},
                                {-3, 0}, {-3, -1}, {-2, -2}, {-1, -3}};

constexpr int kArc = 9;  // FAST-9

// Segment test: at least kArc contiguous circle pixels all brighter than
// p + t or all darker than p - t.
bool segment_test(const GrayImage& img, int x, int y, double t) {
    double p = img.at(x, y);
    unsigned brighter = 0, darker = 0;
    for (int i = 0; i < 16; ++i) {
        double v = img.at(x + kCircle[i][0], y + kCircle[i][1]);
        if (v > p + t) brighter |= 1u << i;
        if (v < p - t) darker |= 1u << i;
    }
    auto has_run = [](unsigned mask) {
        if (mask == 0) return false;
        // doubled mask turns cyclic runs into linear ones
        unsigned ext = mask | (mask << 16);
        int run = 0;
        for (int i = 0; i < 32; ++i) {
            if (ext & (1u << i)) {
                if (++run >= kArc) return true;
            } else {
                run = 0;
            }
        }
        return false;
    };
    return has_run(brighter) || has_run(darker);
}

// Corner response: the larger of the summed brighter / darker excesses
// over the threshold.
double fast_response(const GrayImage& img, int x, int y, double t) {
    double p = img.at(x, y);
    double sum_b = 0.0, sum_d = 0.0;
    for (auto& o : kCircle) {
        double v = img.at(x + o[0], y + o[1]);
        if (v > p + t) sum_b += v - p - t;
        if (v < p - t) sum_d += p - v - t;
    }
    return std::max(sum_b, sum_d);
}

constexpr int kCentroidRadius = 15;

double intensity_centroid_orientation(const GrayImage& img, int x, int y) {
    double m10 = 0.0, m01 = 0.0;
    for (int dy = -kCentroidRadius; dy <= kCentroidRadius; ++dy)
        for (int dx = -kCentroidRadius; dx <= kCentroidRadius; ++dx) {
            if (dx * dx + dy * dy > kCentroidRadius * kCentroidRadius) continue;
            double v = img.at_clamped(x + dx, y + dy);
            m10 += dx * v;
            m01 += dy * v;
        }
    double deg = std::atan2(m01, m10) * 180.0 / std::numbers::pi;
    if (deg < 0.0) deg += 360.0;
    if (deg >= 360.0) deg -= 360.0;
    return deg;
}

constexpr int kAngleSteps = 30;  // 12-degree steps
constexpr int kPatchRadius = 15;

struct RotatedPatterns {
    // [angle][bit] -> rotated pair
    std::array<std::array<BriefPair, kBriefBits>, kAngleSteps> table;

    RotatedPatterns() {
        const auto& base = brief_pattern();
        for (int a = 0; a < kAngleSteps; ++a) {
            double rad = a * 12.0 * std::numbers::pi / 180.0;
            double c = std::cos(rad), s = std::sin(rad);
            for (int i = 0; i < kBriefBits; ++i) {
                const BriefPair& p = base[static_cast<std::size_t>(i)];
                BriefPair& r = table[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)];
                r.x1 = static_cast<int>(std::lround(p.x1 * c - p.y1 * s));
                r.y1 = static_cast<int>(std::lround(p.x1 * s + p.y1 * c));
                r.x2 = static_cast<int>(std::lround(p.x2 * c - p.y2 * s));
                r.y2 = static_cast<int>(std::lround(p.x2 * s + p.y2 * c));
            }
        }
    }
};

const RotatedPatterns& rotated_patterns() {
    static const RotatedPatterns patterns;
    return patterns;
}

}  // namespace

int hamming_distance(const BinaryDescriptor& a, const BinaryDescriptor& b) {
    int d = 0;
    for (std::size_t i = 0; i < a.bits.size(); ++i) d += std::popcount(a.bits[i] ^ b.bits[i]);
    return d;
}

std::vector<Keypoint> detect_fast(const GrayImage& img, double threshold, int max_keypoints) {
    std::vector<Keypoint> out;
    if (img.width < 2 * kKeypointMargin || img.height < 2 * kKeypointMargin) return out;
    if (max_keypoints < 1) return out;

    std::vector<double> resp(static_cast<std::size_t>(img.width) * img.height, 0.0);
    for (int y = kKeypointMargin; y < img.height - kKeypointMargin; ++y)
        for (int x = kKeypointMargin; x < img.width - kKeypointMargin; ++x)
            if (segment_test(img, x, y, threshold))
                resp[static_cast<std::size_t>(y) * img.width + x] = fast_response(img, x, y,
                                                                                  threshold);

    // 3x3 non-maximal suppression; on equal responses the earliest pixel
    // in scan order survives
    auto r_at = [&](int x, int y) { return resp[static_cast<std::size_t>(y) * img.width + x]; };
    for (int y = kKeypointMargin; y < img.height - kKeypointMargin; ++y)
        for (int x = kKeypointMargin; x < img.width - kKeypointMargin; ++x) {
            double r = r_at(x, y);
            if (r <= 0.0) continue;
            bool keep = true;
            for (int dy = -1; dy <= 1 && keep; ++dy)
                for (int dx = -1; dx <= 1 && keep; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    double rn = r_at(x + dx, y + dy);
                    if (rn > r) keep = false;
                    if (rn == r && (dy < 0 || (dy == 0 && dx < 0))) keep = false;
                }
            if (keep)
                out.push_back({static_cast<float>(x), static_cast<float>(y), r,
                               intensity_centroid_orientation(img, x, y)});
        }

    std::sort(out.begin(), out.end(), [](const Keypoint& a, const Keypoint& b) {
        if (a.response != b.response) return a.response > b.response;
        if (a.y != b.y) return a.y < b.y;
        return a.x < b.x;
    });
    if (static_cast<int>(out.size()) > max_keypoints) out.resize(static_cast<std::size_t>(max_keypoints));
    return out;
}

BinaryDescriptor describe_brief(const GrayImage& img, const Keypoint& kp) {
    int cx = static_cast<int>(std::lround(kp.x));
    int cy = static_cast<int>(std::lround(kp.y));
    if (cx - kPatchRadius < 0 || cy - kPatchRadius < 0 || cx + kPatchRadius >= img.width ||
        cy + kPatchRadius >= img.height)
        throw PatchOutOfBounds("keypoint patch at " + std::to_string(cx) + "," +
                               std::to_string(cy) + " exceeds image bounds");

    int angle = static_cast<int>(std::lround(kp.orientation / 12.0)) % kAngleSteps;
    if (angle < 0) angle += kAngleSteps;
    const auto& pattern = rotated_patterns().table[static_cast<std::size_t>(angle)];

    BinaryDescriptor desc;
    for (int i = 0; i < kBriefBits; ++i) {
        const BriefPair& p = pattern[static_cast<std::size_t>(i)];
        double a = img.at(cx + p.x1, cy + p.y1);
        double b = img.at(cx + p.x2, cy + p.y2);
        if (b > a) desc.bits[static_cast<std::size_t>(i) / 64] |= 1ull << (i % 64);
    }
    return desc;
}

KeypointMatchResult match_keypoints(const std::vector<BinaryDescriptor>& query,
                                    const std::vector<BinaryDescriptor>& gallery,
                                    double acceptance_threshold) {
    if (!(acceptance_threshold > 0.0) || acceptance_threshold > 1.0)
        throw Error("acceptance threshold must be in (0, 1]");
    if (gallery.size() < 2)
        throw EmptyGallery("ratio test needs at least 2 gallery descriptors, got " +
                           std::to_string(gallery.size()));

    KeypointMatchResult result;
    for (std::size_t q = 0; q < query.size(); ++q) {
        int best = -1;
        int d_best = kBriefBits + 1, d_second = kBriefBits + 1;
        for (std::size_t g = 0; g < gallery.size(); ++g) {
            int d = hamming_distance(query[q], gallery[g]);
            if (d < d_best) {
                d_second = d_best;
                d_best = d;
                best = static_cast<int>(g);
            } else if (d < d_second) {
                d_second = d;
            }
        }
        double ratio = d_second > 0 ? static_cast<double>(d_best) / d_second
                                    : 1.0;  // both exact: ambiguous
        if (ratio < acceptance_threshold)
            result.matches.push_back({static_cast<int>(q), best, d_best});
    }
    result.positive_match_count = static_cast<int>(result.matches.size());
    return result;
}

int keypoint_image_score(const GrayImage& query_img, const GrayImage& gallery_img,
                         double acceptance_threshold, double fast_threshold, int max_keypoints) {
    Kernel k = gaussian_kernel(4, 1.0);
    GrayImage q = gaussian_smooth(query_img, k);
    GrayImage g = gaussian_smooth(gallery_img, k);

    std::vector<Keypoint> q_kps = detect_fast(q, fast_threshold, max_keypoints);
    std::vector<Keypoint> g_kps = detect_fast(g, fast_threshold, max_keypoints);
    if (q_kps.empty() || g_kps.size() < 2) return 0;

    std::vector<BinaryDescriptor> q_descs, g_descs;
    q_descs.reserve(q_kps.size());
    g_descs.reserve(g_kps.size());
    for (const auto& kp : q_kps) q_descs.push_back(describe_brief(q, kp));
    for (const auto& kp : g_kps) g_descs.push_back(describe_brief(g, kp));

    return match_keypoints(q_descs, g_descs, acceptance_threshold).positive_match_count;
}

}  // namespace turtleid
