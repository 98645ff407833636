#include "turtleid/hog.hpp"

#include <cassert>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

#include "turtleid/error.hpp"

namespace turtleid {

namespace {

struct BlockGeometry {
    int cells_x, cells_y, blocks_x, blocks_y;
};

BlockGeometry block_geometry(const HogParams& p) {
    if (p.window_w < 1 || p.window_h < 1 || p.cell < 1 || p.block < 1 || p.block_stride < 1 ||
        p.bins < 1)
        throw IncompatibleGeometry("hog parameters must be positive");
    if (p.window_w % p.cell != 0 || p.window_h % p.cell != 0)
        throw IncompatibleGeometry("window " + std::to_string(p.window_w) + "x" +
                                   std::to_string(p.window_h) + " not divisible by cell " +
                                   std::to_string(p.cell));
    BlockGeometry g;
    g.cells_x = p.window_w / p.cell;
    g.cells_y = p.window_h / p.cell;
    if (g.cells_x < p.block || g.cells_y < p.block)
        throw IncompatibleGeometry("window holds no complete block");
    g.blocks_x = (g.cells_x - p.block) / p.block_stride + 1;
    g.blocks_y = (g.cells_y - p.block) / p.block_stride + 1;
    return g;
}

void store_u32_le(std::uint32_t v, unsigned char* out) {
    out[0] = static_cast<unsigned char>(v & 0xff);
    out[1] = static_cast<unsigned char>((v >> 8) & 0xff);
    out[2] = static_cast<unsigned char>((v >> 16) & 0xff);
    out[3] = static_cast<unsigned char>((v >> 24) & 0xff);
}

std::uint32_t load_u32_le(const unsigned char* in) {
    return static_cast<std::uint32_t>(in[0]) | (static_cast<std::uint32_t>(in[1]) << 8) |
           (static_cast<std::uint32_t>(in[2]) << 16) | (static_cast<std::uint32_t>(in[3]) << 24);
}

constexpr char kMagic[8] = {'H', 'O', 'G', 'F', 'D', 'S', 'C', '1'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

int descriptor_len(const HogParams& params) {
    BlockGeometry g = block_geometry(params);
    return g.blocks_x * g.blocks_y * params.block * params.block * params.bins;
}

GradientField compute_gradients(const GrayImage& img) {
    GradientField grad;
    grad.width = img.width;
    grad.height = img.height;
    grad.magnitude.resize(static_cast<std::size_t>(img.width) * img.height);
    grad.orientation.resize(grad.magnitude.size());
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            double gx = (img.at_clamped(x + 1, y) - img.at_clamped(x - 1, y)) * 0.5;
            double gy = (img.at_clamped(x, y + 1) - img.at_clamped(x, y - 1)) * 0.5;
            double mag = std::sqrt(gx * gx + gy * gy);
            double deg = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
            if (deg < 0.0) deg += 180.0;
            if (deg >= 180.0) deg -= 180.0;
            std::size_t i = grad.idx(x, y);
            grad.magnitude[i] = mag;
            grad.orientation[i] = deg;
        }
    return grad;
}

CellGrid cell_histograms(const GradientField& grad, const HogParams& params) {
    BlockGeometry g = block_geometry(params);
    if (grad.width != params.window_w || grad.height != params.window_h)
        throw IncompatibleGeometry("gradient field does not match the descriptor window");

    CellGrid cells;
    cells.cells_x = g.cells_x;
    cells.cells_y = g.cells_y;
    cells.bins = params.bins;
    cells.histograms.assign(
        static_cast<std::size_t>(g.cells_x) * g.cells_y * params.bins, 0.0);

    double bin_width = 180.0 / params.bins;
    for (int y = 0; y < grad.height; ++y) {
        int cy = y / params.cell;
        for (int x = 0; x < grad.width; ++x) {
            int cx = x / params.cell;
            std::size_t i = grad.idx(x, y);
            double m = grad.magnitude[i];
            // linear interpolation between the two nearest bin centers,
            // circular over 180 degrees
            double t = grad.orientation[i] / bin_width - 0.5;
            double f = std::floor(t);
            double w1 = t - f;
            int i0 = static_cast<int>(f) % params.bins;
            if (i0 < 0) i0 += params.bins;
            int i1 = (i0 + 1) % params.bins;
            std::size_t base = (static_cast<std::size_t>(cy) * g.cells_x + cx) *
                               static_cast<std::size_t>(params.bins);
            cells.histograms[base + i0] += m * (1.0 - w1);
            cells.histograms[base + i1] += m * w1;
        }
    }
    return cells;
}

HogDescriptor block_normalize(const CellGrid& cells, const HogParams& params) {
    BlockGeometry g = block_geometry(params);
    if (cells.cells_x != g.cells_x || cells.cells_y != g.cells_y || cells.bins != params.bins)
        throw IncompatibleGeometry("cell grid does not match the descriptor geometry");

    HogDescriptor desc;
    desc.params = params;
    desc.values.reserve(static_cast<std::size_t>(descriptor_len(params)));

    std::vector<double> block(static_cast<std::size_t>(params.block) * params.block * params.bins);
    for (int by = 0; by < g.blocks_y; ++by)
        for (int bx = 0; bx < g.blocks_x; ++bx) {
            std::size_t n = 0;
            for (int cy = 0; cy < params.block; ++cy)
                for (int cx = 0; cx < params.block; ++cx)
                    for (int b = 0; b < params.bins; ++b)
                        block[n++] = cells.at(bx * params.block_stride + cx,
                                              by * params.block_stride + cy, b);
            double energy = 0.0;
            for (double v : block) energy += v * v;
            double inv = 1.0 / std::sqrt(energy + kBlockNormEpsilon * kBlockNormEpsilon);
            for (double v : block) desc.values.push_back(static_cast<float>(v * inv));
        }

    assert(static_cast<int>(desc.values.size()) == descriptor_len(params));
    return desc;
}

HogDescriptor compute_hog(const GrayImage& img, const HogParams& params) {
    BlockGeometry g = block_geometry(params);
    (void)g;
    if (img.width != params.window_w || img.height != params.window_h)
        throw IncompatibleGeometry("image " + std::to_string(img.width) + "x" +
                                   std::to_string(img.height) + " is not at window resolution " +
                                   std::to_string(params.window_w) + "x" +
                                   std::to_string(params.window_h));
    GrayImage scaled(img.width, img.height);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        scaled.pixels[i] = img.pixels[i] / 255.0;
    GradientField grad = compute_gradients(scaled);
    CellGrid cells = cell_histograms(grad, params);
    return block_normalize(cells, params);
}

double hog_distance(const HogDescriptor& a, const HogDescriptor& b) {
    if (a.values.size() != b.values.size() || !(a.params == b.params))
        throw LengthMismatch("descriptors have different geometry");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        double d = static_cast<double>(a.values[i]) - b.values[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

void save_descriptor(const HogDescriptor& desc, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write: " + path.string());
    unsigned char header[16];
    std::memcpy(header, kMagic, 8);
    store_u32_le(kVersion, header + 8);
    store_u32_le(static_cast<std::uint32_t>(desc.values.size()), header + 12);
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    std::vector<unsigned char> payload(desc.values.size() * 4);
    for (std::size_t i = 0; i < desc.values.size(); ++i) {
        std::uint32_t bits;
        static_assert(sizeof(bits) == sizeof(float));
        std::memcpy(&bits, &desc.values[i], 4);
        store_u32_le(bits, payload.data() + i * 4);
    }
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size()));
    if (!out) throw Error("write failed: " + path.string());
}

HogDescriptor load_descriptor(const std::filesystem::path& path, const HogParams& params) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFile(path.string());
    unsigned char header[16];
    in.read(reinterpret_cast<char*>(header), sizeof(header));
    if (in.gcount() != sizeof(header) || std::memcmp(header, kMagic, 8) != 0)
        throw DecodeError("descriptor cache: bad magic: " + path.string());
    if (load_u32_le(header + 8) != kVersion)
        throw DecodeError("descriptor cache: unsupported version: " + path.string());
    std::uint32_t count = load_u32_le(header + 12);
    if (count != static_cast<std::uint32_t>(descriptor_len(params)))
        throw DecodeError("descriptor cache: length does not match parameters: " + path.string());

    std::vector<unsigned char> payload(static_cast<std::size_t>(count) * 4);
    in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
    if (in.gcount() != static_cast<std::streamsize>(payload.size()))
        throw DecodeError("descriptor cache: truncated: " + path.string());

    HogDescriptor desc;
    desc.params = params;
    desc.values.resize(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        std::uint32_t bits = load_u32_le(payload.data() + static_cast<std::size_t>(i) * 4);
        std::memcpy(&desc.values[i], &bits, 4);
    }
    return desc;
}

nlohmann::ordered_json descriptor_to_json(const HogDescriptor& desc) {
    nlohmann::ordered_json j;
    j["params"] = {{"window_w", desc.params.window_w}, {"window_h", desc.params.window_h},
                   {"cell", desc.params.cell},         {"block", desc.params.block},
                   {"block_stride", desc.params.block_stride}, {"bins", desc.params.bins}};
    j["length"] = desc.values.size();
    j["values"] = desc.values;
    return j;
}

}  // namespace turtleid
