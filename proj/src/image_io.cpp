#include "turtleid/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

#include <png.h>

#include "turtleid/error.hpp"

namespace turtleid {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void png_error_fn(png_structp png, png_const_charp msg) {
    // libpng expects this not to return
    (void)msg;
    longjmp(png_jmpbuf(png), 1);
}

void png_warn_fn(png_structp, png_const_charp) {}

RgbImage load_png(const std::filesystem::path& path) {
    FilePtr f(std::fopen(path.string().c_str(), "rb"));
    if (!f) throw MissingFile(path.string());

    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warn_fn);
    if (!png) throw DecodeError("png: allocation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw DecodeError("png: allocation failed");
    }

    RgbImage img;
    std::vector<png_bytep> row_ptrs;
    std::vector<std::uint8_t> raw;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DecodeError("png: decode failed: " + path.string());
    }

    png_init_io(png, f.get());
    png_read_info(png, info);

    png_uint_32 width = 0, height = 0;
    int bit_depth = 0, color_type = 0;
    png_get_IHDR(png, info, &width, &height, &bit_depth, &color_type, nullptr, nullptr, nullptr);

    // normalize everything to 8-bit RGB
    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    img.width = static_cast<int>(width);
    img.height = static_cast<int>(height);
    std::size_t stride = png_get_rowbytes(png, info);
    raw.resize(stride * height);
    row_ptrs.resize(height);
    for (png_uint_32 y = 0; y < height; ++y) row_ptrs[y] = raw.data() + y * stride;
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    img.pixels.resize(static_cast<std::size_t>(img.width) * img.height * 3);
    for (int y = 0; y < img.height; ++y)
        std::memcpy(img.pixels.data() + static_cast<std::size_t>(y) * img.width * 3,
                    raw.data() + static_cast<std::size_t>(y) * stride,
                    static_cast<std::size_t>(img.width) * 3);
    return img;
}

// PGM header token reader: skips whitespace and '#' comments.
std::string next_pgm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (!std::isspace(c)) {
            tok.push_back(static_cast<char>(c));
            break;
        }
    }
    while ((c = in.get()) != EOF && !std::isspace(c)) tok.push_back(static_cast<char>(c));
    return tok;
}

}  // namespace

GrayImage load_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFile(path.string());

    if (next_pgm_token(in) != "P5") throw DecodeError("pgm: not a binary PGM: " + path.string());
    int w = 0, h = 0, maxval = 0;
    try {
        w = std::stoi(next_pgm_token(in));
        h = std::stoi(next_pgm_token(in));
        maxval = std::stoi(next_pgm_token(in));
    } catch (const std::exception&) {
        throw DecodeError("pgm: bad header: " + path.string());
    }
    if (w < 1 || h < 1) throw DecodeError("pgm: bad dimensions: " + path.string());
    if (maxval < 1 || maxval > 255) throw DecodeError("pgm: unsupported maxval: " + path.string());

    std::vector<char> buf(static_cast<std::size_t>(w) * h);
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size()))
        throw DecodeError("pgm: truncated pixel data: " + path.string());

    GrayImage img(w, h);
    for (std::size_t i = 0; i < buf.size(); ++i)
        img.pixels[i] = static_cast<double>(static_cast<unsigned char>(buf[i]));
    return img;
}

void save_pgm(const GrayImage& img, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write: " + path.string());
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    std::vector<char> buf(img.pixels.size());
    for (std::size_t i = 0; i < buf.size(); ++i) {
        double v = std::round(img.pixels[i]);
        buf[i] = static_cast<char>(static_cast<unsigned char>(std::clamp(v, 0.0, 255.0)));
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw Error("write failed: " + path.string());
}

RgbImage load_image(const std::filesystem::path& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw MissingFile(path.string());
    unsigned char sig[8] = {};
    probe.read(reinterpret_cast<char*>(sig), sizeof(sig));
    std::streamsize got = probe.gcount();
    probe.close();

    if (got >= 8 && png_sig_cmp(sig, 0, 8) == 0) return load_png(path);
    if (got >= 2 && sig[0] == 'P' && sig[1] == '5') {
        GrayImage g = load_pgm(path);
        RgbImage img(g.width, g.height);
        for (int y = 0; y < g.height; ++y)
            for (int x = 0; x < g.width; ++x) {
                auto v = static_cast<std::uint8_t>(g.at(x, y));
                std::uint8_t* p = img.px(x, y);
                p[0] = p[1] = p[2] = v;
            }
        return img;
    }
    throw DecodeError("unsupported image format: " + path.string());
}

}  // namespace turtleid
