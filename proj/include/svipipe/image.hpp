#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <jpeglib.h>
#include <png.h>

// 8-bit raster images with PNG/JPEG codecs (libpng / libjpeg) and the few
// raster operations the pipeline needs.

namespace svipipe::img {

/// Interleaved 8-bit image, 1 (gray) or 3 (RGB) channels.
struct Image {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<uint8_t> data;

    Image() = default;
    Image(int w, int h, int c, uint8_t fill = 0)
        : width(w), height(h), channels(c),
          data(static_cast<size_t>(w) * h * c, fill) {
        if (w <= 0 || h <= 0 || (c != 1 && c != 3)) {
            throw std::invalid_argument("bad image shape");
        }
    }

    uint8_t* pixel(int x, int y) { return data.data() + (static_cast<size_t>(y) * width + x) * channels; }
    const uint8_t* pixel(int x, int y) const {
        return data.data() + (static_cast<size_t>(y) * width + x) * channels;
    }
    size_t size_bytes() const { return data.size(); }
};

/// Float grayscale grid used by the feature and transform code.
struct GrayF {
    int width = 0;
    int height = 0;
    std::vector<float> v;

    GrayF() = default;
    GrayF(int w, int h, float fill = 0.f)
        : width(w), height(h), v(static_cast<size_t>(w) * h, fill) {}

    float& at(int x, int y) { return v[static_cast<size_t>(y) * width + x]; }
    float at(int x, int y) const { return v[static_cast<size_t>(y) * width + x]; }
};

/// ITU-R BT.601 luma; pass-through for single-channel input.
inline GrayF to_gray(const Image& im) {
    GrayF g(im.width, im.height);
    const uint8_t* p = im.data.data();
    const size_t n = static_cast<size_t>(im.width) * im.height;
    if (im.channels == 1) {
        for (size_t i = 0; i < n; ++i) g.v[i] = p[i];
    } else {
        for (size_t i = 0; i < n; ++i) {
            g.v[i] = 0.299f * p[3 * i] + 0.587f * p[3 * i + 1] + 0.114f * p[3 * i + 2];
        }
    }
    return g;
}

// ---- PNG ----

inline Image load_png(const std::string& path) {
    std::unique_ptr<FILE, decltype(&fclose)> fp(std::fopen(path.c_str(), "rb"), &fclose);
    if (!fp) throw std::runtime_error("cannot open PNG: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("PNG decode failed: " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);

    if (depth == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const int out_channels = png_get_channels(png, info);
    Image im(static_cast<int>(w), static_cast<int>(h), out_channels == 1 ? 1 : 3);
    std::vector<png_bytep> rows(h);
    for (png_uint_32 y = 0; y < h; ++y) {
        rows[y] = im.data.data() + static_cast<size_t>(y) * w * im.channels;
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return im;
}

inline void save_png(const std::string& path, const Image& im) {
    std::unique_ptr<FILE, decltype(&fclose)> fp(std::fopen(path.c_str(), "wb"), &fclose);
    if (!fp) throw std::runtime_error("cannot write PNG: " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("PNG encode failed: " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, im.width, im.height, 8,
                 im.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < im.height; ++y) {
        png_write_row(png, const_cast<png_bytep>(im.pixel(0, y)));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

// ---- JPEG ----

namespace detail {

struct JpegErr {
    jpeg_error_mgr mgr;
    jmp_buf jump;
};

inline void jpeg_error_longjmp(j_common_ptr c) {
    auto* err = reinterpret_cast<JpegErr*>(c->err);
    longjmp(err->jump, 1);
}

}  // namespace detail

inline Image decode_jpeg(const uint8_t* bytes, size_t len) {
    jpeg_decompress_struct cinfo{};
    detail::JpegErr jerr{};
    cinfo.err = jpeg_std_error(&jerr.mgr);
    jerr.mgr.error_exit = detail::jpeg_error_longjmp;
    jpeg_create_decompress(&cinfo);
    if (setjmp(jerr.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw std::runtime_error("JPEG decode failed");
    }

    jpeg_mem_src(&cinfo, bytes, static_cast<unsigned long>(len));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
    jpeg_start_decompress(&cinfo);

    Image im(static_cast<int>(cinfo.output_width), static_cast<int>(cinfo.output_height),
             cinfo.output_components == 1 ? 1 : 3);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = im.pixel(0, static_cast<int>(cinfo.output_scanline));
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return im;
}

inline Image load_jpeg(const std::string& path) {
    std::unique_ptr<FILE, decltype(&fclose)> fp(std::fopen(path.c_str(), "rb"), &fclose);
    if (!fp) throw std::runtime_error("cannot open JPEG: " + path);
    std::fseek(fp.get(), 0, SEEK_END);
    const long len = std::ftell(fp.get());
    std::fseek(fp.get(), 0, SEEK_SET);
    std::vector<uint8_t> bytes(static_cast<size_t>(len));
    if (std::fread(bytes.data(), 1, bytes.size(), fp.get()) != bytes.size()) {
        throw std::runtime_error("short read: " + path);
    }
    return decode_jpeg(bytes.data(), bytes.size());
}

inline std::vector<uint8_t> encode_jpeg(const Image& im, int quality = 92) {
    jpeg_compress_struct cinfo{};
    detail::JpegErr jerr{};
    cinfo.err = jpeg_std_error(&jerr.mgr);
    jerr.mgr.error_exit = detail::jpeg_error_longjmp;
    jpeg_create_compress(&cinfo);

    unsigned char* buf = nullptr;
    unsigned long buf_len = 0;
    if (setjmp(jerr.jump)) {
        jpeg_destroy_compress(&cinfo);
        free(buf);
        throw std::runtime_error("JPEG encode failed");
    }

    jpeg_mem_dest(&cinfo, &buf, &buf_len);
    cinfo.image_width = static_cast<JDIMENSION>(im.width);
    cinfo.image_height = static_cast<JDIMENSION>(im.height);
    cinfo.input_components = im.channels;
    cinfo.in_color_space = im.channels == 1 ? JCS_GRAYSCALE : JCS_RGB;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, quality, TRUE);
    jpeg_start_compress(&cinfo, TRUE);
    while (cinfo.next_scanline < cinfo.image_height) {
        JSAMPROW row = const_cast<JSAMPROW>(im.pixel(0, static_cast<int>(cinfo.next_scanline)));
        jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    std::vector<uint8_t> out(buf, buf + buf_len);
    jpeg_destroy_compress(&cinfo);
    free(buf);
    return out;
}

inline void save_jpeg(const std::string& path, const Image& im, int quality = 92) {
    const std::vector<uint8_t> bytes = encode_jpeg(im, quality);
    std::unique_ptr<FILE, decltype(&fclose)> fp(std::fopen(path.c_str(), "wb"), &fclose);
    if (!fp) throw std::runtime_error("cannot write JPEG: " + path);
    if (std::fwrite(bytes.data(), 1, bytes.size(), fp.get()) != bytes.size()) {
        throw std::runtime_error("short write: " + path);
    }
}

// ---- dispatch on extension ----

inline bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           std::equal(suffix.rbegin(), suffix.rend(), s.rbegin(), [](char a, char b) {
               return std::tolower(a) == std::tolower(b);
           });
}

inline Image load(const std::string& path) {
    if (has_suffix(path, ".png")) return load_png(path);
    if (has_suffix(path, ".jpg") || has_suffix(path, ".jpeg")) return load_jpeg(path);
    throw std::runtime_error("unsupported image format: " + path);
}

inline void save(const std::string& path, const Image& im) {
    if (has_suffix(path, ".png")) return save_png(path, im);
    if (has_suffix(path, ".jpg") || has_suffix(path, ".jpeg")) return save_jpeg(path, im);
    throw std::runtime_error("unsupported image format: " + path);
}

/// Bilinear resize (no wrap; edges clamp).
inline Image resize(const Image& im, int out_w, int out_h) {
    Image out(out_w, out_h, im.channels);
    const double sx = static_cast<double>(im.width) / out_w;
    const double sy = static_cast<double>(im.height) / out_h;
    for (int y = 0; y < out_h; ++y) {
        const double fy = (y + 0.5) * sy - 0.5;
        const int y0 = std::clamp(static_cast<int>(std::floor(fy)), 0, im.height - 1);
        const int y1 = std::min(y0 + 1, im.height - 1);
        const double wy = std::clamp(fy - y0, 0.0, 1.0);
        for (int x = 0; x < out_w; ++x) {
            const double fx = (x + 0.5) * sx - 0.5;
            const int x0 = std::clamp(static_cast<int>(std::floor(fx)), 0, im.width - 1);
            const int x1 = std::min(x0 + 1, im.width - 1);
            const double wx = std::clamp(fx - x0, 0.0, 1.0);
            for (int c = 0; c < im.channels; ++c) {
                const double v00 = im.pixel(x0, y0)[c];
                const double v10 = im.pixel(x1, y0)[c];
                const double v01 = im.pixel(x0, y1)[c];
                const double v11 = im.pixel(x1, y1)[c];
                const double v = v00 * (1 - wx) * (1 - wy) + v10 * wx * (1 - wy) +
                                 v01 * (1 - wx) * wy + v11 * wx * wy;
                out.pixel(x, y)[c] = static_cast<uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
            }
        }
    }
    return out;
}

}  // namespace svipipe::img
