#include "reblur/data/png_io.h"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "reblur/data/atomic_file.h"

namespace reblur {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr OpenFile(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw std::runtime_error("cannot open " + path.string());
  return f;
}

[[noreturn]] void PngError(png_structp, png_const_charp msg) {
  throw std::runtime_error(std::string("libpng: ") + msg);
}

void PngWarning(png_structp, png_const_charp) {}

// Writes rows (already packed in the PNG wire format) to `path`.
void WriteRows(const std::filesystem::path& path, int height, int width,
               int bit_depth, int color_type, int bytes_per_row,
               const std::vector<png_byte>& data) {
  AtomicWrite(path, [&](const std::filesystem::path& tmp) {
    FilePtr f = OpenFile(tmp, "wb");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                              PngError, PngWarning);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
      png_destroy_write_struct(&png, &info);
      throw std::runtime_error("libpng: allocation failed");
    }
    try {
      png_init_io(png, f.get());
      png_set_IHDR(png, info, width, height, bit_depth, color_type,
                   PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                   PNG_FILTER_TYPE_DEFAULT);
      png_write_info(png, info);
      for (int y = 0; y < height; ++y) {
        png_write_row(png, data.data() + static_cast<std::size_t>(y) * bytes_per_row);
      }
      png_write_end(png, nullptr);
    } catch (...) {
      png_destroy_write_struct(&png, &info);
      throw;
    }
    png_destroy_write_struct(&png, &info);
  });
}

int Quantize(double v, int max_value) {
  if (!std::isfinite(v)) v = 0.0;
  v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
  return static_cast<int>(std::lround(v * max_value));
}

}  // namespace

ImageTensor ReadPng(const std::filesystem::path& path) {
  FilePtr f = OpenFile(path, "rb");
  png_byte sig[8];
  if (std::fread(sig, 1, 8, f.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw std::runtime_error(path.string() + " is not a PNG file");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                           PngError, PngWarning);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("libpng: allocation failed");
  }
  try {
    png_init_io(png, f.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);
    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) {
      png_set_expand_gray_1_2_4_to_8(png);
    }
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) {
      png_set_gray_to_rgb(png);
    }
    png_set_strip_alpha(png);
    if (depth == 16) png_set_swap(png);  // native little-endian uint16
    png_read_update_info(png, info);

    const int width = static_cast<int>(png_get_image_width(png, info));
    const int height = static_cast<int>(png_get_image_height(png, info));
    const int out_depth = png_get_bit_depth(png, info);
    const std::size_t row_bytes = png_get_rowbytes(png, info);
    std::vector<png_byte> data(row_bytes * height);
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y) rows[y] = data.data() + y * row_bytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    ImageTensor image(height, width);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        for (int c = 0; c < 3; ++c) {
          double v;
          if (out_depth == 16) {
            const auto* row = reinterpret_cast<const std::uint16_t*>(rows[y]);
            v = row[x * 3 + c] / 65535.0;
          } else {
            v = rows[y][x * 3 + c] / 255.0;
          }
          image.at(c, y, x) = v;
        }
      }
    }
    return image;
  } catch (...) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw;
  }
}

void WritePng(const std::filesystem::path& path, const ImageTensor& image,
              PngDepth depth) {
  const int h = image.height();
  const int w = image.width();
  const bool wide = depth == PngDepth::k16;
  const int bytes_per_row = w * 3 * (wide ? 2 : 1);
  std::vector<png_byte> data(static_cast<std::size_t>(bytes_per_row) * h);
  for (int y = 0; y < h; ++y) {
    png_byte* row = data.data() + static_cast<std::size_t>(y) * bytes_per_row;
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        if (wide) {
          const int q = Quantize(image.at(c, y, x), 65535);
          row[(x * 3 + c) * 2] = static_cast<png_byte>(q >> 8);  // big-endian
          row[(x * 3 + c) * 2 + 1] = static_cast<png_byte>(q & 0xff);
        } else {
          row[x * 3 + c] = static_cast<png_byte>(Quantize(image.at(c, y, x), 255));
        }
      }
    }
  }
  WriteRows(path, h, w, wide ? 16 : 8, PNG_COLOR_TYPE_RGB, bytes_per_row, data);
}

void WriteGrayPng(const std::filesystem::path& path, int height, int width,
                  std::span<const double> values) {
  if (values.size() != static_cast<std::size_t>(height) * width) {
    throw std::invalid_argument("WriteGrayPng: size mismatch");
  }
  std::vector<png_byte> data(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    data[i] = static_cast<png_byte>(Quantize(values[i], 255));
  }
  WriteRows(path, height, width, 8, PNG_COLOR_TYPE_GRAY, width, data);
}

void WriteRgb8Png(const std::filesystem::path& path, int height, int width,
                  std::span<const std::uint8_t> rgb) {
  if (rgb.size() != static_cast<std::size_t>(height) * width * 3) {
    throw std::invalid_argument("WriteRgb8Png: size mismatch");
  }
  std::vector<png_byte> data(rgb.begin(), rgb.end());
  WriteRows(path, height, width, 8, PNG_COLOR_TYPE_RGB, width * 3, data);
}

}  // namespace reblur
