#ifndef REBLUR_DATA_PNG_IO_H_
#define REBLUR_DATA_PNG_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>

#include "reblur/data/image.h"

namespace reblur {

enum class PngDepth { k8 = 8, k16 = 16 };

// Reads any PNG (gray, RGB, palette, with or without alpha, 8 or 16 bit)
// into an RGB ImageTensor in [0,1]. Alpha is dropped. Throws
// std::runtime_error on I/O or decode failure.
ImageTensor ReadPng(const std::filesystem::path& path);

// Writes the clipped image as RGB. The write goes to a temporary sibling
// and is renamed into place.
void WritePng(const std::filesystem::path& path, const ImageTensor& image,
              PngDepth depth = PngDepth::k16);

// Single-channel 8-bit PNG from row-major values in [0,1].
void WriteGrayPng(const std::filesystem::path& path, int height, int width,
                  std::span<const double> values);

// RGB 8-bit PNG from interleaved bytes.
void WriteRgb8Png(const std::filesystem::path& path, int height, int width,
                  std::span<const std::uint8_t> rgb);

}  // namespace reblur

#endif  // REBLUR_DATA_PNG_IO_H_
