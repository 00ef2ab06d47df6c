#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "maketex/image.hpp"

namespace maketex::png {

// Float images are quantized with round(clamp(v, 0, 1) * max). Channel count
// selects gray (1) or RGB (3).
std::vector<std::uint8_t> encode8(const ImageF& image);
std::vector<std::uint8_t> encode16(const ImageF& gray);
std::vector<std::uint8_t> encode_mask(const Mask& mask);

// Decodes any 8/16-bit gray, gray+alpha, RGB or RGBA PNG to floats in [0,1]
// with the requested channel count (1 or 3).
ImageF decode(std::span<const std::uint8_t> bytes, int channels);

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

inline void write8(const std::filesystem::path& path, const ImageF& image) { write_file(path, encode8(image)); }
inline void write16(const std::filesystem::path& path, const ImageF& gray) { write_file(path, encode16(gray)); }
inline void write_mask(const std::filesystem::path& path, const Mask& mask) { write_file(path, encode_mask(mask)); }
inline ImageF read(const std::filesystem::path& path, int channels) { return decode(read_file(path), channels); }

// Texture images keep row 0 at v = 0; PNG rows run top-down, so the v axis is
// flipped on the way out and back in.
ImageF flip_rows(const ImageF& image);

}  // namespace maketex::png
