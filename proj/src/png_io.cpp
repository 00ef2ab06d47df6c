#include "maketex/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>

#include "maketex/error.hpp"

namespace maketex::png {
namespace {

template <class Sample>
std::vector<std::uint8_t> write_memory(png_image& img, const std::vector<Sample>& samples) {
  png_alloc_size_t size = 0;
  if (png_image_write_to_memory(&img, nullptr, &size, 0, samples.data(), 0, nullptr) == 0) {
    throw Error(Errc::Io, std::string("png encode failed: ") + img.message);
  }
  std::vector<std::uint8_t> out(size);
  if (png_image_write_to_memory(&img, out.data(), &size, 0, samples.data(), 0, nullptr) == 0) {
    throw Error(Errc::Io, std::string("png encode failed: ") + img.message);
  }
  out.resize(size);
  return out;
}

png_image header(int width, int height, png_uint_32 format) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(width);
  img.height = static_cast<png_uint_32>(height);
  img.format = format;
  return img;
}

}  // namespace

std::vector<std::uint8_t> encode8(const ImageF& image) {
  if (image.channels() != 1 && image.channels() != 3) {
    throw Error(Errc::InvalidArgument, "png: expected 1 or 3 channels");
  }
  std::vector<std::uint8_t> samples(image.values().size());
  std::transform(image.values().begin(), image.values().end(), samples.begin(), [](float v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.F, 1.F) * 255.F));
  });
  auto img = header(image.width(), image.height(), image.channels() == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB);
  return write_memory(img, samples);
}

std::vector<std::uint8_t> encode16(const ImageF& gray) {
  if (gray.channels() != 1) throw Error(Errc::InvalidArgument, "png: 16-bit output is gray only");
  std::vector<png_uint_16> samples(gray.values().size());
  std::transform(gray.values().begin(), gray.values().end(), samples.begin(), [](float v) {
    return static_cast<png_uint_16>(std::lround(std::clamp(v, 0.F, 1.F) * 65535.F));
  });
  auto img = header(gray.width(), gray.height(), PNG_FORMAT_LINEAR_Y);
  return write_memory(img, samples);
}

std::vector<std::uint8_t> encode_mask(const Mask& mask) {
  std::vector<std::uint8_t> samples(mask.values().size());
  std::transform(mask.values().begin(), mask.values().end(), samples.begin(),
                 [](std::uint8_t v) { return v != 0 ? std::uint8_t{255} : std::uint8_t{0}; });
  auto img = header(mask.width(), mask.height(), PNG_FORMAT_GRAY);
  return write_memory(img, samples);
}

ImageF decode(std::span<const std::uint8_t> bytes, int channels) {
  if (channels != 1 && channels != 3) throw Error(Errc::InvalidArgument, "png: expected 1 or 3 channels");
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_memory(&img, bytes.data(), bytes.size()) == 0) {
    throw Error(Errc::ParseError, std::string("png decode failed: ") + img.message);
  }
  img.format = channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  std::vector<std::uint8_t> samples(PNG_IMAGE_SIZE(img));
  png_color black{0, 0, 0};
  if (png_image_finish_read(&img, &black, samples.data(), 0, nullptr) == 0) {
    throw Error(Errc::ParseError, std::string("png decode failed: ") + img.message);
  }
  ImageF out(static_cast<int>(img.width), static_cast<int>(img.height), channels);
  std::transform(samples.begin(), samples.end(), out.values().begin(),
                 [](std::uint8_t v) { return static_cast<float>(v) / 255.F; });
  return out;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::Io, "write failed: " + path.string());
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ImageF flip_rows(const ImageF& image) {
  ImageF out(image.width(), image.height(), image.channels());
  const auto row = static_cast<std::size_t>(image.width()) * image.channels();
  for (int y = 0; y < image.height(); ++y) {
    std::copy_n(image.data() + static_cast<std::size_t>(y) * row, row,
                out.data() + static_cast<std::size_t>(image.height() - 1 - y) * row);
  }
  return out;
}

}  // namespace maketex::png
