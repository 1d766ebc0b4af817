#include "isoflow/raster.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>

#include <fmt/format.h>

#include "isoflow/errors.hpp"

namespace isoflow {

std::array<std::uint8_t, 3> RgbImage::at(int x, int y) const {
  if (x < 0 || x >= width || y < 0 || y >= height) {
    throw DomainError(fmt::format("RgbImage::at: ({}, {}) outside {}x{}", x, y, width, height));
  }
  const auto k = 3 * (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                      static_cast<std::size_t>(x));
  return {pixels[k], pixels[k + 1], pixels[k + 2]};
}

std::array<double, 2> hammer_forward(double latitude, double longitude) {
  const double c = std::cos(latitude);
  const double denom = std::sqrt(1.0 + c * std::cos(0.5 * longitude));
  return {2.0 * std::numbers::sqrt2 * c * std::sin(0.5 * longitude) / denom,
          std::numbers::sqrt2 * std::sin(latitude) / denom};
}

std::optional<std::array<double, 2>> hammer_inverse(double x, double y) {
  if (x * x / 8.0 + y * y / 2.0 > 1.0) {
    return std::nullopt;
  }
  const double z = std::sqrt(std::max(0.0, 1.0 - (x / 4.0) * (x / 4.0) - (y / 2.0) * (y / 2.0)));
  const double lon = 2.0 * std::atan2(z * x, 2.0 * (2.0 * z * z - 1.0));
  const double lat = std::asin(std::clamp(z * y, -1.0, 1.0));
  return std::array<double, 2>{lat, lon};
}

std::array<std::uint8_t, 3> diverging_color(double t) {
  t = std::clamp(t, -1.0, 1.0);
  const auto fade = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - std::abs(t))));
  if (t < 0.0) {
    return {fade, fade, 255};
  }
  return {255, fade, fade};
}

RgbImage rasterize(const SphereField& field, int width, int height) {
  if (width < 1 || height < 1) {
    throw DomainError(fmt::format("rasterize: invalid image size {}x{}", width, height));
  }
  if (field.nlat < 2 || field.nlon < 2) {
    throw DomainError("rasterize: empty field");
  }
  const double scale = field.values.cwiseAbs().maxCoeff();
  RgbImage img;
  img.width = width;
  img.height = height;
  img.pixels.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3, 255);
  const double xmax = 2.0 * std::numbers::sqrt2;
  const double ymax = std::numbers::sqrt2;
  for (int py = 0; py < height; ++py) {
    const double y = ymax * (1.0 - 2.0 * (static_cast<double>(py) + 0.5) / static_cast<double>(height));
    for (int px = 0; px < width; ++px) {
      const double x =
          xmax * (2.0 * (static_cast<double>(px) + 0.5) / static_cast<double>(width) - 1.0);
      const auto ll = hammer_inverse(x, y);
      if (!ll) {
        continue;
      }
      const double v = field.sample(0.5 * std::numbers::pi - (*ll)[0], (*ll)[1]);
      const auto rgb = diverging_color(scale > 0.0 ? v / scale : 0.0);
      const auto k = 3 * (static_cast<std::size_t>(py) * static_cast<std::size_t>(width) +
                          static_cast<std::size_t>(px));
      std::copy(rgb.begin(), rgb.end(), img.pixels.begin() + static_cast<std::ptrdiff_t>(k));
    }
  }
  return img;
}

void write_png(const RgbImage& image, const std::filesystem::path& path) {
  if (image.pixels.size() !=
      static_cast<std::size_t>(image.width) * static_cast<std::size_t>(image.height) * 3) {
    throw DimensionError("write_png: pixel buffer does not match image size");
  }
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!fp) {
    throw Error(fmt::format("write_png: cannot open {}", path.string()));
  }
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) {
    throw Error("write_png: png_create_write_struct failed");
  }
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw Error("write_png: png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(fmt::format("write_png: libpng error while writing {}", path.string()));
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
               static_cast<png_uint_32>(image.height), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const auto stride = static_cast<std::size_t>(image.width) * 3;
  for (int y = 0; y < image.height; ++y) {
    png_write_row(png, image.pixels.data() + static_cast<std::size_t>(y) * stride);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void render_raster(const SphereField& field, const std::filesystem::path& path, int width,
                   int height) {
  write_png(rasterize(field, width, height), path);
}

}  // namespace isoflow
