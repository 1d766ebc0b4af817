#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "isoflow/quantization.hpp"

namespace isoflow {

/// 8-bit RGB image, row-major, row 0 at the top.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  std::array<std::uint8_t, 3> at(int x, int y) const;
};

/// Hammer projection of (latitude, longitude) in radians to the plane;
/// the image of the sphere is the ellipse x^2/8 + y^2/2 <= 1.
std::array<double, 2> hammer_forward(double latitude, double longitude);

/// Inverse of hammer_forward; nullopt outside the ellipse.
std::optional<std::array<double, 2>> hammer_inverse(double x, double y);

/// Diverging blue-white-red map of t in [-1, 1]; 0 is white.
std::array<std::uint8_t, 3> diverging_color(double t);

/// Renders the field in Hammer projection with a symmetric color scale
/// [-max|f|, max|f|]. North is up; pixels outside the ellipse are white.
RgbImage rasterize(const SphereField& field, int width, int height);

/// Writes an 8-bit RGB PNG. Throws Error on I/O failure.
void write_png(const RgbImage& image, const std::filesystem::path& path);

/// rasterize + write_png.
void render_raster(const SphereField& field, const std::filesystem::path& path, int width = 720,
                   int height = 360);

}  // namespace isoflow
