#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "isoflow/errors.hpp"
#include "isoflow/raster.hpp"

namespace isoflow {
namespace {

constexpr double kPi = std::numbers::pi;

template <class F>
SphereField make_field(Index nlat, Index nlon, F f) {
  SphereField s;
  s.nlat = nlat;
  s.nlon = nlon;
  s.values.resize(nlat, nlon);
  for (Index i = 0; i < nlat; ++i) s.colatitude.push_back(kPi * static_cast<double>(i) / static_cast<double>(nlat - 1));
  for (Index j = 0; j < nlon; ++j) s.longitude.push_back(-kPi + 2.0 * kPi * static_cast<double>(j) / static_cast<double>(nlon));
  for (Index i = 0; i < nlat; ++i) {
    for (Index j = 0; j < nlon; ++j) s.values(i, j) = f(s.colatitude[i], s.longitude[j]);
  }
  return s;
}

TEST(Hammer, ForwardMatchesFormulaAndInverts) {
  const auto p = hammer_forward(0.0, 0.0);
  EXPECT_NEAR(p[0], 0.0, 1e-15);
  EXPECT_NEAR(p[1], 0.0, 1e-15);
  const auto np = hammer_forward(kPi / 2, 0.3);
  EXPECT_NEAR(np[0], 0.0, 1e-12);
  EXPECT_NEAR(np[1], std::numbers::sqrt2, 1e-12);
  const auto east = hammer_forward(0.0, kPi / 2);
  EXPECT_NEAR(east[0], 2.0 * std::numbers::sqrt2 * std::sin(kPi / 4) / std::sqrt(1.0 + std::cos(kPi / 4)), 1e-12);

  for (double lat = -1.4; lat <= 1.4; lat += 0.2) {
    for (double lon = -3.0; lon <= 3.0; lon += 0.5) {
      const auto xy = hammer_forward(lat, lon);
      EXPECT_LE(xy[0] * xy[0] / 8 + xy[1] * xy[1] / 2, 1.0 + 1e-12);
      const auto back = hammer_inverse(xy[0], xy[1]);
      ASSERT_TRUE(back.has_value());
      EXPECT_NEAR((*back)[0], lat, 1e-10);
      EXPECT_NEAR((*back)[1], lon, 1e-10);
    }
  }
  EXPECT_FALSE(hammer_inverse(2.9, 0.0).has_value());
  EXPECT_FALSE(hammer_inverse(0.0, 1.5).has_value());
}

TEST(DivergingColor, SymmetricScale) {
  EXPECT_EQ(diverging_color(0.0), (std::array<std::uint8_t, 3>{255, 255, 255}));
  EXPECT_EQ(diverging_color(1.0), (std::array<std::uint8_t, 3>{255, 0, 0}));
  EXPECT_EQ(diverging_color(-1.0), (std::array<std::uint8_t, 3>{0, 0, 255}));
  const auto pos = diverging_color(0.4);
  const auto neg = diverging_color(-0.4);
  EXPECT_EQ(pos[0], neg[2]);
  EXPECT_EQ(pos[1], neg[1]);
  EXPECT_EQ(pos[2], neg[0]);
}

TEST(Rasterize, ZeroFieldIsUniform) {
  const RgbImage img = rasterize(make_field(19, 36, [](double, double) { return 0.0; }), 64, 32);
  ASSERT_EQ(img.pixels.size(), 64u * 32u * 3u);
  for (const auto p : img.pixels) EXPECT_EQ(p, 255);
}

TEST(Rasterize, NorthIsUpRedCapBlueSouth) {
  const RgbImage img =
      rasterize(make_field(91, 180, [](double colat, double) { return std::cos(colat); }), 200, 100);
  const auto top = img.at(100, 2);
  const auto bottom = img.at(100, 97);
  EXPECT_EQ(top[0], 255);
  EXPECT_LT(top[2], 40);
  EXPECT_EQ(bottom[2], 255);
  EXPECT_LT(bottom[0], 40);
  const auto corner = img.at(0, 0);
  EXPECT_EQ(corner, (std::array<std::uint8_t, 3>{255, 255, 255}));
}

TEST(Rasterize, ZonalFieldIsSymmetricAboutCentralMeridian) {
  const RgbImage img = rasterize(
      make_field(91, 180, [](double colat, double) { return std::cos(3.0 * colat); }), 160, 80);
  for (int y = 0; y < 80; ++y) {
    for (int x = 0; x < 80; ++x) EXPECT_EQ(img.at(x, y), img.at(159 - x, y));
  }
}

TEST(MatrixField, DiagonalMatrixGivesZonalBands) {
  const DiscreteLaplacian lap = band_coefficients(build_generators(5));
  const QuantizedBasis basis = quantized_basis(lap);
  Matrix d = Matrix::Zero(5, 5);
  d.diagonal() << 0.3, -1.0, 0.2, 0.9, -0.4;
  const SphereField f = matrix_to_field(SymmetricMatrix(d), basis, {37, 72});
  for (Index i = 0; i < f.nlat; ++i) {
    for (Index j = 1; j < f.nlon; ++j) EXPECT_NEAR(f.values(i, j), f.values(i, 0), 1e-12);
  }
  Matrix off = Matrix::Zero(5, 5);
  off(1, 2) = off(2, 1) = 1.0;
  const SphereField g = matrix_to_field(SymmetricMatrix(off), basis, {37, 72});
  double spread = 0.0;
  for (Index j = 1; j < g.nlon; ++j) spread = std::max(spread, std::abs(g.values(18, j) - g.values(18, 0)));
  EXPECT_GT(spread, 1e-3);
}

TEST(WritePng, WritesValidHeader) {
  const auto path = std::filesystem::temp_directory_path() / "isoflow_test_raster.png";
  render_raster(make_field(19, 36, [](double c, double) { return std::cos(c); }), path, 48, 24);
  std::ifstream in(path, std::ios::binary);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), {});
  ASSERT_GT(bytes.size(), 33u);
  const unsigned char sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  for (int i = 0; i < 8; ++i) EXPECT_EQ(bytes[i], sig[i]);
  auto be32 = [&](std::size_t o) {
    return (bytes[o] << 24) | (bytes[o + 1] << 16) | (bytes[o + 2] << 8) | bytes[o + 3];
  };
  EXPECT_EQ(be32(16), 48);
  EXPECT_EQ(be32(20), 24);
  EXPECT_EQ(bytes[24], 8);
  EXPECT_EQ(bytes[25], 2);
  std::filesystem::remove(path);
  EXPECT_THROW(write_png(RgbImage{2, 2, std::vector<std::uint8_t>(12, 0)}, "/nonexistent/dir/x.png"), Error);
  EXPECT_THROW(write_png(RgbImage{2, 2, std::vector<std::uint8_t>(5, 0)}, path), DimensionError);
}

}  // namespace
}  // namespace isoflow
