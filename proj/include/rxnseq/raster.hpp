//
// Copyright 2026 the rxnseq authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rxnseq/schema.hpp"

namespace rxnseq {

struct Rgb {
  std::uint8_t r = 255, g = 255, b = 255;

  bool operator==(const Rgb&) const = default;
};

inline constexpr Rgb kWhite{255, 255, 255};
inline constexpr Rgb kBlack{0, 0, 0};

// Dense RGB image, 8 bits per channel, row-major from the top-left corner.
class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(int width, int height, Rgb fill = kWhite);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return width_ == 0 || height_ == 0; }

  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb color);

  const std::vector<std::uint8_t>& pixels() const { return pixels_; }
  std::vector<std::uint8_t>& pixels() { return pixels_; }

  bool operator==(const RasterImage&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;  // width * height * 3
};

// PNG I/O. Grayscale/palette/alpha inputs are converted to RGB on read;
// alpha is composited over white. Throws IoError on failure.
RasterImage read_png(const std::string& path);
void write_png(const RasterImage& image, const std::string& path);

// Copies src into dst with its top-left corner at (x, y); the part falling
// outside dst is dropped.
void blit(RasterImage& dst, const RasterImage& src, int x, int y);

// Sub-image [x, x+w) x [y, y+h), clamped to the image.
RasterImage crop(const RasterImage& image, int x, int y, int w, int h);

// Box outline of the given thickness, drawn inward from the box edge.
void draw_rect(RasterImage& image, const BBox& box, Rgb color, int thickness = 3);
void fill_rect(RasterImage& image, const BBox& box, Rgb color);

}  // namespace rxnseq
