//
// Copyright 2026 the rxnseq authors
// SPDX-License-Identifier: Apache-2.0
//
#include "rxnseq/raster.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>

namespace rxnseq {

RasterImage::RasterImage(int width, int height, Rgb fill)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("RasterImage: dimensions must be positive");
  }
  pixels_.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < pixels_.size(); i += 3) {
    pixels_[i] = fill.r;
    pixels_[i + 1] = fill.g;
    pixels_[i + 2] = fill.b;
  }
}

Rgb RasterImage::at(int x, int y) const {
  const std::size_t i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
}

void RasterImage::set(int x, int y, Rgb color) {
  const std::size_t i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  pixels_[i] = color.r;
  pixels_[i + 1] = color.g;
  pixels_[i + 2] = color.b;
}

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

RasterImage read_png(const std::string& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw IoError("cannot open " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("libpng init failed");
  }

  std::vector<png_bytep> row_ptrs;
  RasterImage image;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("failed to decode PNG " + path);
  }

  png_init_io(png, file.get());
  png_read_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);

  // Normalize everything to 8-bit RGB over a white background.
  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_gray_to_rgb(png);
  }
  png_color_16 white_bg{0, 255, 255, 255, 255};
  if (color_type & PNG_COLOR_MASK_ALPHA || png_get_valid(png, info, PNG_INFO_tRNS)) {
    png_set_background(png, &white_bg, PNG_BACKGROUND_GAMMA_SCREEN, 0, 1.0);
  }
  png_read_update_info(png, info);

  image = RasterImage(static_cast<int>(width), static_cast<int>(height));
  if (png_get_rowbytes(png, info) != static_cast<std::size_t>(width) * 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("unexpected PNG row layout in " + path);
  }
  row_ptrs.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) {
    row_ptrs[y] = image.pixels().data() + static_cast<std::size_t>(y) * width * 3;
  }
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return image;
}

void write_png(const RasterImage& image, const std::string& path) {
  if (image.empty()) throw std::invalid_argument("write_png: empty image");
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw IoError("cannot open " + path + " for writing");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng init failed");
  }

  std::vector<png_bytep> row_ptrs;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed to encode PNG " + path);
  }

  png_init_io(png, file.get());
  png_set_IHDR(png, info, image.width(), image.height(), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  row_ptrs.resize(image.height());
  auto* pixels = const_cast<std::uint8_t*>(image.pixels().data());
  for (int y = 0; y < image.height(); ++y) {
    row_ptrs[y] = pixels + static_cast<std::size_t>(y) * image.width() * 3;
  }
  png_write_image(png, row_ptrs.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void blit(RasterImage& dst, const RasterImage& src, int x, int y) {
  const int x0 = std::max(0, -x);
  const int y0 = std::max(0, -y);
  const int x1 = std::min(src.width(), dst.width() - x);
  const int y1 = std::min(src.height(), dst.height() - y);
  for (int sy = y0; sy < y1; ++sy) {
    for (int sx = x0; sx < x1; ++sx) {
      dst.set(x + sx, y + sy, src.at(sx, sy));
    }
  }
}

RasterImage crop(const RasterImage& image, int x, int y, int w, int h) {
  const int x0 = std::clamp(x, 0, image.width());
  const int y0 = std::clamp(y, 0, image.height());
  const int x1 = std::clamp(x + w, x0, image.width());
  const int y1 = std::clamp(y + h, y0, image.height());
  if (x1 <= x0 || y1 <= y0) return {};
  RasterImage out(x1 - x0, y1 - y0);
  for (int cy = y0; cy < y1; ++cy) {
    for (int cx = x0; cx < x1; ++cx) {
      out.set(cx - x0, cy - y0, image.at(cx, cy));
    }
  }
  return out;
}

void fill_rect(RasterImage& image, const BBox& box, Rgb color) {
  const int x0 = std::clamp(static_cast<int>(std::floor(box.x1)), 0, image.width());
  const int y0 = std::clamp(static_cast<int>(std::floor(box.y1)), 0, image.height());
  const int x1 = std::clamp(static_cast<int>(std::ceil(box.x2)), 0, image.width());
  const int y1 = std::clamp(static_cast<int>(std::ceil(box.y2)), 0, image.height());
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) image.set(x, y, color);
  }
}

void draw_rect(RasterImage& image, const BBox& box, Rgb color, int thickness) {
  const int x0 = static_cast<int>(std::floor(box.x1));
  const int y0 = static_cast<int>(std::floor(box.y1));
  const int x1 = static_cast<int>(std::ceil(box.x2));
  const int y1 = static_cast<int>(std::ceil(box.y2));
  for (int t = 0; t < thickness; ++t) {
    for (int x = std::max(0, x0); x < std::min(image.width(), x1); ++x) {
      if (y0 + t >= 0 && y0 + t < image.height()) image.set(x, y0 + t, color);
      if (y1 - 1 - t >= 0 && y1 - 1 - t < image.height()) image.set(x, y1 - 1 - t, color);
    }
    for (int y = std::max(0, y0); y < std::min(image.height(), y1); ++y) {
      if (x0 + t >= 0 && x0 + t < image.width()) image.set(x0 + t, y, color);
      if (x1 - 1 - t >= 0 && x1 - 1 - t < image.width()) image.set(x1 - 1 - t, y, color);
    }
  }
}

}  // namespace rxnseq
