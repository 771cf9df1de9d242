//
// Copyright 2026 the rxnseq authors
// SPDX-License-Identifier: Apache-2.0
//
#include "rxnseq/augment.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rxnseq/errors.hpp"

namespace rxnseq::augment {
namespace {

constexpr double kPi = 3.14159265358979323846;

void require_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string("AugmentConfig: ") + name +
                                " must be in [0, 1]");
  }
}

std::uint8_t clamp_channel(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

double luma(Rgb c) { return 0.299 * c.r + 0.587 * c.g + 0.114 * c.b; }

// Bilinear sample at continuous pixel-index coordinates with edge clamping.
Rgb sample_bilinear(const RasterImage& src, double x, double y) {
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const double fx = x - x0;
  const double fy = y - y0;
  auto at = [&](int xi, int yi) {
    xi = std::clamp(xi, 0, src.width() - 1);
    yi = std::clamp(yi, 0, src.height() - 1);
    return src.at(xi, yi);
  };
  const Rgb p00 = at(x0, y0), p10 = at(x0 + 1, y0);
  const Rgb p01 = at(x0, y0 + 1), p11 = at(x0 + 1, y0 + 1);
  auto mix = [&](double a, double b, double c, double d) {
    return (1 - fy) * ((1 - fx) * a + fx * b) + fy * ((1 - fx) * c + fx * d);
  };
  return Rgb{clamp_channel(mix(p00.r, p10.r, p01.r, p11.r)),
             clamp_channel(mix(p00.g, p10.g, p01.g, p11.g)),
             clamp_channel(mix(p00.b, p10.b, p01.b, p11.b))};
}

// Rotates pixels by angle_deg about the image center. Content keeps the
// original frame; uncovered regions take pad_color.
RasterImage rotate_pixels(const RasterImage& src, double angle_deg, Rgb pad_color) {
  const double theta = angle_deg * kPi / 180.0;
  const double c = std::cos(theta), s = std::sin(theta);
  const double cx = src.width() / 2.0, cy = src.height() / 2.0;
  RasterImage out(src.width(), src.height(), pad_color);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      // Inverse map of q = R(theta) (p - c) + c, at pixel centers.
      const double px = x + 0.5 - cx, py = y + 0.5 - cy;
      const double qx = c * px + s * py + cx;
      const double qy = -s * px + c * py + cy;
      if (qx < 0 || qx > src.width() || qy < 0 || qy > src.height()) continue;
      out.set(x, y, sample_bilinear(src, qx - 0.5, qy - 0.5));
    }
  }
  return out;
}

// Axis-aligned hull of the four rotated corners, clipped to the frame.
BBox rotate_bbox(const BBox& box, double angle_deg, double width, double height) {
  const double theta = angle_deg * kPi / 180.0;
  const double c = std::cos(theta), s = std::sin(theta);
  const double cx = width / 2.0, cy = height / 2.0;
  const double xs[2] = {box.x1, box.x2};
  const double ys[2] = {box.y1, box.y2};
  BBox hull{1e300, 1e300, -1e300, -1e300};
  for (double x : xs) {
    for (double y : ys) {
      const double px = x - cx, py = y - cy;
      const double qx = c * px - s * py + cx;
      const double qy = s * px + c * py + cy;
      hull.x1 = std::min(hull.x1, qx);
      hull.y1 = std::min(hull.y1, qy);
      hull.x2 = std::max(hull.x2, qx);
      hull.y2 = std::max(hull.y2, qy);
    }
  }
  return clip_bbox(hull, width, height);
}

void hflip_pixels(RasterImage& img) {
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width() / 2; ++x) {
      const Rgb tmp = img.at(x, y);
      img.set(x, y, img.at(img.width() - 1 - x, y));
      img.set(img.width() - 1 - x, y, tmp);
    }
  }
}

void vflip_pixels(RasterImage& img) {
  for (int y = 0; y < img.height() / 2; ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const Rgb tmp = img.at(x, y);
      img.set(x, y, img.at(x, img.height() - 1 - y));
      img.set(x, img.height() - 1 - y, tmp);
    }
  }
}

template <typename Fn>
void map_pixels(RasterImage& img, Fn fn) {
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      img.set(x, y, fn(img.at(x, y)));
    }
  }
}

void apply_brightness(RasterImage& img, double f) {
  map_pixels(img, [&](Rgb p) {
    return Rgb{clamp_channel(p.r * f), clamp_channel(p.g * f), clamp_channel(p.b * f)};
  });
}

void apply_contrast(RasterImage& img, double f) {
  double total = 0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) total += luma(img.at(x, y));
  }
  const long count = static_cast<long>(img.width()) * img.height();
  const double mean = count > 0 ? total / static_cast<double>(count) : 0;
  map_pixels(img, [&](Rgb p) {
    return Rgb{clamp_channel(f * p.r + (1 - f) * mean),
               clamp_channel(f * p.g + (1 - f) * mean),
               clamp_channel(f * p.b + (1 - f) * mean)};
  });
}

void apply_saturation(RasterImage& img, double f) {
  map_pixels(img, [&](Rgb p) {
    const double gray = luma(p);
    return Rgb{clamp_channel(f * p.r + (1 - f) * gray),
               clamp_channel(f * p.g + (1 - f) * gray),
               clamp_channel(f * p.b + (1 - f) * gray)};
  });
}

// Replicates every source pixel into a k x k block. Exact for integer scale.
RasterImage resize_block(const RasterImage& src, int k) {
  RasterImage out(src.width() * k, src.height() * k);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      out.set(x, y, src.at(x / k, y / k));
    }
  }
  return out;
}

RasterImage resize_bilinear(const RasterImage& src, int out_w, int out_h, double scale) {
  RasterImage out(out_w, out_h);
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      const double sx = (x + 0.5) / scale - 0.5;
      const double sy = (y + 0.5) / scale - 0.5;
      out.set(x, y, sample_bilinear(src, sx, sy));
    }
  }
  return out;
}

// A box clipped to nothing carries no signal: the entity is dropped, along
// with any reaction left without reactants or products. Keeps transformed
// records valid even when a rotation pushes a border box out of frame.
void prune_empty_boxes(DiagramRecord& record) {
  std::unordered_set<int> dropped;
  for (const auto& e : record.entities) {
    if (e.bbox.degenerate()) dropped.insert(e.id);
  }
  if (dropped.empty()) return;

  std::erase_if(record.entities,
                [&](const Entity& e) { return dropped.count(e.id) > 0; });
  std::vector<Reaction> kept;
  for (const auto& r : record.reactions) {
    Reaction pruned;
    auto filter = [&](const std::vector<int>& ids) {
      std::vector<int> out;
      for (int id : ids) {
        if (dropped.count(id) == 0) out.push_back(id);
      }
      return out;
    };
    pruned.reactants = filter(r.reactants);
    pruned.conditions = filter(r.conditions);
    pruned.products = filter(r.products);
    if (pruned.reactants.empty() || pruned.products.empty()) continue;
    kept.push_back(std::move(pruned));
  }
  record.reactions = std::move(kept);
}

void throw_if_invalid(const DiagramRecord& record, const RasterImage& image) {
  if (record.width != image.width() || record.height != image.height()) {
    throw std::invalid_argument("compose_vertical: record dimensions for '" +
                                record.image_id + "' do not match its image");
  }
  const auto violations = validate_record(record);
  if (!violations.empty()) {
    throw ValidationError("compose_vertical: record '" + record.image_id + "'",
                          violations);
  }
}

}  // namespace

void AugmentConfig::validate() const {
  require_probability(compose_probability, "compose_probability");
  require_probability(hflip_probability, "hflip_probability");
  require_probability(vflip_probability, "vflip_probability");
  require_probability(decay_ratio, "decay_ratio");
  require_probability(color_jitter_amplitude, "color_jitter_amplitude");
  if (max_compose < 2) {
    throw std::invalid_argument("AugmentConfig: max_compose must be at least 2");
  }
  if (!(rotation_degrees >= 0)) {
    throw std::invalid_argument("AugmentConfig: rotation_degrees must be non-negative");
  }
  if (target_size <= 0) {
    throw std::invalid_argument("AugmentConfig: target_size must be positive");
  }
}

int sample_compose_count(const AugmentConfig& config, Rng& rng) {
  config.validate();
  std::vector<double> weights;
  double w = 1.0;
  for (int k = 2; k <= config.max_compose; ++k) {
    weights.push_back(w);
    w *= config.decay_ratio;
  }
  return 2 + static_cast<int>(rng.pick_weighted(weights));
}

AnnotatedImage compose_vertical(std::span<const AnnotatedImage> diagrams, Rng& rng,
                                Rgb pad_color) {
  if (diagrams.size() < 2) {
    throw std::invalid_argument("compose_vertical: need at least two diagrams");
  }
  int width = 0;
  long height = 0;
  for (const auto& d : diagrams) {
    throw_if_invalid(d.record, d.image);
    width = std::max(width, d.image.width());
    height += d.image.height();
  }

  AnnotatedImage out;
  out.image = RasterImage(width, static_cast<int>(height), pad_color);
  out.record.width = width;
  out.record.height = static_cast<int>(height);
  out.record.style = Style::MultipleLine;

  int y = 0;
  int next_id = 0;
  for (std::size_t i = 0; i < diagrams.size(); ++i) {
    const auto& d = diagrams[i];
    const int x = static_cast<int>(rng.next_int(0, width - d.image.width()));
    blit(out.image, d.image, x, y);
    if (i > 0) out.record.image_id += "+";
    out.record.image_id += d.record.image_id;

    std::unordered_map<int, int> remap;
    for (const auto& e : d.record.entities) {
      Entity moved = e;
      moved.id = next_id++;
      moved.bbox = BBox{e.bbox.x1 + x, e.bbox.y1 + y, e.bbox.x2 + x, e.bbox.y2 + y};
      remap[e.id] = moved.id;
      out.record.entities.push_back(moved);
    }
    for (const auto& r : d.record.reactions) {
      Reaction moved;
      for (int id : r.reactants) moved.reactants.push_back(remap.at(id));
      for (int id : r.conditions) moved.conditions.push_back(remap.at(id));
      for (int id : r.products) moved.products.push_back(remap.at(id));
      out.record.reactions.push_back(moved);
    }
    y += d.image.height();
  }
  return out;
}

AnnotatedImage transform(const RasterImage& image, const DiagramRecord& record,
                         const AugmentConfig& config, Rng& rng) {
  config.validate();
  if (record.width != image.width() || record.height != image.height()) {
    throw std::invalid_argument("transform: record dimensions do not match the image");
  }

  // All stochastic draws happen up front in a fixed order, so the consumed
  // randomness does not depend on which stages are active.
  const double angle = rng.next_in(-config.rotation_degrees, config.rotation_degrees);
  const bool do_hflip = rng.next_double() < config.hflip_probability;
  const bool do_vflip = rng.next_double() < config.vflip_probability;
  const double a = config.color_jitter_amplitude;
  const double brightness = rng.next_in(1 - a, 1 + a);
  const double contrast = rng.next_in(1 - a, 1 + a);
  const double saturation = rng.next_in(1 - a, 1 + a);

  AnnotatedImage out;
  out.image = image;
  out.record = record;

  if (angle != 0.0) {
    out.image = rotate_pixels(out.image, angle, config.pad_color);
    for (auto& e : out.record.entities) {
      e.bbox = rotate_bbox(e.bbox, angle, record.width, record.height);
    }
  }
  if (do_hflip) {
    hflip_pixels(out.image);
    for (auto& e : out.record.entities) {
      e.bbox = BBox{record.width - e.bbox.x2, e.bbox.y1, record.width - e.bbox.x1,
                    e.bbox.y2};
    }
  }
  if (do_vflip) {
    vflip_pixels(out.image);
    for (auto& e : out.record.entities) {
      e.bbox = BBox{e.bbox.x1, record.height - e.bbox.y2, e.bbox.x2,
                    record.height - e.bbox.y1};
    }
  }
  if (a > 0) {
    if (brightness != 1.0) apply_brightness(out.image, brightness);
    if (contrast != 1.0) apply_contrast(out.image, contrast);
    if (saturation != 1.0) apply_saturation(out.image, saturation);
  }

  // Aspect-preserving resize: long side becomes target_size. Integer factors
  // replicate pixel blocks exactly; factor 1 leaves the image untouched.
  const int long_side = std::max(out.image.width(), out.image.height());
  const double scale = static_cast<double>(config.target_size) / long_side;
  if (config.target_size % long_side == 0) {
    const int k = config.target_size / long_side;
    if (k > 1) out.image = resize_block(out.image, k);
  } else {
    const int out_w =
        out.image.width() >= out.image.height()
            ? config.target_size
            : std::max(1, static_cast<int>(std::lround(out.image.width() * scale)));
    const int out_h =
        out.image.height() > out.image.width()
            ? config.target_size
            : std::max(1, static_cast<int>(std::lround(out.image.height() * scale)));
    out.image = resize_bilinear(out.image, out_w, out_h, scale);
  }
  for (auto& e : out.record.entities) {
    e.bbox = clip_bbox(BBox{e.bbox.x1 * scale, e.bbox.y1 * scale, e.bbox.x2 * scale,
                            e.bbox.y2 * scale},
                       out.image.width(), out.image.height());
  }

  if (out.image.width() != config.target_size ||
      out.image.height() != config.target_size) {
    RasterImage padded(config.target_size, config.target_size, config.pad_color);
    blit(padded, out.image, 0, 0);
    out.image = std::move(padded);
  }
  out.record.width = config.target_size;
  out.record.height = config.target_size;
  prune_empty_boxes(out.record);
  return out;
}

RasterImage DirectoryImageStore::load(const DiagramRecord& record) {
  return read_png(dir_ + "/" + record.file_name);
}

AnnotatedImage augment_sample(const Dataset& pool, ImageStore& images,
                              const AugmentConfig& config, Rng& rng) {
  config.validate();
  if (pool.records.empty()) {
    throw std::invalid_argument("augment_sample: empty diagram pool");
  }
  const auto n = static_cast<std::int64_t>(pool.records.size());

  AnnotatedImage base;
  if (rng.next_double() < config.compose_probability) {
    const int k = sample_compose_count(config, rng);
    std::vector<AnnotatedImage> parts;
    parts.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      const auto& record = pool.records[static_cast<std::size_t>(rng.next_int(0, n - 1))];
      parts.push_back(AnnotatedImage{images.load(record), record});
    }
    base = compose_vertical(parts, rng, config.pad_color);
  } else {
    const auto& record = pool.records[static_cast<std::size_t>(rng.next_int(0, n - 1))];
    base = AnnotatedImage{images.load(record), record};
  }
  return transform(base.image, base.record, config, rng);
}

}  // namespace rxnseq::augment
