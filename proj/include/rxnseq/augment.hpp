//
// Copyright 2026 the rxnseq authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>

#include "rxnseq/raster.hpp"
#include "rxnseq/rng.hpp"
#include "rxnseq/schema.hpp"

namespace rxnseq::augment {

struct AugmentConfig {
  double compose_probability = 0.5;
  int max_compose = 6;
  double decay_ratio = 0.5;       // P(compose k) proportional to decay^(k-2)
  double rotation_degrees = 5.0;  // rotation angle drawn uniformly in +-range
  double hflip_probability = 0.5;
  double vflip_probability = 0.1;
  double color_jitter_amplitude = 0.2;  // brightness/contrast/saturation
  int target_size = 1333;
  Rgb pad_color = kWhite;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct AnnotatedImage {
  RasterImage image;
  DiagramRecord record;
};

// Number of diagrams to concatenate, in {2, .., max_compose}, drawn with
// probability proportional to decay_ratio^(k-2).
int sample_compose_count(const AugmentConfig& config, Rng& rng);

// Vertical concatenation: output width is the max input width, height the
// sum of heights; each diagram lands at the running vertical offset with a
// uniform horizontal offset over the slack, remaining area in pad_color.
// Boxes are translated, entity ids renumbered, reactions concatenated in
// input order. Requires at least two diagrams, each valid against its image.
AnnotatedImage compose_vertical(std::span<const AnnotatedImage> diagrams, Rng& rng,
                                Rgb pad_color = kWhite);

// Annotation-consistent image transform chain: rotation about the image
// center (boxes become the clipped axis-aligned hull of their rotated
// corners), horizontal/vertical flips, color jitter, aspect-preserving
// resize so the long side equals target_size, then right/bottom padding to
// target_size x target_size. Zero-effect draws (angle 0, factor 1) leave
// pixels bit-identical, so translation/flip-only configs stay exact. An
// entity whose box is clipped to nothing is dropped, along with reactions
// left without reactants or products, so the output record always validates.
AnnotatedImage transform(const RasterImage& image, const DiagramRecord& record,
                         const AugmentConfig& config, Rng& rng);

// Where augment_sample finds the pixels for a record.
class ImageStore {
 public:
  virtual ~ImageStore() = default;
  virtual RasterImage load(const DiagramRecord& record) = 0;
};

// Reads <dir>/<file_name> as PNG.
class DirectoryImageStore : public ImageStore {
 public:
  explicit DirectoryImageStore(std::string dir) : dir_(std::move(dir)) {}
  RasterImage load(const DiagramRecord& record) override;

 private:
  std::string dir_;
};

// One augmented training sample: with compose_probability, concatenates
// sample_compose_count diagrams drawn uniformly with replacement, else takes
// a single diagram; then applies transform. Deterministic for a fixed rng
// state.
AnnotatedImage augment_sample(const Dataset& pool, ImageStore& images,
                              const AugmentConfig& config, Rng& rng);

}  // namespace rxnseq::augment
