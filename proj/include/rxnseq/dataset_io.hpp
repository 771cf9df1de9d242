//
// Copyright 2026 the rxnseq authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rxnseq/schema.hpp"

namespace rxnseq::dataset_io {

// Reads a dataset JSON document. Throws ParseError (with byte position) on
// malformed JSON and ValidationError listing every violation on invalid data.
Dataset load(const std::string& path);

// Writes the canonical JSON form: fixed key order, bboxes as floats, numeric
// image ids as JSON numbers. load(save(d)) == d, and a file produced by save
// re-saves byte-identically. The write is atomic (temp file plus rename).
void save(const Dataset& dataset, const std::string& path);

// Parse/serialize without touching the filesystem.
Dataset parse_dataset(const std::string& text);
std::string serialize_dataset(const Dataset& dataset);

struct StyleStats {
  long diagrams = 0;
  long entities = 0;
  long reactions = 0;
  double avg_reactions = 0;  // reactions / diagrams, 1 decimal, half away from zero

  bool operator==(const StyleStats&) const = default;
};

struct DatasetStats {
  StyleStats overall;
  std::array<StyleStats, 4> per_style;  // indexed like kAllStyles
  std::map<int, long> reactions_histogram;  // reactions per diagram -> count

  bool operator==(const DatasetStats&) const = default;
};

DatasetStats stats(const Dataset& dataset);

// Fixed-width table plus the reactions-per-diagram histogram.
std::string format_stats(const DatasetStats& s);

struct FoldAssignment {
  int k = 0;
  std::uint64_t seed = 0;
  // (image_id, fold) in dataset record order; folds are 0..k-1 and sizes
  // differ by at most one.
  std::vector<std::pair<std::string, int>> assignment;
};

// Seeded shuffle then round-robin. With stratify_by_style, records are
// grouped by style first and the round-robin counter runs on across groups,
// so the global size balance still holds. Throws std::invalid_argument when
// k < 2 or k exceeds the record count.
FoldAssignment split_folds(const Dataset& dataset, int k, std::uint64_t seed,
                           bool stratify_by_style = false);

std::string serialize_folds(const FoldAssignment& folds);
void save_folds(const FoldAssignment& folds, const std::string& path);

// Best-effort mapping from externally published ground-truth JSON into the
// canonical schema. Accepts a top-level {"images": [..]} or a bare array;
// tolerates alternate key spellings (filename, category_id) and xywh boxes;
// clips boxes into the image frame. Output is validated before return.
enum class BBoxFormat { XYXY, XYWH };
Dataset convert_external(const std::string& text, BBoxFormat format);

// Shared helper: writes content to path via a temp file in the same
// directory plus an atomic rename. Throws IoError on failure.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace rxnseq::dataset_io
