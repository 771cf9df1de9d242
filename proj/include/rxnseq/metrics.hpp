//
// Copyright 2026 the rxnseq authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rxnseq/schema.hpp"

namespace rxnseq::metrics {

enum class MatchMode { Hard, Soft };

std::string_view to_string(MatchMode mode);

// Matching knobs. The body text asks for IoU strictly greater than 0.5;
// inclusive_threshold switches to >= for the "at least 0.5" reading.
struct MatchConfig {
  double iou_threshold = 0.5;
  bool inclusive_threshold = false;
};

// Count tuple plus the fractions computed from it. Precision and recall are
// 0 when their denominators are; F1 is 0 when P + R is.
struct ScoreSummary {
  long matched_predictions = 0;
  long total_predictions = 0;
  long matched_ground_truth = 0;
  long total_ground_truth = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

struct MetricsReport {
  MatchMode mode = MatchMode::Hard;
  ScoreSummary overall;
  std::map<Style, ScoreSummary> per_style;
  std::optional<std::vector<std::pair<std::string, ScoreSummary>>> per_diagram;
};

double f1_score(double precision, double recall);

// Intersection area over union area; 0 for disjoint boxes. Throws
// std::invalid_argument when either box has non-positive area.
double iou(const BBox& a, const BBox& b);

// For each gt entity, the index of the pred entity with maximal IoU when
// that IoU clears the threshold, else nullopt. Matching is independent per
// gt entity: two gt entities may map to the same prediction. Entities with
// degenerate boxes never match. Throws on threshold outside (0, 1].
std::vector<std::optional<std::size_t>> match_entities(
    std::span<const ParsedEntity> gt, std::span<const ParsedEntity> pred,
    double threshold, bool inclusive_threshold = false);

// Whether a predicted reaction matches a ground truth reaction.
// Hard: per role, every gt entity has an IoU-threshold match among the pred
// entities of that role and vice versa (coverage in both directions).
// Soft: both reactions are first filtered to molecule entities; gt reactants
// and conditions pool into one input side, pred likewise; bidirectional
// coverage must hold on the input side and on the product side.
bool reaction_match(const ParsedReaction& gt, const ParsedReaction& pred,
                    MatchMode mode, const MatchConfig& config = {});

// Micro-averaged evaluation: per diagram, a prediction counts as matched if
// some gt reaction matches it and a gt reaction counts as matched if some
// prediction does; counts are summed over all diagrams before computing
// P/R/F1. A gt diagram without a prediction contributes an empty prediction.
// Throws Error on a prediction image_id absent from gt.
MetricsReport evaluate(const Dataset& gt,
                       const std::map<std::string, ReactionStructure>& pred,
                       MatchMode mode, const MatchConfig& config = {},
                       bool with_per_diagram = false);

// Key-value text rendering, one metric per line.
std::string to_text(const MetricsReport& report, bool by_style = false);

// Serialized JSON object mirroring the report fields.
std::string to_json(const MetricsReport& report);

}  // namespace rxnseq::metrics
