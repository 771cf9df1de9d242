//
// Copyright 2026 the rxnseq authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <map>
#include <string>

#include "rxnseq/metrics.hpp"
#include "rxnseq/schema.hpp"

namespace rxnseq::testing {

struct BruteCounts {
  long matched_predictions = 0;
  long total_predictions = 0;
  long matched_ground_truth = 0;
  long total_ground_truth = 0;

  bool operator==(const BruteCounts&) const = default;
};

// From-scratch micro-average evaluator: enumerates every (gt, pred) reaction
// pair per diagram and recomputes the match predicate with its own IoU and
// coverage logic. Written against the metric definitions only, as a cross
// check for the library implementation.
BruteCounts brute_evaluate(const Dataset& gt,
                           const std::map<std::string, ReactionStructure>& pred,
                           metrics::MatchMode mode, double threshold,
                           bool inclusive);

bool brute_reaction_match(const ParsedReaction& gt, const ParsedReaction& pred,
                          metrics::MatchMode mode, double threshold,
                          bool inclusive);

}  // namespace rxnseq::testing
