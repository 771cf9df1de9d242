//
// Copyright 2026 the rxnseq authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <string>

#include "rxnseq/rng.hpp"
#include "rxnseq/schema.hpp"

namespace rxnseq::testing {

// Bounds for random but always-valid records. The minimum box side is large
// enough relative to image size and the default 2000-bin grid that one half
// bin of quantization shift keeps IoU above 0.5, so encode/decode/evaluate
// round trips stay exact.
struct RecordParams {
  int max_reactions = 8;       // 0..max_reactions
  int min_reactions = 0;
  int max_per_role = 3;        // reactants/products 1..max, conditions 0..max
  double min_side = 16.0;
  int min_extent = 200;
  int max_extent = 1200;
  double share_probability = 0.2;  // chance a role slot reuses an entity
};

DiagramRecord random_record(Rng& rng, const std::string& image_id,
                            const RecordParams& params = {});

Dataset random_dataset(Rng& rng, int count, const RecordParams& params = {});

}  // namespace rxnseq::testing
