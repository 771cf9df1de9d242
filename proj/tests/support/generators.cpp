//
// Copyright 2026 the rxnseq authors
// SPDX-License-Identifier: Apache-2.0
//
#include "support/generators.hpp"

#include <algorithm>
#include <cassert>

namespace rxnseq::testing {
namespace {

BBox random_box(Rng& rng, int width, int height, double min_side) {
  const double x1 = rng.next_in(0, width - min_side);
  const double y1 = rng.next_in(0, height - min_side);
  const double x2 = rng.next_in(x1 + min_side, static_cast<double>(width));
  const double y2 = rng.next_in(y1 + min_side, static_cast<double>(height));
  return BBox{x1, y1, x2, y2};
}

EntityType random_type(Rng& rng) {
  switch (rng.next_int(0, 2)) {
    case 0: return EntityType::Mol;
    case 1: return EntityType::Txt;
    default: return EntityType::Idt;
  }
}

}  // namespace

DiagramRecord random_record(Rng& rng, const std::string& image_id,
                            const RecordParams& params) {
  DiagramRecord record;
  record.image_id = image_id;
  record.file_name = image_id + ".png";
  record.width = static_cast<int>(rng.next_int(params.min_extent, params.max_extent));
  record.height = static_cast<int>(rng.next_int(params.min_extent, params.max_extent));
  record.style = kAllStyles[rng.next_int(0, 3)];

  const int n_reactions =
      static_cast<int>(rng.next_int(params.min_reactions, params.max_reactions));

  auto new_entity = [&]() {
    Entity e;
    e.id = static_cast<int>(record.entities.size());
    e.bbox = random_box(rng, record.width, record.height, params.min_side);
    e.etype = random_type(rng);
    record.entities.push_back(e);
    return e.id;
  };

  // A role draws fresh entities, occasionally reusing an earlier one. Reuse
  // within the same role list is forbidden by validation, so repeats are
  // skipped in place.
  auto fill_role = [&](std::vector<int>& role, int count) {
    for (int i = 0; i < count; ++i) {
      int id;
      if (!record.entities.empty() && rng.next_double() < params.share_probability) {
        id = static_cast<int>(
            rng.next_int(0, static_cast<std::int64_t>(record.entities.size()) - 1));
      } else {
        id = new_entity();
      }
      if (std::find(role.begin(), role.end(), id) == role.end()) {
        role.push_back(id);
      }
    }
    assert(count == 0 || !role.empty());
  };

  for (int r = 0; r < n_reactions; ++r) {
    Reaction reaction;
    fill_role(reaction.reactants, 1 + static_cast<int>(rng.next_int(0, params.max_per_role - 1)));
    fill_role(reaction.conditions, static_cast<int>(rng.next_int(0, params.max_per_role)));
    fill_role(reaction.products, 1 + static_cast<int>(rng.next_int(0, params.max_per_role - 1)));
    // Reuse could leave a required role empty only if the repeat was skipped;
    // the first slot never repeats within the role, so this cannot happen.
    record.reactions.push_back(std::move(reaction));
  }

  // A diagram may also carry entities no reaction references, like stray
  // labels; add one sometimes.
  if (rng.next_double() < 0.3) new_entity();

  return record;
}

Dataset random_dataset(Rng& rng, int count, const RecordParams& params) {
  Dataset dataset;
  dataset.records.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    dataset.records.push_back(random_record(rng, "img" + std::to_string(i), params));
  }
  return dataset;
}

}  // namespace rxnseq::testing
