//
// Copyright 2026 the rxnseq authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rxnseq/errors.hpp"

namespace rxnseq {

// Axis-aligned rectangle in pixel space, origin at the top-left corner.
// Validated boxes satisfy 0 <= x1 <= x2 and 0 <= y1 <= y2; boxes produced by
// decoding arbitrary token sequences may violate that until post-processing.
struct BBox {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
  bool degenerate() const { return x2 <= x1 || y2 <= y1; }

  bool operator==(const BBox&) const = default;
};

// Intersection of b with [0, width] x [0, height]. The result may be
// degenerate when b lies outside the frame; callers decide what to do then.
BBox clip_bbox(const BBox& b, double width, double height);

enum class EntityType { Mol, Txt, Idt };

std::string_view to_string(EntityType t);
std::optional<EntityType> entity_type_from_string(std::string_view s);

// A visual unit in a diagram: a molecular drawing, a text block, or a
// structure identifier label. The id is a dataset convenience, unique within
// its diagram; token sequences reference entities by geometry, never by id.
struct Entity {
  int id = 0;
  BBox bbox;
  EntityType etype = EntityType::Mol;

  bool operator==(const Entity&) const = default;
};

// One reaction as three role lists of entity ids. Reactants and products are
// non-empty for valid records; conditions may be empty.
struct Reaction {
  std::vector<int> reactants;
  std::vector<int> conditions;
  std::vector<int> products;

  bool operator==(const Reaction&) const = default;
};

enum class Style { SingleLine, MultipleLine, Tree, Graph };

inline constexpr Style kAllStyles[] = {Style::SingleLine, Style::MultipleLine,
                                       Style::Tree, Style::Graph};

std::string_view to_string(Style s);
std::optional<Style> style_from_string(std::string_view s);

// One annotated diagram. Reaction order is the annotated order.
struct DiagramRecord {
  std::string image_id;
  std::string file_name;
  int width = 0;
  int height = 0;
  Style style = Style::SingleLine;
  std::vector<Entity> entities;
  std::vector<Reaction> reactions;

  const Entity* find_entity(int id) const;

  bool operator==(const DiagramRecord&) const = default;
};

struct Dataset {
  std::vector<DiagramRecord> records;

  const DiagramRecord* find_record(const std::string& image_id) const;

  bool operator==(const Dataset&) const = default;
};

// A broken invariant in a record or dataset. Violations are data, not
// failures: validation never throws.
struct Violation {
  std::string rule;     // short rule name, e.g. "reactants empty"
  std::string message;  // names the offending entity / reaction

  bool operator==(const Violation&) const = default;
};

// Checks every record-level invariant: positive dimensions, distinct entity
// ids, well-ordered in-bounds boxes, non-empty reactants/products, resolvable
// ids, no id repeated within a role. Returns an empty list iff all hold.
std::vector<Violation> validate_record(const DiagramRecord& record);

// Record checks for every record plus dataset-wide image_id uniqueness.
// Messages are prefixed with the image_id they concern.
std::vector<Violation> validate_dataset(const Dataset& dataset);

// Thrown when an operation requires a valid record and got violations.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& context, std::vector<Violation> violations);

  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

// ---------------------------------------------------------------------------
// Parse target: reactions with role entities held by value (geometry + type,
// no ids). This is what the codec serializes and what decoding produces; an
// entity shared between reactions appears once per reaction.

struct ParsedEntity {
  BBox bbox;
  EntityType etype = EntityType::Mol;

  bool operator==(const ParsedEntity&) const = default;
};

struct ParsedReaction {
  std::vector<ParsedEntity> reactants;
  std::vector<ParsedEntity> conditions;
  std::vector<ParsedEntity> products;

  bool operator==(const ParsedReaction&) const = default;
};

struct ReactionStructure {
  std::vector<ParsedReaction> reactions;

  bool operator==(const ReactionStructure&) const = default;
};

// Resolves a record's id-based reactions into the value form, preserving
// reaction and role-list order. Throws ValidationError on unresolvable ids.
ReactionStructure to_structure(const DiagramRecord& record);

// Inverse direction for writing predictions in the dataset schema: entities
// with identical (bbox, type) collapse to one id, assigned in first-seen
// order, and a repeat of one id inside a single role list is dropped.
// Width/height/style describe the source image of the boxes.
DiagramRecord to_record(const ReactionStructure& structure,
                        const std::string& image_id,
                        const std::string& file_name, int width, int height,
                        Style style);

}  // namespace rxnseq
