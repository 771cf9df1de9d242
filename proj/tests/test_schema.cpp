//
// Copyright 2026 the rxnseq authors
// SPDX-License-Identifier: Apache-2.0
//
#include "rxnseq/schema.hpp"

#include <gtest/gtest.h>

#include <algorithm>

#include "rxnseq/rng.hpp"
#include "support/generators.hpp"

namespace rxnseq {
namespace {

DiagramRecord simple_record() {
  DiagramRecord record;
  record.image_id = "r1";
  record.file_name = "r1.png";
  record.width = 640;
  record.height = 480;
  record.style = Style::SingleLine;
  record.entities = {
      {0, {40, 100, 200, 260}, EntityType::Mol},
      {1, {220, 140, 300, 180}, EntityType::Txt},
      {2, {330, 90, 560, 230}, EntityType::Mol},
  };
  record.reactions = {{{0}, {1}, {2}}};
  return record;
}

bool has_rule(const std::vector<Violation>& violations, const std::string& rule) {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.rule == rule; });
}

TEST(BBoxTest, WidthHeightAreaDegenerate) {
  const BBox b{10, 20, 30, 60};
  EXPECT_DOUBLE_EQ(b.width(), 20);
  EXPECT_DOUBLE_EQ(b.height(), 40);
  EXPECT_DOUBLE_EQ(b.area(), 800);
  EXPECT_FALSE(b.degenerate());
  EXPECT_TRUE((BBox{10, 20, 10, 60}).degenerate());
  EXPECT_TRUE((BBox{10, 20, 30, 20}).degenerate());
  EXPECT_TRUE((BBox{30, 20, 10, 60}).degenerate());
}

TEST(ClipBBoxTest, ClampsAtZero) {
  EXPECT_EQ(clip_bbox({-5, 0, 10, 10}, 100, 100), (BBox{0, 0, 10, 10}));
}

TEST(ClipBBoxTest, InsideBoxUnchanged) {
  EXPECT_EQ(clip_bbox({0, 0, 10, 10}, 100, 100), (BBox{0, 0, 10, 10}));
}

TEST(ClipBBoxTest, ClampsAtBounds) {
  EXPECT_EQ(clip_bbox({90, 90, 120, 120}, 100, 100), (BBox{90, 90, 100, 100}));
}

TEST(ClipBBoxTest, Idempotent) {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const BBox b{rng.next_in(-50, 150), rng.next_in(-50, 150), rng.next_in(-50, 150),
                 rng.next_in(-50, 150)};
    const BBox once = clip_bbox(b, 100, 100);
    EXPECT_EQ(clip_bbox(once, 100, 100), once);
  }
}

TEST(ValidateRecordTest, WellFormedRecordHasNoViolations) {
  EXPECT_TRUE(validate_record(simple_record()).empty());
}

TEST(ValidateRecordTest, EmptyReactantsFlagged) {
  auto record = simple_record();
  record.reactions[0].reactants.clear();
  const auto violations = validate_record(record);
  ASSERT_EQ(violations.size(), 1u);
  EXPECT_EQ(violations[0].rule, "reactants empty");
}

TEST(ValidateRecordTest, EmptyProductsFlagged) {
  auto record = simple_record();
  record.reactions[0].products.clear();
  EXPECT_TRUE(has_rule(validate_record(record), "products empty"));
}

TEST(ValidateRecordTest, InvertedCornersFlagged) {
  auto record = simple_record();
  record.entities[0].bbox = {200, 100, 40, 260};  // x2 < x1
  const auto violations = validate_record(record);
  ASSERT_EQ(violations.size(), 1u);
  EXPECT_EQ(violations[0].rule, "degenerate bbox");
}

TEST(ValidateRecordTest, ZeroAreaBoxIsNotInverted) {
  auto record = simple_record();
  record.entities[0].bbox = {40, 100, 40, 260};  // x1 == x2
  EXPECT_TRUE(validate_record(record).empty());
}

TEST(ValidateRecordTest, OutOfBoundsFlagged) {
  auto record = simple_record();
  record.entities[2].bbox = {330, 90, 700, 230};  // x2 > width
  EXPECT_TRUE(has_rule(validate_record(record), "bbox out of bounds"));
}

TEST(ValidateRecordTest, DuplicateEntityIdFlagged) {
  auto record = simple_record();
  record.entities[1].id = 0;
  EXPECT_TRUE(has_rule(validate_record(record), "duplicate entity id"));
}

TEST(ValidateRecordTest, UnresolvedIdFlagged) {
  auto record = simple_record();
  record.reactions[0].products = {99};
  const auto violations = validate_record(record);
  EXPECT_TRUE(has_rule(violations, "unresolved entity id"));
  bool names_99 = false;
  for (const auto& v : violations) {
    if (v.message.find("99") != std::string::npos) names_99 = true;
  }
  EXPECT_TRUE(names_99);
}

TEST(ValidateRecordTest, RepeatedIdInRoleFlagged) {
  auto record = simple_record();
  record.reactions[0].reactants = {0, 0};
  EXPECT_TRUE(has_rule(validate_record(record), "duplicate id in role"));
}

TEST(ValidateRecordTest, NonPositiveDimensionsFlagged) {
  auto record = simple_record();
  record.width = 0;
  EXPECT_TRUE(has_rule(validate_record(record), "non-positive dimensions"));
}

TEST(ValidateRecordTest, PureAndRepeatable) {
  auto record = simple_record();
  record.reactions[0].reactants.clear();
  const auto first = validate_record(record);
  const auto second = validate_record(record);
  EXPECT_EQ(first, second);
}

TEST(ValidateDatasetTest, DuplicateImageIdFlagged) {
  Dataset dataset;
  dataset.records = {simple_record(), simple_record()};
  EXPECT_TRUE(has_rule(validate_dataset(dataset), "duplicate image_id"));
  dataset.records[1].image_id = "r2";
  EXPECT_TRUE(validate_dataset(dataset).empty());
}

TEST(ValidateDatasetTest, RandomRecordsAlwaysValid) {
  Rng rng(23);
  for (int i = 0; i < 100; ++i) {
    const auto record = testing::random_record(rng, "x" + std::to_string(i));
    EXPECT_TRUE(validate_record(record).empty());
  }
}

TEST(LookupTest, FindEntityAndRecord) {
  const auto record = simple_record();
  ASSERT_NE(record.find_entity(1), nullptr);
  EXPECT_EQ(record.find_entity(1)->etype, EntityType::Txt);
  EXPECT_EQ(record.find_entity(7), nullptr);

  Dataset dataset;
  dataset.records = {record};
  ASSERT_NE(dataset.find_record("r1"), nullptr);
  EXPECT_EQ(dataset.find_record("nope"), nullptr);
}

TEST(NameTest, EnumStringsRoundTrip) {
  for (const auto t : {EntityType::Mol, EntityType::Txt, EntityType::Idt}) {
    EXPECT_EQ(entity_type_from_string(to_string(t)), t);
  }
  for (const auto s : kAllStyles) {
    EXPECT_EQ(style_from_string(to_string(s)), s);
  }
  EXPECT_FALSE(entity_type_from_string("molecule").has_value());
  EXPECT_FALSE(style_from_string("singleline").has_value());
}

TEST(ToStructureTest, ResolvesRolesInOrder) {
  const auto structure = to_structure(simple_record());
  ASSERT_EQ(structure.reactions.size(), 1u);
  const auto& rxn = structure.reactions[0];
  ASSERT_EQ(rxn.reactants.size(), 1u);
  EXPECT_EQ(rxn.reactants[0].bbox, (BBox{40, 100, 200, 260}));
  EXPECT_EQ(rxn.reactants[0].etype, EntityType::Mol);
  ASSERT_EQ(rxn.conditions.size(), 1u);
  EXPECT_EQ(rxn.conditions[0].etype, EntityType::Txt);
  ASSERT_EQ(rxn.products.size(), 1u);
  EXPECT_EQ(rxn.products[0].bbox, (BBox{330, 90, 560, 230}));
}

TEST(ToStructureTest, ThrowsOnUnresolvedId) {
  auto record = simple_record();
  record.reactions[0].conditions = {42};
  EXPECT_THROW(to_structure(record), ValidationError);
}

TEST(ToRecordTest, InternsSharedEntities) {
  ReactionStructure structure;
  const ParsedEntity shared{{10, 10, 50, 50}, EntityType::Mol};
  const ParsedEntity other{{60, 10, 90, 50}, EntityType::Mol};
  structure.reactions.push_back({{shared}, {}, {other}});
  structure.reactions.push_back({{shared}, {}, {other}});

  const auto record = to_record(structure, "p", "p.png", 100, 100, Style::SingleLine);
  EXPECT_EQ(record.entities.size(), 2u);  // shared boxes collapse to one id
  ASSERT_EQ(record.reactions.size(), 2u);
  EXPECT_EQ(record.reactions[0], record.reactions[1]);
  EXPECT_TRUE(validate_record(record).empty());
}

TEST(ToRecordTest, RoundTripsThroughToStructure) {
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const auto record = testing::random_record(rng, "rt" + std::to_string(i));
    const auto structure = to_structure(record);
    const auto rebuilt = to_record(structure, record.image_id, record.file_name,
                                   record.width, record.height, record.style);
    EXPECT_EQ(to_structure(rebuilt), structure);
    EXPECT_TRUE(validate_record(rebuilt).empty());
  }
}

}  // namespace
}  // namespace rxnseq
