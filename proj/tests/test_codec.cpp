//
// Copyright 2026 the rxnseq authors
// SPDX-License-Identifier: Apache-2.0
//
#include "rxnseq/codec.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "rxnseq/rng.hpp"
#include "support/generators.hpp"

namespace rxnseq::codec {
namespace {

DiagramRecord one_reaction_record() {
  DiagramRecord record;
  record.image_id = "one";
  record.file_name = "one.png";
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

// Largest absolute coordinate error a clean round trip may introduce.
double bin_width(double extent, int n_bins) { return extent / n_bins; }

void expect_structures_close(const ReactionStructure& expected,
                             const ReactionStructure& actual, double tol_x,
                             double tol_y) {
  ASSERT_EQ(expected.reactions.size(), actual.reactions.size());
  for (std::size_t r = 0; r < expected.reactions.size(); ++r) {
    auto check_role = [&](const std::vector<ParsedEntity>& want,
                          const std::vector<ParsedEntity>& got) {
      ASSERT_EQ(want.size(), got.size());
      for (std::size_t i = 0; i < want.size(); ++i) {
        EXPECT_EQ(want[i].etype, got[i].etype);
        EXPECT_NEAR(want[i].bbox.x1, got[i].bbox.x1, tol_x);
        EXPECT_NEAR(want[i].bbox.y1, got[i].bbox.y1, tol_y);
        EXPECT_NEAR(want[i].bbox.x2, got[i].bbox.x2, tol_x);
        EXPECT_NEAR(want[i].bbox.y2, got[i].bbox.y2, tol_y);
      }
    };
    check_role(expected.reactions[r].reactants, actual.reactions[r].reactants);
    check_role(expected.reactions[r].conditions, actual.reactions[r].conditions);
    check_role(expected.reactions[r].products, actual.reactions[r].products);
  }
}

TEST(VocabularyTest, LayoutAndSize) {
  const Vocabulary v{2000};
  EXPECT_EQ(v.size(), 2010);
  EXPECT_EQ(v.mol(), 2000);
  EXPECT_EQ(v.txt(), 2001);
  EXPECT_EQ(v.idt(), 2002);
  EXPECT_EQ(v.rct(), 2003);
  EXPECT_EQ(v.cnd(), 2004);
  EXPECT_EQ(v.prd(), 2005);
  EXPECT_EQ(v.rxn(), 2006);
  EXPECT_EQ(v.eos(), 2007);
  EXPECT_EQ(v.bos(), 2008);
  EXPECT_EQ(v.pad(), 2009);
  EXPECT_TRUE(v.is_coord(0));
  EXPECT_TRUE(v.is_coord(1999));
  EXPECT_FALSE(v.is_coord(2000));
  EXPECT_FALSE(v.is_coord(-1));
  EXPECT_TRUE(v.is_entity_type(v.txt()));
  EXPECT_FALSE(v.is_entity_type(v.rct()));
}

TEST(VocabularyTest, TypeTokenMapping) {
  const Vocabulary v{100};
  for (const auto t : {EntityType::Mol, EntityType::Txt, EntityType::Idt}) {
    EXPECT_EQ(v.entity_type(v.type_token(t)), t);
  }
  EXPECT_THROW(v.entity_type(0), std::invalid_argument);
  EXPECT_THROW(v.entity_type(v.rct()), std::invalid_argument);
}

TEST(VocabularyTest, TokenNames) {
  const Vocabulary v{100};
  EXPECT_EQ(v.token_name(57), "57");
  EXPECT_EQ(v.token_name(v.mol()), "[Mol]");
  EXPECT_EQ(v.token_name(v.eos()), "[EOS]");
}

TEST(QuantizeTest, DirectFormula) {
  EXPECT_EQ(quantize(100, 400, 2000), 500);
}

TEST(QuantizeTest, ZeroMapsToZero) {
  EXPECT_EQ(quantize(0, 400, 2000), 0);
}

TEST(QuantizeTest, FullExtentClampsToLastBin) {
  EXPECT_EQ(quantize(400, 400, 2000), 1999);
}

TEST(QuantizeTest, RejectsBadArguments) {
  EXPECT_THROW(quantize(-1, 400, 2000), std::invalid_argument);
  EXPECT_THROW(quantize(10, 0, 2000), std::invalid_argument);
  EXPECT_THROW(quantize(10, -5, 2000), std::invalid_argument);
  EXPECT_THROW(quantize(10, 400, 0), std::invalid_argument);
}

TEST(QuantizeTest, MonotoneInCoord) {
  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    const double a = rng.next_in(0, 400);
    const double b = rng.next_in(0, 400);
    const double lo = std::min(a, b), hi = std::max(a, b);
    EXPECT_LE(quantize(lo, 400, 50), quantize(hi, 400, 50));
  }
}

TEST(DequantizeTest, BinCenters) {
  EXPECT_DOUBLE_EQ(dequantize(500, 400, 2000), 100.1);
  EXPECT_DOUBLE_EQ(dequantize(0, 400, 2000), 0.1);
}

TEST(DequantizeTest, RejectsOutOfRangeBin) {
  EXPECT_THROW(dequantize(-1, 400, 2000), std::invalid_argument);
  EXPECT_THROW(dequantize(2000, 400, 2000), std::invalid_argument);
}

TEST(DequantizeTest, RoundTripWithinBinWidth) {
  Rng rng(4);
  for (int i = 0; i < 500; ++i) {
    const double x = rng.next_in(0, 400);
    const double back = dequantize(quantize(x, 400, 2000), 400, 2000);
    EXPECT_NEAR(back, x, bin_width(400, 2000));
  }
}

TEST(EncodeTest, SingleReactionTokenLayout) {
  const auto record = one_reaction_record();
  const Vocabulary vocab{2000};
  const auto seq = encode(record, vocab);

  // Three entities of five tokens each, three role tokens, [Rxn], [EOS].
  ASSERT_EQ(seq.tokens.size(), 20u);
  EXPECT_EQ(seq.width, 640);
  EXPECT_EQ(seq.height, 480);
  EXPECT_EQ(seq.tokens[4], vocab.mol());
  EXPECT_EQ(seq.tokens[5], vocab.rct());
  EXPECT_EQ(seq.tokens[10], vocab.txt());
  EXPECT_EQ(seq.tokens[11], vocab.cnd());
  EXPECT_EQ(seq.tokens[16], vocab.mol());
  EXPECT_EQ(seq.tokens[17], vocab.prd());
  EXPECT_EQ(seq.tokens[18], vocab.rxn());
  EXPECT_EQ(seq.tokens[19], vocab.eos());

  EXPECT_EQ(seq.tokens[0], quantize(40, 640, 2000));
  EXPECT_EQ(seq.tokens[1], quantize(100, 480, 2000));
  EXPECT_EQ(seq.tokens[2], quantize(200, 640, 2000));
  EXPECT_EQ(seq.tokens[3], quantize(260, 480, 2000));
}

TEST(EncodeTest, NoReactionsIsJustEos) {
  DiagramRecord record;
  record.image_id = "empty";
  record.file_name = "empty.png";
  record.width = 100;
  record.height = 100;
  const Vocabulary vocab{2000};
  const auto seq = encode(record, vocab);
  ASSERT_EQ(seq.tokens.size(), 1u);
  EXPECT_EQ(seq.tokens[0], vocab.eos());
}

TEST(EncodeTest, EmptyConditionsKeepRoleToken) {
  auto record = one_reaction_record();
  record.reactions[0].conditions.clear();
  const Vocabulary vocab{2000};
  const auto seq = encode(record, vocab);
  // ... x1 y1 x2 y2 [Mol] [Rct] [Cnd] x1 ...
  ASSERT_EQ(seq.tokens.size(), 15u);
  EXPECT_EQ(seq.tokens[5], vocab.rct());
  EXPECT_EQ(seq.tokens[6], vocab.cnd());
}

TEST(EncodeTest, RejectsInvalidRecord) {
  auto record = one_reaction_record();
  record.reactions[0].reactants.clear();
  EXPECT_THROW(encode(record, Vocabulary{2000}), ValidationError);
}

TEST(EncodeTest, LengthFormulaHolds) {
  Rng rng(6);
  for (int i = 0; i < 100; ++i) {
    const auto record = testing::random_record(rng, "len" + std::to_string(i));
    const auto seq = encode(record, Vocabulary{2000});
    std::size_t slots = 0;
    for (const auto& rxn : record.reactions) {
      slots += rxn.reactants.size() + rxn.conditions.size() + rxn.products.size();
    }
    EXPECT_EQ(seq.tokens.size(), 5 * slots + 4 * record.reactions.size() + 1);
  }
}

TEST(DecodeTokensTest, EosOnlyIsCleanAndEmpty) {
  const Vocabulary vocab{2000};
  const auto result = decode_tokens({{vocab.eos()}, 640, 480}, vocab);
  EXPECT_EQ(result.status, ParseStatus::Clean);
  EXPECT_TRUE(result.structure.reactions.empty());
}

TEST(DecodeTokensTest, RoundTripMatchesInput) {
  Rng rng(7);
  const Vocabulary vocab{2000};
  for (int i = 0; i < 100; ++i) {
    const auto record = testing::random_record(rng, "rt" + std::to_string(i));
    const auto seq = encode(record, vocab);
    const auto result = decode_tokens(seq, vocab);
    ASSERT_EQ(result.status, ParseStatus::Clean);
    expect_structures_close(to_structure(record), result.structure,
                            bin_width(record.width, vocab.n_bins),
                            bin_width(record.height, vocab.n_bins));
  }
}

TEST(DecodeTokensTest, MissingRxnTruncatesLastReaction) {
  const Vocabulary vocab{2000};
  auto seq = encode(one_reaction_record(), vocab);
  seq.tokens.pop_back();  // drop [EOS]
  seq.tokens.pop_back();  // drop [Rxn]
  const auto result = decode_tokens(seq, vocab);
  EXPECT_EQ(result.status, ParseStatus::Truncated);
  EXPECT_TRUE(result.structure.reactions.empty());
}

TEST(DecodeTokensTest, KeepsCompleteReactionsBeforeTruncation) {
  const Vocabulary vocab{2000};
  auto record = one_reaction_record();
  record.reactions.push_back(record.reactions[0]);
  auto seq = encode(record, vocab);
  // Cut inside the second reaction: keep the first [Rxn], drop the rest.
  seq.tokens.resize(19 + 3);
  const auto result = decode_tokens(seq, vocab);
  EXPECT_EQ(result.status, ParseStatus::Truncated);
  EXPECT_EQ(result.structure.reactions.size(), 1u);
}

TEST(DecodeTokensTest, ReportsInvalidPosition) {
  const Vocabulary vocab{2000};
  const auto result = decode_tokens({{vocab.rxn(), vocab.eos()}, 100, 100}, vocab);
  EXPECT_EQ(result.status, ParseStatus::Invalid);
  EXPECT_EQ(result.error_position, 0u);

  // Valid entity, then a type token where a coordinate or role token belongs.
  const auto bad = decode_tokens(
      {{5, 6, 7, 8, vocab.mol(), vocab.mol()}, 100, 100}, vocab);
  EXPECT_EQ(bad.status, ParseStatus::Invalid);
  EXPECT_EQ(bad.error_position, 5u);
}

TEST(DecodeTokensTest, NeverThrowsOnGarbage) {
  const Vocabulary vocab{50};
  Rng rng(8);
  for (int i = 0; i < 2000; ++i) {
    TokenSequence seq;
    seq.width = 100;
    seq.height = 100;
    const int len = static_cast<int>(rng.next_int(0, 30));
    for (int j = 0; j < len; ++j) {
      seq.tokens.push_back(static_cast<int>(rng.next_int(-2, vocab.size() + 2)));
    }
    EXPECT_NO_THROW(decode_tokens(seq, vocab));
  }
}

TEST(OrderReactionsTest, ReadingSortsTopToBottomThenLeftToRight) {
  DiagramRecord record;
  record.image_id = "order";
  record.file_name = "o.png";
  record.width = 500;
  record.height = 500;
  record.entities = {
      {0, {10, 200, 60, 250}, EntityType::Mol},  // lower reaction
      {1, {200, 200, 260, 250}, EntityType::Mol},
      {2, {10, 10, 60, 60}, EntityType::Mol},  // upper reaction
      {3, {200, 10, 260, 60}, EntityType::Mol},
      {4, {300, 200, 360, 250}, EntityType::Mol},  // same row, further right
      {5, {400, 200, 460, 250}, EntityType::Mol},
  };
  record.reactions = {
      {{0}, {}, {1}},
      {{2}, {}, {3}},
      {{4}, {}, {5}},
  };

  const auto ordered = order_reactions(record, OrderingPolicy::reading());
  ASSERT_EQ(ordered.size(), 3u);
  EXPECT_EQ(ordered[0].reactants[0], 2);  // y=10 first
  EXPECT_EQ(ordered[1].reactants[0], 0);  // then y=200, x=10
  EXPECT_EQ(ordered[2].reactants[0], 4);  // then y=200, x=300
}

TEST(OrderReactionsTest, AnnotatedKeepsDatasetOrder) {
  Rng rng(10);
  const auto record = testing::random_record(rng, "ann");
  EXPECT_EQ(order_reactions(record, OrderingPolicy::annotated()), record.reactions);
}

TEST(OrderReactionsTest, RandomIsSeedDeterministic) {
  Rng rng(12);
  testing::RecordParams params;
  params.min_reactions = 5;
  params.max_reactions = 5;
  const auto record = testing::random_record(rng, "rand", params);

  const auto a = order_reactions(record, OrderingPolicy::random(7));
  const auto b = order_reactions(record, OrderingPolicy::random(7));
  EXPECT_EQ(a, b);

  // Same multiset of reactions regardless of seed.
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    auto shuffled = order_reactions(record, OrderingPolicy::random(seed));
    EXPECT_EQ(shuffled.size(), record.reactions.size());
    for (const auto& rxn : record.reactions) {
      EXPECT_NE(std::find(shuffled.begin(), shuffled.end(), rxn), shuffled.end());
    }
  }

  // Ten seeds on five reactions: practically impossible for every shuffle to
  // agree unless the shuffle ignores the seed.
  bool any_different = false;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    if (order_reactions(record, OrderingPolicy::random(seed)) != record.reactions) {
      any_different = true;
    }
  }
  EXPECT_TRUE(any_different);
}

TEST(OrderReactionsTest, RandomVariesPerImageId) {
  Rng rng(13);
  testing::RecordParams params;
  params.min_reactions = 6;
  params.max_reactions = 6;
  auto record_a = testing::random_record(rng, "ida", params);
  auto record_b = record_a;
  record_b.image_id = "idb";

  bool differ = false;
  for (std::uint64_t seed = 0; seed < 10 && !differ; ++seed) {
    differ = order_reactions(record_a, OrderingPolicy::random(seed)) !=
             order_reactions(record_b, OrderingPolicy::random(seed));
  }
  EXPECT_TRUE(differ);
}

TEST(TokenFileTest, WriteReadRoundTrip) {
  Rng rng(14);
  const Vocabulary vocab{2000};
  std::vector<TokenFileEntry> entries;
  for (int i = 0; i < 5; ++i) {
    const auto record = testing::random_record(rng, "tf" + std::to_string(i));
    entries.push_back({record.image_id, encode(record, vocab)});
  }

  std::stringstream stream;
  write_token_file(stream, entries);
  const auto loaded = read_token_file(stream);
  EXPECT_EQ(loaded, entries);
}

TEST(TokenFileTest, RejectsMalformedLines) {
  {
    std::stringstream stream("only_an_id\n");
    EXPECT_THROW(read_token_file(stream), ParseError);
  }
  {
    std::stringstream stream("id\tnotanumber\t100\t1 2 3\n");
    EXPECT_THROW(read_token_file(stream), ParseError);
  }
  {
    std::stringstream stream("id\t100\t100\t1 2 x\n");
    EXPECT_THROW(read_token_file(stream), ParseError);
  }
}

}  // namespace
}  // namespace rxnseq::codec
