//
// Copyright 2026 the rxnseq authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rxnseq/schema.hpp"

namespace rxnseq::codec {

// Token id layout: coordinate bins occupy [0, n_bins); the ten special
// tokens follow in a fixed order. Total vocabulary size is n_bins + 10.
struct Vocabulary {
  int n_bins = 2000;

  int size() const { return n_bins + 10; }

  int mol() const { return n_bins + 0; }
  int txt() const { return n_bins + 1; }
  int idt() const { return n_bins + 2; }
  int rct() const { return n_bins + 3; }
  int cnd() const { return n_bins + 4; }
  int prd() const { return n_bins + 5; }
  int rxn() const { return n_bins + 6; }
  int eos() const { return n_bins + 7; }
  int bos() const { return n_bins + 8; }
  int pad() const { return n_bins + 9; }

  bool is_coord(int token) const { return token >= 0 && token < n_bins; }
  bool is_entity_type(int token) const { return token >= mol() && token <= idt(); }

  // Only defined for entity type tokens; throws otherwise.
  EntityType entity_type(int token) const;
  int type_token(EntityType t) const;

  // Human-readable token name for diagnostics, e.g. "512" or "[Rct]".
  std::string token_name(int token) const;

  bool operator==(const Vocabulary&) const = default;
};

// A serialized reaction structure. Width/height are the source image
// dimensions, required to map bin tokens back to pixels.
struct TokenSequence {
  std::vector<int> tokens;
  int width = 0;
  int height = 0;

  bool operator==(const TokenSequence&) const = default;
};

enum class OrderKind { Annotated, Reading, Random };

// How reactions are ordered before serialization. Annotated keeps dataset
// order (the training default); Reading sorts top-to-bottom then
// left-to-right by reactant boxes; Random is a seeded shuffle.
struct OrderingPolicy {
  OrderKind kind = OrderKind::Annotated;
  std::uint64_t seed = 0;

  static OrderingPolicy annotated() { return {OrderKind::Annotated, 0}; }
  static OrderingPolicy reading() { return {OrderKind::Reading, 0}; }
  static OrderingPolicy random(std::uint64_t seed) { return {OrderKind::Random, seed}; }
};

// floor(coord / extent * n_bins) clamped into [0, n_bins - 1], so a
// coordinate on the far image edge stays representable.
// Throws std::invalid_argument on coord < 0, extent <= 0 or n_bins <= 0.
int quantize(double coord, double extent, int n_bins);

// Bin-center inverse: (bin + 0.5) / n_bins * extent. Throws
// std::invalid_argument when bin is outside [0, n_bins).
double dequantize(int bin, double extent, int n_bins);

// Reaction order under the chosen policy. Reading sorts by (min y1, min x1)
// over each reaction's reactant boxes, stable for ties. Random derives its
// shuffle from (policy seed, image_id), so a fixed seed reproduces the same
// order per record while different records shuffle differently.
std::vector<Reaction> order_reactions(const DiagramRecord& record,
                                      const OrderingPolicy& order);

// Serializes a record: per reaction, each reactant entity as five tokens
// (x1 y1 x2 y2 type) then [Rct]; conditions then [Cnd] (the role token is
// emitted even when conditions are empty); products then [Prd]; then [Rxn];
// finally [EOS]. No [BOS] is emitted — begin-of-sequence is a decoder-side
// state, not a target token. Throws ValidationError on an invalid record.
TokenSequence encode(const DiagramRecord& record, const Vocabulary& vocab,
                     const OrderingPolicy& order = {});

enum class ParseStatus {
  Clean,      // full parse ending exactly at [EOS]
  Truncated,  // input ended before the grammar completed
  Invalid,    // a token violated the grammar at error_position
};

// Best-effort parse of an arbitrary token list. Complete reactions before
// the problem are kept; an incomplete trailing reaction is discarded.
struct ParseResult {
  ReactionStructure structure;
  ParseStatus status = ParseStatus::Clean;
  std::size_t error_position = 0;  // index of the offending token (Invalid only)
};

// Greedy parse against the grammar with dequantized pixel boxes. Total on
// arbitrary token lists: never throws on bad tokens, it reports them. When
// seq carries no positive dimensions the boxes come back in bin units.
ParseResult decode_tokens(const TokenSequence& seq, const Vocabulary& vocab);

// ---------------------------------------------------------------------------
// Line-oriented token file: one diagram per line,
//   image_id<TAB>width<TAB>height<TAB>space-separated token ids

struct TokenFileEntry {
  std::string image_id;
  TokenSequence seq;

  bool operator==(const TokenFileEntry&) const = default;
};

void write_token_file(std::ostream& out, std::span<const TokenFileEntry> entries);
void write_token_file(const std::string& path, std::span<const TokenFileEntry> entries);
std::vector<TokenFileEntry> read_token_file(std::istream& in);
std::vector<TokenFileEntry> read_token_file(const std::string& path);

}  // namespace rxnseq::codec
