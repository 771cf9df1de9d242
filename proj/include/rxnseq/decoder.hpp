//
// Copyright 2026 the rxnseq authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "rxnseq/codec.hpp"
#include "rxnseq/rng.hpp"
#include "rxnseq/schema.hpp"

namespace rxnseq::decode {

// Decoding state, named after the token just consumed. RctX1 means "the x1
// coordinate of a reactant entity was consumed"; the mask it exposes governs
// the next token. Eos is absorbing.
enum class DecodeState {
  Start,
  RctX1, RctY1, RctX2, RctY2, RctType,
  CndX1, CndY1, CndX2, CndY2, CndType,
  PrdX1, PrdY1, PrdX2, PrdY2, PrdType,
  RctEnd,  // [Rct] consumed
  CndEnd,  // [Cnd] consumed
  PrdEnd,  // [Prd] consumed
  RxnEnd,  // [Rxn] consumed
  Eos,
};

const char* to_string(DecodeState state);

// Anything that can score the next token given a prefix: a neural model
// behind the wire bridge, a replay oracle, a bigram baseline. Scores are raw
// (pre-softmax); decoding only takes the argmax.
class LogitSource {
 public:
  virtual ~LogitSource() = default;

  // Must return exactly one score per vocabulary id.
  virtual std::vector<double> scores(std::span<const int> prefix) = 0;
};

struct DecodeConfig {
  codec::Vocabulary vocab;
  int max_length = 500;
  bool allow_empty_output = true;  // when false, [EOS] is masked at Start
  // Source image dimensions, used to dequantize the parsed structure.
  int image_width = 0;
  int image_height = 0;
};

// The exact legal next-token set for a state, 1 = allowed, indexed by token
// id. [BOS] and [Pad] are never legal. Throws on the absorbing Eos state.
std::vector<std::uint8_t> allowed_tokens(DecodeState state,
                                         const codec::Vocabulary& vocab);

// Successor state for a token that allowed_tokens admits. A token outside
// the mask throws std::logic_error: it signals a decoder bug, not bad data.
DecodeState step(DecodeState state, int token, const codec::Vocabulary& vocab);

// True iff stepping through the whole sequence never leaves the masks and
// lands exactly on Eos at the final token.
bool accepts(const codec::TokenSequence& seq, const codec::Vocabulary& vocab);

struct DecodeOutcome {
  codec::TokenSequence sequence;  // raw emitted tokens
  ReactionStructure structure;    // parsed and post-processed
  bool truncated = false;         // hit max_length before [EOS]
};

// Grammar-constrained greedy decoding: at each step the argmax over masked
// scores, ties broken toward the lowest token id, NaN scores treated as
// -inf. Every non-truncated output satisfies accepts() regardless of the
// logit source. Logit-source failures propagate.
DecodeOutcome greedy_decode(LogitSource& source, const DecodeConfig& config);

// Inference cleanup: drops entities with degenerate boxes, then reactions
// left without reactants or products, then exact duplicate reactions
// (identical boxes and types per role, compared as multisets), keeping the
// first occurrence. Idempotent.
ReactionStructure postprocess(const ReactionStructure& structure);

// Test double: scores 1 for the target's next token and 0 elsewhere, so
// greedy decoding replays the target exactly. Optional seeded uniform noise
// in (-noise_eps, +noise_eps) perturbs every score; below 0.5 the argmax is
// unchanged. The target must satisfy accepts().
class ReplayOracle : public LogitSource {
 public:
  ReplayOracle(codec::TokenSequence target, const codec::Vocabulary& vocab,
               double noise_eps = 0.0, std::uint64_t seed = 0);

  std::vector<double> scores(std::span<const int> prefix) override;

 private:
  codec::TokenSequence target_;
  codec::Vocabulary vocab_;
  double noise_eps_;
  Rng rng_;
};

// Add-k smoothed bigram model over training sequences; a non-neural
// baseline that exercises the full decode pipeline. The first token of a
// sequence counts as following a virtual start symbol.
class BigramSource : public LogitSource {
 public:
  BigramSource(std::span<const codec::TokenSequence> train, double smoothing,
               const codec::Vocabulary& vocab);

  std::vector<double> scores(std::span<const int> prefix) override;

 private:
  std::vector<std::vector<long>> counts_;  // [prev][next], prev==size() is start
  std::vector<long> row_totals_;
  double smoothing_;
  int vocab_size_;
};

}  // namespace rxnseq::decode
