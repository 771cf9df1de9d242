//
// Copyright 2026 the rxnseq authors
// SPDX-License-Identifier: Apache-2.0
//
#include "rxnseq/decoder.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace rxnseq::decode {

const char* to_string(DecodeState state) {
  switch (state) {
    case DecodeState::Start: return "Start";
    case DecodeState::RctX1: return "RctX1";
    case DecodeState::RctY1: return "RctY1";
    case DecodeState::RctX2: return "RctX2";
    case DecodeState::RctY2: return "RctY2";
    case DecodeState::RctType: return "RctType";
    case DecodeState::CndX1: return "CndX1";
    case DecodeState::CndY1: return "CndY1";
    case DecodeState::CndX2: return "CndX2";
    case DecodeState::CndY2: return "CndY2";
    case DecodeState::CndType: return "CndType";
    case DecodeState::PrdX1: return "PrdX1";
    case DecodeState::PrdY1: return "PrdY1";
    case DecodeState::PrdX2: return "PrdX2";
    case DecodeState::PrdY2: return "PrdY2";
    case DecodeState::PrdType: return "PrdType";
    case DecodeState::RctEnd: return "RctEnd";
    case DecodeState::CndEnd: return "CndEnd";
    case DecodeState::PrdEnd: return "PrdEnd";
    case DecodeState::RxnEnd: return "RxnEnd";
    case DecodeState::Eos: return "Eos";
  }
  return "?";
}

namespace {

// First entity-coordinate state of the role whose entities may start here.
DecodeState entity_entry(DecodeState state) {
  switch (state) {
    case DecodeState::Start:
    case DecodeState::RxnEnd:
    case DecodeState::RctType:
      return DecodeState::RctX1;
    case DecodeState::RctEnd:
    case DecodeState::CndType:
      return DecodeState::CndX1;
    case DecodeState::CndEnd:
    case DecodeState::PrdType:
      return DecodeState::PrdX1;
    default:
      throw std::logic_error("entity_entry: no entity may start here");
  }
}

}  // namespace

std::vector<std::uint8_t> allowed_tokens(DecodeState state,
                                         const codec::Vocabulary& vocab) {
  std::vector<std::uint8_t> mask(vocab.size(), 0);
  auto allow_coords = [&] {
    std::fill(mask.begin(), mask.begin() + vocab.n_bins, 1);
  };

  switch (state) {
    case DecodeState::Start:
    case DecodeState::RxnEnd:
      // Start another reaction or finish the structure.
      allow_coords();
      mask[vocab.eos()] = 1;
      break;

    case DecodeState::RctX1:
    case DecodeState::RctY1:
    case DecodeState::RctX2:
    case DecodeState::CndX1:
    case DecodeState::CndY1:
    case DecodeState::CndX2:
    case DecodeState::PrdX1:
    case DecodeState::PrdY1:
    case DecodeState::PrdX2:
      // Mid-entity: the next box coordinate is forced.
      allow_coords();
      break;

    case DecodeState::RctY2:
    case DecodeState::CndY2:
    case DecodeState::PrdY2:
      // Box complete; the entity type is pending.
      mask[vocab.mol()] = 1;
      mask[vocab.txt()] = 1;
      mask[vocab.idt()] = 1;
      break;

    case DecodeState::RctType:
      // Another reactant, or close the role (one was just emitted).
      allow_coords();
      mask[vocab.rct()] = 1;
      break;
    case DecodeState::CndType:
      allow_coords();
      mask[vocab.cnd()] = 1;
      break;
    case DecodeState::PrdType:
      allow_coords();
      mask[vocab.prd()] = 1;
      break;

    case DecodeState::RctEnd:
      // Conditions may be empty, so [Cnd] is legal immediately.
      allow_coords();
      mask[vocab.cnd()] = 1;
      break;
    case DecodeState::CndEnd:
      // Products must contain at least one entity.
      allow_coords();
      break;
    case DecodeState::PrdEnd:
      mask[vocab.rxn()] = 1;
      break;

    case DecodeState::Eos:
      throw std::invalid_argument("allowed_tokens: Eos is absorbing");
  }
  return mask;
}

DecodeState step(DecodeState state, int token, const codec::Vocabulary& vocab) {
  const auto mask = allowed_tokens(state, vocab);
  if (token < 0 || token >= static_cast<int>(mask.size()) || !mask[token]) {
    throw std::logic_error(std::string("step: token ") + vocab.token_name(token) +
                           " not allowed in state " + to_string(state));
  }

  if (vocab.is_coord(token)) {
    switch (state) {
      case DecodeState::Start:
      case DecodeState::RxnEnd:
      case DecodeState::RctType:
      case DecodeState::RctEnd:
      case DecodeState::CndType:
      case DecodeState::CndEnd:
      case DecodeState::PrdType:
        return entity_entry(state);
      case DecodeState::RctX1: return DecodeState::RctY1;
      case DecodeState::RctY1: return DecodeState::RctX2;
      case DecodeState::RctX2: return DecodeState::RctY2;
      case DecodeState::CndX1: return DecodeState::CndY1;
      case DecodeState::CndY1: return DecodeState::CndX2;
      case DecodeState::CndX2: return DecodeState::CndY2;
      case DecodeState::PrdX1: return DecodeState::PrdY1;
      case DecodeState::PrdY1: return DecodeState::PrdX2;
      case DecodeState::PrdX2: return DecodeState::PrdY2;
      default: break;
    }
  } else if (vocab.is_entity_type(token)) {
    switch (state) {
      case DecodeState::RctY2: return DecodeState::RctType;
      case DecodeState::CndY2: return DecodeState::CndType;
      case DecodeState::PrdY2: return DecodeState::PrdType;
      default: break;
    }
  } else if (token == vocab.rct()) {
    return DecodeState::RctEnd;
  } else if (token == vocab.cnd()) {
    return DecodeState::CndEnd;
  } else if (token == vocab.prd()) {
    return DecodeState::PrdEnd;
  } else if (token == vocab.rxn()) {
    return DecodeState::RxnEnd;
  } else if (token == vocab.eos()) {
    return DecodeState::Eos;
  }
  throw std::logic_error("step: unhandled transition");  // unreachable
}

bool accepts(const codec::TokenSequence& seq, const codec::Vocabulary& vocab) {
  DecodeState state = DecodeState::Start;
  for (int token : seq.tokens) {
    if (state == DecodeState::Eos) return false;  // tokens after [EOS]
    const auto mask = allowed_tokens(state, vocab);
    if (token < 0 || token >= static_cast<int>(mask.size()) || !mask[token]) {
      return false;
    }
    state = step(state, token, vocab);
  }
  return state == DecodeState::Eos;
}

DecodeOutcome greedy_decode(LogitSource& source, const DecodeConfig& config) {
  if (config.max_length < 1) {
    throw std::invalid_argument("greedy_decode: max_length must be >= 1");
  }

  DecodeOutcome outcome;
  outcome.sequence.width = config.image_width;
  outcome.sequence.height = config.image_height;

  DecodeState state = DecodeState::Start;
  auto& tokens = outcome.sequence.tokens;

  while (state != DecodeState::Eos &&
         tokens.size() < static_cast<std::size_t>(config.max_length)) {
    auto mask = allowed_tokens(state, config.vocab);
    if (!config.allow_empty_output && state == DecodeState::Start) {
      mask[config.vocab.eos()] = 0;
    }

    const std::vector<double> scores = source.scores(tokens);
    if (scores.size() != static_cast<std::size_t>(config.vocab.size())) {
      throw Error("greedy_decode: logit source returned " +
                  std::to_string(scores.size()) + " scores, expected " +
                  std::to_string(config.vocab.size()));
    }

    int best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < static_cast<int>(scores.size()); ++t) {
      if (!mask[t]) continue;
      const double s = std::isnan(scores[t])
                           ? -std::numeric_limits<double>::infinity()
                           : scores[t];
      if (best < 0 || s > best_score) {
        best = t;
        best_score = s;
      }
    }
    if (best < 0) throw std::logic_error("greedy_decode: empty mask");

    tokens.push_back(best);
    state = step(state, best, config.vocab);
  }

  outcome.truncated = state != DecodeState::Eos;
  outcome.structure =
      postprocess(codec::decode_tokens(outcome.sequence, config.vocab).structure);
  return outcome;
}

namespace {

std::vector<ParsedEntity> drop_degenerate(const std::vector<ParsedEntity>& entities) {
  std::vector<ParsedEntity> out;
  out.reserve(entities.size());
  for (const auto& e : entities) {
    if (!e.bbox.degenerate()) out.push_back(e);
  }
  return out;
}

// Role contents as a multiset, for exact duplicate detection.
std::vector<std::tuple<double, double, double, double, int>> role_key(
    const std::vector<ParsedEntity>& entities) {
  std::vector<std::tuple<double, double, double, double, int>> key;
  key.reserve(entities.size());
  for (const auto& e : entities) {
    key.emplace_back(e.bbox.x1, e.bbox.y1, e.bbox.x2, e.bbox.y2,
                     static_cast<int>(e.etype));
  }
  std::sort(key.begin(), key.end());
  return key;
}

}  // namespace

ReactionStructure postprocess(const ReactionStructure& structure) {
  ReactionStructure out;
  std::vector<std::array<std::vector<std::tuple<double, double, double, double, int>>, 3>>
      kept_keys;

  for (const auto& rxn : structure.reactions) {
    ParsedReaction cleaned{drop_degenerate(rxn.reactants),
                           drop_degenerate(rxn.conditions),
                           drop_degenerate(rxn.products)};
    if (cleaned.reactants.empty() || cleaned.products.empty()) continue;

    std::array<std::vector<std::tuple<double, double, double, double, int>>, 3> key{
        role_key(cleaned.reactants), role_key(cleaned.conditions),
        role_key(cleaned.products)};
    if (std::find(kept_keys.begin(), kept_keys.end(), key) != kept_keys.end()) {
      continue;  // exact duplicate of an earlier reaction
    }
    kept_keys.push_back(std::move(key));
    out.reactions.push_back(std::move(cleaned));
  }
  return out;
}

ReplayOracle::ReplayOracle(codec::TokenSequence target,
                           const codec::Vocabulary& vocab, double noise_eps,
                           std::uint64_t seed)
    : target_(std::move(target)),
      vocab_(vocab),
      noise_eps_(noise_eps),
      rng_(seed) {
  if (!accepts(target_, vocab_)) {
    throw std::invalid_argument("ReplayOracle: target sequence is not grammar-valid");
  }
  if (noise_eps_ < 0) {
    throw std::invalid_argument("ReplayOracle: noise_eps must be non-negative");
  }
}

std::vector<double> ReplayOracle::scores(std::span<const int> prefix) {
  std::vector<double> out(vocab_.size(), 0.0);
  const std::size_t pos = prefix.size();
  // Past the target's end the only sensible instruction is to stop.
  const int next = pos < target_.tokens.size() ? target_.tokens[pos] : vocab_.eos();
  out[next] = 1.0;
  if (noise_eps_ > 0) {
    for (auto& s : out) s += rng_.next_in(-noise_eps_, noise_eps_);
  }
  return out;
}

BigramSource::BigramSource(std::span<const codec::TokenSequence> train,
                           double smoothing, const codec::Vocabulary& vocab)
    : smoothing_(smoothing), vocab_size_(vocab.size()) {
  if (train.empty()) {
    throw std::invalid_argument("BigramSource: training corpus is empty");
  }
  if (!(smoothing > 0)) {
    throw std::invalid_argument("BigramSource: smoothing must be positive");
  }
  counts_.assign(vocab_size_ + 1, std::vector<long>(vocab_size_, 0));
  row_totals_.assign(vocab_size_ + 1, 0);

  for (const auto& seq : train) {
    int prev = vocab_size_;  // virtual start symbol
    for (int token : seq.tokens) {
      if (token < 0 || token >= vocab_size_) {
        throw std::invalid_argument("BigramSource: token outside vocabulary");
      }
      ++counts_[prev][token];
      ++row_totals_[prev];
      prev = token;
    }
  }
}

std::vector<double> BigramSource::scores(std::span<const int> prefix) {
  int prev = vocab_size_;
  if (!prefix.empty()) {
    prev = prefix.back();
    if (prev < 0 || prev >= vocab_size_) prev = vocab_size_;
  }
  const double denom = row_totals_[prev] + smoothing_ * vocab_size_;
  std::vector<double> out(vocab_size_);
  for (int t = 0; t < vocab_size_; ++t) {
    out[t] = (counts_[prev][t] + smoothing_) / denom;
  }
  return out;
}

}  // namespace rxnseq::decode
