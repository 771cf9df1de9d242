//
// Copyright 2026 the rxnseq authors
// SPDX-License-Identifier: Apache-2.0
//
#include "rxnseq/codec.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "rxnseq/rng.hpp"

namespace rxnseq::codec {

EntityType Vocabulary::entity_type(int token) const {
  if (token == mol()) return EntityType::Mol;
  if (token == txt()) return EntityType::Txt;
  if (token == idt()) return EntityType::Idt;
  throw std::invalid_argument("Vocabulary::entity_type: token " +
                              std::to_string(token) + " is not a type token");
}

int Vocabulary::type_token(EntityType t) const {
  switch (t) {
    case EntityType::Mol: return mol();
    case EntityType::Txt: return txt();
    case EntityType::Idt: return idt();
  }
  throw std::invalid_argument("Vocabulary::type_token: bad entity type");
}

std::string Vocabulary::token_name(int token) const {
  if (is_coord(token)) return std::to_string(token);
  if (token == mol()) return "[Mol]";
  if (token == txt()) return "[Txt]";
  if (token == idt()) return "[Idt]";
  if (token == rct()) return "[Rct]";
  if (token == cnd()) return "[Cnd]";
  if (token == prd()) return "[Prd]";
  if (token == rxn()) return "[Rxn]";
  if (token == eos()) return "[EOS]";
  if (token == bos()) return "[BOS]";
  if (token == pad()) return "[Pad]";
  return "<invalid " + std::to_string(token) + ">";
}

int quantize(double coord, double extent, int n_bins) {
  if (n_bins <= 0) throw std::invalid_argument("quantize: n_bins must be positive");
  if (!(extent > 0)) throw std::invalid_argument("quantize: extent must be positive");
  if (coord < 0) throw std::invalid_argument("quantize: coord must be non-negative");
  const double bin = std::floor(coord / extent * n_bins);
  if (bin < 0) return 0;
  if (bin >= n_bins) return n_bins - 1;
  return static_cast<int>(bin);
}

double dequantize(int bin, double extent, int n_bins) {
  if (n_bins <= 0) throw std::invalid_argument("dequantize: n_bins must be positive");
  if (bin < 0 || bin >= n_bins) {
    throw std::invalid_argument("dequantize: bin " + std::to_string(bin) +
                                " outside [0, " + std::to_string(n_bins) + ")");
  }
  return (bin + 0.5) / n_bins * extent;
}

std::vector<Reaction> order_reactions(const DiagramRecord& record,
                                      const OrderingPolicy& order) {
  std::vector<Reaction> reactions = record.reactions;
  switch (order.kind) {
    case OrderKind::Annotated:
      break;
    case OrderKind::Reading: {
      auto key = [&](const Reaction& rxn) {
        double min_y = std::numeric_limits<double>::infinity();
        double min_x = std::numeric_limits<double>::infinity();
        for (int id : rxn.reactants) {
          if (const Entity* e = record.find_entity(id)) {
            min_y = std::min(min_y, e->bbox.y1);
            min_x = std::min(min_x, e->bbox.x1);
          }
        }
        return std::pair{min_y, min_x};
      };
      std::stable_sort(reactions.begin(), reactions.end(),
                       [&](const Reaction& a, const Reaction& b) { return key(a) < key(b); });
      break;
    }
    case OrderKind::Random: {
      Rng rng(mix_seed(order.seed, hash_string(record.image_id)));
      rng.shuffle(reactions);
      break;
    }
  }
  return reactions;
}

TokenSequence encode(const DiagramRecord& record, const Vocabulary& vocab,
                     const OrderingPolicy& order) {
  if (auto violations = validate_record(record); !violations.empty()) {
    throw ValidationError("encode(" + record.image_id + ")", std::move(violations));
  }

  TokenSequence seq;
  seq.width = record.width;
  seq.height = record.height;

  auto emit_entity = [&](int id) {
    const Entity& e = *record.find_entity(id);
    seq.tokens.push_back(quantize(e.bbox.x1, record.width, vocab.n_bins));
    seq.tokens.push_back(quantize(e.bbox.y1, record.height, vocab.n_bins));
    seq.tokens.push_back(quantize(e.bbox.x2, record.width, vocab.n_bins));
    seq.tokens.push_back(quantize(e.bbox.y2, record.height, vocab.n_bins));
    seq.tokens.push_back(vocab.type_token(e.etype));
  };

  for (const Reaction& rxn : order_reactions(record, order)) {
    for (int id : rxn.reactants) emit_entity(id);
    seq.tokens.push_back(vocab.rct());
    for (int id : rxn.conditions) emit_entity(id);
    seq.tokens.push_back(vocab.cnd());
    for (int id : rxn.products) emit_entity(id);
    seq.tokens.push_back(vocab.prd());
    seq.tokens.push_back(vocab.rxn());
  }
  seq.tokens.push_back(vocab.eos());
  return seq;
}

ParseResult decode_tokens(const TokenSequence& seq, const Vocabulary& vocab) {
  ParseResult result;

  // Role currently being filled: 0 = reactants, 1 = conditions, 2 = products.
  int role = 0;
  std::vector<int> pending;  // coordinate bins of the entity being read
  ParsedReaction current;
  bool saw_eos = false;

  const double w = seq.width > 0 ? seq.width : vocab.n_bins;
  const double h = seq.height > 0 ? seq.height : vocab.n_bins;

  auto role_entities = [&]() -> std::vector<ParsedEntity>& {
    return role == 0 ? current.reactants
                     : (role == 1 ? current.conditions : current.products);
  };

  auto fail = [&](std::size_t position) {
    result.status = ParseStatus::Invalid;
    result.error_position = position;
  };

  for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
    const int token = seq.tokens[i];
    if (saw_eos) {
      // Tokens after [EOS] are outside the grammar.
      fail(i);
      return result;
    }

    if (vocab.is_coord(token)) {
      if (pending.size() == 4) {
        // Fifth entity slot must be a type token.
        fail(i);
        return result;
      }
      pending.push_back(token);
      continue;
    }

    if (vocab.is_entity_type(token)) {
      if (pending.size() != 4) {
        fail(i);
        return result;
      }
      ParsedEntity entity;
      entity.bbox = BBox{dequantize(pending[0], w, vocab.n_bins),
                         dequantize(pending[1], h, vocab.n_bins),
                         dequantize(pending[2], w, vocab.n_bins),
                         dequantize(pending[3], h, vocab.n_bins)};
      entity.etype = vocab.entity_type(token);
      role_entities().push_back(entity);
      pending.clear();
      continue;
    }

    // Role / structure tokens are only legal between entities.
    if (!pending.empty()) {
      fail(i);
      return result;
    }

    if (token == vocab.rct()) {
      if (role != 0 || current.reactants.empty()) {
        fail(i);
        return result;
      }
      role = 1;
    } else if (token == vocab.cnd()) {
      if (role != 1) {
        fail(i);
        return result;
      }
      role = 2;
    } else if (token == vocab.prd()) {
      if (role != 2 || current.products.empty()) {
        fail(i);
        return result;
      }
      role = 3;
    } else if (token == vocab.rxn()) {
      if (role != 3) {
        fail(i);
        return result;
      }
      result.structure.reactions.push_back(std::move(current));
      current = {};
      role = 0;
    } else if (token == vocab.eos()) {
      if (role != 0 || !current.reactants.empty()) {
        // [EOS] is only legal at a reaction boundary.
        fail(i);
        return result;
      }
      saw_eos = true;
    } else {
      // [BOS], [Pad] or an out-of-vocabulary id.
      fail(i);
      return result;
    }
  }

  result.status = saw_eos ? ParseStatus::Clean : ParseStatus::Truncated;
  return result;
}

void write_token_file(std::ostream& out, std::span<const TokenFileEntry> entries) {
  for (const auto& entry : entries) {
    out << entry.image_id << '\t' << entry.seq.width << '\t' << entry.seq.height << '\t';
    for (std::size_t i = 0; i < entry.seq.tokens.size(); ++i) {
      if (i) out << ' ';
      out << entry.seq.tokens[i];
    }
    out << '\n';
  }
}

void write_token_file(const std::string& path, std::span<const TokenFileEntry> entries) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_token_file(out, entries);
  if (!out) throw IoError("write failed: " + path);
}

std::vector<TokenFileEntry> read_token_file(std::istream& in) {
  std::vector<TokenFileEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    TokenFileEntry entry;
    if (!std::getline(fields, entry.image_id, '\t')) {
      throw ParseError("token file line " + std::to_string(line_no) + ": missing image_id");
    }
    std::string width_field, height_field;
    if (!std::getline(fields, width_field, '\t') ||
        !std::getline(fields, height_field, '\t')) {
      throw ParseError("token file line " + std::to_string(line_no) +
                       ": expected image_id<TAB>width<TAB>height<TAB>tokens");
    }
    try {
      entry.seq.width = std::stoi(width_field);
      entry.seq.height = std::stoi(height_field);
    } catch (const std::exception&) {
      throw ParseError("token file line " + std::to_string(line_no) +
                       ": width/height must be integers");
    }
    int token;
    while (fields >> token) entry.seq.tokens.push_back(token);
    if (!fields.eof()) {
      throw ParseError("token file line " + std::to_string(line_no) +
                       ": malformed token id");
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::vector<TokenFileEntry> read_token_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_token_file(in);
}

}  // namespace rxnseq::codec
