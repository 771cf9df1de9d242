//
// Copyright 2026 the rxnseq authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <span>
#include <vector>

#include "rxnseq/codec.hpp"

namespace rxnseq::testing {

// Independent acceptor for the token grammar
//
//   entity    := coord coord coord coord (mol | txt | idt)
//   reaction  := entity+ rct entity* cnd entity+ prd rxn
//   sequence  := reaction* eos
//
// built by regular-expression machinery only: a Thompson NFA from the regex
// above, then subset construction to a DFA. It shares no code with the
// decoder's state machine, so agreement between the two is evidence, not
// tautology.
class GrammarOracle {
 public:
  explicit GrammarOracle(const codec::Vocabulary& vocab);

  bool accepts(std::span<const int> tokens) const;

  // DFA surface, for product-construction equivalence checks.
  int start_state() const { return start_; }
  int num_states() const { return static_cast<int>(accepting_.size()); }
  int alphabet_size() const { return alphabet_; }
  int step(int state, int token) const {
    return transitions_[static_cast<std::size_t>(state) *
                            static_cast<std::size_t>(alphabet_) +
                        static_cast<std::size_t>(token)];
  }
  bool accepting(int state) const { return accepting_[static_cast<std::size_t>(state)]; }
  // True when no accepting state is reachable from state.
  bool dead(int state) const { return dead_[static_cast<std::size_t>(state)]; }

 private:
  int alphabet_ = 0;
  int start_ = 0;
  std::vector<int> transitions_;  // num_states x alphabet, row-major
  std::vector<char> accepting_;
  std::vector<char> dead_;
};

}  // namespace rxnseq::testing
