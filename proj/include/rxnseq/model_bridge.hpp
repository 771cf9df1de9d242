//
// Copyright 2026 the rxnseq authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rxnseq/codec.hpp"
#include "rxnseq/decoder.hpp"
#include "rxnseq/errors.hpp"

namespace rxnseq::bridge {

// External model subprocess: how to start it and how long to wait for it.
struct BridgeConfig {
  std::string command;               // run via /bin/sh -c
  double handshake_timeout_s = 30.0;
  double step_timeout_s = 10.0;

  // Throws std::invalid_argument on an empty command or non-positive timeout.
  void validate() const;
};

// Spawn failures, timeouts, protocol violations, early exits.
class BridgeError : public Error {
 public:
  using Error::Error;
};

// JSON-lines client over a subprocess's standard streams. One JSON document
// per line in each direction; requests are strictly sequential. On
// construction performs the handshake:
//   -> {"type":"init","n_bins":N,"vocab_size":V,"image":"<path>"}
//   <- {"type":"ready"}
// and each scores() call is one step:
//   -> {"type":"step","prefix":[<token ids>]}
//   <- {"type":"logits","values":[<V floats>]}
// Any malformed response, wrong values length, timeout, or subprocess death
// raises BridgeError. Destruction closes the child's stdin and reaps it.
class ModelBridge : public decode::LogitSource {
 public:
  ModelBridge(const BridgeConfig& config, const codec::Vocabulary& vocab,
              const std::string& image_path);
  ~ModelBridge() override;

  ModelBridge(const ModelBridge&) = delete;
  ModelBridge& operator=(const ModelBridge&) = delete;

  std::vector<double> scores(std::span<const int> prefix) override;

 private:
  void send_line(const std::string& line, const char* phase);
  // Reads one newline-terminated line, waiting at most timeout_s in total.
  std::string read_line(double timeout_s, const char* phase);
  void shutdown() noexcept;

  long pid_ = -1;
  int child_stdin_ = -1;
  int child_stdout_ = -1;
  std::string buffer_;
  double step_timeout_s_;
  int vocab_size_;
};

std::unique_ptr<decode::LogitSource> open_bridge(const BridgeConfig& config,
                                                 const codec::Vocabulary& vocab,
                                                 const std::string& image_path);

}  // namespace rxnseq::bridge
