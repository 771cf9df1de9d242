//
// Copyright 2026 the rxnseq authors
// SPDX-License-Identifier: Apache-2.0
//
// Reference model server for the JSON-lines bridge protocol. It replays a
// fixed token sequence: at each step it scores 1 for the next target token
// (or for [EOS], id n_bins + 7, once the target is exhausted) and 0 for
// everything else. Built only against the protocol description; it shares no
// code with the toolkit library, which is what makes interop tests meaningful.
//
// The --misbehave flag exists for client error-path tests.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

namespace {

using json = nlohmann::json;

std::vector<long> parse_tokens(const std::string& text) {
  std::vector<long> tokens;
  std::istringstream in(text);
  long value = 0;
  while (in >> value) tokens.push_back(value);
  return tokens;
}

// Token file line: image_id<TAB>width<TAB>height<TAB>space-separated ids.
std::vector<long> tokens_from_file(const std::string& path, const std::string& image_id) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "loopback: cannot open " << path << "\n";
    std::exit(1);
  }
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string id, width, height, rest;
    std::getline(fields, id, '\t');
    std::getline(fields, width, '\t');
    std::getline(fields, height, '\t');
    std::getline(fields, rest);
    if (image_id.empty() || id == image_id) return parse_tokens(rest);
  }
  std::cerr << "loopback: no line for image id \"" << image_id << "\" in " << path
            << "\n";
  std::exit(1);
}

class Transcript {
 public:
  explicit Transcript(const std::string& path) {
    if (!path.empty()) out_.open(path, std::ios::trunc);
  }
  // direction is "<-" for received lines, "->" for sent ones.
  void log(const char* direction, const std::string& line) {
    if (out_.is_open()) out_ << direction << " " << line << "\n" << std::flush;
  }

 private:
  std::ofstream out_;
};

}  // namespace

int main(int argc, char** argv) {
  std::string tokens_arg;
  std::string token_file;
  std::string image_id;
  std::string transcript_path;
  std::string misbehave;

  CLI::App app{"loopback: reference replay server for the rxnseq model bridge"};
  app.add_option("--tokens", tokens_arg, "space-separated token ids to replay");
  app.add_option("--token-file", token_file,
                 "token file to replay; picks the --image-id line, else the first");
  app.add_option("--image-id", image_id, "line to select from --token-file");
  app.add_option("--transcript", transcript_path,
                 "write all wire traffic here, one prefixed line per message");
  app.add_option("--misbehave", misbehave,
                 "protocol violation to exercise client error handling")
      ->check(CLI::IsMember({"short-logits", "silent", "garbage"}));
  CLI11_PARSE(app, argc, argv);

  std::vector<long> target;
  if (!token_file.empty()) {
    target = tokens_from_file(token_file, image_id);
  } else {
    target = parse_tokens(tokens_arg);
  }

  Transcript transcript(transcript_path);
  long n_bins = 0;
  long vocab_size = 0;
  std::string line;

  while (std::getline(std::cin, line)) {
    transcript.log("<-", line);
    const json msg = json::parse(line, nullptr, false);
    if (msg.is_discarded() || !msg.is_object()) {
      std::cerr << "loopback: malformed request line\n";
      return 1;
    }
    const std::string type = msg.value("type", "");

    if (type == "init") {
      n_bins = msg.value("n_bins", 0L);
      vocab_size = msg.value("vocab_size", 0L);
      if (misbehave == "silent") {
        // Never answer; the client's handshake timeout should fire. Draining
        // stdin keeps EOF as a clean exit path.
        while (std::getline(std::cin, line)) {
        }
        return 0;
      }
      std::string reply = misbehave == "garbage" ? "not json at all"
                                                 : json{{"type", "ready"}}.dump();
      transcript.log("->", reply);
      std::cout << reply << "\n" << std::flush;
    } else if (type == "step") {
      const std::size_t position = msg.value("prefix", json::array()).size();
      std::vector<double> values(static_cast<std::size_t>(vocab_size), 0.0);
      const long next =
          position < target.size() ? target[position] : n_bins + 7;  // [EOS]
      if (next >= 0 && next < vocab_size) {
        values[static_cast<std::size_t>(next)] = 1.0;
      }
      if (misbehave == "short-logits") values.resize(3);
      const std::string reply = json{{"type", "logits"}, {"values", values}}.dump();
      transcript.log("->", reply);
      std::cout << reply << "\n" << std::flush;
    } else {
      std::cerr << "loopback: unknown request type \"" << type << "\"\n";
      return 1;
    }
  }
  return 0;
}
