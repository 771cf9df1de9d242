//
// Copyright 2026 the rxnseq authors
// SPDX-License-Identifier: Apache-2.0
//
#include "rxnseq/model_bridge.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <mutex>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace rxnseq::bridge {
namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

// A model process that exits early would otherwise kill us with SIGPIPE on
// the next write; with the default handler replaced, write fails with EPIPE
// and surfaces as a BridgeError. Installed once, and only when the
// application has not set its own handler.
void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] {
    struct sigaction current {};
    if (sigaction(SIGPIPE, nullptr, &current) == 0 &&
        current.sa_handler == SIG_DFL) {
      struct sigaction ignore {};
      ignore.sa_handler = SIG_IGN;
      sigaction(SIGPIPE, &ignore, nullptr);
    }
  });
}

double seconds_until(Clock::time_point deadline) {
  return std::chrono::duration<double>(deadline - Clock::now()).count();
}

json parse_response(const std::string& line, const char* phase) {
  try {
    return json::parse(line);
  } catch (const json::parse_error& e) {
    throw BridgeError(std::string("bridge: malformed JSON during ") + phase + ": " +
                      e.what());
  }
}

}  // namespace

void BridgeConfig::validate() const {
  if (command.empty()) {
    throw std::invalid_argument("BridgeConfig: command must be non-empty");
  }
  if (!(handshake_timeout_s > 0) || !(step_timeout_s > 0)) {
    throw std::invalid_argument("BridgeConfig: timeouts must be positive");
  }
}

ModelBridge::ModelBridge(const BridgeConfig& config, const codec::Vocabulary& vocab,
                         const std::string& image_path)
    : step_timeout_s_(config.step_timeout_s), vocab_size_(vocab.size()) {
  config.validate();
  ignore_sigpipe();

  int to_child[2];   // parent writes, child reads as stdin
  int from_child[2];  // child writes as stdout, parent reads
  if (pipe(to_child) != 0) {
    throw BridgeError(std::string("bridge: pipe failed: ") + std::strerror(errno));
  }
  if (pipe(from_child) != 0) {
    const int saved = errno;
    close(to_child[0]);
    close(to_child[1]);
    throw BridgeError(std::string("bridge: pipe failed: ") + std::strerror(saved));
  }

  const pid_t pid = fork();
  if (pid < 0) {
    const int saved = errno;
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    throw BridgeError(std::string("bridge: fork failed: ") + std::strerror(saved));
  }
  if (pid == 0) {
    // Own process group, so shutdown() can kill the whole command tree even
    // when the shell forks helpers.
    setpgid(0, 0);
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    execl("/bin/sh", "sh", "-c", config.command.c_str(), static_cast<char*>(nullptr));
    // Reached only when exec fails; the parent sees EOF and reports it.
    _exit(127);
  }

  setpgid(pid, pid);  // mirror of the child's call, whichever runs first wins
  pid_ = pid;
  child_stdin_ = to_child[1];
  child_stdout_ = from_child[0];
  close(to_child[0]);
  close(from_child[1]);
  fcntl(child_stdout_, F_SETFL, O_NONBLOCK);

  try {
    json init;
    init["type"] = "init";
    init["n_bins"] = vocab.n_bins;
    init["vocab_size"] = vocab.size();
    init["image"] = image_path;
    send_line(init.dump(), "handshake");

    const auto reply =
        parse_response(read_line(config.handshake_timeout_s, "handshake"), "handshake");
    if (!reply.is_object() || reply.value("type", "") != "ready") {
      throw BridgeError("bridge: handshake expected {\"type\":\"ready\"}, got: " +
                        reply.dump());
    }
  } catch (...) {
    shutdown();
    throw;
  }
}

ModelBridge::~ModelBridge() { shutdown(); }

std::vector<double> ModelBridge::scores(std::span<const int> prefix) {
  json request;
  request["type"] = "step";
  request["prefix"] = std::vector<int>(prefix.begin(), prefix.end());
  send_line(request.dump(), "step");

  const auto reply = parse_response(read_line(step_timeout_s_, "step"), "step");
  if (!reply.is_object() || reply.value("type", "") != "logits") {
    throw BridgeError("bridge: step expected {\"type\":\"logits\",...}, got: " +
                      reply.dump());
  }
  const auto it = reply.find("values");
  if (it == reply.end() || !it->is_array()) {
    throw BridgeError("bridge: logits response has no \"values\" array");
  }
  if (static_cast<int>(it->size()) != vocab_size_) {
    throw BridgeError("bridge: logits length mismatch: expected " +
                      std::to_string(vocab_size_) + ", got " +
                      std::to_string(it->size()));
  }
  std::vector<double> values;
  values.reserve(it->size());
  for (const auto& v : *it) {
    if (!v.is_number()) {
      throw BridgeError("bridge: logits contain a non-numeric value");
    }
    values.push_back(v.get<double>());
  }
  return values;
}

void ModelBridge::send_line(const std::string& line, const char* phase) {
  std::string payload = line;
  payload.push_back('\n');
  std::size_t sent = 0;
  while (sent < payload.size()) {
    const ssize_t n = write(child_stdin_, payload.data() + sent, payload.size() - sent);
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno == EPIPE) {
        // Same surface as EOF on read: whether the dead process is noticed
        // on write or on read depends only on scheduling.
        throw BridgeError(
            std::string("bridge: model process closed its output during ") + phase);
      }
      throw BridgeError(std::string("bridge: write to model failed: ") +
                        std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }
}

std::string ModelBridge::read_line(double timeout_s, const char* phase) {
  const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                           std::chrono::duration<double>(timeout_s));
  for (;;) {
    const auto newline = buffer_.find('\n');
    if (newline != std::string::npos) {
      std::string line = buffer_.substr(0, newline);
      buffer_.erase(0, newline + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }

    const double remaining = seconds_until(deadline);
    if (remaining <= 0) {
      throw BridgeError(std::string("bridge: timeout waiting for ") + phase +
                        " response");
    }
    pollfd pfd{child_stdout_, POLLIN, 0};
    const int ready = poll(&pfd, 1, static_cast<int>(remaining * 1000) + 1);
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw BridgeError(std::string("bridge: poll failed: ") + std::strerror(errno));
    }
    if (ready == 0) continue;

    char chunk[4096];
    const ssize_t n = read(child_stdout_, chunk, sizeof(chunk));
    if (n > 0) {
      buffer_.append(chunk, static_cast<std::size_t>(n));
    } else if (n == 0) {
      throw BridgeError(std::string("bridge: model process closed its output during ") +
                        phase);
    } else if (errno != EAGAIN && errno != EWOULDBLOCK && errno != EINTR) {
      throw BridgeError(std::string("bridge: read from model failed: ") +
                        std::strerror(errno));
    }
  }
}

void ModelBridge::shutdown() noexcept {
  if (child_stdin_ >= 0) {
    close(child_stdin_);
    child_stdin_ = -1;
  }
  if (child_stdout_ >= 0) {
    close(child_stdout_);
    child_stdout_ = -1;
  }
  if (pid_ > 0) {
    // Closing stdin asks the child to exit; give it a moment, then force it.
    const pid_t pid = static_cast<pid_t>(pid_);
    int status = 0;
    for (int i = 0; i < 50; ++i) {
      const pid_t r = waitpid(pid, &status, WNOHANG);
      if (r == pid || (r < 0 && errno == ECHILD)) {
        pid_ = -1;
        return;
      }
      usleep(10'000);
    }
    if (kill(-pid, SIGKILL) != 0) kill(pid, SIGKILL);
    waitpid(pid, &status, 0);
    pid_ = -1;
  }
}

std::unique_ptr<decode::LogitSource> open_bridge(const BridgeConfig& config,
                                                 const codec::Vocabulary& vocab,
                                                 const std::string& image_path) {
  return std::make_unique<ModelBridge>(config, vocab, image_path);
}

}  // namespace rxnseq::bridge
