#pragma once

#include "signcurator/video/frames.hpp"

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <random>
#include <string>

namespace signcurator::gateway {

struct EndpointConfig {
  std::string base_url;    // e.g. "http://127.0.0.1:8089/v1"
  std::string model_id;
  std::string api_key_ref;  // env var holding the key; empty = no auth header
  int max_frames_per_request = 32;
  double timeout_s = 60.0;
};

struct GatewayConfig {
  EndpointConfig curator;
  EndpointConfig judge;
  double rate_limit_rps = 4.0;  // <= 0 disables rate limiting
  int max_retries = 3;
  int backoff_base_ms = 200;
  std::string cache_dir;  // empty disables the response cache
};

enum class Role {
  Curator,
  Judge,
};

std::string to_string(Role role);

struct DecodeParams {
  double temperature = 0.0;  // deterministic decoding keeps the cache coherent
  int max_tokens = 512;
};

struct ModelRequest {
  Role role = Role::Curator;
  std::string prompt_text;
  std::shared_ptr<const video::FrameSequence> frames;
  DecodeParams decode;
};

struct TokenUsage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  std::int64_t total_tokens = 0;
};

struct ModelResponse {
  std::string text;
  std::string model_id;  // serving model echo
  TokenUsage usage;
  bool from_cache = false;
};

// Curator and judge must be distinct models: a judge related to the curator
// invites self-preference bias. Throws ConfigError on violation or on an
// under-specified endpoint.
void validate_model_separation(const GatewayConfig& config);

// One model exchange. The HTTP implementation raises RequestError with the
// status for any non-2xx reply, ProtocolError for a 2xx reply that does not
// match the wire schema, and GatewayUnavailableError for transport failures.
class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  virtual ModelResponse send(const EndpointConfig& endpoint,
                             const ModelRequest& request) = 0;
};

std::unique_ptr<CompletionBackend> make_http_backend();

// Chat-completions request body for one request, as sent on the wire.
// Exposed for conformance tests.
std::string build_wire_body(const EndpointConfig& endpoint,
                            const ModelRequest& request);

// Splits a base URL into "scheme://host[:port]" and a path prefix.
// Exposed for config validation.
struct ParsedBaseUrl {
  std::string origin;
  std::string path_prefix;  // "" or starts with '/'
};
ParsedBaseUrl parse_base_url(const std::string& base_url);

// Shared request funnel: per-request retry with exponential backoff, a
// global rate limit, and a digest-keyed response cache. Thread-safe.
class Gateway {
 public:
  // Validates model separation; backend defaults to the HTTP implementation.
  explicit Gateway(GatewayConfig config,
                   std::unique_ptr<CompletionBackend> backend = nullptr);

  const GatewayConfig& config() const { return config_; }

  // Sends with retries. 429 and 5xx statuses and transport failures retry
  // up to max_retries with exponential backoff (base * 2^attempt, plus up to
  // one extra interval of jitter); other 4xx raise RequestError immediately;
  // exhausted retries raise GatewayUnavailableError.
  ModelResponse complete(const ModelRequest& request);

  // complete() behind a cache keyed by digest over (endpoint model_id,
  // prompt text, ordered frame digests, decode params). Cache I/O failures
  // degrade to an uncached completion with a warning on stderr.
  ModelResponse cached_complete(const ModelRequest& request);

  // Requests that actually reached the backend (cache hits excluded).
  std::int64_t network_calls() const {
    return network_calls_.load(std::memory_order_relaxed);
  }

  static std::string cache_key(const EndpointConfig& endpoint,
                               const ModelRequest& request);

 private:
  const EndpointConfig& endpoint_for(Role role) const;
  void rate_limit_acquire();
  void backoff_sleep(int attempt);

  GatewayConfig config_;
  std::unique_ptr<CompletionBackend> backend_;
  std::mutex rate_mutex_;
  std::chrono::steady_clock::time_point next_slot_{};
  std::mutex rng_mutex_;
  std::mt19937_64 rng_;
  std::atomic<std::int64_t> network_calls_{0};
};

}  // namespace signcurator::gateway
