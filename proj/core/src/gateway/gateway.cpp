#include "signcurator/gateway/gateway.hpp"

#include "signcurator/common/fs.hpp"
#include "signcurator/common/hash.hpp"
#include "signcurator/error.hpp"
#include "signcurator/gateway/png.hpp"

#include "../internal/json_util.hpp"

#include <httplib.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <thread>

namespace signcurator::gateway {

using detail::ordered_json;

std::string to_string(Role role) {
  switch (role) {
    case Role::Curator: return "curator";
    case Role::Judge: return "judge";
  }
  throw Error("unhandled role value");
}

namespace {

void require_endpoint(const EndpointConfig& endpoint, const char* name) {
  if (endpoint.base_url.empty()) {
    throw ConfigError(std::string(name) + " endpoint has no base_url");
  }
  if (endpoint.model_id.empty()) {
    throw ConfigError(std::string(name) + " endpoint has no model_id");
  }
  if (!(endpoint.timeout_s > 0.0)) {
    throw ConfigError(std::string(name) + " endpoint timeout_s must be > 0");
  }
  if (endpoint.max_frames_per_request < 1) {
    throw ConfigError(std::string(name) +
                      " endpoint max_frames_per_request must be >= 1");
  }
  parse_base_url(endpoint.base_url);
}

}  // namespace

void validate_model_separation(const GatewayConfig& config) {
  require_endpoint(config.curator, "curator");
  require_endpoint(config.judge, "judge");
  if (config.curator.model_id == config.judge.model_id) {
    throw ConfigError(
        "curator and judge are both '" + config.curator.model_id +
        "': a judge must be a different model than the curator it verifies, "
        "otherwise self-preference bias (preference leakage) can inflate "
        "acceptance; configure distinct model_ids");
  }
}

ParsedBaseUrl parse_base_url(const std::string& base_url) {
  const auto scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("base_url must include a scheme: '" + base_url + "'");
  }
  const std::string scheme = base_url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw ConfigError("base_url scheme must be http or https: '" + base_url +
                      "'");
  }
  const auto path_start = base_url.find('/', scheme_end + 3);
  ParsedBaseUrl parsed;
  if (path_start == std::string::npos) {
    parsed.origin = base_url;
  } else {
    parsed.origin = base_url.substr(0, path_start);
    parsed.path_prefix = base_url.substr(path_start);
  }
  while (!parsed.path_prefix.empty() && parsed.path_prefix.back() == '/') {
    parsed.path_prefix.pop_back();
  }
  if (parsed.origin.size() == scheme_end + 3) {
    throw ConfigError("base_url has no host: '" + base_url + "'");
  }
  return parsed;
}

std::string build_wire_body(const EndpointConfig& endpoint,
                            const ModelRequest& request) {
  ordered_json content = ordered_json::array();
  content.push_back({{"type", "text"}, {"text", request.prompt_text}});
  if (request.frames) {
    for (const auto& frame : request.frames->frames) {
      content.push_back(
          {{"type", "image_url"},
           {"image_url", {{"url", png_data_uri(frame)}}}});
    }
  }
  ordered_json body;
  body["model"] = endpoint.model_id;
  body["messages"] = ordered_json::array(
      {ordered_json{{"role", "user"}, {"content", content}}});
  body["temperature"] = request.decode.temperature;
  body["max_tokens"] = request.decode.max_tokens;
  return body.dump();
}

namespace {

class HttpBackend : public CompletionBackend {
 public:
  ModelResponse send(const EndpointConfig& endpoint,
                     const ModelRequest& request) override {
    const ParsedBaseUrl url = parse_base_url(endpoint.base_url);
    httplib::Client client(url.origin);
    client.set_connection_timeout(std::chrono::duration<double>(endpoint.timeout_s));
    client.set_read_timeout(std::chrono::duration<double>(endpoint.timeout_s));
    client.set_write_timeout(std::chrono::duration<double>(endpoint.timeout_s));
    httplib::Headers headers;
    if (!endpoint.api_key_ref.empty()) {
      if (const char* key = std::getenv(endpoint.api_key_ref.c_str())) {
        headers.emplace("Authorization", std::string("Bearer ") + key);
      }
    }
    const std::string body = build_wire_body(endpoint, request);
    auto result = client.Post(url.path_prefix + "/chat/completions", headers,
                              body, "application/json");
    if (!result) {
      throw GatewayUnavailableError(
          "transport failure against " + endpoint.base_url + ": " +
          httplib::to_string(result.error()));
    }
    if (result->status < 200 || result->status >= 300) {
      throw RequestError("endpoint " + endpoint.base_url + " returned HTTP " +
                             std::to_string(result->status),
                         result->status);
    }
    return parse_completion(result->body, endpoint);
  }

 private:
  static ModelResponse parse_completion(const std::string& body,
                                        const EndpointConfig& endpoint) {
    ordered_json j;
    try {
      j = ordered_json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      throw ProtocolError(std::string("completion body is not JSON: ") +
                          e.what());
    }
    if (!j.is_object() || !j.contains("choices") || !j["choices"].is_array() ||
        j["choices"].empty()) {
      throw ProtocolError("completion body has no choices");
    }
    const auto& first = j["choices"][0];
    if (!first.contains("message") || !first["message"].is_object() ||
        !first["message"].contains("content") ||
        !first["message"]["content"].is_string()) {
      throw ProtocolError("completion choice has no message content");
    }
    ModelResponse response;
    response.text = first["message"]["content"].get<std::string>();
    response.model_id = j.contains("model") && j["model"].is_string()
                            ? j["model"].get<std::string>()
                            : endpoint.model_id;
    if (j.contains("usage") && j["usage"].is_object()) {
      const auto& usage = j["usage"];
      const auto read = [&usage](const char* key) -> std::int64_t {
        return usage.contains(key) && usage[key].is_number()
                   ? usage[key].get<std::int64_t>()
                   : 0;
      };
      response.usage.prompt_tokens = read("prompt_tokens");
      response.usage.completion_tokens = read("completion_tokens");
      response.usage.total_tokens = read("total_tokens");
    }
    response.from_cache = false;
    return response;
  }
};

bool retryable_status(int status) {
  return status == 429 || (status >= 500 && status <= 599);
}

}  // namespace

std::unique_ptr<CompletionBackend> make_http_backend() {
  return std::make_unique<HttpBackend>();
}

Gateway::Gateway(GatewayConfig config,
                 std::unique_ptr<CompletionBackend> backend)
    : config_(std::move(config)),
      backend_(backend ? std::move(backend) : make_http_backend()),
      rng_(std::random_device{}()) {
  validate_model_separation(config_);
  if (config_.max_retries < 0) {
    throw ConfigError("max_retries must be >= 0");
  }
  if (config_.backoff_base_ms < 0) {
    throw ConfigError("backoff_base_ms must be >= 0");
  }
}

const EndpointConfig& Gateway::endpoint_for(Role role) const {
  return role == Role::Curator ? config_.curator : config_.judge;
}

void Gateway::rate_limit_acquire() {
  if (config_.rate_limit_rps <= 0.0) {
    return;
  }
  const auto interval = std::chrono::duration_cast<
      std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(1.0 / config_.rate_limit_rps));
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard<std::mutex> lock(rate_mutex_);
    const auto now = std::chrono::steady_clock::now();
    slot = next_slot_ < now ? now : next_slot_;
    next_slot_ = slot + interval;
  }
  std::this_thread::sleep_until(slot);
}

void Gateway::backoff_sleep(int attempt) {
  double jitter;
  {
    std::lock_guard<std::mutex> lock(rng_mutex_);
    jitter = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
  }
  // The jitter is additive on top of the deterministic schedule, so the
  // observed delay is always >= backoff_base_ms * 2^attempt.
  const double delay_ms =
      std::ldexp(static_cast<double>(config_.backoff_base_ms), attempt) *
      (1.0 + jitter);
  std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(delay_ms));
}

ModelResponse Gateway::complete(const ModelRequest& request) {
  if (request.prompt_text.empty()) {
    throw InputError("prompt_text must be nonempty");
  }
  const EndpointConfig& endpoint = endpoint_for(request.role);
  const std::size_t frame_count =
      request.frames ? request.frames->frames.size() : 0;
  if (frame_count > static_cast<std::size_t>(endpoint.max_frames_per_request)) {
    throw InputError("request carries " + std::to_string(frame_count) +
                     " frames but the " + to_string(request.role) +
                     " endpoint allows " +
                     std::to_string(endpoint.max_frames_per_request));
  }
  const int attempts = config_.max_retries + 1;
  std::string last_failure;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      backoff_sleep(attempt - 1);
    }
    rate_limit_acquire();
    try {
      network_calls_.fetch_add(1, std::memory_order_relaxed);
      return backend_->send(endpoint, request);
    } catch (const RequestError& e) {
      if (!retryable_status(e.status())) {
        throw;
      }
      last_failure = e.what();
    } catch (const GatewayUnavailableError& e) {
      last_failure = e.what();
    }
  }
  throw GatewayUnavailableError(
      "retries exhausted after " + std::to_string(attempts) +
      " attempts against the " + to_string(request.role) +
      " endpoint; last failure: " + last_failure);
}

std::string Gateway::cache_key(const EndpointConfig& endpoint,
                               const ModelRequest& request) {
  ordered_json j;
  j["model_id"] = endpoint.model_id;
  j["prompt_text"] = request.prompt_text;
  ordered_json digests = ordered_json::array();
  if (request.frames) {
    for (const auto& frame : request.frames->frames) {
      digests.push_back(sha256_hex(std::span<const std::uint8_t>(
          frame.rgb.data(), frame.rgb.size())));
    }
  }
  j["frame_digests"] = digests;
  j["temperature"] = request.decode.temperature;
  j["max_tokens"] = request.decode.max_tokens;
  return sha256_hex(j.dump());
}

ModelResponse Gateway::cached_complete(const ModelRequest& request) {
  if (config_.cache_dir.empty()) {
    return complete(request);
  }
  const EndpointConfig& endpoint = endpoint_for(request.role);
  const std::filesystem::path path =
      std::filesystem::path(config_.cache_dir) /
      cache_key(endpoint, request);
  std::error_code ec;
  if (std::filesystem::exists(path, ec)) {
    try {
      const ordered_json j =
          detail::parse_json(read_file(path), "cache entry");
      ModelResponse response;
      response.text = detail::require_string(j, "text", "cache entry");
      response.model_id = detail::require_string(j, "model_id", "cache entry");
      if (j.contains("usage") && j.at("usage").is_object()) {
        const auto& usage = j.at("usage");
        const auto read = [&usage](const char* key) -> std::int64_t {
          return usage.contains(key) && usage.at(key).is_number()
                     ? usage.at(key).get<std::int64_t>()
                     : 0;
        };
        response.usage.prompt_tokens = read("prompt_tokens");
        response.usage.completion_tokens = read("completion_tokens");
        response.usage.total_tokens = read("total_tokens");
      }
      response.from_cache = true;
      return response;
    } catch (const Error& e) {
      std::cerr << "warning: ignoring unreadable cache entry " << path
                << ": " << e.what() << "\n";
    }
  }
  ModelResponse response = complete(request);
  ordered_json j;
  j["text"] = response.text;
  j["model_id"] = response.model_id;
  j["usage"] = {{"prompt_tokens", response.usage.prompt_tokens},
                {"completion_tokens", response.usage.completion_tokens},
                {"total_tokens", response.usage.total_tokens}};
  try {
    write_file_atomic(path, j.dump(2) + "\n");
  } catch (const IoError& e) {
    std::cerr << "warning: could not persist cache entry " << path << ": "
              << e.what() << "\n";
  }
  return response;
}

}  // namespace signcurator::gateway
