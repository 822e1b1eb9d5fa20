#include <chrono>
#include <cstdlib>
#include <regex>

#include <httplib.h>

#include "eduembed/errors.hpp"
#include "eduembed/evaluation.hpp"

namespace eduembed {

namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

ParsedUrl parse_endpoint(const std::string& url) {
  static const std::regex pattern(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, pattern)) {
    throw ConfigError("remote endpoint must look like http(s)://host[:port]/path, got '" + url + "'");
  }
  return {m[1].str(), m[2].matched ? m[2].str() : "/"};
}

}  // namespace

RemoteBackend::RemoteBackend(RemoteConfig config) : config_(std::move(config)) {
  parse_endpoint(config_.endpoint);
  if (!(config_.timeout_seconds > 0.0)) throw ConfigError("remote timeout must be positive");
}

std::string RemoteBackend::answer(const std::string& context, const std::string& question) const {
  const auto url = parse_endpoint(config_.endpoint);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (url.origin.rfind("https://", 0) == 0) {
    throw NetworkError("this build has no TLS support for " + url.origin);
  }
#endif
  httplib::Client client(url.origin);
  const auto whole = static_cast<time_t>(config_.timeout_seconds);
  const auto micros = static_cast<time_t>((config_.timeout_seconds - static_cast<double>(whole)) * 1e6);
  client.set_connection_timeout(whole, micros);
  client.set_read_timeout(whole, micros);
  client.set_write_timeout(whole, micros);

  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  const std::string body = build_chat_request(config_.model, context, question).dump();

  const auto started = std::chrono::steady_clock::now();
  auto result = client.Post(url.path, headers, body, "application/json");
  if (!result) {
    const auto err = result.error();
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (err == httplib::Error::ConnectionTimeout ||
        (err == httplib::Error::Read && elapsed >= 0.95 * config_.timeout_seconds)) {
      throw TimeoutError("request to " + config_.endpoint + " timed out after " +
                         std::to_string(config_.timeout_seconds) + " s");
    }
    throw NetworkError("request to " + config_.endpoint + " failed: " + httplib::to_string(err));
  }
  if (result->status < 200 || result->status >= 300) {
    throw HttpStatusError(result->status, "endpoint returned HTTP " + std::to_string(result->status));
  }
  return parse_chat_response(result->body);
}

}  // namespace eduembed
