// Copyright 2026 The vlafreeze Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "vlafreeze/llm_http.h"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "json.hpp"

namespace vlafreeze {

std::string Base64Encode(std::string_view bytes) {
  static constexpr char kAlphabet[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const unsigned n = (static_cast<unsigned char>(bytes[i]) << 16) |
                       (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                       static_cast<unsigned char>(bytes[i + 2]);
    out += kAlphabet[(n >> 18) & 63];
    out += kAlphabet[(n >> 12) & 63];
    out += kAlphabet[(n >> 6) & 63];
    out += kAlphabet[n & 63];
  }
  if (i < bytes.size()) {
    unsigned n = static_cast<unsigned char>(bytes[i]) << 16;
    if (i + 1 < bytes.size()) n |= static_cast<unsigned char>(bytes[i + 1]) << 8;
    out += kAlphabet[(n >> 18) & 63];
    out += kAlphabet[(n >> 12) & 63];
    out += i + 1 < bytes.size() ? kAlphabet[(n >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

HttpLlmService::HttpLlmService(HttpLlmOptions options)
    : options_(std::move(options)) {
  const std::string& url = options_.endpoint;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    Fail(ErrorCode::kValidation,
         "LLM endpoint must be an http:// or https:// URL: " + url);
  }
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    Fail(ErrorCode::kValidation, "unsupported LLM endpoint scheme: " + scheme);
  }
  const auto path_begin = url.find('/', scheme_end + 3);
  scheme_host_port_ = url.substr(0, path_begin);
  path_ = path_begin == std::string::npos ? "/" : url.substr(path_begin);
  if (options_.max_retries < 0) {
    Fail(ErrorCode::kValidation, "max_retries must be non-negative");
  }
  sleeper_ = [](double seconds) {
    std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
  };
}

std::string HttpLlmService::BuildRequestBody(
    const LlmGenerationRequest& request) const {
  nlohmann::ordered_json body;
  body["model"] = options_.model;
  nlohmann::ordered_json messages = nlohmann::ordered_json::array();
  messages.push_back({{"role", "system"}, {"content", request.system_prompt}});

  std::string user_text = request.user_prompt;
  const bool attach = options_.send_images && request.scene_png.has_value();
  if (!attach && request.scene_description.has_value()) {
    user_text += "\n\nScene description: " + *request.scene_description;
  }
  if (attach) {
    nlohmann::ordered_json parts = nlohmann::ordered_json::array();
    parts.push_back({{"type", "text"}, {"text", user_text}});
    parts.push_back(
        {{"type", "image_url"},
         {"image_url",
          {{"url", "data:image/png;base64," + Base64Encode(*request.scene_png)}}}});
    messages.push_back({{"role", "user"}, {"content", parts}});
  } else {
    messages.push_back({{"role", "user"}, {"content", user_text}});
  }
  body["messages"] = std::move(messages);
  return body.dump();
}

std::string HttpLlmService::Complete(const LlmGenerationRequest& request) {
  httplib::Client client(scheme_host_port_);
  const auto timeout = std::chrono::duration<double>(request.timeout_seconds);
  client.set_connection_timeout(
      std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_read_timeout(
      std::chrono::duration_cast<std::chrono::microseconds>(timeout));

  httplib::Headers headers;
  if (const char* key = std::getenv(options_.api_key_env.c_str());
      key != nullptr && *key != '\0') {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  const std::string body = BuildRequestBody(request);

  double backoff = options_.initial_backoff_seconds;
  std::string last_error;
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    if (attempt > 0) {
      sleeper_(backoff);
      backoff *= options_.backoff_multiplier;
    }
    auto result = client.Post(path_, headers, body, "application/json");
    if (!result) {
      last_error = "transport error: " + httplib::to_string(result.error());
      continue;
    }
    const int status = result->status;
    if (status == 429 || status >= 500) {
      last_error = "HTTP " + std::to_string(status);
      continue;
    }
    if (status != 200) {
      Fail(ErrorCode::kGeneration, "LLM endpoint returned HTTP " +
                                       std::to_string(status) + ": " +
                                       result->body);
    }
    try {
      const auto doc = nlohmann::json::parse(result->body);
      return doc.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& ex) {
      Fail(ErrorCode::kGeneration,
           std::string("unexpected LLM response shape: ") + ex.what());
    }
  }
  Fail(ErrorCode::kGeneration, "LLM endpoint unreachable after " +
                                   std::to_string(options_.max_retries + 1) +
                                   " attempt(s): " + last_error);
}

}  // namespace vlafreeze
