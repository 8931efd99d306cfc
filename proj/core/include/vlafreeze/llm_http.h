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

#ifndef VLAFREEZE_LLM_HTTP_H_
#define VLAFREEZE_LLM_HTTP_H_

#include <functional>
#include <string>

#include "vlafreeze/prompt_forge.h"

namespace vlafreeze {

struct HttpLlmOptions {
  // Full URL of an OpenAI-compatible chat-completions endpoint, e.g.
  // "https://api.openai.com/v1/chat/completions".
  std::string endpoint;
  std::string model = "o3";
  // Environment variable holding the bearer token; unset means no
  // Authorization header.
  std::string api_key_env = "OPENAI_API_KEY";
  // Transport-level retries for connection failures, 429 and 5xx.
  int max_retries = 3;
  double initial_backoff_seconds = 0.5;
  double backoff_multiplier = 2.0;
  // Attach LlmGenerationRequest::scene_png as an image part.
  bool send_images = true;
};

class HttpLlmService final : public LlmService {
 public:
  explicit HttpLlmService(HttpLlmOptions options);

  std::string name() const override { return "http:" + options_.endpoint; }
  std::string Complete(const LlmGenerationRequest& request) override;

  // Request body sent for `request`; exposed for inspection.
  std::string BuildRequestBody(const LlmGenerationRequest& request) const;

  // Sleep hook, replaced in tests to observe the backoff schedule.
  void set_sleeper(std::function<void(double)> sleeper) {
    sleeper_ = std::move(sleeper);
  }

 private:
  HttpLlmOptions options_;
  std::string scheme_host_port_;
  std::string path_;
  std::function<void(double)> sleeper_;
};

std::string Base64Encode(std::string_view bytes);

}  // namespace vlafreeze

#endif  // VLAFREEZE_LLM_HTTP_H_
