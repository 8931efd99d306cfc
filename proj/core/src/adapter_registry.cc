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

#include "vlafreeze/adapter_registry.h"

#include <algorithm>

#include "vlafreeze/error.h"
#include "vlafreeze/mock_vla.h"

namespace vlafreeze {
namespace {

struct Entry {
  const char* name;
  const char* display;
  bool runnable;
};

constexpr Entry kEntries[] = {
    {"mock-vla", "MockVLA", true},
    {"spatialvla", "SpatialVLA", false},
    {"openvla", "OpenVLA", false},
    {"pi0", "\xcf\x80" "0", false},
};

const Entry* Lookup(const std::string& name) {
  for (const Entry& e : kEntries) {
    if (name == e.name) return &e;
  }
  return nullptr;
}

}  // namespace

std::vector<std::string> KnownAdapters() {
  std::vector<std::string> names;
  for (const Entry& e : kEntries) names.emplace_back(e.name);
  return names;
}

std::unique_ptr<ModelAdapter> MakeAdapter(const AdapterSpec& spec) {
  const Entry* entry = Lookup(spec.name);
  if (entry == nullptr) {
    Fail(ErrorCode::kValidation, "unknown adapter '" + spec.name + "'");
  }
  if (!entry->runnable) {
    Fail(ErrorCode::kAdapter,
         "adapter '" + spec.name +
             "' needs external model weights, which this build does not ship");
  }
  MockVlaOptions options;
  options.seed = spec.seed;
  options.patch_size = spec.patch_size;
  options.embedding_dim = spec.embedding_dim;
  options.input_shape = spec.input_shape;
  return std::make_unique<MockVla>(options);
}

std::string AdapterDisplayName(const std::string& name) {
  const Entry* entry = Lookup(name);
  return entry == nullptr ? name : entry->display;
}

}  // namespace vlafreeze
