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

#ifndef VLAFREEZE_ADAPTER_REGISTRY_H_
#define VLAFREEZE_ADAPTER_REGISTRY_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "vlafreeze/image.h"
#include "vlafreeze/model_adapter.h"

namespace vlafreeze {

struct AdapterSpec {
  std::string name = "mock-vla";
  std::uint64_t seed = 0;
  int patch_size = 8;
  int embedding_dim = 32;
  Shape input_shape = {32, 32, 3};
};

// Names MakeAdapter understands. Only "mock-vla" is runnable in this
// build; "spatialvla", "openvla" and "pi0" are reserved for adapters backed
// by external checkpoints and fail with kAdapter.
std::vector<std::string> KnownAdapters();

// Throws kValidation for unknown names and kAdapter for reserved ones.
std::unique_ptr<ModelAdapter> MakeAdapter(const AdapterSpec& spec);

// Shown in report rows, e.g. "MockVLA".
std::string AdapterDisplayName(const std::string& name);

}  // namespace vlafreeze

#endif  // VLAFREEZE_ADAPTER_REGISTRY_H_
