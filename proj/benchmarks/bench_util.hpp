// Copyright 2026 The unitforge Authors.
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

#pragma once

#include "unitforge/numkit/tensor.hpp"
#include "unitforge/rng.hpp"

namespace bench {

inline unitforge::nk::Tensor gaussian(unitforge::nk::Shape shape, unitforge::Rng& rng) {
  unitforge::nk::Tensor t(shape);
  for (auto& v : t.data()) v = rng.normal();
  return t;
}

}  // namespace bench
