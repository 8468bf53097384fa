// Copyright (c) 2026 The f2vs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "f2vs/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace f2vs::par {

static int resolve_max_threads() {
  const char* env = std::getenv("F2VS_THREADS");
  if (env == nullptr || *env == '\0') return omp_get_max_threads();
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || v < 0) return omp_get_max_threads();
  if (v == 0) return 1;  // 0 = serial
  return static_cast<int>(v);
}

int max_threads() {
  static const int cached = resolve_max_threads();
  return cached;
}

}  // namespace f2vs::par
