/*
Copyright 2026 The dtvsfm Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/


#include "dtvsfm/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

#include "dtvsfm/error.hpp"

namespace dtvsfm {

namespace {
int default_threads() {
  static const int n = omp_get_max_threads();
  return n;
}
}  // namespace

void set_thread_count(int threads) {
  if (threads < 0) fail(ErrorCode::kConfigError, "thread count must be >= 0");
  const int base = default_threads();
  omp_set_num_threads(threads == 0 ? base : threads);
}

int thread_count() { return omp_get_max_threads(); }

int configure_threads_from_env() {
  default_threads();
  const char* env = std::getenv("DTVSFM_THREADS");
  if (env == nullptr || *env == '\0') return thread_count();
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 0 || n > 4096) {
    fail(ErrorCode::kConfigError, std::string("DTVSFM_THREADS must be a non-negative integer: ") + env);
  }
  set_thread_count(static_cast<int>(n));
  return thread_count();
}

}  // namespace dtvsfm
