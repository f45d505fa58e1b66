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


#pragma once

namespace dtvsfm {

/// Applies the DTVSFM_THREADS environment variable (0 or unset = runtime
/// default) to the OpenMP thread pool. Returns the resulting thread count.
int configure_threads_from_env();

/// Sets the worker count directly; 0 restores the runtime default.
void set_thread_count(int threads);
int thread_count();

}  // namespace dtvsfm
