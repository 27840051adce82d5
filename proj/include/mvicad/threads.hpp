/*
 * Copyright 2026 The MVICAD Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <optional>
#include <string>

namespace mvicad {

inline constexpr const char* kThreadsEnv = "MVICAD_THREADS";

/// Parses a thread cap; nullopt for empty, non-numeric or non-positive input.
std::optional<int> parse_thread_cap(const std::string& text);

/// Applies MVICAD_THREADS (if set and valid) to the OpenMP runtime.
/// Returns the thread count in effect afterwards.
int apply_thread_env();

int max_threads();

}  // namespace mvicad
