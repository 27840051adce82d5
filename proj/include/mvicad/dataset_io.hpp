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

#include "mvicad/simgen.hpp"
#include "mvicad/solver.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mvicad {

/// On-disk layout of a dataset directory: `manifest.json` plus raw
/// little-endian float64 files, row-major (one signal after another).
struct DatasetManifest {
  static constexpr int kFormatVersion = 1;
  static constexpr const char* kDtype = "float64-le";

  int format_version = kFormatVersion;
  int m = 0;
  int p = 0;
  int n = 0;
  std::string dtype = kDtype;
  std::vector<std::string> views;

  struct TruthFiles {
    std::string sources;              ///< p x n float64
    std::vector<std::string> mixing;  ///< m files of p x p float64
    std::string delays;               ///< m x p int64
    std::vector<std::string> noise;   ///< m files of p x n float64, may be empty
  };
  std::optional<TruthFiles> truth;
  nlohmann::json metadata = nlohmann::json::object();
};

nlohmann::json to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const nlohmann::json& j);

/// Writes `vs` (and its ground truth, if any) into directory `dir`, creating it.
DatasetManifest write_dataset(const std::filesystem::path& dir, const ViewSet& vs,
                              const nlohmann::json& metadata = nlohmann::json::object());

/// Inverse of write_dataset. Validates sizes and finiteness.
ViewSet read_dataset(const std::filesystem::path& dir);

/// Raw little-endian float64 helpers.
void write_f64(const std::filesystem::path& file, const double* data, std::size_t count);
std::vector<double> read_f64(const std::filesystem::path& file, std::size_t expected_count);

/// Fit output: `result.json` (matrices, delays, diagnostics) and `sources.bin` (p x n).
void write_fit_result(const std::filesystem::path& dir, const FitResult& result);
FitResult read_fit_result(const std::filesystem::path& dir);

}  // namespace mvicad
