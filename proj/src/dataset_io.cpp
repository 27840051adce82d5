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

#include "mvicad/dataset_io.hpp"

#include "mvicad/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace mvicad {

namespace {

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    std::reverse(bytes, bytes + sizeof(T));
    std::memcpy(&v, bytes, sizeof(T));
  }
  return v;
}

template <class T>
void write_raw(const fs::path& file, const T* data, std::size_t count) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(DataError::Kind::io, "cannot open " + file.string() + " for writing");
  for (std::size_t k = 0; k < count; ++k) {
    const T v = to_little(data[k]);
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  if (!out) throw DataError(DataError::Kind::io, "write failed: " + file.string());
}

template <class T>
std::vector<T> read_raw(const fs::path& file, std::size_t expected_count) {
  if (!fs::exists(file)) throw DataError(DataError::Kind::missing_file, "missing file: " + file.string());
  const auto bytes = fs::file_size(file);
  if (bytes != expected_count * sizeof(T))
    throw DataError(DataError::Kind::size_mismatch,
                    "size mismatch in " + file.string() + ": expected " +
                        std::to_string(expected_count * sizeof(T)) + " bytes, found " +
                        std::to_string(bytes));
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DataError(DataError::Kind::io, "cannot open " + file.string());
  std::vector<T> out(expected_count);
  in.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(bytes));
  if (!in) throw DataError(DataError::Kind::io, "read failed: " + file.string());
  for (auto& v : out) v = to_little(v);
  return out;
}

void write_matrix(const fs::path& file, const Matrix& mat) {
  write_f64(file, mat.data(), static_cast<std::size_t>(mat.size()));
}

Matrix read_matrix(const fs::path& file, int rows, int cols) {
  const auto flat = read_f64(file, static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  return Eigen::Map<const Matrix>(flat.data(), rows, cols);
}

std::string view_name(const char* stem, std::size_t i) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s_%03zu.bin", stem, i);
  return buf;
}

json matrix_json(const Matrix& mat) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < mat.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < mat.cols(); ++c) row.push_back(mat(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows > 0 ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
  Matrix out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j.at(r).size()) != cols)
      throw DataError(DataError::Kind::validation, "ragged matrix in result file");
    for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = j.at(r).at(c).get<double>();
  }
  return out;
}

}  // namespace

void write_f64(const fs::path& file, const double* data, std::size_t count) {
  write_raw(file, data, count);
}

std::vector<double> read_f64(const fs::path& file, std::size_t expected_count) {
  auto out = read_raw<double>(file, expected_count);
  for (double v : out)
    if (!std::isfinite(v))
      throw DataError(DataError::Kind::non_finite, "non-finite value in " + file.string());
  return out;
}

json to_json(const DatasetManifest& mf) {
  json j;
  j["format_version"] = mf.format_version;
  j["m"] = mf.m;
  j["p"] = mf.p;
  j["n"] = mf.n;
  j["dtype"] = mf.dtype;
  j["views"] = mf.views;
  if (mf.truth) {
    j["ground_truth"] = {{"sources", mf.truth->sources},
                         {"mixing", mf.truth->mixing},
                         {"delays", mf.truth->delays},
                         {"noise", mf.truth->noise}};
  }
  j["metadata"] = mf.metadata;
  return j;
}

DatasetManifest manifest_from_json(const json& j) {
  DatasetManifest mf;
  try {
    mf.format_version = j.at("format_version").get<int>();
    mf.m = j.at("m").get<int>();
    mf.p = j.at("p").get<int>();
    mf.n = j.at("n").get<int>();
    mf.dtype = j.at("dtype").get<std::string>();
    mf.views = j.at("views").get<std::vector<std::string>>();
    if (j.contains("ground_truth") && !j["ground_truth"].is_null()) {
      const auto& g = j["ground_truth"];
      DatasetManifest::TruthFiles tf;
      tf.sources = g.at("sources").get<std::string>();
      tf.mixing = g.at("mixing").get<std::vector<std::string>>();
      tf.delays = g.at("delays").get<std::string>();
      if (g.contains("noise")) tf.noise = g["noise"].get<std::vector<std::string>>();
      mf.truth = std::move(tf);
    }
    if (j.contains("metadata")) mf.metadata = j["metadata"];
  } catch (const json::exception& e) {
    throw DataError(DataError::Kind::validation, std::string("malformed manifest: ") + e.what());
  }
  if (mf.format_version != DatasetManifest::kFormatVersion)
    throw DataError(DataError::Kind::validation,
                    "unsupported format_version " + std::to_string(mf.format_version));
  if (mf.dtype != DatasetManifest::kDtype)
    throw DataError(DataError::Kind::validation, "unsupported dtype " + mf.dtype);
  if (mf.m < 1) throw DataError(DataError::Kind::validation, "manifest m must be at least 1");
  if (mf.p < 1) throw DataError(DataError::Kind::validation, "manifest p must be at least 1");
  if (mf.n < 2) throw DataError(DataError::Kind::validation, "manifest n must be at least 2");
  if (mf.views.size() != static_cast<std::size_t>(mf.m))
    throw DataError(DataError::Kind::validation, "manifest lists " + std::to_string(mf.views.size()) +
                                                     " view files for m = " + std::to_string(mf.m));
  if (mf.truth) {
    if (mf.truth->mixing.size() != static_cast<std::size_t>(mf.m))
      throw DataError(DataError::Kind::validation, "ground truth needs one mixing file per view");
    if (!mf.truth->noise.empty() && mf.truth->noise.size() != static_cast<std::size_t>(mf.m))
      throw DataError(DataError::Kind::validation, "ground truth needs one noise file per view");
  }
  return mf;
}

DatasetManifest write_dataset(const fs::path& dir, const ViewSet& vs, const json& metadata) {
  validate(vs);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError(DataError::Kind::io, "cannot create " + dir.string() + ": " + ec.message());

  DatasetManifest mf;
  mf.m = static_cast<int>(vs.m());
  mf.p = static_cast<int>(vs.p());
  mf.n = static_cast<int>(vs.n());
  mf.metadata = metadata.is_null() ? json::object() : metadata;
  for (std::size_t i = 0; i < vs.m(); ++i) {
    mf.views.push_back(view_name("view", i));
    write_matrix(dir / mf.views.back(), vs.views[i]);
  }
  if (vs.truth) {
    const auto& gt = *vs.truth;
    DatasetManifest::TruthFiles tf;
    tf.sources = "sources.bin";
    write_matrix(dir / tf.sources, gt.sources);
    for (std::size_t i = 0; i < gt.mixing.size(); ++i) {
      tf.mixing.push_back(view_name("mixing", i));
      write_matrix(dir / tf.mixing.back(), gt.mixing[i]);
    }
    tf.delays = "delays.bin";
    std::vector<std::int64_t> flat;
    for (const auto& d : gt.delays)
      for (int v : d.values()) flat.push_back(v);
    write_raw(dir / tf.delays, flat.data(), flat.size());
    for (std::size_t i = 0; i < gt.noise.size(); ++i) {
      tf.noise.push_back(view_name("noise", i));
      write_matrix(dir / tf.noise.back(), gt.noise[i]);
    }
    mf.truth = std::move(tf);
  }

  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw DataError(DataError::Kind::io, "cannot write manifest in " + dir.string());
  out << to_json(mf).dump(2) << '\n';
  return mf;
}

ViewSet read_dataset(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest.json";
  if (!fs::exists(manifest_path))
    throw DataError(DataError::Kind::missing_file, "missing file: " + manifest_path.string());
  json j;
  try {
    std::ifstream in(manifest_path);
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(DataError::Kind::validation, "cannot parse manifest: " + std::string(e.what()));
  }
  const DatasetManifest mf = manifest_from_json(j);

  ViewSet vs;
  for (const auto& name : mf.views) vs.views.push_back(read_matrix(dir / name, mf.p, mf.n));
  if (mf.truth) {
    GroundTruth gt;
    gt.sources = read_matrix(dir / mf.truth->sources, mf.p, mf.n);
    for (const auto& name : mf.truth->mixing) gt.mixing.push_back(read_matrix(dir / name, mf.p, mf.p));
    const auto flat = read_raw<std::int64_t>(dir / mf.truth->delays,
                                             static_cast<std::size_t>(mf.m) * static_cast<std::size_t>(mf.p));
    for (int i = 0; i < mf.m; ++i) {
      std::vector<int> d(static_cast<std::size_t>(mf.p));
      for (int k = 0; k < mf.p; ++k)
        d[static_cast<std::size_t>(k)] = static_cast<int>(flat[static_cast<std::size_t>(i * mf.p + k)]);
      gt.delays.emplace_back(std::move(d), mf.n);
    }
    for (const auto& name : mf.truth->noise) gt.noise.push_back(read_matrix(dir / name, mf.p, mf.n));
    vs.truth = std::move(gt);
  }
  return vs;
}

void write_fit_result(const fs::path& dir, const FitResult& result) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError(DataError::Kind::io, "cannot create " + dir.string() + ": " + ec.message());
  json j;
  j["m"] = result.W.size();
  j["p"] = result.shared_sources.rows();
  j["n"] = result.shared_sources.cols();
  j["converged"] = result.converged;
  j["sweeps"] = result.sweeps;
  j["final_grad_norm"] = result.final_grad_norm;
  j["unmixing"] = json::array();
  for (const auto& w : result.W) j["unmixing"].push_back(matrix_json(w));
  j["delays"] = json::array();
  for (const auto& d : result.tau) j["delays"].push_back(std::vector<int>(d.values().begin(), d.values().end()));
  j["nll_history"] = json::array();
  for (const auto& rec : result.nll_history) {
    const char* phase = rec.phase == NllRecord::Phase::init       ? "init"
                        : rec.phase == NllRecord::Phase::unmixing ? "unmixing"
                                                                  : "delays";
    j["nll_history"].push_back({{"phase", phase}, {"sweep", rec.sweep}, {"value", rec.value}});
  }
  j["sources"] = "sources.bin";
  std::ofstream out(dir / "result.json", std::ios::trunc);
  if (!out) throw DataError(DataError::Kind::io, "cannot write result in " + dir.string());
  out << j.dump(2) << '\n';
  write_matrix(dir / "sources.bin", result.shared_sources);
}

FitResult read_fit_result(const fs::path& dir) {
  const fs::path path = dir / "result.json";
  if (!fs::exists(path)) throw DataError(DataError::Kind::missing_file, "missing file: " + path.string());
  FitResult r;
  try {
    std::ifstream in(path);
    const json j = json::parse(in);
    const int p = j.at("p").get<int>();
    const int n = j.at("n").get<int>();
    r.converged = j.at("converged").get<bool>();
    r.sweeps = j.at("sweeps").get<int>();
    r.final_grad_norm = j.at("final_grad_norm").get<double>();
    for (const auto& w : j.at("unmixing")) r.W.push_back(matrix_from_json(w));
    for (const auto& d : j.at("delays")) r.tau.emplace_back(d.get<std::vector<int>>(), n);
    for (const auto& rec : j.at("nll_history")) {
      const auto phase = rec.at("phase").get<std::string>();
      const auto kind = phase == "init"       ? NllRecord::Phase::init
                        : phase == "unmixing" ? NllRecord::Phase::unmixing
                                              : NllRecord::Phase::delays;
      r.nll_history.push_back({kind, rec.at("sweep").get<int>(), rec.at("value").get<double>()});
    }
    r.shared_sources = read_matrix(dir / j.at("sources").get<std::string>(), p, n);
  } catch (const json::exception& e) {
    throw DataError(DataError::Kind::validation, "malformed result file: " + std::string(e.what()));
  }
  return r;
}

}  // namespace mvicad
