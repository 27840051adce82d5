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

#include "mvicad/state.hpp"

namespace mvicad {

SolverState SolverState::from_params(ModelParams params, const ViewSet& views) {
  SolverState state;
  state.params = std::move(params);
  state.refresh(views);
  return state;
}

void SolverState::refresh(const ViewSet& views) { aligned = aligned_sources(params, views); }

void SolverState::refresh_mean() {
  aligned.mean = aligned.Y.front();
  for (std::size_t i = 1; i < aligned.Y.size(); ++i) aligned.mean += aligned.Y[i];
  aligned.mean /= static_cast<double>(aligned.Y.size());
}

void SolverState::replace_aligned(std::size_t i, SignalMatrix y_new) {
  const double m = static_cast<double>(aligned.Y.size());
  aligned.mean += (y_new - aligned.Y[i]) / m;
  aligned.Y[i] = std::move(y_new);
}

}  // namespace mvicad
