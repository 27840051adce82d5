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

#include "mvicad/kernels.hpp"

#include <vector>

namespace mvicad::kernels {

namespace {

// Below this many (rows x samples) the OpenMP team costs more than it saves.
constexpr Eigen::Index kParallelWork = 1 << 14;

Eigen::Index block_count(Eigen::Index n) { return (n + kBlock - 1) / kBlock; }

bool go_parallel(Eigen::Index rows, Eigen::Index n) {
  return block_count(n) > 1 && rows * n >= kParallelWork;
}

void check_pair(const SignalMatrix& z, const SignalMatrix& m_other) {
  (void)z;
  (void)m_other;
  eigen_assert(z.rows() == m_other.rows() && z.cols() == m_other.cols());
}

// Shared body of grad_sums for the column range [c0, c0 + len).
void accumulate_block(const SignalMatrix& z, const SignalMatrix& m_other, double m, Density d,
                      Eigen::Index c0, Eigen::Index len, GradSums& acc) {
  const Eigen::Index p = z.rows();
  const auto zb = z.middleCols(c0, len);
  const auto mb = m_other.middleCols(c0, len);
  const Matrix resid = zb - mb;
  Matrix score(p, len);
  acc.quad = resid.squaredNorm();
  acc.fsum = 0.0;
  acc.curv = Eigen::VectorXd::Zero(p);
  for (Eigen::Index a = 0; a < p; ++a) {
    for (Eigen::Index t = 0; t < len; ++t) {
      const double s = (zb(a, t) + (m - 1.0) * mb(a, t)) / m;
      const auto fv = f_eval(d, s);
      acc.fsum += fv.value;
      acc.curv(a) += fv.second;
      score(a, t) = fv.first;
    }
  }
  acc.resid_z.noalias() = resid * zb.transpose();
  acc.score_z.noalias() = score * zb.transpose();
  acc.power = zb.rowwise().squaredNorm();
}

}  // namespace

namespace serial {

void unmix(const Matrix& w, const SignalMatrix& x, SignalMatrix& out) {
  const Eigen::Index p = w.rows();
  const Eigen::Index n = x.cols();
  out.resize(p, n);
  for (Eigen::Index a = 0; a < p; ++a) {
    for (Eigen::Index t = 0; t < n; ++t) {
      double acc = 0.0;
      for (Eigen::Index k = 0; k < w.cols(); ++k) acc += w(a, k) * x(k, t);
      out(a, t) = acc;
    }
  }
}

LossSums loss_sums(const SignalMatrix& z, const SignalMatrix& m_other, double m, Density d) {
  check_pair(z, m_other);
  LossSums out;
  for (Eigen::Index a = 0; a < z.rows(); ++a) {
    for (Eigen::Index t = 0; t < z.cols(); ++t) {
      const double r = z(a, t) - m_other(a, t);
      out.quad += r * r;
      out.fsum += f_eval(d, (z(a, t) + (m - 1.0) * m_other(a, t)) / m).value;
    }
  }
  return out;
}

GradSums grad_sums(const SignalMatrix& z, const SignalMatrix& m_other, double m, Density d) {
  check_pair(z, m_other);
  const Eigen::Index p = z.rows();
  const Eigen::Index n = z.cols();
  GradSums out;
  out.resid_z = Matrix::Zero(p, p);
  out.score_z = Matrix::Zero(p, p);
  out.curv = Eigen::VectorXd::Zero(p);
  out.power = Eigen::VectorXd::Zero(p);
  for (Eigen::Index t = 0; t < n; ++t) {
    for (Eigen::Index a = 0; a < p; ++a) {
      const double r = z(a, t) - m_other(a, t);
      const auto fv = f_eval(d, (z(a, t) + (m - 1.0) * m_other(a, t)) / m);
      out.quad += r * r;
      out.fsum += fv.value;
      out.curv(a) += fv.second;
      out.power(a) += z(a, t) * z(a, t);
      for (Eigen::Index b = 0; b < p; ++b) {
        out.resid_z(a, b) += r * z(b, t);
        out.score_z(a, b) += fv.first * z(b, t);
      }
    }
  }
  return out;
}

double density_sum(const SignalMatrix& s, Density d) {
  double acc = 0.0;
  for (Eigen::Index a = 0; a < s.rows(); ++a)
    for (Eigen::Index t = 0; t < s.cols(); ++t) acc += f_eval(d, s(a, t)).value;
  return acc;
}

}  // namespace serial

namespace parallel {

void unmix(const Matrix& w, const SignalMatrix& x, SignalMatrix& out) {
  const Eigen::Index n = x.cols();
  const Eigen::Index nb = block_count(n);
  out.resize(w.rows(), n);
#pragma omp parallel for schedule(static) if (go_parallel(w.rows(), n))
  for (Eigen::Index b = 0; b < nb; ++b) {
    const Eigen::Index c0 = b * kBlock;
    const Eigen::Index len = std::min(kBlock, n - c0);
    out.middleCols(c0, len).noalias() = w * x.middleCols(c0, len);
  }
}

LossSums loss_sums(const SignalMatrix& z, const SignalMatrix& m_other, double m, Density d) {
  check_pair(z, m_other);
  const Eigen::Index n = z.cols();
  const Eigen::Index nb = block_count(n);
  std::vector<LossSums> part(static_cast<std::size_t>(nb));
#pragma omp parallel for schedule(static) if (go_parallel(z.rows(), n))
  for (Eigen::Index b = 0; b < nb; ++b) {
    const Eigen::Index c0 = b * kBlock;
    const Eigen::Index len = std::min(kBlock, n - c0);
    LossSums acc;
    for (Eigen::Index a = 0; a < z.rows(); ++a) {
      for (Eigen::Index t = c0; t < c0 + len; ++t) {
        const double r = z(a, t) - m_other(a, t);
        acc.quad += r * r;
        acc.fsum += f_eval(d, (z(a, t) + (m - 1.0) * m_other(a, t)) / m).value;
      }
    }
    part[static_cast<std::size_t>(b)] = acc;
  }
  LossSums out;
  for (const auto& pb : part) {
    out.quad += pb.quad;
    out.fsum += pb.fsum;
  }
  return out;
}

GradSums grad_sums(const SignalMatrix& z, const SignalMatrix& m_other, double m, Density d) {
  check_pair(z, m_other);
  const Eigen::Index n = z.cols();
  if (n == 0) return serial::grad_sums(z, m_other, m, d);
  const Eigen::Index nb = block_count(n);
  std::vector<GradSums> part(static_cast<std::size_t>(nb));
#pragma omp parallel for schedule(static) if (go_parallel(z.rows(), n))
  for (Eigen::Index b = 0; b < nb; ++b) {
    const Eigen::Index c0 = b * kBlock;
    accumulate_block(z, m_other, m, d, c0, std::min(kBlock, n - c0),
                     part[static_cast<std::size_t>(b)]);
  }
  GradSums out = std::move(part.front());
  for (std::size_t b = 1; b < part.size(); ++b) {
    out.quad += part[b].quad;
    out.fsum += part[b].fsum;
    out.resid_z += part[b].resid_z;
    out.score_z += part[b].score_z;
    out.curv += part[b].curv;
    out.power += part[b].power;
  }
  return out;
}

double density_sum(const SignalMatrix& s, Density d) {
  const Eigen::Index n = s.cols();
  const Eigen::Index nb = block_count(n);
  std::vector<double> part(static_cast<std::size_t>(nb), 0.0);
#pragma omp parallel for schedule(static) if (go_parallel(s.rows(), n))
  for (Eigen::Index b = 0; b < nb; ++b) {
    const Eigen::Index c0 = b * kBlock;
    const Eigen::Index len = std::min(kBlock, n - c0);
    double acc = 0.0;
    for (Eigen::Index a = 0; a < s.rows(); ++a)
      for (Eigen::Index t = c0; t < c0 + len; ++t) acc += f_eval(d, s(a, t)).value;
    part[static_cast<std::size_t>(b)] = acc;
  }
  double out = 0.0;
  for (double v : part) out += v;
  return out;
}

}  // namespace parallel

}  // namespace mvicad::kernels
