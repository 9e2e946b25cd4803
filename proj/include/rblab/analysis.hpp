// Copyright 2026 The rblab Authors
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

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>
#include <span>
#include <vector>

#include "rblab/error.hpp"
#include "rblab/noise.hpp"
#include "rblab/rbengine.hpp"

namespace rblab {

struct FitPoint {
  double m = 0;
  double p = 0;
  double weight = 1;
};

/// p_m = A alpha^m + B.
struct DecayFit {
  double A = 0, B = 0, alpha = 1;
  /// Covariance of (A, B, alpha).
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  /// Weighted residual norm.
  double residual = 0;
  bool converged = false;
  /// Constant data: alpha is not identifiable.
  bool degenerate = false;
  int iterations = 0;

  double sigma_alpha() const { return std::sqrt(std::max(cov(2, 2), 0.0)); }
  double predict(double m) const { return A * std::pow(alpha, m) + B; }
};

namespace detail {

struct FitState {
  std::array<double, 3> x{};  // A, B, alpha
  double cost = std::numeric_limits<double>::infinity();
};

inline double fit_cost(std::span<const FitPoint> pts, const std::array<double, 3>& x) {
  double c = 0;
  for (const auto& pt : pts) {
    const double r = x[0] * std::pow(x[2], pt.m) + x[1] - pt.p;
    c += pt.weight * r * r;
  }
  return c;
}

inline void normal_equations(std::span<const FitPoint> pts, const std::array<double, 3>& x,
                             Eigen::Matrix3d& jtj, Eigen::Vector3d& jtr) {
  jtj.setZero();
  jtr.setZero();
  for (const auto& pt : pts) {
    const double am = std::pow(x[2], pt.m);
    const double dalpha = pt.m == 0 ? 0.0 : x[0] * pt.m * std::pow(x[2], pt.m - 1);
    const Eigen::Vector3d j(am, 1.0, dalpha);
    const double r = x[0] * am + x[1] - pt.p;
    jtj += pt.weight * j * j.transpose();
    jtr += pt.weight * r * j;
  }
}

/// Levenberg-Marquardt with alpha clamped to [0, 1].
inline FitState refine(std::span<const FitPoint> pts, std::array<double, 3> x,
                       int max_iter, int& iterations, bool& converged) {
  x[2] = std::clamp(x[2], 0.0, 1.0);
  double cost = fit_cost(pts, x);
  double lambda = 1e-3;
  converged = false;
  Eigen::Matrix3d jtj;
  Eigen::Vector3d jtr;
  for (iterations = 0; iterations < max_iter; ++iterations) {
    normal_equations(pts, x, jtj, jtr);
    if (jtr.norm() < 1e-12 || cost == 0.0) {
      converged = true;
      break;
    }
    bool accepted = false;
    for (int tries = 0; tries < 30 && !accepted; ++tries) {
      Eigen::Matrix3d lhs = jtj;
      for (int i = 0; i < 3; ++i) lhs(i, i) += lambda * std::max(jtj(i, i), 1e-300);
      const Eigen::Vector3d step = lhs.ldlt().solve(-jtr);
      std::array<double, 3> trial{x[0] + step(0), x[1] + step(1),
                                  std::clamp(x[2] + step(2), 0.0, 1.0)};
      const double c = fit_cost(pts, trial);
      if (std::isfinite(c) && c <= cost) {
        const double change = std::abs(trial[0] - x[0]) + std::abs(trial[1] - x[1]) +
                              std::abs(trial[2] - x[2]);
        const double scale = std::abs(x[0]) + std::abs(x[1]) + std::abs(x[2]);
        x = trial;
        const bool stalled = change <= 1e-15 * std::max(scale, 1.0) || c == cost;
        cost = c;
        lambda = std::max(lambda / 10, 1e-12);
        accepted = true;
        if (stalled) {
          converged = true;
          return {x, cost};
        }
      } else {
        lambda *= 10;
      }
    }
    if (!accepted) {
      // No descent direction left at machine precision.
      converged = true;
      break;
    }
  }
  return {x, cost};
}

inline std::array<double, 3> initial_guess(std::span<const FitPoint> sorted, double b0) {
  // Log-linear regression of log(p - B0) on m, clipped positive.
  const double floor = 1e-12;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& pt : sorted) {
    const double y = std::log(std::max(pt.p - b0, floor));
    sx += pt.m;
    sy += y;
    sxx += pt.m * pt.m;
    sxy += pt.m * y;
    ++n;
  }
  const double denom = n * sxx - sx * sx;
  double slope = denom != 0 ? (n * sxy - sx * sy) / denom : 0.0;
  double alpha0 = std::clamp(std::exp(slope), 1e-6, 1.0 - 1e-9);
  const FitPoint& first = sorted.front();
  const double a0 = (first.p - b0) / std::pow(alpha0, first.m);
  return {a0, b0, alpha0};
}

}  // namespace detail

/// Weighted least-squares fit of A alpha^m + B; needs at least four
/// distinct lengths.
inline DecayFit fit_decay(std::span<const FitPoint> points, int max_iter = 200) {
  std::vector<FitPoint> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](const FitPoint& a, const FitPoint& b) { return a.m < b.m; });
  std::set<double> distinct;
  for (const auto& pt : pts) {
    if (!(pt.weight > 0) || !std::isfinite(pt.p) || !std::isfinite(pt.m)) {
      throw ConfigError("fit_decay: points need finite values and positive weights");
    }
    distinct.insert(pt.m);
  }
  if (distinct.size() < 4) throw ConfigError("fit_decay: need at least 4 distinct lengths");

  DecayFit fit;
  double lo = pts.front().p, hi = pts.front().p, mean = 0;
  for (const auto& pt : pts) {
    lo = std::min(lo, pt.p);
    hi = std::max(hi, pt.p);
    mean += pt.p;
  }
  mean /= pts.size();
  if (hi - lo <= 1e-12 * std::max(1.0, std::abs(hi))) {
    fit.B = mean;
    fit.A = 0;
    fit.alpha = 1;
    fit.degenerate = true;
    fit.converged = true;
    return fit;
  }

  // Largest-m tercile.
  const std::size_t tail = std::max<std::size_t>(1, (pts.size() + 2) / 3);
  double b0 = 0;
  for (std::size_t i = pts.size() - tail; i < pts.size(); ++i) b0 += pts[i].p;
  b0 /= tail;

  std::vector<double> starts{b0, 0.0, lo - 0.5 * (hi - lo), 1.0 / (1 << 2), 0.5};
  detail::FitState best;
  bool best_converged = false;
  int best_iter = 0;
  for (double b : starts) {
    int iters = 0;
    bool conv = false;
    const detail::FitState s =
        detail::refine(pts, detail::initial_guess(pts, b), max_iter, iters, conv);
    if (s.cost < best.cost * (1 - 1e-12) || (!best_converged && conv && s.cost <= best.cost)) {
      best = s;
      best_converged = conv;
      best_iter = iters;
    }
  }
  fit.A = best.x[0];
  fit.B = best.x[1];
  fit.alpha = best.x[2];
  fit.converged = best_converged;
  fit.iterations = best_iter;
  fit.residual = std::sqrt(best.cost);

  Eigen::Matrix3d jtj;
  Eigen::Vector3d jtr;
  detail::normal_equations(pts, best.x, jtj, jtr);
  const double dof = static_cast<double>(pts.size()) - 3.0;
  const double s2 = dof > 0 ? best.cost / dof : 0.0;
  Eigen::CompleteOrthogonalDecomposition<Eigen::Matrix3d> cod(jtj);
  fit.cov = s2 * cod.pseudoInverse();
  return fit;
}

/// Per-length means with inverse binomial-variance weights (uniform at
/// shots = 0).
inline std::vector<FitPoint> fit_points(const RbDataset& data) {
  std::vector<FitPoint> out;
  for (const auto& row : data.lengths) {
    double w = 1.0;
    if (data.shots > 0) {
      const double n = static_cast<double>(data.shots) * row.survival.size();
      const double var = std::max(row.mean * (1 - row.mean), 1.0 / data.shots) / n;
      w = 1.0 / var;
    }
    out.push_back({static_cast<double>(row.m), row.mean, w});
  }
  return out;
}

/// r = 1 - F = (1 - alpha)(D - 1) / D.
inline double error_per_gate(const DecayFit& fit, int dim) {
  return (1.0 - fit.alpha) * (dim - 1.0) / dim;
}

inline double error_per_gate_sigma(const DecayFit& fit, int dim) {
  return fit.sigma_alpha() * (dim - 1.0) / dim;
}

struct InterleavedReport {
  double fidelity = 1;
  double uncertainty = 0;
  bool unphysical = false;
};

/// Interleaved gate fidelity with first-order propagation of both alpha
/// variances.
inline InterleavedReport interleaved_report(const DecayFit& ref, const DecayFit& inter, int dim) {
  const InterleavedFidelity f = interleaved_fidelity(ref.alpha, inter.alpha, dim);
  const double c = (dim - 1.0) / dim;
  const double d_int = c / ref.alpha;
  const double d_ref = -c * inter.alpha / (ref.alpha * ref.alpha);
  const double var = d_int * d_int * std::max(inter.cov(2, 2), 0.0) +
                     d_ref * d_ref * std::max(ref.cov(2, 2), 0.0);
  return {f.fidelity, std::sqrt(var), f.unphysical};
}

}  // namespace rblab
