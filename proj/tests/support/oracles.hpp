#pragma once

// Independent reference computations used only by tests. Nothing here calls
// the code path it is used to check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// Phi(x) by the series 1/2 + phi(x) sum x^{2n+1}/(2n+1)!!, in long double. Accurate for |x| <= 8.
inline double normal_cdf_series(double xd) {
  const long double x = xd;
  long double term = x, sum = x;
  for (int n = 1; n < 400; ++n) {
    term *= x * x / (2.0L * n + 1.0L);
    sum += term;
    if (std::fabs(term) < 1e-30L * std::fabs(sum)) break;
  }
  const long double phi = std::exp(-x * x / 2.0L) / std::sqrt(2.0L * 3.14159265358979323846264338327950288L);
  return static_cast<double>(0.5L + phi * sum);
}

/// max over z in [-rho, rho] of objective(z) on a uniform grid with the given step, plus a local refinement.
inline double grid_maximize(const std::function<double(double)>& objective, double rho, double step) {
  double best = -std::numeric_limits<double>::infinity();
  double arg = 0.0;
  const long n = static_cast<long>(std::ceil(2.0 * rho / step));
  for (long i = 0; i <= n; ++i) {
    const double z = std::min(rho, -rho + static_cast<double>(i) * step);
    const double v = objective(z);
    if (v > best) {
      best = v;
      arg = z;
    }
  }
  // golden-section polish on the bracketing cell
  double lo = std::max(-rho, arg - step), hi = std::min(rho, arg + step);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
    if (objective(a) < objective(b)) lo = a; else hi = b;
  }
  return std::max(best, objective(0.5 * (lo + hi)));
}

/// Smallest |s| on a grid over [-s_max, s_max] with inside(s) true; infinity if none.
inline double line_search_min_abs(const std::function<bool(double)>& inside, double s_max, double step) {
  const long n = static_cast<long>(std::ceil(s_max / step));
  for (long i = 0; i <= n; ++i) {
    const double s = static_cast<double>(i) * step;
    if (inside(s) || inside(-s)) return s;
  }
  return std::numeric_limits<double>::infinity();
}

/**
 * Exact min ||c|| subject to A c <= beta. The minimum-norm point of a
 * polyhedron is the minimum-norm solution of some linearly independent
 * active subsystem, so the smallest feasible candidate is the answer.
 * Subsets are searched depth first; adding rows can only raise the
 * candidate norm, which lets a branch stop once it reaches the best
 * feasible norm or turns rank deficient. Infinity when infeasible.
 */
inline double min_norm_in_polyhedron(const Eigen::MatrixXd& a, const Eigen::VectorXd& beta, double tol = 1e-9) {
  const int n = static_cast<int>(a.rows());
  const int k = static_cast<int>(a.cols());
  double best = std::numeric_limits<double>::infinity();
  auto feasible = [&](const Eigen::VectorXd& c) { return ((a * c - beta).array() <= tol).all(); };
  if (feasible(Eigen::VectorXd::Zero(k))) return 0.0;
  std::vector<int> idx;
  std::function<void(int)> rec = [&](int start) {
    for (int i = start; i < n; ++i) {
      idx.push_back(i);
      const int size = static_cast<int>(idx.size());
      Eigen::MatrixXd as(size, k);
      Eigen::VectorXd bs(size);
      for (int r = 0; r < size; ++r) {
        as.row(r) = a.row(idx[r]);
        bs[r] = beta[idx[r]];
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(as * as.transpose());
      if (lu.rank() == size) {
        const Eigen::VectorXd c = as.transpose() * lu.solve(bs);
        const double norm = c.norm();
        if (norm < best) {
          if (feasible(c)) {
            best = norm;
          } else if (size < k) {
            rec(i + 1);
          }
        }
      }
      idx.pop_back();
    }
  };
  rec(0);
  return best;
}

}  // namespace oracle
