#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gpuport/error.hpp"
#include "gpuport/sparse/matrix.hpp"

namespace gpuport::kernels {

using sparse::DenseVector;

struct CgState {
  DenseVector x;
  DenseVector r;
  DenseVector p;
  DenseVector q;
  double rho = 0.0;
  std::uint32_t iteration = 0;
  std::vector<double> residual_history;  // ||r||_2 after each iteration
};

struct CgResult {
  DenseVector x;
  std::vector<double> residual_history;
  std::uint32_t iterations = 0;
  bool converged = false;
};

struct CgOptions {
  double tolerance = 1e-8;  // on ||r||_2 / ||b||_2
  std::uint32_t max_iterations = 1000;
  std::uint32_t residual_replacement = 50;  // recompute r = b - Ax this often
};

namespace detail {

inline double dot(const DenseVector& a, const DenseVector& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

inline double norm2(const DenseVector& a) { return std::sqrt(dot(a, a)); }

}  // namespace detail

/// Unpreconditioned conjugate gradient from x0 = 0. `spmv` computes A*v and
/// is the only access to the matrix; vector updates are sequential so every
/// backend sees identical iterates for identical products.
inline CgResult cg_solve(const std::function<DenseVector(const DenseVector&)>& spmv,
                         std::size_t n, const DenseVector& b, const CgOptions& options,
                         const std::function<void(const CgState&)>& observer = {}) {
  if (b.size() != n) {
    throw DimensionMismatch("right-hand side has length " + std::to_string(b.size()) +
                            " for a system of size " + std::to_string(n));
  }
  if (!(options.tolerance > 0.0)) throw InvalidConfig("cg tolerance must be positive");

  CgState s;
  s.x.assign(n, 0.0);
  s.r = b;
  s.p = s.r;
  s.rho = detail::dot(s.r, s.r);
  const double b_norm = detail::norm2(b);

  CgResult result;
  if (b_norm == 0.0) {
    result.x = s.x;
    result.converged = true;
    return result;
  }

  while (s.iteration < options.max_iterations) {
    s.q = spmv(s.p);
    const double pq = detail::dot(s.p, s.q);
    if (!(pq > 0.0)) {
      throw BreakdownError("p.Ap = " + std::to_string(pq) + " at iteration " +
                           std::to_string(s.iteration) + "; matrix is not SPD");
    }
    const double alpha = s.rho / pq;
    for (std::size_t i = 0; i < n; ++i) {
      s.x[i] += alpha * s.p[i];
      s.r[i] -= alpha * s.q[i];
    }
    ++s.iteration;
    if (options.residual_replacement > 0 && s.iteration % options.residual_replacement == 0) {
      const DenseVector ax = spmv(s.x);
      for (std::size_t i = 0; i < n; ++i) s.r[i] = b[i] - ax[i];
    }
    const double rho_next = detail::dot(s.r, s.r);
    const double r_norm = std::sqrt(rho_next);
    s.residual_history.push_back(r_norm);
    if (observer) observer(s);
    if (r_norm / b_norm <= options.tolerance) {
      result.converged = true;
      break;
    }
    const double beta = rho_next / s.rho;
    s.rho = rho_next;
    for (std::size_t i = 0; i < n; ++i) s.p[i] = s.r[i] + beta * s.p[i];
  }
  result.x = std::move(s.x);
  result.residual_history = std::move(s.residual_history);
  result.iterations = s.iteration;
  return result;
}

}  // namespace gpuport::kernels
