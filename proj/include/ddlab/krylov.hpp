#pragma once

#include "ddlab/linalg.hpp"

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>

namespace ddlab {

using LinearOperator = std::function<Vec(std::span<const double>)>;

class IndefiniteDetected : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct PcgStep {
  double residual_norm = 0.0;
  double precond_residual_dot = 0.0; ///< r^T M r
  double energy_error = -1.0;        ///< ||u_k - u||_A, negative when no exact solution given
};

struct PcgTrace {
  std::vector<PcgStep> steps; ///< steps[0] is the zero initial guess
  Vec solution;
  int iterations = 0;
  bool converged = false;
};

/// Called after every iteration with the iterate and its residual; returns
/// true to stop.
using ConvergenceTest = std::function<bool(std::span<const double> x, std::span<const double> r)>;

struct PcgOptions {
  double tol = 1e-12; ///< on ||r||_2 / ||b||_2
  int maxit = 1000;
  /// Replaces the residual test when set.
  ConvergenceTest converged;
};

/// Preconditioned conjugate gradients from a zero initial guess. Throws
/// IndefiniteDetected when p^T A p <= 0 or r^T M r < 0.
PcgTrace pcg(const LinearOperator& apply_a, const LinearOperator& apply_m,
             std::span<const double> b, const PcgOptions& options,
             std::optional<std::span<const double>> exact = std::nullopt);

/// 2 ((sqrt(kappa) - 1) / (sqrt(kappa) + 1))^k
double kappa_bound_factor(double kappa, int k);

/// Largest ratio ||e_k||_A / (kappa_bound_factor(kappa, k) ||e_0||_A + floor)
/// over the trace. At most 1 when the bound holds; 0 if the trace has no error
/// data. floor is the absolute accuracy of the reference solution in the A-norm.
double kappa_bound_worst_ratio(const PcgTrace& trace, double kappa, double floor = 0.0);

} // namespace ddlab
