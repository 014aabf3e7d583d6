#include "ddlab/krylov.hpp"

#include <algorithm>
#include <cmath>

namespace ddlab {

namespace {

double energy_norm(const LinearOperator& apply_a, std::span<const double> x) {
  return std::sqrt(std::max(0.0, dot(x, apply_a(x))));
}

} // namespace

PcgTrace pcg(const LinearOperator& apply_a, const LinearOperator& apply_m,
             std::span<const double> b, const PcgOptions& options,
             std::optional<std::span<const double>> exact) {
  const std::size_t n = b.size();
  PcgTrace trace;
  trace.solution.assign(n, 0.0);

  Vec r(b.begin(), b.end()); // b - A*0
  const double bnorm = norm2(b);
  auto record = [&](double rz) {
    PcgStep step;
    step.residual_norm = norm2(r);
    step.precond_residual_dot = rz;
    if (exact) step.energy_error = energy_norm(apply_a, subtract(trace.solution, *exact));
    trace.steps.push_back(step);
  };

  Vec z = apply_m(r);
  double rz = dot(r, z);
  if (rz < 0.0) throw IndefiniteDetected("pcg: preconditioner is not positive semidefinite");
  record(rz);
  if (bnorm == 0.0 || n == 0) {
    trace.converged = true;
    return trace;
  }

  Vec p = z;
  for (int k = 1; k <= options.maxit; ++k) {
    const Vec ap = apply_a(p);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) throw IndefiniteDetected("pcg: operator is not positive definite");
    const double alpha = rz / pap;
    axpy(alpha, p, trace.solution);
    axpy(-alpha, ap, r);
    z = apply_m(r);
    const double rz_new = dot(r, z);
    if (rz_new < 0.0) throw IndefiniteDetected("pcg: preconditioner is not positive semidefinite");
    trace.iterations = k;
    record(rz_new);
    const bool done = options.converged ? options.converged(trace.solution, r)
                                        : trace.steps.back().residual_norm <= options.tol * bnorm;
    if (done) {
      trace.converged = true;
      break;
    }
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return trace;
}

double kappa_bound_factor(double kappa, int k) {
  const double s = std::sqrt(kappa);
  return 2.0 * std::pow((s - 1.0) / (s + 1.0), k);
}

double kappa_bound_worst_ratio(const PcgTrace& trace, double kappa, double floor) {
  if (trace.steps.empty() || trace.steps.front().energy_error < 0.0) return 0.0;
  const double e0 = trace.steps.front().energy_error;
  if (e0 == 0.0) return 0.0;
  double worst = 0.0;
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const double bound = kappa_bound_factor(kappa, static_cast<int>(k)) * e0 + floor;
    const double err = trace.steps[k].energy_error;
    if (bound == 0.0) {
      if (err > 0.0) return INFINITY;
      continue;
    }
    worst = std::max(worst, err / bound);
  }
  return worst;
}

} // namespace ddlab
