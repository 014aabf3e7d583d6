#include "ddlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ddlab {

namespace {

constexpr int kResampleBudget = 100;

double lt_residual(const Matrix& l, const Matrix& t) {
  return max_abs(l * t - Matrix::identity(l.rows()));
}

Vec strip_ones(const Vec& in, double band) {
  Vec out;
  for (double v : in)
    if (std::abs(v - 1.0) > band) out.push_back(v);
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t count_ones(const Vec& in, double band) {
  return static_cast<std::size_t>(
      std::count_if(in.begin(), in.end(), [&](double v) { return std::abs(v - 1.0) <= band; }));
}

Rng instance_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

std::size_t uniform_size(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

double draw_condition(Rng& rng, std::size_t index, double cond_max) {
  if (index % 4 == 0) return cond_max;
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  return std::pow(cond_max, u);
}

} // namespace

Matrix random_gaussian(std::size_t rows, std::size_t cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) g(i, j) = normal(rng);
  return g;
}

Matrix random_orthonormal(std::size_t rows, std::size_t cols, Rng& rng) {
  if (cols > rows) throw std::invalid_argument("random_orthonormal: cols > rows");
  return householder_qr(random_gaussian(rows, cols, rng)).q;
}

SymMatrix random_spd(std::size_t n, double cond_target, Rng& rng) {
  if (n == 0) throw std::invalid_argument("random_spd: n must be positive");
  if (!(cond_target >= 1.0)) throw std::invalid_argument("random_spd: cond_target must be >= 1");
  const Matrix q = random_orthonormal(n, n, rng);
  Matrix qd = q;
  for (std::size_t j = 0; j < n; ++j) {
    const double d = n == 1 ? 1.0 : std::pow(cond_target, static_cast<double>(j) / (n - 1));
    for (std::size_t i = 0; i < n; ++i) qd(i, j) *= d;
  }
  return SymMatrix::symmetrize(qd * q.transpose());
}

LtPair make_LT(std::size_t n, std::size_t k, Rng& rng) {
  if (k == 0 || k > n) throw std::invalid_argument("make_LT: need 1 <= k <= n");
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int attempt = 0; attempt < kResampleBudget; ++attempt) {
    LtPair out;
    out.t = random_orthonormal(n, k, rng);
    const Matrix l0 = out.t.transpose() + scale * random_gaussian(k, n, rng);
    try {
      out.l = solve_general(l0 * out.t, l0);
    } catch (const SingularMatrix&) {
      continue;
    }
    if (lt_residual(out.l, out.t) <= 1e-12) return out;
  }
  throw std::runtime_error("make_LT: resample budget exhausted");
}

ComplementaryPair make_complementary(std::size_t n, std::size_t k, Rng& rng) {
  if (k == 0 || k >= n) throw std::invalid_argument("make_complementary: need 1 <= k < n");
  for (int attempt = 0; attempt < kResampleBudget; ++attempt) {
    LtPair p1 = make_LT(n, k, rng);
    const Matrix q = Matrix::identity(n) - p1.t * p1.l;
    Matrix t2 = range_basis(q);
    if (t2.cols() != n - k) continue;
    ComplementaryPair out;
    out.l2 = t2.transpose() * q;
    out.t2 = std::move(t2);
    out.l1 = std::move(p1.l);
    out.t1 = std::move(p1.t);
    const double residual =
        max_abs(out.t1 * out.l1 + out.t2 * out.l2 - Matrix::identity(n));
    if (residual <= 1e-11 && lt_residual(out.l2, out.t2) <= 1e-11) return out;
  }
  throw std::runtime_error("make_complementary: resample budget exhausted");
}

namespace {

/// Upper-triangular factor of the thin QR of H^{-1} L^T (k x k).
Matrix lower_side_factor(const CholFactor& h, const Matrix& l) {
  Matrix x(l.cols(), l.rows());
  for (std::size_t i = 0; i < l.rows(); ++i) x.set_column(i, forward_solve(h, l.row(i)));
  return householder_qr(x).r;
}

bool invertible_triangular(const Matrix& r) {
  for (std::size_t i = 0; i < r.rows(); ++i)
    if (!(r(i, i) > 0.0)) return false;
  return true;
}

} // namespace

Vec lemma_spectrum(const SymMatrix& a, const Matrix& l, const Matrix& t) {
  // A = H H^T, H^{-1} L^T = Qx Rx, H^T T = Qy Ry. The operator is similar to
  // W^T W with W = Ry Rx^T, so its eigenvalues are the squared singular values
  // of W. Large ones come from W^T W, small ones from (W^{-1})^T W^{-1}, each
  // with an error of about eps times the largest eigenvalue on its side.
  const CholFactor h = cholesky(a);
  const Matrix rx = lower_side_factor(h, l);
  const Matrix ry = householder_qr(h.lower().transpose() * t).r;
  const Matrix w = ry * rx.transpose();
  Vec forward = sym_eig(gram(w)).values;
  if (!invertible_triangular(rx) || !invertible_triangular(ry)) return forward;

  const std::size_t k = w.rows();
  const CholFactor rxt(rx.transpose());
  const CholFactor ryt(ry.transpose());
  Matrix winv(k, k);
  for (std::size_t j = 0; j < k; ++j) {
    Vec e(k, 0.0);
    e[j] = 1.0;
    winv.set_column(j, forward_solve(rxt, backward_solve(ryt, e)));
  }
  const Vec inverse = sym_eig(gram(winv)).values; // ascending 1/lambda

  const double split = std::sqrt(forward.front() > 0.0 ? forward.front() * forward.back() : 0.0);
  Vec out(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double from_inverse = 1.0 / inverse[k - 1 - i];
    out[i] = from_inverse < split ? from_inverse : forward[i];
  }
  std::sort(out.begin(), out.end());
  return out;
}

Lemma1Verdict lemma1_check(const AbstractInstance& inst, const LemmaTolerances& tol) {
  Lemma1Verdict v;
  v.lt_residual = inst.l.rows() ? lt_residual(inst.l, inst.t) : 0.0;
  v.hypothesis_ok = v.lt_residual <= tol.lt;
  if (inst.l.rows() == 0) {
    v.lower_ok = v.upper_ok = true;
    return v;
  }
  const Vec eig = lemma_spectrum(inst.a, inst.l, inst.t);
  v.lambda_min = eig.front();
  v.lambda_max = eig.back();
  v.bound = energy_op_norm_sq(inst.t * inst.l, inst.a);
  v.lower_ok = v.lambda_min >= 1.0 - tol.bound;
  v.upper_ok = v.lambda_max <= v.bound * (1.0 + tol.bound);
  return v;
}

Lemma2Verdict lemma2_check(const ComplementaryPair& pair, const SymMatrix& a,
                           const LemmaTolerances& tol) {
  Lemma2Verdict v;
  const std::size_t n = a.size();
  double lt = 0.0;
  if (pair.l1.rows()) lt = std::max(lt, lt_residual(pair.l1, pair.t1));
  if (pair.l2.rows()) lt = std::max(lt, lt_residual(pair.l2, pair.t2));
  Matrix sum = Matrix::identity(n);
  if (pair.l1.rows()) sum = sum - pair.t1 * pair.l1;
  if (pair.l2.rows()) sum = sum - pair.t2 * pair.l2;
  const double comp = max_abs(sum);
  v.hypothesis_residual = std::max(lt, comp);
  v.hypothesis_ok = lt <= tol.complementary && comp <= tol.complementary;

  // (T2^T A T2)(L2 A^{-1} L2^T) is the transposed product of the lemma_spectrum
  // operator for (L2, T2), so it has the same eigenvalues
  if (pair.l1.rows()) v.spectrum_1 = lemma_spectrum(a, pair.l1, pair.t1);
  if (pair.l2.rows()) v.spectrum_2 = lemma_spectrum(a, pair.l2, pair.t2);

  v.mult_one_1 = count_ones(v.spectrum_1, tol.one_band);
  v.mult_one_2 = count_ones(v.spectrum_2, tol.one_band);
  const Vec s1 = strip_ones(v.spectrum_1, tol.one_band);
  const Vec s2 = strip_ones(v.spectrum_2, tol.one_band);
  if (s1.size() != s2.size()) {
    v.max_rel_diff = INFINITY;
    return v;
  }
  for (std::size_t i = 0; i < s1.size(); ++i) {
    const double scale = std::max(std::abs(s1[i]), std::abs(s2[i]));
    v.max_rel_diff = std::max(v.max_rel_diff, std::abs(s1[i] - s2[i]) / scale);
  }
  v.spectra_match = v.max_rel_diff <= tol.spectra_rel;
  return v;
}

HarnessSummary run_harness(const HarnessOptions& options) {
  if (options.instances > 0 && options.n_max < 2)
    throw std::invalid_argument("run_harness: n_max must be at least 2");
  HarnessSummary s;
  s.max_saturation = 0.0;
  s.worst_lower_margin = INFINITY;
  s.worst_upper_margin = -INFINITY;

  for (std::size_t i = 0; i < options.instances; ++i) {
    Rng rng = instance_rng(options.seed, 1, i);
    const std::size_t n = uniform_size(rng, 2, options.n_max);
    const std::size_t k = uniform_size(rng, 1, n);
    const double cond = draw_condition(rng, i, options.cond_max);
    AbstractInstance inst;
    inst.seed = options.seed;
    inst.a = random_spd(n, cond, rng);
    LtPair lt = make_LT(n, k, rng);
    inst.l = std::move(lt.l);
    inst.t = std::move(lt.t);
    if (options.inject_fault)
      for (double& x : inst.l.row(0)) x *= 0.5;

    const Lemma1Verdict v = lemma1_check(inst, options.tolerances);
    ++s.lemma1_run;
    if (v.pass()) ++s.lemma1_pass;
    s.worst_lower_margin = std::min(s.worst_lower_margin, v.lambda_min - 1.0);
    s.worst_upper_margin = std::max(s.worst_upper_margin, v.saturation() - 1.0);
    s.max_saturation = std::max(s.max_saturation, v.saturation());
    s.worst_hypothesis = std::max(s.worst_hypothesis, v.lt_residual);
  }

  for (std::size_t i = 0; i < options.instances; ++i) {
    Rng rng = instance_rng(options.seed, 2, i);
    const std::size_t n = uniform_size(rng, 2, options.n_max);
    const std::size_t k = uniform_size(rng, 1, n - 1);
    const double cond = draw_condition(rng, i, options.cond_max);
    const SymMatrix a = random_spd(n, cond, rng);
    ComplementaryPair pair = make_complementary(n, k, rng);
    if (options.inject_fault)
      for (double& x : pair.l1.row(0)) x *= 0.5;

    const Lemma2Verdict v = lemma2_check(pair, a, options.tolerances);
    ++s.lemma2_run;
    if (v.pass()) ++s.lemma2_pass;
    s.worst_hypothesis = std::max(s.worst_hypothesis, v.hypothesis_residual);
    s.worst_spectra_rel = std::max(s.worst_spectra_rel, v.max_rel_diff);
  }

  if (s.lemma1_run == 0) s.worst_lower_margin = s.worst_upper_margin = 0.0;
  return s;
}

ConcreteLemmaCheck concrete_lemma_check(const OperatorSet& ops, const LemmaTolerances& tol) {
  ConcreteLemmaCheck out;
  AbstractInstance bddc{ops.s_tilde, ops.e, ops.rh, 0};
  out.bddc = lemma1_check(bddc, tol);
  const Matrix bdt = ops.bd.transpose();
  AbstractInstance feti{ops.s_tilde, ops.b, bdt, 0};
  out.feti_dp = lemma1_check(feti, tol);
  ComplementaryPair pair{ops.e, ops.rh, ops.b, bdt};
  out.pair = lemma2_check(pair, ops.s_tilde, tol);
  return out;
}

} // namespace ddlab
