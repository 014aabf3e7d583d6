#include "ddlab/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace ddlab {

using nlohmann::ordered_json;

GridSpec RunConfig::grid() const {
  GridSpec g;
  g.nx = nx;
  g.ny = ny;
  g.m = m;
  if (rho_ratio != 1.0) g.rho = checkerboard(nx, ny, rho_ratio);
  return g;
}

Instance build_instance(const RunConfig& config) {
  Instance inst;
  inst.config = config;
  const GridSpec spec = config.grid();
  spec.validate();
  inst.decomp = build_decomposition(spec);
  inst.layout = build_layout(inst.decomp);
  inst.coarse = select_coarse(inst.layout, inst.decomp, config.coarse);
  inst.sub = build_subassembly(inst.layout, inst.coarse);
  const std::vector<SchurLocal> locals = all_schur_locals(inst.decomp);
  inst.ops = build_operator_set(block_S(locals), locals, inst.layout, inst.sub, config.scaling);
  check_wtilde_spd(inst.ops.s_tilde, inst.sub, inst.layout, inst.coarse);
  return inst;
}

Vec load_vector(const RunConfig& config, std::size_t n) {
  if (config.seed == 0) return Vec(n, 1.0);
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec f(n);
  for (double& x : f) x = normal(rng);
  return f;
}

namespace {

double relative_error(const Vec& x, const Vec& ref) {
  const double denom = norm2(ref);
  const double diff = norm2(subtract(x, ref));
  return denom > 0.0 ? diff / denom : diff;
}

} // namespace

bool SolverCheck::solution_ok() const {
  return rel_error_bddc <= tolerances.solution && rel_error_feti_dp <= tolerances.solution &&
         bddc.converged && feti_dp.converged;
}

bool SolverCheck::kappa_ok() const {
  return kappa_ratio_bddc <= 1.0 + tolerances.kappa_slack &&
         kappa_ratio_feti_dp <= 1.0 + tolerances.kappa_slack;
}

bool SolverCheck::iterations_ok() const { return iteration_gap <= tolerances.iteration_gap; }

SolverCheck run_solvers(const Instance& inst, const BddcPreconditioner& bddc,
                        const FetiDpSystem& feti, const SpectralReport& spectra) {
  const OperatorSet& ops = inst.ops;
  SolverCheck out;
  const std::size_t nh = ops.dim_w_hat();
  out.f = load_vector(inst.config, nh);
  if (nh > 0) out.u_direct = chol_solve(cholesky(ops.s_hat), out.f);

  const LinearOperator apply_shat = [&](std::span<const double> x) { return multiply(ops.s_hat, x); };
  const LinearOperator apply_bddc = [&](std::span<const double> r) { return bddc.apply(r); };
  out.bddc = pcg(apply_shat, apply_bddc, out.f, inst.config.pcg, std::span<const double>(out.u_direct));
  out.u_bddc = out.bddc.solution;

  const Vec g = feti.rhs(out.f);
  const Vec lambda_exact = feti.solve_dual(out.f);
  const LinearOperator apply_f = [&](std::span<const double> l) { return feti.apply_F(l); };
  const LinearOperator apply_m = [&](std::span<const double> mu) { return feti.apply_M(mu); };
  // stop on the residual of the recovered primal solution, the same quantity
  // BDDC-PCG is stopped on
  PcgOptions dual_options = inst.config.pcg;
  const double fnorm = norm2(out.f);
  dual_options.converged = [&](std::span<const double> lambda, std::span<const double>) {
    const Vec u = feti.primal_recover(lambda, out.f);
    return norm2(subtract(out.f, multiply(ops.s_hat, u))) <= inst.config.pcg.tol * fnorm;
  };
  out.feti_dp = pcg(apply_f, apply_m, g, dual_options, std::span<const double>(lambda_exact));
  out.u_feti_dp = feti.primal_recover(out.feti_dp.solution, out.f);

  out.rel_error_bddc = relative_error(out.u_bddc, out.u_direct);
  out.rel_error_feti_dp = relative_error(out.u_feti_dp, out.u_direct);

  auto ratio = [&](const PcgTrace& trace, const std::optional<double>& kappa) {
    if (!kappa || trace.steps.empty()) return 0.0;
    const double e0 = trace.steps.front().energy_error;
    return kappa_bound_worst_ratio(trace, *kappa, out.tolerances.kappa_floor * e0);
  };
  out.kappa_ratio_bddc = ratio(out.bddc, spectra.kappa_bddc);
  out.kappa_ratio_feti_dp = ratio(out.feti_dp, spectra.kappa_feti);
  out.iteration_gap = std::abs(out.bddc.iterations - out.feti_dp.iterations);
  return out;
}

bool Evaluation::pass() const {
  if (!axioms.pass) return false;
  if (spectra && !spectra->flags.all()) return false;
  if (solvers && !solvers->pass()) return false;
  if (lemmas && !(lemmas->bddc.pass() && lemmas->feti_dp.pass() && lemmas->pair.pass())) return false;
  if (identity_when_assembled && !*identity_when_assembled) return false;
  return true;
}

Evaluation evaluate(const Instance& inst, Stage stage) {
  Evaluation eval;
  eval.axioms = axiom_check(inst.ops);
  if (stage == Stage::axioms) return eval;

  const BddcPreconditioner bddc(inst.ops);
  const FetiDpSystem feti(inst.ops);
  eval.spectra = build_spectral_report(inst.ops, bddc, feti);
  if (inst.fully_assembled()) {
    eval.identity_when_assembled = std::all_of(eval.spectra->eig_bddc.begin(), eval.spectra->eig_bddc.end(),
                                               [](double l) { return std::abs(l - 1.0) <= 1e-12; });
  }
  if (stage == Stage::all) eval.lemmas = concrete_lemma_check(inst.ops);
  if (stage == Stage::spectra) return eval;

  eval.solvers = run_solvers(inst, bddc, feti, *eval.spectra);
  return eval;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

const char* coarse_name(CoarseKind k) { return k == CoarseKind::corners ? "corners" : "corners-edges"; }
const char* scaling_name(ScalingKind k) {
  return k == ScalingKind::multiplicity ? "multiplicity" : "stiffness";
}

ordered_json number_or_null(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

ordered_json optional_number(const std::optional<double>& x) {
  if (!x) return nullptr;
  return number_or_null(*x);
}

ordered_json eigen_summary(const Vec& eig, double one_band) {
  ordered_json j;
  j["count"] = eig.size();
  j["min"] = eig.empty() ? ordered_json(nullptr) : number_or_null(eig.front());
  j["max"] = eig.empty() ? ordered_json(nullptr) : number_or_null(eig.back());
  j["multiplicity_of_one"] = multiplicity_of_one(eig, one_band);
  return j;
}

ordered_json trace_json(const PcgTrace& trace, double rel_error, double kappa_ratio) {
  ordered_json j;
  j["iterations"] = trace.iterations;
  j["converged"] = trace.converged;
  j["final_residual"] = trace.steps.empty() ? 0.0 : trace.steps.back().residual_norm;
  j["relative_error"] = number_or_null(rel_error);
  j["kappa_bound_ratio"] = number_or_null(kappa_ratio);
  return j;
}

ordered_json lemma1_json(const Lemma1Verdict& v) {
  ordered_json j;
  j["lt_residual"] = v.lt_residual;
  j["lambda_min"] = v.lambda_min;
  j["lambda_max"] = v.lambda_max;
  j["bound"] = v.bound;
  j["pass"] = v.pass();
  return j;
}

} // namespace

ordered_json config_json(const RunConfig& c) {
  ordered_json j;
  j["nx"] = c.nx;
  j["ny"] = c.ny;
  j["m"] = c.m;
  j["coarse"] = coarse_name(c.coarse);
  j["scaling"] = scaling_name(c.scaling);
  j["rho"] = c.rho_ratio == 1.0 ? ordered_json("uniform") : ordered_json({{"checkerboard", c.rho_ratio}});
  j["tol"] = c.pcg.tol;
  j["maxit"] = c.pcg.maxit;
  j["seed"] = c.seed;
  j["load"] = c.seed == 0 ? "unit" : "gaussian";
  return j;
}

ordered_json evaluation_json(const Instance& inst, const Evaluation& eval) {
  const OperatorSet& ops = inst.ops;
  ordered_json j;
  j["schema"] = 1;
  j["config"] = config_json(inst.config);
  j["dimensions"] = {{"substructures", inst.decomp.substructures.size()},
                     {"w", ops.dim_w()},
                     {"w_tilde", ops.dim_w_tilde()},
                     {"w_hat", ops.dim_w_hat()},
                     {"lambda", ops.dim_lambda()},
                     {"corners", inst.coarse.corners.size()},
                     {"averaged_edges", inst.coarse.averaged_edge_count()}};
  j["degenerate"] = {{"empty_interface", inst.empty_interface()},
                     {"w_tilde_equals_w_hat", inst.fully_assembled()},
                     {"lambda_trivial", ops.dim_lambda() == 0}};

  ordered_json ax;
  ax["tolerance"] = eval.axioms.tolerance;
  for (const auto& r : eval.axioms.residuals) ax[r.name] = r.residual;
  ax["pass"] = eval.axioms.pass;
  j["axioms"] = ax;

  if (eval.spectra) {
    const SpectralReport& s = *eval.spectra;
    j["omega"] = {{"bddc", s.omega.bddc}, {"feti_dp", optional_number(s.omega.feti_dp)}};
    j["kappa"] = {{"bddc", optional_number(s.kappa_bddc)}, {"feti_dp", optional_number(s.kappa_feti)}};
    j["eigenvalues"] = {{"bddc", eigen_summary(s.eig_bddc, s.tolerances.one_band)},
                        {"feti_dp", eigen_summary(s.eig_feti, s.tolerances.one_band)},
                        {"max_relative_difference", number_or_null(s.comparison.max_rel_diff)}};
    ordered_json th;
    th["pfetidp_equals_bddc"] = s.flags.thm1_operator_equal;
    th["pfetidp_bddc_max_difference"] = s.pfetidp_bddc_max_diff;
    th["lower_bound"] = s.flags.thm2_lower;
    th["upper_bound_bddc"] = s.flags.thm2_upper_bddc;
    th["upper_bound_feti_dp"] = s.flags.thm2_upper_feti;
    th["omega_equal"] = s.flags.thm2_omega_equal;
    th["spectra_match"] = s.flags.thm3_spectra_match;
    th["multiplicity_order"] = s.flags.thm3_mult_order;
    if (eval.identity_when_assembled) th["identity_when_assembled"] = *eval.identity_when_assembled;
    j["theorems"] = th;
  }
  if (eval.lemmas) {
    j["lemmas"] = {{"bddc", lemma1_json(eval.lemmas->bddc)},
                   {"feti_dp", lemma1_json(eval.lemmas->feti_dp)},
                   {"complementary", {{"hypothesis_residual", eval.lemmas->pair.hypothesis_residual},
                                      {"max_relative_difference", number_or_null(eval.lemmas->pair.max_rel_diff)},
                                      {"pass", eval.lemmas->pair.pass()}}}};
  }
  if (eval.solvers) {
    const SolverCheck& p = *eval.solvers;
    j["pcg"] = {{"bddc", trace_json(p.bddc, p.rel_error_bddc, p.kappa_ratio_bddc)},
                {"feti_dp", trace_json(p.feti_dp, p.rel_error_feti_dp, p.kappa_ratio_feti_dp)},
                {"iteration_gap", p.iteration_gap},
                {"pass", p.pass()}};
  }
  j["pass"] = eval.pass();
  return j;
}

ordered_json harness_json(const HarnessOptions& o, const HarnessSummary& s) {
  ordered_json j;
  j["schema"] = 1;
  j["config"] = {{"instances", o.instances}, {"n_max", o.n_max}, {"cond_max", o.cond_max},
                 {"seed", o.seed}, {"fault", o.inject_fault}};
  j["lemma1"] = {{"run", s.lemma1_run}, {"pass", s.lemma1_pass},
                 {"worst_lower_margin", s.worst_lower_margin},
                 {"worst_upper_margin", s.worst_upper_margin},
                 {"max_saturation", s.max_saturation}};
  j["lemma2"] = {{"run", s.lemma2_run}, {"pass", s.lemma2_pass},
                 {"worst_spectra_relative_difference", number_or_null(s.worst_spectra_rel)}};
  j["worst_hypothesis_residual"] = s.worst_hypothesis;
  j["pass"] = s.pass();
  return j;
}

ordered_json failure_json(const RunConfig& config, const std::string& kind, const std::string& message) {
  ordered_json j;
  j["schema"] = 1;
  j["config"] = config_json(config);
  j["error"] = {{"kind", kind}, {"message", message}};
  j["pass"] = false;
  return j;
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_eigen_csv(std::ostream& os, const Vec& bddc, const Vec& feti_dp) {
  os << "bddc_index,bddc_eigenvalue,feti_dp_index,feti_dp_eigenvalue\n";
  const std::size_t rows = std::max(bddc.size(), feti_dp.size());
  for (std::size_t i = 0; i < rows; ++i) {
    if (i < bddc.size()) os << i << ',' << format_double(bddc[i]);
    else os << ',';
    os << ',';
    if (i < feti_dp.size()) os << i << ',' << format_double(feti_dp[i]);
    else os << ',';
    os << '\n';
  }
}

// ---------------------------------------------------------------------------
// Commands

namespace {

bool write_text(const std::string& path, const std::string& text) {
  if (path.empty()) return true;
  std::ofstream f(path, std::ios::binary);
  if (!f) return false;
  f << text;
  return static_cast<bool>(f);
}

int emit(const std::string& path, const ordered_json& j) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty()) {
    std::cout << text;
    return exit_code::ok;
  }
  if (!write_text(path, text)) {
    std::cerr << "ddlab: cannot write " << path << "\n";
    return exit_code::io;
  }
  return exit_code::ok;
}

int fail(const RunConfig& config, int code, const std::string& kind, const std::string& message) {
  std::cerr << "ddlab: " << kind << ": " << message << "\n";
  const int io = emit(config.out, failure_json(config, kind, message));
  return io != exit_code::ok ? io : code;
}

} // namespace

int cmd_run(const RunConfig& config, Stage stage) {
  try {
    const Instance inst = build_instance(config);
    const Evaluation eval = evaluate(inst, stage);
    if (const int io = emit(config.out, evaluation_json(inst, eval)); io != exit_code::ok) return io;
    if (!config.eigs.empty() && eval.spectra) {
      std::ostringstream csv;
      write_eigen_csv(csv, eval.spectra->eig_bddc, eval.spectra->eig_feti);
      if (!write_text(config.eigs, csv.str())) {
        std::cerr << "ddlab: cannot write " << config.eigs << "\n";
        return exit_code::io;
      }
    }
    return eval.pass() ? exit_code::ok : exit_code::verdict;
  } catch (const EmptyCoarseSpace& e) {
    return fail(config, exit_code::singular, "empty_coarse_space", e.what());
  } catch (const NotPositiveDefinite& e) {
    return fail(config, exit_code::singular, "not_positive_definite", e.what());
  } catch (const DimensionMismatch& e) {
    return fail(config, exit_code::verdict, "dimension_mismatch", e.what());
  } catch (const std::invalid_argument& e) {
    return fail(config, exit_code::io, "invalid_configuration", e.what());
  } catch (const UnsupportedConfiguration& e) {
    return fail(config, exit_code::io, "unsupported_configuration", e.what());
  } catch (const std::exception& e) {
    return fail(config, exit_code::verdict, "verification_error", e.what());
  }
}

int cmd_harness(const HarnessOptions& options, const std::string& out) {
  try {
    const HarnessSummary summary = run_harness(options);
    if (const int io = emit(out, harness_json(options, summary)); io != exit_code::ok) return io;
    return summary.pass() ? exit_code::ok : exit_code::verdict;
  } catch (const std::invalid_argument& e) {
    std::cerr << "ddlab: " << e.what() << "\n";
    return exit_code::io;
  } catch (const std::exception& e) {
    std::cerr << "ddlab: " << e.what() << "\n";
    return exit_code::verdict;
  }
}

} // namespace ddlab
