#pragma once

/** @file pipeline.hpp
    @brief Builds a substructured instance from a run configuration and runs
           the axiom, spectral, solver and lemma checks on it.

    The report functions return nlohmann::ordered_json so key order, and hence
    the serialized report, is fixed for a given configuration.
*/

#include "ddlab/harness.hpp"
#include "ddlab/krylov.hpp"
#include "ddlab/model_problem.hpp"
#include "ddlab/operators.hpp"
#include "ddlab/preconditioners.hpp"
#include "ddlab/spaces.hpp"
#include "ddlab/spectral.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>

namespace ddlab {

struct RunConfig {
  int nx = 2;
  int ny = 2;
  int m = 2;
  CoarseKind coarse = CoarseKind::corners;
  ScalingKind scaling = ScalingKind::multiplicity;
  /// 1 gives a uniform coefficient, anything else a checkerboard 1 : ratio.
  double rho_ratio = 1.0;
  PcgOptions pcg;
  /// 0 selects the unit load f = 1, any other value a Gaussian load from that seed.
  std::uint64_t seed = 0;
  std::string out;  ///< JSON report path, empty for none
  std::string eigs; ///< CSV eigenvalue path, empty for none

  GridSpec grid() const;
};

struct Instance {
  RunConfig config;
  Decomposition decomp;
  InterfaceLayout layout;
  CoarseSpec coarse;
  Subassembly sub;
  OperatorSet ops;

  bool empty_interface() const { return ops.dim_w() == 0; }
  /// Every coordinate of W_tilde is continuous, so W_tilde = W_hat.
  bool fully_assembled() const { return ops.dim_w_tilde() == ops.dim_w_hat(); }
};

/// Throws std::invalid_argument for an invalid grid, EmptyCoarseSpace when
/// substructures share no coarse degree of freedom and NotPositiveDefinite when
/// S_tilde is singular.
Instance build_instance(const RunConfig& config);

/// Load vector on W_hat chosen by config.seed.
Vec load_vector(const RunConfig& config, std::size_t n);

struct SolverCheck {
  Vec f;
  Vec u_direct; ///< S_hat^{-1} f by Cholesky of S_hat
  PcgTrace bddc;
  PcgTrace feti_dp;
  Vec u_bddc;
  Vec u_feti_dp; ///< primal recovery from the PCG multipliers
  double rel_error_bddc = 0.0;
  double rel_error_feti_dp = 0.0;
  double kappa_ratio_bddc = 0.0; ///< see kappa_bound_worst_ratio
  double kappa_ratio_feti_dp = 0.0;
  int iteration_gap = 0;

  struct Tolerances {
    double solution = 1e-8;
    double kappa_slack = 1e-8;
    /// absolute allowance in the error bound, relative to ||e_0||
    double kappa_floor = 1e-10;
    int iteration_gap = 2;
  } tolerances;

  bool solution_ok() const;
  bool kappa_ok() const;
  bool iterations_ok() const;
  bool pass() const { return solution_ok() && kappa_ok() && iterations_ok(); }
};

SolverCheck run_solvers(const Instance& inst, const BddcPreconditioner& bddc,
                        const FetiDpSystem& feti, const SpectralReport& spectra);

struct Evaluation {
  AxiomReport axioms;
  std::optional<SpectralReport> spectra;
  std::optional<SolverCheck> solvers;
  std::optional<ConcreteLemmaCheck> lemmas;
  /// all eigenvalues of P_BDDC within 1e-12 of 1 when W_tilde = W_hat
  std::optional<bool> identity_when_assembled;

  bool pass() const;
};

enum class Stage { axioms, spectra, solvers, all };

Evaluation evaluate(const Instance& inst, Stage stage);

nlohmann::ordered_json config_json(const RunConfig& config);
nlohmann::ordered_json evaluation_json(const Instance& inst, const Evaluation& eval);
nlohmann::ordered_json harness_json(const HarnessOptions& options, const HarnessSummary& summary);
/// Report for a run that stopped with an exception.
nlohmann::ordered_json failure_json(const RunConfig& config, const std::string& kind,
                                    const std::string& message);

/// Columns bddc_index, bddc_eigenvalue, feti_dp_index, feti_dp_eigenvalue; the
/// shorter list leaves its columns blank.
void write_eigen_csv(std::ostream& os, const Vec& bddc, const Vec& feti_dp);

/// Shortest round-trip decimal form, independent of the locale.
std::string format_double(double x);

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int io = 1;
inline constexpr int singular = 2;
inline constexpr int verdict = 3;
} // namespace exit_code

int cmd_run(const RunConfig& config, Stage stage);
int cmd_harness(const HarnessOptions& options, const std::string& out);

} // namespace ddlab
