// ddlab: build a substructured Poisson instance and check BDDC / FETI-DP on it.
//
// Exit codes: 0 all checks pass, 1 usage or I/O error, 2 singular subassembled
// operator (no usable coarse space), 3 a check failed.

#include "ddlab/pipeline.hpp"

#include <CLI11.hpp>

#include <map>
#include <string>

namespace {

void add_instance_flags(CLI::App& sub, ddlab::RunConfig& c) {
  const std::map<std::string, ddlab::CoarseKind> coarse{{"corners", ddlab::CoarseKind::corners},
                                                       {"corners-edges", ddlab::CoarseKind::corners_edges}};
  const std::map<std::string, ddlab::ScalingKind> scaling{{"multiplicity", ddlab::ScalingKind::multiplicity},
                                                         {"stiffness", ddlab::ScalingKind::stiffness}};
  sub.add_option("--nx", c.nx, "substructures in x")->check(CLI::PositiveNumber);
  sub.add_option("--ny", c.ny, "substructures in y")->check(CLI::PositiveNumber);
  sub.add_option("--m", c.m, "elements per substructure side")->check(CLI::PositiveNumber);
  sub.add_option("--coarse", c.coarse, "corners | corners-edges")
      ->transform(CLI::CheckedTransformer(coarse, CLI::ignore_case));
  sub.add_option("--scaling", c.scaling, "multiplicity | stiffness")
      ->transform(CLI::CheckedTransformer(scaling, CLI::ignore_case));
  sub.add_option("--rho-ratio", c.rho_ratio, "checkerboard coefficient ratio, 1 = uniform")
      ->check(CLI::PositiveNumber);
  sub.add_option("--tol", c.pcg.tol, "PCG relative residual tolerance")->check(CLI::PositiveNumber);
  sub.add_option("--maxit", c.pcg.maxit, "PCG iteration limit")->check(CLI::NonNegativeNumber);
  sub.add_option("--seed", c.seed, "load vector: 0 = unit load, otherwise Gaussian");
  sub.add_option("--out", c.out, "JSON report path (default stdout)");
  sub.add_option("--eigs", c.eigs, "CSV eigenvalue table path");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"BDDC and FETI-DP verification on a substructured Q1 Poisson problem"};
  app.require_subcommand(1);

  ddlab::RunConfig config;
  ddlab::Stage stage = ddlab::Stage::all;
  const std::pair<const char*, ddlab::Stage> stages[] = {
      {"run", ddlab::Stage::all},
      {"axioms", ddlab::Stage::axioms},
      {"spectra", ddlab::Stage::spectra},
      {"pcg", ddlab::Stage::solvers},
  };
  const std::map<std::string, const char*> help{
      {"run", "axioms, spectra, solvers and lemma checks"},
      {"axioms", "operator identities only"},
      {"spectra", "eigenvalues, bounds and preconditioner comparison"},
      {"pcg", "BDDC-PCG and FETI-DP-PCG against a direct solve"},
  };
  for (const auto& [name, st] : stages) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    add_instance_flags(*sub, config);
    sub->callback([&stage, st = st] { stage = st; });
  }

  ddlab::HarnessOptions hopts;
  std::string harness_out;
  bool harness = false;
  CLI::App* h = app.add_subcommand("harness", "randomized checks of the abstract eigenvalue lemmas");
  h->add_option("--instances", hopts.instances, "instances per lemma");
  h->add_option("--n-max", hopts.n_max, "largest dimension");
  h->add_option("--seed", hopts.seed, "base seed");
  h->add_flag("--fault", hopts.inject_fault, "perturb L to check that failures are detected");
  h->add_option("--out", harness_out, "JSON summary path (default stdout)");
  h->callback([&harness] { harness = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ddlab::exit_code::io;
  }

  if (harness) return ddlab::cmd_harness(hopts, harness_out);
  return ddlab::cmd_run(config, stage);
}
