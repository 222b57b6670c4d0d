// Copyright 2026 The iongate Authors
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

// iongate command-line driver.
//   exit 0 success, 2 physics error, 3 optimizer failure, 4 input error.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "iongate/config.hpp"
#include "iongate/constants.hpp"
#include "iongate/errors.hpp"
#include "iongate/optimizer.hpp"
#include "iongate/serialization.hpp"
#include "iongate/simulator.hpp"

namespace fs = std::filesystem;
using namespace iongate;
using nlohmann::json;

namespace {

constexpr int kExitPhysics = 2;
constexpr int kExitOptimizer = 3;
constexpr int kExitInput = 4;

struct Options {
  std::string config;
  std::string scheme;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> starts;
  std::vector<int> subset;  // 1-based ions
  std::optional<double> nbar;
  std::optional<int> parity_points;
  int samples = 20;
};

fs::path output_dir(const Options& opt, const RunConfig& cfg) {
  if (!opt.out.empty()) return opt.out;
  if (!cfg.output.directory.empty()) return cfg.output.directory;
  if (const char* env = std::getenv("IONGATE_OUTPUT_DIR"); env && *env) return env;
  return ".";
}

std::string csv(void (*writer)(std::ostream&, const TrajectorySamples&, double), const TrajectorySamples& s,
                double tau) {
  std::ostringstream os;
  writer(os, s, tau);
  return os.str();
}

void print_matrix(const char* label, const Eigen::MatrixXd& m, double scale) {
  std::printf("%s\n", label);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::printf("  ");
    for (Eigen::Index c = 0; c < m.cols(); ++c) std::printf(" %10.6f", m(r, c) * scale);
    std::printf("\n");
  }
}

void emit_diagnostics(const fs::path& dir, const RunConfig& cfg, const SchemeDiagnostics& diag,
                      const PulseScheme& scheme, double target) {
  if (cfg.output.wants("json")) write_text(dir / "diagnostics.json", diagnostics_to_json(diag, scheme, target).dump(2) + "\n");
  if (cfg.output.wants("csv") && !diag.samples.times.empty()) {
    write_text(dir / "trajectory.csv", csv(write_trajectory_csv, diag.samples, scheme.gate_time));
    write_text(dir / "coupling.csv", csv(write_coupling_csv, diag.samples, scheme.gate_time));
  }
}

void report_diagnostics(const SchemeDiagnostics& diag, const PulseScheme& scheme, double target) {
  std::printf("objective sum|d|^2      : %.6e\n", diag.objective());
  std::printf("max |alpha(tau)|        : %.6e\n", diag.max_abs_alpha());
  std::printf("max |theta|             : %.6e\n", diag.theta.size() ? diag.theta.cwiseAbs().maxCoeff() : 0.0);
  std::printf("max theta deviation     : %.6e (relative to %.6f pi)\n", diag.max_theta_deviation(target, scheme),
              target / constants::kPi);
  print_matrix("theta / target:", diag.theta, 1.0 / target);
}

int cmd_modes(const Options& opt) {
  const RunConfig cfg = load_run_config(opt.config);
  const ChainModel chain = build_chain(cfg.chain);
  const fs::path dir = output_dir(opt, cfg);
  if (cfg.output.wants("json"))
    write_text(dir / "modes.json", modes_to_json(chain.trap, chain.modes, chain.eta).dump(2) + "\n");
  if (cfg.output.wants("csv")) {
    std::ostringstream os;
    write_modes_csv(os, chain.modes, chain.eta);
    write_text(dir / "modes.csv", os.str());
  }
  std::printf("ions: %d   axial: %.6f MHz   transverse: %.6f MHz\n", chain.trap.n_ions,
              constants::angular_to_mhz(chain.trap.axial_freq), constants::angular_to_mhz(chain.trap.transverse_freq));
  if (chain.fit_rms) std::printf("fit rms residual: %.4f kHz\n", constants::angular_to_mhz(*chain.fit_rms) * 1e3);
  for (int m = 0; m < chain.modes.n_modes(); ++m) {
    std::printf("mode %d: %.6f MHz   eta:", m + 1, constants::angular_to_mhz(chain.modes.frequencies[m]));
    for (int j = 0; j < chain.eta.n_ions(); ++j) std::printf(" %+.5f", chain.eta.eta(j, m));
    std::printf("\n");
  }
  return 0;
}

int cmd_synthesize(const Options& opt) {
  RunConfig cfg = load_run_config(opt.config);
  if (opt.seed) cfg.optimizer.seed = *opt.seed;
  if (opt.starts) cfg.optimizer.starts = *opt.starts;
  const ChainModel chain = build_chain(cfg.chain);
  const SynthesisProblem problem = make_problem(cfg, chain);
  const fs::path dir = output_dir(opt, cfg);

  Synthesis syn;
  try {
    syn = synthesize(problem, cfg.optimizer.samples_per_segment);
  } catch (const SynthesisFailure& e) {
    json dump = {{"problem", problem_to_json(problem)}, {"best_iterate", result_to_json(e.best())}};
    write_text(dir / "best_iterate.json", dump.dump(2) + "\n");
    std::fprintf(stderr, "best iterate written to %s\n", (dir / "best_iterate.json").string().c_str());
    throw;
  }
  syn.result.scheme.comment = "synthesized; seed " + std::to_string(problem.seed);
  for (const auto& w : syn.result.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());

  write_text(dir / "scheme.json", scheme_to_json(syn.result.scheme).dump(2) + "\n");
  if (cfg.output.wants("json")) {
    json report = {{"problem", problem_to_json(problem)}, {"result", result_to_json(syn.result)}};
    write_text(dir / "synthesis.json", report.dump(2) + "\n");
  }
  emit_diagnostics(dir, cfg, syn.diagnostics, syn.result.scheme, problem.target_coupling);

  const int converged = static_cast<int>(std::count_if(syn.result.starts.begin(), syn.result.starts.end(),
                                                       [](const StartOutcome& s) { return s.converged; }));
  std::printf("constraint form         : %s\n", syn.result.constraint_form.c_str());
  std::printf("converged starts        : %d / %d (best: %d, seed %llu)\n", converged, problem.multistart,
              syn.result.best_start, static_cast<unsigned long long>(problem.seed));
  std::printf("max constraint violation: %.3e\n", syn.result.max_violation);
  std::printf("peak amplitudes (MHz)   :");
  for (Eigen::Index j = 0; j < syn.result.scheme.peak_amplitudes.size(); ++j)
    std::printf(" %+.6f", constants::angular_to_mhz(syn.result.scheme.peak_amplitudes[j]));
  std::printf("\n");
  report_diagnostics(syn.diagnostics, syn.result.scheme, problem.target_coupling);
  std::printf("wrote %s\n", (dir / "scheme.json").string().c_str());
  return 0;
}

PulseScheme load_matching_scheme(const Options& opt, const ChainModel& chain) {
  const PulseScheme scheme = load_scheme(opt.scheme);
  if (scheme.n_ions() != chain.trap.n_ions) {
    std::ostringstream msg;
    msg << "scheme has " << scheme.n_ions() << " ions but the chain has " << chain.trap.n_ions;
    throw InputError(msg.str());
  }
  return scheme;
}

int cmd_verify(const Options& opt) {
  const RunConfig cfg = load_run_config(opt.config);
  const ChainModel chain = build_chain(cfg.chain);
  const PulseScheme scheme = load_matching_scheme(opt, chain);
  const double target = cfg.optimizer.target_coupling_pi * constants::kPi;
  const SchemeDiagnostics diag = diagnose(chain.eta, chain.modes, scheme, opt.samples);
  emit_diagnostics(output_dir(opt, cfg), cfg, diag, scheme, target);
  report_diagnostics(diag, scheme, target);
  return 0;
}

int cmd_simulate(const Options& opt) {
  RunConfig cfg = load_run_config(opt.config);
  if (!opt.subset.empty()) {
    cfg.simulate.subset_mask.assign(static_cast<std::size_t>(cfg.chain.n_ions), false);
    for (int q : opt.subset) {
      if (q < 1 || q > cfg.chain.n_ions) throw InputError("--subset: ion " + std::to_string(q) + " out of range");
      cfg.simulate.subset_mask[static_cast<std::size_t>(q - 1)] = true;
    }
  }
  if (opt.nbar) cfg.simulate.nbar = {*opt.nbar};
  if (opt.parity_points) cfg.simulate.parity_points = *opt.parity_points;

  const ChainModel chain = build_chain(cfg.chain);
  const PulseScheme scheme = load_matching_scheme(opt, chain);
  const MotionalInit motion = make_motion(cfg.simulate, chain.modes.n_modes());
  const GateResult result =
      simulate_scheme(chain.eta, chain.modes, scheme, cfg.simulate.subset_mask, motion, cfg.simulate.parity_points);

  const fs::path dir = output_dir(opt, cfg);
  if (cfg.output.wants("json")) write_text(dir / "gate_result.json", gate_result_to_json(result).dump(2) + "\n");
  if (cfg.output.wants("csv")) {
    std::ostringstream fringe, pops;
    write_fringe_csv(fringe, result.parity);
    write_populations_csv(pops, result.populations, result.n_qubits());
    write_text(dir / "fringe.csv", fringe.str());
    write_text(dir / "populations.csv", pops.str());
  }
  for (const auto& w : result.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::printf("qubits                  :");
  for (int q : result.qubits) std::printf(" %d", q + 1);
  std::printf("\n");
  std::printf("P(0..0) + P(1..1)       : %.8f\n", result.populations[0] + result.populations[result.populations.size() - 1]);
  std::printf("parity contrast         : %.8f (frequency %d, fit rms %.2e)\n", result.parity.contrast,
              result.parity.dominant_frequency, result.parity.fit_residual);
  std::printf("GHZ fidelity            : %.8f%s\n", result.fidelity, result.fidelity_clamped ? " (clamped)" : "");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-modulated global entangling gates for trapped-ion chains"};
  app.require_subcommand(1);
  Options opt;

  auto* modes = app.add_subcommand("modes", "Transverse normal modes and Lamb-Dicke matrix of the configured chain");
  auto* synth = app.add_subcommand("synthesize", "Optimize a segmented phase scheme for the configured chain");
  auto* verify = app.add_subcommand("verify", "Recompute displacements and couplings for a given scheme");
  auto* simulate = app.add_subcommand("simulate", "Simulate GHZ preparation with a given scheme");

  for (auto* sub : {modes, synth, verify, simulate}) {
    sub->add_option("-c,--config", opt.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--out", opt.out, "Output directory (default: config, then $IONGATE_OUTPUT_DIR, then .)");
  }
  for (auto* sub : {verify, simulate})
    sub->add_option("-s,--scheme", opt.scheme, "Pulse scheme (JSON)")->required()->check(CLI::ExistingFile);
  synth->add_option("--seed", opt.seed, "Override optimizer seed");
  synth->add_option("--starts", opt.starts, "Override multistart count");
  verify->add_option("--samples", opt.samples, "Trajectory samples per segment")->check(CLI::PositiveNumber);
  simulate->add_option("--subset", opt.subset, "1-based ions to drive (others switched off)")->delimiter(',');
  simulate->add_option("--nbar", opt.nbar, "Mean phonon number for every mode")->check(CLI::NonNegativeNumber);
  simulate->add_option("--parity-points", opt.parity_points, "Analysis phases in the parity scan");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*modes) return cmd_modes(opt);
    if (*synth) return cmd_synthesize(opt);
    if (*verify) return cmd_verify(opt);
    if (*simulate) return cmd_simulate(opt);
  } catch (const InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInput;
  } catch (const PhysicsError& e) {
    std::fprintf(stderr, "physics error: %s\n", e.what());
    return kExitPhysics;
  } catch (const OptimizerError& e) {
    std::fprintf(stderr, "optimizer error: %s\n", e.what());
    return kExitOptimizer;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
