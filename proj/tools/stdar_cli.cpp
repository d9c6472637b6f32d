// Copyright 2026 The stdar Authors
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

// stdar <subcommand> --scenario FILE [--out DIR] [options]

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "stdar/io/commands.hpp"
#include "stdar/io/scenario.hpp"

namespace {

struct Flags {
  std::string scenario;
  std::string out;
  bool allow_degenerate = false;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol_psd, tol_residual, tol_range, tol_zero, eps_boundary, fd_step;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--scenario", f.scenario, "scenario file (JSON)")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", f.out, "output directory (default: run.output_dir)");
  sub->add_flag("--allow-degenerate-terminal", f.allow_degenerate, "accept G'PfG = 0");
  sub->add_option("--seed", f.seed, "random seed");
  sub->add_option("--tol-psd", f.tol_psd);
  sub->add_option("--tol-residual", f.tol_residual);
  sub->add_option("--tol-range", f.tol_range);
  sub->add_option("--tol-zero", f.tol_zero);
  sub->add_option("--tol-eps-boundary", f.eps_boundary);
  sub->add_option("--tol-fd-step", f.fd_step);
}

int run(const std::string& command, const Flags& f) {
  using namespace stdar;
  io::Scenario s = io::load_scenario(f.scenario);
  if (f.allow_degenerate) s.run.allow_degenerate_terminal = true;
  if (f.seed) s.run.seed = *f.seed;
  Tol& t = s.tolerances;
  bool retol = false;
  auto set = [&](const std::optional<double>& v, double& dst) {
    if (v) {
      dst = *v;
      retol = true;
    }
  };
  set(f.tol_psd, t.tol_psd);
  set(f.tol_residual, t.tol_residual);
  set(f.tol_range, t.tol_range);
  set(f.tol_zero, t.tol_zero);
  set(f.eps_boundary, t.eps_boundary);
  set(f.fd_step, t.fd_step);
  if (retol) {
    t.check();
    s.problem = io::rebuild_problem(s.problem, t);
  }
  s.run.mode = command;
  const std::string out = f.out.empty() ? s.run.output_dir : f.out;
  return io::run_scenario(s, out, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stage-bound disturbance attenuation regulator toolkit"};
  app.require_subcommand(1);
  Flags flags;
  const char* commands[][2] = {
      {"validate", "check the standing assumptions"},
      {"finite", "finite-horizon multipliers and Riccati sweep per initial state"},
      {"policy-curve", "first-stage control over a grid of initial states"},
      {"rollout", "closed-loop simulation of the online policy"},
      {"steady", "steady-state multiplier, Riccati matrix and LMI certificate"},
      {"bench", "steady-state timing study on random stable systems"},
  };
  for (const auto& c : commands) add_common(app.add_subcommand(c[0], c[1]), flags);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, flags);
  } catch (const stdar::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return stdar::io::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return stdar::io::kExitError;
  }
}
