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

// Subcommand drivers shared by the command-line tool and the tests. Each
// returns a process exit code and writes its files under out_dir.

#pragma once

#include <ostream>
#include <string>

#include "stdar/io/scenario.hpp"

namespace stdar::io {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNonConvergence = 3;

/// Exit code for an exception escaping a solver.
int exit_code_for(const Error& e);

int cmd_validate(const Scenario& s, std::ostream& log);
int cmd_finite(const Scenario& s, const std::string& out_dir, std::ostream& log);
int cmd_policy_curve(const Scenario& s, const std::string& out_dir, std::ostream& log);
int cmd_rollout(const Scenario& s, const std::string& out_dir, std::ostream& log);
int cmd_steady(const Scenario& s, const std::string& out_dir, std::ostream& log);
int cmd_bench(const Scenario& s, const std::string& out_dir, std::ostream& log);

/// Dispatch on s.run.mode.
int run_scenario(const Scenario& s, const std::string& out_dir, std::ostream& log);

}  // namespace stdar::io
