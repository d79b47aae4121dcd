// Copyright 2026 The postsel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef POSTSEL_APP_COMMANDS_HPP
#define POSTSEL_APP_COMMANDS_HPP

#include <string>
#include <vector>

#include "postsel/app/config.hpp"
#include "postsel/app/report.hpp"

namespace postsel::app {

const std::vector<std::string> &figure_presets();

/// Fills preset defaults into keys that have not been set explicitly.
/// Throws ValidationError for an unknown preset.
void apply_preset_defaults(const std::string &preset, RunConfig &cfg);

RunReport cmd_solve_angle(const RunConfig &cfg);
RunReport cmd_evolve(const RunConfig &cfg);
RunReport cmd_aav_compare(const RunConfig &cfg);
RunReport cmd_monte_carlo(const RunConfig &cfg);
RunReport cmd_figure(const std::string &preset, const RunConfig &cfg);
RunReport cmd_sweep(const RunConfig &cfg);

/// Dispatches on the verb; `preset` is only used by "figure".
RunReport run_command(const std::string &command, const std::string &preset, const RunConfig &cfg);

/// 0 ok, 2 validation, 3 no solution, 4 numerical failure, 1 anything else.
int exit_code_for(const std::exception &e);

}  // namespace postsel::app

#endif
