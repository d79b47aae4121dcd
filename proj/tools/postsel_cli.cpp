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

// postsel: command-line driver.

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "postsel/app/commands.hpp"
#include "postsel/app/config.hpp"
#include "postsel/app/report.hpp"
#include "postsel/errors.hpp"

namespace app = postsel::app;

namespace {

struct Verb {
    CLI::App *sub = nullptr;
    std::map<std::string, std::string> flags;
    std::vector<std::string> axes;
};

void add_key_options(Verb &v) {
    for (const auto &k : app::config_keys()) {
        v.sub->add_option("--" + k.name, v.flags[k.name], k.help);
    }
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App cli{"Spin post-selection preparation of mechanical qubit, Fock and cat states"};
    cli.require_subcommand(1);
    cli.set_version_flag("--version", POSTSEL_VERSION);
    std::string config_path;
    cli.add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);

    const std::vector<std::pair<std::string, std::string>> verbs = {
        {"solve-angle", "post-selection angles for an equal superposition"},
        {"evolve", "thermal master-equation run followed by spin post-selection"},
        {"aav-compare", "weak-measurement mean position against the exact result"},
        {"monte-carlo", "angle-inaccuracy Monte-Carlo under the master equation"},
        {"sweep", "Cartesian parameter sweep over one or two axes"},
        {"figure", "figure reproduction presets"},
    };
    std::map<std::string, Verb> subs;
    std::string preset;
    for (const auto &[name, help] : verbs) {
        Verb &v = subs[name];
        v.sub = cli.add_subcommand(name, help);
        add_key_options(v);
        v.sub->add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
    }
    subs["figure"].sub->add_option("preset", preset, "fig1, fig2, fig3a, fig3b, fig4, fig5 or fig6")->required();
    subs["sweep"].sub->add_option("--axis", subs["sweep"].axes, "name:start:stop:count[:log], at most twice");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = cli.exit(e);
        return rc == 0 ? 0 : 2;
    }

    std::string command;
    for (auto &[name, v] : subs) {
        if (v.sub->parsed()) command = name;
    }
    Verb &verb = subs[command];

    try {
        app::RunConfig cfg;
        if (command == "figure") app::apply_preset_defaults(preset, cfg);
        if (!config_path.empty()) cfg.load_file(config_path);
        cfg.load_env();
        for (const auto &k : app::config_keys()) {
            if (verb.sub->count("--" + k.name) > 0) cfg.set(k.name, verb.flags[k.name]);
        }
        if (verb.axes.size() > 2) throw postsel::ValidationError("sweep accepts at most two axes");
        for (std::size_t i = 0; i < verb.axes.size(); ++i) cfg.set("axis" + std::to_string(i + 1), verb.axes[i]);

        const app::RunReport report = app::run_command(command, preset, cfg);
        for (const auto &w : report.warnings) std::cerr << "warning: " << w << '\n';
        app::write_outputs(report, cfg.str("out"), cfg.str("format"), std::cout);
        return 0;
    } catch (const std::exception &e) {
        const int rc = app::exit_code_for(e);
        const char *kind = rc == 2 ? "invalid input" : rc == 3 ? "no solution" : rc == 4 ? "numerical failure" : "error";
        std::cerr << "postsel: " << kind << ": " << e.what() << '\n';
        return rc;
    }
}
