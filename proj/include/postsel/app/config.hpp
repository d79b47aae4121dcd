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

#ifndef POSTSEL_APP_CONFIG_HPP
#define POSTSEL_APP_CONFIG_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "postsel/lindblad.hpp"
#include "postsel/robustness.hpp"

namespace postsel::app {

struct ConfigKey {
    std::string name;
    std::string default_value;  ///< empty means unset
    std::string help;
};

/// Every key RunConfig understands, in a fixed order.
const std::vector<ConfigKey> &config_keys();

/// Parses a real number; also accepts pi literals such as "pi", "2pi",
/// "pi/2", "3*pi/2" and "-pi".
double parse_real(const std::string &text);

/// Flat key/value run configuration.
///
/// Values are layered: built-in defaults, then preset defaults, then a config
/// file, then POSTSEL_<key> environment variables, then command-line flags.
/// Every layer above the defaults marks the key as explicitly set.
class RunConfig {
   public:
    RunConfig();

    void set(const std::string &key, const std::string &value, bool explicit_set = true);
    bool has(const std::string &key) const;  ///< non-empty value
    bool is_explicit(const std::string &key) const { return explicit_.count(key) > 0; }
    const std::set<std::string> &explicit_keys() const { return explicit_; }

    const std::string &str(const std::string &key) const;
    double real(const std::string &key) const;
    long integer(const std::string &key) const;
    bool flag(const std::string &key) const;

    /// Reads "key = value" lines; '#' starts a comment.
    void load_file(const std::string &path);
    /// Applies POSTSEL_<key> variables present in the environment.
    void load_env();

    const std::map<std::string, std::string> &values() const { return values_; }
    /// All keys in registry order, for echoing into reports.
    std::vector<std::pair<std::string, std::string>> echo() const;

    // Typed views.
    DecoherenceRates rates() const;
    SolverConfig solver() const;  ///< n_max = 0 picks the default cutoff for nbar_m
    AngleJitter jitter() const;
    Branch branch() const;

   private:
    std::map<std::string, std::string> values_;
    std::set<std::string> explicit_;
};

/// Throws ValidationError naming the first explicitly set key outside `allowed`
/// (the solver/output keys are always allowed).
void require_keys_subset(const RunConfig &cfg, const std::set<std::string> &allowed, const std::string &context);

}  // namespace postsel::app

#endif
