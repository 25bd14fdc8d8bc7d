/*
 * SPDX-FileCopyrightText: Copyright 2026 The leakscope authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "leakscope/sim/processor.hpp"

#include <functional>
#include <optional>
#include <string>

namespace leakscope::report {

/// Reads `getenv`-style lookups; injectable for tests.
using EnvLookup = std::function<std::optional<std::string>(const std::string &)>;
EnvLookup process_env();

/// Key-value configuration mirroring SimConfig:
///
///   mode = baseline | param
///   eda_fix = on | off | auto          (auto: on in param mode only)
///   noise_sigma = <real >= 0>
///   seed = <decimal or 0x-hex>
///   cache.sets = <power of two>
///   cache.ways = <1..64>
///   cache.line_bytes = 64
///   rekey_interval_runs = <n >= 1> | never
///   affine_spec = <JSON path, relative to the config file>
///
/// '#' starts a comment. Each key may be overridden by the environment
/// variable LEAKSCOPE_<KEY> with '.' replaced by '_' and upper-cased.
/// Errors name the offending field.
class ConfigBuilder {
  public:
    ConfigBuilder();
    void load_file(const std::string &path);
    void apply_env(const EnvLookup &env);
    /// Applies one key; `origin` prefixes error messages.
    void set(const std::string &key, const std::string &value, const std::string &origin,
             const std::string &base_dir = ".");
    const sim::SimConfig &config() const { return cfg_; }
    /// Path of the affine spec if one was loaded, else "" (built-in v1).
    const std::string &affine_source() const { return affine_source_; }

  private:
    sim::SimConfig cfg_;
    std::string affine_source_;
};

/// The recognised configuration keys in documentation order.
const std::vector<std::string> &config_keys();
std::string env_name(const std::string &key);

} // namespace leakscope::report
