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

#include <string>
#include <vector>

namespace leakscope::sim {

/// Long-format power CSV: header `run_index,cycle,sample`, one row per
/// (run, cycle), samples printed with 17 significant digits.
void write_power_csv(const std::string &path, const std::vector<std::vector<double>> &runs);

/// Reads the format above. Runs must be numbered 0..N-1 and each run's
/// cycles 0..d-1 with no gaps; errors name the offending row.
std::vector<std::vector<double>> read_power_csv(const std::string &path);

} // namespace leakscope::sim
