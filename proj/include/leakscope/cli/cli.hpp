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

#include "leakscope/report/config.hpp"

#include <iosfwd>

namespace leakscope::cli {

/// Entry point of the `leakscope` tool. Returns the process exit status:
/// 0 on success, 1 on input/IO errors, 2 on usage errors.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err,
        const report::EnvLookup &env = report::process_env());

} // namespace leakscope::cli
