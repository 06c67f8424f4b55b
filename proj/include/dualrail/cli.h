// Copyright 2026 The dualrail Authors
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


#ifndef DUALRAIL_CLI_H
#define DUALRAIL_CLI_H

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "dualrail/experiments.h"

namespace dualrail {

inline constexpr const char* kToolVersion = "1.0.0";

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "DUALRAIL_OUTPUT_DIR";
/// Environment variable fixing the manifest timestamp, for byte-identical reruns.
inline constexpr const char* kTimestampEnv = "DUALRAIL_TIMESTAMP";

struct RunManifest {
  std::string command;
  std::string config_path;
  uint64_t seed = 0;
  std::string output_dir;
  std::string tool_version = kToolVersion;
  std::string timestamp;
};

std::string manifest_json(const RunManifest& manifest);

/// One CSV field, quoted when it holds a comma, quote or line break.
std::string csv_field(const std::string& text);

/// curve,x,y,yerr with one row per point.
std::string curves_csv(const ExperimentResult& result);
/// fit,parameter,value,sigma,chi2,dof,converged,flags with one row per parameter.
std::string fits_csv(const ExperimentResult& result);
/// Derived scalars as {"value", "sigma"} pairs plus fits and diagnostics.
std::string summary_json(const ExperimentResult& result, const RunManifest& manifest);

/// Runs one command line. argv[0] is the program name. Returns 0 on success,
/// 1 for usage errors, 2 for configuration or validation errors and 3 when
/// an experiment cannot produce a result.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dualrail

#endif  // DUALRAIL_CLI_H
