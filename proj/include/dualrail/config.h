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


#ifndef DUALRAIL_CONFIG_H
#define DUALRAIL_CONFIG_H

#include <string>
#include <vector>

#include "dualrail/experiments.h"

namespace dualrail {

// Flat `key = value` configuration, one entry per line, `#` starts a
// comment. Keys are the field names of SystemParams, ErrorChannelParams
// (p1, p_phi), ExperimentConfig and classifier_* for ClassifierConfig.
//
// Frequencies are ordinary frequencies in Hz and are stored as angular rates;
// a unit suffix of Hz, kHz, MHz, GHz or rad/s may follow the number. Times
// are in seconds, with optional s, ms, us or ns. Lists are comma separated;
// complex numbers are written re,im and complex lists as re,im;re,im.

class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

struct ConfigKey {
  std::string name;
  std::string unit;  ///< "Hz", "s" or "" for dimensionless
  std::string help;
};

/// Every accepted key in serialization order.
const std::vector<ConfigKey>& config_keys();

/// Sets one key from its text value. Throws ConfigError naming the key for
/// unknown keys, missing values and malformed numbers.
void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value);
std::string get_config_value(const ExperimentConfig& config, const std::string& key);

/// Starts from `base` and applies every line of `text`.
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});
/// All keys; parse_config(serialize_config(c)) reproduces c exactly.
std::string serialize_config(const ExperimentConfig& config);

/// Field-by-field equality including the classifier template.
bool same_config(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace dualrail

#endif  // DUALRAIL_CONFIG_H
