// SPDX-License-Identifier: Apache-2.0
//
// hybridbf: link-level simulation of hybrid analog-digital precoding with
// S-parameter-based models of the analog RF beamforming network
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "hybridbf/sim.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace hybridbf
{

// ------------------------------ ERROR REPORTING -----------------------------

// Configuration problem with the offending field path in the message
// (for example "groups[1].n_beams: must be >= n_users").
class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// --------------------------------- MANIFEST ---------------------------------

// Provenance record written to the output directory before any results, so a
// run can always be reproduced from what it left behind.
struct RunManifest
{
    std::string config_path;
    std::string output_dir;
    std::string tool_version;
    std::string timestamp_utc;
    ScenarioConfig resolved_config; // all defaults materialized
};

// ----------------------------------- OPS ------------------------------------

// Parses a JSON scenario (see README for the schema). Unknown keys anywhere in
// the document are rejected; every error names the offending field. Also
// accepts a run manifest, in which case the embedded resolved config is used.
ScenarioConfig parse_config(const std::string &text);

// Canonical JSON with every field materialized; parse(serialize(c)) == c.
std::string serialize_config(const ScenarioConfig &config);

ScenarioConfig load_config_file(const std::string &path);

// results.csv content: fixed header plus one row per point, numeric columns at
// 12 significant digits so downstream consumers can recompute EE from SE.
std::string results_csv(const std::vector<PointResult> &table);

// Whitespace-separated plot table (one row per rho, one column per
// architecture) for the chosen metric; missing cells print as nan.
enum class PlotMetric
{
    SpectralEfficiency,
    EnergyEfficiency
};

std::string plot_table(const std::vector<PointResult> &table, const ScenarioConfig &config,
                       PlotMetric metric);

// Writes results.csv, se_vs_rho.dat and ee_vs_rho.dat into out_dir (created if
// missing).
void emit_results(const std::vector<PointResult> &table, const ScenarioConfig &config,
                  const std::string &out_dir);

void write_manifest(const RunManifest &manifest, const std::string &out_dir);

} // namespace hybridbf
