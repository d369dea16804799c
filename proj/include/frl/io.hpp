// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "json.hpp"

#include "frl/local_time.hpp"
#include "frl/sampler.hpp"

namespace frl {

// Binary ensemble container: "FRLP" magic, version, kernel and grid header,
// little-endian 64-bit float payload. Round-trips are bit-exact.
void save_ensemble(const PathEnsemble& ens, const std::string& path);
PathEnsemble load_ensemble(const std::string& path);

// CSV interop: one row per (sample, point), columns
// sample_id,branch,t,x_1..x_d, 17 significant digits. A nonempty comment is
// written as a leading '#' line; the loader skips '#' lines.
void save_ensemble_csv(const PathEnsemble& ens, const std::string& path,
                       const std::string& comment = "");
// The CSV carries no kernel metadata; the caller's KernelSpec supplies it.
// Row layout must match a uniform grid of that geometry.
PathEnsemble load_ensemble_csv(const std::string& path, const KernelSpec& spec,
                               int grid_n);

// Write text atomically: temp file in the target directory, then rename.
void atomic_write_text(const std::string& path, const std::string& content);

nlohmann::json kernel_spec_to_json(const KernelSpec& spec);
KernelSpec kernel_spec_from_json(const nlohmann::json& j);

// Estimate record {quantity, kernel, epsilon, centered, gap?, n_samples,
// grid_points, mean, std_error}; callers may attach a config echo.
nlohmann::json estimate_to_json(const LocalTimeEstimate& est,
                                const KernelSpec& spec,
                                const std::string& quantity);

void write_json(const std::string& path, const nlohmann::json& j);

}  // namespace frl
