// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "frl/local_time.hpp"
#include "frl/starburst.hpp"

namespace frl {

struct ObservableStats {
    double raw = 0.0;
    double raw_std_error = 0.0;
    double reweighted = 0.0;
    double std_error = 0.0;
    bool low_ess_warning = false;  // ess < 10
};

struct EdwardsEstimate {
    double g = 0.0;
    std::optional<CouplingWeights> star_coupling;  // recorded for star runs
    double normalizer = 0.0;      // estimate of E(exp(-g L))
    double normalizer_std_error = 0.0;
    std::vector<double> weights;  // normalized, sum exactly compensated to 1
    double ess = 0.0;             // (sum w)^2 / sum w^2
    double max_exponent = 0.0;    // largest raw log-weight (diagnostic)
    std::map<std::string, ObservableStats> observables;
};

// Importance weights exp(-g * value) from per-path local times, computed in
// log space and normalized by the maximum before exponentiation. Throws
// NumericError carrying the offending exponent when the normalizer itself
// cannot be represented (g beyond the stable range).
EdwardsEstimate edwards_weights(const LocalTimeEstimate& est, double g);

// Star variant: est must be a combined local time whose coupling is recorded
// alongside (the weights already scale the per-path values; g multiplies all
// of them uniformly).
EdwardsEstimate edwards_weights_star(const LocalTimeEstimate& est,
                                     const CouplingWeights& coupling,
                                     double g = 1.0);

// Built-in observables, evaluated per path:
//   "gyration"       weighted squared radius of gyration
//   "antipodal"      squared displacement between parameters T/2 and 0
//   "branch_end_<k>" squared end-to-end distance of star branch k
std::vector<double> observable_per_path(const PathEnsemble& ens,
                                        const std::string& name);

// Self-normalized importance-sampling estimate with delta-method standard
// error; g = 0 reproduces the raw estimator exactly. The result is recorded
// into ew.observables[name] and returned.
ObservableStats reweighted_observable(const PathEnsemble& ens,
                                      EdwardsEstimate& ew,
                                      const std::string& name);

struct StabilityRow {
    double g = 0.0;
    bool finite = false;  // normalizer representable
    double ess = 0.0;
    bool stable = false;  // finite and ess >= ess_fraction * n
};

// Empirical analogue of the "small coupling" stability range: for each g,
// whether the reweighting is finite and retains at least ess_fraction of the
// ensemble.
std::vector<StabilityRow> stability_scan(const LocalTimeEstimate& est,
                                         const std::vector<double>& g_grid,
                                         double ess_fraction = 0.01);

}  // namespace frl
