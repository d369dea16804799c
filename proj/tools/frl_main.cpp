// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "frl/edwards.hpp"
#include "frl/errors.hpp"
#include "frl/geometry.hpp"
#include "frl/io.hpp"
#include "frl/kernel.hpp"
#include "frl/local_time.hpp"
#include "frl/quadrature.hpp"
#include "frl/sampler.hpp"
#include "frl/starburst.hpp"
#include "frl/stats.hpp"
#include "frl/verification.hpp"

namespace {

using frl::NumericError;
using frl::ValidationError;

struct RunConfig {
    std::string subcommand;
    // kernel
    std::string geometry = "circle";
    double T = 1.0;
    std::vector<double> lengths = {1.0, 1.0, 1.0};
    std::vector<double> H = {0.25};
    int d = 2;
    // grid and ensemble
    std::vector<int> N = {128};
    std::size_t n = 1000;
    std::uint64_t seed = 1;
    std::string sampler = "auto";  // auto | circulant | dense
    // estimators
    double eps = 0.01;
    std::vector<double> eps_ladder;
    double delta = -1.0;  // < 0: no separation cutoff
    bool centered = false;
    // reweighting and star couplings
    double g = 1.0;
    std::vector<double> g_self;
    double g_cross = 0.5;
    std::vector<double> g_grid = {0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
    std::string observable = "gyration";
    int branch_k = 1;
    int branch_l = 2;
    bool combined = false;
    // verify
    std::string experiment;
    std::vector<int> sizes = {2, 8, 16, 32};
    int n_pairs = 1000;
    // io
    std::string in_path;
    std::string out_path;
    std::string summary_path;
    std::string format = "binary";
    int threads = 1;
};

double scalar_H(const RunConfig& c) {
    if (c.H.size() != 1)
        throw ValidationError("exactly one Hurst index expected here");
    return c.H[0];
}

int scalar_N(const RunConfig& c) {
    if (c.N.size() != 1)
        throw ValidationError("exactly one grid size expected here");
    return c.N[0];
}

frl::KernelSpec make_spec(const RunConfig& c) {
    if (c.geometry == "circle")
        return frl::KernelSpec(frl::Geometry::circle(c.T), scalar_H(c), c.d);
    if (c.geometry == "star")
        return frl::KernelSpec(frl::Geometry::star(c.lengths), scalar_H(c), c.d);
    throw ValidationError("geometry must be circle or star");
}

nlohmann::json config_echo(const RunConfig& c) {
    nlohmann::json j;
    j["subcommand"] = c.subcommand;
    j["geometry"] = c.geometry;
    j["T"] = c.T;
    j["lengths"] = c.lengths;
    j["H"] = c.H;
    j["d"] = c.d;
    j["N"] = c.N;
    j["n"] = c.n;
    j["seed"] = c.seed;
    j["sampler"] = c.sampler;
    j["eps"] = c.eps;
    j["eps_ladder"] = c.eps_ladder;
    j["delta"] = c.delta;
    j["centered"] = c.centered;
    j["g"] = c.g;
    j["g_self"] = c.g_self;
    j["g_cross"] = c.g_cross;
    j["g_grid"] = c.g_grid;
    j["observable"] = c.observable;
    j["k"] = c.branch_k;
    j["l"] = c.branch_l;
    j["combined"] = c.combined;
    j["experiment"] = c.experiment;
    j["sizes"] = c.sizes;
    j["n_pairs"] = c.n_pairs;
    j["in"] = c.in_path;
    j["out"] = c.out_path;
    j["summary"] = c.summary_path;
    j["format"] = c.format;
    j["threads"] = c.threads;
    return j;
}

int env_threads() {
    const char* e = std::getenv("FRL_THREADS");
    if (!e || !*e) return 1;
    char* end = nullptr;
    const long v = std::strtol(e, &end, 10);
    if (end == e || *end != '\0' || v < 1 || v > 4096)
        throw ValidationError("FRL_THREADS must be a positive integer");
    return static_cast<int>(v);
}

std::vector<double> as_dlist(const nlohmann::json& v) {
    if (v.is_number()) return {v.get<double>()};
    return v.get<std::vector<double>>();
}

std::vector<int> as_ilist(const nlohmann::json& v) {
    if (v.is_number()) return {v.get<int>()};
    return v.get<std::vector<int>>();
}

void apply_config(RunConfig& c, const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("config file must hold a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        const nlohmann::json& v = it.value();
        if (k == "geometry") c.geometry = v.get<std::string>();
        else if (k == "T") c.T = v.get<double>();
        else if (k == "lengths") c.lengths = as_dlist(v);
        else if (k == "H") c.H = as_dlist(v);
        else if (k == "d") c.d = v.get<int>();
        else if (k == "N") c.N = as_ilist(v);
        else if (k == "n") c.n = v.get<std::size_t>();
        else if (k == "seed") c.seed = v.get<std::uint64_t>();
        else if (k == "sampler") c.sampler = v.get<std::string>();
        else if (k == "eps") c.eps = v.get<double>();
        else if (k == "eps_ladder") c.eps_ladder = as_dlist(v);
        else if (k == "delta") c.delta = v.get<double>();
        else if (k == "centered") c.centered = v.get<bool>();
        else if (k == "g") c.g = v.get<double>();
        else if (k == "g_self") c.g_self = as_dlist(v);
        else if (k == "g_cross") c.g_cross = v.get<double>();
        else if (k == "g_grid") c.g_grid = as_dlist(v);
        else if (k == "observable") c.observable = v.get<std::string>();
        else if (k == "k") c.branch_k = v.get<int>();
        else if (k == "l") c.branch_l = v.get<int>();
        else if (k == "combined") c.combined = v.get<bool>();
        else if (k == "experiment") c.experiment = v.get<std::string>();
        else if (k == "sizes") c.sizes = as_ilist(v);
        else if (k == "n_pairs") c.n_pairs = v.get<int>();
        else if (k == "in") c.in_path = v.get<std::string>();
        else if (k == "out") c.out_path = v.get<std::string>();
        else if (k == "summary") c.summary_path = v.get<std::string>();
        else if (k == "format") c.format = v.get<std::string>();
        else if (k == "threads") c.threads = v.get<int>();
        else throw ValidationError("unrecognized config key: " + k);
    }
}

std::string find_config_path(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--config") {
            if (i + 1 >= argc) throw ValidationError("--config needs a file path");
            return argv[i + 1];
        }
        if (a.rfind("--config=", 0) == 0) return a.substr(9);
    }
    return "";
}

nlohmann::json load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("config file is not valid JSON: " +
                              std::string(e.what()));
    }
    return j;
}

frl::PathEnsemble load_input(const RunConfig& c) {
    if (c.in_path.empty()) throw ValidationError("--in is required");
    if (c.in_path.size() >= 4 &&
        c.in_path.compare(c.in_path.size() - 4, 4, ".csv") == 0)
        return frl::load_ensemble_csv(c.in_path, make_spec(c), scalar_N(c));
    return frl::load_ensemble(c.in_path);
}

void emit_json(const RunConfig& c, const nlohmann::json& j) {
    if (c.out_path.empty()) {
        std::printf("%s\n", j.dump(2).c_str());
    } else {
        frl::write_json(c.out_path, j);
        std::printf("wrote %s\n", c.out_path.c_str());
    }
}

frl::CouplingWeights make_couplings(const RunConfig& c, int nb) {
    frl::CouplingWeights cw;
    cw.g_self = c.g_self.empty()
                    ? std::vector<double>(static_cast<std::size_t>(nb), 1.0)
                    : c.g_self;
    cw.g_cross.assign(static_cast<std::size_t>(nb),
                      std::vector<double>(static_cast<std::size_t>(nb), c.g_cross));
    for (int k = 0; k < nb; ++k) cw.g_cross[static_cast<std::size_t>(k)]
                                     [static_cast<std::size_t>(k)] = 0.0;
    return cw;
}

int run_sample(const RunConfig& c) {
    const frl::KernelSpec spec = make_spec(c);
    const int N = scalar_N(c);
    const frl::Grid grid = spec.geom.type == frl::GeometryType::Circle
                               ? frl::Grid::circle_uniform(spec.geom.T, N)
                               : frl::Grid::star_uniform(spec.geom.lengths, N);
    frl::SamplerOptions so;
    so.threads = c.threads;
    frl::PathEnsemble ens = [&] {
        if (spec.geom.type == frl::GeometryType::Star)
            return frl::sample_star(spec, grid, c.n, frl::SeedSpec{c.seed}, so);
        if (c.sampler == "dense")
            return frl::sample_dense(spec, grid, c.n, frl::SeedSpec{c.seed}, so);
        if (c.sampler == "auto" || c.sampler == "circulant")
            return frl::sample_loop_circulant(spec, grid, c.n,
                                              frl::SeedSpec{c.seed}, so);
        throw ValidationError("sampler must be auto, circulant, or dense");
    }();
    if (c.out_path.empty()) throw ValidationError("sample needs --out");
    if (c.format == "csv") {
        frl::save_ensemble_csv(ens, c.out_path,
                               std::string("config ") + config_echo(c).dump());
    } else if (c.format == "binary") {
        frl::save_ensemble(ens, c.out_path);
    } else {
        throw ValidationError("format must be binary or csv");
    }
    std::printf("wrote %zu paths on %zu grid points to %s\n", ens.n_samples(),
                ens.n_points(), c.out_path.c_str());
    return 0;
}

int run_loctime(const RunConfig& c) {
    const frl::PathEnsemble ens = load_input(c);
    frl::LocalTimeEstimate est =
        c.delta >= 0.0 ? frl::gap_local_time_ensemble(ens, c.eps, c.delta)
                       : frl::local_time_ensemble(ens, c.eps);
    if (c.centered) est = frl::center(est, ens.spec());
    nlohmann::json j;
    j["config"] = config_echo(c);
    j["estimate"] = frl::estimate_to_json(
        est, ens.spec(), c.delta >= 0.0 ? "gap_local_time" : "local_time");
    emit_json(c, j);
    return 0;
}

int run_moments(const RunConfig& c) {
    const frl::PathEnsemble ens = load_input(c);
    const frl::KernelSpec& spec = ens.spec();
    if (spec.geom.type != frl::GeometryType::Circle)
        throw ValidationError("moments needs a loop ensemble");
    const double delta = c.delta >= 0.0 ? c.delta : spec.geom.T / 2.0;
    const frl::LocalTimeEstimate est =
        frl::gap_local_time_ensemble(ens, c.eps, delta);
    std::vector<double> sq(est.per_path.size());
    for (std::size_t s = 0; s < sq.size(); ++s)
        sq[s] = est.per_path[s] * est.per_path[s];
    const frl::MeanSe m2 = frl::mean_se(sq);

    nlohmann::json expected;
    expected["mean_lattice"] =
        frl::expected_L_eps_discrete(spec, ens.grid(), c.eps, delta);
    expected["mean_continuum"] = frl::mean_local_time_circle(
        spec.hurst, spec.dim, spec.geom.T, c.eps, delta);
    expected["second_moment_lattice"] = frl::second_moment_gap_discrete(
        spec, static_cast<int>(ens.grid().n_per_branch), c.eps, c.eps, delta);
    try {
        const frl::QuadResult q = frl::second_moment_quadrature(
            spec.hurst, spec.dim, spec.geom.T, delta, c.eps);
        expected["second_moment_continuum"] = q.value;
        expected["second_moment_continuum_rel_error"] = q.rel_error;
    } catch (const NumericError& e) {
        expected["second_moment_continuum_note"] = e.what();
    }

    nlohmann::json j;
    j["config"] = config_echo(c);
    j["kernel"] = frl::kernel_spec_to_json(spec);
    j["moments"] = {{"epsilon", c.eps},
                    {"gap", delta},
                    {"n_samples", est.per_path.size()},
                    {"mean", est.mean},
                    {"mean_std_error", est.std_error},
                    {"second_moment", m2.mean},
                    {"second_moment_std_error", m2.std_error}};
    j["expected"] = expected;
    emit_json(c, j);
    return 0;
}

int run_star(const RunConfig& c) {
    const frl::PathEnsemble ens = load_input(c);
    if (ens.grid().kind != frl::GridKind::Star)
        throw ValidationError("star analysis needs a star ensemble");
    const frl::KernelSpec& spec = ens.spec();
    const int nb = spec.geom.n_branches();

    nlohmann::json j;
    j["config"] = config_echo(c);
    if (c.combined) {
        const frl::CouplingWeights cw = make_couplings(c, nb);
        const frl::LocalTimeEstimate est =
            frl::combined_local_time(ens, cw, c.eps, c.threads);
        j["estimate"] = frl::estimate_to_json(est, spec, "combined_local_time");
    } else {
        const frl::LocalTimeEstimate est =
            frl::cross_local_time(ens, c.branch_k, c.branch_l, c.eps, c.threads);
        j["estimate"] = frl::estimate_to_json(est, spec, "cross_local_time");
        j["expected"] = {
            {"cross_lattice", frl::expected_cross_discrete(
                                  spec, ens.grid(), c.branch_k, c.branch_l, c.eps)},
            {"cross_continuum", frl::expected_cross_analytic(
                                    spec, c.branch_k, c.branch_l, c.eps)}};
    }
    emit_json(c, j);
    return 0;
}

nlohmann::json obs_json(const frl::ObservableStats& s) {
    return {{"raw", s.raw},
            {"raw_std_error", s.raw_std_error},
            {"reweighted", s.reweighted},
            {"std_error", s.std_error},
            {"low_ess_warning", s.low_ess_warning}};
}

int run_edwards(const RunConfig& c) {
    const frl::PathEnsemble ens = load_input(c);
    const frl::KernelSpec& spec = ens.spec();
    const bool star = ens.grid().kind == frl::GridKind::Star;
    if (star && c.centered)
        throw ValidationError("centering is defined for loop ensembles");

    frl::LocalTimeEstimate est;
    frl::EdwardsEstimate ew;
    if (star) {
        const frl::CouplingWeights cw = make_couplings(c, spec.geom.n_branches());
        est = frl::combined_local_time(ens, cw, c.eps, c.threads);
        ew = frl::edwards_weights_star(est, cw, c.g);
    } else {
        est = frl::local_time_ensemble(ens, c.eps);
        if (c.centered) est = frl::center(est, spec);
        ew = frl::edwards_weights(est, c.g);
    }
    ew.observables[c.observable] =
        frl::reweighted_observable(ens, ew, c.observable);

    nlohmann::json obs;
    for (const auto& [name, st] : ew.observables) obs[name] = obs_json(st);
    nlohmann::json j;
    j["config"] = config_echo(c);
    j["kernel"] = frl::kernel_spec_to_json(spec);
    j["edwards"] = {{"g", ew.g},
                    {"normalizer", ew.normalizer},
                    {"normalizer_std_error", ew.normalizer_std_error},
                    {"ess", ew.ess},
                    {"max_exponent", ew.max_exponent},
                    {"observables", obs}};
    if (!c.g_grid.empty()) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& row : frl::stability_scan(est, c.g_grid, 0.01))
            rows.push_back({{"g", row.g},
                            {"finite", row.finite},
                            {"ess", row.ess},
                            {"stable", row.stable}});
        j["stability_scan"] = rows;
    }
    emit_json(c, j);
    return 0;
}

frl::ExperimentReport dispatch_verify(const RunConfig& c) {
    frl::VerifyOptions opt;
    opt.seed = c.seed;
    opt.threads = c.threads;
    const std::string& e = c.experiment;
    if (e == "pd") {
        return frl::verify_pd_boundary(c.T, c.N, c.H);
    } else if (e == "kernel") {
        return frl::verify_kernel_identity(make_spec(c), c.n_pairs, opt);
    } else if (e == "sampler") {
        return frl::verify_sampler_moments(scalar_H(c), c.d, c.T, scalar_N(c),
                                           c.n, opt);
    } else if (e == "meanlt") {
        const std::vector<double> lad =
            c.eps_ladder.empty() ? std::vector<double>{4e-3, 1e-3, 2.5e-4}
                                 : c.eps_ladder;
        return frl::verify_mean_local_time(scalar_H(c), c.d, c.T, scalar_N(c),
                                           c.n, lad, opt);
    } else if (e == "logdiv") {
        const std::vector<double> lad =
            c.eps_ladder.empty()
                ? std::vector<double>{1e-2, 3.1622776601683794e-3, 1e-3,
                                      3.1622776601683794e-4, 1e-4,
                                      3.1622776601683795e-5, 1e-5}
                : c.eps_ladder;
        return frl::verify_log_divergence(c.d, c.T, scalar_N(c), lad);
    } else if (e == "rate") {
        const std::vector<double> lad =
            c.eps_ladder.empty() ? std::vector<double>{1e-2, 2.5e-3, 6.25e-4}
                                 : c.eps_ladder;
        return frl::verify_rate_half(scalar_H(c), c.d, c.T, scalar_N(c), c.n,
                                     c.delta >= 0.0 ? c.delta : 0.1, lad, opt);
    } else if (e == "lnd") {
        std::vector<std::vector<double>> sets;
        for (int m : c.sizes) {
            if (m < 2) throw ValidationError("time sets need at least two points");
            std::vector<double> times(static_cast<std::size_t>(m));
            for (int i = 1; i <= m; ++i)
                times[static_cast<std::size_t>(i - 1)] =
                    static_cast<double>(i) * c.T / (m + 1);
            sets.push_back(std::move(times));
        }
        return frl::verify_lnd(make_spec(c), sets);
    } else if (e == "star") {
        return frl::verify_star_independence(scalar_H(c), c.d, c.lengths, c.n,
                                             opt);
    } else if (e == "moment2") {
        return frl::verify_second_moment(scalar_H(c), c.d, c.T, c.eps,
                                         c.delta >= 0.0 ? c.delta : 0.25, c.n,
                                         opt);
    } else if (e == "edwards") {
        return frl::verify_edwards(scalar_H(c), c.d, c.T, scalar_N(c), c.n,
                                   c.eps, c.g_grid, opt);
    } else if (e == "repro") {
        return frl::verify_reproducibility(opt);
    }
    throw ValidationError("unknown verify experiment: " + e);
}

int run_verify(const RunConfig& c) {
    if (c.experiment.empty())
        throw ValidationError(
            "verify needs an experiment: pd, kernel, sampler, meanlt, logdiv, "
            "rate, lnd, star, moment2, edwards, repro");
    frl::ExperimentReport rep = dispatch_verify(c);
    nlohmann::json j = rep.to_json();
    j["config"] = config_echo(c);
    if (!c.out_path.empty()) frl::write_json(c.out_path, j);
    if (!c.summary_path.empty()) frl::write_summary_csv({rep}, c.summary_path);
    std::printf("%s: %s (%zu checks, %.1f s)\n", rep.name.c_str(),
                rep.pass() ? "PASS" : "FAIL", rep.checks.size(),
                rep.runtime_seconds);
    for (const auto& ck : rep.checks)
        if (!ck.pass)
            std::printf("  FAIL %s: measured %.10g, expected %s %.10g (tol %g)\n",
                        ck.name.c_str(), ck.measured, ck.comparison.c_str(),
                        ck.expected, ck.tolerance);
    if (c.out_path.empty() && c.summary_path.empty())
        std::printf("%s\n", j.dump(2).c_str());
    return rep.pass() ? 0 : 3;
}

int run(int argc, char** argv) {
    RunConfig cfg;
    cfg.threads = env_threads();
    const std::string config_path = find_config_path(argc, argv);
    if (!config_path.empty()) apply_config(cfg, load_config_file(config_path));

    CLI::App app{"loop and starburst path simulation toolkit"};
    app.require_subcommand(1);
    std::string config_sink;  // value already merged; option consumes the flag

    auto add_common = [&](CLI::App* sc) {
        sc->add_option("--config", config_sink,
                       "JSON config file; explicit flags take precedence");
        sc->add_option("--threads", cfg.threads, "worker thread count");
        sc->add_option("--seed", cfg.seed, "master seed");
    };
    auto add_kernel = [&](CLI::App* sc) {
        sc->add_option("--geometry", cfg.geometry, "circle | star");
        sc->add_option("--T", cfg.T, "loop circumference");
        sc->add_option("--lengths", cfg.lengths, "star branch lengths")
            ->delimiter(',');
        sc->add_option("--H", cfg.H, "Hurst index (comma list where supported)")
            ->delimiter(',');
        sc->add_option("--d", cfg.d, "ambient dimension");
        sc->add_option("--N", cfg.N, "grid points (per branch for stars)")
            ->delimiter(',');
    };

    CLI::App* sample = app.add_subcommand("sample", "draw an ensemble of paths");
    add_common(sample);
    add_kernel(sample);
    sample->add_option("--n", cfg.n, "number of sample paths");
    sample->add_option("--sampler", cfg.sampler, "auto | circulant | dense");
    sample->add_option("--format", cfg.format, "binary | csv");
    sample->add_option("--out", cfg.out_path, "output file");

    CLI::App* loctime =
        app.add_subcommand("loctime", "self-intersection time of an ensemble");
    add_common(loctime);
    add_kernel(loctime);
    loctime->add_option("--in", cfg.in_path, "ensemble file (.frlp or .csv)");
    loctime->add_option("--eps", cfg.eps, "mollifier width");
    loctime->add_option("--delta", cfg.delta, "geodesic separation cutoff");
    loctime->add_flag("--centered", cfg.centered, "subtract the exact mean");
    loctime->add_option("--out", cfg.out_path, "output JSON (default stdout)");

    CLI::App* moments =
        app.add_subcommand("moments", "first and second moments vs expectations");
    add_common(moments);
    add_kernel(moments);
    moments->add_option("--in", cfg.in_path, "ensemble file (.frlp or .csv)");
    moments->add_option("--eps", cfg.eps, "mollifier width");
    moments->add_option("--delta", cfg.delta, "separation cutoff (default T/2)");
    moments->add_option("--out", cfg.out_path, "output JSON (default stdout)");

    CLI::App* star =
        app.add_subcommand("star", "cross-branch or combined intersection time");
    add_common(star);
    add_kernel(star);
    star->add_option("--in", cfg.in_path, "star ensemble file");
    star->add_option("--eps", cfg.eps, "mollifier width");
    star->add_option("--k", cfg.branch_k, "first branch");
    star->add_option("--l", cfg.branch_l, "second branch");
    star->add_flag("--combined", cfg.combined, "weighted sum over all pairs");
    star->add_option("--g-self", cfg.g_self, "per-branch self couplings")
        ->delimiter(',');
    star->add_option("--g-cross", cfg.g_cross, "uniform cross coupling");
    star->add_option("--out", cfg.out_path, "output JSON (default stdout)");

    CLI::App* edwards =
        app.add_subcommand("edwards", "polymer reweighting of an ensemble");
    add_common(edwards);
    add_kernel(edwards);
    edwards->add_option("--in", cfg.in_path, "ensemble file");
    edwards->add_option("--eps", cfg.eps, "mollifier width");
    edwards->add_option("--g", cfg.g, "coupling strength");
    edwards->add_flag("--centered", cfg.centered, "use the centered estimator");
    edwards->add_option("--observable", cfg.observable,
                        "gyration | antipodal | branch_end_<k>");
    edwards->add_option("--g-grid", cfg.g_grid, "couplings for the stability scan")
        ->delimiter(',');
    edwards->add_option("--g-self", cfg.g_self, "per-branch self couplings")
        ->delimiter(',');
    edwards->add_option("--g-cross", cfg.g_cross, "uniform cross coupling");
    edwards->add_option("--out", cfg.out_path, "output JSON (default stdout)");

    CLI::App* verify =
        app.add_subcommand("verify", "run a verification experiment");
    add_common(verify);
    add_kernel(verify);
    verify->add_option("experiment", cfg.experiment,
                       "pd | kernel | sampler | meanlt | logdiv | rate | lnd | "
                       "star | moment2 | edwards | repro");
    verify->add_option("--n", cfg.n, "number of sample paths");
    verify->add_option("--n-pairs", cfg.n_pairs, "point pairs for kernel checks");
    verify->add_option("--eps", cfg.eps, "mollifier width");
    verify->add_option("--eps-ladder", cfg.eps_ladder, "mollifier ladder")
        ->delimiter(',');
    verify->add_option("--delta", cfg.delta, "geodesic separation cutoff");
    verify->add_option("--g-grid", cfg.g_grid, "couplings for the stability scan")
        ->delimiter(',');
    verify->add_option("--sizes", cfg.sizes, "time-set sizes for lnd")
        ->delimiter(',');
    verify->add_option("--out", cfg.out_path, "report JSON path");
    verify->add_option("--summary", cfg.summary_path, "summary CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "error: %s\n\n%s", e.what(), app.help().c_str());
        return 1;
    }

    if (sample->parsed()) { cfg.subcommand = "sample"; return run_sample(cfg); }
    if (loctime->parsed()) { cfg.subcommand = "loctime"; return run_loctime(cfg); }
    if (moments->parsed()) { cfg.subcommand = "moments"; return run_moments(cfg); }
    if (star->parsed()) { cfg.subcommand = "star"; return run_star(cfg); }
    if (edwards->parsed()) { cfg.subcommand = "edwards"; return run_edwards(cfg); }
    if (verify->parsed()) { cfg.subcommand = "verify"; return run_verify(cfg); }
    throw ValidationError("no subcommand given");
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
