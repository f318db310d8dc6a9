// SPDX-License-Identifier: MIT
//
// Experiment configuration, artifact output with a hashed manifest, and the
// runners behind each CLI subcommand.
#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wnkpz/acceptance.hpp"
#include "wnkpz/bridge_mc.hpp"
#include "wnkpz/error.hpp"
#include "wnkpz/io.hpp"
#include "wnkpz/rearrangement.hpp"
#include "wnkpz/spectral.hpp"
#include "wnkpz/variational.hpp"

namespace wnkpz {

inline constexpr const char* kVersion = "0.1.0";

struct ExperimentConfig {
    std::string subcommand;
    double half_width = 20.0;
    double dx = 0.05;
    double dt = 0.01;
    double t0 = 1e-3;
    std::vector<double> lambdas{4.0, 8.0, 16.0};
    double lambda = 8.0;
    double delta = 0.5;
    double zeta = 0.0;  // 0 keeps the default certificate ladder
    double t = 1.0;
    double x = 1.0;
    double duration = 2.0;
    std::string backend = "pde";
    std::string phi = "sech2";
    std::size_t n_paths = 2000;
    std::size_t bins = 200;
    std::uint64_t seed = 20240607;
    std::string out_dir = "wnkpz-out";
    bool csv = true;
    bool json = true;
    std::vector<int> criteria{1, 2, 3, 4, 5, 6, 7, 8, 9};

    void validate() const {
        auto positive = [](double v, const char* field) {
            if (!(v > 0.0)) throw ConfigError(std::string("config: ") + field + " must be positive");
        };
        positive(half_width, "half_width");
        positive(dx, "dx");
        positive(dt, "dt");
        positive(t0, "t0");
        positive(lambda, "lambda");
        positive(delta, "delta");
        positive(t, "t");
        positive(duration, "duration");
        if (zeta < 0.0) throw ConfigError("config: zeta must not be negative");
        if (n_paths < 1) throw ConfigError("config: n_paths must be positive");
        if (bins < 1) throw ConfigError("config: bins must be positive");
        for (double l : lambdas) positive(l, "lambdas");
        if (subcommand == "tail-law" && lambdas.empty()) throw ConfigError("config: lambdas must not be empty");
        if (backend != "pde" && backend != "mc") throw ConfigError("config: backend must be pde or mc");
        if (phi != "sech2" && phi != "zero") throw ConfigError("config: phi must be sech2 or zero");
        for (int c : criteria) {
            if (c < 1 || c > 9) throw ConfigError("config: criteria entries must lie in 1..9");
        }
        if (out_dir.empty()) throw ConfigError("config: out_dir must not be empty");
    }

    [[nodiscard]] nlohmann::json to_json() const {
        return {{"subcommand", subcommand}, {"half_width", half_width}, {"dx", dx},       {"dt", dt},
                {"t0", t0},                 {"lambdas", lambdas},       {"lambda", lambda}, {"delta", delta},
                {"zeta", zeta},             {"t", t},                   {"x", x},           {"duration", duration},
                {"backend", backend},       {"phi", phi},               {"n_paths", n_paths}, {"bins", bins},
                {"seed", seed},             {"out_dir", out_dir},       {"csv", csv},       {"json", json},
                {"criteria", criteria}};
    }

    /// Fields present in j override this config; unknown keys are rejected.
    void merge(const nlohmann::json& j) {
        if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
        for (const auto& [key, v] : j.items()) {
            try {
                if (key == "subcommand") subcommand = v.get<std::string>();
                else if (key == "half_width") half_width = v.get<double>();
                else if (key == "dx") dx = v.get<double>();
                else if (key == "dt") dt = v.get<double>();
                else if (key == "t0") t0 = v.get<double>();
                else if (key == "lambdas") lambdas = v.get<std::vector<double>>();
                else if (key == "lambda") lambda = v.get<double>();
                else if (key == "delta") delta = v.get<double>();
                else if (key == "zeta") zeta = v.get<double>();
                else if (key == "t") t = v.get<double>();
                else if (key == "x") x = v.get<double>();
                else if (key == "duration") duration = v.get<double>();
                else if (key == "backend") backend = v.get<std::string>();
                else if (key == "phi") phi = v.get<std::string>();
                else if (key == "n_paths") n_paths = v.get<std::size_t>();
                else if (key == "bins") bins = v.get<std::size_t>();
                else if (key == "seed") seed = v.get<std::uint64_t>();
                else if (key == "out_dir") out_dir = v.get<std::string>();
                else if (key == "csv") csv = v.get<bool>();
                else if (key == "json") json = v.get<bool>();
                else if (key == "criteria") criteria = v.get<std::vector<int>>();
                else throw ConfigError("config: unknown field " + key);
            } catch (const nlohmann::json::exception&) {
                throw ConfigError("config: field " + key + " has the wrong type");
            }
        }
    }

    [[nodiscard]] SolverConfig solver() const {
        SolverConfig s;
        s.delta_warmup = t0;
        return s;
    }
};

/// Writes files under one directory and records them for the manifest.
class ArtifactSink {
public:
    explicit ArtifactSink(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

    void write(const std::string& name, const std::string& content) {
        std::ofstream out(dir_ / name, std::ios::binary);
        if (!out) throw ConfigError("cannot write " + (dir_ / name).string());
        out << content;
        files_.push_back({{"name", name}, {"bytes", content.size()}, {"fnv1a64", fnv1a_hex(content)}});
    }

    void write_manifest(const ExperimentConfig& cfg, bool passed) {
        nlohmann::json m{{"version", kVersion},
                         {"subcommand", cfg.subcommand},
                         {"config", cfg.to_json()},
                         {"seeds", {cfg.seed}},
                         {"passed", passed},
                         {"files", files_}};
        std::ofstream out(dir_ / "manifest.json", std::ios::binary);
        out << m.dump(2) << '\n';
    }

    [[nodiscard]] const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    nlohmann::json files_ = nlohmann::json::array();
};

namespace detail {

inline std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

/// Rounded to 12 significant digits; non-finite values become null.
inline nlohmann::json num(double v) {
    if (!std::isfinite(v)) return nullptr;
    const auto s = format_number(v);
    double r = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), r);
    return r;
}

inline RateOptions rate_options(const ExperimentConfig& cfg) {
    RateOptions o;
    o.half_width = cfg.half_width;
    o.dx = cfg.dx;
    o.dt = cfg.dt;
    o.solver = cfg.solver();
    if (cfg.zeta > 0.0) o.zetas = {cfg.zeta};
    return o;
}

}  // namespace detail

// ---------------------------------------------------------------------------

/// h_star at t = 0.5, 1, 1.5 on x in [-3, 3] with step 0.01.
inline int run_figure1(const ExperimentConfig& cfg, ArtifactSink& sink) {
    std::ostringstream os;
    CsvWriter w(os);
    w.header("x", "h_star_t0.5", "h_star_t1", "h_star_t1.5");
    for (int j = 0; j <= 600; ++j) {
        const double x = static_cast<double>(j - 300) / 100.0;
        w.row(x, h_star(0.5, x), h_star(1.0, x), h_star(1.5, x));
    }
    if (cfg.csv) sink.write("figure1.csv", os.str());
    if (cfg.json) sink.write("figure1.json", detail::dump({{"h_star(1,0)", detail::num(h_star(1.0, 0.0))}}));
    return 0;
}

inline int run_spectral(const ExperimentConfig& cfg, ArtifactSink& sink) {
    const auto sg = SpaceGrid::with_spacing(cfg.half_width, cfg.dx);
    const auto phi = rho_star(sg);
    const auto gs = ground_state(phi);
    const auto sech = Potential::sample(sg, [](double x) { return 1.0 / std::cosh(x); });
    nlohmann::json j{{"half_width", detail::num(cfg.half_width)},
                     {"dx", detail::num(cfg.dx)},
                     {"F_sech2", detail::num(gs.value)},
                     {"potbd_bound_sech2", detail::num(potbd_bound(phi))},
                     {"gns_ratio_sech", detail::num(gns_ratio(sech))},
                     {"gns_sharp", detail::num(std::pow(3.0, -0.125))},
                     {"sech2_norm_sq", detail::num(inner(phi, phi))},
                     {"r_star_norm", detail::num(l2_norm_space(r_star(sg)))}};
    for (double alpha : {0.5, 2.0}) {
        const auto scaled = Potential::sample(sg, [alpha](double x) { return alpha * alpha * detail::sech2(alpha * x); });
        j["F_scaled_alpha" + format_number(alpha)] = detail::num(ground_state(scaled).value);
    }
    const auto sp = stability_probe(phi);
    j["stability_defect"] = detail::num(sp.defect);
    j["stability_distance"] = detail::num(sp.distance);
    if (cfg.json) sink.write("spectral.json", detail::dump(j));
    if (cfg.csv) {
        std::ostringstream os;
        CsvWriter w(os);
        w.header("x", "phi", "ground_state");
        for (std::size_t i = 0; i < sg.size(); ++i) w.row(sg.x(i), phi[i], gs.eigenfunction[i]);
        sink.write("spectral_ground_state.csv", os.str());
    }
    return 0;
}

inline int run_rearrange_check(const ExperimentConfig& cfg, ArtifactSink& sink) {
    const auto sg = SpaceGrid::with_spacing(8.0, cfg.dx);
    RandomStream rng(cfg.seed, 5);
    std::ostringstream os;
    CsvWriter w(os);
    w.header("suite", "trial", "lhs", "rhs", "holds");
    bool all = true;
    std::map<std::string, int> failures;
    auto record = [&](const char* suite, int k, double lhs, double rhs, bool ok) {
        w.row(suite, k, lhs, rhs, ok ? 1 : 0);
        all = all && ok;
        if (!ok) ++failures[suite];
    };
    for (int k = 0; k < 200; ++k) {
        const auto f = detail::random_compact(sg, rng, 4.0);
        const auto g = detail::random_compact(sg, rng, 4.0);
        const auto fs = sym_decr_rearrange(f);
        record("norm", k, l2_norm_space(f), l2_norm_space(fs), std::abs(l2_norm_space(f) - l2_norm_space(fs)) <= 1e-10);
        const auto fss = sym_decr_rearrange(fs);
        const bool same = std::equal(fs.values().begin(), fs.values().end(), fss.values().begin());
        record("idempotent", k, 0.0, 0.0, same);
        const auto s = hardy_littlewood_check(f, g);
        record("hardy_littlewood", k, s.lhs, s.rhs, s.lhs <= s.rhs + 1e-9);
    }
    for (int k = 0; k < 50; ++k) {
        const std::array<Potential, 3> f{detail::random_compact(sg, rng, 4.0), detail::random_compact(sg, rng, 4.0),
                                         detail::random_compact(sg, rng, 4.0)};
        std::array<std::array<double, 2>, 3> a{{{1.0, 0.0}, {0.0, 1.0}, {1.0, -1.0}}};
        if (k % 2 == 1) {
            for (auto& r : a) r = {3.0 * rng.uniform() - 1.5, 3.0 * rng.uniform() - 1.5};
        }
        const auto s = bll_check(f, a);
        record("bll", k, s.lhs, s.rhs, s.lhs <= s.rhs + 1e-8 * (1.0 + s.rhs));
    }
    const auto ssg = SpaceGrid::with_spacing(10.0, cfg.dx);
    const auto tg = TimeGrid::with_step(0.0, 2.0, cfg.dt);
    for (int k = 0; k < 50; ++k) {
        const auto s = steiner_increases_Z(detail::random_deviation(tg, ssg, rng, 1.0), cfg.solver());
        record("steiner", k, s.lhs, s.rhs, s.lhs <= s.rhs * (1.0 + 1e-4));
    }
    if (cfg.csv) sink.write("rearrange_check.csv", os.str());
    nlohmann::json j{{"passed", all}, {"failures", failures}};
    if (cfg.json) sink.write("rearrange_check.json", detail::dump(j));
    return all ? 0 : 1;
}

inline nlohmann::json report_json(const RateReport& r) {
    const double l32 = std::pow(r.lambda, 1.5);
    return {{"lambda", detail::num(r.lambda)},
            {"phi_hat", detail::num(r.phi_hat)},
            {"phi_hat_over_lambda_3_2", detail::num(r.phi_hat / l32)},
            {"constraint_residual", detail::num(r.constraint_residual)},
            {"iterations", r.iterations},
            {"upper_certificate", detail::num(r.upper_certificate)},
            {"upper_certificate_over_lambda_3_2", detail::num(r.upper_certificate / l32)},
            {"certificate_zeta", detail::num(r.certificate_zeta)},
            {"minimizer_distance", detail::num(minimizer_distance(r))},
            {"converged", r.converged}};
}

inline int run_rate(const ExperimentConfig& cfg, ArtifactSink& sink) {
    const auto r = rate_phi(cfg.lambda, detail::rate_options(cfg));
    if (cfg.json) sink.write("rate.json", detail::dump(report_json(r)));
    if (cfg.csv) {
        std::ostringstream os;
        CsvWriter w(os);
        w.header("t", "x", "rho");
        const auto& m = r.minimizer;
        const auto stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.1 / m.tgrid().dt())));
        for (std::size_t k = 0; k < m.rows(); k += stride) {
            for (std::size_t i = 0; i < m.sgrid().size(); ++i) w.row(m.tgrid().t(k), m.sgrid().x(i), m(k, i));
        }
        sink.write("rate_minimizer.csv", os.str());
        std::ostringstream tr;
        CsvWriter wt(tr);
        wt.header("iteration", "cost", "residual", "stationarity", "multiplier");
        for (const auto& it : r.trace) wt.row(it.iteration, it.cost, it.residual, it.stationarity, it.multiplier);
        sink.write("rate_trace.csv", tr.str());
    }
    return r.converged ? 0 : 1;
}

inline std::string tail_law_csv(const TailLawTable& t) {
    std::ostringstream os;
    CsvWriter w(os);
    w.header("lambda", "phi_hat", "ratio", "ratio_half_init", "certificate_ratio", "certificate_zeta",
             "minimizer_distance", "constraint_residual", "iterations", "converged", "flagged");
    for (const auto& r : t.rows) {
        w.row(r.lambda, r.phi_hat, r.ratio, r.ratio_half_init, r.certificate_ratio, r.certificate_zeta,
              r.minimizer_distance, r.constraint_residual, r.iterations, r.converged ? 1 : 0, r.flagged ? 1 : 0);
    }
    return os.str();
}

inline int run_tail_law(const ExperimentConfig& cfg, ArtifactSink& sink) {
    const auto t = tail_law(cfg.lambdas, detail::rate_options(cfg));
    const bool trend = t.rows.size() < 2 || (t.non_increasing && t.distance_non_increasing);
    const bool flagged = std::any_of(t.rows.begin(), t.rows.end(), [](const TailLawRow& r) { return r.flagged; });
    if (cfg.csv) sink.write("tail_law.csv", tail_law_csv(t));
    nlohmann::json j{{"rows", t.rows.size()},
                     {"all_converged", t.all_converged()},
                     {"inits_agree", t.inits_agree},
                     {"bracketed", t.bracketed},
                     {"ratio_non_increasing", t.non_increasing},
                     {"distance_non_increasing", t.distance_non_increasing},
                     {"trend_checked", t.rows.size() >= 2},
                     {"passed", trend && !flagged}};
    if (cfg.json) sink.write("tail_law.json", detail::dump(j));
    return trend && !flagged ? 0 : 1;
}

inline int run_limit_shape(const ExperimentConfig& cfg, ArtifactSink& sink) {
    ShapeOptions o;
    o.dx = cfg.dx;
    o.dt = cfg.dt;
    o.solver = cfg.solver();
    o.mc_paths = cfg.n_paths;
    o.seed = cfg.seed;
    const auto backend = cfg.backend == "mc" ? ShapeBackend::mc : ShapeBackend::pde;
    const auto p = shape_profile(cfg.lambda, cfg.delta, backend, o);
    if (cfg.csv) {
        std::ostringstream os;
        CsvWriter w(os);
        if (backend == ShapeBackend::mc) w.header("t", "x", "h_lambda", "h_star", "abs_err", "std_error");
        else w.header("t", "x", "h_lambda", "h_star", "abs_err");
        for (std::size_t it = 0; it < p.ts.size(); ++it) {
            for (std::size_t j = 0; j < p.xs.size(); ++j) {
                const double hs = h_star(p.ts[it], p.xs[j]);
                const double v = p.at(it, j);
                if (backend == ShapeBackend::mc) {
                    w.row(p.ts[it], p.xs[j], v, hs, std::abs(v - hs), p.std_errors[it * p.xs.size() + j]);
                } else {
                    w.row(p.ts[it], p.xs[j], v, hs, std::abs(v - hs));
                }
            }
        }
        sink.write("limit_shape.csv", os.str());
    }
    nlohmann::json j{{"lambda", detail::num(p.lambda)},
                     {"delta", detail::num(p.delta)},
                     {"backend", cfg.backend},
                     {"n_t", p.ts.size()},
                     {"n_x", p.xs.size()},
                     {"sup_error", detail::num(p.sup_error)}};
    if (cfg.json) sink.write("limit_shape.json", detail::dump(j));
    return 0;
}

inline int run_hitting_time(const ExperimentConfig& cfg, ArtifactSink& sink) {
    if (cfg.x == 0.0) throw ConfigError("config: x must be non-zero for hitting-time");
    const std::size_t steps = cfg.bins * std::max<std::size_t>(1, (400 + cfg.bins - 1) / cfg.bins);
    const auto h = compare_hitting(cfg.t, cfg.x, cfg.lambda, cfg.n_paths, cfg.bins, steps, cfg.seed);
    const double T = cfg.lambda * cfg.t;
    if (cfg.csv) {
        std::ostringstream d;
        CsvWriter wd(d);
        wd.header("s", "density");
        for (int k = 1; k < 400; ++k) {
            const double s = T * k / 400.0;
            wd.row(s, hitting_density(s, cfg.t, cfg.x, cfg.lambda));
        }
        sink.write("hitting_density.csv", d.str());
        std::ostringstream hs;
        CsvWriter wh(hs);
        wh.header("bin_lo", "bin_hi", "frequency", "expected");
        for (std::size_t b = 0; b < cfg.bins; ++b) {
            wh.row(T * static_cast<double>(b) / static_cast<double>(cfg.bins),
                   T * static_cast<double>(b + 1) / static_cast<double>(cfg.bins), h.observed[b], h.expected[b]);
        }
        sink.write("hitting_histogram.csv", hs.str());
    }
    nlohmann::json j{{"normalization", detail::num(h.normalization)},
                     {"worst_z", detail::num(h.worst_z)},
                     {"n_paths", cfg.n_paths},
                     {"bins", cfg.bins},
                     {"time_steps", steps}};
    if (cfg.json) sink.write("hitting_time.json", detail::dump(j));
    return 0;
}

inline int run_fk(const ExperimentConfig& cfg, ArtifactSink& sink) {
    const auto sg = SpaceGrid::with_spacing(cfg.half_width, cfg.dx);
    const auto phi = cfg.phi == "zero" ? Potential::zero(sg) : rho_star(sg);
    const auto est = fk_estimate(phi, cfg.duration, 0.0, 0.0, BridgeConfig::for_duration(cfg.n_paths, cfg.duration, cfg.seed));
    const auto tg = TimeGrid::with_step(0.0, cfg.duration, cfg.dt);
    const double pde = log_terminal_value(SpaceTimeDeviation::constant_in_time(tg, phi), 0.0, cfg.solver());
    nlohmann::json j{{"phi", cfg.phi},
                     {"duration", detail::num(cfg.duration)},
                     {"mean", detail::num(est.mean)},
                     {"std_error", detail::num(est.std_error)},
                     {"log_mean", detail::num(est.log_mean)},
                     {"ess", detail::num(est.ess)},
                     {"pde_log_value", detail::num(pde)}};
    if (cfg.json) sink.write("fk.json", detail::dump(j));
    return 0;
}

// ---------------------------------------------------------------------------

inline CriterionResult evaluate_criterion(int id, const ExperimentConfig& cfg);

inline int run_selftest(const ExperimentConfig& cfg, ArtifactSink& sink) {
    std::ostringstream os;
    CsvWriter w(os);
    w.header("id", "name", "passed", "detail");
    nlohmann::json timing = nlohmann::json::array();
    bool all = true;
    for (int id : cfg.criteria) {
        const auto r = evaluate_criterion(id, cfg);
        w.row(r.id, r.name, r.passed ? 1 : 0, "\"" + r.detail + "\"");
        timing.push_back({{"id", r.id}, {"passed", r.passed}, {"seconds", r.seconds}});
        all = all && r.passed;
    }
    if (cfg.csv) sink.write("selftest.csv", os.str());
    if (cfg.json) sink.write("selftest.json", detail::dump({{"passed", all}, {"criteria", timing}}));
    return all ? 0 : 1;
}

/// Every *.csv in a directory, by name.
inline std::map<std::string, std::string> csv_bodies(const std::filesystem::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.path().extension() == ".csv") out[e.path().filename().string()] = read_file(e.path().string());
    }
    return out;
}

/// Two selftest runs over a quick subset with the same config.
inline CriterionResult criterion_reproducibility(const ExperimentConfig& base) {
    const auto start = detail::Clock::now();
    Checklist c;
    ExperimentConfig cfg = base;
    cfg.subcommand = "selftest";
    cfg.criteria = {1, 2};
    cfg.csv = true;
    const auto root = std::filesystem::temp_directory_path() /
                      ("wnkpz-repro-" + std::to_string(detail::Clock::now().time_since_epoch().count()));
    std::array<std::map<std::string, std::string>, 2> bodies;
    std::array<int, 2> codes{};
    for (int run = 0; run < 2; ++run) {
        ArtifactSink sink(root / ("run" + std::to_string(run)));
        codes[run] = run_selftest(cfg, sink);
        sink.write_manifest(cfg, codes[run] == 0);
        bodies[run] = csv_bodies(sink.dir());
    }
    std::filesystem::remove_all(root);
    c.check("exit_code_sum", codes[0] == 0 && codes[1] == 0, static_cast<double>(codes[0] + codes[1]), "want 0");
    c.check("csv_files", !bodies[0].empty() && bodies[0].size() == bodies[1].size(), static_cast<double>(bodies[0].size()));
    c.check("csv_bodies_identical", bodies[0] == bodies[1], bodies[0] == bodies[1] ? 1.0 : 0.0);
    return detail::finish(9, "reproducibility", c, start, 120.0);
}

inline CriterionResult evaluate_criterion(int id, const ExperimentConfig& cfg) {
    switch (id) {
        case 1: return criterion_constants();
        case 2: return criterion_spectral(cfg.seed);
        case 3: return criterion_solver(cfg.seed);
        case 4: return criterion_operator_norm(cfg.seed);
        case 5: return criterion_rearrangement(cfg.seed);
        case 6: return criterion_tail_law();
        case 7: return criterion_limit_shape();
        case 8: return criterion_bridge(cfg.seed);
        case 9: return criterion_reproducibility(cfg);
        default: throw ConfigError("unknown criterion " + std::to_string(id));
    }
}

/// Validates, runs the subcommand, writes the manifest. Nothing is written
/// when validation fails.
inline int run(const ExperimentConfig& cfg) {
    cfg.validate();
    using Runner = int (*)(const ExperimentConfig&, ArtifactSink&);
    static const std::map<std::string, Runner> runners{
        {"figure1", run_figure1},         {"spectral", run_spectral},   {"rearrange-check", run_rearrange_check},
        {"rate", run_rate},               {"tail-law", run_tail_law},   {"limit-shape", run_limit_shape},
        {"hitting-time", run_hitting_time}, {"fk", run_fk},            {"selftest", run_selftest}};
    const auto it = runners.find(cfg.subcommand);
    if (it == runners.end()) throw ConfigError("config: unknown subcommand '" + cfg.subcommand + "'");
    if (cfg.subcommand == "tail-law") {
        for (double l : cfg.lambdas) {
            if (!(l >= 4.0 && l <= 16.0)) throw ConfigError("config: lambdas must lie in [4, 16] for tail-law");
        }
        if (!std::is_sorted(cfg.lambdas.begin(), cfg.lambdas.end())) {
            throw ConfigError("config: lambdas must be ascending for tail-law");
        }
    }
    ArtifactSink sink(std::filesystem::path(cfg.out_dir) / cfg.subcommand);
    const int code = it->second(cfg, sink);
    sink.write_manifest(cfg, code == 0);
    return code;
}

}  // namespace wnkpz
