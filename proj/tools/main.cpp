// Command-line surface: census runs, statistical verification, and
// flow-box closing experiments over a configured matrix group.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cyl/census.hpp"
#include "cyl/closing.hpp"
#include "cyl/cone.hpp"
#include "cyl/equidist.hpp"
#include "cyl/errors.hpp"
#include "cyl/group.hpp"
#include "cyl/invariants.hpp"
#include "cyl/stats.hpp"

using nlohmann::json;
using namespace cyl;

namespace {

constexpr const char* kToolVersion = "0.1.0";
constexpr double kTwoPi = 6.28318530717958647692;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void spill(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write file: " + path);
    out << content;
    if (!out) throw ConfigError("write failed: " + path);
}

// inline JSON or @file reference
json parse_spec_arg(const std::string& arg) {
    std::string text = arg;
    if (!arg.empty() && arg[0] == '@') text = slurp(arg.substr(1));
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError("spec argument is not valid JSON: " + std::string(e.what()));
    }
}

LinearForm psi_from_spec(const GroupSpec& spec, const std::string& arg) {
    json doc = parse_spec_arg(arg);
    if (doc.contains("kind") && doc["kind"] == "simple-root")
        return simple_root_form(spec, doc.value("factor", 0), doc.value("index", 0));
    if (!doc.contains("coefficients"))
        throw ConfigError("psi spec needs 'coefficients' or kind 'simple-root'");
    LinearForm f;
    for (const json& v : doc["coefficients"]) f.coefficients.push_back(v.get<double>());
    if (static_cast<int>(f.coefficients.size()) != spec.ambient_dim())
        throw ConfigError("psi spec: expected " + std::to_string(spec.ambient_dim()) +
                          " coefficients");
    return f;
}

NamedNorm norm_from_spec(const GroupSpec& spec, const std::string& arg, int ordinal) {
    json doc = parse_spec_arg(arg);
    std::string kind = doc.value("kind", "lp");
    NamedNorm nn;
    nn.name = doc.value("name", kind + "_" + std::to_string(ordinal));
    int dim = spec.ambient_dim();
    if (kind == "lp") {
        nn.norm = lp_norm(doc.value("p", 2.0), dim);
    } else if (kind == "weighted-euclidean") {
        std::vector<double> w;
        for (const json& v : doc.at("weights")) w.push_back(v.get<double>());
        if (static_cast<int>(w.size()) != dim)
            throw ConfigError("norm spec: expected " + std::to_string(dim) + " weights");
        nn.norm = weighted_euclidean_norm(std::move(w));
    } else if (kind == "linear") {
        LinearForm f;
        for (const json& v : doc.at("coefficients")) f.coefficients.push_back(v.get<double>());
        if (static_cast<int>(f.coefficients.size()) != dim)
            throw ConfigError("norm spec: expected " + std::to_string(dim) + " coefficients");
        nn.norm = linear_restriction_norm(std::move(f));
    } else {
        throw ConfigError("norm spec: unknown kind '" + kind + "'");
    }
    return nn;
}

std::vector<double> parse_grid(const std::string& arg) {
    double t0, t1, step;
    if (std::sscanf(arg.c_str(), "%lf:%lf:%lf", &t0, &t1, &step) != 3 || step <= 0 || t1 < t0)
        throw ConfigError("grid must be T0:T1:STEP with STEP > 0, got '" + arg + "'");
    std::vector<double> grid;
    for (double t = t0; t <= t1 + 1e-12; t += step) grid.push_back(t);
    return grid;
}

struct ManifestInfo {
    std::string command;
    std::string config_path;
    json parameters;
    double wall_clock_seconds = 0;
};

json manifest_json(const ManifestInfo& m, bool with_clock) {
    json j{{"command", m.command},
           {"config", m.config_path},
           {"parameters", m.parameters},
           {"tool_version", kToolVersion}};
    // outputs must be byte-identical for fixed seed; the wall clock lives
    // only in the side manifest file
    if (with_clock) j["wall_clock_seconds"] = m.wall_clock_seconds;
    return j;
}

void write_manifest(const std::string& out_path, const ManifestInfo& m) {
    spill(out_path + ".manifest.json", manifest_json(m, true).dump(2) + "\n");
}

struct CensusArgs {
    std::string config, psi_arg, out;
    std::vector<std::string> norm_args;
    int max_length = 6;
    int shards = 1, threads = 1;
    std::uint64_t seed = 0;
};

int cmd_census(const CensusArgs& a) {
    auto t0 = std::chrono::steady_clock::now();
    GroupSpec spec = parse_group_config(slurp(a.config));
    LinearForm psi = psi_from_spec(spec, a.psi_arg);
    std::vector<NamedNorm> norms;
    for (size_t i = 0; i < a.norm_args.size(); ++i)
        norms.push_back(norm_from_spec(spec, a.norm_args[i], static_cast<int>(i)));
    CensusBuild build;
    try {
        build = build_census(spec, a.max_length, psi, norms, a.shards, a.threads);
    } catch (...) {
        std::error_code ec;
        std::filesystem::remove(a.out, ec);  // no partial outputs
        throw;
    }
    spill(a.out, census_to_csv(spec, build));
    ManifestInfo m;
    m.command = "census";
    m.config_path = a.config;
    m.parameters = {{"max_length", a.max_length}, {"psi", a.psi_arg},
                    {"norms", a.norm_args},       {"shards", a.shards},
                    {"threads", a.threads},       {"seed", a.seed}};
    m.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(a.out, m);
    std::fprintf(stderr, "census: %zu records, %ld excluded, %.2fs\n", build.records.size(),
                 build.excluded_nonloxodromic, m.wall_clock_seconds);
    if (build.excluded_nonloxodromic > 0)
        std::fprintf(stderr, "warning: %ld classes failed the loxodromy margin\n",
                     build.excluded_nonloxodromic);
    return 0;
}

struct VerifyArgs {
    std::string config, census_path, grid_arg, out, psi_arg;
    std::vector<std::string> checks;
    std::vector<std::string> norm_args;
    std::string quad_form_arg;
    std::uint64_t seed = 0;
};

json series_json(const CountSeries& s) {
    return {{"ordering", s.ordering}, {"grid", s.grid},
            {"counts", s.counts},     {"delta_fit", s.delta_fit},
            {"ratios", s.ratios},     {"fit_residual", s.fit_residual}};
}

int cmd_verify(const VerifyArgs& a) {
    auto t0 = std::chrono::steady_clock::now();
    GroupSpec spec = parse_group_config(slurp(a.config));
    CensusBuild census = census_from_csv(spec, slurp(a.census_path));
    if (census.records.empty()) throw ConfigError("verify: census is empty");

    json checks = json::object();
    bool all_pass = true;
    std::vector<double> grid;
    if (!a.grid_arg.empty()) grid = parse_grid(a.grid_arg);

    std::vector<double> ell;
    for (const CensusRecord& r : census.records) ell.push_back(r.ell_psi);

    auto need_grid = [&]() {
        if (grid.size() < 3) throw ConfigError("verify: this check needs --grid with >= 3 points");
    };

    CountSeries psi_series;
    bool have_series = false;
    auto ensure_series = [&]() {
        if (!have_series) {
            need_grid();
            psi_series = count_series(ell, "psi", grid);
            have_series = true;
        }
    };

    for (const std::string& check : a.checks) {
        if (check == "counting") {
            ensure_series();
            size_t n = psi_series.ratios.size();
            double rmax = 0, rmin = 1e300, rmean = 0;
            for (size_t i = n - 3; i < n; ++i) {
                rmax = std::max(rmax, psi_series.ratios[i]);
                rmin = std::min(rmin, psi_series.ratios[i]);
                rmean += psi_series.ratios[i] / 3;
            }
            double spread = (rmax - rmin) / rmean;
            bool pass = psi_series.fit_residual < 0.05 && spread < 0.25;
            json payload = series_json(psi_series);
            payload["ratio_spread_top3"] = spread;
            payload["thresholds"] = {{"fit_residual", 0.05}, {"ratio_spread_top3", 0.25}};
            payload["pass"] = pass;
            checks["counting"] = payload;
            all_pass = all_pass && pass;
        } else if (check == "holonomy") {
            need_grid();
            std::vector<int> angle_factors;
            for (size_t k = 0; k < census.records.front().hol.factors.size(); ++k)
                if (census.records.front().hol.factors[k].kind == HolonomyFactor::Kind::Angle)
                    angle_factors.push_back(static_cast<int>(k));
            if (angle_factors.empty())
                throw ConfigError("verify: holonomy check needs angle-typed factors (column hol_*)");
            if (angle_factors.size() > 2) angle_factors.resize(2);
            // shells spread over the populated range; adjacent grid points
            // would make the KS trend pure noise
            std::vector<double> shells{0.62 * grid.back(), 0.785 * grid.back(), 0.95 * grid.back()};
            std::vector<double> ks_per_shell;
            double disc_top = 0;
            long n_top = 0;
            for (double t : shells) {
                UniformityReport rep = holonomy_uniformity(census.records, t, angle_factors);
                ks_per_shell.push_back(rep.ks_max);
                disc_top = rep.discrepancy;
                n_top = rep.sample_count;
            }
            bool decreasing = ks_per_shell[0] > ks_per_shell[1] && ks_per_shell[1] > ks_per_shell[2];
            bool pass = decreasing && disc_top <= 0.5;
            checks["holonomy"] = {{"shells", shells},
                                  {"ks", ks_per_shell},
                                  {"discrepancy", disc_top},
                                  {"samples_top_shell", n_top},
                                  {"thresholds", {{"discrepancy", 0.5}, {"ks", "decreasing"}}},
                                  {"pass", pass}};
            all_pass = all_pass && pass;
        } else if (check == "windows") {
            ensure_series();
            std::vector<std::pair<int, AngleWindow>> windows;
            for (size_t k = 0; k < census.records.front().hol.factors.size(); ++k) {
                const HolonomyFactor& hf = census.records.front().hol.factors[k];
                if (hf.kind != HolonomyFactor::Kind::Angle) continue;
                windows.push_back({static_cast<int>(k), {hf.range / 4, 3 * hf.range / 4}});
            }
            if (windows.empty())
                throw ConfigError("verify: windows check needs angle-typed factors (column hol_*)");
            double top = grid.back();
            WindowCount wc = window_count(census.records, top, windows, psi_series.delta_fit);
            double ratio = wc.predicted > 0 ? wc.observed / wc.predicted : 0.0;
            bool pass = std::abs(ratio - 1.0) <= 0.25;
            checks["windows"] = {{"T", top},
                                 {"observed", wc.observed},
                                 {"predicted", wc.predicted},
                                 {"ratio", ratio},
                                 {"thresholds", {{"ratio_error", 0.25}}},
                                 {"pass", pass}};
            all_pass = all_pass && pass;
        } else if (check == "norm-order") {
            ensure_series();
            if (census.norm_names.empty())
                throw ConfigError("verify: norm-order check needs norm columns in the census");
            std::vector<CartanPoint> lams;
            for (const CensusRecord& r : census.records) lams.push_back(r.lambda);
            ConeHull hull = cone_hull(spec, lams);
            json per_norm = json::object();
            bool pass = true;
            for (size_t ni = 0; ni < census.norm_names.size(); ++ni) {
                std::vector<double> nv;
                for (const CensusRecord& r : census.records) nv.push_back(r.n_values[ni]);
                // comparison constant kappa: psi <= kappa * N on the hull,
                // computed from the recorded values (psi and N both known
                // on every record)
                double kappa = 0;
                for (const CensusRecord& r : census.records)
                    kappa = std::max(kappa, r.ell_psi / r.n_values[ni]);
                std::sort(nv.begin(), nv.end());
                std::vector<double> psis = ell;
                std::sort(psis.begin(), psis.end());
                bool coupled = true;
                for (double t : grid) {
                    if (t > nv.back()) continue;
                    long cn = std::upper_bound(nv.begin(), nv.end(), t) - nv.begin();
                    long cp = std::upper_bound(psis.begin(), psis.end(), kappa * t) - psis.begin();
                    if (cn > cp) coupled = false;
                }
                double delta_fit = 0;
                try {
                    CountSeries ns = count_series(nv, census.norm_names[ni], grid);
                    delta_fit = ns.delta_fit;
                } catch (const DataError&) {
                    // grid may sit outside the N-value range; the coupling
                    // inequality is still meaningful
                }
                per_norm[census.norm_names[ni]] = {
                    {"kappa", kappa}, {"coupled", coupled}, {"delta_fit", delta_fit}};
                pass = pass && coupled;
            }
            json payload = {{"per_norm", per_norm}, {"pass", pass}};
            if (!a.quad_form_arg.empty()) {
                if (a.psi_arg.empty())
                    throw ConfigError("verify: c_N needs --psi to fix ker psi");
                LinearForm psi = psi_from_spec(spec, a.psi_arg);
                QuadraticFormI I = quadratic_form_from_json(parse_spec_arg(a.quad_form_arg).dump());
                std::vector<NamedNorm> norms;
                for (size_t i = 0; i < a.norm_args.size(); ++i)
                    norms.push_back(norm_from_spec(spec, a.norm_args[i], static_cast<int>(i)));
                json cns = json::object();
                for (const NamedNorm& nn : norms) {
                    DeltaNResult dn = delta_n(spec, nn.norm, lams);
                    CConstant c = c_constant(spec, psi, I, nn.norm, dn.estimate.value,
                                             dn.direction, 1000000, a.seed);
                    bool agree = std::abs(c.monte_carlo - c.closed_form) <=
                                 0.01 * std::max(c.closed_form, 1e-12);
                    cns[nn.name] = {{"delta_n", dn.estimate.value},
                                    {"closed_form", c.closed_form},
                                    {"monte_carlo", c.monte_carlo},
                                    {"agree_1pct", agree}};
                    pass = pass && agree && c.closed_form > 0 && c.closed_form <= 1.0;
                }
                payload["c_n"] = cns;
                payload["pass"] = pass;
            }
            checks["norm-order"] = payload;
            all_pass = all_pass && pass;
        } else {
            throw ConfigError("verify: unknown check '" + check + "'");
        }
    }

    ManifestInfo m;
    m.command = "verify";
    m.config_path = a.config;
    m.parameters = {{"census", a.census_path}, {"checks", a.checks},
                    {"grid", a.grid_arg},      {"seed", a.seed},
                    {"norms", a.norm_args},    {"psi", a.psi_arg}};
    json report{{"manifest", manifest_json(m, false)}, {"checks", checks}, {"pass", all_pass}};
    std::string text = report.dump(2) + "\n";
    if (!a.out.empty()) {
        spill(a.out, text);
        m.wall_clock_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_manifest(a.out, m);
    } else {
        std::cout << text;
    }
    return all_pass ? 0 : 4;
}

struct ClosingArgs {
    std::string config, word_text, out;
    std::vector<double> eps_list{0.04, 0.02, 0.01, 0.005};
    int power_lo = 1, power_hi = 5;
    int trials = 300;
    std::uint64_t seed = 0;
};

int cmd_closing(const ClosingArgs& a) {
    auto t0 = std::chrono::steady_clock::now();
    GroupSpec spec = parse_group_config(slurp(a.config));
    Word w = word_from_text(a.word_text, spec.generator_count());
    if (w.empty()) throw ConfigError("closing: word reduces to the identity");
    MatrixTuple gamma = evaluate_word(spec, w);
    if (!is_loxodromic(spec, gamma, 1e-9))
        throw DataError("closing: the word does not evaluate to a loxodromic element");

    std::vector<ClosingRun> runs;
    json run_meta = json::array();
    for (double eps : a.eps_list) {
        for (int k = a.power_lo; k <= a.power_hi; ++k) {
            MatrixTuple gk = identity_tuple(spec);
            for (int i = 0; i < k; ++i) gk = tuple_multiply(gk, gamma);
            FlowBoxSpec box;
            box.base = diagonalizer(spec, gk);
            box.epsilon = eps;
            std::uint64_t run_seed = a.seed ^ (0x9e3779b9u * (k + 100 * runs.size() + 1));
            runs.push_back(closing_experiment(spec, gk, box, a.trials, run_seed));
            run_meta.push_back({{"epsilon", eps}, {"power", k}});
        }
    }
    ClosingFits fits = fit_closing(runs);

    json jruns = json::array();
    for (size_t i = 0; i < runs.size(); ++i) {
        const ClosingRun& r = runs[i];
        json per_trial = json::array();
        std::vector<double> da, dm, disp, ts;
        for (const ClosingReport& rep : r.reports) {
            per_trial.push_back({{"T", rep.T},
                                 {"dist_a", rep.dist_a},
                                 {"dist_m", rep.dist_m},
                                 {"box_displacement", rep.box_displacement},
                                 {"success", rep.success}});
            da.push_back(rep.dist_a);
            dm.push_back(rep.dist_m);
            disp.push_back(rep.box_displacement);
            ts.push_back(rep.T);
        }
        json jr = run_meta[i];
        jr["applicable"] = r.applicable;
        jr["skipped"] = r.skipped;
        jr["trials_kept"] = r.reports.size();
        if (!r.reports.empty()) {
            jr["median_T"] = median(ts);
            jr["median_dist_a"] = median(da);
            jr["median_dist_m"] = median(dm);
            jr["median_box_displacement"] = median(disp);
        }
        jr["per_trial"] = per_trial;
        jruns.push_back(jr);
    }
    ManifestInfo m;
    m.command = "closing";
    m.config_path = a.config;
    m.parameters = {{"word", a.word_text},
                    {"eps", a.eps_list},
                    {"powers", {a.power_lo, a.power_hi}},
                    {"trials", a.trials},
                    {"seed", a.seed}};
    json report{{"manifest", manifest_json(m, false)},
                {"gamma_word", a.word_text},
                {"epsilons", a.eps_list},
                {"runs", jruns},
                {"fits",
                 {{"slope", fits.slope},
                  {"r2", fits.r2},
                  {"spearman", fits.spearman},
                  {"fitted_c", fits.fitted_c}}}};
    std::string text = report.dump(2) + "\n";
    if (!a.out.empty()) {
        spill(a.out, text);
        m.wall_clock_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_manifest(a.out, m);
    } else {
        std::cout << text;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"census and verification engine for products of rank-one matrix groups"};
    app.require_subcommand(1);

    CensusArgs ca;
    CLI::App* census = app.add_subcommand("census", "enumerate primitive classes to CSV");
    census->add_option("--config", ca.config, "group configuration JSON")->required();
    census->add_option("--max-length", ca.max_length, "maximum cyclically-reduced word length")
        ->required();
    census->add_option("--psi", ca.psi_arg, "psi form spec (inline JSON or @file)")->required();
    census->add_option("--norm", ca.norm_args, "norm spec (repeatable)");
    census->add_option("--shards", ca.shards, "shard count");
    census->add_option("--threads", ca.threads, "worker threads");
    census->add_option("--seed", ca.seed, "random seed");
    census->add_option("--out", ca.out, "output CSV path")->required();

    VerifyArgs va;
    CLI::App* verify = app.add_subcommand("verify", "statistical checks against a census");
    verify->add_option("--config", va.config, "group configuration JSON")->required();
    verify->add_option("--census", va.census_path, "census CSV path")->required();
    verify->add_option("--checks", va.checks, "subset of counting,holonomy,windows,norm-order")
        ->delimiter(',');
    verify->add_option("--grid", va.grid_arg, "threshold grid T0:T1:STEP");
    verify->add_option("--psi", va.psi_arg, "psi form spec (for c_N)");
    verify->add_option("--norm", va.norm_args, "norm spec (repeatable, for c_N)");
    verify->add_option("--quadratic-form", va.quad_form_arg, "I matrix spec (JSON or @file)");
    verify->add_option("--seed", va.seed, "random seed");
    verify->add_option("--out", va.out, "report JSON path (stdout when absent)");

    ClosingArgs la;
    CLI::App* closing = app.add_subcommand("closing", "effective closing-lemma experiment");
    closing->add_option("--config", la.config, "group configuration JSON")->required();
    closing->add_option("--word", la.word_text, "loxodromic word, e.g. \"a b'\"")->required();
    closing->add_option("--eps", la.eps_list, "epsilon list")->delimiter(',');
    closing->add_option("--power-lo", la.power_lo, "lowest power of the word");
    closing->add_option("--power-hi", la.power_hi, "highest power of the word");
    closing->add_option("--trials", la.trials, "trials per (epsilon, power)");
    closing->add_option("--seed", la.seed, "random seed");
    closing->add_option("--out", la.out, "report JSON path (stdout when absent)");

    try {
        app.parse(argc, argv);
        if (census->parsed()) return cmd_census(ca);
        if (verify->parsed()) return cmd_verify(va);
        if (closing->parsed()) return cmd_closing(la);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const DataError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
