// Command-line front end. Every subcommand is flag plumbing around library
// calls plus file emission; no numerical logic lives here, so anything the
// binary produces is reproducible through the library API.
//
// Exit codes: 0 success, 1 failed check or numeric anomaly, 2 usage error.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ricker/equilibrium.hpp"
#include "ricker/io.hpp"
#include "ricker/moment_map.hpp"
#include "ricker/montecarlo.hpp"
#include "ricker/scan.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------- config file

// A JSON object of long-flag values: {"r": 1.5, "n-ens": 4000, "stamp": true}.
// Arrays repeat the flag; null skips it; false for a flag omits it.
std::vector<std::string> config_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open config file: " + path);
    ordered_json j = ordered_json::parse(in);
    if (!j.is_object())
        throw std::invalid_argument(
            "config file must hold a JSON object of long-flag values");
    std::vector<std::string> toks;
    for (const auto& [key, val] : j.items()) {
        const std::string flag = "--" + key;
        if (val.is_null()) continue;
        if (val.is_boolean()) {
            if (val.get<bool>()) toks.push_back(flag);
        } else if (val.is_string()) {
            toks.push_back(flag);
            toks.push_back(val.get<std::string>());
        } else if (val.is_array()) {
            for (const auto& e : val) {
                toks.push_back(flag);
                toks.push_back(e.is_string() ? e.get<std::string>() : e.dump());
            }
        } else if (val.is_object()) {
            throw std::invalid_argument("config key '" + key +
                                        "': nested objects are not flags");
        } else {
            toks.push_back(flag);
            toks.push_back(val.dump());
        }
    }
    return toks;
}

// Strips --config <file> (or --config=<file>) from the raw arguments and
// splices the file's flags right after the subcommand token. Explicit
// command-line flags come later in the stream and win under TakeLast.
std::vector<std::string> splice_config(const std::vector<std::string>& raw) {
    std::string cfg_path;
    std::vector<std::string> out;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const std::string& a = raw[i];
        if (a == "--config") {
            if (i + 1 >= raw.size())
                throw std::invalid_argument("--config needs a file path");
            cfg_path = raw[++i];
        } else if (a.rfind("--config=", 0) == 0) {
            cfg_path = a.substr(9);
        } else {
            out.push_back(a);
        }
    }
    if (cfg_path.empty()) return out;
    std::size_t pos = 0;
    while (pos < out.size() && !out[pos].empty() && out[pos][0] == '-') ++pos;
    if (pos == out.size())
        throw std::invalid_argument("--config given without a subcommand");
    const std::vector<std::string> extra = config_tokens(cfg_path);
    out.insert(out.begin() + static_cast<std::ptrdiff_t>(pos) + 1,
               extra.begin(), extra.end());
    return out;
}

// ------------------------------------------------------------------- helpers

std::set<std::string> parse_formats(const std::string& spec) {
    std::set<std::string> fmts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        if (item != "csv" && item != "json" && item != "svg")
            throw std::invalid_argument("unknown output format '" + item +
                                        "' (choose from csv,json,svg)");
        fmts.insert(item);
    }
    if (fmts.empty())
        throw std::invalid_argument("--formats selected nothing");
    return fmts;
}

const char* reason_str(ricker::TerminationReason r) {
    switch (r) {
        case ricker::TerminationReason::Completed: return "completed";
        case ricker::TerminationReason::Breakdown: return "breakdown";
        case ricker::TerminationReason::NumericFailure: return "numeric failure";
    }
    return "?";
}

struct EnsembleFlags {
    ricker::EnsembleConfig cfg;
    std::string out_dir = ".";
    std::string prefix = "ensemble";
    std::string formats = "csv,json,svg";
    std::string preset;
};

void add_ensemble_flags(CLI::App* sub, EnsembleFlags& f, bool with_preset) {
    sub->add_option("--r", f.cfg.p.r, "growth rate r")->required();
    sub->add_option("--v", f.cfg.p.v, "noise second moment v")->required();
    sub->add_option("--n-ens", f.cfg.n_ens, "number of trajectories");
    sub->add_option("--t-max", f.cfg.t_max, "iterations per trajectory");
    sub->add_option("--transient", f.cfg.transient, "burn-in steps");
    sub->add_option("--collect", f.cfg.collect, "collection window length");
    sub->add_option("--seed", f.cfg.seed, "ensemble seed");
    sub->add_option("--init-mu", f.cfg.init_mu, "initial Gamma mean");
    sub->add_option("--init-s", f.cfg.init_s, "initial Gamma variance");
    sub->add_option("--conv-window", f.cfg.conv_window,
                    "trailing window for the CV criterion");
    sub->add_option("--conv-tol", f.cfg.conv_tol, "CV convergence threshold");
    sub->add_option("--hist-bins", f.cfg.hist_bins, "stationary histogram bins");
    sub->add_option("--out-dir", f.out_dir, "output directory");
    sub->add_option("--prefix", f.prefix, "output file stem");
    sub->add_option("--formats", f.formats, "comma list from csv,json,svg");
    if (with_preset)
        sub->add_option("--preset", f.preset,
                        "'validate': stationary-comparison protocol "
                        "(transient 1000, collect 500)")
            ->check(CLI::IsMember({"validate"}));
}

int run_simulate(EnsembleFlags& f, CLI::App* sub, bool validate_mode) {
    const bool validate = validate_mode || f.preset == "validate";
    if (validate) {
        if (sub->count("--transient") == 0) f.cfg.transient = 1000;
        if (sub->count("--collect") == 0) f.cfg.collect = 500;
        if (sub->count("--t-max") == 0 &&
            f.cfg.t_max < f.cfg.transient + f.cfg.collect)
            f.cfg.t_max = f.cfg.transient + f.cfg.collect;
    }
    const std::set<std::string> fmts = parse_formats(f.formats);

    const ricker::EnsembleStats stats = ricker::run_ensemble(f.cfg);

    std::filesystem::create_directories(f.out_dir);
    const std::string base = f.out_dir + "/" + f.prefix;
    std::vector<std::string> written;
    if (fmts.count("csv")) {
        ricker::atomic_write(base + ".csv", ricker::ensemble_csv(stats));
        written.push_back(base + ".csv");
    }
    if (fmts.count("json")) {
        ricker::atomic_write(base + ".json", ricker::ensemble_json(stats, f.cfg));
        written.push_back(base + ".json");
    }
    if (fmts.count("svg")) {
        ricker::atomic_write(base + ".svg", ricker::ensemble_svg(stats));
        written.push_back(base + ".svg");
    }

    std::cout << "converged=" << (stats.converged ? "true" : "false")
              << " final_cv=" << stats.final_cv
              << " stationary_mean=" << stats.stationary_mean
              << " stationary_var=" << stats.stationary_var
              << " excluded=" << stats.excluded
              << " extinct=" << (stats.extinct ? "true" : "false") << "\n";

    if (validate) {
        const ricker::EquilibriumResult eq = ricker::solve_equilibrium(f.cfg.p);
        if (!eq.feasible) {
            std::cerr << "validate: no feasible closure equilibrium at r="
                      << f.cfg.p.r << " v=" << f.cfg.p.v
                      << " (verdict " << ricker::to_string(eq.verdict)
                      << "); nothing to compare against\n";
            return 1;
        }
        const ricker::DistributionComparison cmp =
            ricker::compare_distribution(stats, *eq.mu_star, *eq.s_star);
        ricker::atomic_write(base + "_compare.json",
                             ricker::comparison_json(cmp, *eq.mu_star,
                                                     *eq.s_star));
        written.push_back(base + "_compare.json");
        std::cout << "mean_rel_err=" << cmp.mean_rel_err
                  << " var_rel_err=" << cmp.var_rel_err
                  << " l1_distance=" << cmp.l1_distance
                  << " tail_q95_rel_err=" << cmp.tail_q95_rel_err << "\n";
    }

    std::cout << "wrote";
    for (const auto& w : written) std::cout << ' ' << w;
    std::cout << "\n";
    return 0;
}

// --------------------------------------------------------------- lemma-check

struct LemmaCheck {
    std::string name;
    std::string requirement;
    bool pass = false;
    double observed = 0;
    double at_z = 0;
};

int run_lemma_check(std::size_t points, const std::string& fault) {
    const bool flip_q = fault == "q-sign";
    std::vector<LemmaCheck> checks;

    const double z0 = 1e-10;
    checks.push_back({"phi_limit", "phi(1e-10) within 1e-4 of 2", false,
                      ricker::phi(z0), z0});
    checks.back().pass = std::fabs(checks.back().observed - 2.0) <= 1e-4;

    checks.push_back({"phi_prime_limit", "phi'(1e-10) within 1e-4 of -1",
                      false, ricker::phi_prime(z0), z0});
    checks.back().pass = std::fabs(checks.back().observed + 1.0) <= 1e-4;

    checks.push_back({"h_limit", "H(1e-10) within 1e-4 of 3", false,
                      ricker::h_func(z0), z0});
    checks.back().pass = std::fabs(checks.back().observed - 3.0) <= 1e-4;

    const double h_tail = ricker::h_func(1e6);
    const double ref = 4.0 * std::log(2.0) / std::pow(std::log(1e6), 2);
    checks.push_back({"h_tail",
                      "H(1e6) < 0.025 and within 20% of 4 ln2 / ln(1e6)^2",
                      h_tail < 0.025 && std::fabs(h_tail - ref) <= 0.2 * ref,
                      h_tail, 1e6});

    // sign sweeps over log-spaced z in [1e-6, 1e6]
    double worst_hp = -HUGE_VAL, worst_hp_z = 0;
    double worst_q = HUGE_VAL, worst_q_z = 0;
    for (std::size_t i = 0; i < points; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(points - 1);
        const double z = std::pow(10.0, -6.0 + 12.0 * t);
        const double hp = ricker::h_func_prime(z);
        if (hp > worst_hp) { worst_hp = hp; worst_hp_z = z; }
        double q = ricker::q_func(z);
        if (flip_q) q = -q;
        if (q < worst_q) { worst_q = q; worst_q_z = z; }
    }
    checks.push_back({"h_prime_negative",
                      "H'(z) < 0 at all sampled z in [1e-6, 1e6]",
                      worst_hp < 0.0, worst_hp, worst_hp_z});
    checks.push_back({"q_positive", "Q(z) > 0 at all sampled z in [1e-6, 1e6]",
                      worst_q > 0.0, worst_q, worst_q_z});

    bool all_pass = true;
    ordered_json report;
    report["points"] = points;
    if (flip_q) report["injected_fault"] = "q-sign";
    report["checks"] = ordered_json::array();
    for (const auto& c : checks) {
        all_pass = all_pass && c.pass;
        report["checks"].push_back({{"name", c.name},
                                    {"requirement", c.requirement},
                                    {"pass", c.pass},
                                    {"observed", c.observed},
                                    {"at_z", c.at_z}});
        if (!c.pass)
            std::cerr << "lemma-check: " << c.name << " failed (observed "
                      << c.observed << " at z=" << c.at_z << ")\n";
    }
    report["all_pass"] = all_pass;
    std::cout << report.dump(2) << "\n";
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gamma moment closure of the stochastic Ricker map: "
                 "equilibria, stability, Monte-Carlo validation, scans"};
    app.set_version_flag("--version", "ricker 1.0.0");
    app.require_subcommand(1);
    app.footer("--config FILE (JSON object of long-form flags) may appear\n"
               "anywhere; explicit command-line flags override it.\n"
               "RICKER_THREADS caps worker threads; results are identical\n"
               "for any cap.");

    int exit_code = 0;

    // equilibrium --------------------------------------------------------
    struct {
        double r = 0, v = 0, z_max = ricker::kDefaultZMax;
    } eq;
    CLI::App* eq_cmd = app.add_subcommand(
        "equilibrium", "solve the closure fixed point at one (r, v)");
    eq_cmd->option_defaults()->take_last();
    eq_cmd->add_option("--r", eq.r, "growth rate r")->required();
    eq_cmd->add_option("--v", eq.v, "noise second moment v")->required();
    eq_cmd->add_option("--z-max", eq.z_max, "root search upper bound");
    eq_cmd->callback([&] {
        const ricker::Params p{eq.r, eq.v};
        const ricker::EquilibriumResult res =
            ricker::solve_equilibrium(p, eq.z_max);
        std::cout << ricker::equilibrium_json(res, p, eq.z_max);
        if (res.verdict == ricker::EquilibriumVerdict::NoRootFound) {
            std::cerr << "equilibrium: no sign change up to z_max=" << eq.z_max
                      << "; raise --z-max\n";
            exit_code = 1;
        }
    });

    // iterate ------------------------------------------------------------
    struct {
        double r = 0, v = 0, mu0 = 0, s0 = 0;
        std::size_t steps = 0;
        std::string out = "trajectory.csv";
    } it;
    CLI::App* it_cmd = app.add_subcommand(
        "iterate", "run the closed moment recurrence from one state");
    it_cmd->option_defaults()->take_last();
    it_cmd->add_option("--r", it.r, "growth rate r")->required();
    it_cmd->add_option("--v", it.v, "noise second moment v")->required();
    it_cmd->add_option("--mu0", it.mu0, "initial mean")->required();
    it_cmd->add_option("--s0", it.s0, "initial variance")->required();
    it_cmd->add_option("--steps", it.steps, "iterations to attempt")->required();
    it_cmd->add_option("--out", it.out, "trajectory CSV path");
    it_cmd->callback([&] {
        const ricker::Trajectory t =
            ricker::iterate({it.mu0, it.s0}, {it.r, it.v}, it.steps);
        ricker::atomic_write(it.out, ricker::trajectory_csv(t));
        std::cout << "wrote " << it.out << ": " << t.states.size()
                  << " states, " << reason_str(t.reason) << "\n";
    });

    // simulate / validate --------------------------------------------------
    EnsembleFlags sim;
    CLI::App* sim_cmd = app.add_subcommand(
        "simulate", "Monte-Carlo ensemble of the stochastic map");
    sim_cmd->option_defaults()->take_last();
    add_ensemble_flags(sim_cmd, sim, true);
    sim_cmd->callback([&] { exit_code = run_simulate(sim, sim_cmd, false); });

    EnsembleFlags val;
    CLI::App* val_cmd = app.add_subcommand(
        "validate",
        "simulate with the validation protocol and compare against the "
        "closure equilibrium");
    val_cmd->option_defaults()->take_last();
    add_ensemble_flags(val_cmd, val, false);
    val_cmd->callback([&] { exit_code = run_simulate(val, val_cmd, true); });

    // scan ----------------------------------------------------------------
    struct {
        std::string kind;
        double r_min = 0.5, r_max = 10.0, v_min = 1.05, v_max = 4.5;
        std::size_t nr = 50, nv = 50;
        double z_max = ricker::kDefaultZMax;
        std::string out_dir = ".";
        std::string prefix = "scan";
        std::string formats = "csv,json,svg";
        bool stamp = false;
    } sc;
    CLI::App* sc_cmd =
        app.add_subcommand("scan", "verdict grid over an (r, v) rectangle");
    sc_cmd->option_defaults()->take_last();
    sc_cmd->add_option("kind", sc.kind, "existence | stability")
        ->required()
        ->check(CLI::IsMember({"existence", "stability"}));
    sc_cmd->add_option("--r-min", sc.r_min, "left r edge");
    sc_cmd->add_option("--r-max", sc.r_max, "right r edge");
    sc_cmd->add_option("--v-min", sc.v_min, "lower v edge");
    sc_cmd->add_option("--v-max", sc.v_max, "upper v edge");
    sc_cmd->add_option("--nr", sc.nr, "r resolution");
    sc_cmd->add_option("--nv", sc.nv, "v resolution");
    sc_cmd->add_option("--z-max", sc.z_max, "root search upper bound");
    sc_cmd->add_option("--out-dir", sc.out_dir, "output directory");
    sc_cmd->add_option("--prefix", sc.prefix, "output file stem");
    sc_cmd->add_option("--formats", sc.formats, "comma list from csv,json,svg");
    sc_cmd->add_flag("--stamp", sc.stamp,
                     "write a wall-clock timestamp into the JSON sidecar "
                     "(off by default: reruns stay byte-identical)");
    sc_cmd->callback([&] {
        const std::set<std::string> fmts = parse_formats(sc.formats);
        const ricker::ScanGrid grid =
            sc.kind == "existence"
                ? ricker::existence_scan(sc.r_min, sc.r_max, sc.v_min,
                                         sc.v_max, sc.nr, sc.nv, sc.z_max)
                : ricker::stability_scan(sc.r_min, sc.r_max, sc.v_min,
                                         sc.v_max, sc.nr, sc.nv, sc.z_max);
        std::filesystem::create_directories(sc.out_dir);
        const std::string base = sc.out_dir + "/" + sc.prefix;
        std::vector<std::string> written;
        if (fmts.count("csv")) {
            ricker::atomic_write(base + ".csv", ricker::scan_csv(grid));
            written.push_back(base + ".csv");
        }
        if (fmts.count("json")) {
            ricker::atomic_write(base + ".json",
                                 ricker::scan_sidecar_json(grid, sc.stamp));
            written.push_back(base + ".json");
        }
        if (fmts.count("svg")) {
            ricker::atomic_write(base + ".svg", ricker::scan_svg(grid));
            written.push_back(base + ".svg");
        }
        std::size_t feasible = 0;
        for (const auto& c : grid.cells)
            if (ricker::is_feasible_verdict(c.verdict)) ++feasible;
        std::cout << sc.kind << " scan " << grid.nr() << "x" << grid.nv()
                  << ": " << feasible << "/" << grid.cells.size()
                  << " feasible cells\n";
        const ricker::BoundaryError be = ricker::boundary_error(grid);
        if (!be.empty())
            std::cout << "threshold deviation max " << be.max_abs_dev
                      << " over " << be.columns_with_flip << " columns\n";
        std::cout << "wrote";
        for (const auto& w : written) std::cout << ' ' << w;
        std::cout << "\n";
    });

    // lemma-check -----------------------------------------------------------
    struct {
        std::size_t points = 10000;
        std::string fault;
    } lc;
    CLI::App* lc_cmd = app.add_subcommand(
        "lemma-check",
        "limit and sign checks for the auxiliary function family");
    lc_cmd->option_defaults()->take_last();
    lc_cmd->add_option("--points", lc.points, "sign-sweep sample count")
        ->check(CLI::Range(std::size_t{2}, std::size_t{100000000}));
    lc_cmd->add_option("--inject-fault", lc.fault)
        ->check(CLI::IsMember({"q-sign"}))
        ->group("");  // test hook, hidden from help
    lc_cmd->callback([&] { exit_code = run_lemma_check(lc.points, lc.fault); });

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        std::vector<std::string> tokens = splice_config(args);
        std::reverse(tokens.begin(), tokens.end());
        app.parse(std::move(tokens));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: config file: " << e.what() << "\n";
        return 2;
    } catch (const ricker::numeric_failure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}
