#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>

#include "kscontrol/io.hpp"
#include "kscontrol/run_config.hpp"

using namespace ksc;

namespace {

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
}

int cmd_spectrum(const RunConfig& cfg) {
    ensure_dir(cfg.out_dir);
    auto files = write_spectrum_csvs(cfg.kmax, cfg.out_dir);
    if (cfg.kmax < 1) {
        std::printf("spectrum kmax=%d files=%zu (zero-mode only)\n", cfg.kmax, files.size());
        return 0;
    }
    GapReport gap = spectral_gap(cfg.kmax);
    DenominatorReport den = denominator_check(cfg.kmax);
    std::printf("spectrum kmax=%d files=%zu min_gap=%s min_den_u=%s min_den_v=%s\n",
                cfg.kmax, files.size(), fmt(gap.min_gap).c_str(),
                fmt(den.min_boundary_u).c_str(), fmt(den.min_boundary_v_used).c_str());
    if (!(gap.min_gap > 0.0) || !(den.min_boundary_u > 0.0) ||
        !(den.min_boundary_v > 0.0) || !(den.min_boundary_v_used > 0.0))
        throw Error(Error::numeric, "positivity check failed in the spectral scan");
    return 0;
}

int cmd_biortho(const RunConfig& cfg) {
    ensure_dir(cfg.out_dir);
    BiorthogonalFamily bio = gram_biorthogonal(build_family(cfg.T, cfg.Kc));
    save_biortho_json(bio, cfg.out_dir + "/biortho.json");
    std::printf("biortho T=%s Kc=%d cond=%s residual=%s\n", fmt(cfg.T).c_str(), cfg.Kc,
                fmt(bio.cond_estimate).c_str(), fmt(bio.max_residual).c_str());
    return 0;
}

int cmd_synthesize(const RunConfig& cfg) {
    if (cfg.init_path.empty()) throw Error(Error::usage, "synthesize needs --init <state.json>");
    ensure_dir(cfg.out_dir);
    StatePair init = load_state_json(cfg.init_path);
    MomentProblem pb = assemble_moment_problem(cfg.scenario, init, cfg.T, cfg.Kc);
    BiorthogonalFamily bio = gram_biorthogonal(pb.family);
    ControlSignal g = synthesize(pb, bio);
    MomentResiduals res = moment_residuals(g, pb, cfg.Kc + 4);
    save_control(g, cfg.out_dir + "/control.json", cfg.out_dir + "/control.csv");
    std::printf("synthesize scenario=%s T=%s Kc=%d moment_residual=%s l2=%s\n",
                scenario_name(cfg.scenario.kind), fmt(cfg.T).c_str(), cfg.Kc,
                fmt(res.max_enforced_weighted).c_str(), fmt(g.l2_norm()).c_str());
    if (res.max_enforced_weighted > cfg.tol_moment)
        throw Error(Error::numeric, "moment residual above tol_moment");
    return 0;
}

SimResult simulate_with(const RunConfig& cfg, const StatePair& init,
                        const ControlSignal& g, int kmax_sim) {
    switch (g.kind) {
        case ScenarioKind::interior_u:
        case ScenarioKind::interior_v: {
            ControlScenario sc = cfg.scenario;
            sc.kind = g.kind;
            return evolve_interior(init, sc, g, kmax_sim, 32);
        }
        case ScenarioKind::boundary_u:
        case ScenarioKind::boundary_v:
            return evolve_boundary(init, g.kind, g, kmax_sim, 32);
    }
    throw Error(Error::usage, "unknown control kind");
}

int cmd_simulate(const RunConfig& cfg, const std::string& control_path) {
    if (cfg.init_path.empty()) throw Error(Error::usage, "simulate needs --init <state.json>");
    ensure_dir(cfg.out_dir);
    StatePair init = load_state_json(cfg.init_path);
    int kmax_sim = std::max({cfg.kmax, cfg.Kc + 4, init.u.kmax(), init.v.kmax()});
    SimResult run = control_path.empty()
                        ? evolve_free(init, cfg.T, kmax_sim, 32)
                        : simulate_with(cfg, init, load_control(control_path), kmax_sim);
    save_trajectory_csv(run, cfg.out_dir + "/trajectory.csv");
    TerminalReport rep = terminal_report(run, cfg.Kc);
    save_terminal_json(rep, cfg.out_dir + "/terminal.json");
    std::printf("simulate terminal_dual=%s enforced_max=%s leaked=%s\n",
                fmt(rep.dual_norm).c_str(), fmt(rep.enforced_max_mode).c_str(),
                fmt(rep.leaked_dual).c_str());
    return 0;
}

int cmd_verify(const RunConfig& cfg, const std::string& control_path) {
    if (cfg.init_path.empty() || control_path.empty())
        throw Error(Error::usage, "verify needs --init and --control");
    ensure_dir(cfg.out_dir);
    StatePair init = load_state_json(cfg.init_path);
    ControlSignal g = load_control(control_path);
    if (std::abs(g.T - cfg.T) > 1e-12)
        throw Error(Error::usage, "control window T does not match the config");
    double init_dual = state_dual_norm(init);
    int kmax_sim = std::max({cfg.kmax, cfg.Kc + 4, init.u.kmax(), init.v.kmax()});
    SimResult run = simulate_with(cfg, init, g, kmax_sim);
    TerminalReport rep = terminal_report(run, cfg.Kc);
    save_terminal_json(rep, cfg.out_dir + "/terminal.json");
    bool ok = rep.dual_norm <= cfg.tol_terminal * std::max(init_dual, 1e-300);
    std::printf("verify terminal_dual=%s initial_dual=%s ratio=%s result=%s\n",
                fmt(rep.dual_norm).c_str(), fmt(init_dual).c_str(),
                fmt(rep.dual_norm / std::max(init_dual, 1e-300)).c_str(),
                ok ? "pass" : "fail");
    if (!ok) throw Error(Error::numeric, "terminal dual norm above tolerance");
    return 0;
}

int cmd_estimates(const RunConfig& cfg) {
    ensure_dir(cfg.out_dir);
    int fails = 0;
    auto line = [&](const char* name, bool ok, double value) {
        std::printf("estimate %-28s %s value=%s\n", name, ok ? "pass" : "FAIL",
                    fmt(value).c_str());
        if (!ok) ++fails;
    };

    TruncationPolicy pol{cfg.N_P, cfg.N_M, true};
    NodeSet nodes = build_nodes(cfg.T, std::max(pol.N_P, 16));
    MultiplierSpec m1 = build_multiplier(cfg.T, Multiplier::M1, cfg.N_M);
    MultiplierSpec m2 = build_multiplier(cfg.T, Multiplier::M2, cfg.N_M);

    double logC_P = -1e308;
    for (double x : {10.0, 100.0, 1000.0}) {
        double lp = canonical_P(cplx(x, 0.0), nodes, pol).value.log_abs();
        double env = -std::log(x) + std::sqrt(2.0) * M_PI * std::sqrt(x) +
                     2.0 * std::sqrt(2.0) * M_PI * std::pow(x, 0.25);
        logC_P = std::max(logC_P, lp - env);
    }
    line("P_real_axis_envelope", std::isfinite(logC_P), logC_P);

    double c2 = 1e308, c3 = 1e308;
    for (int k = 1; k <= 12; ++k) {
        double lp = P_prime_at_node(NodeId{k, Branch::plus}, nodes, pol).log_abs();
        c2 = std::min(c2, lp + 3.0 * std::log(double(k)) - 2.0 * M_PI * std::sqrt(double(k)));
    }
    for (int k = 1; k <= 8; ++k) {
        double lp = P_prime_at_node(NodeId{k, Branch::minus}, nodes, pol).log_abs();
        c3 = std::min(c3, lp + 7.0 * std::log(double(k)) - 3.0 * M_PI * k);
    }
    line("Pprime_plus_lower", std::isfinite(c2), c2);
    line("Pprime_minus_lower", std::isfinite(c3), c3);

    double a = cfg.T / (4.0 * M_PI);
    double cm2u = -1e308, cm2l = 1e308, cm1u = -1e308, cm1l = 1e308, cm1lm = 1e308;
    for (double x : {10.0, 100.0, 1000.0}) {
        cm2u = std::max(cm2u, eval_multiplier(cplx(x, 0.0), m2).log_abs() - std::log(x) +
                                  2.0 * std::sqrt(2.0) * M_PI * std::pow(x, 0.25));
        cm1u = std::max(cm1u, eval_multiplier(cplx(x, 0.0), m1).log_abs() - std::log(x) +
                                  std::sqrt(2.0) * M_PI * std::sqrt(x));
    }
    for (int k = 1; k <= 10; ++k) {
        cplx node = node_point(nodes, NodeId{k, Branch::plus});
        cm2l = std::min(cm2l, eval_multiplier(node, m2).log_abs() - M_PI * a * k * k +
                                  4.0 * (std::sqrt(2.0) + 1.0) * M_PI * k);
        cm1l = std::min(cm1l, eval_multiplier(node, m1).log_abs() - M_PI * a * k * k +
                                  (5.0 + 2.0 * std::sqrt(2.0)) * M_PI * k);
    }
    for (int k = 1; k <= 4; ++k) {
        cplx node = node_point(nodes, NodeId{k, Branch::minus});
        double k2 = double(k) * k;
        cm1lm = std::min(cm1lm, eval_multiplier(node, m1).log_abs() - M_PI * a * k2 * k2 +
                                    (2.0 * std::sqrt(2.0) + 1.0) * M_PI * k2 + 8.0 * k);
    }
    line("M2_real_axis_decay", std::isfinite(cm2u), cm2u);
    line("M2_plus_node_growth", std::isfinite(cm2l), cm2l);
    line("M1_real_axis_decay", std::isfinite(cm1u), cm1u);
    line("M1_plus_node_growth", std::isfinite(cm1l), cm1l);
    line("M1_minus_node_growth", std::isfinite(cm1lm), cm1lm);

    NormReport rep = norm_report(gram_biorthogonal(build_family(1.0, 6)));
    line("Theta_plus_envelope", std::isfinite(rep.fitted_logC_plus), rep.fitted_logC_plus);
    line("Theta_minus_envelope", std::isfinite(rep.fitted_logC_minus), rep.fitted_logC_minus);

    AppendixB b0 = verify_appendix_B(0.0);
    bool okB = std::abs(b0.integral - M_PI / std::sin(5.0 * M_PI / 8.0)) < 1e-6;
    for (double x : {1.0, -1.0, 10.0, -10.0, 100.0, -100.0, 1e4, -1e4}) {
        AppendixB r = verify_appendix_B(x);
        okB = okB && r.lower <= r.integral && r.integral <= r.upper;
    }
    line("appendix_B_bounds", okB, b0.integral);
    double supA = 0.0;
    for (double x = 1e-3; x <= 1.001e6; x *= std::pow(10.0, 0.5))
        supA = std::max(supA, std::abs(appendix_A_theta(x)));
    line("appendix_A_bounded", supA < 20.0, supA);

    write_estimates_csv(cfg.T, cfg.out_dir, pol);
    if (fails) throw Error(Error::numeric, "estimate suite recorded failures");
    return 0;
}

int cmd_figures(const RunConfig& cfg) {
    ensure_dir(cfg.out_dir);
    auto files = write_spectrum_csvs(cfg.kmax, cfg.out_dir);
    TruncationPolicy pol{cfg.N_P, cfg.N_M, true};
    files.push_back(write_estimates_csv(cfg.T, cfg.out_dir, pol));
    std::printf("figures files=%zu out=%s\n", files.size(), cfg.out_dir.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"moment-method null-control toolkit for the stabilized KS system"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path, control_path, rho_poly, scenario_str;

    struct Seen {
        CLI::Option *T, *kmax, *kc, *scenario, *init, *out, *tol, *alpha, *np, *nm;
    };
    std::map<CLI::App*, Seen> seen;
    auto add_common = [&](CLI::App* sub) {
        Seen s;
        sub->add_option("--config", config_path, "key=value run configuration file");
        s.T = sub->add_option("--T", cfg.T, "control window length");
        s.kmax = sub->add_option("--kmax", cfg.kmax, "spectral range");
        s.kc = sub->add_option("--kc", cfg.Kc, "enforced mode range");
        s.scenario = sub->add_option("--scenario", scenario_str,
                                     "interior_u | interior_v | boundary_u | boundary_v");
        s.init = sub->add_option("--init", cfg.init_path, "initial state JSON");
        s.out = sub->add_option("--out", cfg.out_dir, "output directory");
        s.tol = sub->add_option("--tol", cfg.tol_terminal, "terminal norm tolerance");
        s.alpha = sub->add_option("--alpha", cfg.scenario.alpha, "profile left endpoint");
        sub->add_option("--rho-poly", rho_poly, "a,b,c of the quadratic for rho");
        s.np = sub->add_option("--np", cfg.N_P, "canonical product truncation");
        s.nm = sub->add_option("--nm", cfg.N_M, "multiplier truncation");
        seen[sub] = s;
    };

    CLI::App* spectrum = app.add_subcommand("spectrum", "eigenvalue/denominator tables");
    CLI::App* biortho = app.add_subcommand("biortho", "Gram biorthogonal family");
    CLI::App* synthesize = app.add_subcommand("synthesize", "moment-problem control synthesis");
    CLI::App* simulate = app.add_subcommand("simulate", "spectral simulation");
    CLI::App* verify = app.add_subcommand("verify", "null-control verification");
    CLI::App* estimates = app.add_subcommand("estimates", "entire-function estimate suite");
    CLI::App* figures = app.add_subcommand("figures", "all figure data files");
    for (CLI::App* sub : {spectrum, biortho, synthesize, simulate, verify, estimates, figures})
        add_common(sub);
    simulate->add_option("--control", control_path, "control JSON (omit for free run)");
    verify->add_option("--control", control_path, "control JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        CLI::App* active = app.get_subcommands().front();
        if (!config_path.empty()) {
            // file values are the base; explicitly passed flags stay on top
            RunConfig base = parse_config_file(config_path);
            const Seen& s = seen[active];
            if (!s.T->count()) cfg.T = base.T;
            if (!s.kmax->count()) cfg.kmax = base.kmax;
            if (!s.kc->count()) cfg.Kc = base.Kc;
            if (!s.scenario->count()) cfg.scenario.kind = base.scenario.kind;
            if (!s.alpha->count()) cfg.scenario.alpha = base.scenario.alpha;
            if (rho_poly.empty()) cfg.scenario.rho = base.scenario.rho;
            if (!s.init->count()) cfg.init_path = base.init_path;
            if (!s.out->count()) cfg.out_dir = base.out_dir;
            if (!s.tol->count()) cfg.tol_terminal = base.tol_terminal;
            if (!s.np->count()) cfg.N_P = base.N_P;
            if (!s.nm->count()) cfg.N_M = base.N_M;
            cfg.tol_moment = base.tol_moment;
        }
        if (!scenario_str.empty()) cfg.scenario.kind = scenario_from_name(scenario_str);
        if (!rho_poly.empty()) {
            long a = 0, b = 0, c = 0;
            if (std::sscanf(rho_poly.c_str(), "%ld,%ld,%ld", &a, &b, &c) != 3)
                throw Error(Error::usage, "--rho-poly expects a,b,c");
            cfg.scenario.rho = make_rho(a, b, c);
        }
        cfg.validate();

        if (*spectrum) return cmd_spectrum(cfg);
        if (*biortho) return cmd_biortho(cfg);
        if (*synthesize) return cmd_synthesize(cfg);
        if (*simulate) return cmd_simulate(cfg, control_path);
        if (*verify) return cmd_verify(cfg, control_path);
        if (*estimates) return cmd_estimates(cfg);
        if (*figures) return cmd_figures(cfg);
    } catch (const Error& e) {
        std::fprintf(stderr, "error code=%d %s\n", int(e.code), e.what());
        return int(e.code);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error code=3 %s\n", e.what());
        return 3;
    }
    return 2;
}
