#include "kscontrol/io.hpp"

#include <cstdio>
#include <fstream>
#include <json.hpp>

namespace ksc {

using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw Error(Error::usage, "cannot open for writing: " + path);
    return f;
}

json field_to_json(const PeriodicField& f) {
    json arr = json::array();
    for (int k = -f.kmax(); k <= f.kmax(); ++k) {
        cplx c = f.coeff(k);
        if (c == cplx(0.0, 0.0)) continue;
        arr.push_back({k, c.real(), c.imag()});
    }
    return arr;
}

PeriodicField field_from_json(const json& arr, int kmax) {
    PeriodicField f(kmax);
    for (const auto& row : arr) {
        int k = row.at(0).get<int>();
        f.set_coeff(k, cplx(row.at(1).get<double>(), row.at(2).get<double>()));
    }
    return f;
}

} // namespace

StatePair load_state_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Error::usage, "cannot open state file: " + path);
    json j;
    in >> j;
    int kmax = j.at("kmax").get<int>();
    StatePair s;
    s.u = field_from_json(j.at("u"), kmax);
    s.v = field_from_json(j.at("v"), kmax);
    return s;
}

void save_state_json(const StatePair& s, const std::string& path) {
    json j;
    j["kmax"] = std::max(s.u.kmax(), s.v.kmax());
    j["u"] = field_to_json(s.u);
    j["v"] = field_to_json(s.v);
    open_out(path) << j.dump(1) << "\n";
}

void save_control(const ControlSignal& g, const std::string& json_path,
                  const std::string& csv_path, int nt) {
    json j;
    j["kind"] = scenario_name(g.kind);
    j["T"] = g.T;
    j["t0"] = g.t0;
    json terms = json::array();
    for (size_t m = 0; m < g.rate.size(); ++m) {
        cplx mant = g.mant[m].to_double();
        terms.push_back({g.rate[m].real(), g.rate[m].imag(), mant.real(), mant.imag(),
                         g.lg[m]});
    }
    j["terms"] = terms;
    open_out(json_path) << j.dump(1) << "\n";

    std::ofstream csv = open_out(csv_path);
    csv << "t,re_g,im_g\n";
    for (int i = 0; i <= nt; ++i) {
        double t = g.T * i / nt;
        cplx v = g.eval(t);
        csv << fmt(t) << "," << fmt(v.real()) << "," << fmt(v.imag()) << "\n";
    }
}

ControlSignal load_control(const std::string& json_path) {
    std::ifstream in(json_path);
    if (!in) throw Error(Error::usage, "cannot open control file: " + json_path);
    json j;
    in >> j;
    ControlSignal g;
    g.kind = scenario_from_name(j.at("kind").get<std::string>());
    g.T = j.at("T").get<double>();
    g.t0 = j.value("t0", 0.0);
    for (const auto& row : j.at("terms")) {
        g.rate.push_back(cplx(row.at(0).get<double>(), row.at(1).get<double>()));
        g.mant.push_back(qcplx(cplx(row.at(2).get<double>(), row.at(3).get<double>())));
        g.lg.push_back(row.at(4).get<double>());
    }
    return g;
}

void save_biortho_json(const BiorthogonalFamily& bio, const std::string& path) {
    json j;
    j["T"] = bio.family.T;
    j["method"] = bio.method;
    j["cond_estimate"] = bio.cond_estimate;
    j["max_residual"] = bio.max_residual;
    json expo = json::array();
    for (size_t i = 0; i < bio.family.mu.size(); ++i) {
        expo.push_back({bio.family.labels[i].k,
                        branch_name(bio.family.labels[i].branch),
                        bio.family.mu[i].real(), bio.family.mu[i].imag(),
                        bio.logD[i]});
    }
    j["exponents"] = expo;
    json coeffs = json::array();
    for (size_t jj = 0; jj < bio.chat.size(); ++jj) {
        json row = json::array();
        for (const cplx& c : bio.chat[jj]) row.push_back({c.real(), c.imag()});
        coeffs.push_back(row);
    }
    j["coefficients_normalized"] = coeffs;
    json norms = json::array();
    for (double n : bio.log_l2_norm) norms.push_back(n);
    j["log_l2_norms"] = norms;
    open_out(path) << j.dump(1) << "\n";
}

void save_trajectory_csv(const SimResult& sim, const std::string& path) {
    std::ofstream f = open_out(path);
    f << "t,mode,re_u,im_u,re_v,im_v\n";
    for (size_t i = 0; i < sim.traj.times.size(); ++i) {
        const StatePair& s = sim.traj.states[i];
        for (int k = -sim.kmax; k <= sim.kmax; ++k) {
            cplx u = s.u.coeff(k), v = s.v.coeff(k);
            f << fmt(sim.traj.times[i]) << "," << k << "," << fmt(u.real()) << ","
              << fmt(u.imag()) << "," << fmt(v.real()) << "," << fmt(v.imag()) << "\n";
        }
    }
}

void save_terminal_json(const TerminalReport& rep, const std::string& path) {
    json j;
    j["dual_norm"] = rep.dual_norm;
    j["enforced_dual"] = rep.enforced_dual;
    j["leaked_dual"] = rep.leaked_dual;
    j["enforced_max_mode"] = rep.enforced_max_mode;
    json rows = json::array();
    for (auto& [k, lg] : rep.mode_log_mag) rows.push_back({k, lg});
    j["mode_log_magnitude"] = rows;
    open_out(path) << j.dump(1) << "\n";
}

std::vector<std::string> write_spectrum_csvs(int kmax, const std::string& outdir) {
    std::vector<std::string> files;
    SpectrumTable table = build_table(kmax);

    auto path = [&](const std::string& name) { return outdir + "/" + name; };

    {
        std::ofstream f = open_out(path("fig1_eigenvalues.csv"));
        f << "k,branch,re_lambda,im_lambda\n";
        for (const SpectralNode& n : table.nodes)
            f << n.k << "," << branch_name(n.branch) << "," << fmt(n.lambda.real()) << ","
              << fmt(n.lambda.imag()) << "\n";
        files.push_back(path("fig1_eigenvalues.csv"));
    }
    {
        std::ofstream f = open_out(path("fig2_gap.csv"));
        f << "min_gap,k_a,branch_a,k_b,branch_b,includes_zero\n";
        if (kmax >= 1) {
            GapReport gap = spectral_gap(kmax);
            f << fmt(gap.min_gap) << "," << gap.k_a << "," << branch_name(gap.br_a) << ","
              << gap.k_b << "," << branch_name(gap.br_b) << ","
              << (gap.includes_zero ? 1 : 0) << "\n";
        }
        files.push_back(path("fig2_gap.csv"));
    }
    {
        std::ofstream f = open_out(path("fig3_eta_theta.csv"));
        f << "k,branch,re_eta,im_eta,re_theta,im_theta\n";
        for (const SpectralNode& n : table.nodes)
            f << n.k << "," << branch_name(n.branch) << "," << fmt(n.eta.real()) << ","
              << fmt(n.eta.imag()) << "," << fmt(n.theta.real()) << ","
              << fmt(n.theta.imag()) << "\n";
        files.push_back(path("fig3_eta_theta.csv"));
    }
    DenominatorReport den;
    if (kmax >= 1) den = denominator_check(kmax);
    const char* names[4] = {"fig4_denominator_u_plus.csv", "fig5_denominator_u_minus.csv",
                            "fig6_denominator_v_plus.csv", "fig7_denominator_v_minus.csv"};
    for (int which = 0; which < 4; ++which) {
        std::ofstream f = open_out(path(names[which]));
        f << "k,abs_denominator,abs_denominator_used\n";
        for (const DenominatorRow& r : den.rows) {
            bool is_plus = r.branch == Branch::plus;
            if (which == 0 && is_plus) f << r.k << "," << fmt(r.den_boundary_u) << "," << fmt(r.den_boundary_u) << "\n";
            if (which == 1 && !is_plus) f << r.k << "," << fmt(r.den_boundary_u) << "," << fmt(r.den_boundary_u) << "\n";
            if (which == 2 && is_plus) f << r.k << "," << fmt(r.den_boundary_v) << "," << fmt(r.den_boundary_v_used) << "\n";
            if (which == 3 && !is_plus) f << r.k << "," << fmt(r.den_boundary_v) << "," << fmt(r.den_boundary_v_used) << "\n";
        }
        files.push_back(path(names[which]));
    }
    return files;
}

std::string write_estimates_csv(double T, const std::string& outdir,
                                const TruncationPolicy& pol) {
    NodeSet nodes = build_nodes(T, std::max(pol.N_P, 16));
    MultiplierSpec m1 = build_multiplier(T, Multiplier::M1, pol.N_M);
    MultiplierSpec m2 = build_multiplier(T, Multiplier::M2, pol.N_M);
    std::string p = outdir + "/estimates_PM.csv";
    std::ofstream f = open_out(p);
    f << "x,log_abs_P,log_abs_M1,log_abs_M2,bound_P,bound_M1,bound_M2\n";
    for (double x = 1.0; x <= 1.0e3 + 0.5; x *= std::pow(10.0, 0.125)) {
        PEval pe = canonical_P(cplx(x, 0.0), nodes, pol);
        double lp = pe.value.log_abs();
        double lm1 = eval_multiplier(cplx(x, 0.0), m1, pol.tails).log_abs();
        double lm2 = eval_multiplier(cplx(x, 0.0), m2, pol.tails).log_abs();
        double bp = -std::log(x) + std::sqrt(2.0) * M_PI * std::sqrt(x) +
                    2.0 * std::sqrt(2.0) * M_PI * std::pow(x, 0.25);
        double bm1 = std::log(x) - std::sqrt(2.0) * M_PI * std::sqrt(x);
        double bm2 = std::log(x) - 2.0 * std::sqrt(2.0) * M_PI * std::pow(x, 0.25);
        f << fmt(x) << "," << fmt(lp) << "," << fmt(lm1) << "," << fmt(lm2) << ","
          << fmt(bp) << "," << fmt(bm1) << "," << fmt(bm2) << "\n";
    }
    return p;
}

} // namespace ksc
