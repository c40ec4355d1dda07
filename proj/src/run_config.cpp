#include "kscontrol/run_config.hpp"

#include <fstream>
#include <sstream>

namespace ksc {

void RunConfig::validate() const {
    if (T <= 0.0) throw Error(Error::usage, "config: T must be positive");
    if (Kc < 0 || kmax < 0) throw Error(Error::usage, "config: kc/kmax must be >= 0");
    if (tol_moment <= 0.0 || tol_terminal <= 0.0)
        throw Error(Error::usage, "config: tolerances must be positive");
    if (scenario.kind == ScenarioKind::interior_u || scenario.kind == ScenarioKind::interior_v) {
        double hi = scenario.alpha + scenario.rho.value * M_PI;
        if (scenario.alpha <= 0.0 || hi >= 2.0 * M_PI)
            throw Error(Error::usage, "config: profile [alpha, alpha+rho*pi] must sit inside (0, 2pi)");
    }
}

void apply_config_line(RunConfig& cfg, const std::string& key, const std::string& value) {
    auto as_int = [&](const std::string& v) {
        size_t pos = 0;
        int r = std::stoi(v, &pos);
        if (pos != v.size()) throw Error(Error::usage, "config: bad integer for " + key);
        return r;
    };
    auto as_double = [&](const std::string& v) {
        size_t pos = 0;
        double r = std::stod(v, &pos);
        if (pos != v.size()) throw Error(Error::usage, "config: bad number for " + key);
        return r;
    };
    if (key == "scenario") cfg.scenario.kind = scenario_from_name(value);
    else if (key == "T") cfg.T = as_double(value);
    else if (key == "kmax") cfg.kmax = as_int(value);
    else if (key == "kc") cfg.Kc = as_int(value);
    else if (key == "kinit") cfg.K_init = as_int(value);
    else if (key == "alpha") cfg.scenario.alpha = as_double(value);
    else if (key == "rho_a" || key == "rho_b" || key == "rho_c") {
        long a = cfg.scenario.rho.a, b = cfg.scenario.rho.b, c = cfg.scenario.rho.c;
        if (key == "rho_a") a = as_int(value);
        if (key == "rho_b") b = as_int(value);
        if (key == "rho_c") c = as_int(value);
        cfg.scenario.rho = make_rho(a, b, c);
    } else if (key == "np") cfg.N_P = as_int(value);
    else if (key == "nm") cfg.N_M = as_int(value);
    else if (key == "pw_X") cfg.pw_X = as_double(value);
    else if (key == "pw_n") cfg.pw_n = as_int(value);
    else if (key == "tol_moment") cfg.tol_moment = as_double(value);
    else if (key == "tol_terminal") cfg.tol_terminal = as_double(value);
    else if (key == "init") cfg.init_path = value;
    else if (key == "out") cfg.out_dir = value;
    else throw Error(Error::usage, "config: unknown key " + key);
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Error::usage, "cannot open config: " + path);
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = line.substr(0, line.find('#'));
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
            s.pop_back();
        size_t start = s.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        s = s.substr(start);
        size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw Error(Error::usage, "config line " + std::to_string(lineno) + ": expected key=value");
        std::string key = s.substr(0, eq), value = s.substr(eq + 1);
        while (!key.empty() && key.back() == ' ') key.pop_back();
        while (!value.empty() && value.front() == ' ') value.erase(value.begin());
        apply_config_line(cfg, key, value);
    }
    cfg.validate();
    return cfg;
}

} // namespace ksc
