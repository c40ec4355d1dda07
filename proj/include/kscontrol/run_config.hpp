#ifndef KSCONTROL_RUN_CONFIG_HPP
#define KSCONTROL_RUN_CONFIG_HPP

#include <string>

#include "kscontrol/moment_control.hpp"

namespace ksc {

/// key=value run configuration; unknown keys are rejected.
/// Keys: scenario, T, kmax, kc, kinit, alpha, rho_a, rho_b, rho_c, np, nm,
///       pw_X, pw_n, tol_moment, tol_terminal, init, out
struct RunConfig {
    ControlScenario scenario;
    double T = 1.0;
    int kmax = 50;
    int Kc = 10;
    int K_init = 3;
    int N_P = 512;
    int N_M = 4000;
    double pw_X = 400.0;
    int pw_n = 65536;
    double tol_moment = 1e-8;
    double tol_terminal = 1e-6;
    std::string init_path;
    std::string out_dir = ".";

    void validate() const;
};

RunConfig parse_config_file(const std::string& path);
void apply_config_line(RunConfig& cfg, const std::string& key, const std::string& value);

} // namespace ksc

#endif
