#ifndef KSCONTROL_IO_HPP
#define KSCONTROL_IO_HPP

#include <string>
#include <vector>

#include "kscontrol/biortho.hpp"
#include "kscontrol/moment_control.hpp"
#include "kscontrol/pde_sim.hpp"

namespace ksc {

// fixed %.17g formatting everywhere: identical inputs give identical bytes
std::string fmt(double v);

StatePair load_state_json(const std::string& path);
void save_state_json(const StatePair& s, const std::string& path);

void save_control(const ControlSignal& g, const std::string& json_path,
                  const std::string& csv_path, int nt = 512);
ControlSignal load_control(const std::string& json_path);

void save_biortho_json(const BiorthogonalFamily& bio, const std::string& path);

void save_trajectory_csv(const SimResult& sim, const std::string& path);
void save_terminal_json(const TerminalReport& rep, const std::string& path);

// the scatter/gap/denominator tables behind the diagnostic figures
std::vector<std::string> write_spectrum_csvs(int kmax, const std::string& outdir);
// (x, log|P|, log|M1|, log|M2|, envelope curves) for the estimate plots
std::string write_estimates_csv(double T, const std::string& outdir,
                                const TruncationPolicy& pol);

} // namespace ksc

#endif
