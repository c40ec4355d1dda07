#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "kscontrol/io.hpp"
#include "kscontrol/run_config.hpp"

using namespace ksc;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run(const std::string& cmd) {
    int st = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(st);
}

bool exists(const std::string& p) { return std::ifstream(p).good(); }

} // namespace

TEST_CASE("config parsing") {
    std::ofstream("tmp_cfg.conf") << "scenario = boundary_v\nT = 2.5\nkc = 7\n"
                                  << "# comment line\nrho_a = 1\nrho_b = 1\nrho_c = -1\n"
                                  << "alpha = 0.5\nout = somewhere\n";
    RunConfig cfg = parse_config_file("tmp_cfg.conf");
    CHECK(cfg.scenario.kind == ScenarioKind::boundary_v);
    CHECK(cfg.T == 2.5);
    CHECK(cfg.Kc == 7);
    CHECK(cfg.scenario.rho.value == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0));
    CHECK(cfg.out_dir == "somewhere");

    std::ofstream("tmp_bad.conf") << "nonsense = 1\n";
    CHECK_THROWS_AS(parse_config_file("tmp_bad.conf"), Error);
    std::ofstream("tmp_bad2.conf") << "T -3\n";
    CHECK_THROWS_AS(parse_config_file("tmp_bad2.conf"), Error);
    std::ofstream("tmp_bad3.conf") << "T = -3\n";
    CHECK_THROWS_AS(parse_config_file("tmp_bad3.conf"), Error);
}

TEST_CASE("state json round trip") {
    StatePair s{PeriodicField(2), PeriodicField(2)};
    s.u.set_coeff(1, cplx(0.25, -0.75));
    s.v.set_coeff(-2, cplx(1.5, 0.5));
    save_state_json(s, "tmp_state.json");
    StatePair t = load_state_json("tmp_state.json");
    CHECK(std::abs(t.u.coeff(1) - s.u.coeff(1)) == 0.0);
    CHECK(std::abs(t.v.coeff(-2) - s.v.coeff(-2)) == 0.0);
    CHECK(std::abs(t.u.coeff(2)) == 0.0);
}

TEST_CASE("cli subcommands, exit codes and determinism") {
    // usage errors
    CHECK(run("./kscontrol") == 2);
    CHECK(run("./kscontrol spectrum --kmax -1 --out tmp_cli") == 2);
    CHECK(run("./kscontrol nonsense") == 2);

    CHECK(run("./kscontrol spectrum --kmax 0 --out tmp_cli") == 0);  // zero-mode only
    CHECK(run("./kscontrol spectrum --kmax 8 --out tmp_cli") == 0);
    CHECK(exists("tmp_cli/fig1_eigenvalues.csv"));
    CHECK(exists("tmp_cli/fig7_denominator_v_minus.csv"));

    CHECK(run("./kscontrol biortho --T 1 --kc 3 --out tmp_cli") == 0);
    CHECK(exists("tmp_cli/biortho.json"));

    // synthesize from a state file, then verify on a longer window
    StatePair init{PeriodicField(2), PeriodicField(2)};
    init.u.set_coeff(1, cplx(0.5, -0.25));
    init.u.set_coeff(-1, cplx(0.5, 0.25));
    init.v.set_coeff(1, cplx(-0.3, 0.2));
    init.v.set_coeff(-1, cplx(-0.3, -0.2));
    save_state_json(init, "tmp_cli/init.json");
    CHECK(run("./kscontrol synthesize --scenario interior_u --T 8 --kc 10 "
              "--init tmp_cli/init.json --out tmp_cli") == 0);
    CHECK(exists("tmp_cli/control.json"));
    CHECK(exists("tmp_cli/control.csv"));

    CHECK(run("./kscontrol verify --scenario interior_u --T 8 --kc 10 --kmax 15 "
              "--init tmp_cli/init.json --control tmp_cli/control.json "
              "--tol 1e-6 --out tmp_cli") == 0);

    // wrong-mean data is a constraint violation: exit code 4
    StatePair bad = init;
    bad.v.set_coeff(0, cplx(0.7, 0.0));
    save_state_json(bad, "tmp_cli/bad.json");
    CHECK(run("./kscontrol synthesize --scenario interior_u --T 4 --kc 6 "
              "--init tmp_cli/bad.json --out tmp_cli") == 4);

    // zero control on nonzero data: verify fails with a numeric exit
    ControlSignal none;
    none.kind = ScenarioKind::interior_u;
    none.T = 8.0;
    none.t0 = 4.0;
    save_control(none, "tmp_cli/zero.json", "tmp_cli/zero.csv");
    CHECK(run("./kscontrol verify --scenario interior_u --T 8 --kc 10 --kmax 15 "
              "--init tmp_cli/init.json --control tmp_cli/zero.json "
              "--tol 1e-6 --out tmp_cli") == 3);

    // mismatched T between control and config
    CHECK(run("./kscontrol verify --scenario interior_u --T 2 --kc 10 "
              "--init tmp_cli/init.json --control tmp_cli/control.json "
              "--out tmp_cli") == 2);

    // determinism: identical inputs give byte-identical JSON
    CHECK(run("./kscontrol synthesize --scenario interior_u --T 8 --kc 10 "
              "--init tmp_cli/init.json --out tmp_cli_a") == 0);
    CHECK(run("./kscontrol synthesize --scenario interior_u --T 8 --kc 10 "
              "--init tmp_cli/init.json --out tmp_cli_b") == 0);
    CHECK(slurp("tmp_cli_a/control.json") == slurp("tmp_cli_b/control.json"));
    CHECK(slurp("tmp_cli_a/control.json").size() > 100);

    // bundled example config: interior_u, T = 1, data band 3
    CHECK(run("cd .. && build/kscontrol synthesize --config data/example_interior_u.conf"
              " --out build/tmp_cli_ex") == 0);
    CHECK(exists("tmp_cli_ex/control.json"));

    // config-file driven run with a flag override
    std::ofstream("tmp_cli/run.conf") << "scenario = interior_u\nT = 8\nkc = 10\n"
                                      << "init = tmp_cli/init.json\nout = tmp_cli_c\n";
    CHECK(run("./kscontrol synthesize --config tmp_cli/run.conf") == 0);
    CHECK(slurp("tmp_cli_c/control.json") == slurp("tmp_cli_a/control.json"));
}
