#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cavpass/commands.hpp"

#include <fstream>
#include <sstream>

using namespace cavpass;

namespace {

std::filesystem::path fresh_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("cavpass_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const std::filesystem::path& p) { return json::parse(slurp(p)); }

// fast but contract-compliant grid for tests
RunConfig fast_config()
{
    RunConfig c;
    c.dt_tp = 1e-3;
    return c;
}

}  // namespace

TEST_CASE("config round-trips through JSON")
{
    RunConfig c;
    CHECK(config_from_json(config_to_json(c)) == c);

    c.protocol = "cnot11";
    c.omega_max_tp = 12.5;
    c.phases = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    c.include_u = true;
    c.gamma_e_tp = 0.01;
    c.kappa_tp = 0.02;
    c.dt_tp = 2.5e-4;
    c.sample_stride = 17;
    c.initial_state = "11;0";
    c.scan_axes = {{"omega_max_tp", {2.0, 5.0, 10.0}}, {"g_tp", {25.0, 50.0}}};
    c.out_dir = "results";
    CHECK(config_from_json(config_to_json(c)) == c);

    RunConfig amp;
    amp.initial_amplitudes = {{"01;0", cdouble(M_SQRT1_2, 0.0)},
                              {"10;0", cdouble(0.0, -M_SQRT1_2)}};
    CHECK(config_from_json(config_to_json(amp)) == amp);
}

TEST_CASE("custom schedules round-trip through JSON")
{
    for (Protocol p : {Protocol::swap8, Protocol::swap7, Protocol::cnot11}) {
        Schedule s = build_schedule(p);
        CHECK(schedule_from_json(schedule_to_json(s)) == s);
    }
    RunConfig c;
    c.protocol = "custom";
    c.custom_schedule = build_schedule(Protocol::swap7);
    CHECK(config_from_json(config_to_json(c)) == c);
    CHECK(c.make_schedule() == *c.custom_schedule);
}

TEST_CASE("config validation names the offending field")
{
    CHECK_THROWS_WITH_AS(config_from_json(json{{"protcol", "swap8"}}),
                         doctest::Contains("protcol"), std::runtime_error);
    CHECK_THROWS_AS(config_from_json(json{{"protocol", "swap9"}}), std::invalid_argument);
    CHECK_THROWS_WITH_AS(
        config_from_json(json{{"grid", {{"dt_tp", -0.1}}}}),
        doctest::Contains("dt_tp"), std::runtime_error);
    CHECK_THROWS_WITH_AS(
        config_from_json(json{{"loss", {{"gamma_e_tp", -1.0}}}}),
        doctest::Contains("loss"), std::runtime_error);
}

TEST_CASE("simulate: default config exchanges |01> -> |10>")
{
    auto dir = fresh_dir("simulate_default");
    std::ostringstream log, err;
    RunConfig c = fast_config();
    int rc = simulate_cmd(c, dir, true, log, err);
    CHECK(rc == kExitOk);
    CHECK(err.str().empty());

    json gate = read_json(dir / "gate.json");
    CHECK(gate["fidelity"].get<double>() >= 0.99);
    CHECK(gate["trajectory"]["final_populations"]["10;0"].get<double>() >= 0.99);
    CHECK(gate["trajectory"]["max_norm_drift"].get<double>() <= 1e-8);
    CHECK(gate["tool"]["version"].is_string());

    // config echo re-parses to the identical RunConfig
    CHECK(config_from_json(gate["config"]) == c);

    // trajectory CSV exists with the expected header structure
    std::string csv = slurp(dir / "trajectory.csv");
    CHECK(csv.find("t,pop:") != std::string::npos);
    CHECK(csv.find("omega_1") != std::string::npos);
    CHECK(csv.find("pop:10;0") != std::string::npos);
}

TEST_CASE("simulate: identical config gives byte-identical CSV")
{
    auto dir1 = fresh_dir("det1");
    auto dir2 = fresh_dir("det2");
    std::ostringstream log, err;
    RunConfig c = fast_config();
    REQUIRE(simulate_cmd(c, dir1, false, log, err) == kExitOk);
    REQUIRE(simulate_cmd(c, dir2, false, log, err) == kExitOk);
    CHECK(slurp(dir1 / "trajectory.csv") == slurp(dir2 / "trajectory.csv"));
    CHECK(slurp(dir1 / "gate.json") == slurp(dir2 / "gate.json"));
}

TEST_CASE("simulate: |11> initial state never moves")
{
    auto dir = fresh_dir("simulate_11");
    std::ostringstream log, err;
    RunConfig c = fast_config();
    c.initial_state = "11;0";
    REQUIRE(simulate_cmd(c, dir, false, log, err) == kExitOk);

    // every sampled row keeps pop(|11>|0>) >= 0.999 (here: exactly 1)
    std::ifstream in(dir / "trajectory.csv");
    std::string line;
    int pop_col = -1;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (pop_col < 0) {
            std::stringstream header(line);
            std::string cell;
            for (int col = 0; std::getline(header, cell, ','); ++col)
                if (cell == "pop:11;0") pop_col = col;
            REQUIRE(pop_col >= 0);
            continue;
        }
        std::stringstream row(line);
        std::string cell;
        for (int col = 0; std::getline(row, cell, ','); ++col)
            if (col == pop_col) CHECK(std::stod(cell) >= 0.999);
    }
}

TEST_CASE("simulate: zero drive yields the identity gate")
{
    auto dir = fresh_dir("simulate_zero");
    std::ostringstream log, err;
    RunConfig c = fast_config();
    c.omega_max_tp = 0.0;
    c.initial_state = "00;0";
    REQUIRE(simulate_cmd(c, dir, false, log, err) == kExitOk);

    json gate = read_json(dir / "gate.json");
    Eigen::Matrix4cd m;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            m(i, j) = cdouble(gate["gate_matrix_re"][i][j].get<double>(),
                              gate["gate_matrix_im"][i][j].get<double>());
    CHECK(gate_fidelity(m, identity_target()) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(gate["trajectory"]["final_populations"]["00;0"].get<double>() ==
          doctest::Approx(1.0));
}

TEST_CASE("simulate: bad config exits 2, weak drive trips --assert with 4")
{
    std::ostringstream log, err;
    RunConfig c = fast_config();
    c.initial_state = "zz;0";
    CHECK(simulate_cmd(c, fresh_dir("bad_label"), false, log, err) == kExitConfig);

    c = fast_config();
    c.protocol = "cnot11";
    c.include_u = false;
    CHECK(simulate_cmd(c, fresh_dir("bad_u"), false, log, err) == kExitConfig);

    c = fast_config();
    c.omega_max_tp = 2.0;  // weakly adiabatic: flags + low fidelity
    CHECK(simulate_cmd(c, fresh_dir("weak"), true, log, err) == kExitAssert);
    c.dt_tp = 1e-2;  // violates the integrator bound -> surfaced as config error
    CHECK(simulate_cmd(c, fresh_dir("bad_dt"), false, log, err) == kExitConfig);
}

TEST_CASE("simulate: a superposition input for the exchange pair")
{
    auto dir = fresh_dir("superposition");
    std::ostringstream log, err;
    RunConfig c = fast_config();
    c.initial_amplitudes = {{"01;0", cdouble(M_SQRT1_2, 0.0)},
                            {"10;0", cdouble(M_SQRT1_2, 0.0)}};
    REQUIRE(simulate_cmd(c, dir, false, log, err) == kExitOk);
    json gate = read_json(dir / "gate.json");
    CHECK(gate["trajectory"]["initial_state"] == "superposition");
    CHECK(gate["trajectory"]["final_populations"]["01;0"].get<double>() ==
          doctest::Approx(0.5).epsilon(1e-3));
    CHECK(gate["trajectory"]["final_populations"]["10;0"].get<double>() ==
          doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("simulate: integrator abort writes a flagged partial CSV and exits 3")
{
    auto dir = fresh_dir("abort");
    std::ostringstream log, err;
    RunConfig c = fast_config();
    c.protocol = "custom";
    Schedule s = build_schedule(Protocol::swap8);
    s.g1 = std::numeric_limits<double>::quiet_NaN();
    c.custom_schedule = s;
    CHECK(simulate_cmd(c, dir, false, log, err) == kExitNumeric);
    CHECK(err.str().find("non-finite") != std::string::npos);
    std::string csv = slurp(dir / "trajectory.csv");
    CHECK(csv.find("aborted") != std::string::npos);
}

TEST_CASE("scan: empty grid writes a header-only CSV")
{
    auto dir = fresh_dir("scan_empty");
    std::ostringstream log, err;
    RunConfig c = fast_config();
    REQUIRE(scan_cmd(c, dir, false, log, err) == kExitOk);
    std::string csv = slurp(dir / "scan.csv");
    int data_rows = 0;
    std::stringstream ss(csv);
    std::string line;
    bool saw_header = false;
    while (std::getline(ss, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!saw_header) {
            saw_header = true;
            CHECK(line.find("fidelity") != std::string::npos);
            continue;
        }
        ++data_rows;
    }
    CHECK(saw_header);
    CHECK(data_rows == 0);
}

TEST_CASE("scan: a 5x5 grid writes exactly 25 rows")
{
    auto dir = fresh_dir("scan_25");
    std::ostringstream log, err;
    RunConfig c;
    c.dt_tp = 2e-3;
    c.scan_axes = {{"omega_max_tp", {8.0, 9.0, 10.0, 11.0, 12.0}},
                   {"intra_delay_tp", {1.0, 1.1, 1.2, 1.3, 1.4}}};
    REQUIRE(scan_cmd(c, dir, true, log, err) == kExitOk);
    std::string csv = slurp(dir / "scan.csv");
    int data_rows = 0;
    std::stringstream ss(csv);
    std::string line;
    bool saw_header = false;
    while (std::getline(ss, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!saw_header) {
            saw_header = true;
            continue;
        }
        ++data_rows;
        CHECK(line.substr(line.size() - 2) == "ok");
    }
    CHECK(data_rows == 25);
}

TEST_CASE("scan: fidelity grows with pulse area from 2 to 10")
{
    auto dir = fresh_dir("scan_area");
    std::ostringstream log, err;
    RunConfig c;
    c.dt_tp = 2e-3;
    c.scan_axes = {{"omega_max_tp", {2.0, 5.0, 10.0, 20.0}}};
    REQUIRE(scan_cmd(c, dir, false, log, err) == kExitOk);

    std::vector<double> fidelity;
    std::stringstream ss(slurp(dir / "scan.csv"));
    std::string line;
    bool saw_header = false;
    while (std::getline(ss, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!saw_header) {
            saw_header = true;
            continue;
        }
        std::stringstream row(line);
        std::string cell;
        std::getline(row, cell, ',');  // axis value
        std::getline(row, cell, ',');  // fidelity
        fidelity.push_back(std::stod(cell));
    }
    REQUIRE(fidelity.size() == 4);
    CHECK(fidelity[0] < 0.9);       // area 2: visibly degraded
    CHECK(fidelity[0] <= fidelity[1]);
    CHECK(fidelity[1] <= fidelity[2]);
    CHECK(fidelity[2] >= 0.99);
    // scans with more than 3 axes are rejected
    c.scan_axes.assign(4, ScanAxis{"omega_max_tp", {10.0}});
    CHECK(scan_cmd(c, dir, false, log, err) == kExitConfig);
}

TEST_CASE("darkstates command reports clean kernels and phases")
{
    auto dir = fresh_dir("darkstates");
    std::ostringstream log, err;
    RunConfig c = fast_config();
    REQUIRE(darkstates_cmd(c, dir, true, log, err) == kExitOk);

    json rep = read_json(dir / "darkstates.json");
    REQUIRE(rep["steps"].size() == 4);
    for (const auto& step : rep["steps"]) {
        REQUIRE(step["blocks"].size() == 2);
        for (const auto& block : step["blocks"]) {
            CHECK(block["tracking_ok"].get<bool>());
            CHECK(block["max_kernel_residual"].get<double>() <= 1e-10);
            CHECK(block["min_gap"].get<double>() > 0.0);
            CHECK(std::abs(block["geometric_phase_rad"].get<double>()) <= 1e-4);
            CHECK(block["start_overlap"].get<double>() >= 0.999);
            CHECK(block["end_overlap"].get<double>() >= 0.999);
        }
    }
    // the chain endpoints follow the step connections
    CHECK(rep["steps"][0]["blocks"][0]["start_state"] == "10;0");
    CHECK(rep["steps"][0]["blocks"][0]["end_state"] == "a1;0");
    CHECK(config_from_json(rep["config"]) == c);
}

TEST_CASE("estimate command prints and serializes the helium numbers")
{
    auto dir = fresh_dir("estimate");
    std::ostringstream log, err;
    REQUIRE(estimate_cmd(1e4, 1e-9, 1e7, dir / "estimate.json", log, err) == kExitOk);
    CHECK(log.str().find("Omega_max Tp") != std::string::npos);
    json e = read_json(dir / "estimate.json");
    CHECK(e["rabi_s"].get<double>() == doctest::Approx(1e10));
    CHECK(e["stark_phase"].get<double>() == doctest::Approx(1e-3));
    CHECK(e["adiabatic_loss_ratio"].get<double>() == doctest::Approx(1e4));

    CHECK(estimate_cmd(-1.0, 1e-9, 1e7, std::nullopt, log, err) == kExitConfig);
}
