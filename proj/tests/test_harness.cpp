#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "defectscan/config.hpp"
#include "defectscan/errors.hpp"
#include "defectscan/harness.hpp"
#include "defectscan/report.hpp"

using namespace defectscan;

namespace {

namespace fs = std::filesystem;

const char* kFullConfig = R"(# baseline experiment
kind invert
n_masses 100
damping 0.1
impulse 1.0
defect.index 40
defect.stiffness 1.3
grid.s_min 0
grid.s_max 20
grid.n_nodes 401
objective.k_lo 0.1
objective.k_hi 5
noise.level 1e-6
seed 42
workers 2
sweep.levels 1e-7,1e-6,1e-5
)";

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("config: full round trip through parse and echo") {
    const ExperimentSpec spec = parse_config_text(kFullConfig);
    CHECK(spec.kind == ExperimentKind::invert);
    CHECK(spec.chain.n_masses == 100);
    CHECK(spec.defect.has_value());
    CHECK(spec.defect->index == 40);
    CHECK(spec.defect->stiffness == 1.3);
    CHECK(spec.grid.n_nodes == 401);
    CHECK(spec.objective.grid == spec.grid);
    CHECK(spec.noise_level == 1e-6);
    CHECK(spec.seed == 42);
    CHECK(spec.workers == 2);
    REQUIRE(spec.sweep_levels.size() == 3);
    CHECK(spec.sweep_levels[1] == 1e-6);
    CHECK_NOTHROW(spec.validate());

    const ExperimentSpec again = parse_config_text(echo_config(spec));
    CHECK(again.kind == spec.kind);
    CHECK(again.chain.n_masses == spec.chain.n_masses);
    CHECK(again.chain.damping == spec.chain.damping);
    CHECK(again.defect->stiffness == spec.defect->stiffness);
    CHECK(again.grid == spec.grid);
    CHECK(again.noise_level == spec.noise_level);
    CHECK(again.sweep_levels == spec.sweep_levels);
    CHECK(echo_config(again) == echo_config(spec));
}

TEST_CASE("config: unknown key is a hard error with the key path") {
    try {
        parse_config_text("kind invert\nn_masse 100\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("n_masse") != std::string::npos);
    }
}

TEST_CASE("config: malformed and incomplete blocks") {
    CHECK_THROWS_AS(parse_config_text("n_masses 100\n"), ConfigError); // no kind
    CHECK_THROWS_AS(parse_config_text("kind invert\ndefect.index 40\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("kind invert\nunits.length 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("kind invert\nn_masses ten\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("kind invert\nn_masses 10 20\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("kind bogus\n"), ConfigError);

    // kind-specific requirements
    ExperimentSpec sim = parse_config_text("kind simulate\n");
    CHECK_THROWS_AS(sim.validate(), ConfigError);
    ExperimentSpec sweep = parse_config_text(
        "kind sweep-noise\ndefect.index 40\ndefect.stiffness 1.3\n");
    CHECK_THROWS_AS(sweep.validate(), ConfigError); // missing sweep.levels
}

TEST_CASE("run_experiment: simulate then invert from the file") {
    const fs::path dir = temp_dir("defectscan_harness_sim");
    ExperimentSpec sim = parse_config_text(kFullConfig);
    sim.kind = ExperimentKind::simulate;
    sim.noise_level = 0.0;
    sim.output_dir = dir.string();
    std::ostringstream log;
    REQUIRE(run_experiment(sim, log) == 0);
    REQUIRE(fs::exists(dir / "measurement.dat"));
    REQUIRE(fs::exists(dir / "measurement.csv"));

    ExperimentSpec inv = parse_config_text(kFullConfig);
    inv.defect.reset();
    inv.measurement_path = (dir / "measurement.dat").string();
    inv.output_dir = (dir / "inv").string();
    REQUIRE(run_experiment(inv, log) == 0);
    REQUIRE(fs::exists(dir / "inv" / "invert_report.txt"));
    REQUIRE(fs::exists(dir / "inv" / "per_index_residual.csv"));

    const std::string payload =
        read_report_payload((dir / "inv" / "invert_report.txt").string());
    CHECK(payload.find("result.j_hat 40") != std::string::npos);

    fs::remove_all(dir);
}

TEST_CASE("run_experiment: report payloads are byte-identical across reruns") {
    const fs::path dir_a = temp_dir("defectscan_harness_det_a");
    const fs::path dir_b = temp_dir("defectscan_harness_det_b");
    std::ostringstream log;
    for (const fs::path& dir : {dir_a, dir_b}) {
        ExperimentSpec inv = parse_config_text(kFullConfig);
        inv.output_dir = dir.string();
        inv.workers = dir == dir_a ? 1 : 2; // scheduling must not matter
        REQUIRE(run_experiment(inv, log) == 0);
    }
    CHECK(read_report_payload((dir_a / "invert_report.txt").string()) ==
          read_report_payload((dir_b / "invert_report.txt").string()));
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("sweep_noise: tiny smoke sweep with per-level independence") {
    ExperimentSpec spec = parse_config_text(kFullConfig);
    spec.kind = ExperimentKind::sweep_noise;
    spec.sweep_levels = {1e-8, 1e-7};
    spec.smooth.sigma_smooth = 0.0;
    spec.smooth.n_delta = 1;
    spec.smooth.n_mc = 3;
    spec.workers = 2;

    const SweepReport report = sweep_noise(spec);
    REQUIRE(report.rows.size() == 2);
    for (const auto& row : report.rows) {
        CHECK(row.n_runs == 3);
        CHECK(row.n_failed == 0);
        CHECK(row.run_j.size() == 3);
        // tiny noise on a strong defect: every run should nail the location
        CHECK(row.frac_location_exact == 1.0);
        CHECK(row.rel_err_location == 0.0);
        CHECK(row.rel_err_size < 1e-4);
    }

    const fs::path dir = temp_dir("defectscan_harness_sweep");
    write_sweep_csv((dir / "sweep.csv").string(), report);
    std::ifstream in(dir / "sweep.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header.find("noise_level") == 0);
    in.close();
    fs::remove_all(dir);
}

TEST_CASE("sweep_size: recovers sizes across a small contrast range") {
    ExperimentSpec spec = parse_config_text(kFullConfig);
    spec.kind = ExperimentKind::sweep_size;
    spec.noise_level = 1e-8;
    spec.sweep_k_values = {1.2, 1.4, 1.6};
    spec.smooth.sigma_smooth = 0.0;
    spec.smooth.n_delta = 1;
    spec.smooth.n_mc = 3;
    spec.workers = 2;

    const SweepReport report = sweep_size(spec);
    REQUIRE(report.rows.size() == 3);
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        CHECK(report.rows[i].median_j == 40.0);
        CHECK(report.rows[i].rel_err_size < 1e-4);
        CHECK(report.rows[i].swept_value == spec.sweep_k_values[i]);
    }
}

TEST_CASE("checks: oracle equivalence and overflow safety pass quickly") {
    const CheckResult oracle = check_oracle_equivalence();
    CHECK(oracle.pass);
    const CheckResult overflow = check_overflow_safety();
    CHECK(overflow.pass);
}
