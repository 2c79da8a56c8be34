#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "defectscan/errors.hpp"
#include "defectscan/measurement.hpp"
#include "defectscan/spectral.hpp"

using namespace defectscan;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

} // namespace

TEST_CASE("synthesize: no defect reproduces the homogeneous trace") {
    ChainConfig chain;
    SGrid grid{0.0, 100.0, 101};
    const std::vector<double> values = synthesize(chain, DefectHypothesis{40, 1.0}, grid);
    for (int i = 0; i < grid.n_nodes; ++i) {
        const double hom = homogeneous_x1(grid.node(i), chain);
        CHECK(std::abs(values[static_cast<std::size_t>(i)] - hom) /
                  std::max(std::abs(hom), 1e-30) < 1e-10);
    }
}

TEST_CASE("synthesize: baseline dataset agrees with the kernel route at every node") {
    ChainConfig chain;
    const DefectHypothesis defect{40, 1.3};
    SGrid grid; // default 2001 nodes on [0, 100]
    const std::vector<double> values = synthesize(chain, defect, grid);
    REQUIRE(values.size() == 2001);
    double worst = 0.0;
    for (int i = 0; i < grid.n_nodes; ++i) {
        const double a = analytic_x1(defect.index, defect.stiffness, grid.node(i), chain);
        worst = std::max(worst, std::abs(values[static_cast<std::size_t>(i)] - a) /
                                    std::max(std::abs(a), 1e-30));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("add_noise: zero level is the identity") {
    const std::vector<double> values{1.0, -2.0, 0.5};
    CHECK(add_noise(values, 0.0, 42) == values);
}

TEST_CASE("add_noise: empirical std matches the requested scale") {
    ChainConfig chain;
    SGrid grid;
    const std::vector<double> clean = synthesize(chain, DefectHypothesis{40, 1.3}, grid);
    double max_abs = 0.0;
    for (double v : clean) max_abs = std::max(max_abs, std::abs(v));

    const double eta = 1e-5;
    const std::vector<double> noisy = add_noise(clean, eta, 1234);
    double ss = 0.0;
    for (std::size_t i = 0; i < clean.size(); ++i) {
        const double e = noisy[i] - clean[i];
        ss += e * e;
    }
    const double sample_std = std::sqrt(ss / static_cast<double>(clean.size()));
    CHECK(sample_std == doctest::Approx(eta * max_abs).epsilon(0.05));

    // a different seed gives a different realization with the same scale
    const std::vector<double> noisy2 = add_noise(clean, eta, 99);
    CHECK(noisy2 != noisy);
    double ss2 = 0.0;
    for (std::size_t i = 0; i < clean.size(); ++i) {
        const double e = noisy2[i] - clean[i];
        ss2 += e * e;
    }
    CHECK(std::sqrt(ss2 / static_cast<double>(clean.size())) ==
          doctest::Approx(eta * max_abs).epsilon(0.05));

    // determinism: the same seed reproduces the same values bitwise
    CHECK(add_noise(clean, eta, 1234) == noisy);
}

TEST_CASE("measurement file: lossless round trip") {
    ChainConfig chain;
    chain.n_masses = 25;
    SGrid grid{0.0, 50.0, 51};
    const MeasurementSet meas = make_measurement(chain, DefectHypothesis{7, 0.73}, grid,
                                                 3.7e-6, 987654321);
    const auto path = temp_file("defectscan_meas_roundtrip.dat");
    save_measurement(meas, path.string());
    const MeasurementSet back = load_measurement(path.string());

    CHECK(back.chain.n_masses == meas.chain.n_masses);
    CHECK(back.chain.damping == meas.chain.damping);
    CHECK(back.chain.impulse == meas.chain.impulse);
    CHECK(back.grid == meas.grid);
    CHECK(back.noise_level == meas.noise_level);
    CHECK(back.seed == meas.seed);
    REQUIRE(back.truth.has_value());
    CHECK(back.truth->index == 7);
    CHECK(back.truth->stiffness == 0.73);
    REQUIRE(back.values.size() == meas.values.size());
    for (std::size_t i = 0; i < meas.values.size(); ++i)
        CHECK(back.values[i] == meas.values[i]); // bit-for-bit

    std::filesystem::remove(path);
}

TEST_CASE("measurement file: missing truth block loads as absent") {
    ChainConfig chain;
    chain.n_masses = 25;
    SGrid grid{0.0, 50.0, 51};
    MeasurementSet meas = make_measurement(chain, DefectHypothesis{7, 0.73}, grid, 0.0, 1);
    meas.truth.reset();
    const auto path = temp_file("defectscan_meas_notruth.dat");
    save_measurement(meas, path.string());
    const MeasurementSet back = load_measurement(path.string());
    CHECK_FALSE(back.truth.has_value());
    std::filesystem::remove(path);
}

TEST_CASE("measurement file: malformed inputs are rejected") {
    ChainConfig chain;
    chain.n_masses = 25;
    SGrid grid{0.0, 50.0, 51};
    const MeasurementSet meas = make_measurement(chain, DefectHypothesis{7, 1.3}, grid,
                                                 0.0, 5);
    const auto path = temp_file("defectscan_meas_bad.dat");

    SUBCASE("value count mismatch") {
        save_measurement(meas, path.string());
        std::ifstream in(path);
        std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
        in.close();
        text = text.substr(0, text.rfind('\n', text.size() - 2) + 1); // drop last value
        std::ofstream out(path);
        out << text;
        out.close();
        CHECK_THROWS_AS(load_measurement(path.string()), FileFormatError);
    }

    SUBCASE("unknown header key") {
        std::ofstream out(path);
        out << "version 1\nwhatever 3\n";
        out.close();
        CHECK_THROWS_AS(load_measurement(path.string()), FileFormatError);
    }

    SUBCASE("unsupported version") {
        std::ofstream out(path);
        out << "version 99\ndata 0\n";
        out.close();
        CHECK_THROWS_AS(load_measurement(path.string()), FileFormatError);
    }

    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_measurement((path.string() + ".nope")), FileFormatError);
    }

    std::filesystem::remove(path);
}

TEST_CASE("measurement determinism: config + seed fully determine the set") {
    ChainConfig chain;
    chain.n_masses = 30;
    SGrid grid{0.0, 80.0, 81};
    const MeasurementSet a = make_measurement(chain, DefectHypothesis{12, 1.2}, grid,
                                              1e-4, 777);
    const MeasurementSet b = make_measurement(chain, DefectHypothesis{12, 1.2}, grid,
                                              1e-4, 777);
    CHECK(a.values == b.values);
}

TEST_CASE("measurement CSV export") {
    ChainConfig chain;
    chain.n_masses = 10;
    SGrid grid{0.0, 10.0, 11};
    const MeasurementSet meas = make_measurement(chain, DefectHypothesis{5, 1.3}, grid,
                                                 0.0, 1);
    const auto path = temp_file("defectscan_meas.csv");
    write_measurement_csv(meas, path.string());
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "s,x1");
    int rows = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 11);
    in.close();
    std::filesystem::remove(path);
}
