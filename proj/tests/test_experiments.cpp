#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ncsim/errors.hpp"
#include "ncsim/experiments.hpp"

using namespace ncsim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

fs::path fresh_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("ncsim_test_" + tag);
    fs::remove_all(dir);
    return dir;
}

// Split a one-data-row CSV into header and value cells.
std::pair<std::vector<std::string>, std::vector<std::string>> one_row(const fs::path& p) {
    std::istringstream in(slurp(p));
    std::string h, r;
    REQUIRE(std::getline(in, h));
    REQUIRE(std::getline(in, r));
    auto split = [](const std::string& line) {
        std::vector<std::string> out;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                out.push_back(cur);
                cur.clear();
            } else
                cur += c;
        }
        out.push_back(cur);
        return out;
    };
    return {split(h), split(r)};
}

double field(const std::pair<std::vector<std::string>, std::vector<std::string>>& row,
             const std::string& name) {
    for (std::size_t k = 0; k < row.first.size(); ++k)
        if (row.first[k] == name) return std::atof(row.second[k].c_str());
    FAIL("missing column ", name);
    return 0.0;
}

} // namespace

TEST_SUITE("experiments") {

TEST_CASE("polarization curve experiment emits a manifest and stable bytes") {
    fs::path dir = fresh_dir("scurve");
    auto cfg = parse_config_text("[output]\ndir = " + dir.string() + "\n");
    auto result = run_experiment(cfg, experiment_kind::s_curve);
    CHECK(result.all_converged);
    REQUIRE(result.files == std::vector<std::string>{"s_curve.csv", "config_echo.cfg",
                                                     "manifest.txt"});
    std::string manifest = slurp(dir / "manifest.txt");
    CHECK(manifest.find("experiment=s-curve\n") == 0);
    CHECK(manifest.find("file=s_curve.csv rows=601") != std::string::npos);
    CHECK(manifest.find("config=config_echo.cfg") != std::string::npos);
    // echoed config must parse and reproduce the values
    auto back = parse_config_text(slurp(dir / "config_echo.cfg"));
    CHECK(back.out_dir == cfg.out_dir);

    std::string first = slurp(dir / "s_curve.csv");
    run_experiment(cfg, experiment_kind::s_curve);
    CHECK(slurp(dir / "s_curve.csv") == first);
}

TEST_CASE("gate sweep experiment writes one file per bias combination") {
    fs::path dir = fresh_dir("idvg");
    auto cfg = parse_config_text("[ferro]\n"
                                 "a_fe_nm2 = 700\n"
                                 "[sweep]\n"
                                 "step = 0.01\n"
                                 "v_ds_list = 0.7\n"
                                 "directions = up\n"
                                 "[output]\n"
                                 "dir = " +
                                 dir.string() + "\n");
    auto result = run_experiment(cfg, experiment_kind::idvg);
    REQUIRE(result.files ==
            std::vector<std::string>{"idvg_a700_vds0.7_up.csv", "idvg_metrics.csv",
                                     "config_echo.cfg", "manifest.txt"});
    CHECK(slurp(dir / "manifest.txt").find("file=idvg_a700_vds0.7_up.csv rows=91") !=
          std::string::npos);
    auto metrics = one_row(dir / "idvg_metrics.csv");
    CHECK(field(metrics, "a_fe_nm2") == 700.0);
    CHECK(field(metrics, "dibl_mV_V") == 0.0); // single drain bias
    CHECK(field(metrics, "hysteresis_V") == 0.0); // single direction
    CHECK(field(metrics, "ss_mV_dec") > 30.0);
    CHECK(field(metrics, "ss_mV_dec") < 68.0);
}

TEST_CASE("device metrics experiment contrasts the two device flavors") {
    fs::path dir = fresh_dir("metrics");
    auto cfg = parse_config_text("[sweep]\nstep = 0.005\n[output]\ndir = " + dir.string() +
                                 "\n");
    run_experiment(cfg, experiment_kind::device_metrics);
    auto conv = one_row(dir / "metrics_conventional.csv");
    auto nc = one_row(dir / "metrics_nc.csv");
    CHECK(field(conv, "ss_mV_dec") == doctest::Approx(68.0).epsilon(0.05));
    CHECK(field(nc, "ss_mV_dec") < field(conv, "ss_mV_dec"));
    CHECK(field(nc, "v_t_V") > field(conv, "v_t_V"));
    CHECK(field(nc, "i_off_A") < field(conv, "i_off_A"));
    CHECK(field(conv, "hysteresis_V") < 1e-4);
    CHECK(field(nc, "hysteresis_V") < 1e-3);
}

TEST_CASE("worker count does not change emitted bytes") {
    auto make_cfg = [](const fs::path& dir) {
        return parse_config_text("[ferro]\n"
                                 "a_fe_list = 2000, 700\n"
                                 "[sweep]\n"
                                 "step = 0.01\n"
                                 "v_ds_list = 0.05, 0.7\n"
                                 "[output]\n"
                                 "dir = " +
                                 dir.string() + "\n");
    };
    fs::path serial_dir = fresh_dir("idvg_serial");
    fs::path pool_dir = fresh_dir("idvg_pool");
    ::setenv("NCFET_SIM_THREADS", "1", 1);
    auto serial = run_experiment(make_cfg(serial_dir), experiment_kind::idvg);
    ::setenv("NCFET_SIM_THREADS", "3", 1);
    auto pooled = run_experiment(make_cfg(pool_dir), experiment_kind::idvg);
    ::unsetenv("NCFET_SIM_THREADS");
    REQUIRE(serial.files == pooled.files);
    for (const auto& name : serial.files) {
        if (name == "config_echo.cfg" || name == "manifest.txt") continue;
        CHECK(slurp(serial_dir / name) == slurp(pool_dir / name));
    }
}

TEST_CASE("index loop sums every index once and propagates failures") {
    std::atomic<long> sum{0};
    parallel_for(100, [&](int i) { sum += i; });
    CHECK(sum == 4950);
    CHECK_THROWS_WITH_AS(
        parallel_for(8,
                     [](int i) {
                         if (i == 3) throw sim_error(error_kind::invalid_input, "index 3");
                     }),
        doctest::Contains("index 3"), sim_error);
    parallel_for(0, [](int) { FAIL("must not run"); });
}

TEST_CASE("critical area experiment demands a bracket") {
    auto cfg = parse_config_text("[ferro]\na_fe_nm2 = 500\n[output]\ndir = " +
                                 fresh_dir("crit").string() + "\n");
    CHECK_THROWS_WITH_AS(run_experiment(cfg, experiment_kind::critical_area),
                         doctest::Contains("bracket"), sim_error);
}

TEST_CASE("cli names round trip") {
    for (auto kind :
         {experiment_kind::s_curve, experiment_kind::idvg, experiment_kind::idvd,
          experiment_kind::attractor, experiment_kind::critical_area,
          experiment_kind::inverter_vtc, experiment_kind::ro_transient,
          experiment_kind::energy_delay, experiment_kind::device_metrics}) {
        auto parsed = kind_from_cli_name(to_cli_name(kind));
        REQUIRE(parsed.has_value());
        CHECK(*parsed == kind);
    }
    CHECK_FALSE(kind_from_cli_name("bogus").has_value());
}

} // TEST_SUITE
