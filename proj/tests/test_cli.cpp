#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "reeblab/config.hpp"
#include "reeblab/runner.hpp"

using namespace reeblab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("reeblab_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static inline int counter = 0;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config parsing: sections, comments, repeats, errors") {
    std::stringstream good(
        "# experiment\n"
        "[metric]\n"
        "c(2,0) = 0.05\n"
        "c(2,2) = 0.015  # tesseral\n"
        "[task]\n"
        "name = find-orbit\n"
        "guess = equator\n"
        "guess = meridian-xz\n"
        "tol = 1e-10\n");
    const ConfigFile cfg = ConfigFile::parse(good);
    CHECK(cfg.get("task", "name") == "find-orbit");
    CHECK(cfg.get_all("task", "guess").size() == 2);
    CHECK(cfg.coefficient_map("metric").at({2, 0}) == 0.05);

    const ExperimentConfig ec = ExperimentConfig::from_file(cfg);
    CHECK(ec.task == "find-orbit");
    CHECK(ec.tol == 1e-10);
    CHECK(ec.guess_specs.size() == 2);

    std::stringstream bad1("key = 1\n");  // key outside a section
    CHECK_THROWS_AS(ConfigFile::parse(bad1), config_error);
    std::stringstream bad2("[task\nname = scan\n");
    CHECK_THROWS_AS(ConfigFile::parse(bad2), config_error);
    std::stringstream bad3("[task]\nname scan\n");
    CHECK_THROWS_AS(ConfigFile::parse(bad3), config_error);
    std::stringstream bad4("[task]\nname = bogus\n");
    CHECK_THROWS_AS(ExperimentConfig::from_file(ConfigFile::parse(bad4)),
                    config_error);
    // line numbers are reported
    std::stringstream bad5("[task]\nname = scan\noops\n");
    try {
        ConfigFile::parse(bad5);
        CHECK(false);
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("metric section can reference a descriptor file") {
    TempDir tmp;
    {
        std::ofstream d(tmp.path / "metric.txt");
        d << "# zonal\n(2,0) 0.05\n";
    }
    std::stringstream cfgtext("[metric]\nfile = " +
                              (tmp.path / "metric.txt").string() +
                              "\n[task]\nname = identities\n");
    const ExperimentConfig ec =
        ExperimentConfig::from_file(ConfigFile::parse(cfgtext));
    CHECK(ec.metric.coefficients().at({2, 0}) == 0.05);

    std::stringstream both("[metric]\nfile = x\nc(2,0) = 0.05\n[task]\nname = "
                           "identities\n");
    CHECK_THROWS_AS(ExperimentConfig::from_file(ConfigFile::parse(both)),
                    config_error);
    std::stringstream missing("[metric]\nfile = /nonexistent.txt\n[task]\n"
                              "name = identities\n");
    CHECK_THROWS_AS(ExperimentConfig::from_file(ConfigFile::parse(missing)),
                    config_error);
}

TEST_CASE("guess spec parsing") {
    ExperimentConfig ec;
    ec.guess_specs = {"equator", "meridian-xz", "tilt:30", "0,1,0;0,0,1"};
    const ConformalMetric round;
    const auto guesses = ec.parse_guesses(round);
    REQUIRE(guesses.size() == 4);
    CHECK((guesses[0].x - Eigen::Vector3d(1, 0, 0)).norm() < 1e-12);
    CHECK((guesses[3].x - Eigen::Vector3d(0, 1, 0)).norm() < 1e-12);
    ec.guess_specs = {"nonsense"};
    CHECK_THROWS_AS(ec.parse_guesses(round), config_error);
}

TEST_CASE("identities task writes a report and passes thresholds") {
    TempDir tmp;
    std::stringstream cfgtext(
        "[metric]\n"
        "c(2,0) = 0.05\n"
        "[task]\n"
        "name = identities\n"
        "seed = 42\n");
    const ExperimentConfig ec =
        ExperimentConfig::from_file(ConfigFile::parse(cfgtext));
    std::ostringstream log;
    const int status = run_experiment(ec, tmp.path.string(), log);
    CHECK(status == 0);
    const std::string report = slurp(tmp.path / "identities.txt");
    CHECK(report.find("max_pullback_residual_F") != std::string::npos);
    CHECK(report.find("gauss_bonnet_gap") != std::string::npos);
}

TEST_CASE("find-orbit task emits a record that re-validates") {
    TempDir tmp;
    std::stringstream cfgtext(
        "[metric]\n"
        "c(2,0) = 0.05\n"
        "[task]\n"
        "name = find-orbit\n"
        "guess = equator\n");
    const ExperimentConfig ec =
        ExperimentConfig::from_file(ConfigFile::parse(cfgtext));
    std::ostringstream log;
    CHECK(run_experiment(ec, tmp.path.string(), log) == 0);
    const ClosedOrbitRecord rec =
        ClosedOrbitRecord::load_file((tmp.path / "orbit.rec").string());
    rec.validate();
    CHECK(rec.classification == Stability::Elliptic);
}

TEST_CASE("integrate task: deterministic byte-identical output") {
    TempDir tmp1, tmp2;
    std::stringstream cfgtext(
        "[metric]\n"
        "c(2,2) = 0.03\n"
        "[task]\n"
        "name = integrate\n"
        "chart = geodesic\n"
        "T = 5\n"
        "samples = 50\n"
        "guess = equator\n");
    const ExperimentConfig ec =
        ExperimentConfig::from_file(ConfigFile::parse(cfgtext));
    std::ostringstream log1, log2;
    CHECK(run_experiment(ec, tmp1.path.string(), log1) == 0);
    CHECK(run_experiment(ec, tmp2.path.string(), log2) == 0);
    CHECK(slurp(tmp1.path / "trajectory.csv") ==
          slurp(tmp2.path / "trajectory.csv"));
    CHECK(slurp(tmp1.path / "trajectory.csv").rfind("t,chart,x0", 0) == 0);
}

TEST_CASE("malformed config exits with validation status and no outputs") {
    TempDir tmp;
    std::stringstream cfgtext(
        "[task]\n"
        "name = scan\n");  // scan without a family section
    CHECK_THROWS_AS(ExperimentConfig::from_file(ConfigFile::parse(cfgtext)),
                    config_error);
    CHECK(fs::is_empty(tmp.path));
}

TEST_CASE("scan handles the eps = 0 row: round metric, all degenerate") {
    std::map<std::pair<int, int>, double> family{{{2, 0}, 1.0}};
    const ScanReport report = elliptic_scan(family, {0.0}, {"equator"}, 1e-9, 1);
    REQUIRE(report.rows.size() == 1);
    CHECK(report.rows[0].converged);
    CHECK(report.rows[0].record.classification == Stability::Degenerate);
    CHECK_FALSE(report.rows[0].record.cz_index.has_value());  // no parity run
    CHECK_FALSE(report.first_elliptic_eps.has_value());
}

TEST_CASE("near-round cells fall in the degeneracy band, not a stability class") {
    // at eps = 5e-5 the doubled equator trace sits within 1e-6 of 2: the
    // scan must flag Degenerate rather than force an elliptic label
    std::map<std::pair<int, int>, double> family{{{2, 0}, 1.0}};
    const ScanReport report =
        elliptic_scan(family, {5e-5, 3e-4}, {"equator"}, 1e-9, 1);
    REQUIRE(report.rows.size() == 2);
    CHECK(report.rows[0].record.classification == Stability::Degenerate);
    CHECK(report.rows[1].record.classification == Stability::Elliptic);
}

TEST_CASE("small elliptic scan finds elliptic cells deterministically") {
    std::map<std::pair<int, int>, double> family{{{2, 0}, 1.0}, {{2, 2}, 0.3}};
    const std::vector<double> eps = {0.04, 0.08};
    const ScanReport report =
        elliptic_scan(family, eps, {"equator"}, 1e-9, 2);
    REQUIRE(report.rows.size() == 2);
    for (const ScanCell& cell : report.rows) {
        CHECK(cell.converged);
        if (cell.record.cz_index) CHECK(cell.parity_ok);
    }
    // deterministic CSV across runs (and thread counts)
    const ScanReport again = elliptic_scan(family, eps, {"equator"}, 1e-9, 1);
    std::ostringstream csv1, csv2;
    report.write_csv(csv1);
    again.write_csv(csv2);
    CHECK(csv1.str() == csv2.str());
}

TEST_CASE("atomic writes leave no partial files") {
    TempDir tmp;
    const std::string target = (tmp.path / "x" / "data.txt").string();
    write_file_atomic(target, "payload");
    CHECK(slurp(tmp.path / "x" / "data.txt") == "payload");
    for (const auto& entry : fs::directory_iterator(tmp.path / "x"))
        CHECK(entry.path().filename().string().find(".tmp") == std::string::npos);
}

#ifdef REEBLAB_CLI_PATH
TEST_CASE("command line binary: exit codes through a real process") {
    TempDir tmp;
    const std::string cli = REEBLAB_CLI_PATH;
    {
        std::ofstream cfg(tmp.path / "ok.cfg");
        cfg << "[metric]\nc(2,0) = 0.05\n[task]\nname = integrate\nT = 2\n"
               "samples = 10\nguess = equator\n";
    }
    {
        std::ofstream cfg(tmp.path / "bad.cfg");
        cfg << "[task]\nname = integrate\nT = 2\n";  // no metric section
    }
    auto run = [&](const std::string& args) {
        const std::string cmd =
            cli + " " + args + " >" + (tmp.path / "stdout").string() + " 2>" +
            (tmp.path / "stderr").string();
        const int raw = std::system(cmd.c_str());
        return WEXITSTATUS(raw);
    };
    CHECK(run("integrate --config " + (tmp.path / "ok.cfg").string() +
              " --out " + (tmp.path / "out").string()) == 0);
    CHECK(fs::exists(tmp.path / "out" / "trajectory.csv"));
    CHECK(run("integrate --config " + (tmp.path / "bad.cfg").string()) == 1);
    CHECK(run("integrate --config " + (tmp.path / "missing.cfg").string()) == 1);
    // subcommand/task mismatch
    CHECK(run("scan --config " + (tmp.path / "ok.cfg").string()) == 1);
}
#endif
