#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "abcnet/benchmarks.hpp"
#include "abcnet/experiment.hpp"

using namespace abcnet;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("abcnet_exp_" + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
};

}  // namespace

TEST_CASE("topology string parsing") {
    CHECK(experiment::parse_topology("3-3-1") == std::vector<Eigen::Index>{3, 3, 1});
    CHECK(experiment::parse_topology("4-2-4") == std::vector<Eigen::Index>{4, 2, 4});
    CHECK_THROWS(experiment::parse_topology("3-1"));
    CHECK_THROWS(experiment::parse_topology("3-x-1"));
    CHECK_THROWS(experiment::parse_topology("3-0-1"));
}

TEST_CASE("benchmark functions") {
    CHECK(benchmarks::sphere(Vector::Zero(4)) == 0.0);
    CHECK(benchmarks::rosenbrock(Vector::Ones(5)) == 0.0);
    CHECK(benchmarks::rastrigin(Vector::Zero(3)) == doctest::Approx(0.0));
    CHECK(benchmarks::rastrigin(Vector::Constant(3, 0.5)) > 0.0);
    CHECK_THROWS(benchmarks::by_name("ackley"));
    CHECK(benchmarks::by_name("sphere") == &benchmarks::sphere);
}

TEST_CASE("synthetic catalog generation") {
    TempDir dir;
    const auto p1 = dir.path / "a.csv";
    const auto p2 = dir.path / "b.csv";
    experiment::write_synth_catalog(500, 7, p1.string());
    experiment::write_synth_catalog(500, 7, p2.string());

    SUBCASE("deterministic per seed") { CHECK(slurp(p1) == slurp(p2)); }
    SUBCASE("different seed differs") {
        experiment::write_synth_catalog(500, 8, p2.string());
        CHECK(slurp(p1) != slurp(p2));
    }
    SUBCASE("row count and schema") {
        std::ifstream in(p1);
        std::string line;
        std::size_t lines = 0;
        REQUIRE(std::getline(in, line));
        CHECK(line == "datetime,latitude,longitude,depth,magnitude");
        while (std::getline(in, line)) ++lines;
        CHECK(lines == 500);
    }
    SUBCASE("magnitudes stay in [2.0, 7.5] and parse under the loader") {
        data::RegionFilter filter;
        const auto records = data::load_catalog(p1.string(), filter);
        CHECK(records.size() == 500);
        for (const auto& r : records) {
            CHECK(r.magnitude >= 2.0);
            CHECK(r.magnitude <= 7.5);
        }
    }
    SUBCASE("length below 100 rejected") {
        CHECK_THROWS(experiment::write_synth_catalog(99, 7, p2.string()));
    }
}

TEST_CASE("config file loading and overrides") {
    TempDir dir;
    const auto cfg_path = dir.path / "exp.cfg";
    {
        std::ofstream out(cfg_path);
        out << "# experiment settings\n"
               "topology = 2-2-1\n"
               "trainer = abc\n"
               "horizon = 2\n"
               "trials = 3\n"
               "abc.mcn = 50\n"
               "bp.learning_rate = 0.25\n"
               "data.catalog = cat.csv\n";
    }
    auto cfg = experiment::load_config(cfg_path.string());
    CHECK(cfg.topology == "2-2-1");
    CHECK(cfg.trainer == "abc");
    CHECK(cfg.horizon == 2);
    CHECK(cfg.trials == 3);
    CHECK(cfg.abc_mcn == 50);
    CHECK(cfg.bp.learning_rate == 0.25);
    CHECK(cfg.catalog_path == "cat.csv");

    experiment::apply_override(cfg, "abc.mcn", "75");
    CHECK(cfg.abc_mcn == 75);
    CHECK_THROWS(experiment::apply_override(cfg, "abc.bogus", "1"));

    {
        std::ofstream out(cfg_path);
        out << "no equals sign here\n";
    }
    CHECK_THROWS(experiment::load_config(cfg_path.string()));
}

TEST_CASE("small end-to-end run, artifacts and summary round-trip") {
    TempDir dir;
    const auto catalog = dir.path / "catalog.csv";
    experiment::write_synth_catalog(120, 3, catalog.string());

    experiment::ExperimentConfig cfg;
    cfg.topology = "2-2-1";
    cfg.trainer = "both";
    cfg.horizon = 1;
    cfg.trials = 2;
    cfg.catalog_path = catalog.string();
    cfg.abc_mcn = 20;
    cfg.bp.max_epochs = 30;
    cfg.output_dir = (dir.path / "out").string();
    cfg.master_seed = 42;

    const auto report = experiment::run_experiment(cfg);
    REQUIRE(report.trainers.size() == 2);
    CHECK(report.trainers[0].first == "abc");
    CHECK(report.trainers[1].first == "bp");
    for (const auto& [name, rep] : report.trainers) {
        REQUIRE(rep.trials.size() == 2);
        CHECK(rep.trials[0].seed == 42);
        CHECK(rep.trials[1].seed == 43);
        CHECK(rep.mean_test_mse >= rep.min_test_mse);
        CHECK(rep.mean_test_mse <= rep.max_test_mse);
        CHECK(std::abs(rep.mean_test_mse -
                       (rep.trials[0].test.mse + rep.trials[1].test.mse) / 2.0) < 1e-15);
    }

    SUBCASE("artifact files exist with the documented names") {
        for (const char* trainer : {"abc", "bp"}) {
            for (unsigned t = 0; t < 2; ++t) {
                const fs::path base = dir.path / "out" / trainer;
                const std::string stem = "trial_" + std::to_string(t);
                CHECK(fs::exists(base / (stem + "_model.json")));
                CHECK(fs::exists(base / (stem + "_convergence.csv")));
                CHECK(fs::exists(base / (stem + "_predictions_train.csv")));
                CHECK(fs::exists(base / (stem + "_predictions_test.csv")));
            }
        }
        CHECK(fs::exists(dir.path / "out" / "summary.json"));
    }

    SUBCASE("summary JSON re-parses to an equivalent report") {
        const auto j = nlohmann::json::parse(slurp(dir.path / "out" / "summary.json"));
        const auto parsed = experiment::summary_from_json(j);
        CHECK(parsed.equivalent(report));
    }

    SUBCASE("model JSON carries topology, weights, and scaler") {
        const auto j = nlohmann::json::parse(
            slurp(dir.path / "out" / "abc" / "trial_0_model.json"));
        CHECK(j.at("topology") == std::vector<int>{2, 2, 1});
        CHECK(j.at("biases_enabled") == true);
        CHECK(j.at("values").size() == 9);
        CHECK(j.at("scaler").contains("observed_min"));
        CHECK(j.at("scaler").contains("observed_max"));
    }

    SUBCASE("rerun with the same master seed is byte-identical") {
        const std::string first = slurp(dir.path / "out" / "summary.json");
        cfg.output_dir = (dir.path / "out2").string();
        experiment::run_experiment(cfg);
        CHECK(first == slurp(dir.path / "out2" / "summary.json"));
    }

    SUBCASE("changing the master seed changes outcomes, not the schema") {
        const auto j1 = nlohmann::json::parse(slurp(dir.path / "out" / "summary.json"));
        cfg.master_seed = 43;
        cfg.output_dir = (dir.path / "out3").string();
        experiment::run_experiment(cfg);
        const auto j2 = nlohmann::json::parse(slurp(dir.path / "out3" / "summary.json"));
        CHECK(j1 != j2);
        CHECK(j1.at("trainers").at("abc").at("trials").size() ==
              j2.at("trainers").at("abc").at("trials").size());
        CHECK(j1.at("trainers").at("abc").at("trials")[0].size() ==
              j2.at("trainers").at("abc").at("trials")[0].size());
    }
}

TEST_CASE("mcn=1 yields one convergence row per trial") {
    TempDir dir;
    const auto catalog = dir.path / "catalog.csv";
    experiment::write_synth_catalog(120, 3, catalog.string());

    experiment::ExperimentConfig cfg;
    cfg.topology = "2-2-1";
    cfg.trainer = "abc";
    cfg.trials = 1;
    cfg.catalog_path = catalog.string();
    cfg.abc_mcn = 1;
    cfg.output_dir = (dir.path / "out").string();
    experiment::run_experiment(cfg);

    const std::string csv = slurp(dir.path / "out" / "abc" / "trial_0_convergence.csv");
    std::size_t rows = 0;
    for (char c : csv) rows += c == '\n';
    CHECK(rows == 2);  // header + 1 data row
    CHECK(csv.rfind("cycle,mse", 0) == 0);
}

TEST_CASE("multi-output topology predicts the next k values jointly") {
    TempDir dir;
    const auto catalog = dir.path / "catalog.csv";
    experiment::write_synth_catalog(150, 9, catalog.string());

    experiment::ExperimentConfig cfg;
    cfg.topology = "4-2-4";
    cfg.trainer = "abc";
    cfg.trials = 1;
    cfg.catalog_path = catalog.string();
    cfg.abc_mcn = 10;
    cfg.output_dir = (dir.path / "out").string();
    const auto report = experiment::run_experiment(cfg);
    CHECK(report.trainers[0].second.trials[0].test.n > 0);

    const std::string csv =
        slurp(dir.path / "out" / "abc" / "trial_0_predictions_test.csv");
    CHECK(csv.rfind("index,actual_raw_1,actual_raw_2,actual_raw_3,actual_raw_4,"
                    "predicted_raw_1,predicted_raw_2,predicted_raw_3,predicted_raw_4",
                    0) == 0);
}

TEST_CASE("bad experiment parameters are rejected") {
    experiment::ExperimentConfig cfg;
    cfg.trainer = "sgd";
    CHECK_THROWS(experiment::run_experiment(cfg));
    cfg.trainer = "abc";
    cfg.horizon = 6;
    CHECK_THROWS(experiment::run_experiment(cfg));
}
