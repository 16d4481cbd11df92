#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "abcnet/benchmarks.hpp"
#include "abcnet/experiment.hpp"

namespace {

int run_synth(std::size_t length, std::uint64_t seed, const std::string& out) {
    abcnet::experiment::write_synth_catalog(length, seed, out);
    std::cout << "wrote " << length << " rows to " << out << "\n";
    return 0;
}

int run_train(const std::string& config_path, const std::string& trainer,
              std::int64_t seed, const std::string& out,
              const std::vector<std::string>& sets) {
    auto cfg = abcnet::experiment::load_config(config_path);
    if (!trainer.empty()) cfg.trainer = trainer;
    if (seed >= 0) cfg.master_seed = static_cast<std::uint64_t>(seed);
    if (!out.empty()) cfg.output_dir = out;
    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--set expects key=value, got: " + kv);
        abcnet::experiment::apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    const auto report = abcnet::experiment::run_experiment(cfg);
    for (const auto& [name, rep] : report.trainers)
        std::printf("%s: mean test MSE %.8g (min %.8g, max %.8g) over %zu trials\n",
                    name.c_str(), rep.mean_test_mse, rep.min_test_mse, rep.max_test_mse,
                    rep.trials.size());
    std::printf("wall time %.2f s; artifacts in %s\n", report.wall_time_seconds,
                cfg.output_dir.c_str());
    return 0;
}

int run_bench(const std::string& function, int dim, unsigned mcn, unsigned colony,
              std::uint64_t seed, double lo, double hi) {
    const auto fn = abcnet::benchmarks::by_name(function);
    abcnet::ABCConfig cfg(dim, abcnet::Bounds(dim, lo, hi), mcn, colony, seed);
    const auto result = abcnet::run(cfg, fn);
    std::printf("%s D=%d: best objective %.8g after %llu evaluations "
                "(nominal OFE %llu)\n",
                function.c_str(), dim, result.best_objective,
                static_cast<unsigned long long>(result.objective_evaluations),
                static_cast<unsigned long long>(result.ofe_nominal));
    std::printf("gap to optimum: %.8g\n", result.best_objective);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ABC-trained MLP time-series experiments"};
    app.require_subcommand(1);

    auto* synth = app.add_subcommand("synth", "generate a synthetic catalog CSV");
    std::size_t length = 500;
    std::uint64_t synth_seed = 7;
    std::string synth_out = "catalog.csv";
    synth->add_option("--length", length, "number of daily rows")->required();
    synth->add_option("--seed", synth_seed, "generator seed")->required();
    synth->add_option("--out", synth_out, "output path")->required();

    auto* train = app.add_subcommand("train", "run the training experiment");
    std::string config_path, trainer, out_dir;
    std::int64_t seed = -1;
    std::vector<std::string> sets;
    train->add_option("--config", config_path, "experiment config file")->required();
    train->add_option("--trainer", trainer, "abc | bp | both");
    train->add_option("--seed", seed, "master seed override");
    train->add_option("--out", out_dir, "output directory override");
    train->add_option("--set", sets, "extra key=value overrides (flags win over file)");

    auto* bench = app.add_subcommand("bench-abc", "optimizer benchmark run");
    std::string function;
    int dim = 10;
    unsigned mcn = 1000, colony = 50;
    std::uint64_t bench_seed = 1;
    double lo = -10.0, hi = 10.0;
    bench->add_option("--function", function, "sphere | rosenbrock | rastrigin")->required();
    bench->add_option("--dim", dim, "problem dimension")->required();
    bench->add_option("--mcn", mcn, "maximum cycle number");
    bench->add_option("--colony", colony, "colony size (SN = colony/2)");
    bench->add_option("--seed", bench_seed, "seed");
    bench->add_option("--lower", lo, "lower bound");
    bench->add_option("--upper", hi, "upper bound");

    CLI11_PARSE(app, argc, argv);
    try {
        if (synth->parsed()) return run_synth(length, synth_seed, synth_out);
        if (train->parsed()) return run_train(config_path, trainer, seed, out_dir, sets);
        if (bench->parsed()) return run_bench(function, dim, mcn, colony, bench_seed, lo, hi);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
