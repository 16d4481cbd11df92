#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "abcnet/abc.hpp"
#include "abcnet/bp.hpp"
#include "abcnet/metrics.hpp"
#include "abcnet/mlp.hpp"
#include "abcnet/pipeline.hpp"

namespace abcnet::experiment {

struct ExperimentConfig {
    std::string topology = "3-3-1";
    std::string trainer = "both";  // abc | bp | both
    int horizon = 1;
    unsigned trials = 5;

    std::string catalog_path;
    data::RegionFilter filter;
    std::string aggregator = "max";
    std::string gap_policy = "carry_forward";

    unsigned abc_colony_size = 50;
    unsigned abc_mcn = 1000;
    unsigned abc_perturb_dims = 1;
    std::int64_t abc_limit = -1;  // -1 means food_number * D
    double abc_lower = -10.0;
    double abc_upper = 10.0;

    bp::BPConfig bp;

    std::string output_dir = "out";
    std::uint64_t master_seed = 1;
};

// Flat dotted key=value config file ('#' comments, blank lines ignored).
ExperimentConfig load_config(const std::string& path);
void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value);

std::vector<Eigen::Index> parse_topology(const std::string& text);

struct TrialResult {
    std::uint64_t seed = 0;
    metrics::EvalReport train;
    metrics::EvalReport test;
    double train_mse_raw = 0;
    double test_mse_raw = 0;
    std::uint64_t evaluations = 0;  // objective evals (abc) or epochs (bp)
    std::uint64_t ofe_nominal = 0;  // abc only; 0 for bp
    std::string stop_reason;        // bp only; empty for abc

    bool operator==(const TrialResult&) const = default;
};

struct TrainerReport {
    std::vector<TrialResult> trials;
    double mean_train_mse = 0;
    double mean_test_mse = 0;
    double min_test_mse = 0;
    double max_test_mse = 0;

    bool operator==(const TrainerReport&) const = default;
};

struct RunReport {
    std::string topology;
    int horizon = 1;
    unsigned trials = 0;
    std::uint64_t master_seed = 0;
    std::vector<std::pair<std::string, TrainerReport>> trainers;  // keyed abc / bp
    double wall_time_seconds = 0;  // reported on stdout, never serialized

    bool equivalent(const RunReport& other) const {
        return topology == other.topology && horizon == other.horizon &&
               trials == other.trials && master_seed == other.master_seed &&
               trainers == other.trainers;
    }
};

// Runs the configured trainer(s) for `trials` seeded trials and writes
// summary.json plus per-trial artifacts under output_dir/<trainer>/.
RunReport run_experiment(const ExperimentConfig& cfg);

nlohmann::json summary_to_json(const RunReport& report);
RunReport summary_from_json(const nlohmann::json& j);

// Deterministic synthetic catalog: one event per day starting 2010-01-01,
// magnitudes a sinusoid mixture plus AR(1) noise clamped into [2.0, 7.5].
void write_synth_catalog(std::size_t length, std::uint64_t seed, const std::string& out_path);

}  // namespace abcnet::experiment
