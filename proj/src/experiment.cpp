#include "abcnet/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace abcnet::experiment {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<Eigen::Index> parse_topology(const std::string& text) {
    std::vector<Eigen::Index> sizes;
    std::istringstream in(text);
    std::string part;
    while (std::getline(in, part, '-')) {
        try {
            const long v = std::stol(part);
            if (v < 1) throw std::invalid_argument("non-positive layer size");
            sizes.push_back(v);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad topology string: " + text);
        }
    }
    if (sizes.size() < 3)
        throw std::invalid_argument("topology needs at least 3 layers: " + text);
    return sizes;
}

void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    auto as_u = [&] { return static_cast<std::uint64_t>(std::stoull(value)); };
    auto as_d = [&] { return std::stod(value); };
    if (key == "topology") cfg.topology = value;
    else if (key == "trainer") cfg.trainer = value;
    else if (key == "horizon") cfg.horizon = std::stoi(value);
    else if (key == "trials") cfg.trials = static_cast<unsigned>(as_u());
    else if (key == "master_seed") cfg.master_seed = as_u();
    else if (key == "output_dir") cfg.output_dir = value;
    else if (key == "data.catalog") cfg.catalog_path = value;
    else if (key == "data.aggregator") cfg.aggregator = value;
    else if (key == "data.gap_policy") cfg.gap_policy = value;
    else if (key == "data.lat_min") cfg.filter.lat_min = as_d();
    else if (key == "data.lat_max") cfg.filter.lat_max = as_d();
    else if (key == "data.lon_min") cfg.filter.lon_min = as_d();
    else if (key == "data.lon_max") cfg.filter.lon_max = as_d();
    else if (key == "data.date_min") cfg.filter.date_min = value;
    else if (key == "data.date_max") cfg.filter.date_max = value;
    else if (key == "abc.colony_size") cfg.abc_colony_size = static_cast<unsigned>(as_u());
    else if (key == "abc.mcn") cfg.abc_mcn = static_cast<unsigned>(as_u());
    else if (key == "abc.perturb_dims") cfg.abc_perturb_dims = static_cast<unsigned>(as_u());
    else if (key == "abc.limit") cfg.abc_limit = std::stoll(value);
    else if (key == "abc.lower") cfg.abc_lower = as_d();
    else if (key == "abc.upper") cfg.abc_upper = as_d();
    else if (key == "bp.learning_rate") cfg.bp.learning_rate = as_d();
    else if (key == "bp.momentum") cfg.bp.momentum = as_d();
    else if (key == "bp.max_epochs") cfg.bp.max_epochs = static_cast<unsigned>(as_u());
    else if (key == "bp.target_mse") cfg.bp.target_mse = as_d();
    else if (key == "bp.init_range") cfg.bp.init_range = as_d();
    else throw std::invalid_argument("unknown config key: " + key);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    ExperimentConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": expected key = value");
            continue;
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        apply_override(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

namespace {

std::string civil_date(std::int64_t days_since_epoch) {
    std::int64_t z = days_since_epoch + 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02u",
                  static_cast<long long>(y + (m <= 2)), m, d);
    return buf;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct Evaluated {
    metrics::EvalReport report;
    double mse_raw = 0;
    std::vector<Vector> actual_raw;     // per sample, per output component
    std::vector<Vector> predicted_raw;
};

Evaluated evaluate(const mlp::Topology& topo, const Vector& weights,
                   const std::vector<mlp::SamplePair>& samples,
                   const data::ScalerParams& scaler) {
    Evaluated ev;
    std::vector<Vector> actual, predicted;
    std::vector<double> actual_flat, predicted_flat, actual_raw_flat, predicted_raw_flat;
    for (const auto& s : samples) {
        Vector out = mlp::forward(topo, weights, s.input);
        actual.push_back(s.target);
        predicted.push_back(out);
        Vector a_raw(out.size()), p_raw(out.size());
        for (Eigen::Index k = 0; k < out.size(); ++k) {
            actual_flat.push_back(s.target[k]);
            predicted_flat.push_back(out[k]);
            a_raw[k] = data::invert(scaler, s.target[k]);
            p_raw[k] = data::invert(scaler, out[k]);
            actual_raw_flat.push_back(a_raw[k]);
            predicted_raw_flat.push_back(p_raw[k]);
        }
        ev.actual_raw.push_back(std::move(a_raw));
        ev.predicted_raw.push_back(std::move(p_raw));
    }
    ev.report.mse = metrics::mse(actual, predicted);
    ev.report.nmse = metrics::nmse(actual_flat, predicted_flat);
    ev.report.accuracy_pct = metrics::accuracy_pct(actual_raw_flat, predicted_raw_flat);
    ev.report.n = samples.size();
    ev.mse_raw = metrics::mse(ev.actual_raw, ev.predicted_raw);
    return ev;
}

std::string predictions_csv(const Evaluated& ev) {
    std::ostringstream out;
    const auto k = ev.actual_raw.empty() ? 1 : ev.actual_raw.front().size();
    out << "index";
    if (k == 1) {
        out << ",actual_raw,predicted_raw";
    } else {
        for (Eigen::Index c = 1; c <= k; ++c) out << ",actual_raw_" << c;
        for (Eigen::Index c = 1; c <= k; ++c) out << ",predicted_raw_" << c;
    }
    out << "\n";
    for (std::size_t i = 0; i < ev.actual_raw.size(); ++i) {
        out << i;
        for (Eigen::Index c = 0; c < k; ++c) out << "," << fmt(ev.actual_raw[i][c]);
        for (Eigen::Index c = 0; c < k; ++c) out << "," << fmt(ev.predicted_raw[i][c]);
        out << "\n";
    }
    return out.str();
}

std::string convergence_csv(const char* step_name,
                            const std::vector<std::pair<unsigned, double>>& history) {
    std::ostringstream out;
    out << step_name << ",mse\n";
    for (const auto& [step, value] : history) out << step << "," << fmt(value) << "\n";
    return out.str();
}

json model_json(const mlp::Topology& topo, const Vector& weights,
                const data::ScalerParams& scaler) {
    json j;
    j["topology"] = topo.layer_sizes;
    j["biases_enabled"] = topo.biases_enabled;
    j["values"] = std::vector<double>(weights.data(), weights.data() + weights.size());
    j["scaler"] = {{"observed_min", scaler.observed_min}, {"observed_max", scaler.observed_max}};
    return j;
}

void finish_aggregates(TrainerReport& rep) {
    rep.mean_train_mse = 0;
    rep.mean_test_mse = 0;
    rep.min_test_mse = std::numeric_limits<double>::infinity();
    rep.max_test_mse = -std::numeric_limits<double>::infinity();
    for (const auto& t : rep.trials) {
        rep.mean_train_mse += t.train.mse;
        rep.mean_test_mse += t.test.mse;
        rep.min_test_mse = std::min(rep.min_test_mse, t.test.mse);
        rep.max_test_mse = std::max(rep.max_test_mse, t.test.mse);
    }
    rep.mean_train_mse /= static_cast<double>(rep.trials.size());
    rep.mean_test_mse /= static_cast<double>(rep.trials.size());
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg.trainer != "abc" && cfg.trainer != "bp" && cfg.trainer != "both")
        throw std::invalid_argument("trainer must be abc, bp, or both");
    if (cfg.horizon < 1 || cfg.horizon > 5)
        throw std::invalid_argument("horizon must be in [1,5]");
    if (cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");

    const mlp::Topology topo(parse_topology(cfg.topology));
    const auto records = data::load_catalog(cfg.catalog_path, cfg.filter);
    const auto daily = data::daily_series(records,
                                          data::aggregator_from_string(cfg.aggregator));
    std::vector<double> values;
    values.reserve(daily.size());
    for (const auto& [day, v] : daily) values.push_back(v);

    const int window = static_cast<int>(topo.inputs());
    const int outputs = static_cast<int>(topo.outputs());
    const data::WindowedDataset ds =
        data::build_dataset(values, window, cfg.horizon, outputs);

    const Eigen::Index dim = mlp::dimension(topo);
    const auto objective = mlp::as_objective(topo, ds.train);

    RunReport report;
    report.topology = cfg.topology;
    report.horizon = cfg.horizon;
    report.trials = cfg.trials;
    report.master_seed = cfg.master_seed;

    std::vector<std::string> trainers;
    if (cfg.trainer == "both") trainers = {"abc", "bp"};
    else trainers = {cfg.trainer};

    for (const std::string& name : trainers) {
        const fs::path dir = fs::path(cfg.output_dir) / name;
        fs::create_directories(dir);
        TrainerReport trainer_rep;
        for (unsigned t = 0; t < cfg.trials; ++t) {
            const std::uint64_t seed = cfg.master_seed + t;
            TrialResult trial;
            trial.seed = seed;
            Vector weights;
            std::string convergence;
            try {
                if (name == "abc") {
                    ABCConfig abc_cfg(dim, Bounds(dim, cfg.abc_lower, cfg.abc_upper),
                                      cfg.abc_mcn, cfg.abc_colony_size, seed);
                    if (cfg.abc_limit > 0) abc_cfg.limit = static_cast<unsigned>(cfg.abc_limit);
                    abc_cfg.perturb_dims = cfg.abc_perturb_dims;
                    const ABCResult res = run(abc_cfg, objective);
                    weights = res.best_position;
                    trial.evaluations = res.objective_evaluations;
                    trial.ofe_nominal = res.ofe_nominal;
                    convergence = convergence_csv("cycle", res.history);
                } else {
                    bp::BPConfig bp_cfg = cfg.bp;
                    bp_cfg.seed = seed;
                    auto [w, hist] = bp::train(topo, ds.train, bp_cfg);
                    weights = w;
                    trial.evaluations = hist.epochs.size();
                    trial.stop_reason = hist.stop_reason == bp::StopReason::target_reached
                                            ? "target_reached"
                                            : "max_epochs";
                    convergence = convergence_csv("epoch", hist.epochs);
                }
                const Evaluated train_ev = evaluate(topo, weights, ds.train, ds.scaler);
                const Evaluated test_ev = evaluate(topo, weights, ds.test, ds.scaler);
                trial.train = train_ev.report;
                trial.test = test_ev.report;
                trial.train_mse_raw = train_ev.mse_raw;
                trial.test_mse_raw = test_ev.mse_raw;

                const std::string stem = "trial_" + std::to_string(t);
                write_text((dir / (stem + "_model.json")).string(),
                           model_json(topo, weights, ds.scaler).dump(2) + "\n");
                write_text((dir / (stem + "_convergence.csv")).string(), convergence);
                write_text((dir / (stem + "_predictions_train.csv")).string(),
                           predictions_csv(train_ev));
                write_text((dir / (stem + "_predictions_test.csv")).string(),
                           predictions_csv(test_ev));
            } catch (const std::exception& e) {
                throw std::runtime_error("trainer " + name + ", trial " + std::to_string(t) +
                                         ": " + e.what());
            }
            trainer_rep.trials.push_back(std::move(trial));
        }
        finish_aggregates(trainer_rep);
        report.trainers.emplace_back(name, std::move(trainer_rep));
    }

    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    fs::create_directories(cfg.output_dir);
    write_text((fs::path(cfg.output_dir) / "summary.json").string(),
               summary_to_json(report).dump(2) + "\n");
    return report;
}

namespace {

json eval_to_json(const metrics::EvalReport& r) {
    return {{"mse", r.mse}, {"nmse", r.nmse}, {"accuracy_pct", r.accuracy_pct}, {"n", r.n}};
}

metrics::EvalReport eval_from_json(const json& j) {
    return {j.at("mse"), j.at("nmse"), j.at("accuracy_pct"), j.at("n")};
}

}  // namespace

json summary_to_json(const RunReport& report) {
    json j;
    j["topology"] = report.topology;
    j["horizon"] = report.horizon;
    j["trials"] = report.trials;
    j["master_seed"] = report.master_seed;
    json trainers = json::object();
    for (const auto& [name, rep] : report.trainers) {
        json trials = json::array();
        for (const auto& t : rep.trials) {
            trials.push_back({{"seed", t.seed},
                              {"train", eval_to_json(t.train)},
                              {"test", eval_to_json(t.test)},
                              {"train_mse_raw", t.train_mse_raw},
                              {"test_mse_raw", t.test_mse_raw},
                              {"evaluations", t.evaluations},
                              {"ofe_nominal", t.ofe_nominal},
                              {"stop_reason", t.stop_reason}});
        }
        trainers[name] = {{"trials", trials},
                          {"aggregate",
                           {{"mean_train_mse", rep.mean_train_mse},
                            {"mean_test_mse", rep.mean_test_mse},
                            {"min_test_mse", rep.min_test_mse},
                            {"max_test_mse", rep.max_test_mse}}}};
    }
    j["trainers"] = trainers;
    return j;
}

RunReport summary_from_json(const json& j) {
    RunReport report;
    report.topology = j.at("topology");
    report.horizon = j.at("horizon");
    report.trials = j.at("trials");
    report.master_seed = j.at("master_seed");
    for (const auto& [name, rep_j] : j.at("trainers").items()) {
        TrainerReport rep;
        for (const auto& t_j : rep_j.at("trials")) {
            TrialResult t;
            t.seed = t_j.at("seed");
            t.train = eval_from_json(t_j.at("train"));
            t.test = eval_from_json(t_j.at("test"));
            t.train_mse_raw = t_j.at("train_mse_raw");
            t.test_mse_raw = t_j.at("test_mse_raw");
            t.evaluations = t_j.at("evaluations");
            t.ofe_nominal = t_j.at("ofe_nominal");
            t.stop_reason = t_j.at("stop_reason");
            rep.trials.push_back(std::move(t));
        }
        const auto& agg = rep_j.at("aggregate");
        rep.mean_train_mse = agg.at("mean_train_mse");
        rep.mean_test_mse = agg.at("mean_test_mse");
        rep.min_test_mse = agg.at("min_test_mse");
        rep.max_test_mse = agg.at("max_test_mse");
        report.trainers.emplace_back(name, std::move(rep));
    }
    return report;
}

void write_synth_catalog(std::size_t length, std::uint64_t seed, const std::string& out_path) {
    if (length < 100) throw std::invalid_argument("synth: length must be >= 100");
    RandomSource rng(seed);
    auto gaussian = [&rng] {
        // Box-Muller from the deterministic uniform source
        const double u1 = std::max(rng.uniform01(), 1e-300);
        const double u2 = rng.uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    };

    std::ostringstream out;
    out << "datetime,latitude,longitude,depth,magnitude\n";
    const std::int64_t day0 = data::parse_date("2010-01-01") / 86400;
    double ar = 0.0;
    for (std::size_t t = 0; t < length; ++t) {
        ar = 0.6 * ar + 0.05 * gaussian();
        const double x = static_cast<double>(t);
        double mag = 5.75 + 0.75 * std::sin(2.0 * std::numbers::pi * x / 29.0) +
                     0.15 * std::sin(2.0 * std::numbers::pi * x / 7.3) + ar;
        // a few quiet days early in the record, as real catalogs have
        if (t == 5 || t == 12 || t == 19) mag = 2.1;
        mag = std::min(std::max(mag, 2.0), 7.5);
        const double lat = 32.5 + 4.0 * rng.uniform01();
        const double lon = -121.0 + 6.0 * rng.uniform01();
        const double depth = 1.0 + 19.0 * rng.uniform01();
        char row[128];
        std::snprintf(row, sizeof(row), "%sT12:00:00Z,%.4f,%.4f,%.2f,%.3f\n",
                      civil_date(day0 + static_cast<std::int64_t>(t)).c_str(), lat, lon,
                      depth, mag);
        out << row;
    }
    write_text(out_path, out.str());
}

}  // namespace abcnet::experiment
