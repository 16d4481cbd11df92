#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "abcnet/random.hpp"

namespace abcnet {

using Vector = Eigen::VectorXd;

// Box constraints, one interval per dimension.
struct Bounds {
    Vector lower;
    Vector upper;

    Bounds(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi)) {
        validate();
    }

    // scalar bounds applied to every dimension
    Bounds(Eigen::Index dim, double lo, double hi)
        : lower(Vector::Constant(dim, lo)), upper(Vector::Constant(dim, hi)) {
        validate();
    }

    Eigen::Index dimension() const { return lower.size(); }

    bool contains(const Vector& x) const {
        return (x.array() >= lower.array()).all() &&
               (x.array() <= upper.array()).all();
    }

    double clamp(double value, Eigen::Index j) const {
        return std::min(std::max(value, lower[j]), upper[j]);
    }

private:
    void validate() const {
        if (lower.size() < 1 || lower.size() != upper.size())
            throw std::invalid_argument("Bounds: dimension mismatch or empty");
        if (!(lower.array() < upper.array()).all())
            throw std::invalid_argument("Bounds: lower must be < upper in every dimension");
    }
};

// One candidate solution with its bookkeeping.
struct FoodSource {
    Vector position;
    double objective = 0.0;
    double fitness = 0.0;
    unsigned trials = 0;
};

struct ABCConfig {
    unsigned colony_size = 50;
    unsigned food_number = 25;  // SN = colony_size / 2
    Eigen::Index dimension;
    Bounds bounds;
    unsigned limit;             // abandonment threshold, default food_number * D
    unsigned mcn;               // cycle budget
    unsigned perturb_dims = 1;  // dimensions changed per candidate
    std::uint64_t seed = 0;

    ABCConfig(Eigen::Index dim, Bounds b, unsigned max_cycles,
              unsigned colony = 50, std::uint64_t rng_seed = 0)
        : colony_size(colony),
          food_number(colony / 2),
          dimension(dim),
          bounds(std::move(b)),
          limit(static_cast<unsigned>(colony / 2 * dim)),
          mcn(max_cycles),
          seed(rng_seed) {
        validate();
    }

    void validate() const {
        if (colony_size == 0 || colony_size % 2 != 0)
            throw std::invalid_argument("ABCConfig: colony_size must be even and positive");
        if (food_number != colony_size / 2)
            throw std::invalid_argument("ABCConfig: food_number must equal colony_size / 2");
        if (dimension < 1 || dimension != bounds.dimension())
            throw std::invalid_argument("ABCConfig: dimension mismatch with bounds");
        if (limit < 1) throw std::invalid_argument("ABCConfig: limit must be >= 1");
        if (mcn < 1) throw std::invalid_argument("ABCConfig: mcn must be >= 1");
    }
};

struct ABCResult {
    Vector best_position;
    double best_objective = 0.0;
    std::vector<std::pair<unsigned, double>> history;  // (cycle, best so far)
    std::uint64_t objective_evaluations = 0;
    std::uint64_t ofe_nominal = 0;  // mcn * food_number
    std::uint64_t scout_replacements = 0;
};

using Objective = std::function<double(const Vector&)>;

// x^j = lo^j + rand(0,1) * (hi^j - lo^j), independently per dimension.
inline Vector random_solution(const Bounds& bounds, RandomSource& rng) {
    Vector x(bounds.dimension());
    for (Eigen::Index j = 0; j < x.size(); ++j)
        x[j] = bounds.lower[j] + rng.uniform01() * (bounds.upper[j] - bounds.lower[j]);
    return x;
}

// Maps a raw objective value to a positive fitness: 1/(1+f) for f >= 0,
// 1+|f| otherwise.
inline double fitness(double objective_value) {
    if (!std::isfinite(objective_value))
        throw std::domain_error("fitness: non-finite objective value");
    return objective_value >= 0.0 ? 1.0 / (1.0 + objective_value)
                                  : 1.0 + std::abs(objective_value);
}

// Neighbour move: perturb `dims` random dimensions (canonical default one)
// of source i toward/away from a random partner k != i, clamped into bounds.
inline Vector produce_candidate(const std::vector<FoodSource>& sources,
                                std::size_t i, RandomSource& rng,
                                const Bounds& bounds, unsigned dims = 1) {
    if (sources.size() < 2)
        throw std::invalid_argument("produce_candidate: need at least 2 food sources");
    dims = std::min<unsigned>(std::max(dims, 1u),
                              static_cast<unsigned>(bounds.dimension()));
    const auto first = static_cast<Eigen::Index>(
        rng.index(static_cast<std::size_t>(bounds.dimension())));
    std::size_t k = rng.index(sources.size() - 1);
    if (k >= i) ++k;
    Vector candidate = sources[i].position;
    std::vector<Eigen::Index> chosen{first};
    while (chosen.size() < dims) {
        const auto j = static_cast<Eigen::Index>(
            rng.index(static_cast<std::size_t>(bounds.dimension())));
        if (std::find(chosen.begin(), chosen.end(), j) == chosen.end()) chosen.push_back(j);
    }
    for (const Eigen::Index j : chosen) {
        const double phi = rng.uniform_sym();
        const double moved = candidate[j] + phi * (candidate[j] - sources[k].position[j]);
        candidate[j] = bounds.clamp(moved, j);
    }
    return candidate;
}

// Replace-if-not-worse. Ties adopt the candidate.
inline FoodSource greedy_select(const FoodSource& current,
                                const Vector& candidate_position,
                                double candidate_objective) {
    if (fitness(candidate_objective) >= current.fitness) {
        return FoodSource{candidate_position, candidate_objective,
                          fitness(candidate_objective), 0};
    }
    FoodSource kept = current;
    ++kept.trials;
    return kept;
}

// p_i = fit_i / sum fit_n
inline std::vector<double> selection_probabilities(const std::vector<FoodSource>& sources) {
    if (sources.empty())
        throw std::invalid_argument("selection_probabilities: empty source list");
    double total = 0.0;
    for (const auto& s : sources) total += s.fitness;
    std::vector<double> p(sources.size());
    for (std::size_t i = 0; i < sources.size(); ++i) p[i] = sources[i].fitness / total;
    return p;
}

namespace detail {

// cumulative-sum inversion of one uniform draw
inline std::size_t roulette(const std::vector<double>& p, RandomSource& rng) {
    const double u = rng.uniform01();
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += p[i];
        if (u < acc) return i;
    }
    return p.size() - 1;
}

inline double checked_eval(const Objective& objective, const Vector& x,
                           std::uint64_t& count) {
    const double value = objective(x);
    ++count;
    if (!std::isfinite(value)) {
        std::ostringstream msg;
        msg << "objective returned non-finite value at position [";
        for (Eigen::Index j = 0; j < x.size(); ++j)
            msg << (j ? ", " : "") << x[j];
        msg << "]";
        throw std::runtime_error(msg.str());
    }
    return value;
}

}  // namespace detail

// Full colony loop: employed phase, onlooker phase, at most one scout per
// cycle, best-so-far memorisation. Deterministic for a fixed seed.
inline ABCResult run(const ABCConfig& config, const Objective& objective) {
    config.validate();
    RandomSource rng(config.seed);
    ABCResult result;
    result.ofe_nominal = static_cast<std::uint64_t>(config.mcn) * config.food_number;

    std::vector<FoodSource> sources;
    sources.reserve(config.food_number);
    result.best_objective = std::numeric_limits<double>::infinity();

    auto remember = [&](const Vector& x, double f) {
        if (f < result.best_objective) {
            result.best_objective = f;
            result.best_position = x;
        }
    };

    for (unsigned i = 0; i < config.food_number; ++i) {
        Vector x = random_solution(config.bounds, rng);
        const double f = detail::checked_eval(objective, x, result.objective_evaluations);
        remember(x, f);
        sources.push_back(FoodSource{std::move(x), f, fitness(f), 0});
    }

    auto search_around = [&](std::size_t i) {
        Vector candidate =
            produce_candidate(sources, i, rng, config.bounds, config.perturb_dims);
        const double f =
            detail::checked_eval(objective, candidate, result.objective_evaluations);
        remember(candidate, f);
        sources[i] = greedy_select(sources[i], candidate, f);
    };

    result.history.reserve(config.mcn);
    for (unsigned cycle = 1; cycle <= config.mcn; ++cycle) {
        for (std::size_t i = 0; i < sources.size(); ++i) search_around(i);

        const std::vector<double> p = selection_probabilities(sources);
        for (unsigned draw = 0; draw < config.food_number; ++draw)
            search_around(detail::roulette(p, rng));

        // scout: at most one abandonment per cycle, ties to the lowest index
        std::size_t worst = 0;
        for (std::size_t i = 1; i < sources.size(); ++i)
            if (sources[i].trials > sources[worst].trials) worst = i;
        if (sources[worst].trials > config.limit) {
            Vector x = random_solution(config.bounds, rng);
            const double f =
                detail::checked_eval(objective, x, result.objective_evaluations);
            remember(x, f);
            sources[worst] = FoodSource{std::move(x), f, fitness(f), 0};
            ++result.scout_replacements;
        }

        result.history.emplace_back(cycle, result.best_objective);
    }
    return result;
}

}  // namespace abcnet
