#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace abcnet::metrics {

using Vector = Eigen::VectorXd;

struct EvalReport {
    double mse = 0;
    double nmse = 0;
    double accuracy_pct = 0;
    std::size_t n = 0;

    bool operator==(const EvalReport&) const = default;
};

namespace detail {
inline void check_lengths(const std::vector<Vector>& a, const std::vector<Vector>& b) {
    if (a.empty() || a.size() != b.size())
        throw std::invalid_argument("metrics: sequences empty or of unequal length");
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].size() != b[i].size())
            throw std::invalid_argument("metrics: component count mismatch at sample " +
                                        std::to_string(i));
}
}  // namespace detail

// (1/n) * sum over samples of the squared residual over output components.
inline double mse(const std::vector<Vector>& actual, const std::vector<Vector>& predicted) {
    detail::check_lengths(actual, predicted);
    double total = 0;
    for (std::size_t i = 0; i < actual.size(); ++i)
        total += (actual[i] - predicted[i]).squaredNorm();
    return total / static_cast<double>(actual.size());
}

// Squared error normalised by n * sample variance (n-1 denominator), so the
// mean predictor scores (n-1)/n. Scalar series.
inline double nmse(const std::vector<double>& actual, const std::vector<double>& predicted) {
    if (actual.size() < 2 || actual.size() != predicted.size())
        throw std::invalid_argument("nmse: need n >= 2 sequences of equal length");
    const auto n = static_cast<double>(actual.size());
    double mean = 0;
    for (double y : actual) mean += y;
    mean /= n;
    double variance = 0;
    for (double y : actual) variance += (y - mean) * (y - mean);
    variance /= (n - 1.0);
    if (variance == 0) throw std::domain_error("nmse: actual series is constant");
    double sq = 0;
    for (std::size_t i = 0; i < actual.size(); ++i)
        sq += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
    return sq / (n * variance);
}

// 100 * (1 - mean absolute relative error), floored at 0. Intended for raw
// (inverse-scaled) magnitudes, which are strictly positive.
inline double accuracy_pct(const std::vector<double>& actual,
                           const std::vector<double>& predicted) {
    if (actual.empty() || actual.size() != predicted.size())
        throw std::invalid_argument("accuracy_pct: sequences empty or of unequal length");
    double mare = 0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] == 0) throw std::domain_error("accuracy_pct: zero actual value");
        mare += std::abs(actual[i] - predicted[i]) / std::abs(actual[i]);
    }
    mare /= static_cast<double>(actual.size());
    return std::max(0.0, 100.0 * (1.0 - mare));
}

}  // namespace abcnet::metrics
