#pragma once

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace abcnet::mlp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Topology {
    std::vector<Eigen::Index> layer_sizes;  // inputs, hidden..., outputs
    bool biases_enabled = true;

    Topology(std::vector<Eigen::Index> sizes, bool biases = true)
        : layer_sizes(std::move(sizes)), biases_enabled(biases) {
        if (layer_sizes.size() < 3)
            throw std::invalid_argument("Topology: need at least one hidden layer");
        for (auto s : layer_sizes)
            if (s < 1) throw std::invalid_argument("Topology: every layer size must be >= 1");
    }

    Eigen::Index inputs() const { return layer_sizes.front(); }
    Eigen::Index outputs() const { return layer_sizes.back(); }
};

struct SamplePair {
    Vector input;
    Vector target;
};

// Total parameter count: per non-input layer, its weight matrix plus
// (optionally) its bias vector.
inline Eigen::Index dimension(const Topology& t) {
    Eigen::Index d = 0;
    for (std::size_t l = 1; l < t.layer_sizes.size(); ++l) {
        d += t.layer_sizes[l - 1] * t.layer_sizes[l];
        if (t.biases_enabled) d += t.layer_sizes[l];
    }
    return d;
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Flat layout per non-input layer: weight matrix in (destination, source)
// row order, then the bias vector.
struct LayerView {
    Eigen::Map<const Matrix> weights;
    Eigen::Index bias_offset;  // -1 when biases are disabled
};

namespace detail {

inline void check_weights(const Topology& t, const Vector& w) {
    if (w.size() != dimension(t))
        throw std::invalid_argument("weight vector length does not match topology");
}

template <typename Fn>
void for_each_layer(const Topology& t, const Vector& w, Fn&& fn) {
    Eigen::Index offset = 0;
    for (std::size_t l = 1; l < t.layer_sizes.size(); ++l) {
        const Eigen::Index rows = t.layer_sizes[l];
        const Eigen::Index cols = t.layer_sizes[l - 1];
        Eigen::Map<const Matrix> weights(w.data() + offset, rows, cols);
        offset += rows * cols;
        Eigen::Index bias_offset = -1;
        if (t.biases_enabled) {
            bias_offset = offset;
            offset += rows;
        }
        fn(l, weights, bias_offset);
    }
}

}  // namespace detail

// Forward pass with sigmoid on every non-input node.
inline Vector forward(const Topology& t, const Vector& weights, const Vector& input) {
    detail::check_weights(t, weights);
    if (input.size() != t.inputs())
        throw std::invalid_argument("forward: input length does not match topology");
    Vector activation = input;
    detail::for_each_layer(t, weights,
                           [&](std::size_t, Eigen::Map<const Matrix> w, Eigen::Index bias_offset) {
        Vector z = w * activation;
        if (bias_offset >= 0) z += weights.segment(bias_offset, z.size());
        activation = z.unaryExpr([](double v) { return sigmoid(v); });
    });
    return activation;
}

// (1/n) * sum over patterns of sum over outputs of squared residual.
// The inner sum is not averaged over output nodes.
inline double batch_mse(const Topology& t, const Vector& weights,
                        const std::vector<SamplePair>& samples) {
    if (samples.empty()) throw std::domain_error("batch_mse: empty sample set");
    double total = 0.0;
    for (const auto& s : samples)
        total += (s.target - forward(t, weights, s.input)).squaredNorm();
    return total / static_cast<double>(samples.size());
}

// Binds a topology and sample batch into an objective over flat weights.
inline std::function<double(const Vector&)> as_objective(
    const Topology& t, const std::vector<SamplePair>& samples) {
    return [t, samples](const Vector& w) { return batch_mse(t, w, samples); };
}

}  // namespace abcnet::mlp
