#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "abcnet/mlp.hpp"
#include "abcnet/random.hpp"

namespace abcnet::bp {

using Vector = Eigen::VectorXd;
using mlp::Matrix;
using mlp::SamplePair;
using mlp::Topology;

struct BPConfig {
    double learning_rate = 0.6;
    double momentum = 0.5;
    unsigned max_epochs = 3000;
    double target_mse = 1e-4;
    double init_range = 1.0;  // weights drawn uniform on [-init_range, init_range]
    std::uint64_t seed = 0;

    void validate() const {
        if (learning_rate < 0) throw std::invalid_argument("BPConfig: learning_rate must be >= 0");
        if (momentum < 0 || momentum >= 1) throw std::invalid_argument("BPConfig: momentum must be in [0,1)");
        if (target_mse <= 0) throw std::invalid_argument("BPConfig: target_mse must be > 0");
        if (max_epochs < 1) throw std::invalid_argument("BPConfig: max_epochs must be >= 1");
    }
};

enum class StopReason { target_reached, max_epochs };

struct TrainingHistory {
    std::vector<std::pair<unsigned, double>> epochs;  // (epoch, training mse)
    StopReason stop_reason = StopReason::max_epochs;
};

// Reverse-mode gradient of batch_mse. The 2/n factor comes from
// differentiating the un-halved squared error averaged over patterns.
inline Vector gradient(const Topology& t, const Vector& weights,
                       const std::vector<SamplePair>& samples) {
    mlp::detail::check_weights(t, weights);
    if (samples.empty()) throw std::domain_error("gradient: empty sample set");

    const std::size_t layers = t.layer_sizes.size();
    Vector grad = Vector::Zero(weights.size());
    const double scale = 2.0 / static_cast<double>(samples.size());

    // per-layer views into the flat vectors
    struct Span { Eigen::Index w_off, rows, cols, b_off; };
    std::vector<Span> spans;
    mlp::detail::for_each_layer(t, weights,
        [&](std::size_t, Eigen::Map<const Matrix> w, Eigen::Index b_off) {
            spans.push_back({static_cast<Eigen::Index>(w.data() - weights.data()),
                             w.rows(), w.cols(), b_off});
        });

    std::vector<Vector> activations(layers);
    for (const auto& s : samples) {
        if (s.input.size() != t.inputs() || s.target.size() != t.outputs())
            throw std::invalid_argument("gradient: sample shape mismatch");
        activations[0] = s.input;
        for (std::size_t l = 1; l < layers; ++l) {
            const Span& sp = spans[l - 1];
            Eigen::Map<const Matrix> w(weights.data() + sp.w_off, sp.rows, sp.cols);
            Vector z = w * activations[l - 1];
            if (sp.b_off >= 0) z += weights.segment(sp.b_off, sp.rows);
            activations[l] = z.unaryExpr([](double v) { return mlp::sigmoid(v); });
        }

        const Vector& out = activations[layers - 1];
        // delta = dE/dz, using sigma'(z) = a(1-a)
        Vector delta = scale * (out - s.target).cwiseProduct(
            out.cwiseProduct(Vector::Ones(out.size()) - out));
        for (std::size_t l = layers - 1; l >= 1; --l) {
            const Span& sp = spans[l - 1];
            Eigen::Map<Matrix> gw(grad.data() + sp.w_off, sp.rows, sp.cols);
            gw.noalias() += delta * activations[l - 1].transpose();
            if (sp.b_off >= 0) grad.segment(sp.b_off, sp.rows) += delta;
            if (l > 1) {
                Eigen::Map<const Matrix> w(weights.data() + sp.w_off, sp.rows, sp.cols);
                const Vector& a = activations[l - 1];
                delta = (w.transpose() * delta).cwiseProduct(
                    a.cwiseProduct(Vector::Ones(a.size()) - a)).eval();
            }
        }
    }
    return grad;
}

// Full-batch gradient descent with heavy-ball momentum:
//   dw(t) = -lr * grad E(w(t)) + momentum * dw(t-1)
// Stops when training MSE <= target_mse or the epoch budget runs out.
inline std::pair<Vector, TrainingHistory> train(const Topology& t,
                                                const std::vector<SamplePair>& samples,
                                                const BPConfig& config) {
    config.validate();
    if (samples.empty()) throw std::domain_error("train: empty training set");

    RandomSource rng(config.seed);
    Vector weights(mlp::dimension(t));
    for (Eigen::Index j = 0; j < weights.size(); ++j)
        weights[j] = rng.uniform(-config.init_range, config.init_range);

    TrainingHistory history;
    Vector velocity = Vector::Zero(weights.size());
    for (unsigned epoch = 1; epoch <= config.max_epochs; ++epoch) {
        const double mse = mlp::batch_mse(t, weights, samples);
        if (!std::isfinite(mse))
            throw std::runtime_error("training diverged at epoch " + std::to_string(epoch));
        history.epochs.emplace_back(epoch, mse);
        if (mse <= config.target_mse) {
            history.stop_reason = StopReason::target_reached;
            return {weights, history};
        }
        velocity = -config.learning_rate * gradient(t, weights, samples) +
                   config.momentum * velocity;
        weights += velocity;
    }
    history.stop_reason = StopReason::max_epochs;
    return {weights, history};
}

}  // namespace abcnet::bp
