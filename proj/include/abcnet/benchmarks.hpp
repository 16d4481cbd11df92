#pragma once

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace abcnet::benchmarks {

using Vector = Eigen::VectorXd;

inline double sphere(const Vector& x) { return x.squaredNorm(); }

inline double rosenbrock(const Vector& x) {
    double total = 0;
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
        const double a = x[i + 1] - x[i] * x[i];
        const double b = 1.0 - x[i];
        total += 100.0 * a * a + b * b;
    }
    return total;
}

inline double rastrigin(const Vector& x) {
    double total = 10.0 * static_cast<double>(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i)
        total += x[i] * x[i] - 10.0 * std::cos(2.0 * std::numbers::pi * x[i]);
    return total;
}

inline double (*by_name(const std::string& name))(const Vector&) {
    if (name == "sphere") return sphere;
    if (name == "rosenbrock") return rosenbrock;
    if (name == "rastrigin") return rastrigin;
    throw std::invalid_argument("unknown benchmark function: " + name);
}

}  // namespace abcnet::benchmarks
