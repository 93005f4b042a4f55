#pragma once

// Finite-difference reference computations shared by the unit and acceptance
// tests. They only evaluate function values, never jets, so they are
// independent of the jet and frame code they check.

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Field = std::function<std::vector<double>(const std::vector<double>&)>;
using Scalar = std::function<double(const std::vector<double>&)>;

/// Sixth-order central difference of a vector field along axis a.
inline std::vector<double> d6(const Field& f, const std::vector<double>& u, std::size_t a, double h) {
    static constexpr double w[] = {-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0};
    std::vector<double> out;
    for (int s = -3; s <= 3; ++s) {
        if (s == 0) continue;
        auto y = u;
        y[a] += s * h;
        const auto v = f(y);
        if (out.empty()) out.assign(v.size(), 0.0);
        for (std::size_t i = 0; i < v.size(); ++i) out[i] += w[s + 3] * v[i];
    }
    for (auto& x : out) x /= 60.0 * h;
    return out;
}

inline double d6(const Scalar& f, const std::vector<double>& u, std::size_t a, double h) {
    return d6(Field([&](const std::vector<double>& y) { return std::vector<double>{f(y)}; }), u, a, h)[0];
}

/// Metric g_ab = <x_a, x_b> from differences of the position map.
inline Eigen::MatrixXd metric(const Field& x, const std::vector<double>& u, double h) {
    const std::size_t k = u.size();
    std::vector<std::vector<double>> cols;
    for (std::size_t a = 0; a < k; ++a) cols.push_back(d6(x, u, a, h));
    Eigen::MatrixXd g(k, k);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < cols[a].size(); ++i) s += cols[a][i] * cols[b][i];
            g(a, b) = s;
        }
    return g;
}

/// Δf = (1/√g) ∂_a(√g g^{ab} ∂_b f), all derivatives by nested differences.
inline double laplace_beltrami(const Field& x, const Scalar& f, const std::vector<double>& u, double h = 1e-2) {
    const std::size_t k = u.size();
    const Field flux = [&](const std::vector<double>& y) {
        const Eigen::MatrixXd g = metric(x, y, h);
        const Eigen::MatrixXd gi = g.inverse();
        const double sg = std::sqrt(g.determinant());
        Eigen::VectorXd df(k);
        for (std::size_t b = 0; b < k; ++b) df(b) = d6(f, y, b, h);
        const Eigen::VectorXd fl = sg * gi * df;
        return std::vector<double>(fl.data(), fl.data() + k);
    };
    double div = 0.0;
    for (std::size_t a = 0; a < k; ++a) div += d6(flux, u, a, h)[a];
    return div / std::sqrt(metric(x, u, h).determinant());
}

} // namespace oracle
