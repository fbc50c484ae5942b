#include "warpflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "warpflow/errors.hpp"

namespace warpflow {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

// Value at index i in [-2, N+1], reflecting across either endpoint.
inline double ghost(std::span<const double> f, int i, int m, ParityPair p) {
    if (i < 0) {
        return p.at_waist == Parity::even ? f[-i] : 2.0 * f[0] - f[-i];
    }
    if (i > m) {
        int j = 2 * m - i;
        return p.at_tip == Parity::even ? f[j] : 2.0 * f[m] - f[j];
    }
    return f[i];
}

void check_shape(const Grid& g, std::span<const double> f) {
    if (static_cast<int>(f.size()) != g.node_count) {
        throw DataError("array has " + std::to_string(f.size()) + " samples, grid has " +
                        std::to_string(g.node_count));
    }
}

}  // namespace

double Grid::spacing(int i) const { return h * jac[static_cast<size_t>(i)]; }

Grid make_stretched_grid(int node_count, double beta, int order, double bias) {
    if (node_count < kMinNodes) {
        throw ConfigError("node_count must be at least " + std::to_string(kMinNodes) + ", got " +
                          std::to_string(node_count));
    }
    if (order != 2 && order != 4) throw ConfigError("scheme order must be 2 or 4");
    if (!(beta >= 0.0) || !(std::abs(bias) + beta < 1.0)) {
        throw ConfigError("mesh stretch needs beta >= 0 and beta + |bias| < 1");
    }
    Grid g;
    g.node_count = node_count;
    g.order = order;
    g.beta = beta;
    g.bias = bias;
    g.h = kHalfPi / (node_count - 1);
    g.nodes.resize(node_count);
    g.jac.resize(node_count);
    for (int i = 0; i < node_count; ++i) {
        double xi = i * g.h;
        g.nodes[i] = xi - beta * std::sin(4.0 * xi) / 4.0 + bias * std::sin(2.0 * xi) / 2.0;
        g.jac[i] = 1.0 - beta * std::cos(4.0 * xi) + bias * std::cos(2.0 * xi);
    }
    // Pin the endpoints so they are exact regardless of sin rounding.
    g.nodes.front() = 0.0;
    g.nodes.back() = kHalfPi;
    return g;
}

Grid make_uniform_grid(int node_count, int order) { return make_stretched_grid(node_count, 0.0, order); }

void diff1_xi(const Grid& g, std::span<const double> f, ParityPair p, std::span<double> out) {
    const int m = g.last();
    if (g.order == 2) {
        const double c = 0.5 / g.h;
        for (int i = 1; i < m; ++i) out[i] = c * (f[i + 1] - f[i - 1]);
        out[0] = c * (ghost(f, 1, m, p) - ghost(f, -1, m, p));
        out[m] = c * (ghost(f, m + 1, m, p) - ghost(f, m - 1, m, p));
        return;
    }
    const double c = 1.0 / (12.0 * g.h);
    for (int i = 2; i < m - 1; ++i) {
        out[i] = c * (8.0 * (f[i + 1] - f[i - 1]) - (f[i + 2] - f[i - 2]));
    }
    for (int i : {0, 1, m - 1, m}) {
        out[i] = c * (8.0 * (ghost(f, i + 1, m, p) - ghost(f, i - 1, m, p)) -
                      (ghost(f, i + 2, m, p) - ghost(f, i - 2, m, p)));
    }
}

void diff2_xi(const Grid& g, std::span<const double> f, ParityPair p, std::span<double> out) {
    const int m = g.last();
    if (g.order == 2) {
        const double c = 1.0 / (g.h * g.h);
        for (int i = 1; i < m; ++i) out[i] = c * (f[i + 1] - 2.0 * f[i] + f[i - 1]);
        out[0] = c * (ghost(f, 1, m, p) - 2.0 * f[0] + ghost(f, -1, m, p));
        out[m] = c * (ghost(f, m + 1, m, p) - 2.0 * f[m] + ghost(f, m - 1, m, p));
        return;
    }
    const double c = 1.0 / (12.0 * g.h * g.h);
    for (int i = 2; i < m - 1; ++i) {
        out[i] = c * (16.0 * (f[i + 1] + f[i - 1]) - (f[i + 2] + f[i - 2]) - 30.0 * f[i]);
    }
    for (int i : {0, 1, m - 1, m}) {
        out[i] = c * (16.0 * (ghost(f, i + 1, m, p) + ghost(f, i - 1, m, p)) -
                      (ghost(f, i + 2, m, p) + ghost(f, i - 2, m, p)) - 30.0 * f[i]);
    }
}

std::vector<double> d_dr(const Grid& g, std::span<const double> f, ParityPair p, double tol) {
    check_shape(g, f);
    double scale = 0.0;
    for (double v : f) scale = std::max(scale, std::abs(v));
    const double bound = tol * std::max(scale, 1e-300);
    if (p.at_waist == Parity::odd && std::abs(f.front()) > bound) {
        throw DataError("function declared odd at r=0 has f(0) = " + std::to_string(f.front()));
    }
    if (p.at_tip == Parity::odd && std::abs(f.back()) > bound) {
        throw DataError("function declared odd at r=pi/2 has f(pi/2) = " + std::to_string(f.back()));
    }
    std::vector<double> out(f.size());
    diff1_xi(g, f, p, out);
    for (int i = 0; i < g.node_count; ++i) out[i] /= g.jac[i];
    return out;
}

double integrate(const Grid& g, std::span<const double> f) {
    check_shape(g, f);
    const int m = g.last();
    double sum = 0.0;
    for (int i = 0; i <= m; ++i) sum += f[i] * g.jac[i];
    auto fj = [&](int i) { return f[i] * g.jac[i]; };
    if (g.order == 2) {
        sum -= 0.5 * (fj(0) + fj(m));
    } else {
        // Gregory weights 3/8, 7/6, 23/24 at each end; exact on cubics.
        sum += (3.0 / 8.0 - 1.0) * (fj(0) + fj(m)) + (7.0 / 6.0 - 1.0) * (fj(1) + fj(m - 1)) +
               (23.0 / 24.0 - 1.0) * (fj(2) + fj(m - 2));
    }
    return sum * g.h;
}

void cumulative_integral_xi(const Grid& g, std::span<const double> q, ParityPair p, std::span<double> out) {
    const int m = g.last();
    out[0] = 0.0;
    if (g.order == 2) {
        for (int i = 0; i < m; ++i) out[i + 1] = out[i] + 0.5 * g.h * (q[i] + q[i + 1]);
        return;
    }
    const double c = g.h / 24.0;
    for (int i = 0; i < m; ++i) {
        double qm = ghost(q, i - 1, m, p);
        double qp = ghost(q, i + 2, m, p);
        out[i + 1] = out[i] + c * (13.0 * (q[i] + q[i + 1]) - qm - qp);
    }
}

std::vector<double> cumulative_integral(const Grid& g, std::span<const double> f, ParityPair p) {
    check_shape(g, f);
    // The integrand picks up the Jacobian, which is even at both ends.
    std::vector<double> q(f.size());
    for (int i = 0; i < g.node_count; ++i) q[i] = f[i] * g.jac[i];
    std::vector<double> out(f.size());
    cumulative_integral_xi(g, q, p, out);
    return out;
}

double extrapolate_even(std::span<const double> d, std::span<const double> v) {
    if (d.size() == 2) {
        double a = d[0] * d[0], b = d[1] * d[1];
        return (b * v[0] - a * v[1]) / (b - a);
    }
    double x0 = d[0] * d[0], x1 = d[1] * d[1], x2 = d[2] * d[2];
    // Lagrange basis in x = d^2 evaluated at x = 0.
    double l0 = (x1 * x2) / ((x0 - x1) * (x0 - x2));
    double l1 = (x0 * x2) / ((x1 - x0) * (x1 - x2));
    double l2 = (x0 * x1) / ((x2 - x0) * (x2 - x1));
    return l0 * v[0] + l1 * v[1] + l2 * v[2];
}

}  // namespace warpflow
