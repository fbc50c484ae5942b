#pragma once

#include <array>
#include <span>
#include <vector>

namespace warpflow {

enum class Parity { even, odd };

struct ParityPair {
    Parity at_waist;  // r = 0
    Parity at_tip;    // r = pi/2
};

// Reflection behaviour of the three warping functions at the two singular orbits.
struct ParityTable {
    ParityPair chi{Parity::even, Parity::even};
    ParityPair psi{Parity::even, Parity::odd};
    ParityPair phi{Parity::odd, Parity::even};
};

// Mesh on [0, pi/2]. Nodes are r_i = R(xi_i) for a uniform computational
// coordinate xi_i = i*h, with
//   R(xi) = xi - beta sin(4 xi)/4 + bias sin(2 xi)/2.
// Both terms are odd about both endpoints, so parity ghosts in xi are parity
// ghosts in r. beta > 0 packs nodes toward both endpoints; bias > 0 moves them
// from the waist toward the tip.
struct Grid {
    int node_count = 0;
    int order = 4;       // finite-difference order, 2 or 4
    double beta = 0.0;   // symmetric stretch
    double bias = 0.0;   // tip bias; beta + |bias| < 1
    double h = 0.0;      // computational spacing
    std::vector<double> nodes;  // r_i
    std::vector<double> jac;    // dR/dxi at each node
    ParityTable parity;

    int last() const { return node_count - 1; }
    double spacing(int i) const;  // local dr around node i
};

inline constexpr int kMinNodes = 16;

Grid make_uniform_grid(int node_count, int order = 4);
Grid make_stretched_grid(int node_count, double beta, int order = 4, double bias = 0.0);

// Derivatives with respect to the computational coordinate xi, using ghost
// values reflected with the declared parity. Raw kernels write into `out`.
void diff1_xi(const Grid& g, std::span<const double> f, ParityPair p, std::span<double> out);
void diff2_xi(const Grid& g, std::span<const double> f, ParityPair p, std::span<double> out);

// df/dr. Throws DataError if f contradicts the declared parity (odd parity
// requires a vanishing endpoint value) by more than `tol` relative to max|f|.
std::vector<double> d_dr(const Grid& g, std::span<const double> f, ParityPair p, double tol = 1e-10);

// Quadrature of f dr over [0, pi/2]: trapezoid at order 2, Gregory end
// corrections at order 4.
double integrate(const Grid& g, std::span<const double> f);

// Running integral F_i = int_0^{r_i} f dr. The integrand's parity feeds the
// ghost values used by the fourth-order interval rule.
std::vector<double> cumulative_integral(const Grid& g, std::span<const double> f, ParityPair p);
void cumulative_integral_xi(const Grid& g, std::span<const double> f_times_jac, ParityPair p,
                            std::span<double> out);

// Limit at distance 0 of an even function known at distances d[0..k-1]
// (k = 2 or 3): polynomial extrapolation in d^2.
double extrapolate_even(std::span<const double> d, std::span<const double> v);

}  // namespace warpflow
