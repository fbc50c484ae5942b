#include "warpflow/initial_data.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "warpflow/errors.hpp"

namespace warpflow {

namespace {

using ld = long double;
constexpr ld kHalfPiL = std::numbers::pi_v<long double> / 2;

// log cosh x without overflow.
ld log_cosh(ld x) {
    x = std::fabs(x);
    return x + std::log1p(std::exp(-2 * x)) - std::log(ld{2});
}

// cos r from the distance to pi/2, so the tip keeps full relative precision.
ld cos_from_node(double r) { return std::sin(kHalfPiL - static_cast<ld>(r)); }

struct Sausage {
    ld a, t, sqrt_t, sech2, one_minus_t, log_sinh2a;
    explicit Sausage(double tau) {
        a = -2 * static_cast<ld>(tau);
        t = std::tanh(a);
        sqrt_t = std::sqrt(t);
        ld e = std::exp(-2 * a);
        sech2 = 4 * e / ((1 + e) * (1 + e));
        one_minus_t = 2 * e / (1 + e);
        log_sinh2a = 2 * a + std::log1p(-std::exp(-4 * a)) - std::log(ld{2});
    }

    // Coordinate form at angle r.
    void at_r(double r, ld& chi, ld& psi, ld& phi) const {
        ld c = cos_from_node(r), s = std::sin(static_cast<ld>(r));
        chi = std::sqrt(t / (c * c + sech2 * s * s));
        psi = chi * c;
        ld sig = kHalfPiL - static_cast<ld>(r);
        ld half = std::sin(sig / 2);
        ld one_minus = 2 * half * half + s * one_minus_t;  // 1 - T sin r
        phi = (std::log1p(t * s) - std::log(one_minus)) / (2 * sqrt_t);
    }

    // Mercator form: z = artanh(sin r), ds = psi dz.
    ld psi_z(ld z) const {
        ld u = 2 * z, v = 2 * a;
        ld m = std::max(u, v);
        ld lsum = m + std::log((std::exp(u - m) + std::exp(-u - m) + std::exp(v - m) + std::exp(-v - m)) / 2);
        return std::exp((log_sinh2a - lsum) / 2);
    }
    ld phi_z(ld z) const { return (log_cosh(z + a) - log_cosh(z - a)) / (2 * sqrt_t); }
};

ld integrate_psi(const Sausage& sa, ld lo, ld hi) {
    auto f = [&](ld x) { return sa.psi_z(x); };
    return boost::math::quadrature::gauss_kronrod<ld, 31>::integrate(f, lo, hi, 8, 1e-17L);
}

ld tail_length(const Sausage& sa, ld z) {
    boost::math::quadrature::exp_sinh<ld> integrator;
    auto f = [&](ld x) { return sa.psi_z(x); };
    return integrator.integrate(f, z, std::numeric_limits<ld>::infinity(), 1e-17L);
}

ld total_length(const Sausage& sa) { return integrate_psi(sa, 0, sa.a) + tail_length(sa, sa.a); }

void check_tau(double tau) {
    if (!(tau < 0.0) || !std::isfinite(tau)) throw ConfigError("tau must be negative and finite");
}

}  // namespace

double sausage_slice_length(double tau) {
    check_tau(tau);
    return static_cast<double>(total_length(Sausage(tau)));
}

Profile sausage_slice(double tau, int n, const Grid& grid, Gauge gauge) {
    check_tau(tau);
    if (n < 3) throw ConfigError("dimension n must be at least 3");
    Sausage sa(tau);
    Profile p{grid, n, {}, {}, {}};
    const int nc = grid.node_count, m = nc - 1;
    p.chi.resize(nc);
    p.psi.resize(nc);
    p.phi.resize(nc);
    if (gauge == Gauge::coordinate) {
        for (int i = 0; i < nc; ++i) {
            ld chi, psi, phi;
            sa.at_r(grid.nodes[i], chi, psi, phi);
            p.chi[i] = static_cast<double>(chi);
            p.psi[i] = static_cast<double>(psi);
            p.phi[i] = static_cast<double>(phi);
        }
        p.psi[m] = 0.0;
        p.phi[0] = 0.0;
        return p;
    }

    // Arclength gauge: node i sits at s_i = ell * r_i / (pi/2). March outward
    // in the Mercator coordinate, keeping the running length S(z). Newton acts
    // on S near the waist and on log(ell - S) near the tip, where psi decays
    // like exp(-z).
    const ld ell = total_length(sa);
    const ld chi = ell / kHalfPiL;
    for (int i = 0; i < nc; ++i) p.chi[i] = static_cast<double>(chi);
    p.psi[0] = static_cast<double>(sa.psi_z(0));
    p.phi[0] = 0.0;
    p.psi[m] = 0.0;
    p.phi[m] = static_cast<double>(sa.a / sa.sqrt_t);
    ld z_base = 0, s_base = 0;
    for (int i = 1; i < m; ++i) {
        const ld target = ell * static_cast<ld>(grid.nodes[i]) / kHalfPiL;
        const bool tip_side = target > ell / 2;
        const ld log_rem = std::log(ell - target);
        ld z = z_base + (target - s_base) / sa.psi_z(z_base);
        if (tip_side) z = std::min(z, z_base + 2);
        for (int it = 0; it < 100; ++it) {
            const ld s_z = s_base + integrate_psi(sa, z_base, z);
            ld step;
            if (!tip_side) {
                step = (s_z - target) / sa.psi_z(z);
            } else {
                const ld rem = ell - s_z;
                if (rem <= 0) {
                    z = (z + z_base) / 2;
                    continue;
                }
                // d log(ell - S)/dz = -psi / (ell - S)
                step = -(std::log(rem) - log_rem) * rem / sa.psi_z(z);
                step = std::clamp(step, ld{-2}, ld{2});
            }
            z -= step;
            if (z < z_base) z = z_base;
            if (std::fabs(step) <= 1e-18L * (1 + z)) break;
        }
        s_base += integrate_psi(sa, z_base, z);
        z_base = z;
        p.psi[i] = static_cast<double>(sa.psi_z(z));
        p.phi[i] = static_cast<double>(sa.phi_z(z));
    }
    return p;
}

Profile round_sphere(double rho, const Grid& grid, int n) {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw ConfigError("rho must be positive");
    if (n < 3) throw ConfigError("dimension n must be at least 3");
    Profile p{grid, n, {}, {}, {}};
    const int nc = grid.node_count;
    p.chi.assign(nc, rho);
    p.psi.resize(nc);
    p.phi.resize(nc);
    for (int i = 0; i < nc; ++i) {
        p.psi[i] = static_cast<double>(rho * cos_from_node(grid.nodes[i]));
        p.phi[i] = static_cast<double>(rho * std::sin(static_cast<ld>(grid.nodes[i])));
    }
    p.psi.back() = 0.0;
    p.phi.front() = 0.0;
    return p;
}

Profile hypersausage_exact(double t, const Grid& grid) {
    if (!(t < 0.0) || !std::isfinite(t)) throw ConfigError("hypersausage time must be negative");
    const ld ch = std::cosh(-2 * static_cast<ld>(t)), sh = std::sinh(-2 * static_cast<ld>(t));
    Profile p{grid, 3, {}, {}, {}};
    const int nc = grid.node_count;
    p.chi.resize(nc);
    p.psi.resize(nc);
    p.phi.resize(nc);
    for (int i = 0; i < nc; ++i) {
        ld c = cos_from_node(grid.nodes[i]), s = std::sin(static_cast<ld>(grid.nodes[i]));
        ld c2 = c * c, s2 = s * s;
        ld d1 = c2 + s2 * ch, d2 = s2 + c2 * ch;
        p.chi[i] = static_cast<double>(std::sqrt(ch * sh / (2 * d1 * d2)));
        p.psi[i] = static_cast<double>(c * std::sqrt(sh / (2 * d2)));
        p.phi[i] = static_cast<double>(s * std::sqrt(sh / (2 * d1)));
    }
    p.psi.back() = 0.0;
    p.phi.front() = 0.0;
    return p;
}

SectionProfile sausage_exact(double t, const Grid& grid) {
    if (!(t < 0.0) || !std::isfinite(t)) throw ConfigError("sausage time must be negative");
    Sausage sa(t);
    SectionProfile sp{grid, {}, {}};
    sp.chi.resize(grid.node_count);
    sp.psi.resize(grid.node_count);
    for (int i = 0; i < grid.node_count; ++i) {
        ld chi, psi, phi;
        sa.at_r(grid.nodes[i], chi, psi, phi);
        sp.chi[i] = static_cast<double>(chi);
        sp.psi[i] = static_cast<double>(psi);
    }
    sp.psi.back() = 0.0;
    return sp;
}

double section_area(const SectionProfile& sp) {
    std::vector<double> f(sp.chi.size());
    for (size_t i = 0; i < f.size(); ++i) f[i] = sp.chi[i] * sp.psi[i];
    return 4.0 * std::numbers::pi * integrate(sp.grid, f);
}

CigarProfile cigar_profile(double lambda, const std::vector<double>& s_samples) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("cigar scale must be positive");
    CigarProfile c;
    c.lambda = lambda;
    c.s = s_samples;
    c.warp.resize(s_samples.size());
    c.gauss.resize(s_samples.size());
    for (size_t i = 0; i < s_samples.size(); ++i) {
        double x = s_samples[i] / lambda;
        double sech = 1.0 / std::cosh(x);
        c.warp[i] = lambda * std::tanh(x);
        c.gauss[i] = 2.0 / (lambda * lambda) * sech * sech;
    }
    c.tip_scalar = 4.0 / (lambda * lambda);
    return c;
}

}  // namespace warpflow
