#include "warpflow/metric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "warpflow/errors.hpp"

namespace warpflow {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr ParityPair kEvenEven{Parity::even, Parity::even};
constexpr ParityPair kOddOdd{Parity::odd, Parity::odd};

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Even extrapolation to an endpoint from the next nodes inward, using the
// computational distances (even in xi is even in s).
double endpoint_limit(const std::vector<double>& v, bool at_tip, int order) {
    const int m = static_cast<int>(v.size()) - 1;
    auto at = [&](int k) { return at_tip ? v[m - k] : v[k]; };
    if (order == 2) {
        std::array<double, 2> d{1.0, 2.0}, y{at(1), at(2)};
        return extrapolate_even(d, y);
    }
    std::array<double, 3> d{1.0, 2.0, 3.0}, y{at(1), at(2), at(3)};
    return extrapolate_even(d, y);
}

// Weight selecting the integral form of L near the waist: 1 on [0, pi/8],
// 0 on [pi/4, pi/2], C^2 smoothstep between.
double waist_blend(double r) {
    constexpr double a = std::numbers::pi / 8.0, b = std::numbers::pi / 4.0;
    if (r <= a) return 1.0;
    if (r >= b) return 0.0;
    double x = (r - a) / (b - a);
    return 1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
}

// Slope at an endpoint of a function odd about it (value v0 there), from an
// odd polynomial a1 x + a3 x^3 + a5 x^5 through the next three nodes. x is the
// signed distance from the endpoint into the interval.
double odd_slope(double v0, const std::array<double, 3>& x, const std::array<double, 3>& v) {
    // Solve [x, x^3, x^5] a = v - v0 by Cramer on the scaled system.
    double a[3][3], b[3];
    for (int i = 0; i < 3; ++i) {
        a[i][0] = x[i];
        a[i][1] = x[i] * x[i] * x[i];
        a[i][2] = a[i][1] * x[i] * x[i];
        b[i] = v[i] - v0;
    }
    auto det3 = [](double m[3][3]) {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    };
    double d = det3(a);
    double m1[3][3];
    for (int i = 0; i < 3; ++i) {
        m1[i][0] = b[i];
        m1[i][1] = a[i][1];
        m1[i][2] = a[i][2];
    }
    return det3(m1) / d;
}

// Linear coefficient of the degree-6 interpolant through seven nodes next to
// an endpoint; vanishes up to truncation for a function even about it.
double even_slope(const std::array<double, 7>& x, const std::array<double, 7>& v) {
    // Derivative at x = 0 of the Lagrange interpolant (x[0] == 0).
    double slope = 0.0;
    for (int j = 0; j < 7; ++j) {
        double dl = 0.0;
        for (int k = 0; k < 7; ++k) {
            if (k == j) continue;
            double term = 1.0 / (x[j] - x[k]);
            for (int q = 0; q < 7; ++q) {
                if (q == j || q == k) continue;
                term *= (0.0 - x[q]) / (x[j] - x[q]);
            }
            dl += term;
        }
        slope += v[j] * dl;
    }
    return slope;
}

}  // namespace

void check_profile(const Profile& p) {
    const auto nc = static_cast<size_t>(p.grid.node_count);
    if (p.chi.size() != nc || p.psi.size() != nc || p.phi.size() != nc) {
        throw DataError("profile arrays do not match the grid node count " + std::to_string(nc));
    }
    if (p.n < 3) throw ConfigError("dimension n must be at least 3, got " + std::to_string(p.n));
    for (size_t i = 0; i < nc; ++i) {
        if (!std::isfinite(p.chi[i]) || !std::isfinite(p.psi[i]) || !std::isfinite(p.phi[i])) {
            throw NumericError("non-finite profile sample", static_cast<int>(i));
        }
    }
}

std::string SmoothnessReport::summary() const {
    std::ostringstream os;
    for (const auto& c : checks) {
        os << (c.pass ? "ok   " : "FAIL ") << c.name << " [" << c.condition << "] violation=" << c.violation
           << "\n";
    }
    return os.str();
}

SmoothnessReport validate_smoothness(const Profile& p, double tol) {
    check_profile(p);
    SmoothnessReport rep;
    rep.tol = tol;
    const Grid& g = p.grid;
    const int m = g.last();
    const double chi_scale = max_abs(p.chi);
    const double psi_scale = std::max(max_abs(p.psi), 1e-300);
    const double phi_scale = std::max(max_abs(p.phi), 1e-300);

    auto add = [&](std::string name, std::string cond, double v) {
        SmoothnessCheck c{std::move(name), std::move(cond), v, v <= tol};
        rep.pass = rep.pass && c.pass;
        rep.checks.push_back(std::move(c));
    };

    double pos = 0.0;
    for (int i = 0; i <= m; ++i) pos = std::max(pos, -p.chi[i] / std::max(chi_scale, 1e-300));
    for (int i = 0; i < m; ++i) pos = std::max(pos, -p.psi[i] / psi_scale);
    for (int i = 1; i <= m; ++i) pos = std::max(pos, -p.phi[i] / phi_scale);
    // Zero counts as a violation for the strict positivity requirements.
    bool zero = false;
    for (int i = 0; i <= m; ++i) zero = zero || p.chi[i] == 0.0;
    for (int i = 0; i < m; ++i) zero = zero || p.psi[i] == 0.0;
    for (int i = 1; i <= m; ++i) zero = zero || p.phi[i] == 0.0;
    add("positivity", "chi > 0; psi > 0 off the tip; phi > 0 off the waist", zero ? std::max(pos, 1.0) : pos);

    add("psi_vanishes_at_tip", "psi odd at r = pi/2", std::abs(p.psi[m]) / psi_scale);
    add("phi_vanishes_at_waist", "phi odd at r = 0", std::abs(p.phi[0]) / phi_scale);

    // Even-parity slopes, measured in units of the function scale per unit r.
    auto slope_at = [&](const std::vector<double>& f, bool tip) {
        std::array<double, 7> x{}, v{};
        for (int k = 0; k < 7; ++k) {
            int i = tip ? m - k : k;
            x[k] = tip ? g.nodes[i] - kHalfPi : g.nodes[i];
            v[k] = f[i];
        }
        return std::abs(even_slope(x, v));
    };
    double even_viol = std::max({slope_at(p.chi, false) / std::max(chi_scale, 1e-300),
                                 slope_at(p.chi, true) / std::max(chi_scale, 1e-300),
                                 slope_at(p.psi, false) / psi_scale, slope_at(p.phi, true) / phi_scale});
    add("even_parity", "chi even at both orbits; psi even at r = 0; phi even at r = pi/2",
        even_viol * kHalfPi);

    std::array<double, 3> xw{g.nodes[1], g.nodes[2], g.nodes[3]};
    std::array<double, 3> vw{p.phi[1], p.phi[2], p.phi[3]};
    double phi_slope = odd_slope(p.phi[0], xw, vw);
    add("waist_compatibility", "phi'(0) = chi(0)", std::abs(phi_slope - p.chi[0]) / std::abs(p.chi[0]));

    std::array<double, 3> xt{g.nodes[m - 1] - kHalfPi, g.nodes[m - 2] - kHalfPi, g.nodes[m - 3] - kHalfPi};
    std::array<double, 3> vt{p.psi[m - 1], p.psi[m - 2], p.psi[m - 3]};
    double psi_slope = odd_slope(p.psi[m], xt, vt);
    add("tip_compatibility", "psi'(pi/2) = -chi(pi/2)", std::abs(psi_slope + p.chi[m]) / std::abs(p.chi[m]));
    return rep;
}

ArcLength arc_length(const Profile& p) {
    check_profile(p);
    ArcLength a;
    a.s = cumulative_integral(p.grid, p.chi, kEvenEven);
    a.ell = integrate(p.grid, p.chi);
    return a;
}

void SDerivs::resize(int n) {
    for (auto* v : {&J, &J_xi, &psi_s, &psi_ss, &phi_s, &phi_ss, &work1, &work2}) v->resize(n);
}

void s_derivatives(const Profile& p, SDerivs& d) {
    const Grid& g = p.grid;
    const int nc = g.node_count;
    d.resize(nc);
    for (int i = 0; i < nc; ++i) d.J[i] = p.chi[i] * g.jac[i];
    diff1_xi(g, d.J, kEvenEven, d.J_xi);

    auto second = [&](const std::vector<double>& f, ParityPair par, std::vector<double>& fs,
                      std::vector<double>& fss) {
        diff1_xi(g, f, par, d.work1);
        diff2_xi(g, f, par, d.work2);
        for (int i = 0; i < nc; ++i) {
            double inv = 1.0 / d.J[i];
            fs[i] = d.work1[i] * inv;
            fss[i] = (d.work2[i] - d.J_xi[i] * inv * d.work1[i]) * inv * inv;
        }
    };
    second(p.psi, g.parity.psi, d.psi_s, d.psi_ss);
    second(p.phi, g.parity.phi, d.phi_s, d.phi_ss);
}

void curvature_values(const Profile& p, const SDerivs& d, std::vector<double>& kt, std::vector<double>& k1,
                      std::vector<double>& k2, std::vector<double>& l) {
    const Grid& g = p.grid;
    const int nc = g.node_count, m = nc - 1;
    kt.resize(nc);
    k1.resize(nc);
    k2.resize(nc);
    l.resize(nc);
    for (int i = 0; i < m; ++i) {
        if (p.psi[i] <= 0.0) throw NumericError("psi not positive off the tip", i);
        kt[i] = -d.psi_ss[i] / p.psi[i];
    }
    kt[m] = endpoint_limit(kt, true, g.order);
    for (int i = 1; i <= m; ++i) {
        if (p.phi[i] <= 0.0) throw NumericError("phi not positive off the waist", i);
        k1[i] = -d.phi_ss[i] / p.phi[i];
    }
    k1[0] = endpoint_limit(k1, false, g.order);
    for (int i = 1; i < m; ++i) k2[i] = -d.psi_s[i] * d.phi_s[i] / (p.psi[i] * p.phi[i]);
    k2[0] = kt[0];
    k2[m] = k1[m];

    // Near the waist 1 - phi_s^2 cancels against phi^2 ~ s^2; there L comes
    // from phi^2 L = -int_0^s 2 phi_s phi_ss ds instead.
    std::vector<double> q(nc), acc(nc);
    for (int i = 0; i < nc; ++i) q[i] = -2.0 * d.phi_s[i] * d.phi_ss[i] * d.J[i];
    cumulative_integral_xi(g, q, kOddOdd, acc);
    for (int i = 1; i <= m; ++i) {
        double direct = (1.0 - d.phi_s[i] * d.phi_s[i]) / (p.phi[i] * p.phi[i]);
        double w = waist_blend(g.nodes[i]);
        l[i] = w > 0.0 ? w * acc[i] / (p.phi[i] * p.phi[i]) + (1.0 - w) * direct : direct;
    }
    l[m] = 1.0 / (p.phi[m] * p.phi[m]);
    l[0] = k1[0];
}

namespace {

std::vector<double> s_derivative_even(const Profile& p, const SDerivs& d, const std::vector<double>& f) {
    std::vector<double> out(f.size());
    diff1_xi(p.grid, f, kEvenEven, out);
    for (size_t i = 0; i < f.size(); ++i) out[i] /= d.J[i];
    out.front() = 0.0;
    out.back() = 0.0;
    return out;
}

}  // namespace

CurvatureField sectional_curvatures(const Profile& p, const SDerivs& d) {
    CurvatureField c;
    curvature_values(p, d, c.k_top, c.k1_perp, c.k2_perp, c.l_sec);
    c.k_top_s = s_derivative_even(p, d, c.k_top);
    c.k1_perp_s = s_derivative_even(p, d, c.k1_perp);
    c.k2_perp_s = s_derivative_even(p, d, c.k2_perp);
    c.l_sec_s = s_derivative_even(p, d, c.l_sec);
    return c;
}

CurvatureField sectional_curvatures(const Profile& p) {
    check_profile(p);
    SDerivs d;
    s_derivatives(p, d);
    return sectional_curvatures(p, d);
}

RicciField ricci_and_scalar(const Profile& p, const CurvatureField& c) {
    const int nc = p.grid.node_count;
    const double n2 = p.n - 2, n3 = p.n - 3;
    RicciField r;
    r.rc11.resize(nc);
    r.rc22.resize(nc);
    r.rc33.resize(nc);
    r.scalar.resize(nc);
    for (int i = 0; i < nc; ++i) {
        r.rc11[i] = c.k_top[i] + n2 * c.k1_perp[i];
        r.rc22[i] = c.k_top[i] + n2 * c.k2_perp[i];
        r.rc33[i] = c.k1_perp[i] + c.k2_perp[i] + n3 * c.l_sec[i];
        r.scalar[i] = r.rc11[i] + r.rc22[i] + n2 * r.rc33[i];
    }
    return r;
}

RicciField ricci_and_scalar(const Profile& p) { return ricci_and_scalar(p, sectional_curvatures(p)); }

std::vector<double> scalar_from_sectional(const CurvatureField& c, int n) {
    std::vector<double> sc(c.k_top.size());
    for (size_t i = 0; i < sc.size(); ++i) {
        sc[i] = 2.0 * c.k_top[i] + 2.0 * (n - 2) * (c.k1_perp[i] + c.k2_perp[i]) +
                (n - 2.0) * (n - 3.0) * c.l_sec[i];
    }
    return sc;
}

std::vector<double> scalar_laplacian(const Profile& p, const std::vector<double>& f, ParityPair par) {
    check_profile(p);
    const Grid& g = p.grid;
    const int nc = g.node_count, m = nc - 1;
    if (static_cast<int>(f.size()) != nc) throw DataError("laplacian input has wrong length");
    SDerivs d;
    s_derivatives(p, d);
    std::vector<double> f1(nc), f2(nc), out(nc);
    diff1_xi(g, f, par, f1);
    diff2_xi(g, f, par, f2);
    const double n2 = p.n - 2;
    for (int i = 0; i < nc; ++i) {
        double inv = 1.0 / d.J[i];
        double fs = f1[i] * inv;
        double fss = (f2[i] - d.J_xi[i] * inv * f1[i]) * inv * inv;
        f1[i] = fs;
        f2[i] = fss;
    }
    double fscale = std::max(max_abs(f1), 1e-300);
    for (int i = 1; i < m; ++i) {
        out[i] = f2[i] + (d.psi_s[i] / p.psi[i] + n2 * d.phi_s[i] / p.phi[i]) * f1[i];
    }
    // Waist: (n-2)(phi_s/phi) f_s -> (n-2) f_ss for even f.
    if (par.at_waist == Parity::odd && std::abs(f1[0]) > 1e-8 * fscale) {
        throw NumericError("laplacian of a function odd at the waist is singular", 0);
    }
    out[0] = (1.0 + n2) * f2[0];
    // Tip: (psi_s/psi) f_s -> f_ss for even f.
    if (par.at_tip == Parity::odd && std::abs(f1[m]) > 1e-8 * fscale) {
        throw NumericError("laplacian of a function odd at the tip is singular", m);
    }
    out[m] = 2.0 * f2[m];
    return out;
}

OrderingField ordering_field(const Profile& p, const CurvatureField& c, const SDerivs& d) {
    const Grid& g = p.grid;
    const int nc = g.node_count, m = nc - 1;
    OrderingField o;
    o.x_raw.resize(nc);
    o.y_raw.resize(nc);
    o.z_raw.resize(nc);
    o.l_sec = c.l_sec;

    // K^T - K2 = -(phi/psi)(psi_s/phi)_s and K2 - K1 = (psi/phi)(phi_s/psi)_s.
    std::vector<double> a(nc), b(nc), da(nc), db(nc);
    for (int i = 1; i < nc; ++i) a[i] = d.psi_s[i] / p.phi[i];
    a[0] = d.psi_ss[0] / d.phi_s[0];
    for (int i = 0; i < m; ++i) b[i] = d.phi_s[i] / p.psi[i];
    b[m] = d.phi_ss[m] / d.psi_s[m];
    diff1_xi(g, a, kEvenEven, da);
    diff1_xi(g, b, kEvenEven, db);
    for (int i = 1; i < m; ++i) {
        o.x_raw[i] = -(p.phi[i] / p.psi[i]) * da[i] / d.J[i];
        o.y_raw[i] = (p.psi[i] / p.phi[i]) * db[i] / d.J[i];
    }
    o.x_raw[0] = 0.0;
    o.x_raw[m] = endpoint_limit(o.x_raw, true, g.order);
    o.y_raw[m] = 0.0;
    o.y_raw[0] = endpoint_limit(o.y_raw, false, g.order);
    for (int i = 0; i < nc; ++i) o.z_raw[i] = c.k1_perp[i] - c.l_sec[i];

    o.k_top_s = c.k_top_s;
    o.k1_perp_s = c.k1_perp_s;
    o.k2_perp_s.assign(nc, 0.0);
    o.l_sec_s.assign(nc, 0.0);
    for (int i = 1; i < m; ++i) {
        double rphi = d.phi_s[i] / p.phi[i], rpsi = d.psi_s[i] / p.psi[i];
        o.k2_perp_s[i] = rphi * o.x_raw[i] - rpsi * o.y_raw[i];
        o.l_sec_s[i] = 2.0 * rphi * o.z_raw[i];
    }
    return o;
}

IdentityResidual curvature_derivative_identities(const CurvatureField& c, const Profile& p, double tol,
                                                 double margin) {
    check_profile(p);
    SDerivs d;
    s_derivatives(p, d);
    const Grid& g = p.grid;
    const int m = g.last();
    IdentityResidual r;
    double kmax = 0.0;
    for (size_t i = 0; i < c.k_top.size(); ++i) {
        kmax = std::max({kmax, std::abs(c.k_top[i]), std::abs(c.k1_perp[i]), std::abs(c.k2_perp[i]),
                         std::abs(c.l_sec[i])});
    }
    r.scale = std::pow(kmax, 1.5);
    const double lo = margin * kHalfPi, hi = (1.0 - margin) * kHalfPi;
    for (int i = 1; i < m; ++i) {
        if (g.nodes[i] < lo || g.nodes[i] > hi) continue;
        double rphi = d.phi_s[i] / p.phi[i], rpsi = d.psi_s[i] / p.psi[i];
        double k2_id = rphi * (c.k_top[i] - c.k2_perp[i]) - rpsi * (c.k2_perp[i] - c.k1_perp[i]);
        double l_id = 2.0 * rphi * (c.k1_perp[i] - c.l_sec[i]);
        r.k2_residual = std::max(r.k2_residual, std::abs(c.k2_perp_s[i] - k2_id));
        r.l_residual = std::max(r.l_residual, std::abs(c.l_sec_s[i] - l_id));
    }
    r.pass = std::max(r.k2_residual, r.l_residual) <= tol * std::max(r.scale, 1e-300);
    return r;
}

}  // namespace warpflow
