#include "warpflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "warpflow/errors.hpp"

namespace warpflow {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double kmax_at(const CurvatureField& c, size_t i) {
    return std::max({std::abs(c.k_top[i]), std::abs(c.k1_perp[i]), std::abs(c.k2_perp[i]), std::abs(c.l_sec[i])});
}

AsymptoticGaps gaps_from(const Profile& p, const CurvatureField& c, const std::vector<double>& s, double ell,
                         double sc_tip, double window) {
    AsymptoticGaps g;
    const int nc = p.grid.node_count;
    const double h = p.psi[0];
    for (int i = 0; i < nc && s[i] <= window; ++i) {
        g.cyl_psi = std::max(g.cyl_psi, std::abs(p.psi[i] / h - 1.0));
        if (i > 0) g.cyl_phi = std::max(g.cyl_phi, std::abs(p.phi[i] / s[i] - 1.0));
        g.cyl_curvature = std::max(g.cyl_curvature, h * h * kmax_at(c, i));
    }
    g.cylinder_gap = g.cyl_psi + g.cyl_phi + g.cyl_curvature;

    if (!(sc_tip > 0.0)) {
        g.cig_psi = g.cig_l = g.cigar_gap = kNaN;
        return g;
    }
    const double lam = lambda_from_tip_scalar(sc_tip);
    for (int i = nc - 1; i >= 0 && s[i] >= ell - window; --i) {
        double sigma = std::max(ell - s[i], 0.0);
        double model = lam * std::tanh(sigma / lam);
        g.cig_psi = std::max(g.cig_psi, std::abs(p.psi[i] - model) / h);
        g.cig_l = std::max(g.cig_l, lam * lam * std::abs(c.l_sec[i]));
    }
    g.cigar_gap = g.cig_psi + g.cig_l;
    return g;
}

}  // namespace

const char* to_string(GirthCandidate c) {
    switch (c) {
        case GirthCandidate::waist_circle: return "waist_circle";
        case GirthCandidate::tip_circle: return "tip_circle";
        case GirthCandidate::meridian: return "meridian";
    }
    return "unknown";
}

GirthEstimate girth_estimate(const Profile& p) {
    check_profile(p);
    GirthEstimate g;
    g.candidates = {2.0 * kPi * p.psi.front(), 2.0 * kPi * p.phi.back(), 4.0 * integrate(p.grid, p.chi)};
    int best = 0;
    for (int k = 1; k < 3; ++k) {
        if (g.candidates[k] < g.candidates[best]) best = k;
    }
    g.length = g.candidates[best];
    g.candidate = static_cast<GirthCandidate>(best);
    return g;
}

double lambda_from_tip_scalar(double sc_tip) {
    if (!(sc_tip > 0.0)) throw NumericError("scalar curvature at the tip is not positive");
    return 2.0 / std::sqrt(sc_tip);
}

double lambda_estimate(const Profile& p) {
    auto c = sectional_curvatures(p);
    auto sc = scalar_from_sectional(c, p.n);
    return lambda_from_tip_scalar(sc.back());
}

AsymptoticGaps asymptotic_gaps(const Profile& p, double window) {
    check_profile(p);
    auto arc = arc_length(p);
    if (!(window > 0.0) || !(window < arc.ell / 2.0)) {
        throw ConfigError("gap window must lie in (0, ell/2) with ell = " + std::to_string(arc.ell));
    }
    auto c = sectional_curvatures(p);
    auto sc = scalar_from_sectional(c, p.n);
    return gaps_from(p, c, arc.s, arc.ell, sc.back(), window);
}

GeoSummary geometric_summary(const Profile& p, double t, const SummaryOptions& opt) {
    check_profile(p);
    SDerivs d;
    s_derivatives(p, d);
    CurvatureField c = sectional_curvatures(p, d);
    OrderingField o = ordering_field(p, c, d);
    GeoSummary g;
    g.time = t;
    g.time_ext = kNaN;
    auto arc = arc_length(p);
    g.ell = arc.ell;
    g.h = p.psi.front();
    g.d = p.phi.back();
    std::vector<double> integrand(p.psi.size());
    for (size_t i = 0; i < integrand.size(); ++i) integrand[i] = p.psi[i] * p.chi[i];
    g.area = 4.0 * kPi * integrate(p.grid, integrand);
    g.girth = girth_estimate(p);

    auto sc = scalar_from_sectional(c, p.n);
    g.sc_max = *std::max_element(sc.begin(), sc.end());
    g.sc_tip = sc.back();
    g.lambda_hat = g.sc_tip > 0.0 ? lambda_from_tip_scalar(g.sc_tip) : kNaN;
    g.k_top_waist = c.k_top.front();

    double kmax = 0.0;
    for (size_t i = 0; i < sc.size(); ++i) kmax = std::max(kmax, kmax_at(c, i));
    g.curvature_scale = kmax;
    const std::vector<double>* ord[4] = {&o.x_raw, &o.y_raw, &o.z_raw, &o.l_sec};
    const std::vector<double>* grad[4] = {&o.k_top_s, &o.k1_perp_s, &o.k2_perp_s, &o.l_sec_s};
    for (int k = 0; k < 4; ++k) {
        g.ordering_margins[k] = *std::min_element(ord[k]->begin(), ord[k]->end());
        g.gradient_margins[k] = *std::min_element(grad[k]->begin(), grad[k]->end());
    }
    if (opt.gap_window > 0.0 && opt.gap_window < g.ell / 2.0) {
        g.gaps = gaps_from(p, c, arc.s, arc.ell, g.sc_tip, opt.gap_window);
    } else {
        g.gaps = {kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN};
    }
    return g;
}

double difference_weight(double r) {
    const double a = kPi / 6.0, b = kPi / 3.0;
    if (r <= a) return 1.0 / (r * r);
    if (r >= b) return 1.0;
    const double len = b - a, u = (r - a) / len;
    const double u2 = u * u, u3 = u2 * u, u4 = u3 * u, u5 = u4 * u;
    const double h0 = 1 - 10 * u3 + 15 * u4 - 6 * u5;
    const double h1 = u - 6 * u3 + 8 * u4 - 3 * u5;
    const double h2 = 0.5 * u2 - 1.5 * u3 + 1.5 * u4 - 0.5 * u5;
    const double h3 = 10 * u3 - 15 * u4 + 6 * u5;
    const double y0 = 1.0 / (a * a), y1 = -2.0 / (a * a * a), y2 = 6.0 / (a * a * a * a);
    return y0 * h0 + len * y1 * h1 + len * len * y2 * h2 + 1.0 * h3;
}

WeightedDifferences weighted_differences(const Profile& p) {
    check_profile(p);
    SDerivs d;
    s_derivatives(p, d);
    CurvatureField c = sectional_curvatures(p, d);
    OrderingField o = ordering_field(p, c, d);
    const Grid& g = p.grid;
    const int nc = g.node_count, m = nc - 1;
    WeightedDifferences w;
    w.x.resize(nc);
    w.y.resize(nc);
    w.z.resize(nc);
    w.w.resize(nc);
    for (int i = 0; i < nc; ++i) w.w[i] = i == 0 ? std::numeric_limits<double>::infinity() : difference_weight(g.nodes[i]);
    const double half_pi = kPi / 2.0;
    for (int i = 1; i < m; ++i) {
        w.x[i] = w.w[i] * o.x_raw[i];
        w.z[i] = w.w[i] * o.z_raw[i];
        w.y[i] = difference_weight(half_pi - g.nodes[i]) * o.y_raw[i];
    }
    // Limits where the weight is singular: the weighted quantity is even there.
    auto limit = [&](const std::vector<double>& v, bool tip) {
        std::array<double, 3> dist{1.0, 2.0, 3.0}, val{};
        for (int k = 0; k < 3; ++k) val[k] = tip ? v[m - 1 - k] : v[1 + k];
        return extrapolate_even(dist, val);
    };
    w.x[0] = limit(w.x, false);
    w.z[0] = limit(w.z, false);
    w.x[m] = o.x_raw[m];
    w.z[m] = o.z_raw[m];
    w.y[0] = difference_weight(half_pi) * o.y_raw[0];
    w.y[m] = limit(w.y, true);
    return w;
}

}  // namespace warpflow
