#pragma once

#include <string>
#include <vector>

#include "warpflow/grid.hpp"

namespace warpflow {

// How the radial coordinate is tied to the geometry. `coordinate` is the
// literal r of the closed-form solutions; `arclength` keeps chi independent of
// r, so nodes sit at fixed fractions of the waist-to-tip length.
enum class Gauge { coordinate, arclength };

// g = chi^2 dr^2 + psi^2 dtheta^2 + phi^2 g_{S^{n-2}} on S^n, sampled on a Grid.
struct Profile {
    Grid grid;
    int n = 3;
    std::vector<double> chi, psi, phi;
};

// Check shape, dimension and finiteness; throws DataError.
void check_profile(const Profile& p);

struct SmoothnessCheck {
    std::string name;
    std::string condition;  // which smoothness requirement this measures
    double violation = 0.0; // relative
    bool pass = true;
};

struct SmoothnessReport {
    std::vector<SmoothnessCheck> checks;
    double tol = 0.0;
    bool pass = true;
    std::string summary() const;
};

inline constexpr double kDefaultSmoothTol = 1e-6;

SmoothnessReport validate_smoothness(const Profile& p, double tol = kDefaultSmoothTol);

struct ArcLength {
    std::vector<double> s;
    double ell = 0.0;
};

ArcLength arc_length(const Profile& p);

// First and second s-derivatives of psi and phi, with ds/dxi = J.
struct SDerivs {
    std::vector<double> J, J_xi;
    std::vector<double> psi_s, psi_ss, phi_s, phi_ss;
    std::vector<double> work1, work2;  // scratch
    void resize(int n);
};

void s_derivatives(const Profile& p, SDerivs& d);

// The four curvature-operator eigenvalues and their s-derivatives (by differencing).
struct CurvatureField {
    std::vector<double> k_top, k1_perp, k2_perp, l_sec;
    std::vector<double> k_top_s, k1_perp_s, k2_perp_s, l_sec_s;
};

CurvatureField sectional_curvatures(const Profile& p);
CurvatureField sectional_curvatures(const Profile& p, const SDerivs& d);

// Curvature values only (no s-derivatives); cheap enough for the time stepper.
void curvature_values(const Profile& p, const SDerivs& d, std::vector<double>& k_top, std::vector<double>& k1,
                      std::vector<double>& k2, std::vector<double>& l);

struct RicciField {
    std::vector<double> rc11, rc22, rc33, scalar;
};

RicciField ricci_and_scalar(const Profile& p);
RicciField ricci_and_scalar(const Profile& p, const CurvatureField& c);

// Sc = 2K^T + 2(n-2)(K1 + K2) + (n-2)(n-3)L, nodewise.
std::vector<double> scalar_from_sectional(const CurvatureField& c, int n);

// Delta f = f_ss + (psi_s/psi + (n-2) phi_s/phi) f_s with the drift resolved at
// both singular orbits. f must be even wherever a drift term is singular.
std::vector<double> scalar_laplacian(const Profile& p, const std::vector<double>& f, ParityPair parity);

// Curvature differences used by the ordering monitors. y is computed as
// (psi/phi)(phi_s/psi)_s so it inherits no cancellation when K1 = K2.
// k2_s_identity and l_s_identity come from the first-derivative identities.
struct OrderingField {
    std::vector<double> x_raw;  // K^T - K2
    std::vector<double> y_raw;  // K2 - K1
    std::vector<double> z_raw;  // K1 - L
    std::vector<double> l_sec;
    std::vector<double> k_top_s, k1_perp_s, k2_perp_s, l_sec_s;
};

OrderingField ordering_field(const Profile& p, const CurvatureField& c, const SDerivs& d);

struct IdentityResidual {
    double k2_residual = 0.0;  // max |(K2)_s - identity| over interior nodes
    double l_residual = 0.0;   // max |L_s - identity|
    double scale = 0.0;        // max |curvature|^{3/2}, for relative reporting
    bool pass = true;
};

// Compares the differenced s-derivatives of K2 and L against the identities
// (K2)_s = (phi_s/phi)(K^T - K2) - (psi_s/psi)(K2 - K1), L_s = 2(phi_s/phi)(K1 - L).
// Nodes within `margin` (fraction of the interval) of either orbit are skipped.
IdentityResidual curvature_derivative_identities(const CurvatureField& c, const Profile& p,
                                                 double tol = 1e-2, double margin = 0.05);

}  // namespace warpflow
