#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rispls {

using cplx = std::complex<double>;

/// Principal branch of ln Gamma(z), valid off the non-positive real axis.
/// Stirling series after an upward recurrence shift; relative accuracy
/// ~1e-14 for |Im z| up to 1e4.
cplx complex_log_gamma(cplx z);

/// Gauss hypergeometric 2F1(a,b;c;x) for real parameters and x < 1.
/// Series for moderate |x|, Pfaff transformation for x < -0.5.
double gauss_2f1(double a, double b, double c, double x);

/// Nodes/weights of the n-point Gauss-Legendre rule on [-1,1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Adaptive Gauss-Kronrod (G7/K15) quadrature of f on [a,b].
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol = 1e-10, double rel_tol = 1e-10, int max_depth = 48);

// ---------------------------------------------------------------------------
// Mellin-Barnes machinery.
//
// An integrand is a product of gamma factors Gamma(shift + sign*sum_i c_i s_i),
// each in the numerator or denominator, integrated over vertical contours
// s_k = anchor_k + i t against per-fold powers x_k^{s_k}.
// ---------------------------------------------------------------------------

struct GammaTerm {
    std::vector<double> coeffs;  // one entry per fold; missing entries read as 0
    double shift = 0.0;
    int sign = +1;               // Gamma(shift + sign * dot(coeffs, s))
    bool denom = false;

    double coeff(std::size_t k) const { return k < coeffs.size() ? coeffs[k] : 0.0; }
};

struct GammaFactorGroup {
    std::vector<GammaTerm> terms;
};

struct ContourConfig {
    std::vector<double> anchors;      // empty: defaults per fold (see below)
    double half_height = 20.0;        // truncation of the imaginary range
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    int max_nodes_per_fold = 4001;    // odd; lower bound on node spacing
    double max_step = 0.1;            // upper bound on the trapezoid step
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long nodes_used = 0;
    bool converged = false;
};

/// N-fold Mellin-Barnes integrand specification.
/// per_fold_factors[k] terms must involve fold k only (scalar coefficient);
/// outer_factors may couple any subset of folds.
struct FoxHMultivarSpec {
    int folds = 1;
    GammaFactorGroup outer_factors;
    std::vector<GammaFactorGroup> per_fold_factors;
    std::vector<double> arguments;            // strictly positive
    std::vector<int> argument_exponent_sign;  // per fold, +1 (default) or -1

    int arg_sign(std::size_t k) const {
        return k < argument_exponent_sign.size() ? argument_exponent_sign[k] : +1;
    }
};

/// Meijer G parameter block; kernel
///   prod_{j<=m} G(b_j - s) prod_{j<=n} G(1 - a_j + s)
///   / [ prod_{j>m} G(1 - b_j + s) prod_{j>n} G(a_j - s) ] * x^s.
struct MeijerGSpec {
    int m = 0, n = 0, p = 0, q = 0;
    std::vector<double> a_params;
    std::vector<double> b_params;
    double argument = 1.0;
};

/// Two-fold Meijer G with an outer block coupling s1 + s2 (all-ones weights)
/// and one standard block per fold, as in bivariate G-function tables.
struct BivariateMeijerGSpec {
    MeijerGSpec outer;   // (m,n,p,q) over the combined variable s1+s2
    MeijerGSpec fold1;   // argument fields of fold blocks carry the two arguments
    MeijerGSpec fold2;
};

/// Admissible window (lo, hi) for the fold-k contour anchor, from the
/// per-fold gamma factors alone. Throws if the pole families collide.
std::pair<double, double> contour_window(const FoxHMultivarSpec& spec, int fold);

/// Midpoint-of-window defaults (one-sided windows fall back 0.5 inside).
std::vector<double> default_anchors(const FoxHMultivarSpec& spec);

/// Anchor minimizing the on-axis integrand magnitude inside the fold window;
/// cheaper contours for very small/large arguments than the midpoint rule.
std::vector<double> tuned_anchors(const FoxHMultivarSpec& spec);

QuadratureResult fox_h_multivariate(const FoxHMultivarSpec& spec, const ContourConfig& contour = {});

/// Evaluates the same gamma-factor structure at many argument vectors in a
/// single sweep of the node tensor; the coupling gammas are argument-free,
/// so each extra argument set costs a few complex multiplies per node.
std::vector<QuadratureResult> fox_h_multi_args(const FoxHMultivarSpec& base,
                                               const std::vector<std::vector<double>>& arg_sets,
                                               const ContourConfig& contour = {});

QuadratureResult meijer_g(const MeijerGSpec& spec, const ContourConfig& contour = {});
QuadratureResult bivariate_meijer_g(const BivariateMeijerGSpec& spec, const ContourConfig& contour = {});

/// Translation used by meijer_g; exposed for the one-fold equivalence tests.
FoxHMultivarSpec meijer_to_foxh(const MeijerGSpec& spec);

struct SpecfunError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rispls
