#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rispls/rng.hpp"

namespace rispls {

/// Fisher-Snedecor F composite fading link: severity m, shadowing m_s,
/// mean power gamma_bar (linear). Every closed form divides by (m_s - 1),
/// so m_s <= 1 is rejected throughout.
struct FisherFParams {
    double m = 1.0;
    double m_s = 2.0;
    double gamma_bar = 1.0;

    void validate() const;
};

/// Power-domain PDF: m^m ((m_s-1)g)^{m_s} x^{m-1} / [B(m,m_s) (m x + (m_s-1)g)^{m+m_s}].
double f_power_pdf(double gamma, const FisherFParams& p);

/// Power-domain CDF via the 2F1 representation.
double f_power_cdf(double gamma, const FisherFParams& p);

/// E[gamma^n]; requires m_s > n.
double f_moment(int n, const FisherFParams& p);

/// One draw: gamma_bar * (X/m) / (Y/(m_s-1)), X~Gamma(m), Y~Gamma(m_s).
double sample_f(const FisherFParams& p, Rng& rng);

/// Single-F surrogate matching the first three moments of a sum of
/// independent F variates. Components need m_s > 3.
FisherFParams approx_sum_f(const std::vector<FisherFParams>& components);

/// Single-F surrogate for the product of two independent F variates.
FisherFParams approx_product_pair(const FisherFParams& p1, const FisherFParams& p2);

/// Surrogate from raw moments (mu1, mu2, mu3) directly; shared solver core.
FisherFParams fit_f_to_moments(double mu1, double mu2, double mu3);

struct FadingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rispls
