#pragma once

#include <array>
#include <stdexcept>

#include "rispls/rng.hpp"

namespace rispls {

/// Annulus user placement around the BS. density_lambda is recorded for the
/// HPPP framing but unused by the metrics (single tagged user analysis).
struct AnnulusGeometry {
    double r0 = 1.0;
    double r1 = 300.0;
    double r2 = 400.0;
    double d_uR = 30.0;
    double density_lambda = 1e-4;

    void validate() const;
};

struct BlockageModel {
    double b1 = 0.3;
    void validate() const;
};

struct PathLossParams {
    double alpha1 = 2.0;   // LoS exponent
    double alpha2 = 3.0;   // NLoS exponent
    double c_l1 = 1.0;     // BS-RIS intercept
    double c_l2 = 1.0;     // RIS-user intercept
    void validate() const;
};

enum class LinkKind { LoS, NLoS, RisReflected, RisWithDirect };

/// (r^2 - r0^2) / (r2^2 - r0^2) on [r0, r2].
double user_distance_cdf(double r, const AnnulusGeometry& g);

/// Inverse-transform draw from the annulus law.
double sample_user_distance(const AnnulusGeometry& g, Rng& rng);

/// Pr(r <= r1) under the annulus law.
double b2(const AnnulusGeometry& g);

/// P_A = [Pr_LoS, 1 - Pr_LoS]; P_B refines by the eavesdropper lobe state,
/// Pr_G = theta_c / 180.
void prob_vectors(const AnnulusGeometry& g, const BlockageModel& blockage, double theta_c_deg,
                  std::array<double, 2>& p_a, std::array<double, 4>& p_b);

/// Density of D = d^alpha on [r0^alpha, r2^alpha].
double d_alpha_pdf(double x, double alpha, const AnnulusGeometry& g);

/// Path gain: d^-alpha1 (LoS), d^-alpha2 (NLoS),
/// C_L1 C_L2 d_uR^-2 d^-2 (RIS reflected path).
double path_loss(LinkKind kind, double d, const AnnulusGeometry& g, const PathLossParams& plp);

struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rispls
