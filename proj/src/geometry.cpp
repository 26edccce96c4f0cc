#include "rispls/geometry.hpp"

#include <cmath>
#include <string>

namespace rispls {

void AnnulusGeometry::validate() const {
    if (!(0.0 < r0 && r0 < r1 && r1 <= r2))
        throw GeometryError("AnnulusGeometry: need 0 < r0 < r1 <= r2");
    if (!(d_uR > 0.0)) throw GeometryError("AnnulusGeometry: d_uR must be positive");
}

void BlockageModel::validate() const {
    if (!(b1 >= 0.0 && b1 <= 1.0)) throw GeometryError("BlockageModel: b1 must be in [0,1]");
}

void PathLossParams::validate() const {
    if (!(alpha1 >= 2.0 && alpha1 <= alpha2))
        throw GeometryError("PathLossParams: need 2 <= alpha1 <= alpha2");
    if (!(c_l1 > 0.0 && c_l2 > 0.0))
        throw GeometryError("PathLossParams: intercepts must be positive");
}

double user_distance_cdf(double r, const AnnulusGeometry& g) {
    g.validate();
    if (r < g.r0 || r > g.r2)
        throw GeometryError("user_distance_cdf: r outside [r0, r2]");
    return (r * r - g.r0 * g.r0) / (g.r2 * g.r2 - g.r0 * g.r0);
}

double sample_user_distance(const AnnulusGeometry& g, Rng& rng) {
    const double u = rng.uniform();
    return std::sqrt(u * (g.r2 * g.r2 - g.r0 * g.r0) + g.r0 * g.r0);
}

double b2(const AnnulusGeometry& g) {
    g.validate();
    return (g.r1 * g.r1 - g.r0 * g.r0) / (g.r2 * g.r2 - g.r0 * g.r0);
}

void prob_vectors(const AnnulusGeometry& g, const BlockageModel& blockage, double theta_c_deg,
                  std::array<double, 2>& p_a, std::array<double, 4>& p_b) {
    blockage.validate();
    if (!(theta_c_deg > 0.0 && theta_c_deg <= 180.0))
        throw GeometryError("prob_vectors: theta_c must be in (0, 180]");
    const double pr_los = blockage.b1 * b2(g);
    const double pr_g = theta_c_deg / 180.0;
    p_a = {pr_los, 1.0 - pr_los};
    p_b = {pr_los * pr_g, pr_los * (1.0 - pr_g), (1.0 - pr_los) * pr_g,
           (1.0 - pr_los) * (1.0 - pr_g)};
}

double d_alpha_pdf(double x, double alpha, const AnnulusGeometry& g) {
    g.validate();
    const double lo = std::pow(g.r0, alpha), hi = std::pow(g.r2, alpha);
    if (x < lo || x > hi) throw GeometryError("d_alpha_pdf: x outside [r0^alpha, r2^alpha]");
    return 2.0 * std::pow(x, 2.0 / alpha - 1.0) / ((g.r2 * g.r2 - g.r0 * g.r0) * alpha);
}

double path_loss(LinkKind kind, double d, const AnnulusGeometry& g, const PathLossParams& plp) {
    plp.validate();
    if (!(d > 0.0)) throw GeometryError("path_loss: distance must be positive");
    switch (kind) {
        case LinkKind::LoS:
            return std::pow(d, -plp.alpha1);
        case LinkKind::NLoS:
            return std::pow(d, -plp.alpha2);
        case LinkKind::RisReflected:
        case LinkKind::RisWithDirect:
            return plp.c_l1 * plp.c_l2 / (g.d_uR * g.d_uR * d * d);
    }
    throw GeometryError("path_loss: unknown link kind");
}

}  // namespace rispls
