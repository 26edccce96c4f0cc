#include "rispls/channel.hpp"

#include <cmath>
#include <string>

namespace rispls {

void AntennaPattern::validate() const {
    if (!(g_main >= g_side && g_side > 0.0))
        throw ChannelError("AntennaPattern: need g_main >= g_side > 0");
    if (!(theta_c > 0.0 && theta_c <= 180.0))
        throw ChannelError("AntennaPattern: theta_c must be in (0, 180]");
}

void ScenarioConfig::validate() const {
    if (k_antennas < m_antennas + 2)
        throw ChannelError("ScenarioConfig: need K >= M + 2 so that Q = K - M - 1 >= 1");
    if (m_antennas < 1) throw ChannelError("ScenarioConfig: M must be >= 1");
    if (l_elements < 1) throw ChannelError("ScenarioConfig: L must be >= 1");
    if (!(beta_max > 0.0 && beta_max <= 1.0))
        throw ChannelError("ScenarioConfig: beta_max must be in (0, 1]");
    if (!(sigma_n_sq > 0.0)) throw ChannelError("ScenarioConfig: sigma_n_sq must be positive");
    if (!(p_un > 0.0)) throw ChannelError("ScenarioConfig: p_un must be positive");
    path_loss.validate();
    geometry.validate();
    blockage.validate();
    pattern_user.validate();
    pattern_eve.validate();
    const std::size_t qm = (std::size_t)q_eff() * m_antennas;
    const std::size_t ql = (std::size_t)q_eff() * l_elements;
    if (fading_user.size() != qm || fading_eve.size() != qm)
        throw ChannelError("ScenarioConfig: user/eve fading tables must have Q*M entries");
    if (fading_bs_ris.size() != (std::size_t)l_elements)
        throw ChannelError("ScenarioConfig: BS-RIS fading table must have L entries");
    if (fading_user_ris.size() != ql || fading_eve_ris.size() != ql)
        throw ChannelError("ScenarioConfig: RIS-side fading tables must have Q*L entries");
    for (const auto& t : {&fading_user, &fading_eve, &fading_bs_ris, &fading_user_ris,
                          &fading_eve_ris})
        for (const auto& p : *t) p.validate();
}

void ScenarioConfig::fill_tables(const FisherFParams& user, const FisherFParams& eve,
                                 const FisherFParams& bs_ris) {
    const std::size_t qm = (std::size_t)q_eff() * m_antennas;
    const std::size_t ql = (std::size_t)q_eff() * l_elements;
    fading_user.assign(qm, user);
    fading_eve.assign(qm, eve);
    fading_bs_ris.assign((std::size_t)l_elements, bs_ris);
    fading_user_ris.assign(ql, user);
    fading_eve_ris.assign(ql, eve);
}

double antenna_gain(double theta_deg, const AntennaPattern& pattern) {
    pattern.validate();
    if (theta_deg < 0.0 || theta_deg > 180.0)
        throw ChannelError("antenna_gain: theta must be in [0, 180] degrees");
    return std::abs(theta_deg) <= pattern.theta_c ? pattern.g_main : pattern.g_side;
}

double effective_gain_s1(const ScenarioConfig& cfg, const std::vector<FisherFParams>& table,
                         Rng& rng) {
    double sum = 0.0;
    for (const auto& p : table) sum += sample_f(p, rng);
    (void)cfg;
    return sum;
}

double effective_gain_s2(const ScenarioConfig& cfg, const std::vector<FisherFParams>& ris_user,
                         const std::vector<FisherFParams>& bs_ris, Rng& rng) {
    const int q = cfg.q_eff();
    const int l = cfg.l_elements;
    double sum = 0.0;
    for (int qi = 0; qi < q; ++qi)
        for (int n = 0; n < l; ++n)
            sum += sample_f(ris_user[(std::size_t)qi * l + n], rng) *
                   sample_f(bs_ris[(std::size_t)n], rng);
    return sum;
}

std::pair<double, double> a_constants(const ScenarioConfig& cfg, double directivity_gain) {
    const double q = cfg.q_eff();
    const double den = cfg.beta_max * cfg.beta_max * q * q * cfg.sigma_n_sq;
    const double a1 = directivity_gain * cfg.p_un / den;
    const double a2 = a1 * cfg.path_loss.c_l1 * cfg.path_loss.c_l2 /
                      (cfg.geometry.d_uR * cfg.geometry.d_uR);
    return {a1, a2};
}

double sinr(LinkKind kind, double gain, double d, const ScenarioConfig& cfg,
            double directivity_gain, double gain_ris) {
    if (!(gain >= 0.0) || !(d > 0.0)) throw ChannelError("sinr: invalid inputs");
    const auto [a1, a2] = a_constants(cfg, directivity_gain);
    switch (kind) {
        case LinkKind::LoS:
            return a1 * gain * std::pow(d, -cfg.path_loss.alpha1);
        case LinkKind::NLoS:
            return a1 * gain * std::pow(d, -cfg.path_loss.alpha2);
        case LinkKind::RisReflected:
            return a2 * gain / (d * d);
        case LinkKind::RisWithDirect:
            return a2 * (gain + gain_ris) / (d * d);
    }
    throw ChannelError("sinr: unknown link kind");
}

}  // namespace rispls
