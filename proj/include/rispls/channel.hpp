#pragma once

#include <vector>

#include "rispls/fading.hpp"
#include "rispls/geometry.hpp"

namespace rispls {

/// Sectored antenna: gain g_main inside |theta| <= theta_c, g_side outside.
struct AntennaPattern {
    double g_main = 1000.0;  // 30 dB
    double g_side = 0.1;     // -10 dB
    double theta_c = 30.0;   // degrees
    void validate() const;
};

enum class Scenario { NoRis, Ris, RisWithDirect };

/// Full system parameterization. Fading tables are per element: user/eve
/// tables have Q*M entries (scenario 1) and the RIS hop tables Q*L / L
/// entries. Homogeneous configs replicate one parameter set.
struct ScenarioConfig {
    int k_antennas = 4;      // receive antennas K
    int m_antennas = 2;      // transmit antennas M
    int l_elements = 16;     // RIS elements L
    Scenario scenario = Scenario::NoRis;
    double beta_max = 1.0;
    double sigma_n_sq = 1.0;  // linear
    double p_un = 100.0;      // linear transmit power
    PathLossParams path_loss;
    AnnulusGeometry geometry;
    BlockageModel blockage;
    AntennaPattern pattern_user;
    AntennaPattern pattern_eve;
    std::vector<FisherFParams> fading_user;    // Q*M entries
    std::vector<FisherFParams> fading_eve;     // Q*M entries
    std::vector<FisherFParams> fading_bs_ris;  // L entries (per element)
    std::vector<FisherFParams> fading_user_ris;  // Q*L entries (RIS-user hop)
    std::vector<FisherFParams> fading_eve_ris;   // Q*L entries

    int q_eff() const { return k_antennas - m_antennas - 1; }
    void validate() const;
    /// Replicates scalar fading parameters into the per-element tables.
    void fill_tables(const FisherFParams& user, const FisherFParams& eve,
                     const FisherFParams& bs_ris);
};

/// Sectored gain at angle theta (degrees, [0,180]); boundary inclusive.
double antenna_gain(double theta_deg, const AntennaPattern& pattern);

/// One draw of ||h||_F^2 = sum over Q*M independent F element powers.
double effective_gain_s1(const ScenarioConfig& cfg, const std::vector<FisherFParams>& table,
                         Rng& rng);

/// One draw of the RIS effective gain: sum over Q*L of products of the
/// RIS-user and BS-RIS element powers.
double effective_gain_s2(const ScenarioConfig& cfg, const std::vector<FisherFParams>& ris_user,
                         const std::vector<FisherFParams>& bs_ris, Rng& rng);

/// Scale constants A1 = G p / (beta^2 Q^2 sigma^2) and
/// A2 = A1 * C_L1 C_L2 / d_uR^2 for a given directivity gain.
std::pair<double, double> a_constants(const ScenarioConfig& cfg, double directivity_gain);

/// Effective SINR for one draw. `gain` is the effective channel gain,
/// `gain_ris` only used for RisWithDirect.
double sinr(LinkKind kind, double gain, double d, const ScenarioConfig& cfg,
            double directivity_gain, double gain_ris = 0.0);

struct ChannelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rispls
