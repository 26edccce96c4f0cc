#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rispls/channel.hpp"

namespace rispls {

struct SecrecyParams;  // analytic.hpp

struct McConfig {
    long trials = 1000000;
    std::uint64_t master_seed = 1;
    long batch_size = 8192;
    int workers = 0;  // 0: RIS_PLS_THREADS or hardware default

    void validate() const;
};

struct McEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    long trials_used = 0;
};

struct TrialDraw {
    double sinr_user = 0.0;
    double sinr_eve = 0.0;
    LinkKind link = LinkKind::NLoS;
    bool eve_main_lobe = false;
};

/// One joint draw: shared distance and blockage state, independent fading,
/// eavesdropper lobe Bernoulli(theta_c/180).
TrialDraw simulate_trial(const ScenarioConfig& cfg, Rng& rng);

McEstimate estimate_op(const ScenarioConfig& cfg, const SecrecyParams& s, const McConfig& mc);
McEstimate estimate_sop(const ScenarioConfig& cfg, const SecrecyParams& s, const McConfig& mc);
McEstimate estimate_pnsc(const ScenarioConfig& cfg, const SecrecyParams& s, const McConfig& mc);
McEstimate estimate_asr(const ScenarioConfig& cfg, const SecrecyParams& s, const McConfig& mc);

struct McAllEstimates {
    McEstimate op, sop, pnsc, asr;
};
/// All four metrics from one pass over the trials.
McAllEstimates estimate_all(const ScenarioConfig& cfg, const SecrecyParams& s, const McConfig& mc);

/// Marginal SINR draws of one link kind for the user (main lobe), full
/// annulus, no blockage branching; oracle for the Theorem 1-6 laws.
std::vector<double> draw_marginal_sinr(const ScenarioConfig& cfg, LinkKind kind, long n,
                                       std::uint64_t seed);

/// Right-continuous empirical CDF with a Dvoretzky-Kiefer-Wolfowitz band.
class EmpiricalCdf {
  public:
    explicit EmpiricalCdf(std::vector<double> samples);
    double operator()(double x) const;
    double dkw_epsilon(double confidence = 0.99) const;
    double quantile(double p) const;
    long size() const { return (long)sorted_.size(); }

  private:
    std::vector<double> sorted_;
};

/// Two-sided Kolmogorov-Smirnov test of samples against a CDF.
struct KsResult {
    double statistic = 0.0;
    double p_value = 0.0;
};
KsResult ks_test(const std::vector<double>& samples, const std::function<double(double)>& cdf);

int effective_workers(int requested);

struct McError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rispls
