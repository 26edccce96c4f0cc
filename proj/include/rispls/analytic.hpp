#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "rispls/channel.hpp"
#include "rispls/specfun.hpp"

namespace rispls {

enum class Method { ExactFoxH, SingleFApprox, Empirical };
enum class EvalMethod { Exact, Approx, Asymptotic, MonteCarlo };

const char* to_string(Method m);
const char* to_string(EvalMethod m);

struct SecrecyParams {
    double r_t = 1.0;       // target secrecy rate, bits/s/Hz
    double z_th = 1.0;      // SNR threshold, linear
    double e_reg = 1e-6;    // regularizer for the full Fox-H metric forms
    double r_s_pnsc = 1.0;  // rate factor inside the PNSC probability

    double r_s() const;     // 2^r_t
    void validate() const;
};

struct MetricResult {
    double value = 0.0;
    EvalMethod method = EvalMethod::Exact;
    double error_estimate = 0.0;  // MC stderr or quadrature error proxy
    long trials = 0;              // MC only
    int folds_used = 0;
    bool fallback = false;        // a branch fell back to an empirical table
    std::string note;
};

/// CDF/PDF handle for one link SINR by a selected method.
struct SinrDistribution {
    Method method = Method::ExactFoxH;
    LinkKind scenario = LinkKind::NLoS;
    std::function<double(double)> cdf;
    std::function<double(double)> pdf;  // empty for Empirical
    std::string provenance;
};

// --- marginal SINR laws over the full annulus (Theorems 1-6 machinery) -----

double cdf_s1_exact(double z, const ScenarioConfig& cfg, LinkKind sigma = LinkKind::NLoS);
double pdf_s1_exact(double z, const ScenarioConfig& cfg, LinkKind sigma = LinkKind::NLoS);
double cdf_s2_exact(double z, const ScenarioConfig& cfg);
double pdf_s2_exact(double z, const ScenarioConfig& cfg);
double cdf_s1_approx(double z, const ScenarioConfig& cfg, LinkKind sigma = LinkKind::NLoS);
double cdf_s2_approx(double z, const ScenarioConfig& cfg);
/// Scenario 2 with direct links: single-F surrogates for both paths and the
/// two-fold Mellin-Barnes sum law.
double cdf_direct(double z, const ScenarioConfig& cfg);

SinrDistribution make_sinr_distribution(const ScenarioConfig& cfg, LinkKind kind, Method method,
                                        std::uint64_t empirical_seed = 7781,
                                        long empirical_samples = 200000);

// --- security metrics -------------------------------------------------------

/// Reusable metric evaluator: conditional effective-gain tables are cached,
/// so re-evaluating after a transmit-power change is cheap.
class MetricEngine {
  public:
    explicit MetricEngine(const ScenarioConfig& cfg, Method branch_method = Method::ExactFoxH,
                          std::uint64_t table_seed = 20260810);
    ~MetricEngine();
    MetricEngine(MetricEngine&&) noexcept;
    MetricEngine& operator=(MetricEngine&&) noexcept;

    void set_power(double p_un_linear);
    const ScenarioConfig& config() const;

    MetricResult op(const SecrecyParams& s, EvalMethod method) const;
    MetricResult sop(const SecrecyParams& s) const;
    MetricResult pnsc(const SecrecyParams& s) const;
    MetricResult asr(const SecrecyParams& s) const;
    MetricResult op_asymptotic(const SecrecyParams& s) const;
    double diversity_order() const;

    /// Full multivariate Fox-H metric forms (gated: 2*QM+1 <= 4, i.e. QM = 1).
    double sop_foxh(const SecrecyParams& s) const;
    double pnsc_foxh(const SecrecyParams& s) const;
    double asr_foxh(const SecrecyParams& s) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

MetricResult op_metric(const ScenarioConfig& cfg, const SecrecyParams& s, EvalMethod method);
MetricResult sop_metric(const ScenarioConfig& cfg, const SecrecyParams& s, EvalMethod method);
MetricResult pnsc_metric(const ScenarioConfig& cfg, const SecrecyParams& s, EvalMethod method);
MetricResult asr_metric(const ScenarioConfig& cfg, const SecrecyParams& s, EvalMethod method);
MetricResult op_asymptotic(const ScenarioConfig& cfg, const SecrecyParams& s);
double diversity_order(const ScenarioConfig& cfg);

struct AnalyticError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rispls
