#include "rispls/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "rispls/analytic.hpp"

namespace rispls {

void McConfig::validate() const {
    if (trials < 1000) throw McError("McConfig: need at least 1e3 trials for any estimate");
    if (batch_size < 1) throw McError("McConfig: batch_size must be positive");
}

int effective_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("RIS_PLS_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : (int)std::min(hc, 16u);
}

TrialDraw simulate_trial(const ScenarioConfig& cfg, Rng& rng) {
    TrialDraw out;
    const double r = sample_user_distance(cfg.geometry, rng);
    const bool los = (r <= cfg.geometry.r1) && (rng.uniform() < cfg.blockage.b1);
    out.eve_main_lobe = rng.uniform() < cfg.pattern_eve.theta_c / 180.0;
    const double g_eve = out.eve_main_lobe ? cfg.pattern_eve.g_main : cfg.pattern_eve.g_side;
    const double g_user = cfg.pattern_user.g_main;  // BS boresight tracks the user

    if (los) {
        out.link = LinkKind::LoS;
        const double su = effective_gain_s1(cfg, cfg.fading_user, rng);
        const double se = effective_gain_s1(cfg, cfg.fading_eve, rng);
        out.sinr_user = sinr(LinkKind::LoS, su, r, cfg, g_user);
        out.sinr_eve = sinr(LinkKind::LoS, se, r, cfg, g_eve);
        return out;
    }
    switch (cfg.scenario) {
        case Scenario::NoRis: {
            out.link = LinkKind::NLoS;
            const double su = effective_gain_s1(cfg, cfg.fading_user, rng);
            const double se = effective_gain_s1(cfg, cfg.fading_eve, rng);
            out.sinr_user = sinr(LinkKind::NLoS, su, r, cfg, g_user);
            out.sinr_eve = sinr(LinkKind::NLoS, se, r, cfg, g_eve);
            break;
        }
        case Scenario::Ris: {
            out.link = LinkKind::RisReflected;
            const double su = effective_gain_s2(cfg, cfg.fading_user_ris, cfg.fading_bs_ris, rng);
            const double se = effective_gain_s2(cfg, cfg.fading_eve_ris, cfg.fading_bs_ris, rng);
            out.sinr_user = sinr(LinkKind::RisReflected, su, r, cfg, g_user);
            out.sinr_eve = sinr(LinkKind::RisReflected, se, r, cfg, g_eve);
            break;
        }
        case Scenario::RisWithDirect: {
            out.link = LinkKind::RisWithDirect;
            const double su_d = effective_gain_s1(cfg, cfg.fading_user, rng);
            const double su_r = effective_gain_s2(cfg, cfg.fading_user_ris, cfg.fading_bs_ris, rng);
            const double se_d = effective_gain_s1(cfg, cfg.fading_eve, rng);
            const double se_r = effective_gain_s2(cfg, cfg.fading_eve_ris, cfg.fading_bs_ris, rng);
            out.sinr_user = sinr(LinkKind::RisWithDirect, su_d, r, cfg, g_user, su_r);
            out.sinr_eve = sinr(LinkKind::RisWithDirect, se_d, r, cfg, g_eve, se_r);
            break;
        }
    }
    return out;
}

namespace {

struct BatchSums {
    double op = 0, sop = 0, pnsc = 0, asr = 0, asr_sq = 0;
};

// Deterministic across worker counts: each batch owns a contiguous trial
// range with per-trial substreams; the reduction runs in batch order.
template <typename PerTrial>
void run_batches(const McConfig& mc, long n_batches, PerTrial&& per_trial,
                 std::vector<BatchSums>& sums) {
    sums.assign(n_batches, {});
    const int workers = effective_workers(mc.workers);
    if (workers <= 1 || n_batches == 1) {
        for (long b = 0; b < n_batches; ++b) per_trial(b, sums[b]);
        return;
    }
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&]() {
            for (;;) {
                const long b = next.fetch_add(1);
                if (b >= n_batches) return;
                per_trial(b, sums[b]);
            }
        });
    for (auto& t : pool) t.join();
}

McAllEstimates estimate_impl(const ScenarioConfig& cfg, const SecrecyParams& s,
                             const McConfig& mc) {
    cfg.validate();
    mc.validate();
    const double r_s = s.r_s();
    const double z_th = s.z_th;
    const double r_pnsc = s.r_s_pnsc;
    const long n_batches = (mc.trials + mc.batch_size - 1) / mc.batch_size;

    std::vector<BatchSums> sums;
    run_batches(
        mc, n_batches,
        [&](long b, BatchSums& out) {
            const long lo = b * mc.batch_size;
            const long hi = std::min(mc.trials, lo + mc.batch_size);
            for (long t = lo; t < hi; ++t) {
                Rng rng = Rng::stream(mc.master_seed, (std::uint64_t)t);
                const TrialDraw d = simulate_trial(cfg, rng);
                if (d.sinr_user < z_th) out.op += 1.0;
                // Secrecy outage: Z_u <= R_s Z_e + R_s - 1 (capacity below R_t,
                // and the complement of PNSC when R_s = 1).
                if (d.sinr_user <= r_s * d.sinr_eve + (r_s - 1.0)) out.sop += 1.0;
                if (d.sinr_user > r_pnsc * d.sinr_eve) out.pnsc += 1.0;
                const double cs = d.sinr_user > d.sinr_eve
                                      ? std::log2((1.0 + d.sinr_user) / (1.0 + d.sinr_eve))
                                      : 0.0;
                out.asr += cs;
                out.asr_sq += cs * cs;
            }
        },
        sums);

    double op = 0, sop = 0, pnsc = 0, asr = 0, asr_sq = 0;
    for (const auto& b : sums) {
        op += b.op;
        sop += b.sop;
        pnsc += b.pnsc;
        asr += b.asr;
        asr_sq += b.asr_sq;
    }
    const double n = (double)mc.trials;
    auto bernoulli = [&](double count) {
        const double p = count / n;
        return McEstimate{p, std::sqrt(std::max(0.0, p * (1.0 - p)) / n), mc.trials};
    };
    McAllEstimates out;
    out.op = bernoulli(op);
    out.sop = bernoulli(sop);
    out.pnsc = bernoulli(pnsc);
    const double mean = asr / n;
    const double var = std::max(0.0, asr_sq / n - mean * mean);
    out.asr = McEstimate{mean, std::sqrt(var / n), mc.trials};
    return out;
}

}  // namespace

McAllEstimates estimate_all(const ScenarioConfig& cfg, const SecrecyParams& s, const McConfig& mc) {
    return estimate_impl(cfg, s, mc);
}
McEstimate estimate_op(const ScenarioConfig& cfg, const SecrecyParams& s, const McConfig& mc) {
    return estimate_impl(cfg, s, mc).op;
}
McEstimate estimate_sop(const ScenarioConfig& cfg, const SecrecyParams& s, const McConfig& mc) {
    return estimate_impl(cfg, s, mc).sop;
}
McEstimate estimate_pnsc(const ScenarioConfig& cfg, const SecrecyParams& s, const McConfig& mc) {
    return estimate_impl(cfg, s, mc).pnsc;
}
McEstimate estimate_asr(const ScenarioConfig& cfg, const SecrecyParams& s, const McConfig& mc) {
    return estimate_impl(cfg, s, mc).asr;
}

std::vector<double> draw_marginal_sinr(const ScenarioConfig& cfg, LinkKind kind, long n,
                                       std::uint64_t seed) {
    cfg.validate();
    std::vector<double> out((std::size_t)n);
    const double g_user = cfg.pattern_user.g_main;
    for (long t = 0; t < n; ++t) {
        Rng rng = Rng::stream(seed, (std::uint64_t)t);
        const double r = sample_user_distance(cfg.geometry, rng);
        double gain = 0.0, gain_ris = 0.0;
        switch (kind) {
            case LinkKind::LoS:
            case LinkKind::NLoS:
                gain = effective_gain_s1(cfg, cfg.fading_user, rng);
                break;
            case LinkKind::RisReflected:
                gain = effective_gain_s2(cfg, cfg.fading_user_ris, cfg.fading_bs_ris, rng);
                break;
            case LinkKind::RisWithDirect:
                gain = effective_gain_s1(cfg, cfg.fading_user, rng);
                gain_ris = effective_gain_s2(cfg, cfg.fading_user_ris, cfg.fading_bs_ris, rng);
                break;
        }
        out[(std::size_t)t] = sinr(kind, gain, r, cfg, g_user, gain_ris);
    }
    return out;
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples) : sorted_(std::move(samples)) {
    if (sorted_.size() < 1000) throw McError("EmpiricalCdf: need at least 1e3 samples");
    std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return (double)(it - sorted_.begin()) / (double)sorted_.size();
}

double EmpiricalCdf::dkw_epsilon(double confidence) const {
    const double alpha = 1.0 - confidence;
    return std::sqrt(std::log(2.0 / alpha) / (2.0 * (double)sorted_.size()));
}

double EmpiricalCdf::quantile(double p) const {
    if (!(p >= 0.0 && p <= 1.0)) throw McError("EmpiricalCdf: p outside [0,1]");
    const double idx = p * ((double)sorted_.size() - 1.0);
    const std::size_t lo = (std::size_t)std::floor(idx);
    const std::size_t hi = std::min(lo + 1, sorted_.size() - 1);
    const double w = idx - (double)lo;
    return sorted_[lo] * (1.0 - w) + sorted_[hi] * w;
}

KsResult ks_test(const std::vector<double>& samples, const std::function<double(double)>& cdf) {
    std::vector<double> s = samples;
    std::sort(s.begin(), s.end());
    const double n = (double)s.size();
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double f = cdf(s[i]);
        d = std::max(d, std::abs(f - (double)i / n));
        d = std::max(d, std::abs((double)(i + 1) / n - f));
    }
    // Asymptotic Kolmogorov distribution.
    const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
    double p = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        p += 2.0 * sign * term;
        sign = -sign;
        if (term < 1e-12) break;
    }
    return {d, std::clamp(p, 0.0, 1.0)};
}

}  // namespace rispls
