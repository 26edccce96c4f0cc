#include "rispls/analytic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "rispls/montecarlo.hpp"

namespace rispls {

const char* to_string(Method m) {
    switch (m) {
        case Method::ExactFoxH: return "exact_foxh";
        case Method::SingleFApprox: return "single_f_approx";
        case Method::Empirical: return "empirical";
    }
    return "?";
}

const char* to_string(EvalMethod m) {
    switch (m) {
        case EvalMethod::Exact: return "exact";
        case EvalMethod::Approx: return "approx";
        case EvalMethod::Asymptotic: return "asymptotic";
        case EvalMethod::MonteCarlo: return "mc";
    }
    return "?";
}

double SecrecyParams::r_s() const { return std::exp2(r_t); }

void SecrecyParams::validate() const {
    if (!(r_t >= 0.0)) throw AnalyticError("SecrecyParams: r_t must be >= 0");
    if (!(z_th >= 0.0)) throw AnalyticError("SecrecyParams: z_th must be >= 0");
    if (!(e_reg > 0.0 && e_reg <= 1e-3))
        throw AnalyticError("SecrecyParams: e_reg must lie in (0, 1e-3]");
    if (!(r_s_pnsc >= 1.0)) throw AnalyticError("SecrecyParams: r_s_pnsc must be >= 1");
}

namespace {

constexpr int kFoldLimit = 4;

// ---------------------------------------------------------------------------
// Link models: the conditional SINR given distance is A * S / d^alpha with S
// a sum of (possibly product-pair) F element powers.
// ---------------------------------------------------------------------------

struct Fold {
    double m1, ms1, g1;
    double m2 = 0.0, ms2 = 0.0, g2 = 0.0;
    bool product = false;

    double c() const {
        if (product) return m1 * m2 / ((ms1 - 1.0) * (ms2 - 1.0) * g1 * g2);
        return m1 / ((ms1 - 1.0) * g1);
    }
    double mean() const { return product ? g1 * g2 : g1; }
    double left_pow() const { return product ? std::min(m1, m2) : m1; }
    double right_pow() const { return product ? std::min(ms1, ms2) : ms1; }
    double k_log() const {
        double k = -std::lgamma(m1) - std::lgamma(ms1);
        if (product) k += -std::lgamma(m2) - std::lgamma(ms2);
        return k;
    }
};

struct LinkModel {
    double a = 1.0;      // SINR scale constant
    double alpha = 2.0;  // distance exponent
    std::vector<Fold> folds;

    double k_log() const {
        double k = 0.0;
        for (const auto& f : folds) k += f.k_log();
        return k;
    }
};

Fold fold_single(const FisherFParams& p) { return Fold{p.m, p.m_s, p.gamma_bar}; }
Fold fold_product(const FisherFParams& a, const FisherFParams& b) {
    return Fold{a.m, a.m_s, a.gamma_bar, b.m, b.m_s, b.gamma_bar, true};
}

LinkModel make_link_model(const ScenarioConfig& cfg, LinkKind kind, bool eve, double gain) {
    LinkModel lm;
    const auto [a1, a2] = a_constants(cfg, gain);
    const auto& tbl1 = eve ? cfg.fading_eve : cfg.fading_user;
    const auto& tblr = eve ? cfg.fading_eve_ris : cfg.fading_user_ris;
    switch (kind) {
        case LinkKind::LoS:
            lm.a = a1;
            lm.alpha = cfg.path_loss.alpha1;
            for (const auto& p : tbl1) lm.folds.push_back(fold_single(p));
            break;
        case LinkKind::NLoS:
            lm.a = a1;
            lm.alpha = cfg.path_loss.alpha2;
            for (const auto& p : tbl1) lm.folds.push_back(fold_single(p));
            break;
        case LinkKind::RisReflected: {
            lm.a = a2;
            lm.alpha = 2.0;
            const int q = cfg.q_eff(), l = cfg.l_elements;
            for (int qi = 0; qi < q; ++qi)
                for (int n = 0; n < l; ++n)
                    lm.folds.push_back(
                        fold_product(tblr[(std::size_t)qi * l + n], cfg.fading_bs_ris[n]));
            break;
        }
        case LinkKind::RisWithDirect: {
            // Single-F surrogates for the direct and reflected sums; the sum
            // law is then the two-fold Mellin-Barnes form.
            lm.a = a2;
            lm.alpha = 2.0;
            std::vector<FisherFParams> direct(tbl1.begin(), tbl1.end());
            FisherFParams f1 = approx_sum_f(direct);
            const int q = cfg.q_eff(), l = cfg.l_elements;
            std::vector<FisherFParams> prods;
            for (int qi = 0; qi < q; ++qi)
                for (int n = 0; n < l; ++n)
                    prods.push_back(approx_product_pair(tblr[(std::size_t)qi * l + n],
                                                        cfg.fading_bs_ris[n]));
            FisherFParams f2 = approx_sum_f(prods);
            lm.folds = {fold_single(f1), fold_single(f2)};
            break;
        }
    }
    return lm;
}

/// Single-F surrogate of a link model (sum, or sum of product pairs).
LinkModel surrogate_model(const LinkModel& lm) {
    std::vector<FisherFParams> comps;
    comps.reserve(lm.folds.size());
    for (const auto& f : lm.folds) {
        if (f.product)
            comps.push_back(approx_product_pair({f.m1, f.ms1, f.g1}, {f.m2, f.ms2, f.g2}));
        else
            comps.push_back({f.m1, f.ms1, f.g1});
    }
    LinkModel out;
    out.a = lm.a;
    out.alpha = lm.alpha;
    out.folds = {fold_single(approx_sum_f(comps))};
    return out;
}

// ---------------------------------------------------------------------------
// Distance mixtures: pieces of the annulus with conditional weights.
// ---------------------------------------------------------------------------

struct DistancePiece {
    double lo, hi, weight;
};
using DistanceMix = std::vector<DistancePiece>;

DistanceMix marginal_mix(const AnnulusGeometry& g) { return {{g.r0, g.r2, 1.0}}; }

DistanceMix conditional_mix(const ScenarioConfig& cfg, bool los_branch) {
    const auto& g = cfg.geometry;
    const double b1 = cfg.blockage.b1;
    const double b2v = b2(g);
    if (los_branch) {
        if (b1 * b2v == 0.0) throw AnalyticError("conditional_mix: LoS branch has zero mass");
        return {{g.r0, g.r1, 1.0 / b2v}};
    }
    const double pnl = 1.0 - b1 * b2v;
    DistanceMix mix;
    if (g.r1 > g.r0) mix.push_back({g.r0, g.r1, (1.0 - b1) / pnl});
    if (g.r2 > g.r1) mix.push_back({g.r1, g.r2, 1.0 / pnl});
    return mix;
}

// ---------------------------------------------------------------------------
// Fox-H spec builders
// ---------------------------------------------------------------------------

GammaTerm num1(int folds, int k, double shift, int sign) {
    GammaTerm t;
    t.coeffs.assign(folds, 0.0);
    t.coeffs[k] = 1.0;
    t.shift = shift;
    t.sign = sign;
    return t;
}

GammaTerm coupling(int folds, double shift, bool denom, double coeff = 1.0) {
    GammaTerm t;
    t.coeffs.assign(folds, coeff);
    t.shift = shift;
    t.denom = denom;
    return t;
}

void add_fold_trio(FoxHMultivarSpec& spec, int k, const Fold& f) {
    auto& terms = spec.per_fold_factors[k].terms;
    terms.push_back(num1(spec.folds, k, f.m1, -1));   // G(m1 - s)
    terms.push_back(num1(spec.folds, k, 0.0, +1));    // G(s)
    terms.push_back(num1(spec.folds, k, f.ms1, +1));  // G(ms1 + s)
    if (f.product) {
        terms.push_back(num1(spec.folds, k, f.m2, -1));
        terms.push_back(num1(spec.folds, k, f.ms2, +1));
    }
}

/// Sum law of the effective gain S (no distance): CDF or PDF kernel.
FoxHMultivarSpec sum_spec(const std::vector<Fold>& folds, double x, bool pdf) {
    FoxHMultivarSpec spec;
    spec.folds = (int)folds.size();
    spec.per_fold_factors.resize(spec.folds);
    spec.arguments.resize(spec.folds);
    for (int k = 0; k < spec.folds; ++k) {
        add_fold_trio(spec, k, folds[k]);
        spec.arguments[k] = folds[k].c() * x;
    }
    spec.outer_factors.terms.push_back(coupling(spec.folds, pdf ? 0.0 : 1.0, true));
    return spec;
}

/// Distance-averaged law at one interval endpoint r:
///   W(z, r) = (2 r^2 / ((r2^2-r0^2) alpha)) K H(args(z, r));
/// the law over [a,b] is W(z,b) - W(z,a). PDF variant divides by z outside.
FoxHMultivarSpec marginal_spec(const LinkModel& lm, double z, double r, bool pdf) {
    FoxHMultivarSpec spec;
    spec.folds = (int)lm.folds.size();
    spec.per_fold_factors.resize(spec.folds);
    spec.arguments.resize(spec.folds);
    const double ralpha = std::pow(r, lm.alpha);
    for (int k = 0; k < spec.folds; ++k) {
        add_fold_trio(spec, k, lm.folds[k]);
        spec.arguments[k] = lm.folds[k].c() * z * ralpha / lm.a;
    }
    const double inv = 2.0 / lm.alpha;
    spec.outer_factors.terms.push_back(coupling(spec.folds, inv, false));       // G(2/a + S)
    spec.outer_factors.terms.push_back(coupling(spec.folds, 1.0 + inv, true));  // /G(1+2/a+S)
    spec.outer_factors.terms.push_back(coupling(spec.folds, pdf ? 0.0 : 1.0, true));
    return spec;
}

ContourConfig default_contour() {
    ContourConfig cc;
    cc.rel_tol = 1e-8;
    cc.abs_tol = 1e-11;
    return cc;
}

double eval_foxh(const FoxHMultivarSpec& spec, const ContourConfig& cc) {
    if (spec.folds > kFoldLimit)
        throw AnalyticError("fold limit exceeded: dimension " + std::to_string(spec.folds) +
                            " > " + std::to_string(kFoldLimit));
    return fox_h_multivariate(spec, cc).value;
}

/// Distance-mixture CDF/PDF of the link SINR, one batched sweep over all
/// interval endpoints.
double link_dist(const LinkModel& lm, const AnnulusGeometry& g, const DistanceMix& mix, double z,
                 bool pdf, const ContourConfig& cc) {
    if (!(z > 0.0)) return 0.0;
    if ((int)lm.folds.size() > kFoldLimit)
        throw AnalyticError("fold limit exceeded: dimension " +
                            std::to_string(lm.folds.size()) + " > " +
                            std::to_string(kFoldLimit));
    const double norm = g.r2 * g.r2 - g.r0 * g.r0;
    const double klog = lm.k_log();
    const FoxHMultivarSpec base = marginal_spec(lm, z, 1.0, pdf);

    std::vector<std::vector<double>> arg_sets;
    std::vector<double> signed_pref;
    for (const auto& piece : mix) {
        for (int side = 0; side < 2; ++side) {
            const double r = side == 0 ? piece.hi : piece.lo;
            const double ralpha = std::pow(r, lm.alpha);
            std::vector<double> args(lm.folds.size());
            for (std::size_t k = 0; k < lm.folds.size(); ++k)
                args[k] = lm.folds[k].c() * z * ralpha / lm.a;
            arg_sets.push_back(std::move(args));
            signed_pref.push_back(piece.weight * (side == 0 ? 1.0 : -1.0) * 2.0 * r * r /
                                  (norm * lm.alpha) * std::exp(klog));
        }
    }
    const auto results = fox_h_multi_args(base, arg_sets, cc);
    double total = 0.0;
    for (std::size_t i = 0; i < results.size(); ++i) total += signed_pref[i] * results[i].value;
    if (pdf) total /= z;
    return total;
}

// ---------------------------------------------------------------------------
// Monotone cubic interpolation (Fritsch-Carlson) on a grid.
// ---------------------------------------------------------------------------

struct Pchip {
    std::vector<double> x, y, d;

    void build(std::vector<double> xs, std::vector<double> ys) {
        x = std::move(xs);
        y = std::move(ys);
        const std::size_t n = x.size();
        d.assign(n, 0.0);
        if (n < 2) return;
        std::vector<double> h(n - 1), delta(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x[i + 1] - x[i];
            delta[i] = (y[i + 1] - y[i]) / h[i];
        }
        d[0] = delta[0];
        d[n - 1] = delta[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] * delta[i] <= 0.0) {
                d[i] = 0.0;
            } else {
                const double w1 = 2.0 * h[i] + h[i - 1];
                const double w2 = h[i] + 2.0 * h[i - 1];
                d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
    }

    double eval(double xq) const {
        if (xq <= x.front()) return y.front();
        if (xq >= x.back()) return y.back();
        std::size_t lo = std::upper_bound(x.begin(), x.end(), xq) - x.begin() - 1;
        const double h = x[lo + 1] - x[lo];
        const double t = (xq - x[lo]) / h;
        const double t2 = t * t, t3 = t2 * t;
        return y[lo] * (2 * t3 - 3 * t2 + 1) + h * d[lo] * (t3 - 2 * t2 + t) +
               y[lo + 1] * (-2 * t3 + 3 * t2) + h * d[lo + 1] * (t3 - t2);
    }
};

// ---------------------------------------------------------------------------
// SumDist: CDF/quantile handle for the effective-gain sum S.
// ---------------------------------------------------------------------------

struct SumDist {
    std::function<double(double)> cdf;
    std::function<double(double)> quantile;
    double mean = 0.0;
    bool fallback_empirical = false;
    std::string kind;
};

SumDist build_sum_surrogate(const std::vector<Fold>& folds) {
    std::vector<FisherFParams> comps;
    for (const auto& f : folds) {
        if (f.product)
            comps.push_back(approx_product_pair({f.m1, f.ms1, f.g1}, {f.m2, f.ms2, f.g2}));
        else
            comps.push_back({f.m1, f.ms1, f.g1});
    }
    const FisherFParams p = approx_sum_f(comps);
    SumDist out;
    out.kind = "single_f_approx";
    out.mean = p.gamma_bar;
    out.cdf = [p](double x) { return x <= 0.0 ? 0.0 : f_power_cdf(x, p); };
    out.quantile = [p](double q) {
        if (!(q > 0.0 && q < 1.0)) throw AnalyticError("quantile: p must be in (0,1)");
        double lo = p.gamma_bar, hi = p.gamma_bar;
        while (f_power_cdf(lo, p) > q && lo > 1e-300) lo *= 0.25;
        while (f_power_cdf(hi, p) < q && hi < 1e300) hi *= 4.0;
        for (int i = 0; i < 100; ++i) {
            const double mid = std::sqrt(lo * hi);
            (f_power_cdf(mid, p) < q ? lo : hi) = mid;
        }
        return std::sqrt(lo * hi);
    };
    return out;
}

SumDist build_sum_exact(const std::vector<Fold>& folds, ContourConfig cc) {
    if ((int)folds.size() > kFoldLimit)
        throw AnalyticError("build_sum_exact: fold limit exceeded");
    double klog = 0.0, mean = 0.0, pow_l = 0.0;
    double pow_r = std::numeric_limits<double>::infinity();
    for (const auto& f : folds) {
        klog += f.k_log();
        mean += f.mean();
        pow_l += f.left_pow();
        pow_r = std::min(pow_r, f.right_pow());
    }
    auto raw_cdf = [folds, klog, cc](double x) {
        if (!(x > 0.0)) return 0.0;
        const double v = eval_foxh(sum_spec(folds, x, false), cc) * std::exp(klog);
        return std::clamp(v, 0.0, 1.0);
    };

    double lo = mean / 64.0, hi = mean * 64.0;
    for (int i = 0; i < 400 && raw_cdf(lo) > 1e-9; ++i) lo *= 0.5;
    for (int i = 0; i < 400 && raw_cdf(hi) < 1.0 - 1e-9; ++i) hi *= 2.0;

    const int n = 320;
    auto grid = std::make_shared<Pchip>();
    std::vector<double> lx(n), fy(n);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n; ++i) lx[i] = llo + (lhi - llo) * i / (n - 1.0);
    // Batched evaluation in chunks of similar argument magnitude (shared
    // contour anchors stay well-conditioned within ~3 e-folds).
    {
        const FoxHMultivarSpec base = sum_spec(folds, 1.0, false);
        const int chunk = std::max(1, (int)std::floor(3.0 / ((lhi - llo) / (n - 1.0))));
        for (int i0 = 0; i0 < n; i0 += chunk) {
            const int i1 = std::min(n, i0 + chunk);
            std::vector<std::vector<double>> arg_sets;
            for (int i = i0; i < i1; ++i) {
                std::vector<double> args(folds.size());
                for (std::size_t k = 0; k < folds.size(); ++k)
                    args[k] = folds[k].c() * std::exp(lx[i]);
                arg_sets.push_back(std::move(args));
            }
            const auto res = fox_h_multi_args(base, arg_sets, cc);
            for (int i = i0; i < i1; ++i)
                fy[i] = std::clamp(res[i - i0].value * std::exp(klog), 0.0, 1.0);
        }
        double running = 0.0;
        for (int i = 0; i < n; ++i) {
            running = std::max(running, fy[i]);
            fy[i] = running;
        }
    }
    const double f_lo = std::max(fy.front(), 1e-300), f_hi = std::min(fy.back(), 1.0 - 1e-16);
    grid->build(lx, fy);

    SumDist out;
    out.kind = "exact_foxh_table";
    out.mean = mean;
    out.cdf = [grid, lo, hi, f_lo, f_hi, pow_l, pow_r](double x) {
        if (!(x > 0.0)) return 0.0;
        if (x < lo) return f_lo * std::pow(x / lo, pow_l);
        if (x > hi) return 1.0 - (1.0 - f_hi) * std::pow(x / hi, -pow_r);
        return std::clamp(grid->eval(std::log(x)), 0.0, 1.0);
    };
    auto cdf_copy = out.cdf;
    out.quantile = [cdf_copy, lo, hi, f_lo, f_hi, pow_l, pow_r](double q) {
        if (!(q > 0.0 && q < 1.0)) throw AnalyticError("quantile: p must be in (0,1)");
        if (q < f_lo) return lo * std::pow(q / f_lo, 1.0 / pow_l);
        if (q > f_hi) return hi * std::pow((1.0 - f_hi) / (1.0 - q), 1.0 / pow_r);
        double a = lo, b = hi;
        for (int i = 0; i < 100; ++i) {
            const double mid = std::sqrt(a * b);
            (cdf_copy(mid) < q ? a : b) = mid;
        }
        return std::sqrt(a * b);
    };
    return out;
}

SumDist build_sum_empirical(const std::vector<Fold>& folds, std::uint64_t seed, long nsamp) {
    std::vector<double> samples((std::size_t)nsamp);
    for (long i = 0; i < nsamp; ++i) {
        Rng rng = Rng::stream(seed, (std::uint64_t)i);
        double s = 0.0;
        for (const auto& f : folds) {
            FisherFParams p1{f.m1, f.ms1, f.g1};
            double v = sample_f(p1, rng);
            if (f.product) {
                FisherFParams p2{f.m2, f.ms2, f.g2};
                v *= sample_f(p2, rng);
            }
            s += v;
        }
        samples[(std::size_t)i] = s;
    }
    const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / (double)nsamp;
    auto ecdf = std::make_shared<EmpiricalCdf>(std::move(samples));
    SumDist out;
    out.kind = "empirical";
    out.fallback_empirical = true;
    out.mean = mean;
    out.cdf = [ecdf](double x) { return (*ecdf)(x); };
    out.quantile = [ecdf](double q) { return ecdf->quantile(q); };
    return out;
}

SumDist build_sum(const std::vector<Fold>& folds, Method method, const ContourConfig& cc,
                  std::uint64_t seed, bool* fell_back) {
    if (method == Method::ExactFoxH && (int)folds.size() <= kFoldLimit)
        return build_sum_exact(folds, cc);
    if (method == Method::SingleFApprox || method == Method::ExactFoxH) {
        try {
            return build_sum_surrogate(folds);
        } catch (const FadingError&) {
            // fall through to empirical
        }
    }
    if (fell_back) *fell_back = true;
    return build_sum_empirical(folds, seed, 200000);
}

// ---------------------------------------------------------------------------
// Quadrature node sets for the metric integrals
// ---------------------------------------------------------------------------

struct PNodes {
    std::vector<double> p, w;
};

const PNodes& p_nodes() {
    static const PNodes nodes = [] {
        PNodes out;
        const std::vector<double> edges = {1e-6, 1e-4, 1e-3, 1e-2, 0.1,    0.5,
                                           0.9,  0.99, 0.999, 0.9999, 1.0 - 1e-6};
        std::vector<double> gx, gw;
        gauss_legendre(12, gx, gw);
        for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
            const double a = edges[e], b = edges[e + 1];
            for (int i = 0; i < 12; ++i) {
                out.p.push_back(0.5 * (a + b) + 0.5 * (b - a) * gx[i]);
                out.w.push_back(0.5 * (b - a) * gw[i]);
            }
        }
        return out;
    }();
    return nodes;
}

struct DNodes {
    std::vector<double> d, w;  // D = u^(alpha/2) node values and weights
};

DNodes d_nodes(const AnnulusGeometry& g, const DistanceMix& mix, double alpha) {
    DNodes out;
    std::vector<double> gx, gw;
    gauss_legendre(16, gx, gw);
    const double norm = g.r2 * g.r2 - g.r0 * g.r0;
    for (const auto& piece : mix) {
        const double ulo = piece.lo * piece.lo, uhi = piece.hi * piece.hi;
        const int panels = std::max(1, (int)std::ceil(std::log10(uhi / ulo)));
        for (int pnl = 0; pnl < panels; ++pnl) {
            const double a = ulo * std::pow(uhi / ulo, (double)pnl / panels);
            const double b = ulo * std::pow(uhi / ulo, (double)(pnl + 1) / panels);
            for (int i = 0; i < 16; ++i) {
                const double u = 0.5 * (a + b) + 0.5 * (b - a) * gx[i];
                out.d.push_back(std::pow(u, 0.5 * alpha));
                out.w.push_back(0.5 * (b - a) * gw[i] * piece.weight / norm);
            }
        }
    }
    return out;
}

std::vector<double> quantile_cache(const SumDist& sd) {
    const auto& pn = p_nodes();
    std::vector<double> q(pn.p.size());
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = sd.quantile(pn.p[i]);
    return q;
}

// ---------------------------------------------------------------------------
// Full multivariate Fox-H metric branch forms (single-fold links, QM = 1).
// Both eavesdropper lobes and all distance-interval endpoints share one node
// sweep; only the argument vectors differ.
// ---------------------------------------------------------------------------

struct BranchScalars {
    double m_u, ms_u, c_u, a_u;
    double m_e, ms_e, c_e;
    double a_e[2];  // [0] main lobe, [1] side lobe
    double alpha;
};

ContourConfig prop_contour() {
    ContourConfig cc;
    cc.half_height = 12.0;
    cc.rel_tol = 1e-6;
    cc.abs_tol = 1e-9;
    cc.max_step = 0.06;
    return cc;
}

BranchScalars branch_scalars(const ScenarioConfig& cfg, LinkKind kind_nl, bool los) {
    const LinkKind kind = los ? LinkKind::LoS : kind_nl;
    const LinkModel um = make_link_model(cfg, kind, false, cfg.pattern_user.g_main);
    const LinkModel em_g = make_link_model(cfg, kind, true, cfg.pattern_eve.g_main);
    const LinkModel em_s = make_link_model(cfg, kind, true, cfg.pattern_eve.g_side);
    if (um.folds.size() != 1 || em_g.folds.size() != 1 || um.folds[0].product ||
        em_g.folds[0].product)
        throw AnalyticError("full Fox-H metric paths require QM = 1 single-factor links");
    BranchScalars b;
    b.m_u = um.folds[0].m1;
    b.ms_u = um.folds[0].ms1;
    b.c_u = um.folds[0].c();
    b.a_u = um.a;
    b.m_e = em_g.folds[0].m1;
    b.ms_e = em_g.folds[0].ms1;
    b.c_e = em_g.folds[0].c();
    b.a_e[0] = em_g.a;
    b.a_e[1] = em_s.a;
    b.alpha = um.alpha;
    return b;
}

// Assembles sum_{pieces,sides} signed prefactor * H(args) for both lobes in
// one batch. `args_of(lobe, ralpha)` supplies the argument vector.
template <typename ArgsFn>
std::array<double, 2> batched_mix(const ScenarioConfig& cfg, bool los, double alpha, double klog,
                                  const FoxHMultivarSpec& base, const ContourConfig& cc,
                                  ArgsFn&& args_of) {
    const AnnulusGeometry& g = cfg.geometry;
    const double norm = g.r2 * g.r2 - g.r0 * g.r0;
    std::vector<std::vector<double>> arg_sets;
    std::vector<double> pref;
    std::vector<int> lobe_of;
    for (int lobe = 0; lobe < 2; ++lobe) {
        for (const auto& piece : conditional_mix(cfg, los)) {
            for (int side = 0; side < 2; ++side) {
                const double r = side == 0 ? piece.hi : piece.lo;
                arg_sets.push_back(args_of(lobe, std::pow(r, alpha)));
                pref.push_back(piece.weight * (side == 0 ? 1.0 : -1.0) * 2.0 * r * r /
                               (norm * alpha) * std::exp(klog));
                lobe_of.push_back(lobe);
            }
        }
    }
    const auto res = fox_h_multi_args(base, arg_sets, cc);
    std::array<double, 2> out = {0.0, 0.0};
    for (std::size_t i = 0; i < res.size(); ++i) out[lobe_of[i]] += pref[i] * res[i].value;
    return out;
}

/// Secrecy-outage per-sigma values (main/side lobe) via the survival-function
/// orientation; folds are (user zeta', eve xi, regularizer s).
std::array<double, 2> sop_foxh_sigma(const ScenarioConfig& cfg, LinkKind kind_nl, bool los,
                                     const SecrecyParams& s) {
    const BranchScalars b = branch_scalars(cfg, kind_nl, los);
    const double rs = s.r_s();
    if (rs == 1.0) throw AnalyticError("sop_foxh: r_t = 0 is served by the PNSC path");
    const double inv = 2.0 / b.alpha;
    const double klog =
        -std::lgamma(b.m_u) - std::lgamma(b.ms_u) - std::lgamma(b.m_e) - std::lgamma(b.ms_e);

    // Contours: 0 < xi < zeta' < ms_u, xi < m_e, -xi < s < 0, and
    // zeta' - xi < 2/alpha for the distance coupling. Generous spacing keeps
    // the trapezoid step from collapsing against a nearby pole.
    double cz = 0.9 * std::min(b.ms_u, 1.0 + inv);
    const double cx = std::min(0.6 * cz, 0.8 * b.m_e);
    cz = std::min(cz, cx + 0.5 * inv);
    const double cs = -0.5 * cx;
    ContourConfig cc = prop_contour();
    cc.anchors = {cz, cx, cs};

    FoxHMultivarSpec spec;
    spec.folds = 3;
    spec.per_fold_factors.resize(3);
    spec.argument_exponent_sign = {-1, +1, +1};
    // user survival fold: G(m_u+z') G(ms_u-z') G(z') / G(1+z'), power x_u^(-z')
    spec.per_fold_factors[0].terms = {num1(3, 0, b.m_u, +1), num1(3, 0, b.ms_u, -1),
                                      num1(3, 0, 0.0, +1)};
    GammaTerm du = num1(3, 0, 1.0, +1);
    du.denom = true;
    spec.per_fold_factors[0].terms.push_back(du);
    // eve density fold: G(m_e - xi) G(ms_e + xi)
    spec.per_fold_factors[1].terms = {num1(3, 1, b.m_e, -1), num1(3, 1, b.ms_e, +1)};
    // regularizer fold: G(-s), argument e_reg
    spec.per_fold_factors[2].terms = {num1(3, 2, 0.0, -1)};
    GammaTerm t1;  // G(zeta' - xi - s)
    t1.coeffs = {-1.0, 1.0, 1.0};
    t1.sign = -1;
    GammaTerm t2;  // G(xi + s)
    t2.coeffs = {0.0, 1.0, 1.0};
    GammaTerm t3;  // / G(zeta')
    t3.coeffs = {1.0, 0.0, 0.0};
    t3.denom = true;
    GammaTerm t4;  // G(2/a + xi - zeta')
    t4.coeffs = {-1.0, 1.0, 0.0};
    t4.shift = inv;
    GammaTerm t5;  // / G(1 + 2/a + xi - zeta')
    t5.coeffs = {-1.0, 1.0, 0.0};
    t5.shift = 1.0 + inv;
    t5.denom = true;
    spec.outer_factors.terms = {t1, t2, t3, t4, t5};
    spec.arguments = {1.0, 1.0, s.e_reg};

    auto vals = batched_mix(cfg, los, b.alpha, klog, spec, cc, [&](int lobe, double ralpha) {
        return std::vector<double>{b.c_u * (rs - 1.0) * ralpha / b.a_u,
                                   b.c_e * (rs - 1.0) * ralpha / (rs * b.a_e[lobe]), s.e_reg};
    });
    return {1.0 - vals[0], 1.0 - vals[1]};
}

/// PNSC per-sigma values, e-regularized two-fold form.
std::array<double, 2> pnsc_foxh_sigma(const ScenarioConfig& cfg, LinkKind kind_nl, bool los,
                                      const SecrecyParams& s) {
    const BranchScalars b = branch_scalars(cfg, kind_nl, los);
    const double inv = 2.0 / b.alpha;
    const double klog =
        -std::lgamma(b.m_u) - std::lgamma(b.ms_u) - std::lgamma(b.m_e) - std::lgamma(b.ms_e);
    ContourConfig cc = prop_contour();
    cc.anchors = {0.5 * std::min(1.0, b.m_u), 0.35 * std::min(1.0, b.m_e)};

    FoxHMultivarSpec spec;
    spec.folds = 2;
    spec.per_fold_factors.resize(2);
    // user density fold (duo); eve CDF fold (trio / G(1+xi))
    spec.per_fold_factors[0].terms = {num1(2, 0, b.m_u, -1), num1(2, 0, b.ms_u, +1)};
    spec.per_fold_factors[1].terms = {num1(2, 1, b.m_e, -1), num1(2, 1, 0.0, +1),
                                      num1(2, 1, b.ms_e, +1)};
    GammaTerm de = num1(2, 1, 1.0, +1);
    de.denom = true;
    spec.per_fold_factors[1].terms.push_back(de);
    spec.outer_factors.terms = {coupling(2, 0.0, false), coupling(2, inv, false),
                                coupling(2, 1.0 + inv, true)};
    spec.arguments = {1.0, 1.0};

    return batched_mix(cfg, los, b.alpha, klog, spec, cc, [&](int lobe, double ralpha) {
        return std::vector<double>{b.c_u * ralpha / (b.a_u * s.e_reg),
                                   b.c_e * ralpha / (s.r_s_pnsc * b.a_e[lobe] * s.e_reg)};
    });
}

/// ASR per-sigma values: I1 + I2 - I3 Mellin-Barnes forms with a log fold.
std::array<double, 2> asr_foxh_sigma(const ScenarioConfig& cfg, LinkKind kind_nl, bool los,
                                     const SecrecyParams& s) {
    const BranchScalars b = branch_scalars(cfg, kind_nl, los);
    const double inv = 2.0 / b.alpha;
    const double inv_ln2 = 1.0 / std::log(2.0);

    // I3: E[ln(1+Z_e)] (duo density fold + log fold), lobes batched.
    auto i3_vals = [&]() {
        const double klog = -std::lgamma(b.m_e) - std::lgamma(b.ms_e);
        ContourConfig cc = prop_contour();
        cc.anchors = {0.5 * std::min(1.0, b.m_e), 0.5};
        FoxHMultivarSpec spec;
        spec.folds = 2;
        spec.per_fold_factors.resize(2);
        spec.per_fold_factors[0].terms = {num1(2, 0, b.m_e, -1), num1(2, 0, b.ms_e, +1)};
        spec.per_fold_factors[1].terms = {num1(2, 1, 1.0, -1), num1(2, 1, 0.0, +1),
                                          num1(2, 1, 0.0, +1)};
        GammaTerm dw = num1(2, 1, 1.0, +1);
        dw.denom = true;
        spec.per_fold_factors[1].terms.push_back(dw);
        GammaTerm tc = coupling(2, 0.0, false);  // G(xi + w)
        GammaTerm td1;
        td1.coeffs = {1.0, 0.0};
        td1.shift = inv;
        GammaTerm td2;
        td2.coeffs = {1.0, 0.0};
        td2.shift = 1.0 + inv;
        td2.denom = true;
        spec.outer_factors.terms = {tc, td1, td2};
        spec.arguments = {1.0, 1.0 / s.e_reg};
        auto v = batched_mix(cfg, los, b.alpha, klog, spec, cc, [&](int lobe, double ralpha) {
            return std::vector<double>{b.c_e * ralpha / (b.a_e[lobe] * s.e_reg), 1.0 / s.e_reg};
        });
        return std::array<double, 2>{v[0] * inv_ln2, v[1] * inv_ln2};
    };

    // I1/I2: E[ln(1+Z_a) F_b(Z_a)]; density on link a, CDF on link b.
    // a_scale(lobe): the two links' A constants per lobe.
    auto i12_vals = [&](double m_a, double ms_a, double c_a, auto a_a, double m_b, double ms_b,
                        double c_b, auto a_b) {
        const double klog =
            -std::lgamma(m_a) - std::lgamma(ms_a) - std::lgamma(m_b) - std::lgamma(ms_b);
        ContourConfig cc = prop_contour();
        cc.anchors = {0.5 * std::min(1.0, m_a), 0.35 * std::min(1.0, m_b), 0.5};
        FoxHMultivarSpec spec;
        spec.folds = 3;
        spec.per_fold_factors.resize(3);
        spec.per_fold_factors[0].terms = {num1(3, 0, m_a, -1), num1(3, 0, ms_a, +1)};
        spec.per_fold_factors[1].terms = {num1(3, 1, m_b, -1), num1(3, 1, 0.0, +1),
                                          num1(3, 1, ms_b, +1)};
        GammaTerm db = num1(3, 1, 1.0, +1);
        db.denom = true;
        spec.per_fold_factors[1].terms.push_back(db);
        spec.per_fold_factors[2].terms = {num1(3, 2, 1.0, -1), num1(3, 2, 0.0, +1),
                                          num1(3, 2, 0.0, +1)};
        GammaTerm dw = num1(3, 2, 1.0, +1);
        dw.denom = true;
        spec.per_fold_factors[2].terms.push_back(dw);
        GammaTerm tc = coupling(3, 0.0, false);  // G(zeta + xi + w)
        GammaTerm td1;
        td1.coeffs = {1.0, 1.0, 0.0};
        td1.shift = inv;
        GammaTerm td2;
        td2.coeffs = {1.0, 1.0, 0.0};
        td2.shift = 1.0 + inv;
        td2.denom = true;
        spec.outer_factors.terms = {tc, td1, td2};
        spec.arguments = {1.0, 1.0, 1.0 / s.e_reg};
        auto v = batched_mix(cfg, los, b.alpha, klog, spec, cc, [&](int lobe, double ralpha) {
            return std::vector<double>{c_a * ralpha / (a_a(lobe) * s.e_reg),
                                       c_b * ralpha / (a_b(lobe) * s.e_reg), 1.0 / s.e_reg};
        });
        return std::array<double, 2>{v[0] * inv_ln2, v[1] * inv_ln2};
    };

    auto au = [&](int) { return b.a_u; };
    auto ae = [&](int lobe) { return b.a_e[lobe]; };
    const auto i1 = i12_vals(b.m_u, b.ms_u, b.c_u, au, b.m_e, b.ms_e, b.c_e, ae);
    const auto i2 = i12_vals(b.m_e, b.ms_e, b.c_e, ae, b.m_u, b.ms_u, b.c_u, au);
    const auto i3 = i3_vals();
    return {i1[0] + i2[0] - i3[0], i1[1] + i2[1] - i3[1]};
}

/// P_B-weighted combination of per-sigma lobe pairs.
template <typename SigmaFn>
double mix_pb_sigma(const ScenarioConfig& cfg, SigmaFn&& fn) {
    std::array<double, 2> pa;
    std::array<double, 4> pb;
    prob_vectors(cfg.geometry, cfg.blockage, cfg.pattern_eve.theta_c, pa, pb);
    double v = 0.0;
    if (pb[0] > 0.0 || pb[1] > 0.0) {
        const auto los = fn(true);
        v += pb[0] * los[0] + pb[1] * los[1];
    }
    if (pb[2] > 0.0 || pb[3] > 0.0) {
        const auto nl = fn(false);
        v += pb[2] * nl[0] + pb[3] * nl[1];
    }
    return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// MetricEngine
// ---------------------------------------------------------------------------

struct MetricEngine::Impl {
    ScenarioConfig cfg;
    Method branch_method;
    std::uint64_t seed;
    ContourConfig contour = default_contour();
    LinkKind kind_nl = LinkKind::NLoS;

    SumDist su_los, se_los, su_nl, se_nl;
    std::vector<double> qu_los, qe_los, qu_nl, qe_nl;
    bool fallback = false;

    Impl(const ScenarioConfig& c, Method method, std::uint64_t sd)
        : cfg(c), branch_method(method), seed(sd) {
        cfg.validate();
        switch (cfg.scenario) {
            case Scenario::NoRis: kind_nl = LinkKind::NLoS; break;
            case Scenario::Ris: kind_nl = LinkKind::RisReflected; break;
            case Scenario::RisWithDirect: kind_nl = LinkKind::RisWithDirect; break;
        }
        su_los = build_sum(model(LinkKind::LoS, false).folds, branch_method, contour, seed + 1,
                           &fallback);
        se_los = build_sum(model(LinkKind::LoS, true).folds, branch_method, contour, seed + 2,
                           &fallback);
        if (cfg.scenario == Scenario::NoRis) {
            // Same effective-gain law for LoS and NLoS; only alpha/A differ.
            su_nl = su_los;
            se_nl = se_los;
        } else {
            su_nl = build_sum(model(kind_nl, false).folds, branch_method, contour, seed + 3,
                              &fallback);
            se_nl = build_sum(model(kind_nl, true).folds, branch_method, contour, seed + 4,
                              &fallback);
        }
        qu_los = quantile_cache(su_los);
        qe_los = quantile_cache(se_los);
        qu_nl = quantile_cache(su_nl);
        qe_nl = quantile_cache(se_nl);
    }

    LinkModel model(LinkKind kind, bool eve) const {
        const double gain = eve ? cfg.pattern_eve.g_main : cfg.pattern_user.g_main;
        return make_link_model(cfg, kind, eve, gain);
    }

    const SumDist& sum_of(bool los, bool eve) const {
        return los ? (eve ? se_los : su_los) : (eve ? se_nl : su_nl);
    }
    const std::vector<double>& quant_of(bool los, bool eve) const {
        return los ? (eve ? qe_los : qu_los) : (eve ? qe_nl : qu_nl);
    }

    double a_user(LinkKind kind) const {
        const auto [a1, a2] = a_constants(cfg, cfg.pattern_user.g_main);
        return (kind == LinkKind::LoS || kind == LinkKind::NLoS) ? a1 : a2;
    }
    double a_eve(LinkKind kind, bool main_lobe) const {
        const double g = main_lobe ? cfg.pattern_eve.g_main : cfg.pattern_eve.g_side;
        const auto [a1, a2] = a_constants(cfg, g);
        return (kind == LinkKind::LoS || kind == LinkKind::NLoS) ? a1 : a2;
    }
    double alpha_of(LinkKind kind) const {
        if (kind == LinkKind::LoS) return cfg.path_loss.alpha1;
        if (kind == LinkKind::NLoS) return cfg.path_loss.alpha2;
        return 2.0;
    }

    double sop_branch(bool los, bool lobe, const SecrecyParams& s) const {
        const LinkKind kind = los ? LinkKind::LoS : kind_nl;
        const double au = a_user(kind), ae = a_eve(kind, lobe);
        const double rs = s.r_s();
        const auto& pn = p_nodes();
        const SumDist& su = sum_of(los, false);
        const auto& qe = quant_of(los, true);
        if (rs == 1.0) {
            double acc = 0.0;
            for (std::size_t i = 0; i < pn.p.size(); ++i)
                acc += pn.w[i] * su.cdf(ae * qe[i] / au);
            return acc;
        }
        const DNodes dn = d_nodes(cfg.geometry, conditional_mix(cfg, los), alpha_of(kind));
        double acc = 0.0;
        for (std::size_t k = 0; k < dn.d.size(); ++k) {
            double inner = 0.0;
            for (std::size_t i = 0; i < pn.p.size(); ++i)
                inner += pn.w[i] * su.cdf((rs * ae * qe[i] + (rs - 1.0) * dn.d[k]) / au);
            acc += dn.w[k] * inner;
        }
        return acc;
    }

    double pnsc_branch(bool los, bool lobe, const SecrecyParams& s) const {
        const LinkKind kind = los ? LinkKind::LoS : kind_nl;
        const double au = a_user(kind), ae = a_eve(kind, lobe);
        const auto& pn = p_nodes();
        const SumDist& se = sum_of(los, true);
        const auto& qu = quant_of(los, false);
        double acc = 0.0;
        for (std::size_t i = 0; i < pn.p.size(); ++i)
            acc += pn.w[i] * se.cdf(au * qu[i] / (s.r_s_pnsc * ae));
        return acc;
    }

    double asr_branch(bool los, bool lobe) const {
        const LinkKind kind = los ? LinkKind::LoS : kind_nl;
        const double au = a_user(kind), ae = a_eve(kind, lobe);
        const auto& pn = p_nodes();
        const SumDist& su = sum_of(los, false);
        const SumDist& se = sum_of(los, true);
        const auto& qu = quant_of(los, false);
        const auto& qe = quant_of(los, true);
        const DNodes dn = d_nodes(cfg.geometry, conditional_mix(cfg, los), alpha_of(kind));
        const double inv_ln2 = 1.0 / std::log(2.0);
        double acc = 0.0;
        for (std::size_t k = 0; k < dn.d.size(); ++k) {
            const double d = dn.d[k];
            double i1 = 0.0, i2 = 0.0, i3 = 0.0;
            for (std::size_t i = 0; i < pn.p.size(); ++i) {
                i1 += pn.w[i] * std::log1p(au * qu[i] / d) * se.cdf(au * qu[i] / ae);
                const double le = std::log1p(ae * qe[i] / d);
                i2 += pn.w[i] * le * su.cdf(ae * qe[i] / au);
                i3 += pn.w[i] * le;
            }
            acc += dn.w[k] * (i1 + i2 - i3) * inv_ln2;
        }
        return acc;
    }

    std::array<double, 2> p_a() const {
        std::array<double, 2> pa;
        std::array<double, 4> pb;
        prob_vectors(cfg.geometry, cfg.blockage, cfg.pattern_eve.theta_c, pa, pb);
        return pa;
    }

    template <typename BranchFn>
    double mix_pb(BranchFn&& fn) const {
        std::array<double, 2> pa;
        std::array<double, 4> pb;
        prob_vectors(cfg.geometry, cfg.blockage, cfg.pattern_eve.theta_c, pa, pb);
        double v = 0.0;
        if (pb[0] > 0.0) v += pb[0] * fn(true, true);
        if (pb[1] > 0.0) v += pb[1] * fn(true, false);
        if (pb[2] > 0.0) v += pb[2] * fn(false, true);
        if (pb[3] > 0.0) v += pb[3] * fn(false, false);
        return v;
    }

    double op_branch(bool los, EvalMethod method, const SecrecyParams& s) const {
        const LinkKind kind = los ? LinkKind::LoS : kind_nl;
        const LinkModel lm = model(kind, false);
        const DistanceMix mix = conditional_mix(cfg, los);
        if (method == EvalMethod::Exact) {
            if ((int)lm.folds.size() > kFoldLimit)
                throw AnalyticError(
                    "op: exact method unavailable, fold limit exceeded; use approx or mc");
            return link_dist(lm, cfg.geometry, mix, s.z_th, false, contour);
        }
        return link_dist(surrogate_model(lm), cfg.geometry, mix, s.z_th, false, contour);
    }

    double asym_branch(bool los, const SecrecyParams& s) const {
        const LinkKind kind = los ? LinkKind::LoS : kind_nl;
        const LinkModel sur = surrogate_model(model(kind, false));
        const Fold& f = sur.folds[0];
        const double m = f.m1, ms = f.ms1;
        const double alpha = sur.alpha;
        const AnnulusGeometry& g = cfg.geometry;
        const double norm = g.r2 * g.r2 - g.r0 * g.r0;
        const double lc = std::lgamma(m + ms) - std::lgamma(m) - std::lgamma(ms) -
                          std::log(m * (2.0 / alpha + m));
        const double lz = m * std::log(s.z_th * f.c() / sur.a);
        double acc = 0.0;
        for (const auto& piece : conditional_mix(cfg, los)) {
            const double la = (2.0 + alpha * m) * std::log(piece.hi);
            const double lb = (2.0 + alpha * m) * std::log(piece.lo);
            acc += piece.weight * std::exp(la + lz + lc) * (1.0 - std::exp(lb - la));
        }
        return acc * 2.0 / (norm * alpha);
    }
};

MetricEngine::MetricEngine(const ScenarioConfig& cfg, Method branch_method, std::uint64_t seed)
    : impl_(std::make_unique<Impl>(cfg, branch_method, seed)) {}
MetricEngine::~MetricEngine() = default;
MetricEngine::MetricEngine(MetricEngine&&) noexcept = default;
MetricEngine& MetricEngine::operator=(MetricEngine&&) noexcept = default;

void MetricEngine::set_power(double p_un_linear) {
    if (!(p_un_linear > 0.0)) throw AnalyticError("set_power: power must be positive");
    impl_->cfg.p_un = p_un_linear;
}

const ScenarioConfig& MetricEngine::config() const { return impl_->cfg; }

MetricResult MetricEngine::op(const SecrecyParams& s, EvalMethod method) const {
    s.validate();
    MetricResult out;
    out.method = method;
    if (method == EvalMethod::MonteCarlo) {
        McConfig mc;
        const McEstimate e = estimate_op(impl_->cfg, s, mc);
        out.value = e.mean;
        out.error_estimate = e.stderr_;
        out.trials = e.trials_used;
        return out;
    }
    if (method == EvalMethod::Asymptotic) return op_asymptotic(s);
    if (s.z_th == 0.0) return out;  // Pr(Z < 0) = 0
    const auto pa = impl_->p_a();
    double v = 0.0;
    if (pa[0] > 0.0) v += pa[0] * impl_->op_branch(true, method, s);
    if (pa[1] > 0.0) v += pa[1] * impl_->op_branch(false, method, s);
    out.value = std::clamp(v, 0.0, 1.0);
    out.folds_used =
        method == EvalMethod::Exact ? (int)impl_->model(impl_->kind_nl, false).folds.size() : 1;
    return out;
}

MetricResult MetricEngine::sop(const SecrecyParams& s) const {
    s.validate();
    MetricResult out;
    out.method = EvalMethod::Approx;
    out.value = std::clamp(
        impl_->mix_pb([&](bool los, bool lobe) { return impl_->sop_branch(los, lobe, s); }), 0.0,
        1.0);
    out.fallback = impl_->fallback;
    out.note = impl_->su_nl.kind;
    return out;
}

MetricResult MetricEngine::pnsc(const SecrecyParams& s) const {
    s.validate();
    MetricResult out;
    out.method = EvalMethod::Approx;
    out.value = std::clamp(
        impl_->mix_pb([&](bool los, bool lobe) { return impl_->pnsc_branch(los, lobe, s); }), 0.0,
        1.0);
    out.fallback = impl_->fallback;
    out.note = impl_->su_nl.kind;
    return out;
}

MetricResult MetricEngine::asr(const SecrecyParams& s) const {
    s.validate();
    MetricResult out;
    out.method = EvalMethod::Approx;
    out.value = std::max(
        0.0, impl_->mix_pb([&](bool los, bool lobe) { return impl_->asr_branch(los, lobe); }));
    out.fallback = impl_->fallback;
    out.note = impl_->su_nl.kind;
    return out;
}

MetricResult MetricEngine::op_asymptotic(const SecrecyParams& s) const {
    s.validate();
    MetricResult out;
    out.method = EvalMethod::Asymptotic;
    const auto pa = impl_->p_a();
    double v = 0.0;
    if (pa[0] > 0.0) v += pa[0] * impl_->asym_branch(true, s);
    if (pa[1] > 0.0) v += pa[1] * impl_->asym_branch(false, s);
    out.value = v;  // asymptote; may exceed 1 in the low-SNR regime
    return out;
}

double MetricEngine::diversity_order() const {
    const LinkModel sur = surrogate_model(impl_->model(impl_->kind_nl, false));
    return sur.folds[0].m1;
}

double MetricEngine::sop_foxh(const SecrecyParams& s) const {
    s.validate();
    return std::clamp(mix_pb_sigma(impl_->cfg, [&](bool los) {
                          return sop_foxh_sigma(impl_->cfg, impl_->kind_nl, los, s);
                      }),
                      0.0, 1.0);
}

double MetricEngine::pnsc_foxh(const SecrecyParams& s) const {
    s.validate();
    return std::clamp(mix_pb_sigma(impl_->cfg, [&](bool los) {
                          return pnsc_foxh_sigma(impl_->cfg, impl_->kind_nl, los, s);
                      }),
                      0.0, 1.0);
}

double MetricEngine::asr_foxh(const SecrecyParams& s) const {
    s.validate();
    return std::max(0.0, mix_pb_sigma(impl_->cfg, [&](bool los) {
        return asr_foxh_sigma(impl_->cfg, impl_->kind_nl, los, s);
    }));
}

// ---------------------------------------------------------------------------
// Marginal distribution functions (Theorems 1-6 surface)
// ---------------------------------------------------------------------------

namespace {

double marginal_eval(const ScenarioConfig& cfg, LinkKind kind, double z, bool pdf, bool approx) {
    cfg.validate();
    LinkModel lm = make_link_model(cfg, kind, false, cfg.pattern_user.g_main);
    if (approx) lm = surrogate_model(lm);
    return link_dist(lm, cfg.geometry, marginal_mix(cfg.geometry), z, pdf, default_contour());
}

}  // namespace

double cdf_s1_exact(double z, const ScenarioConfig& cfg, LinkKind sigma) {
    if (sigma != LinkKind::LoS && sigma != LinkKind::NLoS)
        throw AnalyticError("cdf_s1_exact: sigma must be LoS or NLoS");
    return marginal_eval(cfg, sigma, z, false, false);
}
double pdf_s1_exact(double z, const ScenarioConfig& cfg, LinkKind sigma) {
    if (sigma != LinkKind::LoS && sigma != LinkKind::NLoS)
        throw AnalyticError("pdf_s1_exact: sigma must be LoS or NLoS");
    return marginal_eval(cfg, sigma, z, true, false);
}
double cdf_s2_exact(double z, const ScenarioConfig& cfg) {
    return marginal_eval(cfg, LinkKind::RisReflected, z, false, false);
}
double pdf_s2_exact(double z, const ScenarioConfig& cfg) {
    return marginal_eval(cfg, LinkKind::RisReflected, z, true, false);
}
double cdf_s1_approx(double z, const ScenarioConfig& cfg, LinkKind sigma) {
    if (sigma != LinkKind::LoS && sigma != LinkKind::NLoS)
        throw AnalyticError("cdf_s1_approx: sigma must be LoS or NLoS");
    return marginal_eval(cfg, sigma, z, false, true);
}
double cdf_s2_approx(double z, const ScenarioConfig& cfg) {
    return marginal_eval(cfg, LinkKind::RisReflected, z, false, true);
}
double cdf_direct(double z, const ScenarioConfig& cfg) {
    return marginal_eval(cfg, LinkKind::RisWithDirect, z, false, false);
}

SinrDistribution make_sinr_distribution(const ScenarioConfig& cfg, LinkKind kind, Method method,
                                        std::uint64_t empirical_seed, long empirical_samples) {
    cfg.validate();
    SinrDistribution out;
    out.method = method;
    out.scenario = kind;
    if (method == Method::Empirical) {
        auto ecdf = std::make_shared<EmpiricalCdf>(
            draw_marginal_sinr(cfg, kind, empirical_samples, empirical_seed));
        out.cdf = [ecdf](double z) { return (*ecdf)(z); };
        out.provenance = "empirical(" + std::to_string(empirical_samples) + " draws)";
        return out;
    }
    const bool approx = method == Method::SingleFApprox;
    ScenarioConfig snapshot = cfg;
    out.cdf = [snapshot, kind, approx](double z) {
        return marginal_eval(snapshot, kind, z, false, approx);
    };
    out.pdf = [snapshot, kind, approx](double z) {
        return marginal_eval(snapshot, kind, z, true, approx);
    };
    out.provenance = approx ? "single-F surrogate Meijer-G" : "multivariate Fox-H";
    return out;
}

// ---------------------------------------------------------------------------
// Convenience wrappers
// ---------------------------------------------------------------------------

MetricResult op_metric(const ScenarioConfig& cfg, const SecrecyParams& s, EvalMethod method) {
    if (method == EvalMethod::MonteCarlo) {
        MetricResult out;
        out.method = method;
        McConfig mc;
        const McEstimate e = estimate_op(cfg, s, mc);
        out.value = e.mean;
        out.error_estimate = e.stderr_;
        out.trials = e.trials_used;
        return out;
    }
    MetricEngine eng(cfg);
    return eng.op(s, method);
}

namespace {

MetricResult secrecy_metric(const ScenarioConfig& cfg, const SecrecyParams& s, EvalMethod method,
                            int which) {
    MetricResult out;
    out.method = method;
    if (method == EvalMethod::MonteCarlo) {
        McConfig mc;
        const McAllEstimates e = estimate_all(cfg, s, mc);
        const McEstimate& pick = which == 0 ? e.sop : (which == 1 ? e.pnsc : e.asr);
        out.value = pick.mean;
        out.error_estimate = pick.stderr_;
        out.trials = pick.trials_used;
        return out;
    }
    if (method == EvalMethod::Asymptotic)
        throw AnalyticError("asymptotic method applies to the outage probability only");
    MetricEngine eng(cfg);
    return which == 0 ? eng.sop(s) : (which == 1 ? eng.pnsc(s) : eng.asr(s));
}

}  // namespace

MetricResult sop_metric(const ScenarioConfig& cfg, const SecrecyParams& s, EvalMethod method) {
    return secrecy_metric(cfg, s, method, 0);
}
MetricResult pnsc_metric(const ScenarioConfig& cfg, const SecrecyParams& s, EvalMethod method) {
    return secrecy_metric(cfg, s, method, 1);
}
MetricResult asr_metric(const ScenarioConfig& cfg, const SecrecyParams& s, EvalMethod method) {
    return secrecy_metric(cfg, s, method, 2);
}
MetricResult op_asymptotic(const ScenarioConfig& cfg, const SecrecyParams& s) {
    MetricEngine eng(cfg);
    return eng.op_asymptotic(s);
}
double diversity_order(const ScenarioConfig& cfg) {
    MetricEngine eng(cfg);
    return eng.diversity_order();
}

}  // namespace rispls
