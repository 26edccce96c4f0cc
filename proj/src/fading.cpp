#include "rispls/fading.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "rispls/specfun.hpp"

namespace rispls {

void FisherFParams::validate() const {
    if (!(m > 0.0) || !std::isfinite(m))
        throw FadingError("FisherFParams: m must be positive (got " + std::to_string(m) + ")");
    if (!(m_s > 1.0) || !std::isfinite(m_s))
        throw FadingError("FisherFParams: m_s must exceed 1 (got " + std::to_string(m_s) + ")");
    if (!(gamma_bar > 0.0) || !std::isfinite(gamma_bar))
        throw FadingError("FisherFParams: gamma_bar must be positive");
}

double f_power_pdf(double gamma, const FisherFParams& p) {
    p.validate();
    if (gamma < 0.0) throw FadingError("f_power_pdf: gamma must be non-negative");
    const double s = (p.m_s - 1.0) * p.gamma_bar;
    // log-space; the m-1 power underflows otherwise for large shape spreads
    const double log_b = std::lgamma(p.m) + std::lgamma(p.m_s) - std::lgamma(p.m + p.m_s);
    if (gamma == 0.0) {
        if (p.m < 1.0) throw FadingError("f_power_pdf: density diverges at 0 for m < 1");
        if (p.m > 1.0) return 0.0;
        return std::exp(p.m * std::log(p.m) + p.m_s * std::log(s) - log_b -
                        (p.m + p.m_s) * std::log(s));
    }
    const double lp = p.m * std::log(p.m) + p.m_s * std::log(s) + (p.m - 1.0) * std::log(gamma) -
                      log_b - (p.m + p.m_s) * std::log(p.m * gamma + s);
    return std::exp(lp);
}

namespace {

// Regularized incomplete beta I_u(a,b) by the Lentz continued fraction;
// stable for large shape parameters where the series route over/underflows.
double betacf(double a, double b, double u) {
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * u / qap;
    if (std::abs(d) < 1e-300) d = 1e-300;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * u / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = 1.0 + aa / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * u / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = 1.0 + aa / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) return h;
    }
    throw FadingError("f_power_cdf: incomplete beta did not converge");
}

double reg_inc_beta(double a, double b, double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    const double front = std::exp(a * std::log(u) + b * std::log1p(-u) - lbeta);
    if (u < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, u) / a;
    return 1.0 - front * betacf(b, a, 1.0 - u) / b;
}

}  // namespace

double f_power_cdf(double gamma, const FisherFParams& p) {
    p.validate();
    if (gamma < 0.0) throw FadingError("f_power_cdf: gamma must be non-negative");
    if (gamma == 0.0) return 0.0;
    const double s = (p.m_s - 1.0) * p.gamma_bar;
    const double u = p.m * gamma / (p.m * gamma + s);  // incomplete-beta argument
    const double log_pref = (p.m - 1.0) * std::log(p.m) + p.m * std::log(gamma) -
                            p.m * std::log(s) -
                            (std::lgamma(p.m) + std::lgamma(p.m_s) - std::lgamma(p.m + p.m_s));
    // The 2F1 form of the CDF; its exp-prefactor factorization over/underflows
    // for extreme shapes or deep tails, where the equivalent regularized
    // incomplete beta I_u(m, m_s) takes over.
    if (u < 0.95 && p.m <= 120.0 && std::abs(log_pref) < 600.0) {
        const double x = -p.m * gamma / s;
        const double f = gauss_2f1(p.m, p.m + p.m_s, p.m + 1.0, x);
        return std::min(1.0, std::exp(log_pref) * f);
    }
    return reg_inc_beta(p.m, p.m_s, u);
}

double f_moment(int n, const FisherFParams& p) {
    p.validate();
    if (n <= 0) throw FadingError("f_moment: order must be positive");
    if (!(p.m_s > n))
        throw FadingError("f_moment: moment of order " + std::to_string(n) +
                          " does not exist (m_s = " + std::to_string(p.m_s) + ")");
    const double base = (p.m_s - 1.0) * p.gamma_bar / p.m;
    const double lr = std::lgamma(p.m + n) - std::lgamma(p.m) + std::lgamma(p.m_s - n) -
                      std::lgamma(p.m_s);
    return std::pow(base, n) * std::exp(lr);
}

double sample_f(const FisherFParams& p, Rng& rng) {
    std::gamma_distribution<double> gx(p.m, 1.0);
    std::gamma_distribution<double> gy(p.m_s, 1.0);
    const double x = gx(rng);
    const double y = gy(rng);
    return p.gamma_bar * (x / p.m) / (y / (p.m_s - 1.0));
}

namespace {

// Normalized moment ratios of a single F law:
//   R2 = mu2/mu1^2 = (m+1)(m_s-1) / (m (m_s-2))
//   R3 = mu3/mu1^3 = (m+1)(m+2)(m_s-1)^2 / (m^2 (m_s-2)(m_s-3))
double r2_of(double m, double ms) { return (m + 1.0) * (ms - 1.0) / (m * (ms - 2.0)); }
double r3_of(double m, double ms) {
    return (m + 1.0) * (m + 2.0) * (ms - 1.0) * (ms - 1.0) /
           (m * m * (ms - 2.0) * (ms - 3.0));
}

// Given ms and a target R2, the matching m (may be negative => infeasible).
double m_from_r2(double ms, double r2) {
    const double den = r2 * (ms - 2.0) - (ms - 1.0);
    if (den <= 0.0) return -1.0;
    return (ms - 1.0) / den;
}

}  // namespace

FisherFParams fit_f_to_moments(double mu1, double mu2, double mu3) {
    if (!(mu1 > 0.0) || !(mu2 > 0.0) || !(mu3 > 0.0))
        throw FadingError("fit_f_to_moments: moments must be positive");
    const double r2 = mu2 / (mu1 * mu1);
    const double r3 = mu3 / (mu1 * mu1 * mu1);
    if (!(r2 > 1.0))
        throw FadingError("fit_f_to_moments: second moment ratio must exceed 1");

    // Damped Newton on (log m, log(m_s - 3)), residuals in log-ratio form.
    double lm = 0.0, ls = std::log(2.0);
    auto resid = [&](double lm_, double ls_, double& f1, double& f2) {
        const double m = std::exp(lm_), ms = 3.0 + std::exp(ls_);
        f1 = std::log(r2_of(m, ms) / r2);
        f2 = std::log(r3_of(m, ms) / r3);
    };
    bool ok = false;
    double f1, f2;
    resid(lm, ls, f1, f2);
    for (int it = 0; it < 80; ++it) {
        const double n2 = f1 * f1 + f2 * f2;
        if (n2 < 1e-24) {
            ok = true;
            break;
        }
        const double eps = 1e-6;
        double a1, a2, b1, b2;
        resid(lm + eps, ls, a1, a2);
        resid(lm, ls + eps, b1, b2);
        const double j11 = (a1 - f1) / eps, j21 = (a2 - f2) / eps;
        const double j12 = (b1 - f1) / eps, j22 = (b2 - f2) / eps;
        const double det = j11 * j22 - j12 * j21;
        if (std::abs(det) < 1e-14) break;
        const double dm = (-f1 * j22 + f2 * j12) / det;
        const double ds = (-f2 * j11 + f1 * j21) / det;
        double step = 1.0;
        for (int ls_it = 0; ls_it < 30; ++ls_it, step *= 0.5) {
            double g1, g2;
            resid(lm + step * dm, ls + step * ds, g1, g2);
            if (g1 * g1 + g2 * g2 < n2) {
                lm += step * dm;
                ls += step * ds;
                f1 = g1;
                f2 = g2;
                break;
            }
        }
    }
    bool relaxed = false;
    if (!ok) {
        // Eliminate m through R2 (keeping moments 1-2 exact) and solve the
        // third-moment equation in m_s alone. For sums of many heavy-tailed
        // components the target R3 can sit outside the family's reach; the
        // best attainable m_s (boundary minimizer) is then used, and the
        // result is flagged so callers can tell the match was inexact.
        auto g = [&](double ms) {
            const double m = m_from_r2(ms, r2);
            if (m <= 0.0 || m > 2e3) return std::numeric_limits<double>::quiet_NaN();
            return std::log(r3_of(m, ms) / r3);
        };
        const double ms_floor =
            std::max(3.0, r2 < 2.0 ? (2.0 * r2 - 1.0) / (r2 - 1.0) : 3.0);
        double best_ms = 0.0, best_abs = std::numeric_limits<double>::infinity();
        double lo = 0.0, hi = 0.0;
        double prev_ms = 0.0, prev_g = std::numeric_limits<double>::quiet_NaN();
        for (double t = 1e-7; t < 1e9; t *= 1.05) {
            const double ms = ms_floor + t;
            const double val = g(ms);
            if (std::isfinite(val) && std::abs(val) < best_abs) {
                best_abs = std::abs(val);
                best_ms = ms;
            }
            if (std::isfinite(prev_g) && std::isfinite(val) && prev_g * val <= 0.0) {
                lo = prev_ms;
                hi = ms;
                break;
            }
            prev_ms = ms;
            prev_g = val;
        }
        double ms;
        if (hi != 0.0) {
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double val = g(mid);
                if (!std::isfinite(val)) break;
                if (g(lo) * val <= 0.0)
                    hi = mid;
                else
                    lo = mid;
            }
            ms = 0.5 * (lo + hi);
        } else if (best_ms > 0.0) {
            ms = best_ms;
            relaxed = true;
        } else {
            throw FadingError("fit_f_to_moments: moment match infeasible");
        }
        const double m = m_from_r2(ms, r2);
        if (!(m > 0.0)) throw FadingError("fit_f_to_moments: moment match infeasible");
        lm = std::log(m);
        ls = std::log(ms - 3.0);
    }
    FisherFParams out{std::exp(lm), 3.0 + std::exp(ls), mu1};
    // Verify moments 1-2 closed to solver tolerance; the third as well unless
    // the relaxed boundary fit was taken.
    const double e2 = std::abs(r2_of(out.m, out.m_s) / r2 - 1.0);
    const double e3 = std::abs(r3_of(out.m, out.m_s) / r3 - 1.0);
    if (e2 > 1e-8 || (!relaxed && e3 > 1e-8))
        throw FadingError("fit_f_to_moments: moment match did not converge");
    return out;
}

FisherFParams approx_sum_f(const std::vector<FisherFParams>& components) {
    if (components.empty()) throw FadingError("approx_sum_f: no components");
    for (const auto& c : components) {
        c.validate();
        if (!(c.m_s > 3.0))
            throw FadingError("approx_sum_f: components need m_s > 3 for three moments");
    }
    if (components.size() == 1) return components.front();

    // Raw moments of the sum from component moments (independence).
    const std::size_t n = components.size();
    std::vector<double> m1(n), m2(n), m3(n);
    for (std::size_t i = 0; i < n; ++i) {
        m1[i] = f_moment(1, components[i]);
        m2[i] = f_moment(2, components[i]);
        m3[i] = f_moment(3, components[i]);
    }
    double s1 = 0.0;
    for (double v : m1) s1 += v;
    double s2 = 0.0, s3 = 0.0;
    for (std::size_t i = 0; i < n; ++i) s2 += m2[i];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) s2 += 2.0 * m1[i] * m1[j];
    for (std::size_t i = 0; i < n; ++i) s3 += m3[i];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) s3 += 3.0 * m2[i] * m1[j];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k) s3 += 6.0 * m1[i] * m1[j] * m1[k];

    // Init from component-average shapes, then the shared solver.
    try {
        return fit_f_to_moments(s1, s2, s3);
    } catch (const FadingError&) {
        throw FadingError("approx_sum_f: moment match infeasible for the given components");
    }
}

namespace {

// Scale-free fractional moment mu_nu / gamma_bar^nu of one F law.
double frac_ratio_of(double nu, double m, double ms) {
    return std::pow((ms - 1.0) / m, nu) *
           std::exp(std::lgamma(m + nu) - std::lgamma(m) + std::lgamma(ms - nu) -
                    std::lgamma(ms));
}

}  // namespace

FisherFParams approx_product_pair(const FisherFParams& p1, const FisherFParams& p2) {
    p1.validate();
    p2.validate();
    if (!(p1.m_s > 3.0) || !(p2.m_s > 3.0))
        throw FadingError("approx_product_pair: both factors need m_s > 3");
    const double mu1 = f_moment(1, p1) * f_moment(1, p2);
    const double mu2 = f_moment(2, p1) * f_moment(2, p2);
    const double mu3 = f_moment(3, p1) * f_moment(3, p2);

    // Match E[X], E[X^2] and the fractional E[X^(3/2)] (all composable
    // across independent factors). A strict third-moment match warps the
    // body of the fit to absorb the product's heavy tail; the half-step
    // moment balances body and tail. Falls back to the (1,2,3) fit when the
    // fractional equation has no root inside the family.
    {
        const double t32 = frac_ratio_of(1.5, p1.m, p1.m_s) * frac_ratio_of(1.5, p2.m, p2.m_s);
        const double r2 = mu2 / (mu1 * mu1);
        auto resid = [&](double ms) {
            const double m = m_from_r2(ms, r2);
            if (!(m > 0.0)) return std::numeric_limits<double>::quiet_NaN();
            return frac_ratio_of(1.5, m, ms) - t32;
        };
        double lo = 0.0, hi = 0.0, prev = std::numeric_limits<double>::quiet_NaN();
        double prev_ms = 0.0;
        for (double ms = 3.0 + 1e-9; ms < 1e7; ms = 3.0 + (ms - 3.0) * 1.04 + 1e-9) {
            const double v = resid(ms);
            if (std::isfinite(prev) && std::isfinite(v) && prev * v <= 0.0) {
                lo = prev_ms;
                hi = ms;
                break;
            }
            prev = v;
            prev_ms = ms;
        }
        if (hi != 0.0) {
            for (int i = 0; i < 200; ++i) {
                const double mid = 0.5 * (lo + hi);
                if (resid(lo) * resid(mid) <= 0.0)
                    hi = mid;
                else
                    lo = mid;
            }
            const double ms = 0.5 * (lo + hi);
            const double m = m_from_r2(ms, r2);
            if (m > 0.0 && ms > 3.0) return FisherFParams{m, ms, mu1};
        }
    }
    try {
        return fit_f_to_moments(mu1, mu2, mu3);
    } catch (const FadingError&) {
        throw FadingError("approx_product_pair: moment match infeasible");
    }
}

}  // namespace rispls
