#include "rispls/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

namespace rispls {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Stirling series coefficients B_{2n} / (2n (2n-1)).
constexpr double kStirling[] = {
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
    77683.0 / 5796.0,
    -236364091.0 / 1506960.0,
};

cplx stirling_log_gamma(cplx z) {
    // |z| >= 10 and Re z > 0 assumed.
    const cplx lz = std::log(z);
    cplx sum = (z - 0.5) * lz - z + 0.5 * std::log(2.0 * kPi);
    const cplx z2 = z * z;
    cplx zp = z;
    for (double c : kStirling) {
        sum += c / zp;
        zp *= z2;
    }
    return sum;
}

}  // namespace

cplx complex_log_gamma(cplx z) {
    if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real()))
        throw SpecfunError("complex_log_gamma: pole at non-positive integer " +
                           std::to_string(z.real()));
    if (z.real() >= 0.5 || std::abs(z.imag()) >= 10.0) {
        // Shift until Stirling applies; each step subtracts log(z+k).
        cplx shift = 0.0;
        while (std::abs(z) < 10.0) {
            shift += std::log(z);
            z += 1.0;
        }
        return stirling_log_gamma(z) - shift;
    }
    // Left half-plane close to the real axis: reflection keeps the shift
    // chain away from the poles. ln sin(pi z) is assembled from exponentials
    // scaled to avoid overflow; principal branch continuity is guaranteed
    // for |Im z| < 10 where no extra 2*pi*i winding can accumulate.
    const cplx one_minus = 1.0 - z;
    const cplx lg = complex_log_gamma(one_minus);
    cplx lsin;
    if (z.imag() >= 0.0) {
        const cplx w = std::exp(cplx(0.0, 2.0 * kPi) * z);  // |w| <= 1
        lsin = cplx(0.0, -kPi) * z + std::log((1.0 - w) / cplx(0.0, -2.0));
    } else {
        const cplx w = std::exp(cplx(0.0, -2.0 * kPi) * z);
        lsin = cplx(0.0, kPi) * z + std::log((1.0 - w) / cplx(0.0, 2.0));
    }
    return std::log(cplx(kPi)) - lsin - lg;
}

double gauss_2f1(double a, double b, double c, double x) {
    if (c <= 0.0 && c == std::floor(c))
        throw SpecfunError("gauss_2f1: c is a non-positive integer");
    if (x >= 1.0) throw SpecfunError("gauss_2f1: argument must satisfy x < 1");

    auto series = [](double a_, double b_, double c_, double u) {
        double term = 1.0, sum = 1.0;
        int quiet = 0;
        for (int n = 0; n < 200000; ++n) {
            term *= (a_ + n) * (b_ + n) / ((c_ + n) * (n + 1.0)) * u;
            sum += term;
            if (std::abs(term) <= 1e-16 * std::abs(sum)) {
                if (++quiet >= 3) return sum;
            } else {
                quiet = 0;
            }
            if (!std::isfinite(sum)) break;
        }
        if (quiet == 0)
            throw SpecfunError("gauss_2f1: series did not converge");
        return sum;
    };

    if (std::abs(x) <= 0.5) return series(a, b, c, x);
    if (x < 0.0) {
        // Pfaff:(1-x)^(-a) 2F1(a, c-b; c; x/(x-1)); maps x<0 into (0,1).
        const double u = x / (x - 1.0);
        return std::pow(1.0 - x, -a) * series(a, c - b, c, u);
    }
    // 0.5 < x < 1: plain series still converges, just more slowly.
    return series(a, b, c, x);
}

// ---------------------------------------------------------------------------
// Quadrature helpers
// ---------------------------------------------------------------------------

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double p0 = 0, p1 = 0;
        for (int it = 0; it < 100; ++it) {
            p0 = 1.0;
            p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            const double dp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double dp = n * (x * p0 - p1) / (x * x - 1.0);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

namespace {

// Gauss 7 / Kronrod 15 pair on [-1,1].
constexpr double kKx[8] = {0.0, 0.2077849550078985, 0.4058451513773972, 0.5860872354676911,
                           0.7415311855993944, 0.8648644233597691, 0.9491079123427585,
                           0.9914553711208126};
constexpr double kKw[8] = {0.2094821410847278, 0.2044329400752989, 0.1903505780647854,
                           0.1690047266392679, 0.1406532597155259, 0.1047900103222502,
                           0.0630920926299786, 0.0229353220105292};
constexpr double kGw[4] = {0.4179591836734694, 0.3818300505051189, 0.2797053914892767,
                           0.1294849661688697};

void gk15(const std::function<double(double)>& f, double a, double b, double& val, double& err) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double f0 = f(c);
    double k = kKw[0] * f0;
    double g = kGw[0] * f0;
    for (int i = 1; i < 8; ++i) {
        const double fi = f(c + h * kKx[i]) + f(c - h * kKx[i]);
        k += kKw[i] * fi;
        if (i % 2 == 0) g += kGw[i / 2] * fi;
    }
    val = k * h;
    err = std::abs((k - g) * h);
    err = std::min(err, std::pow(200.0 * err, 1.5));
}

void adapt(const std::function<double(double)>& f, double a, double b, double abs_tol,
           double rel_tol, int depth, double& total) {
    double v, e;
    gk15(f, a, b, v, e);
    if (e <= abs_tol || e <= rel_tol * std::abs(v) || depth <= 0) {
        total += v;
        return;
    }
    const double m = 0.5 * (a + b);
    adapt(f, a, m, 0.5 * abs_tol, rel_tol, depth - 1, total);
    adapt(f, m, b, 0.5 * abs_tol, rel_tol, depth - 1, total);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, double rel_tol, int max_depth) {
    double total = 0.0;
    adapt(f, a, b, abs_tol, rel_tol, max_depth, total);
    return total;
}

// ---------------------------------------------------------------------------
// Mellin-Barnes contour quadrature
// ---------------------------------------------------------------------------

namespace {

struct FoldClassified {
    // Terms touching exactly this fold with the others' coefficients zero.
    std::vector<GammaTerm> own;
    // Indices into spec.outer_factors.terms of coupling terms (>1 fold).
    // (kept in a shared list; nothing per fold needed here)
};

bool touches_only(const GammaTerm& t, int fold, int folds) {
    for (int k = 0; k < folds; ++k)
        if (k != fold && t.coeff(k) != 0.0) return false;
    return t.coeff(fold) != 0.0;
}

}  // namespace

std::pair<double, double> contour_window(const FoxHMultivarSpec& spec, int fold) {
    // Numerator terms Gamma(shift + c*s) with c>0 put poles at s <= -shift/c
    // (left family); c<0 puts poles at s >= shift/|c| (right family).
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    auto scan = [&](const GammaTerm& t) {
        if (t.denom) return;
        if (!touches_only(t, fold, spec.folds)) return;
        const double c = t.sign * t.coeff(fold);
        if (c > 0.0)
            lo = std::max(lo, -t.shift / c);
        else if (c < 0.0)
            hi = std::min(hi, t.shift / (-c));
    };
    for (const auto& t : spec.per_fold_factors.at(fold).terms) scan(t);
    for (const auto& t : spec.outer_factors.terms) scan(t);
    if (lo >= hi)
        throw SpecfunError("contour separation failure on fold " + std::to_string(fold) +
                           ": window [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return {lo, hi};
}

std::vector<double> default_anchors(const FoxHMultivarSpec& spec) {
    std::vector<double> anchors(spec.folds);
    for (int k = 0; k < spec.folds; ++k) {
        auto [lo, hi] = contour_window(spec, k);
        if (std::isfinite(lo) && std::isfinite(hi))
            anchors[k] = 0.5 * (lo + hi);
        else if (std::isfinite(lo))
            anchors[k] = lo + 0.5;
        else if (std::isfinite(hi))
            anchors[k] = hi - 0.5;
        else
            anchors[k] = 0.0;
    }
    return anchors;
}

namespace {

// On-axis log-magnitude of all factors seen by fold k at real point c,
// other folds held at their current anchor values.
double axis_log_magnitude(const FoxHMultivarSpec& spec, const std::vector<double>& anchors,
                          int fold, double c) {
    double lm = 0.0;
    auto add = [&](const GammaTerm& t) {
        double arg = t.shift;
        for (int j = 0; j < spec.folds; ++j)
            arg += t.sign * t.coeff(j) * (j == fold ? c : anchors[j]);
        if (arg <= 0.0 && arg == std::floor(arg)) {
            lm += t.denom ? -700.0 : 700.0;
            return;
        }
        const double lg = std::lgamma(arg);  // log|Gamma|, fine for magnitude
        lm += t.denom ? -lg : lg;
    };
    for (const auto& t : spec.per_fold_factors[fold].terms) add(t);
    for (const auto& t : spec.outer_factors.terms)
        if (t.coeff(fold) != 0.0) add(t);
    lm += spec.arg_sign(fold) * c * std::log(spec.arguments[fold]);
    return lm;
}

}  // namespace

std::vector<double> tuned_anchors(const FoxHMultivarSpec& spec) {
    std::vector<double> anchors = default_anchors(spec);
    // Coordinate descent: golden-section on each fold's axis magnitude.
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int pass = 0; pass < 2; ++pass) {
        for (int k = 0; k < spec.folds; ++k) {
            auto [lo, hi] = contour_window(spec, k);
            const double span = (std::isfinite(lo) && std::isfinite(hi)) ? hi - lo : 4.0;
            // Keep a margin from the window edges: anchors hugging a pole make
            // the trapezoid step collapse.
            const double margin = std::min(0.35, 0.12 * span);
            double a = std::isfinite(lo) ? lo + margin : anchors[k] - 2.0;
            double b = std::isfinite(hi) ? hi - margin : anchors[k] + 2.0;
            if (!(a < b)) continue;
            double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
            double f1 = axis_log_magnitude(spec, anchors, k, x1);
            double f2 = axis_log_magnitude(spec, anchors, k, x2);
            for (int it = 0; it < 40 && (b - a) > 1e-3 * span; ++it) {
                if (f1 < f2) {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - gr * (b - a);
                    f1 = axis_log_magnitude(spec, anchors, k, x1);
                } else {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + gr * (b - a);
                    f2 = axis_log_magnitude(spec, anchors, k, x2);
                }
            }
            anchors[k] = 0.5 * (a + b);
        }
    }
    return anchors;
}

namespace {

struct FoldNodes {
    std::vector<double> ts;      // symmetric node offsets, ascending
    std::vector<cplx> own_log;   // per node: sum of own-factor log-gammas (no arg powers)
};

struct PreparedSpec {
    int folds;
    std::vector<double> anchors;
    double h;
    std::vector<FoldNodes> nodes;
    std::vector<GammaTerm> coupling;               // outer terms touching >1 fold
    std::vector<std::vector<GammaTerm>> fold_own;  // own terms incl. single-fold outer terms
    double const_log = 0.0;                        // constant gamma factors
};

cplx log_gamma_term(const GammaTerm& t, const cplx& arg) {
    const cplx lg = complex_log_gamma(arg);
    return t.denom ? -lg : lg;
}

PreparedSpec prepare(const FoxHMultivarSpec& spec, const ContourConfig& contour,
                     double max_abs_log_arg) {
    if (spec.folds < 1) throw SpecfunError("fox_h: folds must be >= 1");
    if ((int)spec.per_fold_factors.size() != spec.folds)
        throw SpecfunError("fox_h: per_fold_factors size mismatch");

    PreparedSpec ps;
    ps.folds = spec.folds;
    ps.anchors = contour.anchors.empty() ? tuned_anchors(spec) : contour.anchors;
    if ((int)ps.anchors.size() != spec.folds)
        throw SpecfunError("fox_h: anchors size mismatch");
    for (int k = 0; k < spec.folds; ++k) {
        auto [lo, hi] = contour_window(spec, k);
        if (!(ps.anchors[k] > lo && ps.anchors[k] < hi))
            throw SpecfunError("fox_h: anchor outside admissible window on fold " +
                               std::to_string(k));
    }

    ps.fold_own.resize(spec.folds);
    for (int k = 0; k < spec.folds; ++k) ps.fold_own[k] = spec.per_fold_factors[k].terms;
    for (const auto& t : spec.outer_factors.terms) {
        int active = 0, last = -1;
        for (int k = 0; k < spec.folds; ++k)
            if (t.coeff(k) != 0.0) {
                ++active;
                last = k;
            }
        if (active == 0) {
            if (t.shift <= 0.0 && t.shift == std::floor(t.shift))
                throw SpecfunError("fox_h: constant gamma factor at a pole");
            ps.const_log += (t.denom ? -1.0 : 1.0) * std::lgamma(t.shift);
        } else if (active == 1) {
            ps.fold_own[last].push_back(t);
        } else {
            ps.coupling.push_back(t);
        }
    }

    // Node spacing: resolve the oscillation exp(it ln x) and keep the step
    // small against the distance from each contour to its nearest pole
    // (trapezoid error ~ exp(-2 pi dist / h)).
    double pole_dist = std::numeric_limits<double>::infinity();
    for (int k = 0; k < spec.folds; ++k) {
        auto [lo, hi] = contour_window(spec, k);
        if (std::isfinite(lo)) pole_dist = std::min(pole_dist, ps.anchors[k] - lo);
        if (std::isfinite(hi)) pole_dist = std::min(pole_dist, hi - ps.anchors[k]);
        for (const auto& t : ps.coupling) {
            if (t.denom || t.coeff(k) == 0.0) continue;
            double rest = t.shift;
            for (int j = 0; j < spec.folds; ++j)
                if (j != k) rest += t.sign * t.coeff(j) * ps.anchors[j];
            const double ck = t.sign * t.coeff(k);
            const double x0 = -rest / ck;
            const double step = -1.0 / ck;
            for (int n = 0; n < 4; ++n)
                pole_dist = std::min(pole_dist, std::abs(ps.anchors[k] - (x0 + n * step)));
        }
    }
    const double h_cap = 2.0 * contour.half_height / std::max(2, contour.max_nodes_per_fold - 1);
    ps.h = std::min(contour.max_step, kPi / (8.0 + 1.5 * max_abs_log_arg));
    if (std::isfinite(pole_dist)) ps.h = std::min(ps.h, 0.34 * pole_dist);
    ps.h = std::max(ps.h, h_cap);

    // Per-fold node lists, truncated where the gamma decay leaves nothing:
    // |x^(c+it)| is constant in t, so argument powers never affect the
    // truncation profile. Couplings are probed along each axis with the
    // other folds held at their anchors.
    const double drop =
        std::log(std::clamp(contour.rel_tol * 1e-2, 1e-13, 1e-8));
    ps.nodes.resize(spec.folds);
    for (int k = 0; k < spec.folds; ++k) {
        const int half = std::max(1, (int)std::floor(contour.half_height / ps.h));
        auto axis_val = [&](double t) {
            cplx lm = 0.0;
            const cplx sk(ps.anchors[k], t);
            for (const auto& tm : ps.fold_own[k])
                lm += log_gamma_term(tm, cplx(tm.shift) + (double)tm.sign * tm.coeff(k) * sk);
            for (const auto& tm : ps.coupling) {
                cplx arg = tm.shift;
                for (int j = 0; j < spec.folds; ++j)
                    arg += (double)tm.sign * tm.coeff(j) *
                           (j == k ? sk : cplx(ps.anchors[j], 0.0));
                lm += log_gamma_term(tm, arg);
            }
            return lm.real();
        };
        const double peak = axis_val(0.0);
        int consec = 0;
        int tmax = half;
        for (int i = 1; i <= half; ++i) {
            if (axis_val(i * ps.h) < peak + drop) {
                if (++consec >= 16) {
                    tmax = i;
                    break;
                }
            } else {
                consec = 0;
            }
        }
        FoldNodes fn;
        fn.ts.reserve(2 * tmax + 1);
        for (int i = -tmax; i <= tmax; ++i) fn.ts.push_back(i * ps.h);
        fn.own_log.resize(fn.ts.size());
        for (std::size_t i = 0; i < fn.ts.size(); ++i) {
            const cplx sk(ps.anchors[k], fn.ts[i]);
            cplx lm = 0.0;
            for (const auto& tm : ps.fold_own[k])
                lm += log_gamma_term(tm, cplx(tm.shift) + (double)tm.sign * tm.coeff(k) * sk);
            fn.own_log[i] = lm;
        }
        ps.nodes[k] = std::move(fn);
    }
    return ps;
}

struct BatchAccum {
    std::vector<cplx> full;    // per argument set, trapezoid at step h
    std::vector<cplx> coarse;  // per argument set, step 2h (even-index nodes)
    long count = 0;
};

// Recursive tensor sweep over fold node lists; powfac[a][k][i] carries
// x_k^(s_i) for argument set a.
void sweep(const PreparedSpec& ps, const std::vector<const GammaTerm*>& coupling,
           const std::vector<std::vector<std::vector<cplx>>>& powfac, int fold, cplx partial_log,
           bool even, std::vector<cplx>& svals, std::vector<std::size_t>& idx,
           BatchAccum& acc) {
    const FoldNodes& fn = ps.nodes[fold];
    const std::size_t n = fn.ts.size();
    const std::size_t mid = n / 2;
    for (std::size_t i = 0; i < n; ++i) {
        const cplx plog = partial_log + fn.own_log[i];
        if (plog.real() < -720.0) continue;
        svals[fold] = cplx(ps.anchors[fold], fn.ts[i]);
        idx[fold] = i;
        const bool e = even && (((i > mid ? i - mid : mid - i) % 2) == 0);
        if (fold + 1 < ps.folds) {
            sweep(ps, coupling, powfac, fold + 1, plog, e, svals, idx, acc);
        } else {
            cplx lg = plog;
            for (const GammaTerm* t : coupling) {
                cplx arg = t->shift;
                for (int j = 0; j < ps.folds; ++j) arg += (double)t->sign * t->coeff(j) * svals[j];
                lg += log_gamma_term(*t, arg);
            }
            if (lg.real() < -720.0) continue;
            const cplx base = std::exp(lg);
            for (std::size_t a = 0; a < powfac.size(); ++a) {
                cplx v = base;
                for (int k = 0; k < ps.folds; ++k) v *= powfac[a][k][idx[k]];
                acc.full[a] += v;
                if (e) acc.coarse[a] += v;
            }
            ++acc.count;
        }
    }
}

}  // namespace

std::vector<QuadratureResult> fox_h_multi_args(const FoxHMultivarSpec& base,
                                               const std::vector<std::vector<double>>& arg_sets,
                                               const ContourConfig& contour) {
    if (base.folds > 4)
        throw SpecfunError("fox_h: fold limit exceeded (folds=" + std::to_string(base.folds) +
                           " > 4); use an approximation or Monte-Carlo instead");
    if (arg_sets.empty()) return {};
    double max_log = 0.0;
    for (const auto& args : arg_sets) {
        if ((int)args.size() != base.folds)
            throw SpecfunError("fox_h: argument set size mismatch");
        for (double x : args) {
            if (!(x > 0.0) || !std::isfinite(x))
                throw SpecfunError("fox_h: arguments must be positive finite");
            max_log = std::max(max_log, std::abs(std::log(x)));
        }
    }

    // Anchor tuning wants representative arguments: geometric mean per fold.
    FoxHMultivarSpec tuned = base;
    tuned.arguments.assign(base.folds, 1.0);
    for (int k = 0; k < base.folds; ++k) {
        double s = 0.0;
        for (const auto& args : arg_sets) s += std::log(args[k]);
        tuned.arguments[k] = std::exp(s / (double)arg_sets.size());
    }

    PreparedSpec ps = prepare(tuned, contour, max_log);
    std::vector<const GammaTerm*> coupling;
    coupling.reserve(ps.coupling.size());
    for (const auto& t : ps.coupling) coupling.push_back(&t);

    // Precompute x^s factors per argument set, fold and node.
    std::vector<std::vector<std::vector<cplx>>> powfac(arg_sets.size());
    for (std::size_t a = 0; a < arg_sets.size(); ++a) {
        powfac[a].resize(ps.folds);
        for (int k = 0; k < ps.folds; ++k) {
            const double lx = (double)base.arg_sign(k) * std::log(arg_sets[a][k]);
            const FoldNodes& fn = ps.nodes[k];
            powfac[a][k].resize(fn.ts.size());
            for (std::size_t i = 0; i < fn.ts.size(); ++i)
                powfac[a][k][i] = std::exp(cplx(ps.anchors[k], fn.ts[i]) * lx);
        }
    }

    BatchAccum acc;
    acc.full.assign(arg_sets.size(), 0.0);
    acc.coarse.assign(arg_sets.size(), 0.0);
    std::vector<cplx> svals(ps.folds);
    std::vector<std::size_t> idx(ps.folds);
    sweep(ps, coupling, powfac, 0, cplx(0.0), true, svals, idx, acc);

    double scale = std::exp(ps.const_log);
    for (int k = 0; k < ps.folds; ++k) scale *= ps.h / (2.0 * kPi);
    double scale2 = std::exp(ps.const_log);
    for (int k = 0; k < ps.folds; ++k) scale2 *= 2.0 * ps.h / (2.0 * kPi);

    std::vector<QuadratureResult> results(arg_sets.size());
    for (std::size_t a = 0; a < arg_sets.size(); ++a) {
        const cplx fine = acc.full[a] * scale;
        const cplx coarse = acc.coarse[a] * scale2;
        QuadratureResult r;
        r.value = fine.real();
        r.nodes_used = acc.count;
        r.error_estimate = std::abs((fine - coarse).real()) + std::abs(fine.imag());
        r.converged =
            r.error_estimate <= std::max(contour.abs_tol, contour.rel_tol * std::abs(r.value));
        results[a] = r;
    }
    return results;
}

QuadratureResult fox_h_multivariate(const FoxHMultivarSpec& spec, const ContourConfig& contour) {
    return fox_h_multi_args(spec, {spec.arguments}, contour).front();
}

FoxHMultivarSpec meijer_to_foxh(const MeijerGSpec& g) {
    if (g.m < 0 || g.n < 0 || g.m > g.q || g.n > g.p)
        throw SpecfunError("meijer_g: require 0 <= m <= q and 0 <= n <= p");
    if ((int)g.a_params.size() != g.p || (int)g.b_params.size() != g.q)
        throw SpecfunError("meijer_g: parameter list sizes must match p and q");
    FoxHMultivarSpec spec;
    spec.folds = 1;
    spec.per_fold_factors.resize(1);
    auto& terms = spec.per_fold_factors[0].terms;
    for (int j = 0; j < g.q; ++j) {
        GammaTerm t;
        t.coeffs = {1.0};
        if (j < g.m) {
            t.shift = g.b_params[j];
            t.sign = -1;  // Gamma(b_j - s)
        } else {
            t.shift = 1.0 - g.b_params[j];
            t.sign = +1;  // 1 / Gamma(1 - b_j + s)
            t.denom = true;
        }
        terms.push_back(t);
    }
    for (int j = 0; j < g.p; ++j) {
        GammaTerm t;
        t.coeffs = {1.0};
        if (j < g.n) {
            t.shift = 1.0 - g.a_params[j];
            t.sign = +1;  // Gamma(1 - a_j + s)
        } else {
            t.shift = g.a_params[j];
            t.sign = -1;  // 1 / Gamma(a_j - s)
            t.denom = true;
        }
        terms.push_back(t);
    }
    spec.arguments = {g.argument};
    return spec;
}

QuadratureResult meijer_g(const MeijerGSpec& spec, const ContourConfig& contour) {
    return fox_h_multivariate(meijer_to_foxh(spec), contour);
}

QuadratureResult bivariate_meijer_g(const BivariateMeijerGSpec& spec,
                                    const ContourConfig& contour) {
    FoxHMultivarSpec h;
    h.folds = 2;
    h.per_fold_factors.resize(2);
    const MeijerGSpec* folds[2] = {&spec.fold1, &spec.fold2};
    for (int k = 0; k < 2; ++k) {
        FoxHMultivarSpec one = meijer_to_foxh(*folds[k]);
        for (auto& t : one.per_fold_factors[0].terms) {
            GammaTerm t2 = t;
            t2.coeffs.assign(2, 0.0);
            t2.coeffs[k] = 1.0;
            h.per_fold_factors[k].terms.push_back(t2);
        }
    }
    const MeijerGSpec& o = spec.outer;
    if ((int)o.a_params.size() != o.p || (int)o.b_params.size() != o.q)
        throw SpecfunError("bivariate_meijer_g: outer parameter sizes must match p and q");
    for (int j = 0; j < o.q; ++j) {
        GammaTerm t;
        t.coeffs = {1.0, 1.0};
        if (j < o.m) {
            t.shift = o.b_params[j];
            t.sign = -1;
        } else {
            t.shift = 1.0 - o.b_params[j];
            t.sign = +1;
            t.denom = true;
        }
        h.outer_factors.terms.push_back(t);
    }
    for (int j = 0; j < o.p; ++j) {
        GammaTerm t;
        t.coeffs = {1.0, 1.0};
        if (j < o.n) {
            t.shift = 1.0 - o.a_params[j];
            t.sign = +1;
        } else {
            t.shift = o.a_params[j];
            t.sign = -1;
            t.denom = true;
        }
        h.outer_factors.terms.push_back(t);
    }
    h.arguments = {spec.fold1.argument, spec.fold2.argument};
    return fox_h_multivariate(h, contour);
}

}  // namespace rispls
