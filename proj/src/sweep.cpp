#include "rispls/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

namespace rispls {

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

RunConfig apply_parameter(RunConfig rc, const std::string& param, double value) {
    if (param == "p_un_db") {
        rc.scenario.p_un = db_to_linear(value);
    } else if (param == "l") {
        if (value < 1.0 || value != std::floor(value))
            throw ConfigError("sweep: l values must be positive integers");
        const FisherFParams user = rc.scenario.fading_user.front();
        const FisherFParams eve = rc.scenario.fading_eve.front();
        const FisherFParams bs = rc.scenario.fading_bs_ris.front();
        rc.scenario.l_elements = (int)value;
        rc.scenario.fill_tables(user, eve, bs);
    } else if (param == "theta_c") {
        rc.scenario.pattern_user.theta_c = value;
        rc.scenario.pattern_eve.theta_c = value;
    } else if (param == "z_th_db") {
        rc.secrecy.z_th = db_to_linear(value);
    } else if (param == "r_t") {
        rc.secrecy.r_t = value;
    } else if (param == "gamma_bar_db") {
        const double g = db_to_linear(value);
        for (auto* tbl : {&rc.scenario.fading_user, &rc.scenario.fading_user_ris})
            for (auto& p : *tbl) p.gamma_bar = g;
        for (auto* tbl : {&rc.scenario.fading_eve, &rc.scenario.fading_eve_ris})
            for (auto& p : *tbl) p.gamma_bar = g;
    } else {
        throw ConfigError("sweep: unknown parameter '" + param + "'");
    }
    return rc;
}

EvalMethod method_from(const std::string& name) {
    if (name == "exact") return EvalMethod::Exact;
    if (name == "approx") return EvalMethod::Approx;
    if (name == "asymptotic") return EvalMethod::Asymptotic;
    if (name == "mc") return EvalMethod::MonteCarlo;
    throw ConfigError("unknown method '" + name + "'");
}

MetricResult eval_point(const RunConfig& rc, const std::string& metric, EvalMethod method) {
    if (method == EvalMethod::MonteCarlo) {
        const McAllEstimates e = estimate_all(rc.scenario, rc.secrecy, rc.mc);
        const McEstimate pick = metric == "op"
                                    ? e.op
                                    : (metric == "sop" ? e.sop
                                                       : (metric == "pnsc" ? e.pnsc : e.asr));
        MetricResult out;
        out.method = method;
        out.value = pick.mean;
        out.error_estimate = pick.stderr_;
        out.trials = pick.trials_used;
        return out;
    }
    if (metric == "op") {
        if (method == EvalMethod::Asymptotic) return op_asymptotic(rc.scenario, rc.secrecy);
        return op_metric(rc.scenario, rc.secrecy, method);
    }
    if (metric == "sop") return sop_metric(rc.scenario, rc.secrecy, method);
    if (metric == "pnsc") return pnsc_metric(rc.scenario, rc.secrecy, method);
    return asr_metric(rc.scenario, rc.secrecy, method);
}

}  // namespace

bool ResultRow::is_na() const { return std::isnan(value); }

std::vector<ResultRow> run_sweep(const SweepSpec& spec, const RunConfig& base,
                                 const SweepOptions& opts) {
    spec.validate();
    struct Task {
        std::size_t row_index;
        double value;
        std::string method;
    };
    std::vector<Task> tasks;
    std::vector<ResultRow> rows;
    for (double v : spec.values)
        for (const auto& m : spec.methods) {
            tasks.push_back({rows.size(), v, m});
            ResultRow r;
            r.swept_value = v;
            r.metric = spec.metric;
            r.method = m;
            r.value = std::numeric_limits<double>::quiet_NaN();
            rows.push_back(r);
        }

    const int workers = std::min<long>(effective_workers(opts.workers), (long)tasks.size());
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            const Task& t = tasks[i];
            ResultRow& row = rows[t.row_index];
            const auto t0 = std::chrono::steady_clock::now();
            try {
                const RunConfig rc = apply_parameter(base, spec.parameter, t.value);
                const MetricResult res = eval_point(rc, spec.metric, method_from(t.method));
                row.value = res.value;
                row.stderr_ = res.error_estimate;
                if (res.fallback) row.flags = "fallback_empirical";
            } catch (const std::exception& e) {
                row.flags = std::string("NA:") + e.what();
            }
            if (opts.collect_timings) {
                const auto t1 = std::chrono::steady_clock::now();
                row.wall_ms =
                    std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    return rows;
}

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
    std::string out = "swept_value,metric,method,value,stderr,wall_ms,flags\n";
    char buf[256];
    for (const auto& r : rows) {
        if (r.is_na())
            std::snprintf(buf, sizeof buf, "%.12g,%s,%s,NA,NA,%ld,", r.swept_value,
                          r.metric.c_str(), r.method.c_str(), r.wall_ms);
        else
            std::snprintf(buf, sizeof buf, "%.12g,%s,%s,%.12g,%.12g,%ld,", r.swept_value,
                          r.metric.c_str(), r.method.c_str(), r.value, r.stderr_, r.wall_ms);
        out += buf;
        // sanitize commas/newlines out of the flag text
        std::string flag = r.flags;
        for (char& c : flag)
            if (c == ',' || c == '\n') c = ';';
        out += flag;
        out += '\n';
    }
    return out;
}

void write_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + tmp);
        out << content;
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw ConfigError("cannot rename " + tmp + " to " + path);
}

std::string rows_to_svg(const std::vector<ResultRow>& rows, const std::string& title) {
    const int width = 720, height = 480, pad = 60;
    std::map<std::string, std::vector<std::pair<double, double>>> series;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& r : rows) {
        if (r.is_na()) continue;
        series[r.method].push_back({r.swept_value, r.value});
        xmin = std::min(xmin, r.swept_value);
        xmax = std::max(xmax, r.swept_value);
        ymin = std::min(ymin, r.value);
        ymax = std::max(ymax, r.value);
    }
    if (series.empty() || xmax <= xmin) {
        xmin = 0;
        xmax = 1;
    }
    if (ymax <= ymin) {
        ymin = 0;
        ymax = std::max(1.0, ymax * 1.1);
    }
    auto xm = [&](double x) { return pad + (x - xmin) / (xmax - xmin) * (width - 2 * pad); };
    auto ym = [&](double y) {
        return height - pad - (y - ymin) / (ymax - ymin) * (height - 2 * pad);
    };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    char buf[512];
    std::string svg;
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\">\n"
                  "<rect width=\"100%%\" height=\"100%%\" fill=\"white\"/>\n"
                  "<text x=\"%d\" y=\"24\" font-size=\"16\">%s</text>\n",
                  width, height, pad, title.c_str());
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n"
                  "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n",
                  pad, height - pad, width - pad, height - pad, pad, pad, pad, height - pad);
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%d\" font-size=\"12\">%.4g</text>"
                  "<text x=\"%d\" y=\"%d\" font-size=\"12\">%.4g</text>"
                  "<text x=\"%d\" y=\"%d\" font-size=\"12\">%.4g</text>"
                  "<text x=\"%d\" y=\"%d\" font-size=\"12\">%.4g</text>\n",
                  pad, height - pad + 16, xmin, width - pad - 20, height - pad + 16, xmax,
                  8, height - pad, ymin, 8, pad + 8, ymax);
    svg += buf;
    int ci = 0;
    for (auto& [name, pts] : series) {
        std::sort(pts.begin(), pts.end());
        std::string poly;
        for (const auto& [x, y] : pts) {
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", xm(x), ym(y));
            poly += buf;
        }
        const char* color = colors[ci % 4];
        std::snprintf(buf, sizeof buf,
                      "<polyline fill=\"none\" stroke=\"%s\" stroke-width=\"1.5\" "
                      "points=\"%s\"/>\n"
                      "<text x=\"%d\" y=\"%d\" font-size=\"12\" fill=\"%s\">%s</text>\n",
                      color, poly.c_str(), width - pad - 110, pad + 16 * (ci + 1), color,
                      name.c_str());
        svg += buf;
        ++ci;
    }
    svg += "</svg>\n";
    return svg;
}

std::vector<ValidatePoint> validate_config(const RunConfig& rc, long trials) {
    std::vector<ValidatePoint> out;
    RunConfig local = rc;
    local.mc.trials = std::max(1000L, trials);
    const McAllEstimates mc = estimate_all(local.scenario, local.secrecy, local.mc);

    auto add = [&](const std::string& what, double analytic, const McEstimate& est, double floor_) {
        ValidatePoint p;
        p.what = what;
        p.analytic = analytic;
        p.mc = est.mean;
        p.tol = std::max(floor_, 3.0 * est.stderr_);
        p.pass = std::abs(analytic - est.mean) <= p.tol;
        out.push_back(p);
    };

    add("op(approx)", op_metric(local.scenario, local.secrecy, EvalMethod::Approx).value, mc.op,
        0.005);
    add("sop(semi-analytic)", sop_metric(local.scenario, local.secrecy, EvalMethod::Approx).value,
        mc.sop, 0.01);
    add("pnsc(semi-analytic)",
        pnsc_metric(local.scenario, local.secrecy, EvalMethod::Approx).value, mc.pnsc, 0.01);
    const double asr = asr_metric(local.scenario, local.secrecy, EvalMethod::Approx).value;
    ValidatePoint pa;
    pa.what = "asr(semi-analytic)";
    pa.analytic = asr;
    pa.mc = mc.asr.mean;
    pa.tol = std::max({0.01, 0.05 * std::abs(mc.asr.mean), 3.0 * mc.asr.stderr_});
    pa.pass = std::abs(asr - mc.asr.mean) <= pa.tol;
    out.push_back(pa);
    return out;
}

std::vector<ResultRow> reproduce_figure(const std::string& name, const RunConfig& base,
                                        std::vector<std::string>& failures,
                                        const SweepOptions& opts) {
    auto column = [](const std::vector<ResultRow>& rows, const std::string& method) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& r : rows)
            if (r.method == method && !r.is_na()) pts.push_back({r.swept_value, r.value});
        std::sort(pts.begin(), pts.end());
        return pts;
    };
    auto assert_mono = [&](const std::vector<std::pair<double, double>>& pts, bool decreasing,
                           const std::string& what, double slack) {
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            const double d = pts[i + 1].second - pts[i].second;
            if ((decreasing && d > slack) || (!decreasing && d < -slack)) {
                char buf[160];
                std::snprintf(buf, sizeof buf, "%s not monotone at x=%.6g (delta=%.3g)",
                              what.c_str(), pts[i + 1].first, d);
                failures.push_back(buf);
                return;
            }
        }
    };

    std::vector<ResultRow> all;
    auto run_cfg = [&](RunConfig rc, const SweepSpec& spec, const std::string& tag) {
        auto rows = run_sweep(spec, rc, opts);
        for (auto& r : rows) r.method = tag + ":" + r.method;
        all.insert(all.end(), rows.begin(), rows.end());
        return rows;
    };

    if (name == "fig3") {
        // OP vs transmit power; non-RIS at alpha2 in {2.5, 3}, RIS at L in {16, 36}.
        SweepSpec spec;
        spec.parameter = "p_un_db";
        spec.values = {0, 5, 10, 15, 20, 25, 30};
        spec.metric = "op";
        spec.methods = {"approx", "mc"};
        RunConfig s1 = base;
        s1.scenario.scenario = Scenario::NoRis;
        for (double a2 : {2.5, 3.0}) {
            RunConfig rc = s1;
            rc.scenario.path_loss.alpha2 = a2;
            const std::string tag = a2 == 2.5 ? "noris_a2.5" : "noris_a3";
            auto rows = run_cfg(rc, spec, tag);
            assert_mono(column(rows, tag + ":approx"), true, "fig3 " + tag, 1e-9);
        }
        for (int l : {16, 36}) {
            RunConfig rc = base;
            rc.scenario.scenario = Scenario::Ris;
            rc.scenario.path_loss.alpha2 = 3.0;
            const FisherFParams u = rc.scenario.fading_user.front();
            const FisherFParams e = rc.scenario.fading_eve.front();
            const FisherFParams b = rc.scenario.fading_bs_ris.front();
            rc.scenario.l_elements = l;
            rc.scenario.fill_tables(u, e, b);
            const std::string tag = "ris_l" + std::to_string(l);
            auto rows = run_cfg(rc, spec, tag);
            assert_mono(column(rows, tag + ":approx"), true, "fig3 " + tag, 1e-9);
        }
        // RIS with L=36 no worse than non-RIS (alpha2=3) at p >= 20 dB.
        const auto ris = column(all, "ris_l36:approx");
        const auto nor = column(all, "noris_a3:approx");
        for (std::size_t i = 0; i < ris.size() && i < nor.size(); ++i)
            if (ris[i].first >= 20.0 && ris[i].second > nor[i].second + 1e-6)
                failures.push_back("fig3: RIS L=36 OP above non-RIS at p=" +
                                   std::to_string(ris[i].first));
        return all;
    }
    if (name == "fig4") {
        // OP vs number of RIS elements at p = 25 dB; crossover for alpha2=2.5.
        SweepSpec spec;
        spec.parameter = "l";
        spec.values = {4, 9, 16, 25, 36, 49, 64};
        spec.metric = "op";
        spec.methods = {"approx"};
        for (double a2 : {2.5, 3.0}) {
            RunConfig rc = base;
            rc.scenario.scenario = Scenario::Ris;
            rc.scenario.path_loss.alpha2 = a2;
            rc.scenario.p_un = db_to_linear(25.0);
            const std::string tag = a2 == 2.5 ? "ris_a2.5" : "ris_a3";
            auto rows = run_cfg(rc, spec, tag);
            assert_mono(column(rows, tag + ":approx"), true, "fig4 " + tag, 1e-9);

            RunConfig s1 = rc;
            s1.scenario.scenario = Scenario::NoRis;
            SweepSpec one;
            one.parameter = "p_un_db";
            one.values = {25.0};
            one.metric = "op";
            one.methods = {"approx"};
            auto base_rows = run_cfg(s1, one, tag == "ris_a2.5" ? "noris_a2.5" : "noris_a3");
        }
        const auto ris25 = column(all, "ris_a2.5:approx");
        const auto flat25 = column(all, "noris_a2.5:approx");
        if (!ris25.empty() && !flat25.empty()) {
            const double op_flat = flat25.front().second;
            const bool worse_small = ris25.front().second > op_flat;
            const bool better_large = ris25.back().second < op_flat;
            if (!worse_small)
                failures.push_back("fig4: expected small-L RIS OP above non-RIS at alpha2=2.5");
            if (!better_large)
                failures.push_back("fig4: expected large-L RIS OP below non-RIS at alpha2=2.5");
        }
        return all;
    }
    if (name == "fig5" || name == "fig6" || name == "fig7") {
        // SOP / PNSC / ASR vs transmit power (R_t=1, K=4, M=2, alpha2=3).
        SweepSpec spec;
        spec.parameter = "p_un_db";
        spec.values = {0, 5, 10, 15, 20, 25, 30};
        spec.metric = name == "fig5" ? "sop" : (name == "fig6" ? "pnsc" : "asr");
        spec.methods = {"approx", "mc"};
        RunConfig rc0 = base;
        rc0.scenario.path_loss.alpha2 = 3.0;
        rc0.secrecy.r_t = 1.0;
        if (name == "fig7") {
            for (int l : {16, 36}) {
                RunConfig rc = rc0;
                rc.scenario.scenario = Scenario::Ris;
                const FisherFParams u = rc.scenario.fading_user.front();
                const FisherFParams e = rc.scenario.fading_eve.front();
                const FisherFParams b = rc.scenario.fading_bs_ris.front();
                rc.scenario.l_elements = l;
                rc.scenario.fill_tables(u, e, b);
                auto rows = run_cfg(rc, spec, "ris_l" + std::to_string(l));
                assert_mono(column(rows, "ris_l" + std::to_string(l) + ":approx"), false,
                            "fig7 asr", 1e-9);
            }
            RunConfig rc = rc0;
            rc.scenario.scenario = Scenario::NoRis;
            run_cfg(rc, spec, "noris");
            const auto l16 = column(all, "ris_l16:approx");
            const auto l36 = column(all, "ris_l36:approx");
            if (!l16.empty() && !l36.empty() && l36.back().second + 1e-9 < l16.back().second)
                failures.push_back("fig7: ASR should grow with L at high power");
            return all;
        }
        for (double th : {30.0, 60.0, 90.0}) {
            RunConfig rc = rc0;
            rc.scenario.scenario = Scenario::NoRis;
            rc.scenario.pattern_user.theta_c = th;
            rc.scenario.pattern_eve.theta_c = th;
            char tag[32];
            std::snprintf(tag, sizeof tag, "theta%.0f", th);
            auto rows = run_cfg(rc, spec, tag);
            if (name == "fig5")
                assert_mono(column(rows, std::string(tag) + ":approx"), true, "fig5 sop", 1e-9);
        }
        if (name == "fig6") {
            // PNSC decreases as theta_c grows (eavesdropper main lobe more likely).
            const auto t30 = column(all, "theta30:approx");
            const auto t90 = column(all, "theta90:approx");
            for (std::size_t i = 0; i < t30.size() && i < t90.size(); ++i)
                if (t90[i].second > t30[i].second + 1e-6) {
                    failures.push_back("fig6: PNSC should decrease as theta_c increases");
                    break;
                }
        }
        return all;
    }
    throw ConfigError("unknown figure recipe '" + name + "' (expected fig3..fig7)");
}

}  // namespace rispls
