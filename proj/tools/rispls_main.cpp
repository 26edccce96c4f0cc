// rispls: physical-layer-security metrics for RIS-aided MIMO downlinks.
//
// Subcommands:
//   eval       one metric on one config (analytic and/or Monte-Carlo)
//   sweep      run a SweepSpec file, write CSV (and optional SVG)
//   validate   analytic-vs-Monte-Carlo report; nonzero exit on breach
//   reproduce  fig3..fig7 sweep recipes with qualitative assertions

#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "rispls/sweep.hpp"

using namespace rispls;

namespace {

int count_na(const std::vector<ResultRow>& rows) {
    int na = 0;
    for (const auto& r : rows) na += r.is_na() ? 1 : 0;
    return na;
}

int rows_exit_code(const std::vector<ResultRow>& rows) {
    const int na = count_na(rows);
    if (na == 0) return 0;
    return na == (int)rows.size() ? 3 : 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"physical-layer-security metrics for RIS-aided MIMO downlinks"};
    app.require_subcommand(1);

    std::string config_path, out_path, sweep_path, metric = "op", methods_csv = "approx,mc";
    std::string figure;
    long trials = 0;
    unsigned long long seed = 0;
    bool have_seed = false, svg = false, timings = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "config file (TOML); omitted = paper defaults");
        cmd->add_option("--seed", seed, "Monte-Carlo master seed")->each([&](std::string) {
            have_seed = true;
        });
        cmd->add_option("--trials", trials, "Monte-Carlo trials override");
        cmd->add_option("--out", out_path, "output CSV path");
        cmd->add_flag("--svg", svg, "also write an SVG plot next to the CSV");
        cmd->add_flag("--timings", timings, "record wall_ms per row (breaks byte-identical reruns)");
    };

    CLI::App* eval = app.add_subcommand("eval", "evaluate one metric on one config");
    add_common(eval);
    eval->add_option("--metric", metric, "op|sop|pnsc|asr");
    eval->add_option("--method", methods_csv, "comma list of exact|approx|asymptotic|mc");

    CLI::App* sweep = app.add_subcommand("sweep", "run a sweep spec");
    add_common(sweep);
    sweep->add_option("spec", sweep_path, "sweep spec file")->required();

    CLI::App* validate = app.add_subcommand("validate", "analytic-vs-MC tolerance report");
    add_common(validate);

    CLI::App* repro = app.add_subcommand("reproduce", "figure sweep recipes");
    add_common(repro);
    repro->add_option("figure", figure, "fig3|fig4|fig5|fig6|fig7")->required();

    CLI11_PARSE(app, argc, argv);

    RunConfig rc;
    try {
        rc = load_config(config_path);
        if (have_seed) rc.mc.master_seed = seed;
        if (trials > 0) rc.mc.trials = trials;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (app.got_subcommand(eval)) {
            SweepSpec spec;
            spec.metric = metric;
            spec.parameter = "p_un_db";
            spec.values = {10.0 * std::log10(rc.scenario.p_un)};
            spec.methods.clear();
            std::stringstream ss(methods_csv);
            std::string tok;
            while (std::getline(ss, tok, ',')) spec.methods.push_back(tok);
            SweepOptions opts;
            opts.collect_timings = timings;
            const auto rows = run_sweep(spec, rc, opts);
            const std::string csv = rows_to_csv(rows);
            if (!out_path.empty())
                write_atomic(out_path, csv);
            else
                std::cout << csv;
            for (const auto& r : rows)
                if (r.is_na()) std::cerr << "point failed: " << r.flags << "\n";
            return rows_exit_code(rows);
        }
        if (app.got_subcommand(sweep)) {
            const SweepSpec spec = load_sweep_spec(sweep_path);
            SweepOptions opts;
            opts.collect_timings = timings;
            const auto rows = run_sweep(spec, rc, opts);
            const std::string csv = rows_to_csv(rows);
            if (!out_path.empty()) {
                write_atomic(out_path, csv);
                if (svg)
                    write_atomic(out_path + ".svg",
                                 rows_to_svg(rows, spec.metric + " vs " + spec.parameter));
            } else {
                std::cout << csv;
            }
            return rows_exit_code(rows);
        }
        if (app.got_subcommand(validate)) {
            const long t = trials > 0 ? trials : 200000;
            const auto points = validate_config(rc, t);
            bool all_pass = true;
            for (const auto& p : points) {
                std::printf("%-22s analytic=%.6g mc=%.6g tol=%.3g %s\n", p.what.c_str(),
                            p.analytic, p.mc, p.tol, p.pass ? "PASS" : "FAIL");
                all_pass = all_pass && p.pass;
            }
            return all_pass ? 0 : 3;
        }
        if (app.got_subcommand(repro)) {
            std::vector<std::string> failures;
            SweepOptions opts;
            opts.collect_timings = timings;
            const auto rows = reproduce_figure(figure, rc, failures, opts);
            const std::string csv = rows_to_csv(rows);
            if (!out_path.empty()) {
                write_atomic(out_path, csv);
                if (svg) write_atomic(out_path + ".svg", rows_to_svg(rows, figure));
            } else {
                std::cout << csv;
            }
            for (const auto& f : failures) std::cerr << "assertion failed: " << f << "\n";
            if (!failures.empty()) return 3;
            return rows_exit_code(rows);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
