#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rispls/config_io.hpp"

namespace rispls {

struct ResultRow {
    double swept_value = 0.0;
    std::string metric;
    std::string method;
    double value = 0.0;        // NaN when the method failed at this point
    double stderr_ = 0.0;      // MC only
    long wall_ms = 0;          // 0 unless timing collection is enabled
    std::string flags;         // "" or diagnostic note (NA reason, fallback)

    bool is_na() const;
};

struct SweepOptions {
    bool collect_timings = false;  // keeps the CSV byte-identical when off
    int workers = 0;               // sweep-point pool; 0 = RIS_PLS_THREADS/auto
};

/// One row per (swept value, method). Per-point failures are recorded as NA
/// rows and the sweep continues.
std::vector<ResultRow> run_sweep(const SweepSpec& spec, const RunConfig& base,
                                 const SweepOptions& opts = {});

std::string rows_to_csv(const std::vector<ResultRow>& rows);
void write_atomic(const std::string& path, const std::string& content);

/// Minimal SVG line plot of value-vs-swept_value, one polyline per method.
std::string rows_to_svg(const std::vector<ResultRow>& rows, const std::string& title);

/// Analytic-vs-Monte-Carlo comparison over a small configuration grid.
/// Returns true when every comparison is inside its tolerance.
struct ValidatePoint {
    std::string what;
    double analytic = 0.0, mc = 0.0, tol = 0.0;
    bool pass = false;
};
std::vector<ValidatePoint> validate_config(const RunConfig& rc, long trials);

/// Figure recipes: fig3..fig7 sweeps with their qualitative assertions.
/// Returns the rows; failed assertions are reported in `failures`.
std::vector<ResultRow> reproduce_figure(const std::string& name, const RunConfig& base,
                                        std::vector<std::string>& failures,
                                        const SweepOptions& opts = {});

}  // namespace rispls
