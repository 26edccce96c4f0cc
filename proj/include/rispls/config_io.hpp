#pragma once

#include <map>
#include <string>
#include <vector>

#include "rispls/analytic.hpp"
#include "rispls/montecarlo.hpp"

namespace rispls {

/// Bundle produced by configuration ingestion. dB fields from the file are
/// converted to linear once, here; everything downstream is linear.
struct RunConfig {
    ScenarioConfig scenario;
    SecrecyParams secrecy;
    McConfig mc;
};

/// Parses the key-value config text (TOML-style sections, numbers, strings,
/// booleans and flat numeric arrays). Unknown keys are rejected. An empty
/// document yields the built-in defaults.
RunConfig parse_config(const std::string& text);

/// Loads a config file; empty or missing-path ("") gives the defaults.
RunConfig load_config(const std::string& path);

/// Serializes a RunConfig in the same schema (dB fields re-derived).
std::string emit_config(const RunConfig& rc);

struct SweepSpec {
    std::string parameter = "p_un_db";  // p_un_db | l | theta_c | z_th_db | r_t | gamma_bar_db
    std::vector<double> values;
    std::string metric = "op";          // op | sop | pnsc | asr
    std::vector<std::string> methods = {"approx", "mc"};  // exact|approx|asymptotic|mc

    void validate() const;
};

SweepSpec parse_sweep_spec(const std::string& text);
SweepSpec load_sweep_spec(const std::string& path);

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rispls
