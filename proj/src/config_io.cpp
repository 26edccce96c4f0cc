#include "rispls/config_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace rispls {

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

struct Value {
    std::string raw;
    int line = 0;
    bool used = false;
};

struct KvDoc {
    std::map<std::string, Value> entries;  // "section.key" -> value

    bool has(const std::string& key) const { return entries.count(key) != 0; }

    double number(const std::string& key, double fallback) {
        auto it = entries.find(key);
        if (it == entries.end()) return fallback;
        it->second.used = true;
        try {
            std::size_t pos = 0;
            const double v = std::stod(it->second.raw, &pos);
            while (pos < it->second.raw.size() && std::isspace((unsigned char)it->second.raw[pos]))
                ++pos;
            if (pos != it->second.raw.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("line " + std::to_string(it->second.line) + ": key '" + key +
                              "' expects a number, got '" + it->second.raw + "'");
        }
    }

    long integer(const std::string& key, long fallback) {
        const double v = number(key, (double)fallback);
        if (v != std::floor(v))
            throw ConfigError("key '" + key + "' expects an integer");
        return (long)v;
    }

    std::string text(const std::string& key, const std::string& fallback) {
        auto it = entries.find(key);
        if (it == entries.end()) return fallback;
        it->second.used = true;
        std::string s = it->second.raw;
        if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
            s = s.substr(1, s.size() - 2);
        return s;
    }

    std::vector<double> number_list(const std::string& key) {
        auto it = entries.find(key);
        if (it == entries.end()) return {};
        it->second.used = true;
        std::string s = it->second.raw;
        if (s.empty() || s.front() != '[' || s.back() != ']')
            throw ConfigError("key '" + key + "' expects an array [..]");
        s = s.substr(1, s.size() - 2);
        std::vector<double> out;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                out.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw ConfigError("key '" + key + "': bad array element '" + tok + "'");
            }
        }
        return out;
    }

    std::vector<std::string> string_list(const std::string& key) {
        auto it = entries.find(key);
        if (it == entries.end()) return {};
        it->second.used = true;
        std::string s = it->second.raw;
        if (s.empty() || s.front() != '[' || s.back() != ']')
            throw ConfigError("key '" + key + "' expects an array [..]");
        s = s.substr(1, s.size() - 2);
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            std::string t;
            for (char c : tok)
                if (!std::isspace((unsigned char)c) && c != '"') t += c;
            if (!t.empty()) out.push_back(t);
        }
        return out;
    }

    void reject_unused() const {
        for (const auto& [key, value] : entries)
            if (!value.used)
                throw ConfigError("line " + std::to_string(value.line) + ": unknown key '" + key +
                                  "'");
    }
};

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace((unsigned char)s[a])) ++a;
    while (b > a && std::isspace((unsigned char)s[b - 1])) --b;
    return s.substr(a, b - a);
}

KvDoc parse_kv(const std::string& text) {
    KvDoc doc;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // strip comments outside quotes
        bool quoted = false;
        std::string body;
        for (char c : line) {
            if (c == '"') quoted = !quoted;
            if (c == '#' && !quoted) break;
            body += c;
        }
        body = trim(body);
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            section = trim(body.substr(1, body.size() - 2));
            if (section.empty())
                throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(body.substr(0, eq));
        const std::string val = trim(body.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
        const std::string full = section.empty() ? key : section + "." + key;
        if (doc.entries.count(full))
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + full + "'");
        doc.entries[full] = {val, lineno, false};
    }
    return doc;
}

FisherFParams read_fading(KvDoc& doc, const std::string& section, const FisherFParams& def,
                          double def_gbar_db) {
    FisherFParams p;
    p.m = doc.number(section + ".m", def.m);
    p.m_s = doc.number(section + ".m_s", def.m_s);
    p.gamma_bar = db_to_linear(doc.number(section + ".gamma_bar_db", def_gbar_db));
    try {
        p.validate();
    } catch (const FadingError& e) {
        throw ConfigError(std::string("[") + section + "]: " + e.what());
    }
    return p;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    KvDoc doc = parse_kv(text);
    RunConfig rc;
    ScenarioConfig& cfg = rc.scenario;

    const std::string scen = doc.text("system.scenario", "no_ris");
    if (scen == "no_ris")
        cfg.scenario = Scenario::NoRis;
    else if (scen == "ris")
        cfg.scenario = Scenario::Ris;
    else if (scen == "ris_direct")
        cfg.scenario = Scenario::RisWithDirect;
    else
        throw ConfigError("system.scenario must be no_ris, ris or ris_direct");

    cfg.k_antennas = (int)doc.integer("system.k", 4);
    cfg.m_antennas = (int)doc.integer("system.m", 2);
    cfg.l_elements = (int)doc.integer("system.l", 16);
    cfg.beta_max = doc.number("system.beta_max", 1.0);
    cfg.sigma_n_sq = db_to_linear(doc.number("system.sigma_n_db", 0.0));
    cfg.p_un = db_to_linear(doc.number("system.p_un_db", 20.0));
    const double g_main = db_to_linear(doc.number("system.g_main_db", 30.0));
    const double g_side = db_to_linear(doc.number("system.g_side_db", -10.0));
    const double theta_c = doc.number("system.theta_c", 30.0);
    cfg.pattern_user = {g_main, g_side, theta_c};
    cfg.pattern_eve = {g_main, g_side, theta_c};

    cfg.geometry.r0 = doc.number("geometry.r0", 1.0);
    cfg.geometry.r1 = doc.number("geometry.r1", 300.0);
    cfg.geometry.r2 = doc.number("geometry.r2", 400.0);
    cfg.geometry.d_uR = doc.number("geometry.d_ur", 30.0);
    cfg.geometry.density_lambda = doc.number("geometry.density_lambda", 1e-4);
    cfg.blockage.b1 = doc.number("geometry.b1", 0.3);
    cfg.path_loss.alpha1 = doc.number("geometry.alpha1", 2.0);
    cfg.path_loss.alpha2 = doc.number("geometry.alpha2", 3.0);
    cfg.path_loss.c_l1 = db_to_linear(doc.number("geometry.c_l1_db", 3.0));
    cfg.path_loss.c_l2 = db_to_linear(doc.number("geometry.c_l2_db", 3.0));

    const FisherFParams user = read_fading(doc, "fading.user", {5.0, 5.0, 0.1}, -10.0);
    const FisherFParams eve = read_fading(doc, "fading.eve", {3.0, 3.0, 0.1}, -10.0);
    const FisherFParams bs_ris = read_fading(doc, "fading.bs_ris", {5.0, 5.0, 1.0}, 0.0);
    cfg.fill_tables(user, eve, bs_ris);

    rc.secrecy.r_t = doc.number("secrecy.r_t", 1.0);
    rc.secrecy.z_th = db_to_linear(doc.number("secrecy.z_th_db", 0.0));
    rc.secrecy.e_reg = doc.number("secrecy.e_reg", 1e-6);
    rc.secrecy.r_s_pnsc = doc.number("secrecy.r_s_pnsc", 1.0);

    rc.mc.trials = doc.integer("mc.trials", 1000000);
    rc.mc.master_seed = (std::uint64_t)doc.integer("mc.master_seed", 1);
    rc.mc.batch_size = doc.integer("mc.batch_size", 8192);
    rc.mc.workers = (int)doc.integer("mc.workers", 0);

    doc.reject_unused();
    try {
        cfg.validate();
        rc.secrecy.validate();
        rc.mc.validate();
    } catch (const std::runtime_error& e) {
        throw ConfigError(e.what());
    }
    return rc;
}

RunConfig load_config(const std::string& path) {
    if (path.empty()) return parse_config("");
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string emit_config(const RunConfig& rc) {
    const ScenarioConfig& cfg = rc.scenario;
    char buf[8192];
    const char* scen = cfg.scenario == Scenario::NoRis
                           ? "no_ris"
                           : (cfg.scenario == Scenario::Ris ? "ris" : "ris_direct");
    std::snprintf(
        buf, sizeof buf,
        "[system]\n"
        "scenario = \"%s\"\nk = %d\nm = %d\nl = %d\nbeta_max = %.17g\n"
        "sigma_n_db = %.17g\np_un_db = %.17g\ng_main_db = %.17g\ng_side_db = %.17g\n"
        "theta_c = %.17g\n\n"
        "[geometry]\n"
        "r0 = %.17g\nr1 = %.17g\nr2 = %.17g\nd_ur = %.17g\ndensity_lambda = %.17g\n"
        "b1 = %.17g\nalpha1 = %.17g\nalpha2 = %.17g\nc_l1_db = %.17g\nc_l2_db = %.17g\n\n"
        "[fading.user]\nm = %.17g\nm_s = %.17g\ngamma_bar_db = %.17g\n\n"
        "[fading.eve]\nm = %.17g\nm_s = %.17g\ngamma_bar_db = %.17g\n\n"
        "[fading.bs_ris]\nm = %.17g\nm_s = %.17g\ngamma_bar_db = %.17g\n\n"
        "[secrecy]\nr_t = %.17g\nz_th_db = %.17g\ne_reg = %.17g\nr_s_pnsc = %.17g\n\n"
        "[mc]\ntrials = %ld\nmaster_seed = %llu\nbatch_size = %ld\nworkers = %d\n",
        scen, cfg.k_antennas, cfg.m_antennas, cfg.l_elements, cfg.beta_max,
        linear_to_db(cfg.sigma_n_sq), linear_to_db(cfg.p_un),
        linear_to_db(cfg.pattern_user.g_main), linear_to_db(cfg.pattern_user.g_side),
        cfg.pattern_user.theta_c, cfg.geometry.r0, cfg.geometry.r1, cfg.geometry.r2,
        cfg.geometry.d_uR, cfg.geometry.density_lambda, cfg.blockage.b1, cfg.path_loss.alpha1,
        cfg.path_loss.alpha2, linear_to_db(cfg.path_loss.c_l1), linear_to_db(cfg.path_loss.c_l2),
        cfg.fading_user.front().m, cfg.fading_user.front().m_s,
        linear_to_db(cfg.fading_user.front().gamma_bar), cfg.fading_eve.front().m,
        cfg.fading_eve.front().m_s, linear_to_db(cfg.fading_eve.front().gamma_bar),
        cfg.fading_bs_ris.front().m, cfg.fading_bs_ris.front().m_s,
        linear_to_db(cfg.fading_bs_ris.front().gamma_bar), rc.secrecy.r_t,
        linear_to_db(rc.secrecy.z_th), rc.secrecy.e_reg, rc.secrecy.r_s_pnsc, rc.mc.trials,
        (unsigned long long)rc.mc.master_seed, rc.mc.batch_size, rc.mc.workers);
    return std::string(buf);
}

void SweepSpec::validate() const {
    if (values.empty()) throw ConfigError("sweep: values must be non-empty");
    if (metric != "op" && metric != "sop" && metric != "pnsc" && metric != "asr")
        throw ConfigError("sweep: metric must be op, sop, pnsc or asr");
    if (methods.empty()) throw ConfigError("sweep: methods must be non-empty");
    for (const auto& m : methods) {
        if (m != "exact" && m != "approx" && m != "asymptotic" && m != "mc")
            throw ConfigError("sweep: unknown method '" + m + "'");
        if (m == "asymptotic" && metric != "op")
            throw ConfigError("sweep: asymptotic method applies to op only");
        if (m == "exact" && metric != "op")
            throw ConfigError("sweep: exact method applies to op only; secrecy metrics use the "
                              "semi-analytic path (approx)");
    }
    static const char* params[] = {"p_un_db", "l", "theta_c", "z_th_db", "r_t", "gamma_bar_db"};
    bool ok = false;
    for (const char* p : params) ok = ok || parameter == p;
    if (!ok) throw ConfigError("sweep: unknown parameter '" + parameter + "'");
}

SweepSpec parse_sweep_spec(const std::string& text) {
    KvDoc doc = parse_kv(text);
    SweepSpec spec;
    spec.parameter = doc.text("sweep.parameter", spec.parameter);
    spec.values = doc.number_list("sweep.values");
    spec.metric = doc.text("sweep.metric", spec.metric);
    const auto methods = doc.string_list("sweep.methods");
    if (!methods.empty()) spec.methods = methods;
    doc.reject_unused();
    spec.validate();
    return spec;
}

SweepSpec load_sweep_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open sweep file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_sweep_spec(ss.str());
}

}  // namespace rispls
