#include "stopmax/cli.hpp"

#include <cmath>
#include <cstdio>
#include <memory>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "stopmax/mc_lab.hpp"
#include "stopmax/value_engine.hpp"

namespace stopmax {

namespace {

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

BoundaryTable obtain_table(const RunConfig& cfg) {
    if (!cfg.table_path.empty()) return load_table(cfg.table_path, cfg.spec);
    BoundaryTable t = solve_boundaries(cfg.spec, cfg.solver);
    return t;
}

std::string table_summary(const BoundaryTable& t, const DefectReport& d) {
    std::string s = "t_star=" + fmt("%.12g", t.t_star);
    if (t.z_star) s += " z_star=" + fmt("%.12g", *t.z_star);
    s += " max_defect=" + fmt("%.3g", d.max_defect);
    s += " monotonicity_violations=" + std::to_string(t.violations.size());
    return s;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return v;
}

std::vector<int> parse_factors(const std::string& s) {
    std::vector<int> f;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            f.push_back(std::stoi(item, &used));
            if (used != item.size()) throw ConfigError("");
        } catch (const std::exception&) {
            throw ConfigError("factors: expected comma-separated integers, got '" + s + "'");
        }
    }
    if (f.empty()) throw ConfigError("factors: empty list");
    return f;
}

std::string run_solve(const RunConfig& cfg) {
    const BoundaryTable t = solve_boundaries(cfg.spec, cfg.solver);
    const DefectReport d = volterra_defect(t);
    if (d.max_defect > 10.0 * cfg.solver.root_tol)
        throw ToleranceError("boundary equation defect " + fmt("%.3g", d.max_defect) + " exceeds 10 root_tol");
    return make_artifact(cfg, boundary_csv(t), table_summary(t, d));
}

std::string run_value(const RunConfig& cfg) {
    const BoundaryTable t = obtain_table(cfg);
    const double T = cfg.spec.horizon;
    const double x_max = cfg.value_x_max > 0.0 ? cfg.value_x_max : 3.0 * std::sqrt(T);
    const auto times = linspace(0.0, T, cfg.value_times);
    const auto levels = linspace(0.0, x_max, cfg.value_levels);
    return make_artifact(cfg, value_surface_csv(cfg.spec, t, times, levels));
}

std::string run_simulate(const RunConfig& cfg) {
    auto t = std::make_shared<const BoundaryTable>(obtain_table(cfg));
    const PathBatch batch = simulate(cfg.spec, cfg.resolved_dt(), cfg.mc.n_paths, cfg.mc.seed);
    const auto rivals = default_rivals(t);
    const auto rows = regret_scan(t, rivals, batch, cfg.workers);
    int beaten = 0;
    for (const auto& r : rows) beaten += r.beats_band ? 1 : 0;
    const std::string summary = "value_at_0_0=" + fmt("%.12g", value_at(cfg.spec, *t, 0.0, 0.0).v) +
                                " rivals_beating_band=" + std::to_string(beaten);
    return make_artifact(cfg, regret_csv(rows, batch), summary);
}

std::string run_diagnose(const RunConfig& cfg) {
    const BoundaryTable t = obtain_table(cfg);
    const double T = cfg.spec.horizon;
    const double x_max = cfg.value_x_max > 0.0 ? cfg.value_x_max : 3.0 * std::sqrt(T);
    std::vector<double> times;
    for (int i = 1; i <= 9; ++i) times.push_back(0.1 * i * T);
    const auto levels = linspace(0.0, x_max, cfg.value_levels);
    return make_artifact(cfg, diagnostics_csv(diagnostics(cfg.spec, t, times, levels)));
}

std::string run_oracle(const RunConfig& cfg) {
    const BoundaryTable t = obtain_table(cfg);
    if (cfg.dp.n_steps % cfg.solver.n_steps != 0)
        throw ConfigError("dp-steps must be a multiple of steps so the time grids align");
    const DpResult dp = solve_dp(cfg.spec, cfg.dp);
    const int ratio = cfg.dp.n_steps / cfg.solver.n_steps;
    std::string body = "t,b1,b2,dp_b1,dp_b2\n";
    double worst = 0.0;
    char buf[200];
    for (std::size_t k = 0; k < t.size(); ++k) {
        const std::size_t kd = k * static_cast<std::size_t>(ratio);
        auto cell = [](double v) { return std::isnan(v) ? std::string() : fmt("%.12g", v); };
        std::snprintf(buf, sizeof buf, "%.12g,%s,%s,%s,%s\n", t.times[k], cell(t.has_band(k) ? t.b1[k] : NAN).c_str(),
                      cell(t.has_band(k) ? t.b2[k] : NAN).c_str(), cell(dp.lower_edge[kd]).c_str(),
                      cell(dp.upper_edge[kd]).c_str());
        body += buf;
        if (t.has_band(k) && k + 1 < t.size() && !std::isnan(dp.lower_edge[kd])) {
            worst = std::max(worst, std::abs(t.b1[k] - dp.lower_edge[kd]) / dp.cell);
            if (std::isfinite(t.b2[k]) && std::isfinite(dp.upper_edge[kd]))
                worst = std::max(worst, std::abs(t.b2[k] - dp.upper_edge[kd]) / dp.cell);
        }
    }
    const std::string summary = "value_at_0_0=" + fmt("%.12g", value_at(cfg.spec, t, 0.0, 0.0).v) +
                                " dp_value_at_0_0=" + fmt("%.12g", dp.value0.front()) +
                                " dp_cell=" + fmt("%.6g", dp.cell) + " max_edge_gap_cells=" + fmt("%.4g", worst);
    return make_artifact(cfg, body, summary);
}

std::string run_convergence(const RunConfig& cfg) {
    const ConvergenceReport rep = refine_convergence(cfg.spec, cfg.solver, parse_factors(cfg.factors));
    std::string body = "n_steps,t_star,max_diff_to_next\n";
    char buf[128];
    for (const auto& l : rep.levels) {
        std::snprintf(buf, sizeof buf, "%d,%.12g,%s\n", l.n_steps, l.t_star,
                      std::isnan(l.max_diff_to_next) ? "" : fmt("%.6g", l.max_diff_to_next).c_str());
        body += buf;
    }
    return make_artifact(cfg, body, std::string("differences_decrease=") + (rep.differences_decrease ? "1" : "0"));
}

}  // namespace

BoundaryTable load_table(const std::string& path, const ProblemSpec& spec) {
    const Artifact a = parse_artifact(read_file(path));
    const auto it = a.header.find("config");
    if (it == a.header.end()) throw ConfigError("table '" + path + "' has no config header");
    const RunConfig src = parse_serialized(it->second);
    if (!(src.spec == spec))
        throw SpecMismatchError("table '" + path + "' was solved for mu=" + fmt("%.6g", src.spec.mu) +
                                " horizon=" + fmt("%.6g", src.spec.horizon));
    return parse_boundary_csv(a.body, src.spec, src.solver);
}

std::string run(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.command == "solve") return run_solve(cfg);
    if (cfg.command == "value") return run_value(cfg);
    if (cfg.command == "simulate") return run_simulate(cfg);
    if (cfg.command == "diagnose") return run_diagnose(cfg);
    if (cfg.command == "oracle") return run_oracle(cfg);
    return run_convergence(cfg);
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e)) return kExitConfig;
    if (dynamic_cast<const SpecMismatchError*>(&e)) return kExitSpecMismatch;
    if (dynamic_cast<const BracketError*>(&e)) return kExitBracketing;
    if (dynamic_cast<const ToleranceError*>(&e)) return kExitTolerance;
    return kExitOther;
}

std::string error_record(const std::exception& e) {
    static const char* kinds[] = {"ok", "error", "config", "spec_mismatch", "bracketing", "tolerance"};
    const int code = exit_code_for(e);
    nlohmann::json j{{"error", kinds[code]}, {"exit_code", code}, {"message", e.what()}};
    return j.dump();
}

}  // namespace stopmax
