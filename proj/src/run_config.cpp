#include "stopmax/run_config.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace stopmax {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used == v.size()) return d;
    } catch (const std::logic_error&) {
    }
    throw ConfigError("setting '" + key + "': expected a number, got '" + v + "'");
}

long long to_integer(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const long long i = std::stoll(v, &used);
        if (used == v.size()) return i;
    } catch (const std::logic_error&) {
    }
    throw ConfigError("setting '" + key + "': expected an integer, got '" + v + "'");
}

// Shortest %g form that reads back to the same double.
std::string num(double v) {
    char buf[40];
    for (int digits = 6; digits <= 17; ++digits) {
        std::snprintf(buf, sizeof buf, "%.*g", digits, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

}  // namespace

void RunConfig::validate() const {
    static const std::vector<std::string> commands{"solve", "value", "simulate", "diagnose", "oracle", "convergence"};
    bool known = false;
    for (const auto& c : commands) known = known || c == command;
    if (!known) throw ConfigError("unknown command '" + command + "'");
    try {
        spec.validate();
        solver.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    if (mc.dt < 0.0 || resolved_dt() > spec.horizon / 100.0 * (1.0 + 1e-12))
        throw ConfigError("dt must lie in (0, T/100]");
    if (mc.n_paths == 0) throw ConfigError("paths must be >= 1");
    if (dp.n_steps < 1 || dp.n_levels < 4) throw ConfigError("dp grid too small");
    if (value_times < 1 || value_levels < 1) throw ConfigError("value grid must be nonempty");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (table_path.find_first_of(" \t\n") != std::string::npos) throw ConfigError("table path may not contain whitespace");
}

std::string RunConfig::serialize() const {
    std::string s;
    auto put = [&](const char* k, const std::string& v) {
        if (!s.empty()) s += ' ';
        s += k;
        s += '=';
        s += v;
    };
    put("command", command);
    put("mu", num(spec.mu));
    put("horizon", num(spec.horizon));
    put("steps", std::to_string(solver.n_steps));
    put("quad-order", std::to_string(solver.quad_order));
    put("root-tol", num(solver.root_tol));
    put("level-tol", num(solver.level_tol));
    put("merge-gap", num(solver.merge_gap));
    put("dt", num(mc.dt));
    put("paths", std::to_string(mc.n_paths));
    put("seed", std::to_string(mc.seed));
    put("dp-steps", std::to_string(dp.n_steps));
    put("dp-levels", std::to_string(dp.n_levels));
    put("dp-x-max", num(dp.x_max));
    put("factors", factors);
    put("value-times", std::to_string(value_times));
    put("value-levels", std::to_string(value_levels));
    put("value-x-max", num(value_x_max));
    if (!table_path.empty()) put("table", table_path);
    return s;
}

void apply_setting(RunConfig& c, const std::string& key, const std::string& v) {
    if (key == "command") c.command = v;
    else if (key == "mu") c.spec.mu = to_double(key, v);
    else if (key == "horizon") c.spec.horizon = to_double(key, v);
    else if (key == "steps") c.solver.n_steps = static_cast<int>(to_integer(key, v));
    else if (key == "quad-order") c.solver.quad_order = static_cast<int>(to_integer(key, v));
    else if (key == "root-tol") c.solver.root_tol = to_double(key, v);
    else if (key == "level-tol") c.solver.level_tol = to_double(key, v);
    else if (key == "merge-gap") c.solver.merge_gap = to_double(key, v);
    else if (key == "dt") c.mc.dt = to_double(key, v);
    else if (key == "paths") {
        const long long p = to_integer(key, v);
        if (p < 1) throw ConfigError("paths must be >= 1");
        c.mc.n_paths = static_cast<std::size_t>(p);
    } else if (key == "seed") {
        const long long sd = to_integer(key, v);
        if (sd < 0) throw ConfigError("seed must be >= 0");
        c.mc.seed = static_cast<std::uint64_t>(sd);
    } else if (key == "workers") c.workers = static_cast<int>(to_integer(key, v));
    else if (key == "dp-steps") c.dp.n_steps = static_cast<int>(to_integer(key, v));
    else if (key == "dp-levels") c.dp.n_levels = static_cast<int>(to_integer(key, v));
    else if (key == "dp-x-max") c.dp.x_max = to_double(key, v);
    else if (key == "factors") c.factors = v;
    else if (key == "value-times") c.value_times = static_cast<int>(to_integer(key, v));
    else if (key == "value-levels") c.value_levels = static_cast<int>(to_integer(key, v));
    else if (key == "value-x-max") c.value_x_max = to_double(key, v);
    else if (key == "table") c.table_path = v;
    else if (key == "out") c.out_path = v;
    else throw ConfigError("unknown setting '" + key + "'");
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return kv;
}

RunConfig parse_serialized(const std::string& line) {
    RunConfig c;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw ConfigError("serialized config: bad token '" + tok + "'");
        apply_setting(c, tok.substr(0, eq), tok.substr(eq + 1));
    }
    return c;
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string make_artifact(const RunConfig& cfg, const std::string& body, const std::string& summary) {
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016" PRIx64, fnv1a64(body));
    std::string out = "# stopmax " + cfg.command + "\n";
    out += "# config: " + cfg.serialize() + "\n";
    if (!summary.empty()) out += "# summary: " + summary + "\n";
    out += "# content-hash: fnv1a64:" + std::string(hash) + "\n";
    return out + body;
}

Artifact parse_artifact(const std::string& text) {
    Artifact a;
    std::size_t pos = 0;
    while (pos < text.size() && text[pos] == '#') {
        const auto end = text.find('\n', pos);
        const std::string line = text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
        pos = end == std::string::npos ? text.size() : end + 1;
        const auto colon = line.find(':');
        if (colon != std::string::npos) a.header[trim(line.substr(1, colon - 1))] = trim(line.substr(colon + 1));
    }
    a.body = text.substr(pos);
    const auto it = a.header.find("content-hash");
    if (it != a.header.end()) {
        char hash[40];
        std::snprintf(hash, sizeof hash, "fnv1a64:%016" PRIx64, fnv1a64(a.body));
        if (it->second != hash) throw ConfigError("artifact content hash does not match its body");
    }
    return a;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << text;
    if (!out) throw ConfigError("write failed for '" + path + "'");
}

}  // namespace stopmax
