#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "stopmax/cli.hpp"
#include "stopmax/run_config.hpp"

using namespace stopmax;
namespace fs = std::filesystem;

namespace {

RunConfig small_solve(double mu) {
    RunConfig c;
    c.command = "solve";
    c.spec = {mu, 1.0};
    c.solver.n_steps = 20;
    return c;
}

fs::path scratch_dir() {
    const fs::path d = fs::temp_directory_path() / "stopmax_cli_test";
    fs::create_directories(d);
    return d;
}

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run_cli(const std::string& args) {
    const fs::path d = scratch_dir();
    const std::string cmd = std::string(STOPMAX_CLI) + " " + args + " > " + (d / "stdout").string() + " 2> " + (d / "stderr").string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_file((d / "stdout").string()), read_file((d / "stderr").string())};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("fnv1a64 reference vectors") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("configuration round trip") {
    RunConfig c;
    c.command = "simulate";
    c.spec = {-0.35, 2.5};
    c.solver.n_steps = 64;
    c.solver.root_tol = 3e-9;
    c.mc.dt = 0.005;
    c.mc.n_paths = 12345;
    c.mc.seed = 77;
    c.dp.n_levels = 100;
    c.factors = "1,3,9";
    c.table_path = "b.csv";
    c.workers = 5;
    const RunConfig back = parse_serialized(c.serialize());
    CHECK(back.command == c.command);
    CHECK(back.spec == c.spec);
    CHECK(back.solver == c.solver);
    CHECK(back.mc == c.mc);
    CHECK(back.dp.n_levels == 100);
    CHECK(back.factors == c.factors);
    CHECK(back.table_path == c.table_path);
    CHECK(back.serialize() == c.serialize());
    CHECK(back.workers == 1);
    CHECK(c.serialize().find("workers") == std::string::npos);
}

TEST_CASE("settings are checked") {
    RunConfig c;
    CHECK_THROWS_AS(apply_setting(c, "nope", "1"), ConfigError);
    CHECK_THROWS_AS(apply_setting(c, "mu", "abc"), ConfigError);
    CHECK_THROWS_AS(apply_setting(c, "steps", "2.5"), ConfigError);
    CHECK_THROWS_AS(apply_setting(c, "seed", "-1"), ConfigError);
    apply_setting(c, "mu", "0.75");
    CHECK(c.spec.mu == 0.75);
    c.solver.n_steps = 8;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.spec.horizon = -1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.mc.dt = 0.5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("artifacts carry a verified hash") {
    const RunConfig c = small_solve(1.0);
    const std::string text = make_artifact(c, "t,b1,b2\n1,0,0.5\n", "rows=1");
    const Artifact a = parse_artifact(text);
    CHECK(a.body == "t,b1,b2\n1,0,0.5\n");
    CHECK(a.header.at("config") == c.serialize());
    CHECK(a.header.at("summary") == "rows=1");
    std::string tampered = text;
    tampered.replace(tampered.rfind("0.5"), 3, "0.6");
    CHECK_THROWS_AS(parse_artifact(tampered), ConfigError);
}

TEST_CASE("solve is deterministic and ends at the terminal seeds") {
    const std::string a = run(small_solve(1.0));
    const std::string b = run(small_solve(1.0));
    CHECK(a == b);
    const Artifact art = parse_artifact(a);
    CHECK(art.body.size() > 10);
    CHECK(art.body.substr(art.body.size() - 8) == "1,0,0.5\n");
    const Artifact neg = parse_artifact(run(small_solve(-0.5)));
    CHECK(neg.body.substr(neg.body.size() - 8) == "1,0,inf\n");
}

TEST_CASE("exit codes by error kind") {
    CHECK(exit_code_for(ConfigError("x")) == kExitConfig);
    CHECK(exit_code_for(DomainError("x")) == kExitConfig);
    CHECK(exit_code_for(SpecMismatchError("x")) == kExitSpecMismatch);
    CHECK(exit_code_for(BracketError("x")) == kExitBracketing);
    CHECK(exit_code_for(ToleranceError("x")) == kExitTolerance);
    CHECK(exit_code_for(std::runtime_error("x")) == kExitOther);
    const auto j = nlohmann::json::parse(error_record(SpecMismatchError("other \"problem\"")));
    CHECK(j.at("exit_code") == 3);
    CHECK(j.at("message") == "other \"problem\"");
    CHECK(j.at("error").get<std::string>().size() > 0);
}

TEST_CASE("tables are tied to their problem") {
    const fs::path p = scratch_dir() / "table.csv";
    write_file(p.string(), run(small_solve(1.0)));
    CHECK(load_table(p.string(), {1.0, 1.0}).b2.back() == 0.5);
    CHECK_THROWS_AS(load_table(p.string(), {0.5, 1.0}), SpecMismatchError);
    RunConfig v;
    v.command = "value";
    v.spec = {0.5, 1.0};
    v.solver.n_steps = 20;
    v.table_path = p.string();
    CHECK_THROWS_AS(run(v), SpecMismatchError);
}

TEST_CASE("command line binary") {
    const fs::path d = scratch_dir();
    const std::string table = (d / "b.csv").string();

    auto ok = run_cli("solve --mu 1 --steps 20 --out " + table);
    CHECK(ok.code == 0);
    CHECK(read_file(table) == run(small_solve(1.0)));

    auto mismatch = run_cli("value --mu 0.5 --steps 20 --table " + table);
    CHECK(mismatch.code == 3);
    CHECK(nlohmann::json::parse(mismatch.err).at("exit_code") == 3);

    CHECK(run_cli("solve --mu abc").code == 2);
    CHECK(run_cli("solve --steps 3").code == 2);
    CHECK(run_cli("solve --bogus 1").code == 2);
    CHECK(run_cli("frobnicate").code == 2);

    const auto cfg = d / "run.cfg";
    std::ofstream(cfg) << "# small run\nmu = 0.5\nsteps = 24\n\nseed = 4\n";
    const auto from_file = run_cli("solve --config " + cfg.string() + " --steps 20");
    CHECK(from_file.code == 0);
    const auto header = parse_artifact(from_file.out).header.at("config");
    CHECK(header.find("mu=0.5") != std::string::npos);
    CHECK(header.find("steps=20") != std::string::npos);
    CHECK(header.find("seed=4") != std::string::npos);

    const std::string sim = "simulate --mu 0 --steps 20 --paths 3000 --dt 0.01 --seed 3";
    const auto w1 = run_cli(sim + " --workers 1");
    const auto w3 = run_cli(sim + " --workers 3");
    CHECK(w1.code == 0);
    CHECK(w1.out == w3.out);
    CHECK(w1.out.find("rule,estimate,stderr,n_paths,dt,seed") != std::string::npos);
}

}
