#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

#include "topoplasma/errors.hpp"
#include "topoplasma/orchestrator.hpp"

using namespace topoplasma;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("topoplasma-test-" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(TOPOPLASMA_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parse and serialize round trip") {
  Config c = Config::parse("# comment\n[grid]\nN = 300\n; full-line comment\nL=30\n\n[flow]\nell = 1,2\n");
  CHECK(c.get_int("grid.N") == 300);
  CHECK(c.get_double("grid.L") == 30.0);
  CHECK(c.get_list("flow.ell").size() == 2);
  CHECK(Config::parse(c.serialize()) == c);
  CHECK_THROWS_AS(c.get("grid.missing"), InvalidParameter);
  CHECK_THROWS_AS(Config::parse("[grid]\nthis line is broken\n"), InvalidParameter);
  Config b = Config::parse("[x]\nflag = yes\n");
  CHECK(b.get_bool("x.flag"));
  b.set("x.n", "1.5");
  CHECK_THROWS_AS(b.get_int("x.n"), InvalidParameter);
}

TEST_CASE("every command has defaults") {
  for (const auto& cmd : commands()) CHECK_FALSE(default_config(cmd).entries().empty());
  CHECK_THROWS_AS(default_config("plot"), InvalidParameter);
}

TEST_CASE("presets expand unless overridden") {
  Config over;
  over.set("profile.preset", "fig6");
  over.set("profile.omega_p", "2");
  Config c = effective_config("flow", Config{}, over);
  CHECK(c.get("grid.subsystem") == "tm");
  CHECK(c.get("profile.omega_p") == "2");
  over.set("profile.preset", "fig99");
  CHECK_THROWS_AS(effective_config("flow", Config{}, over), InvalidParameter);
}

TEST_CASE("run id is a content hash") {
  Config a = effective_config("table2", Config{}, Config{});
  Config b = a;
  CHECK(run_id("table2", a) == run_id("table2", b));
  b.set("table2.reg", "omega-decay:0.02");
  CHECK(run_id("table2", a) != run_id("table2", b));
  CHECK(run_id("bdi", a) != run_id("table2", a));
}

TEST_CASE("table2 run writes the output layout deterministically") {
  fs::path out = scratch_dir("table2");
  RunOptions o;
  o.out_dir = out;
  Config c = effective_config("table2", Config{}, Config{});
  RunResult r1 = run_command("table2", c, o);
  CHECK(fs::exists(r1.dir / "summary.json"));
  CHECK(fs::exists(r1.dir / "sweep.csv"));
  CHECK(fs::exists(r1.dir / "config.echo"));
  std::string csv1 = slurp(r1.dir / "sweep.csv");
  RunResult r2 = run_command("table2", c, o);
  CHECK(r1.run_id == r2.run_id);
  CHECK(slurp(r2.dir / "sweep.csv") == csv1);
  CHECK(r1.summary["result"] == r2.summary["result"]);
  fs::remove_all(out);
}

TEST_CASE("threads do not change results") {
  Config over;
  over.set("dirac.N", "120");
  over.set("dirac.n_xi", "30");
  Config c = effective_config("dirac", Config{}, over);
  RunOptions o;
  o.write = false;
  RunResult a = run_command("dirac", c, o);
  o.threads = 3;
  RunResult b = run_command("dirac", c, o);
  CHECK(a.csv_rows == b.csv_rows);
  CHECK(a.summary["result"] == b.summary["result"]);
}

TEST_CASE("bdi command") {
  RunOptions o;
  o.write = false;
  Config over;
  over.set("bdi.reg", "plasma-decay:0.01");
  over.set("bdi.north", "0.75,1,2");
  over.set("bdi.south", "-0.75,1,2");
  over.set("bdi.ell", "1");
  RunResult r = run_command("bdi", effective_config("bdi", Config{}, over), o);
  auto& row = r.summary["result"]["bdi"][0];
  CHECK(row["raw"].get<double>() == doctest::Approx(2.0).epsilon(1e-6));
  CHECK_FALSE(row["is_bdi"].get<bool>());
}

TEST_CASE("cli exit codes") {
  fs::path out = scratch_dir("cli");
  std::string o = "--out " + out.string();
  CHECK(run_cli(o + " table2") == 0);
  CHECK(run_cli(o + " weyl --nscale 4,8") == 0);
  CHECK(run_cli(o + " phase --x -1,1,5 --y 0.5,2,5") == 0);
  CHECK(run_cli(o + " bdi --ell 7") == 2);
  CHECK(run_cli(o + " bdi --north 0,1,2 --south 1,1,2") == 2);
  CHECK(run_cli(o + " nosuchcommand") == 2);
  CHECK(run_cli(o + " --format xml table2") == 2);
  CHECK(run_cli(o + " weyl --nscale 4 --spacing 1") == 3);
  CHECK(run_cli(o + " --config /nonexistent/file.cfg table2") == 2);
  fs::path cfg = out / "t.cfg";
  std::ofstream(cfg) << "[table2]\nreg = omega-decay:0.02\n";
  CHECK(run_cli(o + " --config " + cfg.string() + " table2") == 0);
  fs::remove_all(out);
}
