#include <doctest.h>

#include "afc/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome afc_run(std::vector<std::string> args) {
  args.insert(args.begin(), "afc");
  std::ostringstream out, err;
  Outcome o;
  o.code = afc::cli::run(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), {});
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("afc_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("analytic point") {
  Outcome o = afc_run({"analytic", "--d", "40", "--finesse", "10"});
  CHECK(o.code == 0);
  CHECK(o.out.find("eta = 0.905107794") != std::string::npos);
  CHECK(o.out.find("phase_rad = 3.14159") != std::string::npos);

  Outcome opt = afc_run({"analytic", "--d", "20", "--optimal"});
  CHECK(opt.code == 0);
  CHECK(opt.out.find("F_opt = 6.919") != std::string::npos);
}

TEST_CASE("argument errors exit with 2") {
  CHECK(afc_run({"analytic", "--d", "abc"}).code == 2);
  CHECK(afc_run({"bogus"}).code == 2);
  CHECK(afc_run({"simulate", "--out", "x"}).code == 2);
  CHECK(afc_run({"capacity", "--material", "nd_yvo"}).code == 2);
  CHECK(afc_run({"--help"}).code == 0);
}

TEST_CASE("missing config leaves no output behind") {
  fs::path dir = scratch("missing");
  fs::path out = dir / "run";
  Outcome o = afc_run({"simulate", "--config", (dir / "absent.cfg").string(), "--out", out.string()});
  CHECK(o.code == 2);
  CHECK(o.err.find("absent.cfg") != std::string::npos);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("unknown config key names its line") {
  fs::path dir = scratch("unknown");
  write(dir / "bad.cfg", "delta_hz = 20e3\nfinesse = 10\ndepht = 40\n");
  Outcome o = afc_run({"simulate", "--config", (dir / "bad.cfg").string(), "--out", (dir / "run").string()});
  CHECK(o.code == 2);
  CHECK(o.err.find("bad.cfg:3") != std::string::npos);
  CHECK(o.err.find("depht") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "run"));
}

TEST_CASE("simulate reruns are byte identical") {
  fs::path dir = scratch("determinism");
  write(dir / "run.cfg",
        "delta_hz = 20e3\nfinesse = 6\nbig_gamma_hz = 200e3\ndepth = 10\npulse_bandwidth_hz = 40e3\n");
  for (const char* sub : {"a", "b"}) {
    Outcome o = afc_run({"simulate", "--config", (dir / "run.cfg").string(), "--out", (dir / sub).string()});
    REQUIRE(o.code == 0);
  }
  CHECK(slurp(dir / "a" / "result.json") == slurp(dir / "b" / "result.json"));
  CHECK(slurp(dir / "a" / "fields.csv") == slurp(dir / "b" / "fields.csv"));
  CHECK(slurp(dir / "a" / "fields.csv").rfind("t_s,abs_e_in,", 0) == 0);
}

TEST_CASE("comb export") {
  fs::path dir = scratch("comb");
  write(dir / "comb.cfg", "delta_hz = 20e3\nfinesse = 10\nbig_gamma_hz = 200e3\ndepth = 10\npoints = 101\n");
  Outcome o = afc_run({"comb", "--params", (dir / "comb.cfg").string(), "--ft", "--out", (dir / "c.csv").string()});
  CHECK(o.code == 0);
  CHECK(slurp(dir / "c.csv").rfind("delta_hz,density\n", 0) == 0);
  CHECK(slurp(dir / "c_ft.csv").rfind("t_s,re,im,abs\n", 0) == 0);
}

TEST_CASE("reproduce in analytic mode") {
  fs::path dir = scratch("reproduce");
  for (const char* target : {"figure2", "figure3", "eu_example"}) {
    CAPTURE(target);
    CHECK(afc_run({"reproduce", target, "--analytic-only", "--out", dir.string()}).code == 0);
  }
  CHECK(fs::exists(dir / "figure2_curves.csv"));
  CHECK(fs::exists(dir / "figure2_anchors.csv"));
  CHECK(fs::exists(dir / "figure3_curves.csv"));
  CHECK(fs::exists(dir / "figure3_optima.csv"));
  CHECK(slurp(dir / "capacity.json").find("\"n_modes\": 100") != std::string::npos);
  CHECK(afc_run({"reproduce", "figure9", "--out", dir.string()}).code == 2);
}

TEST_CASE("thread count from the environment") {
  ::setenv("AFC_THREADS", "zero", 1);
  Outcome bad = afc_run({"analytic", "--d", "10", "--finesse", "4"});
  ::unsetenv("AFC_THREADS");
  CHECK(bad.code == 2);
  CHECK(bad.err.find("AFC_THREADS") != std::string::npos);
}
