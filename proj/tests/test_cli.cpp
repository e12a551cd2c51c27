#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "json.hpp"

#include "hk2/rational.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& args, bool keep_stderr = false) {
  const std::string cmd =
      std::string(HKTHETA_BIN) + " " + args + (keep_stderr ? " 2>&1" : " 2>/dev/null");
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult res;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) res.out.append(buf, got);
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("hk2_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("hk worked examples") {
  CHECK(run("hk --poly x^3+y^3+x*y*z --vars x,y,z --i 1 --n 1").out == "7\n");
  CHECK(run("hk --poly u*v --vars u,v --i 1 --n 2").out == "7\n");
  CHECK(run("hk --poly x^3 --vars x --i 1 --n 3").out == "3\n");
}

TEST_CASE("exit codes") {
  CHECK(run("hk --poly x^3+y^3+x*y*z --vars x,y,z --i 1 --n 1").exit_code == 0);
  CHECK(run("hk --poly x+w --vars x,y --i 1 --n 1").exit_code == 2);       // parse error
  CHECK(run("hk --poly x*y*z --vars x,y,z --i 1 --n 8").exit_code == 3);   // size guard
  CHECK(run("frobnicate").exit_code == 2);                                 // usage error
  CHECK(run("theta --nodal --monomial 3").exit_code == 2);                 // conflicting sources
}

TEST_CASE("theta --nodal emits the conjectural coefficients as JSON strings") {
  const RunResult res = run("--format json theta --nodal --N 5");
  REQUIRE(res.exit_code == 0);
  const json out = json::parse(res.out);
  CHECK(out["source"] == "conjectural");
  CHECK(out["coeffs"] == json::array({"1", "6", "20", "52", "136", "364"}));
}

TEST_CASE("theta evaluation carries an exact rational enclosure") {
  const RunResult res = run("--format json theta --monomial 3 --N 12 --eval 1/4");
  REQUIRE(res.exit_code == 0);
  const json out = json::parse(res.out);
  CHECK(out["eval"]["point"] == "1/4");
  const hk2::Rat value = hk2::parse_rat(out["eval"]["value"].get<std::string>());
  const hk2::Rat error = hk2::parse_rat(out["eval"]["error"].get<std::string>());
  CHECK(hk2::rat_abs(value - hk2::make_rat(5, 3)) <= error);
}

TEST_CASE("theta --square applies the squaring rule") {
  const RunResult res = run("--format json theta --monomial 3 --N 4 --square");
  REQUIRE(res.exit_code == 0);
  const json out = json::parse(res.out);
  CHECK(out["coeffs"] == json::array({"1", "2", "4", "4", "4", "4"}));
}

TEST_CASE("phi output") {
  const RunResult res = run("phi --poly u*v --vars u,v --n 2");
  CHECK(res.exit_code == 0);
  CHECK(res.out == "0 7/16 3/4 15/16 1\n");
}

TEST_CASE("hadamard subcommand") {
  const RunResult res = run("--format json hadamard --factor monomial:3 --factor monomial:3 --N 3");
  REQUIRE(res.exit_code == 0);
  const json out = json::parse(res.out);
  CHECK(out["coeffs"] == json::array({"1", "4", "4", "4"}));
  CHECK(out["r"] == 2);

  // empirical factor built from a polynomial; equals the closed-form route
  const RunResult emp =
      run("--format json hadamard --factor poly:x^3@x --factor monomial:3 --N 3");
  REQUIRE(emp.exit_code == 0);
  CHECK(json::parse(emp.out)["coeffs"] == out["coeffs"]);
  CHECK(json::parse(emp.out)["source"] == "empirical");

  CHECK(run("hadamard --factor selector:sideways --N 3").exit_code == 2);
}

TEST_CASE("verify subcommand") {
  CHECK(run("verify --suite lemma19 --N 12").exit_code == 0);
  const RunResult res = run("--format json verify --suite cor14 --N 2");
  REQUIRE(res.exit_code == 0);
  const json out = json::parse(res.out);
  CHECK(out["ok"] == true);
}

TEST_CASE("constant subcommand") {
  CHECK(run("constant --check euler --lambda 1/8 --tol 1e-10").exit_code == 0);
  const RunResult res = run("--format json constant --check sum --lambda 1/256 --digits 14");
  REQUIRE(res.exit_code == 0);
  const json out = json::parse(res.out);
  CHECK(out["decimal"].get<std::string>().substr(0, 16) == "1.00006104353957");

  const RunResult dec = run("--format json constant --check thm22 --N 8 --digits 20");
  REQUIRE(dec.exit_code == 0);
  const json rep = json::parse(dec.out);
  CHECK(rep["ok"] == true);
  CHECK(rep["sides_agree"] == true);
  CHECK(rep["weights"]["sum_a2n1_sq"] == "36");
  CHECK(rep["sums"].size() == 5);

  CHECK(run("constant --check sum --lambda 1/3").exit_code == 2);  // outside (0, 1/4)
}

TEST_CASE("csv output mirrors the cache record format") {
  const RunResult res = run("--format csv hk --poly x^3 --vars x --i 2 --n 3");
  CHECK(res.out == "x|x^3,2,3,6\n");
}

TEST_CASE("cache round-trip through the CLI") {
  TempDir dir;
  const std::string base = "--cache-dir " + dir.path.string() + " ";
  CHECK(run(base + "hk --poly x^3 --vars x --i 1 --n 3").exit_code == 0);
  const fs::path file = dir.path / "hk_records.csv";
  REQUIRE(fs::exists(file));
  {
    std::ifstream in(file);
    std::string line;
    std::getline(in, line);
    CHECK(line == "x|x^3,1,3,3");
  }
  CHECK(run(base + "cache stats").exit_code == 0);
  CHECK(run(base + "cache check").exit_code == 0);

  // corrupt line: skipped, reported, flagged by `cache check`
  {
    std::ofstream out(file, std::ios::app);
    out << "garbage line\n";
  }
  const RunResult check = run(base + "cache check", true);
  CHECK(check.exit_code == 1);
  CHECK(check.out.find("skipped") != std::string::npos);

  // conflicting record: fatal for any command that loads the cache
  {
    std::ofstream out(file, std::ios::trunc);
    out << "x|x^3,1,3,3\n";
    out << "x|x^3,1,3,4\n";
  }
  CHECK(run(base + "hk --poly x^3 --vars x --i 1 --n 3").exit_code == 1);
}

TEST_CASE("environment variable supplies the cache directory") {
  TempDir dir;
  const std::string cmd = "HKTHETA_CACHE_DIR=" + dir.path.string() + " " +
                          std::string(HKTHETA_BIN) + " hk --poly x --vars x --i 1 --n 2";
  FILE* pipe = popen((cmd + " >/dev/null 2>&1").c_str(), "r");
  REQUIRE(pipe != nullptr);
  pclose(pipe);
  CHECK(fs::exists(dir.path / "hk_records.csv"));
}
