#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "lowrank/cli.hpp"
#include "lowrank/matrix_io.hpp"
#include "lowrank/report.hpp"

using namespace lowrank;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& leaf) const { return (path / leaf).string(); }
};

void write_text(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run({}).code == kExitInvalidInput);
  CHECK(run({"frobnicate"}).code == kExitInvalidInput);
  const Run r = run({"gen", "--kind", "rpca", "--m", "10", "--r", "1", "--out-dir", "x", "--bogus"});
  CHECK(r.code == kExitInvalidInput);
  CHECK(r.err.find("--help") != std::string::npos);
  CHECK(run({"gen", "--kind", "svd", "--m", "10", "--r", "1", "--out-dir", "x"}).code == kExitInvalidInput);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("gen, solve-rpca and check") {
  TempDir dir("lowrank_cli_rpca");
  REQUIRE(run({"gen", "--kind", "rpca", "--m", "30", "--r", "2", "--seed", "3", "--out-dir", dir / "inst"}).code == 0);
  const auto man = report::read_manifest(dir / "inst/manifest.json");
  CHECK(man.e_card == 45);

  const Run solved = run({"solve-rpca", "--alg", "ialm", "--manifest", dir / "inst/manifest.json", "--trace",
                          dir / "res.json", "--output-a", dir / "A.csv"});
  REQUIRE(solved.code == 0);
  const auto res = report::read_json(dir / "res.json");
  CHECK(res["converged"].get<bool>());
  CHECK(res["rel_error"].get<double>() < 1e-5);
  CHECK(res["rank"].get<int>() == 2);
  CHECK(res["trace"].size() == res["iterations"].get<std::size_t>());
  CHECK(io::read_dense(dir / "A.csv").rows() == 30);

  const Run checked = run({"check", "--result", dir / "res.json", "--manifest", dir / "inst/manifest.json"});
  CHECK(checked.out.find("\"mu_schedule\"") != std::string::npos);
  CHECK(checked.out.find("\"feasibility\"") != std::string::npos);

  // Non-convergence is exit 1.
  CHECK(run({"solve-rpca", "--alg", "apg", "--manifest", dir / "inst/manifest.json", "--max-iter", "2"}).code ==
        kExitNotConverged);
  CHECK(run({"solve-rpca", "--alg", "ialm", "--input", dir / "inst/D.mtx", "--manifest",
             dir / "inst/manifest.json"})
            .code == kExitInvalidInput);
  CHECK(run({"solve-rpca", "--alg", "ialm", "--input", dir / "missing.csv"}).code == kExitInvalidInput);
}

TEST_CASE("zero input") {
  TempDir dir("lowrank_cli_zero");
  write_text(dir / "zero.csv", "0,0,0\n0,0,0\n");
  REQUIRE(run({"solve-rpca", "--alg", "ialm", "--input", dir / "zero.csv", "--output-a", dir / "A.csv"}).code == 0);
  CHECK(io::read_dense(dir / "A.csv") == DenseMatrix(2, 3));
}

TEST_CASE("solve-mc") {
  TempDir dir("lowrank_cli_mc");
  REQUIRE(run({"gen", "--kind", "mc", "--m", "40", "--r", "2", "--ratio", "5", "--seed", "1", "--out-dir",
               dir / "inst"})
              .code == 0);
  const Run solved = run({"solve-mc", "--manifest", dir / "inst/manifest.json", "--trace", dir / "res.json",
                          "--output-a", dir / "A.mtx"});
  REQUIRE(solved.code == 0);
  const auto res = report::read_json(dir / "res.json");
  CHECK(res["problem"] == "mc");
  CHECK(res["rel_error"].get<double>() < 1e-5);
  CHECK(run({"check", "--result", dir / "res.json"}).code == 0);

  write_text(dir / "empty.mtx", "%%MatrixMarket matrix coordinate real general\n5 5 0\n");
  CHECK(run({"solve-mc", "--input", dir / "empty.mtx"}).code == kExitInvalidInput);
  CHECK(run({"solve-mc", "--input", dir / "inst/samples.mtx", "--schedule", "linear"}).code == kExitInvalidInput);
}

TEST_CASE("json config supplies flags") {
  TempDir dir("lowrank_cli_config");
  REQUIRE(run({"gen", "--kind", "rpca", "--m", "20", "--r", "1", "--out-dir", dir / "inst"}).code == 0);
  write_text(dir / "c.json", R"({"alg": "ialm", "max_iter": 3, "eps1": 1e-9})");
  const Run capped = run({"solve-rpca", "--config", dir / "c.json", "--manifest", dir / "inst/manifest.json"});
  CHECK(capped.code == kExitNotConverged);
  CHECK(capped.out.find("\"max_iter\": 3") != std::string::npos);

  // Command-line flags win over the file.
  CHECK(run({"solve-rpca", "--config", dir / "c.json", "--manifest", dir / "inst/manifest.json", "--max-iter",
             "500"})
            .code == 0);

  write_text(dir / "nested.json", R"({"solve-rpca": {"alg": "ealm"}})");
  const Run nested = run({"solve-rpca", "--manifest", dir / "inst/manifest.json", "--config", dir / "nested.json"});
  CHECK(nested.code == 0);
  CHECK(nested.out.find("\"ealm\"") != std::string::npos);

  write_text(dir / "bad.json", "[1, 2]");
  CHECK(run({"solve-rpca", "--config", dir / "bad.json", "--manifest", dir / "inst/manifest.json"}).code ==
        kExitInvalidInput);
  CHECK(run({"solve-rpca", "--config", dir / "none.json", "--alg", "ialm", "--manifest",
             dir / "inst/manifest.json"})
            .code == kExitInvalidInput);
}

TEST_CASE("bench csv") {
  const Run r = run({"bench", "--table", "1", "--scale", "40,30", "--algs", "ialm,apg"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "# lowrank-bench schema 1");
  std::getline(in, line);
  CHECK(line == "table,m,r,setting,algorithm,rel_error,rank,e_card,iter,svd_count,wall_time_seconds");
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  REQUIRE(rows.size() == 8);
  CHECK(rows[0].rfind("1,30,2,r=0.05m;E=0.05m^2,apg,", 0) == 0);
  CHECK(rows[1].rfind("1,30,2,r=0.05m;E=0.05m^2,ialm,", 0) == 0);
  CHECK(rows[4].rfind("1,40,2,", 0) == 0);

  const Run mc = run({"bench", "--table", "3", "--scale", "100"});
  REQUIRE(mc.code == 0);
  CHECK(mc.out.find("3,100,1,p/d_r=6,ialm,") != std::string::npos);
  CHECK(run({"bench", "--table", "3", "--algs", "apg"}).code == kExitInvalidInput);
  CHECK(run({"bench", "--table", "4"}).code == kExitInvalidInput);
}
