#include "infbern/cli.hpp"
#include "infbern/field_io.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

using namespace infbern;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "infbern");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(int(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("infbern_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("radial prints the closed-form quantities") {
  const fs::path dir = scratch("radial");
  const Result r = cli({"radial", "--n", "2", "--p", "3", "--R", "1", "--lambda", "3", "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("alpha=0.5") != std::string::npos);
  CHECK(r.out.find("lambda_p=2") != std::string::npos);
  CHECK(r.out.find("rho_hyper=0.044658") != std::string::npos);
  CHECK(r.out.find("rho_ell=0.622008") != std::string::npos);
  const auto j = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(j["pass"] == true);
}

TEST_CASE("usage errors exit 1, help exits 0") {
  CHECK(cli({}).code == 1);
  CHECK(cli({"frobnicate"}).code == 1);
  CHECK(cli({"potential", "--domain", "ball"}).code == 1);
  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({"radial", "--p", "1.5"}).code == 1);
  const fs::path dir = scratch("badspec");
  fs::create_directories(dir);
  std::ofstream(dir / "bad.json") << "{\"primitives\": [";
  CHECK(cli({"distance", "--domain", (dir / "bad.json").string(), "--out", dir.string()}).code == 1);
  CHECK(cli({"distance", "--domain", "no-such-domain"}).code == 1);
}

TEST_CASE("bernoulli-solve below the critical constant prints a certificate") {
  const fs::path dir = scratch("refusal");
  const Result r = cli({"bernoulli-solve", "--domain", "ball", "--h", "0.05", "--lambda", "0.5",
                        "--out", dir.string()});
  CHECK(r.code == 1);
  CHECK(r.out.find("\"critical\"") != std::string::npos);
  const auto j = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(j["certificate"]["lambda"] == 0.5);
}

TEST_CASE("solve, store, verify and evaluate") {
  const fs::path dir = scratch("solve");
  const Result s = cli({"bernoulli-solve", "--domain", "ball", "--h", "0.05", "--lambda", "3",
                        "--out", dir.string()});
  CHECK(s.code == 0);
  REQUIRE(fs::exists(dir / "u.field"));
  CHECK(load_field((dir / "u.field").string()).grid.h == 0.05);
  const fs::path vdir = scratch("verify");
  const Result v = cli({"bernoulli-verify", "--domain", "ball", "--h", "0.05", "--lambda", "3",
                        "--field", (dir / "u.field").string(), "--out", vdir.string()});
  CHECK(v.code == 0);
  const Result j = cli({"jfunc", "--domain", "ball", "--h", "0.05", "--lambda", "3", "--field",
                        (dir / "u.field").string(), "--out", vdir.string()});
  CHECK(j.code == 0);
  CHECK(j.out.find("J_inf") != std::string::npos);

  // A field of the wrong slope fails verification with exit 2.
  ScalarField u = load_field((dir / "u.field").string());
  u.values = (u.values * 2.0).min(1.0);
  save_field((dir / "steep.field").string(), u);
  const Result bad = cli({"bernoulli-verify", "--domain", "ball", "--h", "0.05", "--lambda", "3",
                          "--field", (dir / "steep.field").string(), "--out", vdir.string()});
  CHECK(bad.code == 2);
}

TEST_CASE("zero-set commands") {
  const fs::path dir = scratch("zero");
  CHECK(cli({"trivial", "--domain", "ball", "--h", "0.05", "--lambda", "1", "--K", "point:0,0",
             "--out", dir.string()})
            .code == 0);
  CHECK(cli({"trivial", "--domain", "square", "--h", "0.1", "--lambda", "1", "--K",
             "parallel:1", "--out", dir.string()})
            .code == 1);
  CHECK(cli({"characterize", "--domain", "square", "--h", "0.1", "--lambda", "1", "--K",
             "parallel:1", "--out", dir.string()})
            .code == 0);
  CHECK(cli({"potential", "--domain", "ball", "--h", "0.05", "--K", "segment:-0.2,0,0.2,0",
             "--out", dir.string()})
            .code == 0);
  CHECK(fs::exists(dir / "potential.field"));
  CHECK(cli({"potential", "--domain", "ball", "--h", "0.05", "--K", "point:5,5", "--out",
             dir.string()})
            .code == 1);
}

TEST_CASE("serial reports are byte-identical across runs") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  for (const auto& dir : {a, b})
    REQUIRE(cli({"potential", "--domain", "ball", "--h", "0.05", "--K", "point:0,0", "--seed", "9",
                 "--out", dir.string()})
                .code == 0);
  CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
  CHECK(slurp(a / "potential.field") == slurp(b / "potential.field"));
}

TEST_CASE("tables and scenarios") {
  const fs::path dir = scratch("tables");
  CHECK(cli({"sweep-p", "--lambda", "3", "--out", dir.string()}).code == 0);
  CHECK(slurp(dir / "sweep.csv").rfind("p,rho_hyper,rho_ell,sup_diff\n", 0) == 0);
  CHECK(cli({"constants", "--out", dir.string()}).code == 0);
  CHECK(slurp(dir / "constants.csv").rfind("p,lambda_p\n", 0) == 0);
  CHECK(cli({"distance", "--domain", "nonconn", "--h", "0.1", "--out", dir.string()}).code == 0);
  CHECK(fs::exists(dir / "distance.field"));

  const fs::path sdir = scratch("scenario");
  const Result r = cli({"scenario", "nonconn", "--lambda", "1", "--h", "0.05", "--out", sdir.string()});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(sdir / "report.json"));
  CHECK(j["solutions"].size() >= 3);
  CHECK(j["pass"] == true);
}

TEST_CASE("the installed binary runs") {
  const std::string cmd = std::string(INFBERN_CLI_PATH) + " constants --out " +
                          scratch("binary").string() + " > /dev/null";
  CHECK(std::system(cmd.c_str()) == 0);
}

}
