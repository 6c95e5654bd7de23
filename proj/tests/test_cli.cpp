#include <doctest.h>

#include "test_util.hpp"

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "toa/sweep.hpp"
#include "toa/table.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int exit_code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(TOA_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

toa::Table csv(const std::string& text) {
  std::istringstream in(text);
  return toa::read_csv(in);
}

std::string metadata(const toa::Table& t, const std::string& key) {
  for (const auto& [k, v] : t.metadata) {
    if (k == key) return v;
  }
  return {};
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / ("toa_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("help and version") {
  CHECK(run("--help").exit_code == 0);
  const auto v = run("--version");
  CHECK(v.exit_code == 0);
  CHECK(v.out.find(toa::kToolVersion) != std::string::npos);
}

TEST_CASE("default scan covers sigma/x in [1e-2, 1e1] with 201 rows") {
  const auto r = run("scan");
  REQUIRE(r.exit_code == 0);
  const auto t = csv(r.out);
  REQUIRE(t.rows.size() == 201);
  CHECK(t.number(0, "sigma_over_x") == rel(1e-2, 1e-14));
  CHECK(t.number(200, "sigma_over_x") == rel(1e1, 1e-14));
  for (std::size_t i = 0; i < t.rows.size(); ++i) CHECK(t.number(i, "ratio") >= 1.0 - toa::kBoundSlack);
  CHECK(metadata(t, "command") == "scan");
  CHECK(metadata(t, "tool") == std::string("toa ") + toa::kToolVersion);
}

TEST_CASE("a single-point scan equals the matching row of a range scan") {
  const auto range = csv(run("scan --sigma-min 1e-7 --sigma-max 1e-4 --sigma-steps 4").out);
  const auto single = csv(run("scan --sigma 1e-7").out);
  REQUIRE(range.rows.size() == 4);
  REQUIRE(single.rows.size() == 1);
  for (const auto& col : range.columns) {
    const auto a = range.rows[0][range.column_index(col)];
    const auto b = single.rows[0][single.column_index(col)];
    CHECK_MESSAGE(a == b, col);
  }
  toa::PhysicalParams p;
  p.sigma = 1e-7;
  CHECK(single.number(0, "delta_t") == toa::compute_row(p, 0.0, toa::kDefaultTol).delta_t);
}

TEST_CASE("exit codes") {
  CHECK(run("scan --mass -1").exit_code == 2);
  CHECK(run("scan --tol 0.5").exit_code == 2);
  CHECK(run("scan --no-such-flag 1").exit_code == 2);
  CHECK(run("simulate --protocol C").exit_code == 2);
  CHECK(run("").exit_code == 2);
  CHECK(run("scan --sigma-min 1e-4 --sigma-max 1e-7").exit_code == 2);
  CHECK(run("scan --out /nonexistent-dir/x.csv").exit_code == 2);
  // A p-value can never reach 1.5.
  CHECK(run("simulate --trials 1000 --min-p 1.5").exit_code == 3);
  // Tolerance near double precision exhausts the subdivision budget here.
  const auto failed = run("scan --sigma 1.5848931924611131e-05 --tol 2e-14");
  CHECK(failed.exit_code == 4);
  const auto t = csv(failed.out);
  REQUIRE(t.rows.size() == 1);
  CHECK(std::isnan(t.number(0, "delta_t")));
  CHECK(!std::get<std::string>(t.rows[0][t.column_index("error")]).empty());
}

TEST_CASE("config file supplies defaults and flags override it") {
  const fs::path cfg = scratch_dir() / "run.ini";
  {
    std::ofstream f(cfg);
    f << "mass = 3.34e-27\nsigma-min = 1e-6\nsigma-max = 1e-5\nsigma-steps = 3\n";
  }
  const auto from_file = csv(run("scan --config " + cfg.string()).out);
  CHECK(std::stod(metadata(from_file, "mass")) == 3.34e-27);
  CHECK(from_file.rows.size() == 3);
  CHECK(from_file.number(0, "sigma") == 1e-6);

  const auto overridden = csv(run("scan --config " + cfg.string() + " --mass 1.67e-27 --sigma-steps 2").out);
  CHECK(std::stod(metadata(overridden, "mass")) == 1.67e-27);
  CHECK(overridden.rows.size() == 2);
  fs::remove(cfg);
}

TEST_CASE("json output carries the same table") {
  const auto c = csv(run("scan --sigma 1e-6").out);
  std::istringstream in(run("scan --sigma 1e-6 --format json").out);
  const auto j = toa::read_json(in);
  CHECK(j.columns == c.columns);
  CHECK(j.metadata == c.metadata);
  REQUIRE(j.rows.size() == 1);
  CHECK(j.number(0, "delta_t") == c.number(0, "delta_t"));
}

TEST_CASE("simulate is reproducible and thread-count independent") {
  const fs::path dir = scratch_dir();
  const std::string common = "simulate --trials 200000 --seed 123 --format csv";
  REQUIRE(run(common + " --threads 1 --out " + (dir / "a.csv").string()).exit_code == 0);
  REQUIRE(run(common + " --threads 1 --out " + (dir / "b.csv").string()).exit_code == 0);
  REQUIRE(run(common + " --threads 4 --out " + (dir / "c.csv").string()).exit_code == 0);
  const std::string a = slurp(dir / "a.csv");
  CHECK(!a.empty());
  CHECK(a == slurp(dir / "b.csv"));
  CHECK(a == slurp(dir / "c.csv"));

  const auto t = csv(a);
  CHECK(t.columns == std::vector<std::string>{"bin_left", "bin_right", "count", "analytic_mass"});
  CHECK(t.rows.size() == 50);
  CHECK(metadata(t, "seed") == "123");
  CHECK(std::stod(metadata(t, "chi2_p_value")) > 1e-4);

  const auto other = run("simulate --trials 200000 --seed 124");
  CHECK(other.out != a);
  fs::remove_all(dir);
}

TEST_CASE("simulate protocol A and the inverse-cdf sampler") {
  const auto a = run("simulate --protocol A --t-eval 1e-3 --trials 100000");
  CHECK(a.exit_code == 0);
  CHECK(metadata(csv(a.out), "protocol") == "A");
  const auto inv = run("simulate --sampler inverse-cdf --trials 100000");
  CHECK(inv.exit_code == 0);
  const auto custom = csv(run("simulate --trials 1000 --bins 10 --bin-min 0 --bin-width 1e-3").out);
  REQUIRE(custom.rows.size() == 10);
  CHECK(custom.number(0, "bin_left") == 0.0);
  CHECK(custom.number(9, "bin_right") == rel(1e-2, 1e-12));
}

TEST_CASE("pdf and verify subcommands") {
  const auto p = run("pdf --sigma 1e-6 --t-steps 101");
  REQUIRE(p.exit_code == 0);
  const auto t = csv(p.out);
  CHECK(t.columns == std::vector<std::string>{"t", "pdf", "cdf"});
  CHECK(t.rows.size() >= 101);
  CHECK(run("pdf --t-min 1 --t-max 0.5").exit_code == 2);

  const auto v = run("verify --q-min 1e-3 --q-max 1e-2 --q-steps 2 --ratio-min 1e-7 --ratio-max 1e-6 --ratio-steps 2");
  CHECK(v.exit_code == 0);
  const auto vt = csv(v.out);
  CHECK(vt.rows.size() == 4);
  CHECK(metadata(vt, "violations") == "0");
}
