#include <doctest.h>

#include "test_util.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <sstream>

#include "toa/errors.hpp"
#include "toa/sweep.hpp"
#include "toa/table.hpp"

using toa::Cell;
using toa::PhysicalParams;
using toa::Table;

namespace {

PhysicalParams hydrogen(double sigma = 1e-6) { return {1.67e-27, 9.8, 1e-5, sigma, toa::kCodataHbar}; }

PhysicalParams groups(double q, double r) { return toa::params_from_groups(1.67e-27, 9.8, toa::kCodataHbar, q, r); }

// Numbers compare by value (NaN equal to NaN, int and double interchangeable),
// strings exactly.
bool same_cell(const Cell& a, const Cell& b) {
  auto as_number = [](const Cell& c, double& out) {
    if (const auto* d = std::get_if<double>(&c)) return out = *d, true;
    if (const auto* i = std::get_if<std::int64_t>(&c)) return out = static_cast<double>(*i), true;
    return false;
  };
  double x = 0.0;
  double y = 0.0;
  const bool nx = as_number(a, x);
  const bool ny = as_number(b, y);
  if (nx != ny) return false;
  if (!nx) return std::get<std::string>(a) == std::get<std::string>(b);
  return (std::isnan(x) && std::isnan(y)) || x == y;
}

bool same_table(const Table& a, const Table& b) {
  if (a.metadata != b.metadata || a.columns != b.columns || a.rows.size() != b.rows.size()) return false;
  for (std::size_t r = 0; r < a.rows.size(); ++r) {
    if (a.rows[r].size() != b.rows[r].size()) return false;
    for (std::size_t c = 0; c < a.rows[r].size(); ++c) {
      if (!same_cell(a.rows[r][c], b.rows[r][c])) return false;
    }
  }
  return true;
}

Table random_table(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind(0, 5);
  std::uniform_int_distribution<std::int64_t> ints(-1'000'000'000'000, 1'000'000'000'000);
  const std::vector<std::string> words = {"FAR_FIELD_QUANTUM", "a,b", "say \"hi\"", "", "x y", "NEAR_FIELD"};
  std::uniform_int_distribution<std::size_t> word(0, words.size() - 1);
  Table t;
  t.metadata = {{"tool", "toa test"}, {"seed", std::to_string(rng() % 1000)}};
  t.columns = {"c0", "c1", "c2", "c3"};
  for (int r = 0; r < 20; ++r) {
    std::vector<Cell> row;
    for (int c = 0; c < 4; ++c) {
      switch (kind(rng)) {
        case 0: {
          double d = 0.0;
          do {
            d = std::bit_cast<double>(rng());
          } while (!std::isfinite(d));
          row.emplace_back(d);
          break;
        }
        case 1:
          row.emplace_back(std::ldexp(static_cast<double>(rng() >> 11), -40));
          break;
        case 2:
          row.emplace_back(ints(rng));
          break;
        case 3:
          row.emplace_back(words[word(rng)]);
          break;
        case 4:
          row.emplace_back(std::numeric_limits<double>::quiet_NaN());
          break;
        default:
          row.emplace_back(rng() % 2 ? std::numeric_limits<double>::infinity()
                                     : -std::numeric_limits<double>::infinity());
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace

TEST_CASE("format_double round-trips every finite double") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100000; ++i) {
    const double d = std::bit_cast<double>(rng());
    if (!std::isfinite(d)) continue;
    const std::string s = toa::format_double(d);
    CHECK(std::strtod(s.c_str(), nullptr) == d);
  }
  CHECK(toa::format_double(std::nan("")) == "nan");
  CHECK(toa::format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(toa::format_double(0.5) == "0.5");
}

TEST_CASE("CSV and JSON round-trip random tables") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    const Table t = random_table(rng);
    std::stringstream csv;
    toa::write_csv(csv, t);
    CHECK(same_table(toa::read_csv(csv), t));
    std::stringstream json;
    toa::write_json(json, t);
    CHECK(same_table(toa::read_json(json), t));
  }
}

TEST_CASE("CSV layout: metadata comments, header, rows") {
  Table t;
  t.metadata = {{"command", "scan"}};
  t.columns = {"a", "b"};
  t.rows = {{1.5, std::string("x,y")}};
  std::ostringstream out;
  toa::write_csv(out, t);
  CHECK(out.str() == "# command: scan\na,b\n1.5,\"x,y\"\n");
  CHECK(t.column_index("b") == 1);
  CHECK(t.number(0, "a") == 1.5);
  CHECK(std::isnan(t.number(0, "b")));
  CHECK_THROWS_AS((void)t.column_index("c"), toa::ValidationError);
}

TEST_CASE("log_space") {
  const auto v = toa::log_space(1e-7, 1e-4, 4);
  REQUIRE(v.size() == 4);
  CHECK(v.front() == 1e-7);
  CHECK(v.back() == 1e-4);
  CHECK(v[1] == rel(1e-6, 1e-14));
  CHECK(toa::log_space(2.0, 2.0, 1) == std::vector<double>{2.0});
  CHECK_THROWS_AS(toa::log_space(1.0, 2.0, 1), toa::ValidationError);
  CHECK_THROWS_AS(toa::log_space(2.0, 1.0, 5), toa::ValidationError);
  CHECK_THROWS_AS(toa::log_space(0.0, 1.0, 5), toa::ValidationError);
  CHECK_THROWS_AS(toa::log_space(1.0, 2.0, 0), toa::ValidationError);
}

TEST_CASE("a scan equals the corresponding single-point rows") {
  toa::SweepSpec spec;
  spec.base = hydrogen();
  spec.sigma_min = 1e-7;
  spec.sigma_max = 1e-4;
  spec.sigma_steps = 7;
  const auto rows = toa::run_scan(spec);
  const auto threaded = toa::run_scan(spec, 3);
  REQUIRE(rows.size() == 7);
  const auto sigmas = spec.sigmas();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    PhysicalParams p = spec.base;
    p.sigma = sigmas[i];
    const auto single = toa::compute_row(p, spec.t_eval, spec.tol);
    CHECK(rows[i].ok());
    CHECK(rows[i].sigma == sigmas[i]);
    CHECK(rows[i].delta_t == single.delta_t);
    CHECK(rows[i].mean_toa == single.mean_toa);
    CHECK(rows[i].ratio == single.ratio);
    CHECK(threaded[i].delta_t == rows[i].delta_t);
    CHECK(rows[i].ratio >= 1.0 - toa::kBoundSlack);
    CHECK(rows[i].product == rel(rows[i].delta_t * rows[i].delta_x, 1e-15));
  }
  const Table t = toa::scan_table(spec, rows);
  CHECK(t.rows.size() == 7);
  CHECK(t.columns.size() == t.rows[0].size());
  CHECK(std::get<std::string>(t.rows[0][t.column_index("regime")]) == toa::to_string(rows[0].regime));
  CHECK(t.number(3, "delta_t") == rows[3].delta_t);

  toa::SweepSpec bad = spec;
  bad.sigma_steps = 1;
  CHECK_THROWS_AS(toa::run_scan(bad), toa::ValidationError);
  bad = spec;
  bad.tol = 0.5;
  CHECK_THROWS_AS(toa::run_scan(bad), toa::ValidationError);
  bad = spec;
  bad.t_eval = -1;
  CHECK_THROWS_AS(toa::run_scan(bad), toa::ValidationError);
}

TEST_CASE("pdf tables integrate to one in every regime") {
  for (const auto& p : {hydrogen(1e-6), groups(1e-4, 1e-8), groups(1e3, 1e-2), groups(0.1, 1e4), groups(0.5, 0.5)}) {
    const Table t = toa::pdf_table(p, {});
    const std::size_t n = t.rows.size();
    REQUIRE(n >= 2001);
    double area = 0.0;
    double prev_cdf = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = t.number(i, "cdf");
      CHECK(c >= prev_cdf);
      prev_cdf = c;
      CHECK(t.number(i, "pdf") >= 0.0);
      if (i > 0) {
        const double dt = t.number(i, "t") - t.number(i - 1, "t");
        CHECK(dt > 0.0);
        area += 0.5 * dt * (t.number(i, "pdf") + t.number(i - 1, "pdf"));
      }
    }
    CHECK(std::abs(area - 1.0) < 1e-4);
    CHECK(t.number(n - 1, "cdf") >= 1.0 - 1e-6);
  }
}

TEST_CASE("the semiclassical pdf peaks at t_c") {
  const PhysicalParams p = groups(1e-4, 1e-8);
  const Table t = toa::pdf_table(p, {});
  std::size_t best = 0;
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    if (t.number(i, "pdf") > t.number(best, "pdf")) best = i;
  }
  const double tc = toa::derive_scales(p).t_c;
  CHECK(std::abs(t.number(best, "t") / tc - 1.0) < 1e-3);
}

TEST_CASE("pdf grid honours explicit bounds and rejects bad ones") {
  const toa::ToaDistribution d(hydrogen());
  toa::PdfGridSpec spec;
  spec.t_min = 1e-4;
  spec.t_max = 1e-2;
  spec.steps = 11;
  const auto grid = toa::pdf_grid(d, spec);
  CHECK(grid.front() == 1e-4);
  CHECK(grid.back() == 1e-2);
  CHECK(grid.size() >= 11);
  spec.t_max = 1e-5;
  CHECK_THROWS_AS(toa::pdf_grid(d, spec), toa::ValidationError);
  spec.t_max = 1e-2;
  spec.steps = 1;
  CHECK_THROWS_AS(toa::pdf_grid(d, spec), toa::ValidationError);
}

TEST_CASE("verify on a one-cell grid") {
  toa::VerifyGrid grid;
  grid.q_min = grid.q_max = 1e-4;
  grid.q_steps = 1;
  grid.ratio_min = grid.ratio_max = 1e-7;
  grid.ratio_steps = 1;
  const auto sum = toa::run_verify(grid);
  REQUIRE(sum.cells.size() == 1);
  const auto& c = sum.cells[0];
  CHECK(c.error.empty());
  CHECK(c.regime == toa::Regime::FarFieldSemiclassical);
  CHECK(c.conjecture_rel_err < 1e-6);
  CHECK(c.bound_ratio == rel(1.0, 1e-3));
  CHECK(c.energy_ratio >= 1.0);
  CHECK(c.delay_over_tc == rel(0.5e-8, 0.1));
  CHECK(sum.exit_code() == toa::ExitCode::Ok);
  const Table t = toa::verify_table(grid, sum);
  CHECK(t.rows.size() == 1);
  CHECK(t.number(0, "q") == rel(1e-4, 1e-13));

  grid.q_steps = 0;
  CHECK_THROWS_AS(toa::run_verify(grid), toa::ValidationError);
}

TEST_CASE("verify exit codes") {
  toa::VerifySummary sum;
  CHECK(sum.exit_code() == toa::ExitCode::Ok);
  sum.n_violations = 1;
  CHECK(sum.exit_code() == toa::ExitCode::BoundViolation);
  sum.n_failures = 1;
  CHECK(sum.exit_code() == toa::ExitCode::QuadratureFailure);
}
