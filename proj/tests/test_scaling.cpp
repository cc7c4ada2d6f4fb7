#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "sklab/experiments.hpp"
#include "sklab/matrix.hpp"
#include "sklab/permanent.hpp"
#include "sklab/rng.hpp"
#include "sklab/scaling.hpp"

using namespace sklab;

namespace {

Matrix from(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m;
  m.rows = static_cast<int>(rows.size());
  m.cols = static_cast<int>(rows.begin()->size());
  for (const auto& r : rows)
    for (double v : r) m.a.push_back(v);
  return m;
}

Matrix random_positive(int n, std::uint64_t seed) {
  CounterRng rng(seed);
  Matrix m = make_matrix(n, n);
  for (double& v : m.a) v = 0.05 + rng.next_double();
  return m;
}

}  // namespace

TEST_CASE("initialization row-normalizes") {
  const ScalingState s = init_state(from({{2, 2}, {1, 1}}));
  CHECK(s.k == 0);
  for (double v : s.current.a) CHECK(v == doctest::Approx(0.5));
  CHECK(s.log_x == std::vector<double>{0.0, 0.0});
  CHECK(s.log_y == std::vector<double>{0.0, 0.0});
  CHECK(s.log_r0[0] == doctest::Approx(std::log(4.0)));
  CHECK(s.log_r0[1] == doctest::Approx(std::log(2.0)));

  const ScalingState id = init_state(from({{1, 0}, {0, 1}}));
  CHECK(id.current.at(0, 0) == 1.0);
  CHECK(id.current.at(0, 1) == 0.0);
}

TEST_CASE("initialization rejects zero lines") {
  CHECK_THROWS_AS(init_state(from({{0, 0}, {1, 1}})), NotScalableError);
  CHECK_THROWS_AS(init_state(from({{1, 0}, {1, 0}})), NotScalableError);
  CHECK_THROWS_AS(init_state(make_matrix(2, 3, 1.0)), std::invalid_argument);
}

TEST_CASE("alpha of the normalized all-ones matrix is zero") {
  const ScalingState s = init_state(make_matrix(5, 5, 1.0));
  CHECK(alpha_accuracy(s.current) == doctest::Approx(0.0));
}

TEST_CASE("doubly stochastic fixed point") {
  ScalingState s = init_state(from({{0.5, 0.5}, {0.5, 0.5}}));
  for (int step = 0; step < 6; ++step) {
    REQUIRE(sk_step(s));
    for (double v : s.current.a) CHECK(v == doctest::Approx(0.5));
  }

  RunOptions opt;
  opt.eps = 1e-9;
  const ScalingResult res = run_scaling(make_matrix(7, 7, 1.0), opt);
  CHECK(res.status == ScaleStatus::Converged);
  CHECK(res.iterations == 0);
}

TEST_CASE("step parity: column pass into odd k, row pass into even k") {
  ScalingState s = init_state(random_positive(5, 21));
  for (int step = 0; step < 8; ++step) {
    REQUIRE(sk_step(s));
    const StandardSide side = standardized_side(s.current);
    if (s.k % 2 == 1)
      CHECK((side == StandardSide::Cols || side == StandardSide::Both));
    else
      CHECK((side == StandardSide::Rows || side == StandardSide::Both));
  }
}

TEST_CASE("2x2 limit has the closed-form entries") {
  RunOptions opt;
  opt.eps = 1e-13;
  const ScalingResult res = run_scaling(from({{2, 1}, {1, 1}}), opt);
  REQUIRE(res.status == ScaleStatus::Converged);
  const double p = std::sqrt(2.0) / (std::sqrt(2.0) + 1.0);
  CHECK(res.final.at(0, 0) == doctest::Approx(p).epsilon(1e-6));
  CHECK(res.final.at(0, 1) == doctest::Approx(1.0 - p).epsilon(1e-6));
  CHECK(res.final.at(1, 0) == doctest::Approx(1.0 - p).epsilon(1e-6));
  CHECK(res.final.at(1, 1) == doctest::Approx(p).epsilon(1e-6));
}

TEST_CASE("random dense 64x64 converges within the log bound") {
  RunOptions opt;
  opt.eps = 1e-6;
  const ScalingResult res = run_scaling(random_dense(64, 1.0, 5), opt);
  CHECK(res.status == ScaleStatus::Converged);
  const double cap = 8.0 * (std::log(64.0) + std::log(1e6));
  CHECK(static_cast<double>(res.iterations) <= cap);
}

TEST_CASE("iteration cap reported") {
  RunOptions opt;
  opt.eps = 1e-14;
  opt.max_iters = 2;
  const ScalingResult res = run_scaling(from({{2, 1}, {1, 1}}), opt);
  CHECK(res.status == ScaleStatus::IterationCapReached);
  CHECK(res.iterations == 2);
}

TEST_CASE("observer sees every iterate from zero") {
  RunOptions opt;
  opt.eps = 1e-8;
  long long next_k = 0;
  opt.observer = [&](const ScalingState& s) {
    CHECK(s.k == next_k);
    ++next_k;
  };
  const ScalingResult res = run_scaling(random_positive(6, 31), opt);
  CHECK(next_k == res.iterations + 1);
}

TEST_CASE("trace stride keeps every stride-th iterate") {
  RunOptions opt;
  opt.eps = 1e-10;
  opt.want_trace = true;
  opt.trace_stride = 2;
  const ScalingResult res = run_scaling(random_positive(6, 32), opt);
  for (const TraceRow& row : res.trace.rows) CHECK(row.k % 2 == 0);
}

TEST_CASE("free-side product never exceeds one") {
  RunOptions opt;
  opt.eps = 1e-10;
  opt.want_trace = true;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const ScalingResult res = run_scaling(random_positive(8, seed), opt);
    for (const TraceRow& row : res.trace.rows)
      CHECK(row.log_prod_sums <= 1e-12);
  }
}

TEST_CASE("extreme free-side sums move toward one in steps of two") {
  RunOptions opt;
  opt.eps = 1e-10;
  opt.want_trace = true;
  for (std::uint64_t seed = 100; seed < 200; ++seed) {
    const ScalingResult res = run_scaling(random_positive(4, seed), opt);
    CHECK(assert_monotone(res.trace));
  }
}

TEST_CASE("reversed trace fails the monotone check") {
  RunOptions opt;
  opt.eps = 1e-10;
  opt.want_trace = true;
  ScalingResult res = run_scaling(from({{3, 1, 1}, {1, 2, 1}, {1, 1, 1}}), opt);
  REQUIRE(res.trace.rows.size() >= 5);
  // Keep an odd row count so reversing preserves iterate parity; otherwise
  // every compared extreme comes from a just-standardized side and sits at 1.
  if (res.trace.rows.size() % 2 == 0) res.trace.rows.pop_back();
  ScalingTrace reversed = res.trace;
  for (std::size_t i = 0; i < reversed.rows.size(); ++i) {
    reversed.rows[i] = res.trace.rows[res.trace.rows.size() - 1 - i];
    reversed.rows[i].k = static_cast<long long>(i);
  }
  CHECK_FALSE(assert_monotone(reversed));
}

TEST_CASE("scaling vectors reproduce the iterate") {
  ScalingState s = init_state(random_positive(7, 77));
  for (int step = 0; step < 40; ++step) REQUIRE(sk_step(s));
  CHECK(reconstruction_max_rel_error(s) < 1e-11);
}

TEST_CASE("each pass divides the permanent by the product of sums") {
  CounterRng seeds(5);
  for (int trial = 0; trial < 10; ++trial) {
    ScalingState s = init_state(random_positive(5, seeds.next_u64()));
    for (int step = 0; step < 12; ++step) {
      const double before = exact_permanent(s.current);
      const bool col_pass = ((s.k + 1) % 2) != 0;
      const std::vector<double> sums =
          col_pass ? col_sums(s.current) : row_sums(s.current);
      REQUIRE(sk_step(s));
      const double after = exact_permanent(s.current);
      double inv_prod = 1.0;
      for (double v : sums) inv_prod /= v;
      CHECK(std::fabs(after - before * inv_prod) / after <= 1e-9);
    }
  }
}

TEST_CASE("no-excursion report on already-balanced input") {
  RunOptions opt;
  opt.eps = 1e-9;
  opt.want_trace = true;
  const ScalingResult res = run_scaling(make_matrix(6, 6, 1.0), opt);
  const PhaseOneReport rep = assert_phase1(res.trace, 0.2, 6, 0.5);
  CHECK(rep.count == 0);
  CHECK(rep.ok);
}

TEST_CASE("trace csv format") {
  RunOptions opt;
  opt.eps = 1e-6;
  opt.want_trace = true;
  const ScalingResult res = run_scaling(from({{2, 1}, {1, 1}}), opt);
  std::ostringstream out;
  write_trace_csv(out, res.trace);
  std::istringstream lines(out.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header ==
        "k,side,l1_row,l1_col,l2_row,l2_col,max_row,min_row,max_col,min_col,"
        "prod_sums");
  std::string first;
  std::getline(lines, first);
  CHECK(first.substr(0, 6) == "0,row,");
  std::string second;
  if (std::getline(lines, second)) CHECK(second.substr(0, 6) == "1,col,");
}
