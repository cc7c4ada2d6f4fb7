#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sklab/density.hpp"
#include "sklab/experiments.hpp"
#include "sklab/matrix.hpp"
#include "sklab/rng.hpp"

using namespace sklab;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("spec parsing") {
  const std::string good = R"({"kind":"UpperBound","sizes":[8,16],
      "eps_list":[0.01,0.001],"gamma_list":[0.6],"trials":3,"seed":5,
      "out_path":"x"})";
  const ExperimentSpec spec = parse_experiment_spec(good);
  CHECK(spec.kind == ExperimentKind::UpperBound);
  CHECK(spec.sizes == std::vector<int>{8, 16});
  CHECK(spec.trials == 3);
  CHECK(spec.seed == 5);

  CHECK_THROWS_AS(parse_experiment_spec("not json"), std::invalid_argument);
  CHECK_THROWS_AS(parse_experiment_spec(R"({"sizes":[4],"eps_list":[0.1]})"),
                  std::invalid_argument);  // kind missing
  CHECK_THROWS_AS(
      parse_experiment_spec(R"({"kind":"Nope","sizes":[4],"eps_list":[0.1]})"),
      std::invalid_argument);
  CHECK_THROWS_AS(
      parse_experiment_spec(
          R"({"kind":"UpperBound","sizes":[],"eps_list":[0.1]})"),
      std::invalid_argument);
  CHECK_THROWS_AS(
      parse_experiment_spec(
          R"({"kind":"UpperBound","sizes":[4],"eps_list":[2.0]})"),
      std::invalid_argument);
  CHECK_THROWS_AS(
      parse_experiment_spec(
          R"({"kind":"UpperBound","sizes":[4],"eps_list":[0.1],"trials":0})"),
      std::invalid_argument);
  // Override must agree with an explicit kind.
  CHECK_THROWS_AS(parse_experiment_spec(good, "LowerBound"),
                  std::invalid_argument);
  const ExperimentSpec forced = parse_experiment_spec(
      R"({"sizes":[4],"eps_list":[0.1]})", "ConditionNumber");
  CHECK(forced.kind == ExperimentKind::ConditionNumber);
}

TEST_CASE("uniform generator is deterministic and well distributed") {
  const Matrix a = random_dense(2, 0.7, 123);
  const Matrix b = random_dense(2, 0.7, 123);
  for (std::size_t i = 0; i < a.a.size(); ++i) {
    CHECK(a.a[i] == b.a[i]);
    CHECK(a.a[i] >= 0.0);
    CHECK(a.a[i] < 0.7);
  }
  CHECK(random_dense(2, 0.7, 124).a != a.a);

  const int n = 200;
  double sum = 0.0;
  const Matrix big = random_dense(n, 1.0, 9);
  for (double v : big.a) sum += v;
  const double mean = sum / (n * n);
  CHECK(std::fabs(mean - 0.5) <= 3.0 / std::sqrt(12.0 * n * n));
}

TEST_CASE("normalized uniform matrices are dense above half") {
  // At n = 200 the 2/5 threshold is still inside the binomial noise, but the
  // rho grid finds a witness for density above 1/2 essentially always.
  int ok = 0;
  for (int seed = 0; seed < 100; ++seed) {
    const Matrix norm = normalize_by_max(random_dense(200, 1.0, 3000 + seed));
    if (best_profile_over_grid(norm).gamma_max > 0.5) ++ok;
  }
  CHECK(ok >= 99);
}

TEST_CASE("normalized uniform matrices pass the 2/5-threshold bar at scale") {
  // Needs n large enough for the exponentially small failure fraction to
  // kick in; at n = 2000 the per-line shortfall chance is ~3e-7.
  const int n = 2000;
  int ok = 0;
  for (int seed = 0; seed < 100; ++seed) {
    const Matrix norm = normalize_by_max(random_dense(n, 1.0, 7000 + seed));
    const DensityProfile p = density_profile(norm, 0.4);
    if (p.gamma_max >= 6.0 / 11.0) ++ok;
  }
  CHECK(ok >= 99);
}

TEST_CASE("profile generator hits the requested density exactly") {
  const int n = 24;
  const double gamma = 0.6, rho = 0.3;
  const Matrix m = random_dense_with_profile(n, gamma, rho, 5);
  const DensityProfile p = density_profile(m, rho);
  const int band = ceil_gamma_n(gamma, n);
  for (int c : p.row_counts) CHECK(c == band);
  for (int c : p.col_counts) CHECK(c == band);
  CHECK(is_dense(p, gamma));
  // Deterministic per seed, different across seeds.
  CHECK(random_dense_with_profile(n, gamma, rho, 5).a == m.a);
  CHECK(random_dense_with_profile(n, gamma, rho, 6).a != m.a);
}

TEST_CASE("zero-one generator meets the line minimum") {
  const Matrix m = random_zero_one_dense(10, 0.6, 77);
  const DensityProfile p = density_profile(m, 1.0);
  CHECK(p.min_count >= ceil_gamma_n(0.6, 10));
  for (double v : m.a) CHECK((v == 0.0 || v == 1.0));
}

TEST_CASE("experiment output is bit-identical across reruns") {
  ExperimentSpec spec;
  spec.kind = ExperimentKind::UpperBound;
  spec.sizes = {6, 8};
  spec.eps_list = {1e-2, 1e-4};
  spec.trials = 3;
  spec.seed = 7;
  const ExperimentOutput a = run_experiment(spec);
  const ExperimentOutput b = run_experiment(spec);
  CHECK(a.csv_text == b.csv_text);
  CHECK(a.sidecar_json == b.sidecar_json);

  const std::vector<std::string> rows = lines_of(a.csv_text);
  REQUIRE(rows.size() == 1 + 2 * 2 * (3 + 1));
  CHECK(rows[0] == "kind,n,eps,gamma,trial,record,seed,iterations,value,status");
  CHECK(rows[1].substr(0, 11) == "UpperBound,");
  CHECK(a.sidecar_json.find("skrng-splitmix64-v1") != std::string::npos);
  CHECK(a.sidecar_json.find("\"UpperBound\"") != std::string::npos);

  // A different seed changes the table.
  spec.seed = 8;
  CHECK(run_experiment(spec).csv_text != a.csv_text);
}

TEST_CASE("slow-family sweep orders crossings by target accuracy") {
  ExperimentSpec spec;
  spec.kind = ExperimentKind::LowerBound;
  spec.sizes = {16};
  spec.eps_list = {1e-1, 1e-2};
  spec.gamma_list = {0.4};
  spec.seed = 1;
  const ExperimentOutput out = run_experiment(spec);
  const std::vector<std::string> rows = lines_of(out.csv_text);
  // 2 cells x (trial + median).
  REQUIRE(rows.size() == 5);
  long long iters[2] = {0, 0};
  int idx = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].find(",trial,") == std::string::npos) continue;
    std::istringstream ss(rows[r]);
    std::string field;
    for (int f = 0; f < 8; ++f) std::getline(ss, field, ',');
    iters[idx++] = std::stoll(field);
  }
  REQUIRE(idx == 2);
  // eps axis is sorted ascending, so the tighter target comes first.
  CHECK(iters[0] > iters[1]);
}

TEST_CASE("phase transition separates the two density regimes") {
  ExperimentSpec spec;
  spec.kind = ExperimentKind::PhaseTransition;
  spec.sizes = {16};
  spec.eps_list = {1e-2};
  spec.gamma_list = {0.4, 0.6};
  spec.trials = 2;
  spec.seed = 3;
  const ExperimentOutput out = run_experiment(spec);
  double slow_iters = -1, dense_iters = -1;
  for (const std::string& row : lines_of(out.csv_text)) {
    if (row.find(",median,") == std::string::npos) continue;
    std::istringstream ss(row);
    std::string field, gamma_field, value_field;
    for (int f = 0; f < 10; ++f) {
      std::getline(ss, field, ',');
      if (f == 3) gamma_field = field;
      if (f == 8) value_field = field;
    }
    if (gamma_field == "0.4") slow_iters = std::stod(value_field);
    if (gamma_field == "0.6") dense_iters = std::stod(value_field);
  }
  REQUIRE(slow_iters > 0);
  REQUIRE(dense_iters > 0);
  CHECK(slow_iters > 10.0 * dense_iters);
}

TEST_CASE("accuracy sweep compares against the oracle") {
  ExperimentSpec spec;
  spec.kind = ExperimentKind::PermanentAccuracy;
  spec.sizes = {6};
  spec.eps_list = {0.1};
  spec.trials = 2;
  spec.seed = 11;
  const ExperimentOutput out = run_experiment(spec);
  const std::vector<std::string> rows = lines_of(out.csv_text);
  int trials_seen = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const std::string& row = rows[r];
    if (row.find(",trial,") == std::string::npos) continue;
    ++trials_seen;
    std::istringstream ss(row);
    std::string field, value_field, status_field;
    for (int f = 0; f < 10; ++f) {
      std::getline(ss, field, ',');
      if (f == 8) value_field = field;
      if (f == 9) status_field = field;
    }
    REQUIRE(status_field == "ok");
    const double ratio = std::stod(value_field);
    CHECK(ratio > 0.5);
    CHECK(ratio < 2.0);
  }
  CHECK(trials_seen == 2);
}

TEST_CASE("writer emits both artifacts") {
  ExperimentSpec spec;
  spec.kind = ExperimentKind::ConditionNumber;
  spec.sizes = {8};
  spec.eps_list = {1e-6};
  spec.trials = 2;
  spec.seed = 2;
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "sklab-exp-test";
  std::filesystem::remove_all(dir);
  write_experiment(spec, dir.string());
  CHECK(std::filesystem::exists(dir / "results.csv"));
  CHECK(std::filesystem::exists(dir / "spec.json"));
  std::ifstream csv(dir / "results.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "kind,n,eps,gamma,trial,record,seed,iterations,value,status");
  std::filesystem::remove_all(dir);
}
