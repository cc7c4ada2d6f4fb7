#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sklab/matrix.hpp"

namespace sklab {

enum class ExperimentKind {
  UpperBound,
  LowerBound,
  PhaseTransition,
  ConditionNumber,
  PermanentAccuracy,
};

const char* to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from(const std::string& token);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::UpperBound;
  std::vector<int> sizes;
  std::vector<double> eps_list;
  std::vector<double> gamma_list;
  int trials = 1;
  std::uint64_t seed = 0;
  std::string out_path;
};

// Parses the JSON spec file.  The kind key is optional when the caller fixes
// it separately; throws std::invalid_argument on malformed input.
ExperimentSpec parse_experiment_spec(const std::string& json_text,
                                     const std::string& kind_override = "");

// Square matrix with i.i.d. uniform [0, t] entries.
Matrix random_dense(int n, double t, std::uint64_t seed);

// Random matrix that is exactly (gamma, rho)-dense: every row and column has
// ceil(gamma n) entries drawn above rho/n and the rest strictly below.
Matrix random_dense_with_profile(int n, double gamma, double rho,
                                 std::uint64_t seed);

// Random 0-1 matrix whose every row and column has at least ceil(min_gamma n)
// ones; deterministically retries until the count holds.
Matrix random_zero_one_dense(int n, double min_gamma, std::uint64_t seed);

struct ExperimentOutput {
  std::string csv_text;      // results table, one trial row per cell + medians
  std::string sidecar_json;  // the spec plus the generator identifier
};

ExperimentOutput run_experiment(const ExperimentSpec& spec);

// Runs the sweep and writes <out_dir>/results.csv and <out_dir>/spec.json.
void write_experiment(const ExperimentSpec& spec, const std::string& out_dir);

}  // namespace sklab
