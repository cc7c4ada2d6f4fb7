#include "sklab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "sklab/density.hpp"
#include "sklab/estimator.hpp"
#include "sklab/permanent.hpp"
#include "sklab/rng.hpp"
#include "sklab/scaling.hpp"
#include "sklab/slow_instance.hpp"

namespace sklab {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr long long kSlowStepBudget = 2000000;
constexpr double kSlowFamilyEps = 1e-3;
constexpr double kProfileRho = 0.3;
constexpr double kAccuracyDelta = 0.2;

}  // namespace

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::UpperBound: return "UpperBound";
    case ExperimentKind::LowerBound: return "LowerBound";
    case ExperimentKind::PhaseTransition: return "PhaseTransition";
    case ExperimentKind::ConditionNumber: return "ConditionNumber";
    case ExperimentKind::PermanentAccuracy: return "PermanentAccuracy";
  }
  return "?";
}

ExperimentKind experiment_kind_from(const std::string& token) {
  for (ExperimentKind k :
       {ExperimentKind::UpperBound, ExperimentKind::LowerBound,
        ExperimentKind::PhaseTransition, ExperimentKind::ConditionNumber,
        ExperimentKind::PermanentAccuracy})
    if (token == to_string(k)) return k;
  throw std::invalid_argument("unknown experiment kind: " + token);
}

ExperimentSpec parse_experiment_spec(const std::string& json_text,
                                     const std::string& kind_override) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const ordered_json::parse_error& e) {
    throw std::invalid_argument(std::string("spec is not valid JSON: ") +
                                e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("spec must be a JSON object");
  ExperimentSpec spec;
  std::string kind_token;
  if (j.contains("kind")) kind_token = j.at("kind").get<std::string>();
  if (!kind_override.empty()) {
    if (!kind_token.empty() && kind_token != kind_override)
      throw std::invalid_argument("spec kind disagrees with --kind");
    kind_token = kind_override;
  }
  if (kind_token.empty())
    throw std::invalid_argument("experiment kind missing");
  spec.kind = experiment_kind_from(kind_token);
  if (!j.contains("sizes") || !j.at("sizes").is_array() ||
      j.at("sizes").empty())
    throw std::invalid_argument("spec needs a non-empty sizes array");
  for (const auto& v : j.at("sizes")) {
    const int n = v.get<int>();
    if (n < 1) throw std::invalid_argument("sizes must be >= 1");
    spec.sizes.push_back(n);
  }
  if (!j.contains("eps_list") || !j.at("eps_list").is_array() ||
      j.at("eps_list").empty())
    throw std::invalid_argument("spec needs a non-empty eps_list array");
  for (const auto& v : j.at("eps_list")) {
    const double e = v.get<double>();
    if (!(e > 0.0 && e < 1.0))
      throw std::invalid_argument("eps_list entries must lie in (0, 1)");
    spec.eps_list.push_back(e);
  }
  if (j.contains("gamma_list"))
    for (const auto& v : j.at("gamma_list"))
      spec.gamma_list.push_back(v.get<double>());
  if (j.contains("trials")) spec.trials = j.at("trials").get<int>();
  if (spec.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("out_path")) spec.out_path = j.at("out_path").get<std::string>();
  return spec;
}

Matrix random_dense(int n, double t, std::uint64_t seed) {
  if (n < 1 || !(t > 0.0))
    throw std::invalid_argument("random_dense needs n >= 1 and t > 0");
  CounterRng rng(seed);
  Matrix m = make_matrix(n, n);
  for (double& v : m.a) v = rng.uniform(0.0, t);
  return m;
}

Matrix random_dense_with_profile(int n, double gamma, double rho,
                                 std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("profile generator needs n >= 2");
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw std::invalid_argument("profile generator needs gamma in (0, 1]");
  if (!(rho > 0.0 && rho / n < 0.5))
    throw std::invalid_argument("profile generator needs 0 < rho/n < 1/2");
  const int band = ceil_gamma_n(gamma, n);
  CounterRng rng(seed);
  std::vector<int> rp(n), cp(n);
  for (int i = 0; i < n; ++i) rp[i] = cp[i] = i;
  rng.shuffle(rp);
  rng.shuffle(cp);
  Matrix m = make_matrix(n, n);
  // A shuffled circulant band: each line gets exactly `band` entries drawn
  // from [1/2, 1] and the rest strictly below rho/n.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int d = ((cp[j] - rp[i]) % n + n) % n;
      m.at(i, j) = d < band ? rng.uniform(0.5, 1.0)
                            : rng.uniform(0.0, 0.5 * rho / n);
    }
  return m;
}

Matrix random_zero_one_dense(int n, double min_gamma, std::uint64_t seed) {
  if (n < 1 || !(min_gamma > 0.0 && min_gamma <= 1.0))
    throw std::invalid_argument("zero-one generator needs gamma in (0, 1]");
  const int need = ceil_gamma_n(min_gamma, n);
  const double p = std::min(0.95, std::max(0.75, min_gamma + 0.25));
  for (int attempt = 0; attempt < 1000; ++attempt) {
    CounterRng rng(seed, CounterRng::derive_stream(0x01u, attempt));
    Matrix m = make_matrix(n, n);
    std::vector<int> rc(n, 0), cc(n, 0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (rng.next_double() < p) {
          m.at(i, j) = 1.0;
          ++rc[i];
          ++cc[j];
        }
    const int worst = std::min(*std::min_element(rc.begin(), rc.end()),
                               *std::min_element(cc.begin(), cc.end()));
    if (worst >= need) return m;
  }
  throw std::runtime_error("zero-one generator failed to hit the density");
}

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct Row {
  std::string n, eps, gamma, trial, record, seed, iterations, value, status;
};

void append_row(std::ostringstream& csv, const ExperimentSpec& spec,
                const Row& r) {
  csv << to_string(spec.kind) << ',' << r.n << ',' << r.eps << ',' << r.gamma
      << ',' << r.trial << ',' << r.record << ',' << r.seed << ','
      << r.iterations << ',' << r.value << ',' << r.status << '\n';
}

std::uint64_t cell_seed(const ExperimentSpec& spec, int n, std::size_t ei,
                        std::size_t gi, int trial) {
  const std::uint64_t packed = (static_cast<std::uint64_t>(n) << 32) |
                               (static_cast<std::uint64_t>(ei + 1) << 16) |
                               static_cast<std::uint64_t>(gi + 1);
  return CounterRng::derive_stream(
      spec.seed, static_cast<std::uint64_t>(spec.kind) + 1, packed,
      static_cast<std::uint64_t>(trial) + 1);
}

// Emits one median row over the values of the trial rows just written.
void append_median(std::ostringstream& csv, const ExperimentSpec& spec,
                   const Row& shape, const std::vector<double>& values,
                   bool all_ok) {
  Row r = shape;
  r.trial.clear();
  r.record = "median";
  r.seed.clear();
  r.iterations.clear();
  if (values.empty()) {
    r.value.clear();
    r.status = "error:no successful trials";
  } else {
    r.value = format_real(median_of(values));
    r.status = all_ok ? "ok" : "partial";
  }
  append_row(csv, spec, r);
}

const char* status_label(ScaleStatus s) {
  switch (s) {
    case ScaleStatus::Converged: return "ok";
    case ScaleStatus::IterationCapReached: return "iteration-cap";
    case ScaleStatus::NotScalableWarning: return "not-scalable";
  }
  return "?";
}

// Shared shape of the three kinds that scale random dense instances and
// report per-trial measurements.
template <typename Measure>
void sweep_random_dense(std::ostringstream& csv, const ExperimentSpec& spec,
                        Measure measure) {
  for (int n : spec.sizes)
    for (std::size_t ei = 0; ei < spec.eps_list.size(); ++ei) {
      const double eps = spec.eps_list[ei];
      std::vector<double> values;
      bool all_ok = true;
      Row shape;
      shape.n = std::to_string(n);
      shape.eps = format_real(eps);
      for (int trial = 0; trial < spec.trials; ++trial) {
        const std::uint64_t s = cell_seed(spec, n, ei, 0, trial);
        Row r = shape;
        r.trial = std::to_string(trial);
        r.record = "trial";
        r.seed = std::to_string(s);
        measure(n, eps, s, r);
        if (r.status == "ok" && !r.value.empty())
          values.push_back(std::strtod(r.value.c_str(), nullptr));
        else
          all_ok = false;
        append_row(csv, spec, r);
      }
      append_median(csv, spec, shape, values, all_ok);
    }
}

void run_upper_bound(std::ostringstream& csv, const ExperimentSpec& spec) {
  sweep_random_dense(
      csv, spec, [](int n, double eps, std::uint64_t s, Row& r) {
        RunOptions opt;
        opt.eps = eps;
        const ScalingResult res = run_scaling(random_dense(n, 1.0, s), opt);
        r.iterations = std::to_string(res.iterations);
        r.value = format_real(static_cast<double>(res.iterations));
        r.status = status_label(res.status);
      });
}

void run_condition_number(std::ostringstream& csv, const ExperimentSpec& spec) {
  sweep_random_dense(
      csv, spec, [](int n, double eps, std::uint64_t s, Row& r) {
        RunOptions opt;
        opt.eps = eps;
        const ScalingResult res = run_scaling(random_dense(n, 1.0, s), opt);
        r.iterations = std::to_string(res.iterations);
        r.value = format_real(condition_number(res));
        r.status = status_label(res.status);
      });
}

// Scales the slow construction once per (n, gamma) down to the smallest
// target and reads every crossing off the recorded error curve.
struct SlowRunCache {
  std::map<std::pair<int, int>, SlowRun> runs;  // key: (n, band)
  std::map<std::pair<int, int>, std::string> errors;

  const SlowRun* get(int n, double gamma, double stop_l1, std::string& err) {
    std::pair<int, int> key(n, 0);
    SlowParams p;
    try {
      p = make_slow_params(n, gamma, kSlowFamilyEps);
    } catch (const std::invalid_argument& e) {
      err = std::string("error:") + e.what();
      return nullptr;
    }
    key.second = p.band;
    auto it = runs.find(key);
    if (it == runs.end()) {
      SlowRunOptions opt;
      opt.max_k = kSlowStepBudget;
      opt.stop_l1 = stop_l1;
      it = runs.emplace(key, run_slow_instance(build_slow_matrix(p), opt))
               .first;
    }
    return &it->second;
  }
};

void slow_row(const SlowRun& run, double eps, Row& r) {
  const long long k = first_k_below(run.l1, eps);
  if (k >= 0) {
    r.iterations = std::to_string(k);
    r.value = format_real(static_cast<double>(k));
    r.status = "ok";
  } else {
    r.iterations = std::to_string(run.kmax);
    r.value = format_real(static_cast<double>(run.kmax));
    r.status = "iteration-cap";
  }
}

void run_lower_bound(std::ostringstream& csv, const ExperimentSpec& spec) {
  std::vector<double> gammas =
      spec.gamma_list.empty() ? std::vector<double>{0.4} : spec.gamma_list;
  const double stop =
      *std::min_element(spec.eps_list.begin(), spec.eps_list.end());
  SlowRunCache cache;
  for (int n : spec.sizes)
    for (std::size_t ei = 0; ei < spec.eps_list.size(); ++ei)
      for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
        const double eps = spec.eps_list[ei];
        Row shape;
        shape.n = std::to_string(n);
        shape.eps = format_real(eps);
        shape.gamma = format_real(gammas[gi]);
        Row r = shape;
        r.trial = "0";
        r.record = "trial";
        std::string err;
        const SlowRun* run = cache.get(n, gammas[gi], stop, err);
        if (!run) {
          r.status = err;
        } else {
          slow_row(*run, eps, r);
        }
        append_row(csv, spec, r);
        std::vector<double> values;
        if (!r.value.empty() && r.status == "ok")
          values.push_back(std::strtod(r.value.c_str(), nullptr));
        append_median(csv, spec, shape, values, r.status == "ok");
      }
}

void run_phase_transition(std::ostringstream& csv, const ExperimentSpec& spec) {
  if (spec.gamma_list.empty())
    throw std::invalid_argument("PhaseTransition needs a gamma_list");
  const double stop =
      *std::min_element(spec.eps_list.begin(), spec.eps_list.end());
  SlowRunCache cache;
  for (int n : spec.sizes)
    for (std::size_t ei = 0; ei < spec.eps_list.size(); ++ei)
      for (std::size_t gi = 0; gi < spec.gamma_list.size(); ++gi) {
        const double eps = spec.eps_list[ei];
        const double gamma = spec.gamma_list[gi];
        Row shape;
        shape.n = std::to_string(n);
        shape.eps = format_real(eps);
        shape.gamma = format_real(gamma);
        std::vector<double> values;
        bool all_ok = true;
        if (gamma < 0.5) {
          // Below the threshold: the deterministic adversarial instance.
          Row r = shape;
          r.trial = "0";
          r.record = "trial";
          std::string err;
          const SlowRun* run = cache.get(n, gamma, stop, err);
          if (!run)
            r.status = err;
          else
            slow_row(*run, eps, r);
          if (r.status == "ok")
            values.push_back(std::strtod(r.value.c_str(), nullptr));
          else
            all_ok = false;
          append_row(csv, spec, r);
        } else {
          for (int trial = 0; trial < spec.trials; ++trial) {
            const std::uint64_t s = cell_seed(spec, n, ei, gi, trial);
            Row r = shape;
            r.trial = std::to_string(trial);
            r.record = "trial";
            r.seed = std::to_string(s);
            try {
              RunOptions opt;
              opt.eps = eps;
              const ScalingResult res = run_scaling(
                  random_dense_with_profile(n, gamma, kProfileRho, s), opt);
              r.iterations = std::to_string(res.iterations);
              r.value = format_real(static_cast<double>(res.iterations));
              r.status = status_label(res.status);
            } catch (const std::exception& e) {
              r.status = std::string("error:") + e.what();
            }
            if (r.status == "ok")
              values.push_back(std::strtod(r.value.c_str(), nullptr));
            else
              all_ok = false;
            append_row(csv, spec, r);
          }
        }
        append_median(csv, spec, shape, values, all_ok);
      }
}

void run_permanent_accuracy(std::ostringstream& csv,
                            const ExperimentSpec& spec) {
  for (int n : spec.sizes)
    for (std::size_t ei = 0; ei < spec.eps_list.size(); ++ei) {
      const double eps = spec.eps_list[ei];
      Row shape;
      shape.n = std::to_string(n);
      shape.eps = format_real(eps);
      std::vector<double> values;
      bool all_ok = true;
      for (int trial = 0; trial < spec.trials; ++trial) {
        const std::uint64_t s = cell_seed(spec, n, ei, 0, trial);
        Row r = shape;
        r.trial = std::to_string(trial);
        r.record = "trial";
        r.seed = std::to_string(s);
        try {
          if (n > 30)
            throw std::invalid_argument("oracle needs n <= 30");
          const Matrix a = random_zero_one_dense(n, 0.6, s);
          const double oracle = exact_permanent(a);
          const PermanentEstimate est =
              estimate_permanent(a, eps, kAccuracyDelta, s);
          r.iterations = std::to_string(est.samples);
          r.value = format_real(est.estimate / oracle);
          r.status = "ok";
        } catch (const std::exception& e) {
          r.status = std::string("error:") + e.what();
        }
        if (r.status == "ok")
          values.push_back(std::strtod(r.value.c_str(), nullptr));
        else
          all_ok = false;
        append_row(csv, spec, r);
      }
      append_median(csv, spec, shape, values, all_ok);
    }
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentSpec& spec) {
  ExperimentSpec s = spec;
  std::sort(s.sizes.begin(), s.sizes.end());
  std::sort(s.eps_list.begin(), s.eps_list.end());
  std::sort(s.gamma_list.begin(), s.gamma_list.end());

  std::ostringstream csv;
  csv << "kind,n,eps,gamma,trial,record,seed,iterations,value,status\n";
  switch (s.kind) {
    case ExperimentKind::UpperBound: run_upper_bound(csv, s); break;
    case ExperimentKind::LowerBound: run_lower_bound(csv, s); break;
    case ExperimentKind::PhaseTransition: run_phase_transition(csv, s); break;
    case ExperimentKind::ConditionNumber: run_condition_number(csv, s); break;
    case ExperimentKind::PermanentAccuracy:
      run_permanent_accuracy(csv, s);
      break;
  }

  ordered_json sidecar;
  sidecar["kind"] = to_string(s.kind);
  sidecar["sizes"] = s.sizes;
  sidecar["eps_list"] = s.eps_list;
  sidecar["gamma_list"] = s.gamma_list;
  sidecar["trials"] = s.trials;
  sidecar["seed"] = s.seed;
  sidecar["out_path"] = s.out_path;
  sidecar["rng_algorithm"] = kRngAlgorithmId;

  ExperimentOutput out;
  out.csv_text = csv.str();
  out.sidecar_json = sidecar.dump(2) + "\n";
  return out;
}

void write_experiment(const ExperimentSpec& spec, const std::string& out_dir) {
  const ExperimentOutput out = run_experiment(spec);
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  std::ofstream csv(dir / "results.csv", std::ios::binary);
  csv << out.csv_text;
  std::ofstream side(dir / "spec.json", std::ios::binary);
  side << out.sidecar_json;
  if (!csv || !side)
    throw std::runtime_error("could not write experiment outputs");
}

}  // namespace sklab
