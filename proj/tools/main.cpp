#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "sklab/density.hpp"
#include "sklab/estimator.hpp"
#include "sklab/experiments.hpp"
#include "sklab/matrix.hpp"
#include "sklab/permanent.hpp"
#include "sklab/rng.hpp"
#include "sklab/scaling.hpp"
#include "sklab/slow_instance.hpp"

namespace {

using sklab::Matrix;
using ordered_json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitNotScalable = 3;
constexpr int kExitIterationCap = 4;

void emit(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

int run_scale(const std::string& in, double eps, const std::string& norm,
              long long max_iters, const std::string& trace_path) {
  sklab::RunOptions opt;
  opt.eps = eps;
  opt.max_iters = max_iters;
  if (norm == "l1")
    opt.norm = sklab::Norm::L1;
  else if (norm == "l2")
    opt.norm = sklab::Norm::L2;
  else
    throw std::invalid_argument("--norm must be l1 or l2");
  opt.want_trace = true;

  const Matrix a = sklab::read_matrix_file(in);
  const sklab::ScalingResult res = sklab::run_scaling(a, opt);
  if (!trace_path.empty()) {
    std::ofstream out(trace_path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write " + trace_path);
    sklab::write_trace_csv(out, res.trace);
  }

  const sklab::DeviationReport dev = sklab::deviation(res.final);
  ordered_json j;
  j["status"] = sklab::to_string(res.status);
  j["iterations"] = res.iterations;
  j["l1_error"] = dev.l1_row + dev.l1_col;
  j["l2_error"] = dev.l2_row + dev.l2_col;
  j["max_deviation"] = dev.max_deviation;
  j["condition_number"] = sklab::condition_number(res);
  emit(j);
  if (res.status == sklab::ScaleStatus::NotScalableWarning)
    return kExitNotScalable;
  if (res.status == sklab::ScaleStatus::IterationCapReached)
    return kExitIterationCap;
  return kExitOk;
}

int run_construct(const std::string& theorem, int n, int m, double gamma,
                  double eps, const std::string& out) {
  Matrix a;
  if (theorem == "4.1") {
    if (n <= 0) throw std::invalid_argument("--theorem 4.1 needs --n");
    a = sklab::build_slow_matrix(sklab::make_slow_params(n, gamma, eps));
  } else if (theorem == "4.3") {
    if (m <= 0) throw std::invalid_argument("--theorem 4.3 needs --m");
    a = sklab::build_padded_slow_matrix(m, gamma, eps);
  } else {
    throw std::invalid_argument("--theorem must be 4.1 or 4.3");
  }
  sklab::write_matrix_file(out, a);
  ordered_json j;
  j["file"] = out;
  j["rows"] = a.rows;
  j["cols"] = a.cols;
  emit(j);
  return kExitOk;
}

int run_density(const std::string& in, double rho, bool rho_grid) {
  const Matrix a = sklab::read_matrix_file(in);
  const sklab::DensityProfile p = rho_grid
                                      ? sklab::best_profile_over_grid(a)
                                      : sklab::density_profile(a, rho);
  ordered_json j;
  j["rho"] = p.rho;
  j["gamma_max"] = p.gamma_max;
  j["row_counts"] = p.row_counts;
  j["col_counts"] = p.col_counts;
  j["dense_above_half"] = p.gamma_max > 0.5;
  emit(j);
  return kExitOk;
}

int run_perm_exact(const std::string& in) {
  const Matrix a = sklab::read_matrix_file(in);
  const double per = sklab::exact_permanent(a);
  ordered_json j;
  j["permanent"] = per;
  j["is_zero"] = sklab::permanent_is_zero(a);
  emit(j);
  return kExitOk;
}

int run_perm_estimate(const std::string& in, double eps, double delta,
                      std::uint64_t seed) {
  const Matrix a = sklab::read_matrix_file(in);
  const sklab::PermanentEstimate est =
      sklab::estimate_permanent(a, eps, delta, seed);
  ordered_json j;
  j["estimate"] = est.estimate;
  j["log_estimate"] = est.log_estimate;
  j["samples"] = est.samples;
  j["rel_half_width"] = est.rel_half_width;
  j["scaled_max_deviation"] = est.scaled_max_deviation;
  j["method"] = est.method;
  emit(j);
  return kExitOk;
}

ordered_json item_to_json(const sklab::ItemCheck& item) {
  ordered_json j;
  j["name"] = item.name;
  j["checked"] = item.checked;
  j["pass"] = item.pass;
  if (!item.pass) j["first_violation_k"] = item.first_violation_k;
  if (!item.detail.empty()) j["detail"] = item.detail;
  return j;
}

int run_verify(const std::string& which, const std::string& in,
               long long iters) {
  const Matrix a = sklab::read_matrix_file(in);
  const sklab::SlowParams p = sklab::infer_slow_params(a);
  sklab::SlowRunOptions opt;
  opt.max_k = iters;
  const sklab::SlowRun run = sklab::run_slow_instance(a, opt);

  ordered_json j;
  j["which"] = which;
  j["n"] = p.n;
  j["iters"] = run.kmax;
  if (which == "lemma4.2") {
    bool pass = true;
    long long first = -1;
    sklab::ScalingState s = sklab::init_state(a);
    for (long long k = 0; k <= iters; ++k) {
      if (!sklab::verify_equality_classes(s.current, p.band)) {
        pass = false;
        first = k;
        break;
      }
      if (k < iters && !sklab::sk_step(s)) break;
    }
    j["pass"] = pass;
    if (!pass) j["first_violation_k"] = first;
  } else if (which == "lemma4.4") {
    bool pass = true;
    long long first = -1;
    sklab::ScalingState s = sklab::init_state(a);
    for (long long k = 0; k <= iters; ++k) {
      if (!sklab::verify_sum_relations(s.current)) {
        pass = false;
        first = k;
        break;
      }
      if (k < iters && !sklab::sk_step(s)) break;
    }
    j["pass"] = pass;
    if (!pass) j["first_violation_k"] = first;
  } else if (which == "condition4.5") {
    const sklab::Condition45Report rep =
        sklab::verify_condition45(run, p, iters);
    j["pass"] = rep.all_pass();
    j["T"] = rep.T;
    j["K"] = rep.K;
    j["clipped"] = rep.clipped;
    ordered_json items = ordered_json::array();
    long long first = -1;
    for (const sklab::ItemCheck& item : rep.items) {
      items.push_back(item_to_json(item));
      if (!item.pass && (first < 0 || item.first_violation_k < first))
        first = item.first_violation_k;
    }
    j["items"] = items;
    if (first >= 0) j["first_violation_k"] = first;
  } else {
    throw std::invalid_argument(
        "--which must be lemma4.2, lemma4.4 or condition4.5");
  }
  emit(j);
  return kExitOk;
}

int run_experiment_cmd(const std::string& kind, const std::string& spec_path,
                       const std::string& out_dir) {
  std::ifstream in(spec_path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read " + spec_path);
  std::ostringstream text;
  text << in.rdbuf();
  const sklab::ExperimentSpec spec =
      sklab::parse_experiment_spec(text.str(), kind);
  sklab::write_experiment(spec, out_dir);
  ordered_json j;
  j["results"] = out_dir + "/results.csv";
  j["spec"] = out_dir + "/spec.json";
  j["rng_algorithm"] = sklab::kRngAlgorithmId;
  emit(j);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sinkhorn-Knopp matrix scaling laboratory"};
  app.require_subcommand(1);

  std::string in_file, out_file, norm = "l1", trace_path;
  double eps = 1e-6, delta = 0.1, gamma = 0.0, rho = 0.0;
  long long max_iters = 10000000, iters = 500;
  int n = 0, m = 0;
  std::uint64_t seed = 0;
  std::string theorem, which, kind, spec_path, out_dir;
  bool rho_grid = false;

  CLI::App* scale = app.add_subcommand("scale", "run the scaling iteration");
  scale->add_option("--in", in_file)->required();
  scale->add_option("--eps", eps)->required();
  scale->add_option("--norm", norm);
  scale->add_option("--max-iters", max_iters);
  scale->add_option("--trace", trace_path);

  CLI::App* experiment = app.add_subcommand("experiment", "run a sweep");
  experiment->add_option("--kind", kind)->required();
  experiment->add_option("--spec", spec_path)->required();
  experiment->add_option("--out", out_dir)->required();

  CLI::App* construct =
      app.add_subcommand("construct", "build a slow-convergence instance");
  construct->add_option("--theorem", theorem)->required();
  construct->add_option("--n", n);
  construct->add_option("--m", m);
  construct->add_option("--gamma", gamma)->required();
  construct->add_option("--eps", eps)->required();
  construct->add_option("--out", out_file)->required();

  CLI::App* density = app.add_subcommand("density", "density profile");
  density->add_option("--in", in_file)->required();
  CLI::Option* rho_opt = density->add_option("--rho", rho);
  CLI::Option* grid_opt = density->add_flag("--rho-grid", rho_grid);
  rho_opt->excludes(grid_opt);

  CLI::App* perm_exact = app.add_subcommand("perm-exact", "exact permanent");
  perm_exact->add_option("--in", in_file)->required();

  CLI::App* perm_estimate =
      app.add_subcommand("perm-estimate", "sampling permanent estimate");
  perm_estimate->add_option("--in", in_file)->required();
  perm_estimate->add_option("--eps", eps)->required();
  perm_estimate->add_option("--delta", delta)->required();
  perm_estimate->add_option("--seed", seed)->required();

  CLI::App* verify =
      app.add_subcommand("verify", "check slow-instance structure");
  verify->add_option("--which", which)->required();
  verify->add_option("--in", in_file)->required();
  verify->add_option("--iters", iters)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitInvalid;
  }

  try {
    if (scale->parsed())
      return run_scale(in_file, eps, norm, max_iters, trace_path);
    if (experiment->parsed())
      return run_experiment_cmd(kind, spec_path, out_dir);
    if (construct->parsed())
      return run_construct(theorem, n, m, gamma, eps, out_file);
    if (density->parsed()) {
      if (!rho_grid && rho_opt->count() == 0)
        throw std::invalid_argument("density needs --rho or --rho-grid");
      return run_density(in_file, rho, rho_grid);
    }
    if (perm_exact->parsed()) return run_perm_exact(in_file);
    if (perm_estimate->parsed())
      return run_perm_estimate(in_file, eps, delta, seed);
    if (verify->parsed()) return run_verify(which, in_file, iters);
  } catch (const sklab::NotScalableError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNotScalable;
  } catch (const sklab::IterationCapError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIterationCap;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitInvalid;
}
