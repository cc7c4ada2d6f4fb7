#include "sklab/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sklab/density.hpp"
#include "sklab/permanent.hpp"
#include "sklab/rng.hpp"
#include "sklab/scaling.hpp"

namespace sklab {

namespace {

constexpr long long kSampleCap = 1LL << 22;

// One proposal: pick a distinct row for every column, probability
// proportional to the scaled entry among still-unused rows.  Returns the log
// importance weight, or -inf on a dead end.
double sample_log_weight(const Matrix& scaled, CounterRng& rng,
                         std::vector<int>& used, std::vector<double>& probs) {
  const int n = scaled.rows;
  std::fill(used.begin(), used.end(), 0);
  double log_w = 0.0;
  for (int j = 0; j < n; ++j) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      probs[i] = used[i] ? 0.0 : scaled.at(i, j);
      total += probs[i];
    }
    if (total <= 0.0) return -std::numeric_limits<double>::infinity();
    double cut = rng.next_double() * total;
    int pick = -1;
    for (int i = 0; i < n; ++i) {
      cut -= probs[i];
      if (probs[i] > 0.0 && cut <= 0.0) {
        pick = i;
        break;
      }
    }
    if (pick < 0) {  // roundoff pushed cut past the end; take the last option
      for (int i = n - 1; i >= 0; --i)
        if (probs[i] > 0.0) {
          pick = i;
          break;
        }
    }
    used[pick] = 1;
    log_w += std::log(total) - std::log(scaled.at(pick, j));
  }
  return log_w;
}

}  // namespace

PermanentEstimate estimate_permanent(const Matrix& A, double eps, double delta,
                                     std::uint64_t seed) {
  validate_matrix(A);
  if (!A.square()) throw std::invalid_argument("estimator needs a square matrix");
  if (!(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("estimator needs eps, delta in (0, 1)");
  const int n = A.rows;
  for (double v : A.a)
    if (v != 0.0 && v != 1.0)
      throw std::invalid_argument("estimator needs a 0-1 matrix");
  const DensityProfile prof = density_profile(A, 1.0);
  if (2 * prof.min_count <= n)
    throw std::invalid_argument(
        "estimator needs more than n/2 ones in every row and column");
  const double gamma = prof.gamma_max;
  if (permanent_is_zero(A))
    throw std::invalid_argument("permanent is zero");  // unreachable when dense

  RunOptions opt;
  opt.norm = Norm::L1;
  opt.eps = 1.0 / (10.0 * static_cast<double>(n) * n);
  ScalingResult scaled = run_scaling(A, opt);
  if (scaled.status == ScaleStatus::IterationCapReached)
    throw IterationCapError("scaling hit the iteration cap");
  const Matrix& B = scaled.final;

  // The scaled matrix keeps the support of A, so every permutation that
  // contributes to the permanent has positive proposal probability and the
  // weight average is unbiased.  Target enough samples for the requested
  // (eps, delta) guarantee, then widen until the observed 95% interval is
  // within eps/2 relative or the cap is hit.
  const double exponent = (1.0 - gamma) / (2.0 * gamma - 1.0);
  double want = std::pow(static_cast<double>(n), exponent) / (eps * eps) *
                std::log(1.0 / delta);
  long long target = static_cast<long long>(std::ceil(std::min(
      want, static_cast<double>(kSampleCap))));
  target = std::max(target, 16LL);

  std::vector<int> used(n);
  std::vector<double> probs(n);
  std::vector<double> log_ws;
  log_ws.reserve(static_cast<std::size_t>(target));

  PermanentEstimate out;
  out.method = "sinkhorn-sis";
  out.scaled_max_deviation = deviation(B).max_deviation;

  double shift = -std::numeric_limits<double>::infinity();
  const auto summarize = [&]() {
    const double N = static_cast<double>(log_ws.size());
    double s1 = 0.0, s2 = 0.0;
    for (double lw : log_ws) {
      const double e = std::exp(lw - shift);
      s1 += e;
      s2 += e * e;
    }
    const double mean = s1 / N;
    out.samples = static_cast<long long>(log_ws.size());
    if (!(mean > 0.0)) {
      out.estimate = 0.0;
      out.log_estimate = -std::numeric_limits<double>::infinity();
      out.rel_half_width = std::numeric_limits<double>::infinity();
      return;
    }
    out.log_estimate = shift + std::log(mean);
    out.estimate = std::exp(out.log_estimate);
    const double var = std::max(0.0, (s2 / N - mean * mean) * N / (N - 1.0));
    out.rel_half_width = 1.96 * std::sqrt(var / N) / mean;
  };

  long long drawn = 0;
  while (true) {
    while (drawn < target) {
      CounterRng rng(seed, CounterRng::derive_stream(
                               static_cast<std::uint64_t>(drawn)));
      const double lw = sample_log_weight(B, rng, used, probs);
      shift = std::max(shift, lw);
      log_ws.push_back(lw);
      ++drawn;
    }
    summarize();
    if (out.rel_half_width <= eps / 2.0 || target >= kSampleCap) break;
    target = std::min(kSampleCap, target * 2);
  }
  return out;
}

}  // namespace sklab
