#include "sklab/slow_instance.hpp"

#include "sklab/density.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sklab {

namespace {

double beta_from(double eps, int n) {
  // exp(8 ln eps - ln 100 - 61 ln n); computed in logs so the n^61 factor
  // cannot overflow on the way down.
  return std::exp(8.0 * std::log(eps) - std::log(100.0) -
                  61.0 * std::log(static_cast<double>(n)));
}

}  // namespace

SlowParams make_slow_params(int n, double gamma, double eps) {
  return make_slow_params(n, gamma, eps, eps / n);
}

SlowParams make_slow_params(int n, double gamma, double eps, double delta) {
  if (n < 6 || n % 2 != 0)
    throw std::invalid_argument("slow instance needs an even n >= 6");
  if (!(gamma > 0.25 && gamma < 0.5))
    throw std::invalid_argument("slow instance needs gamma in (1/4, 1/2)");
  if (!(eps > 0.0 && eps <= 1e-3))
    throw std::invalid_argument("slow instance needs eps in (0, 1e-3]");
  SlowParams p;
  p.n = n;
  p.gamma = gamma;
  p.eps = eps;
  p.band = ceil_gamma_n(gamma, n);
  if (n - 2 * p.band < 2)
    throw std::invalid_argument("slow instance needs n - 2*ceil(gamma*n) >= 2");
  const double lo = eps / n;
  const double hi = std::max(1.0 / (1000.0 * n), lo);
  if (!(delta >= lo * (1.0 - 1e-12) && delta <= hi * (1.0 + 1e-12)))
    throw std::invalid_argument("delta must lie in [eps/n, 1/(1000 n)]");
  p.delta = delta;
  p.rho = delta * delta / (100.0 * static_cast<double>(n) * n);
  p.beta = beta_from(eps, n);
  if (p.beta < 1e-300)
    throw std::invalid_argument(
        "beta underflows for these (n, eps); the support would change");
  // Consistency with the key-entry base bound: beta <= rho delta^6 / n^51
  // (equality at delta = eps/n).
  const double log_cap = std::log(p.rho) + 6.0 * std::log(p.delta) -
                         51.0 * std::log(static_cast<double>(n));
  if (std::log(p.beta) > log_cap + 1e-9)
    throw std::invalid_argument("beta exceeds rho*delta^6/n^51");
  return p;
}

std::vector<unsigned char> slow_class_map(int n, int band) {
  const int h = n / 2;
  const int period = h - 1;
  std::vector<unsigned char> cls(static_cast<std::size_t>(n) * n);
  const auto in_band = [&](int i, int j) {
    const int d = ((j - i) % period + period) % period;
    return d < band;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      unsigned char c;
      const bool i_top = i <= h - 2, i_center = (i == h - 1 || i == h);
      const bool j_left = j <= h - 2, j_center = (j == h - 1 || j == h);
      if (i_top && j_left)
        c = in_band(i, j) ? kTLOne : kTLBeta;
      else if (i_top && j_center)
        c = kAClass;
      else if (i_top)
        c = kUClass;
      else if (i_center && j_left)
        c = kXClass;
      else if (i_center && j_center)
        c = (i == j) ? kCenterDiag : kCenterAnti;
      else if (i_center)
        c = kBClass;
      else if (j_left)
        c = kVClass;
      else if (j_center)
        c = kYClass;
      else
        c = in_band(i, j) ? kBROne : kBRBeta;
      cls[static_cast<std::size_t>(i) * n + j] = c;
    }
  }
  return cls;
}

Matrix build_slow_matrix(const SlowParams& p) {
  const int n = p.n;
  const double a_val = 2.0 * p.band / n;
  double value[kSlowClassCount];
  value[kTLOne] = value[kBROne] = value[kBClass] = value[kCenterDiag] = 1.0;
  value[kAClass] = a_val;
  value[kTLBeta] = value[kBRBeta] = value[kUClass] = value[kXClass] =
      value[kCenterAnti] = value[kVClass] = value[kYClass] = p.beta;

  const std::vector<unsigned char> cls = slow_class_map(n, p.band);
  Matrix m = make_matrix(n, n);
  for (std::size_t idx = 0; idx < m.a.size(); ++idx) m.a[idx] = value[cls[idx]];
  return m;
}

Matrix build_padded_slow_matrix(int m, double gamma, double eps) {
  if (!(gamma >= 0.0 && gamma <= 0.25))
    throw std::invalid_argument("padded slow instance needs gamma in [0, 1/4]");
  int pad = 0, n = 0;
  double pad_value = 1.0;
  if (gamma == 0.0) {
    if (m < 7 || m % 2 == 0)
      throw std::invalid_argument("gamma = 0 needs an odd m >= 7");
    pad = 1;
    n = m - 1;
    pad_value = 1.0 / m;
  } else {
    pad = ceil_gamma_n(gamma, m);
    n = m - pad;
    if (n % 2 != 0)
      throw std::invalid_argument(
          "choose m so that m - ceil(gamma*m) is even");
    if (n < 6) throw std::invalid_argument("m too small for the top block");
  }
  const SlowParams zp = make_slow_params(n, 0.5 - 1.0 / n, eps);
  const Matrix z = build_slow_matrix(zp);
  Matrix out = make_matrix(m, m, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.at(i, j) = z.at(i, j);
  for (int i = n; i < m; ++i)
    for (int j = n; j < m; ++j) out.at(i, j) = pad_value;
  return out;
}

KeyEntries extract_key_entries(const Matrix& Ak, long long k) {
  const int n = Ak.rows;
  if (!Ak.square() || n < 6 || n % 2 != 0)
    throw std::invalid_argument("key entries need an even square matrix, n >= 6");
  const int h = n / 2;
  KeyEntries e;
  e.k = k;
  e.a = Ak.at(0, h - 1);
  e.b = Ak.at(h - 1, n - 1);
  e.x = Ak.at(h - 1, 0);
  e.y = Ak.at(n - 1, h - 1);
  e.u = Ak.at(0, n - 1);
  e.v = Ak.at(n - 1, 0);
  return e;
}

namespace {

bool rel_close(double p, double q, double tol) {
  return std::fabs(p - q) <= tol * std::max(std::fabs(p), std::fabs(q));
}

}  // namespace

bool verify_equality_classes(const Matrix& Ak, int band, double tol) {
  const int n = Ak.rows;
  const std::vector<unsigned char> cls = slow_class_map(n, band);
  double ref[kSlowClassCount];
  bool seen[kSlowClassCount] = {};
  for (std::size_t idx = 0; idx < Ak.a.size(); ++idx) {
    const unsigned char c = cls[idx];
    if (!seen[c]) {
      seen[c] = true;
      ref[c] = Ak.a[idx];
    } else if (!rel_close(Ak.a[idx], ref[c], tol)) {
      return false;
    }
  }
  return true;
}

bool verify_sum_relations(const Matrix& Ak, double tol) {
  const int n = Ak.rows;
  const int h = n / 2;
  const std::vector<double> r = row_sums(Ak);
  const std::vector<double> c = col_sums(Ak);
  const KeyEntries e = extract_key_entries(Ak, 0);
  const double hub = (h - 1) * (e.b + e.x - e.a - e.y);
  if (!rel_close(r[h - 1], c[h - 1] + hub, tol)) return false;
  if (!rel_close(r[h], c[h] + hub, tol)) return false;
  const double cross = (h - 1) * (e.u - e.v);
  for (int i = 0; i <= h - 2; ++i)
    if (!rel_close(r[i], c[i] + 2.0 * (e.a - e.x) + cross, tol)) return false;
  for (int i = h + 1; i < n; ++i)
    if (!rel_close(c[i], r[i] + 2.0 * (e.b - e.y) + cross, tol)) return false;
  return true;
}

SlowRun run_slow_instance(const Matrix& A, const SlowRunOptions& opt) {
  ScalingState s = init_state(A);
  SlowRun run;
  run.keys.reserve(1024);
  const auto record = [&]() {
    run.keys.push_back(extract_key_entries(s.current, s.k));
    const DeviationReport d = deviation(s.current);
    run.l1.push_back(d.l1_row + d.l1_col);
    run.l2.push_back(d.l2_row + d.l2_col);
  };
  record();
  while (s.k < opt.max_k) {
    if (opt.stop_l1 > 0.0 && run.l1.back() <= opt.stop_l1) break;
    if (!sk_step(s)) break;
    record();
  }
  run.kmax = s.k;
  return run;
}

long long first_k_below(const std::vector<double>& err, double eps) {
  for (std::size_t k = 0; k < err.size(); ++k)
    if (err[k] <= eps) return static_cast<long long>(k);
  return -1;
}

bool Condition45Report::all_pass() const {
  for (const ItemCheck& item : items)
    if (!item.pass) return false;
  return true;
}

namespace {

void fail(ItemCheck& item, long long k, const std::string& what) {
  if (item.pass) {
    item.pass = false;
    item.first_violation_k = k;
    item.detail = what;
  }
}

std::string describe(const char* what, double got, double bound) {
  std::ostringstream os;
  os << what << ": value " << got << " vs bound " << bound;
  return os.str();
}

}  // namespace

Condition45Report verify_condition45(const SlowRun& run, const SlowParams& p,
                                     long long horizon, double slack) {
  const int n = p.n;
  const double h1 = n / 2.0 - 1.0;  // the (n/2 - 1) factor
  const double rho = p.rho;
  const double delta = p.delta;
  Condition45Report rep;

  // K = first k where min(a_k, b_k) < delta or k >= 1/delta.
  rep.K = run.kmax + 1;
  for (std::size_t k = 0; k < run.keys.size(); ++k) {
    const KeyEntries& e = run.keys[k];
    if (std::min(e.a, e.b) < delta ||
        static_cast<double>(k) >= 1.0 / delta) {
      rep.K = static_cast<long long>(k);
      break;
    }
  }
  long long T = std::min(horizon, run.kmax);
  if (T >= rep.K) {
    T = rep.K - 1;
    rep.clipped = true;
  }
  rep.T = T;

  const auto key = [&](long long k) -> const KeyEntries& {
    return run.keys[static_cast<std::size_t>(k)];
  };

  ItemCheck item1{"item1-recursion-brackets"};
  const auto bracket = [&](ItemCheck& item, long long k, const char* name,
                           double next, double cur, double drift) {
    const double lo = cur / (1.0 + drift + rho);
    const double hi = cur / (1.0 + drift - rho);
    ++item.checked;
    if (!(next >= lo * (1.0 - slack) && next <= hi * (1.0 + slack)))
      fail(item, k, describe(name, next, lo));
  };
  for (long long k = 0; k + 1 <= T; ++k) {
    const KeyEntries &e = key(k), &f = key(k + 1);
    if (k % 2 == 1) {
      bracket(item1, k, "a bracket (odd k)", f.a, e.a, 2.0 * e.a);
      bracket(item1, k, "b bracket (odd k)", f.b, e.b, h1 * (e.b - e.a));
    } else {
      bracket(item1, k, "b bracket (even k)", f.b, e.b, 2.0 * e.b);
      bracket(item1, k, "a bracket (even k)", f.a, e.a, h1 * (e.a - e.b));
    }
  }
  rep.items.push_back(item1);

  ItemCheck item2{"item2-size-bounds"};
  if (2.0 / (n - 1) >= 0.1)
    item2.detail =
        "note: 2/(n-1) < 1/10 needs n > 21; skipped as an n-only condition";
  for (long long k = 0; k <= T; ++k) {
    const KeyEntries& e = key(k);
    const double cap =
        2.0 / (n - 1) - (1.0 / delta - (k - 1)) * rho;
    ++item2.checked;
    const double mab = std::max(e.a, e.b);
    if (!(mab <= cap * (1.0 + slack))) {
      fail(item2, k, describe("max(a,b) vs 2/(n-1) margin", mab, cap));
      continue;
    }
    if (!(1.0 - h1 * e.b - rho > 0.0))
      fail(item2, k, describe("1-(n/2-1)b-rho > 0", 1.0 - h1 * e.b - rho, 0.0));
    if (!(1.0 - h1 * e.a - rho > 0.0))
      fail(item2, k, describe("1-(n/2-1)a-rho > 0", 1.0 - h1 * e.a - rho, 0.0));
  }
  rep.items.push_back(item2);

  ItemCheck item3{"item3-refined-relations"};
  for (long long k = 0; k <= T; ++k) {
    const KeyEntries& e = key(k);
    const bool odd = (k % 2 == 1);
    const double lead = odd ? e.b : e.a;   // the side bounded first
    const double other = odd ? e.a : e.b;
    ++item3.checked;
    if (!(lead <= (other + (6.0 * k + 2.0) * rho * lead) * (1.0 + slack)))
      fail(item3, k, describe("first refined bound", lead, other));
    const double second =
        other * (1.0 + 2.0 * lead) + 6.0 * (k + 1.0) * rho * lead;
    const double second_lhs = odd ? e.a : e.b;
    if (!(second_lhs <= second * (1.0 + slack)))
      fail(item3, k, describe("second refined bound", second_lhs, second));
    if (k + 1 <= T) {
      const KeyEntries& f = key(k + 1);
      const double third_lhs = odd ? f.b : f.a;
      const double third = other + (6.0 * k + 4.0) * rho * lead;
      if (!(third_lhs <= third * (1.0 + slack)))
        fail(item3, k, describe("next-step refined bound", third_lhs, third));
    }
  }
  rep.items.push_back(item3);

  const long long ell =
      8LL * n *
      (static_cast<long long>(std::ceil(std::log(static_cast<double>(n)))) - 1);

  ItemCheck item5{"item5-two-step-decay"};
  if (T < ell + 2) {
    item5.detail = "horizon below ell; nothing to check";
  } else {
    for (long long k = ell + 2; k <= T; k += 2) {
      const double prev = key(k - 2).b;
      ++item5.checked;
      if (!(key(k).b <= prev / (1.0 + prev) * (1.0 + slack)))
        fail(item5, k, describe("b_k/b_{k-2} <= 1/(1+b_{k-2})", key(k).b, prev));
    }
  }
  rep.items.push_back(item5);

  ItemCheck growth{"cross-entry-growth-cap"};
  for (long long k = 2; k <= T; k += 2) {
    const KeyEntries &e2 = key(k - 2), &e1 = key(k - 1), &e0 = key(k);
    const double cap = std::pow(1.0 + e2.b, 3) * (1.0 + slack);
    const double ratios[] = {e0.x / e1.x, e0.y / e1.y, e0.u / e1.u,
                             e0.v / e1.v, e1.x / e2.x, e1.y / e2.y,
                             e1.u / e2.u, e1.v / e2.v};
    ++growth.checked;
    for (double r : ratios)
      if (!(r <= cap)) {
        fail(growth, k, describe("cross-entry ratio", r, cap));
        break;
      }
  }
  rep.items.push_back(growth);

  ItemCheck caps{"absolute-caps-xyuv"};
  {
    // Caps compared in log domain; the raw values sit near 1e-100.
    const double log_c0 = std::log(rho) + 6.0 * std::log(delta) -
                          51.0 * std::log(static_cast<double>(n));
    const double log_c2 = std::log(rho) + 6.0 * std::log(delta) -
                          2.0 * std::log(static_cast<double>(n));
    const double step = std::log1p(2.0 / (n - 1));
    const double logslack = std::log1p(slack);
    const auto log_max_xyuv = [&](long long k) {
      const KeyEntries& e = key(k);
      return std::log(std::max(std::max(e.x, e.y), std::max(e.u, e.v)));
    };
    for (long long k = 0; k <= std::min(T, ell); ++k) {
      ++caps.checked;
      if (!(log_max_xyuv(k) <= log_c0 + 3.0 * k * step + logslack))
        fail(caps, k, describe("early cap (log)", log_max_xyuv(k),
                               log_c0 + 3.0 * k * step));
    }
    for (long long k = ell; k <= T; ++k) {
      const double log_bell = std::log(key(ell).b);
      double cap_log;
      if (k % 2 == 0) {
        cap_log = log_c2 + 6.0 * (log_bell - std::log(key(k).b));
      } else {
        if (k + 1 > T) continue;
        cap_log = log_c2 + 6.0 * (log_bell - std::log(key(k - 1).b)) +
                  3.0 * (std::log(key(k - 1).b) - std::log(key(k + 1).b));
      }
      ++caps.checked;
      if (!(log_max_xyuv(k) <= cap_log + logslack))
        fail(caps, k, describe("late cap (log)", log_max_xyuv(k), cap_log));
    }
    if (T < ell && caps.detail.empty() && caps.pass)
      caps.detail = "late-regime caps not reached (horizon below ell)";
  }
  rep.items.push_back(caps);

  ItemCheck decay{"one-step-decay"};
  for (long long k = 1; k <= T; ++k) {
    const double prev = key(k - 1).b;
    ++decay.checked;
    if (!(key(k).b >= prev * (1.0 - 3.0 * prev) * (1.0 - slack)))
      fail(decay, k,
           describe("b_k >= b_{k-1}(1-3b_{k-1})", key(k).b,
                    prev * (1.0 - 3.0 * prev)));
  }
  rep.items.push_back(decay);

  return rep;
}

KeyRegimeReport check_key_entry_regime(const SlowRun& run, const SlowParams& p,
                                       long long horizon) {
  KeyRegimeReport rep;
  rep.horizon = std::min(horizon, run.kmax);
  rep.worst_min_ab = 1.0;
  rep.worst_max_xyuv = 0.0;
  const double xyuv_cap = p.rho / (4.0 * p.n);
  for (long long k = 0; k <= rep.horizon; ++k) {
    const KeyEntries& e = run.keys[static_cast<std::size_t>(k)];
    const double mab = std::min(e.a, e.b);
    const double mxy = std::max(std::max(e.x, e.y), std::max(e.u, e.v));
    rep.worst_min_ab = std::min(rep.worst_min_ab, mab);
    rep.worst_max_xyuv = std::max(rep.worst_max_xyuv, mxy);
    if (mab < p.delta && rep.first_ab_violation < 0) rep.first_ab_violation = k;
    if (mxy >= xyuv_cap && rep.first_xyuv_violation < 0)
      rep.first_xyuv_violation = k;
  }
  rep.pass = rep.first_ab_violation < 0 && rep.first_xyuv_violation < 0;
  return rep;
}

SlowParams infer_slow_params(const Matrix& A) {
  validate_matrix(A);
  const int n = A.rows;
  if (!A.square() || n < 6 || n % 2 != 0)
    throw std::invalid_argument("not a slow-family matrix: bad shape");
  const int h = n / 2;
  int band = 0;
  for (int j = 0; j <= h - 2; ++j)
    if (A.at(0, j) > 0.5) ++band;
  const double beta = *std::min_element(A.a.begin(), A.a.end());
  if (!(beta > 0.0))
    throw std::invalid_argument("not a slow-family matrix: zero entries");
  const double eps = std::exp((std::log(beta) + std::log(100.0) +
                               61.0 * std::log(static_cast<double>(n))) /
                              8.0);
  if (eps > 1e-3 * (1.0 + 1e-9))
    throw std::invalid_argument(
        "not a slow-family matrix: smallest entry too large");
  SlowParams p;
  try {
    p = make_slow_params(n, static_cast<double>(band) / n,
                         std::min(eps, 1e-3));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(
        std::string("not a slow-family matrix: ") + e.what());
  }
  const Matrix rebuilt = build_slow_matrix(p);
  for (std::size_t idx = 0; idx < A.a.size(); ++idx) {
    const double want = rebuilt.a[idx], got = A.a[idx];
    if (std::fabs(want - got) > 1e-9 * std::max(want, got))
      throw std::invalid_argument(
          "not a slow-family matrix: entry pattern mismatch");
  }
  return p;
}

}  // namespace sklab
