#include "sklab/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

namespace sklab {

const char* to_string(ScaleStatus s) {
  switch (s) {
    case ScaleStatus::Converged: return "converged";
    case ScaleStatus::IterationCapReached: return "iteration-cap";
    case ScaleStatus::NotScalableWarning: return "not-scalable";
  }
  return "unknown";
}

ScalingState init_state(const Matrix& A) {
  validate_matrix(A);
  if (!A.square())
    throw std::invalid_argument("scaling requires a square matrix");
  const std::vector<double> r = row_sums(A);
  const std::vector<double> c = col_sums(A);
  for (double v : r)
    if (v == 0.0) throw NotScalableError("matrix has a zero row");
  for (double v : c)
    if (v == 0.0) throw NotScalableError("matrix has a zero column");

  ScalingState s;
  s.k = 0;
  s.current = A;
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.cols; ++j) s.current.at(i, j) /= r[i];
  s.base = s.current;
  s.log_x.assign(A.rows, 0.0);
  s.log_y.assign(A.rows, 0.0);
  s.log_r0.resize(A.rows);
  for (int i = 0; i < A.rows; ++i) s.log_r0[i] = std::log(r[i]);
  return s;
}

bool sk_step(ScalingState& s) {
  const int n = s.current.rows;
  const bool col_pass = ((s.k + 1) % 2) != 0;  // odd iterates come from column passes
  if (col_pass) {
    const std::vector<double> c = col_sums(s.current);
    for (double v : c)
      if (v == 0.0) return false;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s.current.at(i, j) /= c[j];
    for (int j = 0; j < n; ++j) s.log_y[j] -= std::log(c[j]);
  } else {
    const std::vector<double> r = row_sums(s.current);
    for (double v : r)
      if (v == 0.0) return false;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s.current.at(i, j) /= r[i];
    for (int i = 0; i < n; ++i) s.log_x[i] -= std::log(r[i]);
  }
  ++s.k;
  return true;
}

TraceRow measure_state(const ScalingState& s) {
  TraceRow row;
  row.k = s.k;
  row.side = (s.k % 2 == 0) ? 'r' : 'c';
  const DeviationReport d = deviation(s.current);
  row.l1_row = d.l1_row;
  row.l1_col = d.l1_col;
  row.l2_row = d.l2_row;
  row.l2_col = d.l2_col;
  row.max_row = d.max_row;
  row.min_row = d.min_row;
  row.max_col = d.max_col;
  row.min_col = d.min_col;
  // Free side: columns after a row pass, rows after a column pass.
  const std::vector<double> free_sums =
      (row.side == 'r') ? col_sums(s.current) : row_sums(s.current);
  double log_prod = 0.0;
  for (double v : free_sums) log_prod += std::log(v);
  row.log_prod_sums = log_prod;
  row.prod_sums = std::exp(log_prod);
  return row;
}

double combined_error(const DeviationReport& d, Norm norm) {
  return norm == Norm::L1 ? d.l1_row + d.l1_col : d.l2_row + d.l2_col;
}

ScalingResult run_scaling(const Matrix& A, const RunOptions& opt) {
  ScalingState s = init_state(A);
  ScalingResult res;
  res.trace.stride = opt.trace_stride > 0 ? opt.trace_stride : 1;

  const auto record = [&](const ScalingState& st) -> double {
    if (opt.observer) opt.observer(st);
    const TraceRow row = measure_state(st);
    if (opt.want_trace && st.k % res.trace.stride == 0)
      res.trace.rows.push_back(row);
    DeviationReport d;
    d.l1_row = row.l1_row;
    d.l1_col = row.l1_col;
    d.l2_row = row.l2_row;
    d.l2_col = row.l2_col;
    return combined_error(d, opt.norm);
  };

  double err = record(s);
  res.status = ScaleStatus::Converged;
  while (err > opt.eps) {
    if (s.k >= opt.max_iters) {
      res.status = ScaleStatus::IterationCapReached;
      break;
    }
    if (!sk_step(s)) {
      res.status = ScaleStatus::NotScalableWarning;
      break;
    }
    err = record(s);
  }

  res.iterations = s.k;
  res.final = std::move(s.current);
  res.log_x = std::move(s.log_x);
  res.log_y = std::move(s.log_y);
  res.log_r0 = std::move(s.log_r0);
  return res;
}

double reconstruction_max_rel_error(const ScalingState& s) {
  const int n = s.current.rows;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const double xi = std::exp(s.log_x[i]);
    for (int j = 0; j < n; ++j) {
      const double want = s.current.at(i, j);
      if (want <= 1e-280) continue;
      const double got = xi * s.base.at(i, j) * std::exp(s.log_y[j]);
      worst = std::max(worst, std::fabs(got - want) / want);
    }
  }
  return worst;
}

bool assert_monotone(const ScalingTrace& t, double tol) {
  std::map<long long, const TraceRow*> by_k;
  for (const TraceRow& row : t.rows) by_k[row.k] = &row;
  for (const auto& [k, row] : by_k) {
    const auto next = by_k.find(k + 2);
    if (next == by_k.end()) continue;
    const TraceRow* later = next->second;
    if (k % 2 == 1) {
      if (row->min_row > later->min_row + tol) return false;
      if (row->max_row < later->max_row - tol) return false;
    } else {
      if (row->min_col > later->min_col + tol) return false;
      if (row->max_col < later->max_col - tol) return false;
    }
  }
  return true;
}

PhaseOneReport assert_phase1(const ScalingTrace& t, double tthr, int n,
                             double rho) {
  PhaseOneReport rep;
  rep.bound = 8.0 / (tthr * tthr) * (std::log(static_cast<double>(n)) - std::log(rho));
  rep.product_ok = true;
  const double prod_cap = std::exp(-n * tthr * tthr / 8.0) + 1e-12;
  for (const TraceRow& row : t.rows) {
    if (row.l1_row + row.l1_col > tthr * n) {
      ++rep.count;
      if (row.prod_sums > prod_cap) rep.product_ok = false;
    }
  }
  rep.count_ok = static_cast<double>(rep.count) <= rep.bound;
  rep.ok = rep.count_ok && rep.product_ok;
  return rep;
}

void write_trace_csv(std::ostream& out, const ScalingTrace& t) {
  out << "k,side,l1_row,l1_col,l2_row,l2_col,max_row,min_row,max_col,min_col,"
         "prod_sums\n";
  for (const TraceRow& r : t.rows) {
    out << r.k << ',' << (r.side == 'r' ? "row" : "col") << ','
        << format_real(r.l1_row) << ',' << format_real(r.l1_col) << ','
        << format_real(r.l2_row) << ',' << format_real(r.l2_col) << ','
        << format_real(r.max_row) << ',' << format_real(r.min_row) << ','
        << format_real(r.max_col) << ',' << format_real(r.min_col) << ','
        << format_real(r.prod_sums) << '\n';
  }
}

}  // namespace sklab
