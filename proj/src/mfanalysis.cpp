#include "wordmf/mfanalysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>

#include "wordmf/error.hpp"

namespace wordmf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Compensated accumulation keeps the reductions independent of magnitude
// ordering issues and comfortably inside the 1e-12 normalization budget.
struct KahanSum {
  double s = 0.0;
  double c = 0.0;
  void add(double x) {
    const double y = x - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  double value() const { return s; }
};

std::string num_str(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

AnalysisGrid AnalysisGrid::make(std::size_t s_min, std::size_t s_max, double q_min,
                                double q_max, double q_step) {
  if (s_min < 2) throw Error("s_min must be at least 2");
  if (s_max < s_min) throw Error("s_max must be >= s_min");
  if (!(q_step > 0.0) || !std::isfinite(q_step)) throw Error("q_step must be positive");
  if (!std::isfinite(q_min) || !std::isfinite(q_max) || q_max < q_min) {
    throw Error("q range must be finite with q_max >= q_min");
  }
  AnalysisGrid g;
  g.s_values.reserve(s_max - s_min + 1);
  for (std::size_t s = s_min; s <= s_max; ++s) g.s_values.push_back(s);
  const auto count = static_cast<std::size_t>((q_max - q_min) / q_step + 1e-9);
  g.q_values.reserve(count + 1);
  for (std::size_t i = 0; i <= count; ++i) g.q_values.push_back(q_min + static_cast<double>(i) * q_step);
  return g;
}

AnalysisGrid AnalysisGrid::defaults() { return make(2, 200, -25.0, 25.0, 0.25); }

AnalysisGrid AnalysisGrid::clamped_to(std::size_t series_len,
                                      std::vector<std::string>* warnings) const {
  AnalysisGrid g = *this;
  if (!g.s_values.empty() && g.s_values.back() > series_len) {
    const std::size_t old_max = g.s_values.back();
    while (!g.s_values.empty() && g.s_values.back() > series_len) g.s_values.pop_back();
    if (warnings) {
      warnings->push_back("s_max clamped from " + std::to_string(old_max) + " to " +
                          (g.s_values.empty() ? std::string("nothing")
                                              : std::to_string(g.s_values.back())) +
                          " (series has only " + std::to_string(series_len) + " increments)");
    }
  }
  if (g.s_values.size() < 3) {
    throw Error("too few box sizes after clamping to series length " +
                std::to_string(series_len) + "; need at least 3");
  }
  return g;
}

void AnalysisGrid::validate(std::size_t series_len) const {
  if (s_values.empty()) throw Error("empty box-size grid");
  if (q_values.empty()) throw Error("empty q grid");
  if (s_values.front() < 2) throw Error("box sizes must be at least 2");
  for (std::size_t i = 1; i < s_values.size(); ++i) {
    if (s_values[i] <= s_values[i - 1]) throw Error("box sizes must be strictly increasing");
  }
  if (s_values.back() > series_len) {
    throw Error("largest box size " + std::to_string(s_values.back()) +
                " exceeds series length " + std::to_string(series_len));
  }
  for (std::size_t i = 0; i < q_values.size(); ++i) {
    if (!std::isfinite(q_values[i])) throw Error("q grid contains a non-finite value");
    if (i > 0 && q_values[i] <= q_values[i - 1]) {
      throw Error("q grid must be strictly increasing");
    }
  }
}

std::vector<double> box_probabilities(std::span<const double> mass, std::size_t s) {
  if (s < 2 || s > mass.size()) {
    throw Error("box size out of range: s=" + std::to_string(s) + " for series length " +
                std::to_string(mass.size()));
  }
  const std::size_t ns = mass.size() / s;
  std::vector<double> box(ns);
  for (std::size_t v = 0; v < ns; ++v) {
    double b = 0.0;
    const std::size_t off = v * s;
    for (std::size_t k = 0; k < s; ++k) b += mass[off + k];
    box[v] = b;
  }
  KahanSum total;
  for (double b : box) total.add(b);
  if (!(total.value() > 0.0)) {
    throw Error("degenerate series: complete boxes carry no mass at s=" + std::to_string(s));
  }
  for (double& b : box) b /= total.value();
  return box;
}

std::vector<double> box_probabilities(const IncrementSeries& m, std::size_t s) {
  std::vector<double> mass(m.values.begin(), m.values.end());
  return box_probabilities(std::span<const double>(mass), s);
}

namespace {

// One row of the partition table: all q moments at a single box size.
void partition_row(std::span<const double> mass, std::size_t s,
                   const std::vector<double>& q_values, double* chi_row,
                   std::size_t& box_count, std::size_t& zero_count, double& prob_err) {
  const std::size_t ns = mass.size() / s;
  std::vector<double> p;
  p.reserve(ns);
  KahanSum total;
  for (std::size_t v = 0; v < ns; ++v) {
    double b = 0.0;
    const std::size_t off = v * s;
    for (std::size_t k = 0; k < s; ++k) b += mass[off + k];
    p.push_back(b);
    total.add(b);
  }
  if (!(total.value() > 0.0)) {
    throw Error("degenerate series: complete boxes carry no mass at s=" + std::to_string(s));
  }

  std::size_t zeros = 0;
  std::vector<double> pv;
  std::vector<double> lp;
  pv.reserve(ns);
  lp.reserve(ns);
  KahanSum psum;
  for (double b : p) {
    if (b == 0.0) {
      ++zeros;
      continue;
    }
    const double pr = b / total.value();
    pv.push_back(pr);
    lp.push_back(std::log(pr));
    psum.add(pr);
  }
  prob_err = std::abs(psum.value() - 1.0);

  for (std::size_t qi = 0; qi < q_values.size(); ++qi) {
    const double q = q_values[qi];
    KahanSum acc;
    if (q == 1.0) {
      for (double pr : pv) acc.add(pr);
    } else {
      for (double l : lp) acc.add(std::exp(q * l));
    }
    const double v = acc.value();
    if (!std::isfinite(v) || !(v > 0.0)) {
      throw Error("non-finite partition sum at s=" + std::to_string(s) + ", q=" + num_str(q));
    }
    chi_row[qi] = v;
  }
  box_count = ns;
  zero_count = zeros;
}

}  // namespace

PartitionTable partition_function(std::span<const double> mass, const AnalysisGrid& grid,
                                  unsigned threads) {
  grid.validate(mass.size());
  const std::size_t ns = grid.s_values.size();
  const std::size_t nq = grid.q_values.size();

  PartitionTable table;
  table.s_values = grid.s_values;
  table.q_values = grid.q_values;
  table.chi.assign(ns * nq, 0.0);
  table.box_counts.assign(ns, 0);
  table.zero_box_counts.assign(ns, 0);

  std::vector<double> prob_errs(ns, 0.0);
  std::vector<std::string> errors(ns);

  auto work = [&](std::size_t si) {
    try {
      partition_row(mass, grid.s_values[si], grid.q_values, table.chi.data() + si * nq,
                    table.box_counts[si], table.zero_box_counts[si], prob_errs[si]);
    } catch (const std::exception& e) {
      errors[si] = e.what();
    }
  };

  unsigned t = threads == 0 ? 1 : threads;
  t = static_cast<unsigned>(std::min<std::size_t>(t, ns));
  if (t <= 1) {
    for (std::size_t si = 0; si < ns; ++si) work(si);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (unsigned w = 0; w < t; ++w) {
      pool.emplace_back([&, w]() {
        for (std::size_t si = w; si < ns; si += t) work(si);
      });
    }
    for (auto& th : pool) th.join();
  }

  for (std::size_t si = 0; si < ns; ++si) {
    if (!errors[si].empty()) throw Error(errors[si]);
  }
  table.max_prob_sum_error = *std::max_element(prob_errs.begin(), prob_errs.end());
  return table;
}

PartitionTable partition_function(const IncrementSeries& m, const AnalysisGrid& grid,
                                  unsigned threads) {
  std::vector<double> mass(m.values.begin(), m.values.end());
  return partition_function(std::span<const double>(mass), grid, threads);
}

TauEstimate estimate_tau(const PartitionTable& table) {
  const std::size_t nsv = table.s_values.size();
  const std::size_t nq = table.q_values.size();
  if (nsv < 3) throw Error("need at least 3 box sizes for the log-log regression");

  std::vector<double> ls(nsv);
  for (std::size_t i = 0; i < nsv; ++i) ls[i] = std::log(static_cast<double>(table.s_values[i]));
  double mean_ls = 0.0;
  for (double v : ls) mean_ls += v;
  mean_ls /= static_cast<double>(nsv);
  double sxx = 0.0;
  for (double v : ls) sxx += (v - mean_ls) * (v - mean_ls);

  TauEstimate est;
  est.q = table.q_values;
  est.tau.resize(nq);
  est.r_squared.resize(nq);

  std::vector<double> lc(nsv);
  for (std::size_t qi = 0; qi < nq; ++qi) {
    double mean_lc = 0.0;
    for (std::size_t si = 0; si < nsv; ++si) {
      const double v = std::log(table.chi_at(si, qi));
      if (!std::isfinite(v)) {
        throw Error("non-finite log partition sum at s=" + std::to_string(table.s_values[si]) +
                    ", q=" + num_str(table.q_values[qi]));
      }
      lc[si] = v;
      mean_lc += v;
    }
    mean_lc /= static_cast<double>(nsv);
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t si = 0; si < nsv; ++si) {
      sxy += (ls[si] - mean_ls) * (lc[si] - mean_lc);
      syy += (lc[si] - mean_lc) * (lc[si] - mean_lc);
    }
    est.tau[qi] = sxy / sxx;
    est.r_squared[qi] = syy > 0.0 ? std::min(1.0, (sxy * sxy) / (sxx * syy)) : 1.0;
  }
  return est;
}

namespace {

std::size_t index_of_q(const std::vector<double>& q, double target) {
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (std::abs(q[i] - target) < 1e-9) return i;
  }
  return q.size();
}

double interp_at(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  if (xs.empty()) return kNaN;
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
  const std::size_t lo = hi - 1;
  const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return ys[lo] + t * (ys[hi] - ys[lo]);
}

// Replaces the entries marked in_band by linear interpolation between the
// surrounding out-of-band values (nearest value at the grid edges).
void fill_band(const std::vector<double>& q, std::vector<double>& v,
               const std::vector<char>& in_band) {
  std::vector<double> nq;
  std::vector<double> nv;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!in_band[i]) {
      nq.push_back(q[i]);
      nv.push_back(v[i]);
    }
  }
  if (nq.empty()) throw Error("guard band covers the entire q grid");
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (in_band[i]) v[i] = interp_at(nq, nv, q[i]);
  }
}

void locate_crossings(SpectrumResult& r) {
  const auto& f = r.f_alpha;
  const auto& a = r.alpha;
  const std::size_t n = f.size();
  std::size_t peak = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (f[i] > f[peak]) peak = i;
  }
  // Left branch of f(alpha) lives at large q (small alpha): scan forward.
  r.alpha_minus_crossed = false;
  for (std::size_t i = peak; i + 1 < n; ++i) {
    if (f[i] >= 0.0 && f[i + 1] < 0.0) {
      const double t = f[i] / (f[i] - f[i + 1]);
      r.alpha_minus = a[i] + t * (a[i + 1] - a[i]);
      r.alpha_minus_crossed = true;
      break;
    }
  }
  if (!r.alpha_minus_crossed) r.alpha_minus = a[n - 1];
  // Right branch at negative q: scan backward from the peak.
  r.alpha_plus_crossed = false;
  for (std::size_t i = peak; i > 0; --i) {
    if (f[i] >= 0.0 && f[i - 1] < 0.0) {
      const double t = f[i] / (f[i] - f[i - 1]);
      r.alpha_plus = a[i] + t * (a[i - 1] - a[i]);
      r.alpha_plus_crossed = true;
      break;
    }
  }
  if (!r.alpha_plus_crossed) r.alpha_plus = a[0];
}

}  // namespace

double SpectrumResult::d_at(double qv) const {
  const std::size_t i = index_of_q(q, qv);
  return i < q.size() ? D[i] : kNaN;
}

SpectrumResult derive_spectrum(const TauEstimate& est, double eps_q0, double eps_q1) {
  const std::size_t n = est.q.size();
  if (n < 3) throw Error("need at least 3 q grid points");
  for (double t : est.tau) {
    if (!std::isfinite(t)) throw Error("non-finite tau on the q grid");
  }

  SpectrumResult r;
  r.q = est.q;
  r.tau = est.tau;
  r.r_squared = est.r_squared;
  r.alpha.resize(n);
  r.f_alpha.resize(n);
  r.D.assign(n, 0.0);
  r.h.assign(n, 0.0);

  const auto& q = r.q;
  const auto& tau = r.tau;
  r.alpha[0] = (tau[1] - tau[0]) / (q[1] - q[0]);
  r.alpha[n - 1] = (tau[n - 1] - tau[n - 2]) / (q[n - 1] - q[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    r.alpha[i] = (tau[i + 1] - tau[i - 1]) / (q[i + 1] - q[i - 1]);
  }
  for (std::size_t i = 0; i < n; ++i) r.f_alpha[i] = q[i] * r.alpha[i] - tau[i];

  const std::size_t i1 = index_of_q(q, 1.0);
  double alpha1 = kNaN;
  if (i1 < n) {
    alpha1 = r.alpha[i1];
  } else if (1.0 >= q.front() && 1.0 <= q.back()) {
    alpha1 = interp_at(q, r.alpha, 1.0);
  }
  r.C1 = alpha1;

  std::vector<char> d_band(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (i1 < n && i == i1) {
      r.D[i] = alpha1;  // L'Hopital at the removable singularity
    } else if (std::abs(q[i] - 1.0) >= eps_q1) {
      r.D[i] = tau[i] / (q[i] - 1.0);
    } else {
      d_band[i] = 1;
    }
  }
  fill_band(q, r.D, d_band);

  std::vector<char> h_band(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(q[i]) >= eps_q0) {
      r.h[i] = (1.0 + tau[i]) / q[i];
    } else {
      h_band[i] = 1;
    }
  }
  fill_band(q, r.h, h_band);

  locate_crossings(r);
  return r;
}

IdentityDiagnostics check_identities(const PartitionTable& table, const SpectrumResult& spec) {
  IdentityDiagnostics d;
  d.max_prob_sum_error = table.max_prob_sum_error;

  const std::size_t tq1 = index_of_q(table.q_values, 1.0);
  if (tq1 < table.q_values.size()) {
    double worst = 0.0;
    for (std::size_t si = 0; si < table.s_values.size(); ++si) {
      worst = std::max(worst, std::abs(table.chi_at(si, tq1) - 1.0));
    }
    d.max_chi1_error = worst;
  } else {
    d.max_chi1_error = kNaN;
  }

  const std::size_t i1 = index_of_q(spec.q, 1.0);
  d.tau1_abs = i1 < spec.q.size() ? std::abs(spec.tau[i1]) : kNaN;

  const std::size_t i0 = index_of_q(spec.q, 0.0);
  if (i0 < spec.q.size()) {
    const double d0 = spec.D[i0];
    const double fmax = *std::max_element(spec.f_alpha.begin(), spec.f_alpha.end());
    d.fmax_minus_d0_abs = std::abs(fmax - d0);
  } else {
    d.fmax_minus_d0_abs = kNaN;
  }

  const auto& a = spec.alpha;
  const auto& f = spec.f_alpha;
  double worst = 0.0;
  std::size_t points = 0;
  for (std::size_t i = 1; i + 1 < a.size(); ++i) {
    const double left = a[i - 1] - a[i];
    const double right = a[i] - a[i + 1];
    if (left * right <= 0.0) continue;  // not strictly monotone here
    const double den = a[i + 1] - a[i - 1];
    if (std::abs(den) < 1e-12) continue;
    const double slope = (f[i + 1] - f[i - 1]) / den;
    worst = std::max(worst, std::abs(slope - spec.q[i]));
    ++points;
  }
  d.legendre_max_err = worst;
  d.legendre_points = points;

  std::size_t viol = 0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    if (a[i + 1] > a[i] + 1e-3) ++viol;
  }
  d.alpha_increase_violations = viol;
  return d;
}

void write_spectrum_csv(std::ostream& os, const SpectrumResult& spec) {
  os << "q,tau,r_squared,D,h,alpha,f_alpha\n";
  char buf[256];
  for (std::size_t i = 0; i < spec.q.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", spec.q[i],
                  spec.tau[i], spec.r_squared[i], spec.D[i], spec.h[i], spec.alpha[i],
                  spec.f_alpha[i]);
    os << buf;
  }
}

SpectrumResult read_spectrum_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error("empty spectrum CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "q,tau,r_squared,D,h,alpha,f_alpha") {
    throw Error("unexpected spectrum CSV header: " + line);
  }
  SpectrumResult r;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double vals[7];
    const char* p = line.c_str();
    for (int k = 0; k < 7; ++k) {
      char* end = nullptr;
      vals[k] = std::strtod(p, &end);
      if (end == p) {
        throw Error("bad number in spectrum CSV row " + std::to_string(row));
      }
      p = end;
      if (k < 6) {
        if (*p != ',') throw Error("expected 7 columns in spectrum CSV row " + std::to_string(row));
        ++p;
      }
    }
    r.q.push_back(vals[0]);
    r.tau.push_back(vals[1]);
    r.r_squared.push_back(vals[2]);
    r.D.push_back(vals[3]);
    r.h.push_back(vals[4]);
    r.alpha.push_back(vals[5]);
    r.f_alpha.push_back(vals[6]);
  }
  if (r.q.size() < 3) throw Error("spectrum CSV has fewer than 3 rows");
  for (std::size_t i = 1; i < r.q.size(); ++i) {
    if (!(r.q[i] > r.q[i - 1])) throw Error("spectrum CSV q column must be strictly increasing");
  }
  const std::size_t i1 = index_of_q(r.q, 1.0);
  r.C1 = i1 < r.q.size() ? r.alpha[i1]
                         : (1.0 >= r.q.front() && 1.0 <= r.q.back()
                                ? interp_at(r.q, r.alpha, 1.0)
                                : kNaN);
  locate_crossings(r);
  return r;
}

}  // namespace wordmf
