#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "wordmf/series.hpp"

namespace wordmf {

// Box sizes and moment orders for the partition function, plus the guard
// bands around the singular points q=0 (for h) and q=1 (for D). The bands
// apply only to derived quantities; chi is computed on the full q grid.
struct AnalysisGrid {
  std::vector<std::size_t> s_values;
  std::vector<double> q_values;
  double eps_q0 = 0.05;
  double eps_q1 = 0.05;

  static AnalysisGrid make(std::size_t s_min, std::size_t s_max, double q_min,
                           double q_max, double q_step);
  // s = 2..200 (every integer), q = -25..25 in steps of 0.25.
  static AnalysisGrid defaults();

  // Drops box sizes exceeding series_len; records a warning when it does.
  // Throws when fewer than 3 box sizes remain.
  AnalysisGrid clamped_to(std::size_t series_len, std::vector<std::string>* warnings) const;

  void validate(std::size_t series_len) const;
};

// chi is row-major over (s, q). Boxes with zero mass are excluded from the
// moment sums; zero_box_counts records how many were excluded per s.
struct PartitionTable {
  std::vector<std::size_t> s_values;
  std::vector<double> q_values;
  std::vector<double> chi;
  std::vector<std::size_t> box_counts;
  std::vector<std::size_t> zero_box_counts;
  double max_prob_sum_error = 0.0;

  double chi_at(std::size_t si, std::size_t qi) const {
    return chi[si * q_values.size() + qi];
  }
};

// Probabilities of the complete boxes of size s, in text order; the trailing
// remainder shorter than s is discarded. Throws "degenerate series" when the
// complete boxes carry no mass.
std::vector<double> box_probabilities(std::span<const double> mass, std::size_t s);
std::vector<double> box_probabilities(const IncrementSeries& m, std::size_t s);

// chi(s,q) = sum over nonzero boxes of P^q. Deterministic for any thread
// count: each s row is computed independently in a fixed summation order.
PartitionTable partition_function(std::span<const double> mass, const AnalysisGrid& grid,
                                  unsigned threads = 1);
PartitionTable partition_function(const IncrementSeries& m, const AnalysisGrid& grid,
                                  unsigned threads = 1);

struct TauEstimate {
  std::vector<double> q;
  std::vector<double> tau;
  std::vector<double> r_squared;
};

// Per-q ordinary least squares of log chi against log s, unweighted, over
// all grid box sizes. tau is the slope.
TauEstimate estimate_tau(const PartitionTable& table);

struct SpectrumResult {
  std::vector<double> q;
  std::vector<double> tau;
  std::vector<double> r_squared;
  std::vector<double> D;
  std::vector<double> h;
  std::vector<double> alpha;
  std::vector<double> f_alpha;
  double C1 = 0.0;
  double alpha_minus = 0.0;
  double alpha_plus = 0.0;
  // False when the corresponding branch of f never reaches zero on the grid;
  // the endpoint then falls back to the extreme grid alpha.
  bool alpha_minus_crossed = false;
  bool alpha_plus_crossed = false;

  // D at the grid point nearest qv (must match within 1e-9), else NaN.
  double d_at(double qv) const;
};

// tau -> D, h, alpha, f via the grid rules: D(q)=tau/(q-1) outside the q=1
// guard band with D(1)=alpha(1); h(q)=(1+tau)/q outside the q=0 band; band
// points linearly interpolated from their neighbors; alpha by central
// differences (one-sided at the ends); f = q*alpha - tau; C1 = alpha(1);
// alpha-/alpha+ are the f=0 crossings found scanning outward from the peak.
SpectrumResult derive_spectrum(const TauEstimate& est, double eps_q0 = 0.05,
                               double eps_q1 = 0.05);

// Self-consistency measures recorded with every analysis.
struct IdentityDiagnostics {
  double max_prob_sum_error = 0.0;
  double max_chi1_error = 0.0;
  double tau1_abs = 0.0;
  double fmax_minus_d0_abs = 0.0;
  double legendre_max_err = 0.0;
  std::size_t legendre_points = 0;
  std::size_t alpha_increase_violations = 0;
};

IdentityDiagnostics check_identities(const PartitionTable& table, const SpectrumResult& spec);

// Header exactly: q,tau,r_squared,D,h,alpha,f_alpha
void write_spectrum_csv(std::ostream& os, const SpectrumResult& spec);

// Reads a CSV written by write_spectrum_csv and rebuilds the derived scalars
// (C1, crossing endpoints) from the stored curves.
SpectrumResult read_spectrum_csv(std::istream& is);

}  // namespace wordmf
