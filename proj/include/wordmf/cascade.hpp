#pragma once

#include <cstddef>
#include <vector>

#include "wordmf/error.hpp"

namespace wordmf {

// Multiplicative cascade: n subintervals of relative size r_i carrying mass
// fractions w_i. Both lists sum to 1 and every entry lies in (0,1).
struct CascadeParams {
  std::vector<double> weights;
  std::vector<double> ratios;

  static CascadeParams binomial(double w1, double r1);
  void validate() const;
  std::size_t n() const { return weights.size(); }
};

struct CascadeFit {
  CascadeParams params;
  double alpha_minus = 0.0;
  double alpha_plus = 0.0;
  double residual = 0.0;
  double tsallis_q = 0.0;
};

// The unique tau solving sum_i w_i^q r_i^(-tau) = 1. The left side is
// strictly increasing in tau, so a bracketed bisection always converges;
// the residual at the returned root is below 1e-12.
double cascade_tau(const CascadeParams& params, double q);

// Endpoints of the binomial singularity spectrum on the f=0 line:
// alpha_minus = log(w2)/log(r2), alpha_plus = log(w1)/log(r1). The index
// convention is preserved as is; no reordering.
void cascade_alpha_extremes(const CascadeParams& params, double& alpha_minus,
                            double& alpha_plus);

// Recovers (w1, r1) from the spectrum endpoints by substituting w1 = r1^a+
// and bisecting log(1 - r1^a+) - a- * log(1 - r1) = 0 over r1 in (0,1).
CascadeFit invert_binomial(double alpha_minus, double alpha_plus);

// Q = 1 - 1/(1/alpha_plus - 1/alpha_minus). Throws for alpha_minus ==
// alpha_plus (monofractal, Q undefined).
double tsallis_q(double alpha_minus, double alpha_plus);

// Deterministic equal-ratio binomial cascade: 2^depth cell masses on [0,1],
// left cell weighted w1 at every split. The result feeds partition_function
// directly as a mass series.
std::vector<double> generate_cascade_measure(const CascadeParams& params, std::size_t depth);

}  // namespace wordmf
