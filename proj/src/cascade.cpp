#include "wordmf/cascade.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace wordmf {

namespace {

std::string num_str(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

CascadeParams CascadeParams::binomial(double w1, double r1) {
  CascadeParams p;
  p.weights = {w1, 1.0 - w1};
  p.ratios = {r1, 1.0 - r1};
  p.validate();
  return p;
}

void CascadeParams::validate() const {
  if (weights.size() != ratios.size()) throw Error("cascade weights and ratios differ in length");
  if (weights.size() < 2) throw Error("cascade needs at least 2 subintervals");
  double ws = 0.0;
  double rs = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0 && weights[i] < 1.0)) {
      throw Error("cascade weight out of (0,1): " + num_str(weights[i]));
    }
    if (!(ratios[i] > 0.0 && ratios[i] < 1.0)) {
      throw Error("cascade ratio out of (0,1): " + num_str(ratios[i]));
    }
    ws += weights[i];
    rs += ratios[i];
  }
  if (std::abs(ws - 1.0) > 1e-12) throw Error("cascade weights must sum to 1");
  if (std::abs(rs - 1.0) > 1e-12) throw Error("cascade ratios must sum to 1");
}

double cascade_tau(const CascadeParams& params, double q) {
  params.validate();
  const std::size_t n = params.n();
  std::vector<double> qlw(n);
  std::vector<double> lr(n);
  for (std::size_t i = 0; i < n; ++i) {
    qlw[i] = q * std::log(params.weights[i]);
    lr[i] = std::log(params.ratios[i]);
  }
  // g(tau) = sum exp(q ln w_i - tau ln r_i) - 1; ln r_i < 0 makes g strictly
  // increasing in tau, so the root is unique. Keep g(lo) <= 0 <= g(hi).
  auto g = [&](double tau) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = qlw[i] - tau * lr[i];
      if (e > 700.0) return 1e308;  // saturate instead of overflowing
      acc += std::exp(e);
    }
    return acc - 1.0;
  };

  double lo = -64.0;
  double hi = 64.0;
  for (int guard = 0; g(lo) > 0.0; ++guard) {
    if (guard > 20) throw Error("cascade tau bracketing failure (low side)");
    lo *= 2.0;
  }
  for (int guard = 0; g(hi) < 0.0; ++guard) {
    if (guard > 20) throw Error("cascade tau bracketing failure (high side)");
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo) + std::abs(hi));
       ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) <= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double tau = 0.5 * (lo + hi);
  if (std::abs(g(tau)) >= 1e-12) throw Error("cascade tau root residual too large");
  return tau;
}

void cascade_alpha_extremes(const CascadeParams& params, double& alpha_minus,
                            double& alpha_plus) {
  params.validate();
  if (params.n() != 2) throw Error("alpha extremes are defined for the binomial case only");
  alpha_minus = std::log(params.weights[1]) / std::log(params.ratios[1]);
  alpha_plus = std::log(params.weights[0]) / std::log(params.ratios[0]);
}

double tsallis_q(double alpha_minus, double alpha_plus) {
  if (!(alpha_minus > 0.0) || !(alpha_plus > 0.0)) {
    throw Error("spectrum endpoints must be positive");
  }
  if (std::abs(alpha_minus - alpha_plus) < 1e-15) {
    throw Error("monofractal: Q undefined for alpha_minus == alpha_plus");
  }
  return 1.0 - 1.0 / (1.0 / alpha_plus - 1.0 / alpha_minus);
}

CascadeFit invert_binomial(double alpha_minus, double alpha_plus) {
  if (!(alpha_minus > 0.0) || !(alpha_plus > 0.0) || !(alpha_minus < alpha_plus)) {
    throw Error("inversion requires 0 < alpha_minus < alpha_plus");
  }
  if (std::abs(alpha_minus - 1.0) < 1e-9 || std::abs(alpha_plus - 1.0) < 1e-9) {
    throw Error("inversion degenerate at alpha == 1");
  }

  // After w1 = r1^a+, the second endpoint equation becomes scalar in r1.
  auto g = [&](double r1) {
    return std::log1p(-std::pow(r1, alpha_plus)) - alpha_minus * std::log1p(-r1);
  };
  double lo = 1e-12;
  double hi = 1.0 - 1e-12;
  const double glo = g(lo);
  const double ghi = g(hi);
  if (!(glo > 0.0 && ghi < 0.0) && !(glo < 0.0 && ghi > 0.0)) {
    throw Error("inversion infeasible for given endpoints (alpha_minus=" + num_str(alpha_minus) +
                ", alpha_plus=" + num_str(alpha_plus) + ")");
  }
  const double sign = glo > 0.0 ? 1.0 : -1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sign * g(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double r1 = 0.5 * (lo + hi);
  const double w1 = std::pow(r1, alpha_plus);

  CascadeFit fit;
  fit.params.weights = {w1, 1.0 - w1};
  fit.params.ratios = {r1, 1.0 - r1};
  fit.alpha_minus = alpha_minus;
  fit.alpha_plus = alpha_plus;
  const double res1 = std::abs(std::log(w1) - alpha_plus * std::log(r1));
  const double res2 = std::abs(std::log(1.0 - w1) - alpha_minus * std::log(1.0 - r1));
  fit.residual = std::max(res1, res2);
  if (fit.residual >= 1e-9) throw Error("inversion did not converge (residual " +
                                        num_str(fit.residual) + ")");
  fit.tsallis_q = tsallis_q(alpha_minus, alpha_plus);
  return fit;
}

std::vector<double> generate_cascade_measure(const CascadeParams& params, std::size_t depth) {
  params.validate();
  if (params.n() != 2) throw Error("cascade generator covers the binomial case only");
  if (std::abs(params.ratios[0] - 0.5) > 1e-12 || std::abs(params.ratios[1] - 0.5) > 1e-12) {
    throw Error("cascade generator requires equal ratios r1 = r2 = 0.5");
  }
  if (depth < 1 || depth > 24) throw Error("cascade depth must be in [1, 24]");

  const double w1 = params.weights[0];
  const double w2 = params.weights[1];
  std::vector<double> mass{1.0};
  for (std::size_t level = 0; level < depth; ++level) {
    std::vector<double> next(mass.size() * 2);
    for (std::size_t i = 0; i < mass.size(); ++i) {
      next[2 * i] = mass[i] * w1;
      next[2 * i + 1] = mass[i] * w2;
    }
    mass = std::move(next);
  }
  return mass;
}

}  // namespace wordmf
