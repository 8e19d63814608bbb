#include "wordmf/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "json.hpp"

namespace wordmf {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ordered_json num_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

// f(alpha) value at a given alpha, walking the curve in q order and taking
// the first bracketing segment; outside the curve, the nearer endpoint.
double f_on_curve(const std::vector<double>& alpha, const std::vector<double>& f, double x) {
  for (std::size_t i = 0; i + 1 < alpha.size(); ++i) {
    const double a0 = alpha[i];
    const double a1 = alpha[i + 1];
    if ((a0 - x) * (a1 - x) <= 0.0 && a0 != a1) {
      const double t = (x - a0) / (a1 - a0);
      return f[i] + t * (f[i + 1] - f[i]);
    }
    if (a0 == x) return f[i];
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < alpha.size(); ++i) {
    if (std::abs(alpha[i] - x) < std::abs(alpha[best] - x)) best = i;
  }
  return f[best];
}

}  // namespace

CompareRecord compare_spectra(const SpectrumResult& a, const SpectrumResult& b) {
  if (a.q.size() != b.q.size()) throw Error("mismatched q grids: different sizes");
  for (std::size_t i = 0; i < a.q.size(); ++i) {
    if (std::abs(a.q[i] - b.q[i]) > 1e-12) {
      throw Error("mismatched q grids: entries differ at index " + std::to_string(i));
    }
  }

  CompareRecord rec;
  double sq = 0.0;
  for (std::size_t i = 0; i < a.q.size(); ++i) {
    const double d = std::abs(a.D[i] - b.D[i]);
    rec.d_max = std::max(rec.d_max, d);
    sq += d * d;
  }
  rec.d_rms = std::sqrt(sq / static_cast<double>(a.q.size()));

  const auto [amin_a, amax_a] = std::minmax_element(a.alpha.begin(), a.alpha.end());
  const auto [amin_b, amax_b] = std::minmax_element(b.alpha.begin(), b.alpha.end());
  const double lo = std::max(*amin_a, *amin_b);
  const double hi = std::min(*amax_a, *amax_b);
  if (hi > lo) {
    const std::size_t k = 201;
    double fsq = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(k - 1);
      const double d = std::abs(f_on_curve(a.alpha, a.f_alpha, x) -
                                f_on_curve(b.alpha, b.f_alpha, x));
      rec.f_max = std::max(rec.f_max, d);
      fsq += d * d;
    }
    rec.f_rms = std::sqrt(fsq / static_cast<double>(k));
    rec.f_samples = k;
  } else {
    rec.f_max = kNaN;
    rec.f_rms = kNaN;
    rec.f_samples = 0;
  }

  rec.delta_alpha_minus = std::abs(a.alpha_minus - b.alpha_minus);
  rec.delta_alpha_plus = std::abs(a.alpha_plus - b.alpha_plus);
  try {
    const double qa = tsallis_q(a.alpha_minus, a.alpha_plus);
    const double qb = tsallis_q(b.alpha_minus, b.alpha_plus);
    rec.delta_tsallis_q = std::abs(qa - qb);
  } catch (const Error&) {
    rec.delta_tsallis_q.reset();
  }
  return rec;
}

std::string compare_to_json(const CompareRecord& rec, const std::string& label_a,
                            const std::string& label_b) {
  ordered_json j;
  j["schema_version"] = 1;
  j["a"] = label_a;
  j["b"] = label_b;
  j["d_max"] = num_or_null(rec.d_max);
  j["d_rms"] = num_or_null(rec.d_rms);
  j["f_max"] = num_or_null(rec.f_max);
  j["f_rms"] = num_or_null(rec.f_rms);
  j["f_samples"] = rec.f_samples;
  if (rec.f_samples == 0) {
    j["null_reasons"]["f_max"] = "no overlap between the two alpha ranges";
    j["null_reasons"]["f_rms"] = "no overlap between the two alpha ranges";
  }
  j["delta_alpha_minus"] = num_or_null(rec.delta_alpha_minus);
  j["delta_alpha_plus"] = num_or_null(rec.delta_alpha_plus);
  if (rec.delta_tsallis_q.has_value()) {
    j["delta_tsallis_q"] = num_or_null(*rec.delta_tsallis_q);
  } else {
    j["delta_tsallis_q"] = nullptr;
    j["null_reasons"]["delta_tsallis_q"] = "Q undefined on at least one side (monofractal)";
  }
  return j.dump(2) + "\n";
}

namespace {

ordered_json entry_to_json(const ReportEntry& e) {
  ordered_json j;
  j["document"] = e.document;
  j["series"] = e.series;
  j["variant"] = e.variant;
  if (e.seed.has_value()) {
    j["seed"] = *e.seed;
  } else {
    j["seed"] = nullptr;
  }
  j["n_tokens"] = e.n_tokens;
  j["n_increments"] = e.n_increments;
  j["warnings"] = e.warnings;
  if (!e.error.empty()) {
    j["error"] = e.error;
    j["scalars"] = nullptr;
    j["zero_boxes"] = nullptr;
    j["identities"] = nullptr;
    j["cascade"] = nullptr;
    j["spectrum_csv"] = nullptr;
    return j;
  }
  j["error"] = nullptr;

  ordered_json null_reasons = ordered_json::object();
  auto put = [&](ordered_json& obj, const char* key, double v, const char* reason) {
    obj[key] = num_or_null(v);
    if (!std::isfinite(v)) null_reasons[key] = reason;
  };

  const auto& sp = e.spectrum;
  std::size_t peak = 0;
  for (std::size_t i = 1; i < sp.f_alpha.size(); ++i) {
    if (sp.f_alpha[i] > sp.f_alpha[peak]) peak = i;
  }

  ordered_json scalars;
  put(scalars, "c1", sp.C1, "q=1 outside the analyzed q range");
  put(scalars, "alpha_minus", sp.alpha_minus, "empty spectrum");
  scalars["alpha_minus_crossed"] = sp.alpha_minus_crossed;
  put(scalars, "alpha_plus", sp.alpha_plus, "empty spectrum");
  scalars["alpha_plus_crossed"] = sp.alpha_plus_crossed;
  put(scalars, "d0", sp.d_at(0.0), "q=0 not on the analyzed grid");
  put(scalars, "d1", sp.d_at(1.0), "q=1 not on the analyzed grid");
  put(scalars, "d2", sp.d_at(2.0), "q=2 not on the analyzed grid");
  put(scalars, "f_peak", sp.f_alpha.empty() ? kNaN : sp.f_alpha[peak], "empty spectrum");
  put(scalars, "alpha_at_f_peak", sp.alpha.empty() ? kNaN : sp.alpha[peak], "empty spectrum");
  j["scalars"] = scalars;

  ordered_json zb;
  zb["total"] = e.zero_boxes_total;
  zb["max_per_s"] = e.zero_boxes_max_per_s;
  j["zero_boxes"] = zb;

  ordered_json ident;
  put(ident, "prob_sum_max_error", e.identities.max_prob_sum_error, "not computed");
  put(ident, "chi_q1_max_error", e.identities.max_chi1_error, "q=1 not on the analyzed grid");
  put(ident, "tau_q1_abs", e.identities.tau1_abs, "q=1 not on the analyzed grid");
  put(ident, "f_max_minus_d0_abs", e.identities.fmax_minus_d0_abs,
      "q=0 not on the analyzed grid");
  put(ident, "legendre_max_err", e.identities.legendre_max_err, "not computed");
  ident["legendre_points"] = e.identities.legendre_points;
  ident["alpha_increase_violations"] = e.identities.alpha_increase_violations;
  j["identities"] = ident;

  if (e.cascade.has_value()) {
    ordered_json c;
    put(c, "w1", e.cascade->params.weights[0], "not computed");
    put(c, "w2", e.cascade->params.weights[1], "not computed");
    put(c, "r1", e.cascade->params.ratios[0], "not computed");
    put(c, "r2", e.cascade->params.ratios[1], "not computed");
    put(c, "residual", e.cascade->residual, "not computed");
    put(c, "tsallis_q", e.cascade->tsallis_q, "not computed");
    j["cascade"] = c;
  } else {
    j["cascade"] = nullptr;
    null_reasons["cascade"] =
        e.cascade_null_reason.empty() ? "not computed" : e.cascade_null_reason;
  }

  j["spectrum_csv"] = e.spectrum_csv;
  if (!null_reasons.empty()) j["null_reasons"] = null_reasons;
  return j;
}

}  // namespace

std::string report_to_json(const Report& report) {
  ordered_json j;
  j["schema_version"] = 1;
  j["tool"] = "wordmf";
  j["tool_version"] = report.tool_version;
  j["generated_at"] = report.generated_at;

  ordered_json grid;
  grid["s_min"] = report.grid.s_values.empty() ? 0 : report.grid.s_values.front();
  grid["s_max"] = report.grid.s_values.empty() ? 0 : report.grid.s_values.back();
  grid["s_count"] = report.grid.s_values.size();
  grid["q_min"] = report.grid.q_values.empty() ? 0.0 : report.grid.q_values.front();
  grid["q_max"] = report.grid.q_values.empty() ? 0.0 : report.grid.q_values.back();
  grid["q_count"] = report.grid.q_values.size();
  grid["eps_q0"] = report.grid.eps_q0;
  grid["eps_q1"] = report.grid.eps_q1;
  j["grid"] = grid;

  ordered_json tok;
  tok["lowercase"] = report.tokenizer.lowercase;
  tok["strip_punctuation"] = report.tokenizer.strip_punctuation;
  tok["keep_internal_apostrophes"] = report.tokenizer.keep_internal_apostrophes;
  tok["strip_chapter_heads"] = report.tokenizer.strip_chapter_heads;
  tok["strip_gutenberg_boilerplate"] = report.tokenizer.strip_gutenberg_boilerplate;
  tok["chapter_pattern"] = report.tokenizer.chapter_pattern;
  j["tokenizer"] = tok;

  j["inputs"] = report.inputs;
  j["shuffle_seeds"] = report.shuffle_seeds;

  ordered_json input_errors = ordered_json::array();
  for (const auto& [input, error] : report.input_errors) {
    ordered_json rec;
    rec["input"] = input;
    rec["error"] = error;
    input_errors.push_back(rec);
  }
  j["input_errors"] = input_errors;

  ordered_json entries = ordered_json::array();
  for (const auto& e : report.entries) entries.push_back(entry_to_json(e));
  j["entries"] = entries;
  return j.dump(2) + "\n";
}

void write_mass_csv(std::ostream& os, std::span<const double> mass) {
  os << "value\n";
  char buf[64];
  for (double m : mass) {
    std::snprintf(buf, sizeof buf, "%.17g\n", m);
    os << buf;
  }
}

}  // namespace wordmf
