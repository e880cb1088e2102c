#include "magnograph/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "magnograph/error.hpp"

namespace magnograph {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

double mu_cp_formula(double c, double p, double C_p, double lambda_1) {
  if (!(c > 0.0)) throw DomainError("mu_{c,p} needs c > 0");
  if (!(p > 2.0)) throw DomainError("mu_{c,p} needs p > 2");
  const double e = (6.0 - p) / (2.0 * p - 4.0);
  const double base = p <= 6.0 ? lambda_1 : 2.0 * p * c / (p - 2.0);
  return std::pow(C_p, 2.0 / (2.0 - p)) * std::pow(base, e);
}

double mu_star_formula(double lambda, double p, double C_p) {
  if (!(p > 2.0 && p < 6.0)) throw RegimeError("mu*_{lambda,p} is defined only for 2 < p < 6");
  if (!(lambda < 0.0)) throw RegimeError("mu*_{lambda,p} is defined only for lambda < 0");
  const double e = (6.0 - p) / (2.0 * p - 4.0);
  return std::pow(4.0 / (6.0 - p), e) * std::sqrt(4.0 / (p - 2.0)) * std::pow(C_p, 2.0 / (2.0 - p)) *
         std::pow(std::abs(lambda), e);
}

double delta_formula(double ess, double lambda_k) { return std::isinf(ess) ? 1.0 : (ess - lambda_k) / 2.0; }

double mu_double_star_formula(double p, double C_inf, double lambda_k, double delta_k) {
  if (!(delta_k > 0.0)) return kNaN;
  return std::pow(C_inf, -2.0) * std::sqrt((p - 2.0) / (p * lambda_k)) *
         std::pow(delta_k / (3.0 * (p - 1.0)), 2.0 / (p - 2.0));
}

double mu_tilde_bisect(const std::vector<double>& levels, std::size_t k, double p, double C_p) {
  if (k <= 1) return kInf;
  auto holds = [&](double mu) {
    for (std::size_t i = 1; i < k; ++i) {
      const double lhs = C_p * std::pow(mu, p / 2.0 - 1.0) * std::pow(levels[i], (p - 2.0) / 4.0) / p;
      if (!(lhs < (levels[i] - levels[i - 1]) / 2.0)) return false;
    }
    return true;
  };
  double lo = 0.0, hi = 1.0;
  while (holds(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) return kInf;
  }
  while (hi - lo > 1e-10 * hi) {
    const double mid = 0.5 * (lo + hi);
    (holds(mid) ? lo : hi) = mid;
  }
  return lo;
}

std::vector<double> distinct_levels(const Spectrum& spec) {
  std::vector<double> out;
  std::vector<int> count;
  for (int j = 0; j < spec.size(); ++j) {
    const auto c = static_cast<std::size_t>(spec.cluster[static_cast<std::size_t>(j)]);
    if (c >= out.size()) {
      out.push_back(0.0);
      count.push_back(0);
    }
    out[c] += spec.values[j];
    ++count[c];
  }
  for (std::size_t c = 0; c < out.size(); ++c) out[c] /= count[c];
  return out;
}

double Thresholds::mu_cp(double c) const { return mu_cp_formula(c, p, C_p, lambda_1()); }

double Thresholds::mu_star(double lambda) const { return mu_star_formula(lambda, p, C_p); }

Thresholds compute_thresholds(const Spectrum& spec, const GnsConstants& constants, double p, int k,
                              double ess_surrogate, bool ess_caveat) {
  if (!(p > 2.0)) throw ValidationError("p must exceed 2");
  Thresholds t;
  t.p = p;
  t.C_p = constants.C_p;
  t.C_inf = constants.C_inf;
  t.ess_surrogate = ess_surrogate;
  t.ess_caveat = ess_caveat;
  std::vector<double> all = distinct_levels(spec);
  if (k < 1 || static_cast<int>(all.size()) < k)
    throw ValidationError("need " + std::to_string(k) + " distinct levels, spectrum has " +
                          std::to_string(all.size()));
  t.levels.assign(all.begin(), all.begin() + k);

  t.mu_0 = t.mu_cp(t.lambda_1() / 2.0);
  for (int j = 0; j < k; ++j) {
    const double lk = t.levels[static_cast<std::size_t>(j)];
    t.mu_tilde.push_back(mu_tilde_bisect(t.levels, static_cast<std::size_t>(j + 1), p, t.C_p));
    t.delta.push_back(delta_formula(ess_surrogate, lk));
    t.mu_double_star.push_back(mu_double_star_formula(p, t.C_inf, lk, t.delta.back()));
    const double mds = t.mu_double_star.back();
    // mu** only constrains noncompact graphs; with no gap below the surrogate it does not exist
    const bool noncompact = !std::isinf(ess_surrogate);
    const double mds_cap = !noncompact ? kInf : (std::isnan(mds) ? 0.0 : mds);
    t.mu_star_level.push_back(std::min({t.mu_cp(lk / 2.0), t.mu_tilde.back(), mds_cap}));
  }
  if (std::isinf(ess_surrogate)) {
    t.mu_star_0 = t.mu_0;
  } else {
    t.mu_star_0 = std::min(t.mu_0, std::isnan(t.mu_double_star[0]) ? 0.0 : t.mu_double_star[0]);
  }
  return t;
}

}  // namespace magnograph
