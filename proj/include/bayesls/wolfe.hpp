#pragma once

#include <cmath>
#include <limits>

#include "errors.hpp"

namespace bayesls {

/// One evaluation of the line objective: step, value and directional
/// derivative.
struct PhiSample {
  double alpha = 0.0;
  double phi = 0.0;
  double dphi = 0.0;

  bool finite() const noexcept {
    return std::isfinite(alpha) && std::isfinite(phi) && std::isfinite(dphi);
  }
};

/// Value and slope of the auxiliary function psi at a sample.
struct PsiValue {
  double psi = 0.0;
  double dpsi = 0.0;
};

/// A sample together with its auxiliary-function values.
struct PsiSample {
  PhiSample sample;
  PsiValue aux;

  double alpha() const noexcept { return sample.alpha; }
};

/// Parameters shared by all line searches.
struct WolfeParams {
  /// sufficient-decrease constant
  double mu = 1e-4;
  /// curvature constant
  double eta = 0.9;
  /// largest admissible step; must be finite inside a line search
  double alpha_max = 1e10;
  /// trial step before capping at alpha_max
  double initial_step = 1.0;
  /// interval expansion factor, > 1
  double expansion = 2.0;
  /// required shrink factor over two refinements, in (0, 1)
  double shrink = 2.0 / 3.0;
  /// GP conditioning steps per Bayesian-optimization phase
  int bo_budget = 10;
  /// evaluations allowed after the initial interval has been found
  int total_eval_budget = 40;

  /// First trial step, min(initial_step, alpha_max).
  double first_step() const noexcept {
    return initial_step < alpha_max ? initial_step : alpha_max;
  }

  void validate() const {
    if (!(mu > 0.0 && mu < 1.0))
      throw invalid_parameter("mu must lie in (0, 1)");
    if (!(eta > 0.0 && eta < 1.0))
      throw invalid_parameter("eta must lie in (0, 1)");
    if (!(mu < eta))
      throw invalid_parameter("mu must be smaller than eta");
    if (!(alpha_max > 0.0) || std::isnan(alpha_max))
      throw invalid_parameter("alpha_max must be positive");
    if (!(initial_step > 0.0) || !std::isfinite(initial_step))
      throw invalid_parameter("initial_step must be positive and finite");
    if (!(expansion > 1.0) || !std::isfinite(expansion))
      throw invalid_parameter("expansion factor must exceed 1");
    if (!(shrink > 0.0 && shrink < 1.0))
      throw invalid_parameter("shrink factor must lie in (0, 1)");
    if (bo_budget < 0)
      throw invalid_parameter("bo_budget must be non-negative");
    if (total_eval_budget < 1)
      throw invalid_parameter("total_eval_budget must be positive");
  }
};

// Armijo rule. No slack: the comparisons are the plain IEEE inequalities.
inline bool sufficient_decrease(const PhiSample& at_zero, const PhiSample& s,
                                double mu) noexcept {
  return s.phi <= at_zero.phi + mu * at_zero.dphi * s.alpha;
}

inline bool curvature_strong(const PhiSample& at_zero, const PhiSample& s,
                             double eta) noexcept {
  return std::abs(s.dphi) <= eta * std::abs(at_zero.dphi);
}

inline bool strong_wolfe(const PhiSample& at_zero, const PhiSample& s,
                         double mu, double eta) noexcept {
  return sufficient_decrease(at_zero, s, mu) && curvature_strong(at_zero, s, eta);
}

/// psi(a) = phi(a) - (phi(0) + mu * phi'(0) * a) and its derivative.
inline PsiValue psi(const PhiSample& at_zero, const PhiSample& s,
                    double mu) noexcept {
  return {s.phi - (at_zero.phi + mu * at_zero.dphi * s.alpha),
          s.dphi - mu * at_zero.dphi};
}

inline PsiSample with_psi(const PhiSample& at_zero, const PhiSample& s,
                          double mu) noexcept {
  return {s, psi(at_zero, s, mu)};
}

/// Interval certificate for lo.alpha < hi.alpha: when true, [lo, hi]
/// contains a step satisfying the strong Wolfe conditions.
inline bool certificate_holds(const PsiValue& lo, const PsiValue& hi) noexcept {
  return lo.psi <= 0.0 && lo.dpsi < 0.0 &&
         (hi.psi >= lo.psi || hi.dpsi >= 0.0);
}

inline bool certificate_holds(const PsiSample& lo, const PsiSample& hi) noexcept {
  return certificate_holds(lo.aux, hi.aux);
}

/// Role-ordered form of the certificate. `good` is the endpoint with
/// psi <= 0 that descends toward `other`; the two may appear in either
/// order on the real line. Reduces to certificate_holds when
/// good.alpha < other.alpha.
inline bool certificate_holds_by_role(const PsiSample& good,
                                      const PsiSample& other) noexcept {
  const double dir = other.alpha() - good.alpha();
  if (dir == 0.0) return false;
  return good.aux.psi <= 0.0 && good.aux.dpsi * dir < 0.0 &&
         (other.aux.psi >= good.aux.psi || other.aux.dpsi * dir >= 0.0);
}

} // namespace bayesls
