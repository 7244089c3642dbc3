#pragma once

#include <functional>
#include <optional>

#include "oco/geometry.hpp"
#include "oco/rng.hpp"
#include "oco/vec.hpp"

namespace oco {

// Exact shape descriptor f(x) = (mu/2)||x - anchor||^2 + <slope, x> + const.
// Losses that carry one let sums of losses minimize in closed form, which the
// comparator solver prefers over iterative descent (mu = 0 means affine).
struct CurvatureForm {
  double mu = 0.0;
  Vec anchor;
  Vec slope;
};

// A single-round loss with the constants the harness needs: |f| <= bound_m0
// on the domain, lipschitz_m1 wrt the Euclidean norm, and the largest mu for
// which f is mu-strongly convex. subgrad returns the minimum-norm element of
// the subdifferential (ties at kinks resolve toward zero).
struct LossFunction {
  std::function<double(const Vec&)> eval;
  std::function<Vec(const Vec&)> subgrad;
  double bound_m0 = 0.0;
  double lipschitz_m1 = 0.0;
  double strong_convexity = 0.0;
  bool convex = true;
  std::optional<CurvatureForm> form;

  // mu-subgradient at x: any ordinary subgradient qualifies whenever
  // mu <= strong_convexity. Rejects larger mu.
  Vec subgradient_mu(const Vec& x, double mu) const;
};

// q(y) = <slope, y - anchor> + mu/2 ||y - anchor||^2
struct QuadraticSurrogate {
  Vec anchor;
  Vec slope;
  double mu = 0.0;

  double eval(const Vec& y) const;
  Vec gradient(const Vec& y) const;
};

QuadraticSurrogate quadratize(const Vec& x, const Vec& o, double mu);

// Wraps a surrogate as a LossFunction with constants valid on k.
LossFunction surrogate_loss(const QuadraticSurrogate& q, const ConvexDomain& k);

enum class NoiseKind { kNone, kUniform, kGaussian };

// Bounded additive observation noise. uniform draws from
// [-width/2, width/2]; gaussian draws sigma * N(0,1) clamped to [-clip, clip]
// (symmetric clamping keeps the mean at zero).
struct NoiseSpec {
  NoiseKind kind = NoiseKind::kNone;
  double width = 0.0;
  double sigma = 0.0;
  double clip = 0.0;

  static NoiseSpec none() { return {}; }
  static NoiseSpec uniform(double width);
  static NoiseSpec gaussian(double sigma, double clip);

  double max_magnitude() const;
  double sample(Rng& rng) const;
  bool is_none() const { return kind == NoiseKind::kNone; }
};

// Feedback channel handed to agents. order 0 answers with scalar values,
// order 1 with (mu-)subgradients; every observation stays inside the stated
// bound by construction.
struct QueryOracle {
  int order = 1;
  bool deterministic = true;
  double bound = 0.0;
  std::function<double(const Vec&, Rng&)> value_fn;
  std::function<Vec(const Vec&, Rng&)> grad_fn;

  double value(const Vec& x, Rng& rng) const;
  Vec gradient(const Vec& x, Rng& rng) const;
};

QueryOracle make_value_oracle(const LossFunction& f, const NoiseSpec& noise);
// mu selects which mu-subgradient the oracle reports; noise is added per
// coordinate (dim components).
QueryOracle make_gradient_oracle(const LossFunction& f, double mu,
                                 const NoiseSpec& noise, int dim);

Vec one_point_estimate(int k, double delta, double obs, const Vec& v);
Vec two_point_estimate(int k, double delta, double f_plus, double f_minus,
                       const Vec& v);

struct SmoothedValue {
  double mean = 0.0;
  double std_error = 0.0;
};

// Monte Carlo estimate of the delta-smoothed value
// E_{v ~ unit ball of L0}[f(x + delta v)]. Every probe must land inside k.
SmoothedValue smoothed_eval(const LossFunction& f, const ConvexDomain& k,
                            double delta, const Vec& x, int n, Rng& rng);

// Lipschitz-style bound (2 m0 / alpha) ||x - y|| valid for convex f bounded
// by m0 when x lies in the alpha-shrunk domain.
double almost_lipschitz_bound(double m0, double alpha, const Vec& x,
                              const Vec& y);

// Concrete families used by adversaries and tests.
LossFunction linear_loss(const Vec& slope, const ConvexDomain& k);
LossFunction quadratic_loss(const Vec& minimizer, double mu,
                            const ConvexDomain& k);
// (m1 / sqrt(d)) * ||y - center||_1; Lipschitz constant m1.
LossFunction abs_loss(const Vec& center, double m1, const ConvexDomain& k);

}  // namespace oco
