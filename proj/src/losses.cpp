#include "oco/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace oco {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

Vec LossFunction::subgradient_mu(const Vec& x, double mu) const {
  require(mu >= 0.0, "subgradient_mu: mu must be nonnegative");
  require(mu <= strong_convexity + 1e-12,
          "subgradient_mu: mu exceeds the strong convexity of the loss");
  return subgrad(x);
}

double QuadraticSurrogate::eval(const Vec& y) const {
  Vec diff = sub(y, anchor);
  return dot(slope, diff) + 0.5 * mu * dot(diff, diff);
}

Vec QuadraticSurrogate::gradient(const Vec& y) const {
  Vec g = slope;
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += mu * (y[i] - anchor[i]);
  return g;
}

QuadraticSurrogate quadratize(const Vec& x, const Vec& o, double mu) {
  require(!x.empty(), "quadratize: anchor must be nonempty");
  require(x.size() == o.size(), "quadratize: anchor and slope sizes differ");
  require(std::isfinite(mu) && mu >= 0.0, "quadratize: mu must be nonnegative");
  require(all_finite(x) && all_finite(o), "quadratize: inputs must be finite");
  return QuadraticSurrogate{x, o, mu};
}

LossFunction surrogate_loss(const QuadraticSurrogate& q,
                            const ConvexDomain& k) {
  const double far = k.max_distance(q.anchor);
  LossFunction f;
  f.eval = [q](const Vec& y) { return q.eval(y); };
  f.subgrad = [q](const Vec& y) { return q.gradient(y); };
  f.bound_m0 = norm2(q.slope) * far + 0.5 * q.mu * far * far;
  f.lipschitz_m1 = norm2(q.slope) + q.mu * far;
  f.strong_convexity = q.mu;
  f.convex = true;
  // q(y) = mu/2 ||y - anchor||^2 + <slope, y> - <slope, anchor>
  f.form = CurvatureForm{q.mu, q.anchor, q.slope};
  return f;
}

NoiseSpec NoiseSpec::uniform(double width) {
  require(std::isfinite(width) && width > 0.0,
          "noise: uniform width must be positive");
  NoiseSpec n;
  n.kind = NoiseKind::kUniform;
  n.width = width;
  return n;
}

NoiseSpec NoiseSpec::gaussian(double sigma, double clip) {
  require(std::isfinite(sigma) && sigma > 0.0,
          "noise: gaussian sigma must be positive");
  require(std::isfinite(clip) && clip > 0.0,
          "noise: gaussian clip must be positive");
  NoiseSpec n;
  n.kind = NoiseKind::kGaussian;
  n.sigma = sigma;
  n.clip = clip;
  return n;
}

double NoiseSpec::max_magnitude() const {
  switch (kind) {
    case NoiseKind::kNone:
      return 0.0;
    case NoiseKind::kUniform:
      return 0.5 * width;
    case NoiseKind::kGaussian:
      return clip;
  }
  return 0.0;
}

double NoiseSpec::sample(Rng& rng) const {
  switch (kind) {
    case NoiseKind::kNone:
      return 0.0;
    case NoiseKind::kUniform:
      return (rng.uniform() - 0.5) * width;
    case NoiseKind::kGaussian:
      return std::clamp(sigma * rng.normal(), -clip, clip);
  }
  return 0.0;
}

double QueryOracle::value(const Vec& x, Rng& rng) const {
  if (order != 0 || !value_fn) {
    throw std::logic_error("oracle: value query on a first-order oracle");
  }
  return value_fn(x, rng);
}

Vec QueryOracle::gradient(const Vec& x, Rng& rng) const {
  if (order != 1 || !grad_fn) {
    throw std::logic_error("oracle: gradient query on a zeroth-order oracle");
  }
  return grad_fn(x, rng);
}

QueryOracle make_value_oracle(const LossFunction& f, const NoiseSpec& noise) {
  QueryOracle q;
  q.order = 0;
  q.deterministic = noise.is_none();
  q.bound = f.bound_m0 + noise.max_magnitude();
  q.value_fn = [f, noise](const Vec& x, Rng& rng) {
    return f.eval(x) + noise.sample(rng);
  };
  return q;
}

QueryOracle make_gradient_oracle(const LossFunction& f, double mu,
                                 const NoiseSpec& noise, int dim) {
  require(dim > 0, "gradient oracle: dim must be positive");
  require(mu >= 0.0 && mu <= f.strong_convexity + 1e-12,
          "gradient oracle: mu exceeds the strong convexity of the loss");
  QueryOracle q;
  q.order = 1;
  q.deterministic = noise.is_none();
  q.bound = f.lipschitz_m1 + noise.max_magnitude() * std::sqrt(double(dim));
  q.grad_fn = [f, mu, noise, dim](const Vec& x, Rng& rng) {
    Vec g = f.subgradient_mu(x, mu);
    if (!noise.is_none()) {
      for (int i = 0; i < dim; ++i) g[i] += noise.sample(rng);
    }
    return g;
  };
  return q;
}

Vec one_point_estimate(int k, double delta, double obs, const Vec& v) {
  require(k >= 1, "one_point_estimate: k must be positive");
  require(std::isfinite(delta) && delta > 0.0,
          "one_point_estimate: delta must be positive");
  require(std::isfinite(obs), "one_point_estimate: observation must be finite");
  return scaled(v, double(k) / delta * obs);
}

Vec two_point_estimate(int k, double delta, double f_plus, double f_minus,
                       const Vec& v) {
  require(k >= 1, "two_point_estimate: k must be positive");
  require(std::isfinite(delta) && delta > 0.0,
          "two_point_estimate: delta must be positive");
  require(std::isfinite(f_plus) && std::isfinite(f_minus),
          "two_point_estimate: observations must be finite");
  return scaled(v, double(k) / (2.0 * delta) * (f_plus - f_minus));
}

SmoothedValue smoothed_eval(const LossFunction& f, const ConvexDomain& k,
                            double delta, const Vec& x, int n, Rng& rng) {
  require(std::isfinite(delta) && delta > 0.0,
          "smoothed_eval: delta must be positive");
  require(n >= 2, "smoothed_eval: need at least two samples");
  require(k.contains(x), "smoothed_eval: x must lie in the domain");
  double mean = 0.0;
  double m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    Vec probe = x;
    axpy(delta, k.sample_unit_ball(rng), probe);
    if (!k.contains(probe)) {
      throw std::invalid_argument(
          "smoothed_eval: probe left the domain; x must lie in the "
          "delta-shrunk set");
    }
    const double val = f.eval(probe);
    const double d1 = val - mean;
    mean += d1 / (i + 1);
    m2 += d1 * (val - mean);
  }
  SmoothedValue out;
  out.mean = mean;
  out.std_error = std::sqrt(m2 / (double(n) - 1.0) / double(n));
  return out;
}

double almost_lipschitz_bound(double m0, double alpha, const Vec& x,
                              const Vec& y) {
  require(m0 >= 0.0, "almost_lipschitz_bound: m0 must be nonnegative");
  require(alpha > 0.0, "almost_lipschitz_bound: alpha must be positive");
  require(x.size() == y.size(), "almost_lipschitz_bound: size mismatch");
  return 2.0 * m0 / alpha * distance(x, y);
}

LossFunction linear_loss(const Vec& slope, const ConvexDomain& k) {
  require(static_cast<int>(slope.size()) == k.ambient_dim(),
          "linear_loss: slope dimension mismatch");
  require(all_finite(slope), "linear_loss: slope must be finite");
  LossFunction f;
  f.eval = [slope](const Vec& y) { return dot(slope, y); };
  f.subgrad = [slope](const Vec&) { return slope; };
  Vec neg = scaled(slope, -1.0);
  f.bound_m0 = std::max(k.support(slope), k.support(neg));
  f.lipschitz_m1 = norm2(slope);
  f.strong_convexity = 0.0;
  f.convex = true;
  f.form = CurvatureForm{0.0, Vec(slope.size(), 0.0), slope};
  return f;
}

LossFunction quadratic_loss(const Vec& minimizer, double mu,
                            const ConvexDomain& k) {
  require(static_cast<int>(minimizer.size()) == k.ambient_dim(),
          "quadratic_loss: minimizer dimension mismatch");
  require(std::isfinite(mu) && mu > 0.0,
          "quadratic_loss: mu must be positive");
  const double far = k.max_distance(minimizer);
  LossFunction f;
  f.eval = [minimizer, mu](const Vec& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double d = y[i] - minimizer[i];
      s += d * d;
    }
    return 0.5 * mu * s;
  };
  f.subgrad = [minimizer, mu](const Vec& y) {
    Vec g(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
      g[i] = mu * (y[i] - minimizer[i]);
    return g;
  };
  f.bound_m0 = 0.5 * mu * far * far;
  f.lipschitz_m1 = mu * far;
  f.strong_convexity = mu;
  f.convex = true;
  f.form = CurvatureForm{mu, minimizer, Vec(minimizer.size(), 0.0)};
  return f;
}

LossFunction abs_loss(const Vec& center, double m1, const ConvexDomain& k) {
  require(static_cast<int>(center.size()) == k.ambient_dim(),
          "abs_loss: center dimension mismatch");
  require(std::isfinite(m1) && m1 > 0.0, "abs_loss: m1 must be positive");
  const int d = k.ambient_dim();
  const double scale = m1 / std::sqrt(double(d));
  const double far = k.max_distance(center);
  LossFunction f;
  f.eval = [center, scale](const Vec& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += std::abs(y[i] - center[i]);
    return scale * s;
  };
  f.subgrad = [center, scale](const Vec& y) {
    Vec g(y.size(), 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double d1 = y[i] - center[i];
      if (d1 > 0.0) g[i] = scale;
      else if (d1 < 0.0) g[i] = -scale;
      // exact kink keeps the minimum-norm choice 0
    }
    return g;
  };
  f.bound_m0 = scale * std::sqrt(double(d)) * far;  // ||.||_1 <= sqrt(d) ||.||_2
  f.lipschitz_m1 = m1;
  f.strong_convexity = 0.0;
  f.convex = true;
  return f;
}

}  // namespace oco
