#include "oco/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace oco {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Euclidean projection onto {x >= 0, sum x = 1} via sort and threshold.
Vec project_standard_simplex(const Vec& y) {
  const int d = static_cast<int>(y.size());
  Vec u = y;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0;
  double tau = 0.0;
  for (int j = 0; j < d; ++j) {
    css += u[j];
    const double t = (css - 1.0) / (j + 1);
    if (u[j] - t > 0.0) tau = t;
  }
  Vec out(d);
  for (int i = 0; i < d; ++i) out[i] = std::max(0.0, y[i] - tau);
  return out;
}

}  // namespace

ConvexDomain ConvexDomain::box(Vec lo, Vec hi) {
  require(!lo.empty(), "box: lo must be nonempty");
  require(lo.size() == hi.size(), "box: lo and hi must have equal length");
  for (std::size_t i = 0; i < lo.size(); ++i) {
    require(std::isfinite(lo[i]) && std::isfinite(hi[i]),
            "box: bounds must be finite");
    require(lo[i] < hi[i], "box: lo must be strictly below hi in every axis");
  }
  ConvexDomain k;
  k.shape_ = Shape::kBox;
  k.d_ = static_cast<int>(lo.size());
  k.k_ = k.d_;
  k.lo_ = std::move(lo);
  k.hi_ = std::move(hi);
  k.finish_setup();
  return k;
}

ConvexDomain ConvexDomain::ball(Vec center, double radius) {
  require(!center.empty(), "ball: center must be nonempty");
  require(all_finite(center), "ball: center must be finite");
  require(std::isfinite(radius) && radius > 0.0,
          "ball: radius must be positive");
  ConvexDomain k;
  k.shape_ = Shape::kBall;
  k.d_ = static_cast<int>(center.size());
  k.k_ = k.d_;
  k.ball_center_ = std::move(center);
  k.ball_radius_ = radius;
  k.finish_setup();
  return k;
}

ConvexDomain ConvexDomain::simplex(int dim) {
  require(dim >= 2, "simplex: dim must be at least 2");
  ConvexDomain k;
  k.shape_ = Shape::kSimplex;
  k.d_ = dim;
  k.k_ = dim - 1;
  k.simplex_dim_ = dim;
  k.simplex_scale_ = 1.0;
  k.finish_setup();
  return k;
}

void ConvexDomain::finish_setup() {
  switch (shape_) {
    case Shape::kBox: {
      center_.resize(d_);
      double min_half = std::numeric_limits<double>::infinity();
      double diag = 0.0;
      for (int i = 0; i < d_; ++i) {
        center_[i] = 0.5 * (lo_[i] + hi_[i]);
        const double half = 0.5 * (hi_[i] - lo_[i]);
        min_half = std::min(min_half, half);
        diag += (hi_[i] - lo_[i]) * (hi_[i] - lo_[i]);
      }
      inradius_ = min_half;
      diameter_ = std::sqrt(diag);
      basis_.assign(d_, Vec(d_, 0.0));
      for (int i = 0; i < d_; ++i) basis_[i][i] = 1.0;
      break;
    }
    case Shape::kBall: {
      center_ = ball_center_;
      inradius_ = ball_radius_;
      diameter_ = 2.0 * ball_radius_;
      basis_.assign(d_, Vec(d_, 0.0));
      for (int i = 0; i < d_; ++i) basis_[i][i] = 1.0;
      break;
    }
    case Shape::kSimplex: {
      const int d = simplex_dim_;
      center_.assign(d, 1.0 / d);
      // Base inradius 1/sqrt(d(d-1)) scales with the shrink factor.
      inradius_ = simplex_scale_ / std::sqrt(double(d) * (d - 1));
      diameter_ = simplex_scale_ * std::sqrt(2.0);
      basis_.clear();
      basis_.reserve(d - 1);
      // Helmert vectors: i ones followed by -i, normalized; orthonormal and
      // orthogonal to the all-ones direction.
      for (int i = 1; i < d; ++i) {
        Vec b(d, 0.0);
        const double s = 1.0 / std::sqrt(double(i) * (i + 1));
        for (int j = 0; j < i; ++j) b[j] = s;
        b[i] = -double(i) * s;
        basis_.push_back(std::move(b));
      }
      break;
    }
  }
}

std::vector<Vec> ConvexDomain::simplex_vertices() const {
  std::vector<Vec> vs;
  vs.reserve(simplex_dim_);
  for (int i = 0; i < simplex_dim_; ++i) {
    Vec v = center_;
    for (int j = 0; j < simplex_dim_; ++j) {
      const double base = (j == i) ? 1.0 : 0.0;
      v[j] = center_[j] + simplex_scale_ * (base - center_[j]);
    }
    vs.push_back(std::move(v));
  }
  return vs;
}

Vec ConvexDomain::project(const Vec& x) const {
  require(static_cast<int>(x.size()) == d_,
          "project: point dimension mismatch");
  require(all_finite(x), "project: point must be finite");
  // The closed forms can drift by an ulp when fed their own output (radial
  // rescaling, simplex thresholding); iterating to a bitwise fixed point
  // makes projection exactly idempotent. Rounding can also trap the
  // iteration in a two-cycle, which both elements must resolve alike.
  Vec p = project_once(x);
  Vec prev;
  for (int pass = 0; pass < 100; ++pass) {
    Vec q = project_once(p);
    if (q == p) break;
    if (q == prev) return std::min(p, q);
    prev = std::move(p);
    p = std::move(q);
  }
  return p;
}

Vec ConvexDomain::project_once(const Vec& x) const {
  switch (shape_) {
    case Shape::kBox: {
      Vec out(d_);
      for (int i = 0; i < d_; ++i) out[i] = std::clamp(x[i], lo_[i], hi_[i]);
      return out;
    }
    case Shape::kBall: {
      Vec diff = sub(x, ball_center_);
      const double n = norm2(diff);
      if (n <= ball_radius_) return x;
      Vec out = ball_center_;
      axpy(ball_radius_ / n, diff, out);
      return out;
    }
    case Shape::kSimplex: {
      if (simplex_scale_ == 1.0) return project_standard_simplex(x);
      // Projection commutes with the scaling map about the barycenter.
      Vec z(d_);
      for (int i = 0; i < d_; ++i)
        z[i] = center_[i] + (x[i] - center_[i]) / simplex_scale_;
      Vec p = project_standard_simplex(z);
      Vec out(d_);
      for (int i = 0; i < d_; ++i)
        out[i] = center_[i] + simplex_scale_ * (p[i] - center_[i]);
      return out;
    }
  }
  return x;
}

bool ConvexDomain::contains(const Vec& x, double tol) const {
  if (static_cast<int>(x.size()) != d_ || !all_finite(x)) return false;
  return distance(x, project(x)) <= tol;
}

ConvexDomain ConvexDomain::shrink(double alpha) const {
  require(std::isfinite(alpha) && alpha >= 0.0,
          "shrink: alpha must be nonnegative");
  require(alpha < inradius_, "shrink: alpha must be below interior_radius");
  if (alpha == 0.0) return *this;
  const double beta = 1.0 - alpha / inradius_;
  ConvexDomain out = *this;
  switch (shape_) {
    case Shape::kBox:
      for (int i = 0; i < d_; ++i) {
        out.lo_[i] = center_[i] + beta * (lo_[i] - center_[i]);
        out.hi_[i] = center_[i] + beta * (hi_[i] - center_[i]);
      }
      break;
    case Shape::kBall:
      out.ball_radius_ = beta * ball_radius_;
      break;
    case Shape::kSimplex:
      out.simplex_scale_ = beta * simplex_scale_;
      break;
  }
  out.finish_setup();
  return out;
}

Vec ConvexDomain::sample_unit_sphere(Rng& rng) const {
  Vec coeff(k_);
  double n = 0.0;
  do {
    for (int i = 0; i < k_; ++i) coeff[i] = rng.normal();
    n = norm2(coeff);
  } while (n < 1e-12);
  Vec out(d_, 0.0);
  for (int i = 0; i < k_; ++i) axpy(coeff[i] / n, basis_[i], out);
  return out;
}

Vec ConvexDomain::sample_unit_ball(Rng& rng) const {
  Vec v = sample_unit_sphere(rng);
  const double r = std::pow(rng.uniform(), 1.0 / k_);
  for (double& c : v) c *= r;
  return v;
}

Vec ConvexDomain::sample_point(Rng& rng) const {
  switch (shape_) {
    case Shape::kBox: {
      Vec out(d_);
      for (int i = 0; i < d_; ++i) out[i] = rng.uniform(lo_[i], hi_[i]);
      return out;
    }
    case Shape::kBall: {
      Vec v = sample_unit_ball(rng);
      Vec out = ball_center_;
      axpy(ball_radius_, v, out);
      return out;
    }
    case Shape::kSimplex: {
      Vec e(d_);
      double s = 0.0;
      for (int i = 0; i < d_; ++i) {
        e[i] = -std::log(1.0 - rng.uniform());
        s += e[i];
      }
      Vec out(d_);
      for (int i = 0; i < d_; ++i)
        out[i] = center_[i] + simplex_scale_ * (e[i] / s - center_[i]);
      return out;
    }
  }
  return center_;
}

double ConvexDomain::support(const Vec& a) const {
  require(static_cast<int>(a.size()) == d_,
          "support: direction dimension mismatch");
  switch (shape_) {
    case Shape::kBox: {
      double s = 0.0;
      for (int i = 0; i < d_; ++i) s += a[i] > 0.0 ? a[i] * hi_[i] : a[i] * lo_[i];
      return s;
    }
    case Shape::kBall:
      return dot(a, ball_center_) + ball_radius_ * norm2(a);
    case Shape::kSimplex: {
      double best = -std::numeric_limits<double>::infinity();
      for (const Vec& v : simplex_vertices()) best = std::max(best, dot(a, v));
      return best;
    }
  }
  return 0.0;
}

Vec ConvexDomain::support_point(const Vec& a) const {
  require(static_cast<int>(a.size()) == d_,
          "support_point: direction dimension mismatch");
  switch (shape_) {
    case Shape::kBox: {
      Vec out(d_);
      for (int i = 0; i < d_; ++i)
        out[i] = a[i] > 0.0 ? hi_[i] : (a[i] < 0.0 ? lo_[i] : center_[i]);
      return out;
    }
    case Shape::kBall: {
      const double n = norm2(a);
      if (n == 0.0) return ball_center_;
      Vec out = ball_center_;
      axpy(ball_radius_ / n, a, out);
      return out;
    }
    case Shape::kSimplex: {
      const std::vector<Vec> verts = simplex_vertices();
      std::size_t best = 0;
      double best_val = dot(a, verts[0]);
      for (std::size_t i = 1; i < verts.size(); ++i) {
        const double v = dot(a, verts[i]);
        if (v > best_val) {
          best_val = v;
          best = i;
        }
      }
      return verts[best];
    }
  }
  return center_;
}

double ConvexDomain::max_distance(const Vec& p) const {
  require(static_cast<int>(p.size()) == d_,
          "max_distance: point dimension mismatch");
  switch (shape_) {
    case Shape::kBox: {
      double s = 0.0;
      for (int i = 0; i < d_; ++i) {
        const double far = std::max(std::abs(p[i] - lo_[i]), std::abs(p[i] - hi_[i]));
        s += far * far;
      }
      return std::sqrt(s);
    }
    case Shape::kBall:
      return distance(p, ball_center_) + ball_radius_;
    case Shape::kSimplex: {
      double best = 0.0;
      for (const Vec& v : simplex_vertices()) best = std::max(best, distance(p, v));
      return best;
    }
  }
  return 0.0;
}

bool ConvexDomain::same_set(const ConvexDomain& other, double tol) const {
  if (shape_ != other.shape_ || d_ != other.d_) return false;
  switch (shape_) {
    case Shape::kBox:
      for (int i = 0; i < d_; ++i) {
        if (std::abs(lo_[i] - other.lo_[i]) > tol) return false;
        if (std::abs(hi_[i] - other.hi_[i]) > tol) return false;
      }
      return true;
    case Shape::kBall:
      return distance(ball_center_, other.ball_center_) <= tol &&
             std::abs(ball_radius_ - other.ball_radius_) <= tol;
    case Shape::kSimplex:
      return simplex_dim_ == other.simplex_dim_ &&
             std::abs(simplex_scale_ - other.simplex_scale_) <= tol;
  }
  return false;
}

}  // namespace oco
