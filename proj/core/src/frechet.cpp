#include "wbary/frechet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wbary/error.hpp"

namespace wbary {

namespace {

double norm(const Point& x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc);
}

double dist_between(const Point& a, const Point& b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double t = a[k] - b[k];
    acc += t * t;
  }
  return std::sqrt(acc);
}

Point weighted_mean(std::span<const Point> pts, std::span<const double> lam) {
  Point x(pts[0].size(), 0.0);
  for (std::size_t j = 0; j < pts.size(); ++j)
    for (std::size_t k = 0; k < x.size(); ++k) x[k] += lam[j] * pts[j][k];
  return x;
}

struct Candidate {
  Point point;
  double objective;
};

// Lower objective wins; within tie_tol the lexicographically smaller point.
bool better(const Candidate& a, const Candidate& b, double tie_tol) {
  if (a.objective < b.objective - tie_tol) return true;
  if (a.objective > b.objective + tie_tol) return false;
  return lex_less(a.point, b.point);
}

void gradient(double p, std::span<const Point> pts, std::span<const double> lam, const Point& x, Point& g) {
  std::fill(g.begin(), g.end(), 0.0);
  for (std::size_t j = 0; j < pts.size(); ++j) {
    const double r = dist_between(x, pts[j]);
    if (r == 0.0 || lam[j] == 0.0) continue;
    const double w = lam[j] * p * std::pow(r, p - 2.0);
    for (std::size_t k = 0; k < x.size(); ++k) g[k] += w * (x[k] - pts[j][k]);
  }
}

// Solves h d = r in place (h is dim x dim, symmetric); false if singular.
bool solve_dense(std::vector<double> h, Point& r) {
  const std::size_t n = r.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t i = c + 1; i < n; ++i)
      if (std::abs(h[i * n + c]) > std::abs(h[piv * n + c])) piv = i;
    double scale = 0.0;
    for (double v : h) scale = std::max(scale, std::abs(v));
    if (std::abs(h[piv * n + c]) <= 1e-12 * scale) return false;
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(h[c * n + k], h[piv * n + k]);
      std::swap(r[c], r[piv]);
    }
    for (std::size_t i = c + 1; i < n; ++i) {
      const double f = h[i * n + c] / h[c * n + c];
      for (std::size_t k = c; k < n; ++k) h[i * n + k] -= f * h[c * n + k];
      r[i] -= f * r[c];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) r[i] -= h[i * n + k] * r[k];
    r[i] /= h[i * n + i];
  }
  return true;
}

// Damped Newton from x; the objective is smooth away from the data points,
// so this stops as soon as an iterate gets too close to one of them.
void newton_polish(const Space& s, double p, std::span<const Point> pts, std::span<const double> lam, Point& x,
                   double& fx, std::size_t& iterations) {
  const std::size_t dim = x.size();
  Point g(dim), d(dim), trial(dim), g_trial(dim);
  std::vector<double> h(dim * dim);
  for (int it = 0; it < 100; ++it) {
    std::fill(h.begin(), h.end(), 0.0);
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (lam[j] == 0.0) continue;
      const double r = dist_between(x, pts[j]);
      if (r <= 1e-9 * (1.0 + norm(pts[j]))) return;
      const double w = lam[j] * p * std::pow(r, p - 2.0);
      for (std::size_t a = 0; a < dim; ++a) {
        h[a * dim + a] += w;
        for (std::size_t b = 0; b < dim; ++b)
          h[a * dim + b] += w * (p - 2.0) * (x[a] - pts[j][a]) * (x[b] - pts[j][b]) / (r * r);
      }
    }
    gradient(p, pts, lam, x, g);
    const double gn = norm(g);
    if (gn == 0.0) return;
    for (std::size_t k = 0; k < dim; ++k) d[k] = -g[k];
    if (!solve_dense(h, d)) return;
    double slope = 0.0;
    for (std::size_t k = 0; k < dim; ++k) slope += g[k] * d[k];
    if (!(slope < 0.0)) return;
    bool accepted = false;
    double t = 1.0;
    for (int back = 0; back < 40 && !accepted; ++back, t *= 0.5) {
      for (std::size_t k = 0; k < dim; ++k) trial[k] = x[k] + t * d[k];
      const double ft = frechet_objective(s, p, pts, lam, trial);
      if (ft <= fx + 1e-4 * t * slope) {
        accepted = true;
      } else if (ft <= fx + 4e-16 * std::abs(fx)) {
        // flat to rounding: judge by the gradient instead
        gradient(p, pts, lam, trial, g_trial);
        accepted = norm(g_trial) < gn;
      }
      if (accepted) {
        const double step = t * norm(d);
        x = trial;
        fx = ft;
        ++iterations;
        if (step <= 1e-15 * (1.0 + norm(x))) return;
      }
    }
    if (!accepted) return;
  }
}

FrechetResult weiszfeld(const Space& s, std::span<const Point> pts, std::span<const double> lam,
                        const FrechetOptions& opts) {
  const std::size_t dim = pts[0].size();
  Point x = weighted_mean(pts, lam);
  FrechetResult res;
  res.converged = false;
  std::size_t it = 0;
  for (; it < opts.max_iterations; ++it) {
    // Anchor: the iterate sits on a data point.
    std::size_t anchor = pts.size();
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (lam[j] > 0.0 && dist_between(x, pts[j]) <= 1e-14 * (1.0 + norm(pts[j]))) {
        anchor = j;
        break;
      }
    }
    Point num(dim, 0.0);
    Point pull(dim, 0.0);  // sum over non-anchor points of lam_j (x_j - x) / r_j
    double denom = 0.0;
    double anchor_mass = 0.0;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (lam[j] <= 0.0) continue;
      if (anchor < pts.size() && dist_between(pts[j], pts[anchor]) <= 1e-14 * (1.0 + norm(pts[j]))) {
        anchor_mass += lam[j];
        continue;
      }
      const double r = dist_between(x, pts[j]);
      const double w = lam[j] / r;
      denom += w;
      for (std::size_t k = 0; k < dim; ++k) {
        num[k] += w * pts[j][k];
        pull[k] += w * (pts[j][k] - x[k]);
      }
    }
    if (denom == 0.0) {  // every point coincides with the anchor
      res.converged = true;
      break;
    }
    Point next(dim);
    if (anchor < pts.size()) {
      const double pull_norm = norm(pull);
      if (pull_norm <= anchor_mass) {  // 0 lies in the subdifferential
        res.converged = true;
        break;
      }
      const double t = (pull_norm - anchor_mass) / denom;
      for (std::size_t k = 0; k < dim; ++k) next[k] = x[k] + t * pull[k] / pull_norm;
    } else {
      for (std::size_t k = 0; k < dim; ++k) next[k] = num[k] / denom;
    }
    const double step = dist_between(next, x);
    x = std::move(next);
    if (step < opts.step_tol) {
      res.converged = true;
      ++it;
      break;
    }
  }
  res.iterations = it;

  double fx = frechet_objective(s, 1.0, pts, lam, x);
  if (dim > 1) newton_polish(s, 1.0, pts, lam, x, fx, res.iterations);
  Candidate best{x, fx};
  for (std::size_t j = 0; j < pts.size(); ++j) {
    Candidate c{pts[j], frechet_objective(s, 1.0, pts, lam, pts[j])};
    if (better(c, best, opts.tie_tol)) best = std::move(c);
  }
  res.point = std::move(best.point);
  res.objective = best.objective;
  return res;
}

FrechetResult projected_gradient(const Space& s, double p, std::span<const Point> pts, std::span<const double> lam,
                                 const FrechetOptions& opts) {
  const std::size_t dim = pts[0].size();
  Point lo = pts[0], hi = pts[0];
  for (const auto& q : pts) {
    for (std::size_t k = 0; k < dim; ++k) {
      lo[k] = std::min(lo[k], q[k]);
      hi[k] = std::max(hi[k], q[k]);
    }
  }
  Point x = weighted_mean(pts, lam);
  double fx = frechet_objective(s, p, pts, lam, x);
  Point g(dim), trial(dim);
  FrechetResult res;
  res.converged = false;
  std::size_t it = 0;
  for (; it < opts.max_iterations; ++it) {
    gradient(p, pts, lam, x, g);
    if (norm(g) == 0.0) {
      res.converged = true;
      break;
    }
    double t = 1.0;
    bool moved = false;
    double step = 0.0;
    for (int back = 0; back < 200; ++back, t *= 0.5) {
      double decrease = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        trial[k] = std::clamp(x[k] - t * g[k], lo[k], hi[k]);
        decrease += g[k] * (x[k] - trial[k]);
      }
      const double ft = frechet_objective(s, p, pts, lam, trial);
      if (ft <= fx - 1e-4 * decrease) {
        step = dist_between(trial, x);
        moved = ft < fx || step == 0.0;
        if (moved) {
          x = trial;
          fx = ft;
        }
        break;
      }
    }
    if (!moved || step < opts.step_tol) {
      res.converged = true;
      ++it;
      break;
    }
  }
  res.iterations = it;
  newton_polish(s, p, pts, lam, x, fx, res.iterations);
  res.point = std::move(x);
  res.objective = fx;
  return res;
}

}  // namespace

double frechet_objective(const Space& s, double p, std::span<const Point> pts, std::span<const double> lam,
                         std::span<const double> x) {
  if (pts.size() != lam.size()) {
    throw Error(ErrorKind::DimensionMismatch, std::to_string(pts.size()) + " points but " +
                                                  std::to_string(lam.size()) + " weights");
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < pts.size(); ++j) acc += lam[j] * distance_pow(s, x, pts[j], p);
  return acc;
}

FrechetResult frechet_mean(const Space& s, double p, std::span<const Point> pts, std::span<const double> lam,
                           const FrechetOptions& opts) {
  if (!(p >= 1.0)) throw Error(ErrorKind::InvalidArgument, "p must be >= 1");
  if (pts.empty()) throw Error(ErrorKind::InvalidArgument, "frechet_mean needs at least one point");
  if (pts.size() != lam.size()) {
    throw Error(ErrorKind::DimensionMismatch, std::to_string(pts.size()) + " points but " +
                                                  std::to_string(lam.size()) + " weights");
  }
  for (const auto& q : pts) s.check_point(q);

  if (!s.is_euclidean()) {
    const auto& metric = s.metric();
    Candidate best{{0.0}, frechet_objective(s, p, pts, lam, Point{0.0})};
    for (std::size_t c = 1; c < metric.size(); ++c) {
      Candidate cand{{static_cast<double>(c)}, frechet_objective(s, p, pts, lam, Point{static_cast<double>(c)})};
      if (better(cand, best, opts.tie_tol)) best = std::move(cand);
    }
    return {std::move(best.point), best.objective, metric.size(), true};
  }

  // All points equal: that point, for every p.
  if (std::all_of(pts.begin(), pts.end(), [&](const Point& q) { return q == pts[0]; })) {
    return {pts[0], 0.0, 0, true};
  }
  if (p == 2.0) {
    Point x = weighted_mean(pts, lam);
    const double f = frechet_objective(s, p, pts, lam, x);
    return {std::move(x), f, 0, true};
  }
  if (p == 1.0) return weiszfeld(s, pts, lam, opts);
  return projected_gradient(s, p, pts, lam, opts);
}

}  // namespace wbary
