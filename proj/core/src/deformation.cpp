#include "wbary/deformation.hpp"

#include <cmath>
#include <string>

#include "wbary/error.hpp"

namespace wbary {

double ScalarLaw::draw(SplitMix64& rng, std::uint64_t draw_index) const {
  switch (kind) {
    case Kind::Constant: return a;
    case Kind::Uniform: return rng.uniform(a, b);
    case Kind::Normal: return a + b * rng.normal();
    case Kind::LogNormal: return std::exp(a + b * rng.normal());
    case Kind::TwoPoint:
      if (balanced) return draw_index % 2 == 0 ? a : -a;
      return rng.uniform() < 0.5 ? -a : a;
  }
  return a;
}

void DeformationSpec::validate() const {
  if (dim == 0) throw Error(ErrorKind::InvalidConfig, "deformation.dim must be positive");
  switch (kind) {
    case Kind::Identity:
    case Kind::Translation: break;
    case Kind::Scaling: {
      const bool positive = (factor.kind == ScalarLaw::Kind::Constant && factor.a > 0.0) ||
                            (factor.kind == ScalarLaw::Kind::Uniform && factor.a > 0.0 && factor.b >= factor.a) ||
                            factor.kind == ScalarLaw::Kind::LogNormal;
      if (!positive) {
        throw Error(ErrorKind::InvalidConfig,
                    "deformation.factor must be a strictly positive law (constant > 0, uniform with low > 0, "
                    "or lognormal)");
      }
      if (!center.empty() && center.size() != dim) {
        throw Error(ErrorKind::InvalidConfig, "deformation.center has wrong dimension");
      }
      break;
    }
    case Kind::Affine: break;
    case Kind::MonotoneSpline:
      if (dim != 1) throw Error(ErrorKind::InvalidConfig, "monotone spline deformations need dim 1");
      if (knots.size() < 2) throw Error(ErrorKind::InvalidConfig, "deformation.knots needs at least 2 entries");
      for (std::size_t k = 1; k < knots.size(); ++k) {
        if (!(knots[k] > knots[k - 1])) {
          throw Error(ErrorKind::InvalidConfig, "deformation.knots must be strictly increasing");
        }
      }
      break;
  }
}

Deformation Deformation::identity(std::size_t dim) {
  Deformation d;
  d.kind_ = DeformationSpec::Kind::Identity;
  d.dim_ = dim;
  return d;
}

Deformation Deformation::translation(Point shift) {
  Deformation d;
  d.kind_ = DeformationSpec::Kind::Translation;
  d.dim_ = shift.size();
  d.shift_ = std::move(shift);
  return d;
}

Deformation Deformation::scaling(double factor, Point center) {
  if (!(factor > 0.0)) throw Error(ErrorKind::InvalidArgument, "scaling factor must be strictly positive");
  Deformation d;
  d.kind_ = DeformationSpec::Kind::Scaling;
  d.dim_ = center.size();
  d.factor_ = factor;
  d.center_ = std::move(center);
  return d;
}

namespace {

// Partial-pivot elimination; returns |det|.
double abs_determinant(std::vector<double> a, std::size_t n) {
  double det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    const double pv = a[piv * n + c];
    if (pv == 0.0) return 0.0;
    if (piv != c)
      for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
    det *= pv;
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / pv;
      for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
    }
  }
  return std::abs(det);
}

}  // namespace

Deformation Deformation::affine(std::vector<double> matrix, Point shift) {
  const std::size_t n = shift.size();
  if (matrix.size() != n * n) throw Error(ErrorKind::DimensionMismatch, "affine matrix must be dim x dim");
  if (abs_determinant(matrix, n) < 1e-12) throw Error(ErrorKind::InvalidArgument, "affine matrix is singular");
  Deformation d;
  d.kind_ = DeformationSpec::Kind::Affine;
  d.dim_ = n;
  d.matrix_ = std::move(matrix);
  d.shift_ = std::move(shift);
  return d;
}

Deformation Deformation::monotone_spline(std::vector<double> knots, std::vector<double> values) {
  if (knots.size() < 2 || knots.size() != values.size()) {
    throw Error(ErrorKind::InvalidArgument, "spline needs >= 2 knots and one value per knot");
  }
  for (std::size_t k = 1; k < knots.size(); ++k) {
    if (!(knots[k] > knots[k - 1]) || !(values[k] > values[k - 1])) {
      throw Error(ErrorKind::InvalidArgument, "spline knots and values must be strictly increasing");
    }
  }
  Deformation d;
  d.kind_ = DeformationSpec::Kind::MonotoneSpline;
  d.dim_ = 1;
  d.knots_ = std::move(knots);
  d.values_ = std::move(values);
  return d;
}

Point Deformation::operator()(const Point& x) const {
  if (x.size() != dim_) {
    throw Error(ErrorKind::DimensionMismatch, "deformation of dim " + std::to_string(dim_) +
                                                  " applied to point of dim " + std::to_string(x.size()));
  }
  switch (kind_) {
    case DeformationSpec::Kind::Identity: return x;
    case DeformationSpec::Kind::Translation: {
      Point y = x;
      for (std::size_t k = 0; k < dim_; ++k) y[k] += shift_[k];
      return y;
    }
    case DeformationSpec::Kind::Scaling: {
      Point y = x;
      for (std::size_t k = 0; k < dim_; ++k) y[k] = center_[k] + factor_ * (x[k] - center_[k]);
      return y;
    }
    case DeformationSpec::Kind::Affine: {
      Point y(dim_, 0.0);
      for (std::size_t r = 0; r < dim_; ++r) {
        double acc = shift_[r];
        for (std::size_t c = 0; c < dim_; ++c) acc += matrix_[r * dim_ + c] * x[c];
        y[r] = acc;
      }
      return y;
    }
    case DeformationSpec::Kind::MonotoneSpline: {
      const double t = x[0];
      const std::size_t last = knots_.size() - 1;
      std::size_t seg = 0;
      if (t >= knots_[last]) {
        seg = last - 1;
      } else {
        while (seg + 1 < last && t >= knots_[seg + 1]) ++seg;
      }
      const double slope = (values_[seg + 1] - values_[seg]) / (knots_[seg + 1] - knots_[seg]);
      return {values_[seg] + slope * (t - knots_[seg])};
    }
  }
  return x;
}

Deformation draw_deformation(const DeformationSpec& spec, std::size_t j) {
  spec.validate();
  SplitMix64 rng(derive_seed(spec.seed, {static_cast<std::uint64_t>(j)}));
  const std::size_t d = spec.dim;
  switch (spec.kind) {
    case DeformationSpec::Kind::Identity: return Deformation::identity(d);
    case DeformationSpec::Kind::Translation: {
      Point shift(d);
      for (std::size_t k = 0; k < d; ++k) shift[k] = spec.shift.draw(rng, j);
      return Deformation::translation(std::move(shift));
    }
    case DeformationSpec::Kind::Scaling: {
      Point center = spec.center.empty() ? Point(d, 0.0) : spec.center;
      return Deformation::scaling(spec.factor.draw(rng, j), std::move(center));
    }
    case DeformationSpec::Kind::Affine: {
      // Redraw until the matrix is comfortably nonsingular.
      for (int attempt = 0; attempt < 64; ++attempt) {
        std::vector<double> m(d * d, 0.0);
        for (std::size_t r = 0; r < d; ++r)
          for (std::size_t c = 0; c < d; ++c) m[r * d + c] = (r == c ? 1.0 : 0.0) + spec.perturbation.draw(rng, j);
        Point shift(d);
        for (std::size_t k = 0; k < d; ++k) shift[k] = spec.shift.draw(rng, j);
        if (abs_determinant(m, d) >= 1e-6) return Deformation::affine(std::move(m), std::move(shift));
      }
      throw Error(ErrorKind::InvalidConfig, "affine perturbation law keeps producing singular matrices");
    }
    case DeformationSpec::Kind::MonotoneSpline: {
      std::vector<double> values(spec.knots.size());
      values[0] = spec.knots[0];
      for (std::size_t k = 1; k < spec.knots.size(); ++k) {
        const double slope = std::exp(spec.log_slope.draw(rng, j));
        values[k] = values[k - 1] + slope * (spec.knots[k] - spec.knots[k - 1]);
      }
      return Deformation::monotone_spline(spec.knots, std::move(values));
    }
  }
  return Deformation::identity(d);
}

MeasureEnsemble generate_deformation_ensemble(const Space& space, const DiscreteMeasure& templ,
                                              const DeformationSpec& spec, std::size_t count) {
  if (!space.is_euclidean()) throw Error(ErrorKind::UnsupportedSpace, "deformations need a Euclidean space");
  if (spec.dim != space.point_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "deformation dim does not match the space");
  }
  MeasureEnsemble ens;
  ens.space = space;
  ens.measures.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    const Deformation t = draw_deformation(spec, j);
    ens.measures.push_back(pushforward(templ, [&t](const Point& x) { return t(x); }));
  }
  ens.lambda.assign(count, count == 0 ? 0.0 : 1.0 / static_cast<double>(count));
  return ens;
}

}  // namespace wbary
