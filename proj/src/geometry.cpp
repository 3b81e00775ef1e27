#include "pwave/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "pwave/errors.hpp"

namespace pwave {
namespace {

double combine_sups(const std::vector<double>& sups) {
  int nonzero = 0;
  double single = 0.0;
  double squares = 0.0;
  for (double v : sups) {
    if (v > 0.0) {
      ++nonzero;
      single = v;
    }
    squares += v * v;
  }
  return nonzero <= 1 ? single : std::sqrt(squares);
}

// Planar rotation by theta in the (i, j) coordinate plane, and its theta-derivative.
Eigen::MatrixXd givens(int n, int i, int j, double theta) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(n, n);
  const double c = std::cos(theta), s = std::sin(theta);
  g(i, i) = c;
  g(j, j) = c;
  g(i, j) = -s;
  g(j, i) = s;
  return g;
}

Eigen::MatrixXd givens_derivative(int n, int i, int j, double theta) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  const double c = std::cos(theta), s = std::sin(theta);
  g(i, i) = -s;
  g(j, j) = -s;
  g(i, j) = -c;
  g(j, i) = c;
  return g;
}

Eigen::MatrixXd frame_rhs(const Eigen::VectorXd& kappa, const Eigen::MatrixXd& frame) {
  const int d = static_cast<int>(frame.rows());
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(d, d);
  for (int j = 1; j < d; ++j) {
    k(0, j) = kappa[j - 1];
    k(j, 0) = -kappa[j - 1];
  }
  return k * frame;
}

double orthogonality_defect(const Eigen::MatrixXd& m) {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(m.rows(), m.rows());
  return (m * m.transpose() - id).cwiseAbs().maxCoeff();
}

}  // namespace

CurvatureProfile::CurvatureProfile(int dimension, std::vector<Profile> components)
    : dimension_(dimension), components_(std::move(components)) {
  if (dimension < 2) throw InputError("tube dimension must be at least 2");
  if (static_cast<int>(components_.size()) != dimension - 1) {
    throw InputError("curvature needs d - 1 = " + std::to_string(dimension - 1) + " components");
  }
  std::vector<double> sups;
  for (const Profile& c : components_) sups.push_back(c.sup_norm());
  sup_norm_ = combine_sups(sups);
}

CurvatureProfile CurvatureProfile::straight(int dimension) {
  if (dimension < 2) throw InputError("tube dimension must be at least 2");
  return CurvatureProfile(dimension, std::vector<Profile>(dimension - 1, Profile::zero()));
}

Eigen::VectorXd CurvatureProfile::values(double s) const {
  Eigen::VectorXd k(dimension_ - 1);
  for (int j = 0; j < dimension_ - 1; ++j) k[j] = components_[j].value(s);
  return k;
}

double CurvatureProfile::tail_sup_norm(double l) const {
  std::vector<double> sups;
  for (const Profile& c : components_) sups.push_back(c.tail_sup_norm(l));
  return combine_sups(sups);
}

bool CurvatureProfile::is_zero() const {
  return std::all_of(components_.begin(), components_.end(),
                     [](const Profile& c) { return c.is_zero(); });
}

bool CurvatureProfile::decays() const {
  return std::all_of(components_.begin(), components_.end(),
                     [](const Profile& c) { return c.decays(); });
}

TwistProfile::TwistProfile(int dimension, std::vector<PlaneRotation> rotations)
    : dimension_(dimension), rotations_(std::move(rotations)) {
  if (dimension < 2) throw InputError("tube dimension must be at least 2");
  for (const PlaneRotation& r : rotations_) {
    if (r.i < 0 || r.j <= r.i || r.j >= dimension - 1) {
      throw InputError("twist rotation plane (" + std::to_string(r.i) + ", " +
                       std::to_string(r.j) + ") is not a coordinate plane of R^" +
                       std::to_string(dimension - 1));
    }
  }
}

TwistProfile TwistProfile::untwisted(int dimension) { return TwistProfile(dimension, {}); }

TwistProfile TwistProfile::planar(Profile rate) {
  return TwistProfile(3, {PlaneRotation{0, 1, std::move(rate)}});
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> TwistProfile::evaluate(double s) const {
  const int n = dimension_ - 1;
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd dr = Eigen::MatrixXd::Zero(n, n);
  // Product rule on R = G_1 G_2 ... G_k.
  for (const PlaneRotation& rot : rotations_) {
    const double theta = rot.rate.antiderivative(s);
    const double rate = rot.rate.value(s);
    const Eigen::MatrixXd g = givens(n, rot.i, rot.j, theta);
    dr = dr * g + r * givens_derivative(n, rot.i, rot.j, theta) * rate;
    r = r * g;
  }
  return {r, dr};
}

Eigen::MatrixXd TwistProfile::rotation(double s) const { return evaluate(s).first; }

Eigen::MatrixXd TwistProfile::rotation_derivative(double s) const { return evaluate(s).second; }

double TwistProfile::angle(double s) const {
  return rotations_.empty() ? 0.0 : rotations_.front().rate.antiderivative(s);
}

double TwistProfile::angle_rate(double s) const {
  return rotations_.empty() ? 0.0 : rotations_.front().rate.value(s);
}

bool TwistProfile::is_untwisted() const {
  return std::all_of(rotations_.begin(), rotations_.end(),
                     [](const PlaneRotation& r) { return r.rate.is_zero(); });
}

bool TwistProfile::decays() const {
  return std::all_of(rotations_.begin(), rotations_.end(),
                     [](const PlaneRotation& r) { return r.rate.decays(); });
}

Eigen::MatrixXd nearest_orthogonal(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd x = m;
  for (int it = 0; it < 50; ++it) {
    const Eigen::MatrixXd next = 0.5 * (x + x.inverse().transpose());
    const double change = (next - x).cwiseAbs().maxCoeff();
    x = next;
    if (change < 1e-15) break;
  }
  return x;
}

FrameField integrate_frame(const CurvatureProfile& profile, const Eigen::MatrixXd& initial_frame,
                           double s_min, double s_max, double h_s) {
  const int d = profile.dimension();
  if (initial_frame.rows() != d || initial_frame.cols() != d) {
    throw InputError("initial frame must be " + std::to_string(d) + "x" + std::to_string(d));
  }
  if (orthogonality_defect(initial_frame) > 1e-12) {
    throw InputError("initial frame is not orthogonal within 1e-12");
  }
  if (!(h_s > 0.0)) throw InputError("frame step h_s must be positive");
  if (!(s_max > s_min)) throw InputError("frame interval must satisfy s_min < s_max");

  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil((s_max - s_min) / h_s - 1e-9)));
  FrameField field;
  field.s_min = s_min;
  field.step = (s_max - s_min) / static_cast<double>(steps);
  field.frames.reserve(steps + 1);
  field.positions.reserve(steps + 1);
  field.frames.push_back(initial_frame);
  field.positions.push_back(Eigen::VectorXd::Zero(d));

  const double h = field.step;
  Eigen::MatrixXd f = initial_frame;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
  for (std::size_t k = 0; k < steps; ++k) {
    const double s = field.s(k);
    const Eigen::VectorXd k0 = profile.values(s);
    const Eigen::VectorXd kh = profile.values(s + 0.5 * h);
    const Eigen::VectorXd k1 = profile.values(s + h);
    const Eigen::MatrixXd a = frame_rhs(k0, f);
    const Eigen::MatrixXd fb = f + 0.5 * h * a;
    const Eigen::MatrixXd b = frame_rhs(kh, fb);
    const Eigen::MatrixXd fc = f + 0.5 * h * b;
    const Eigen::MatrixXd c = frame_rhs(kh, fc);
    const Eigen::MatrixXd fd = f + h * c;
    const Eigen::MatrixXd e = frame_rhs(k1, fd);
    // Gamma' = T shares the stages of the frame system.
    x += h / 6.0 *
         (f.row(0) + 2.0 * fb.row(0) + 2.0 * fc.row(0) + fd.row(0)).transpose();
    f += h / 6.0 * (a + 2.0 * b + 2.0 * c + e);
    const double drift = orthogonality_defect(f);
    field.max_drift = std::max(field.max_drift, drift);
    if (drift > 1e-6) {
      throw NumericalError("frame orthonormality drift " + std::to_string(drift) +
                           " exceeds 1e-6; use a smaller h_s");
    }
    f = nearest_orthogonal(f);
    field.frames.push_back(f);
    field.positions.push_back(x);
  }
  return field;
}

Eigen::VectorXd tube_point(const FrameField& frames, const TwistProfile& twist, std::size_t k,
                           const Eigen::VectorXd& t) {
  const Eigen::MatrixXd& f = frames.frames.at(k);
  const Eigen::MatrixXd r = twist.rotation(frames.s(k));
  const int n = static_cast<int>(f.rows()) - 1;
  // t_mu R_{mu nu} N_nu with the normals stored as rows 1..d-1.
  return frames.positions.at(k) + f.bottomRows(n).transpose() * (r.transpose() * t);
}

MetricScalars metric_scalars(const Eigen::VectorXd& kappa, const Eigen::MatrixXd& rotation,
                             const Eigen::MatrixXd& rotation_derivative, const Eigen::VectorXd& t) {
  MetricScalars m;
  m.f = 1.0 - t.dot(rotation * kappa);
  // f_mu = t_alpha R'_{alpha beta} R_{mu beta} = (R R'^T t)_mu
  m.shear = rotation * (rotation_derivative.transpose() * t);
  return m;
}

MetricSample evaluate_metric(const Eigen::VectorXd& kappa, const Eigen::MatrixXd& rotation,
                             const Eigen::MatrixXd& rotation_derivative, double s,
                             const Eigen::VectorXd& t) {
  const MetricScalars sc = metric_scalars(kappa, rotation, rotation_derivative, t);
  if (!(sc.f > 0.0)) {
    throw NumericalError("degenerate metric: f = " + std::to_string(sc.f) + " <= 0 at s = " +
                         std::to_string(s));
  }
  const int n = static_cast<int>(t.size());
  MetricSample out;
  out.s = s;
  out.t = t;
  out.f = sc.f;
  out.shear = sc.shear;
  const double f2 = sc.f * sc.f;
  out.g = Eigen::MatrixXd::Identity(n + 1, n + 1);
  out.g(0, 0) = f2 + sc.shear.squaredNorm();
  out.g.block(0, 1, 1, n) = sc.shear.transpose();
  out.g.block(1, 0, n, 1) = sc.shear;
  out.g_inv.resize(n + 1, n + 1);
  out.g_inv(0, 0) = 1.0;
  out.g_inv.block(0, 1, 1, n) = -sc.shear.transpose();
  out.g_inv.block(1, 0, n, 1) = -sc.shear;
  out.g_inv.block(1, 1, n, n) =
      f2 * Eigen::MatrixXd::Identity(n, n) + sc.shear * sc.shear.transpose();
  out.g_inv /= f2;
  return out;
}

MetricSample TubeSpec::metric(double s, const Eigen::VectorXd& t) const {
  const auto [r, dr] = twist.evaluate(s);
  return evaluate_metric(curvature.values(s), r, dr, s, t);
}

TubeSpec make_tube_spec(CurvatureProfile curvature, TwistProfile twist,
                        CrossSectionDescriptor section, double half_length, int slices) {
  const int d = curvature.dimension();
  if (twist.dimension() != d) throw InputError("twist and curvature dimensions differ");
  if (section.dimension() != d - 1) {
    throw InputError("cross-section " + section.name() + " has dimension " +
                     std::to_string(section.dimension()) + " but the tube needs " +
                     std::to_string(d - 1));
  }
  section.validate();
  if (!(half_length > 0.0)) throw InputError("truncation half-length L must be positive");
  if (slices < 1) throw InputError("longitudinal resolution M must be positive");
  TubeSpec spec;
  spec.curvature = std::move(curvature);
  spec.twist = std::move(twist);
  spec.section = std::move(section);
  spec.radius_bound = spec.section.radius_bound();
  spec.half_length = half_length;
  spec.slices = slices;
  const EmbeddingCheck check = check_embedding(spec);
  if (!check.ok) {
    throw InputError("non-overlap condition a*|kappa|_inf < 1 fails (margin " +
                     std::to_string(check.margin) + ")");
  }
  return spec;
}

EmbeddingCheck check_embedding(double radius_bound, double curvature_sup) {
  const double margin = 1.0 - radius_bound * curvature_sup;
  return {margin > 0.0, margin};
}

EmbeddingCheck check_embedding(const TubeSpec& spec) {
  return check_embedding(spec.radius_bound, spec.curvature.sup_norm());
}

std::pair<double, double> jacobian_bounds(const TubeSpec& spec, std::optional<double> tail) {
  const double sup = tail ? spec.curvature.tail_sup_norm(*tail) : spec.curvature.sup_norm();
  const double ak = spec.radius_bound * sup;
  return {1.0 - ak, 1.0 + ak};
}

}  // namespace pwave
