#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "pwave/cross_section.hpp"
#include "pwave/profile.hpp"

namespace pwave {

/// Curvature components kappa_1..kappa_{d-1} of the relatively parallel frame.
class CurvatureProfile {
 public:
  CurvatureProfile() = default;
  CurvatureProfile(int dimension, std::vector<Profile> components);

  static CurvatureProfile straight(int dimension);

  int dimension() const { return dimension_; }
  const std::vector<Profile>& components() const { return components_; }

  Eigen::VectorXd values(double s) const;
  double magnitude(double s) const { return values(s).norm(); }

  /// sup |kappa|. Exact when at most one component is nonzero, otherwise the
  /// bound sqrt(sum_j sup|kappa_j|^2).
  double sup_norm() const { return sup_norm_; }
  /// Same bound restricted to |s| > l.
  double tail_sup_norm(double l) const;

  bool is_zero() const;
  bool decays() const;

 private:
  int dimension_ = 2;
  std::vector<Profile> components_{Profile::zero()};
  double sup_norm_ = 0.0;
};

/// One-parameter rotation family R(s) in SO(d-1), written as an ordered
/// product of planar rotations G_{ij}(theta_k(s)) whose angles are
/// antiderivatives (anchored at s = 0) of analytic angle-rate profiles.
class TwistProfile {
 public:
  struct PlaneRotation {
    int i = 0;
    int j = 1;
    Profile rate;  ///< theta_k'(s)
  };

  TwistProfile() = default;
  TwistProfile(int dimension, std::vector<PlaneRotation> rotations);

  static TwistProfile untwisted(int dimension);
  /// d = 3 rotation by theta(s) with theta' = rate.
  static TwistProfile planar(Profile rate);

  int dimension() const { return dimension_; }
  const std::vector<PlaneRotation>& rotations() const { return rotations_; }

  Eigen::MatrixXd rotation(double s) const;
  Eigen::MatrixXd rotation_derivative(double s) const;
  /// R(s) and R'(s) in one pass.
  std::pair<Eigen::MatrixXd, Eigen::MatrixXd> evaluate(double s) const;

  /// theta(s) for d = 3 (first rotation), 0 when untwisted.
  double angle(double s) const;
  /// theta'(s) for d = 3 (first rotation), 0 when untwisted.
  double angle_rate(double s) const;

  bool is_untwisted() const;
  bool decays() const;

 private:
  int dimension_ = 2;
  std::vector<PlaneRotation> rotations_;
};

/// Frames (T, N_1, ..., N_{d-1}) as rows, sampled on a uniform grid, together
/// with the curve positions Gamma(s).
struct FrameField {
  double s_min = 0.0;
  double step = 0.0;
  std::vector<Eigen::MatrixXd> frames;
  std::vector<Eigen::VectorXd> positions;
  /// Largest ||F F^T - I||_max seen right before a projection.
  double max_drift = 0.0;

  std::size_t size() const { return frames.size(); }
  double s(std::size_t k) const { return s_min + step * static_cast<double>(k); }
  Eigen::VectorXd tangent(std::size_t k) const { return frames[k].row(0).transpose(); }
};

/// Integrates the frame system F' = K(s) F with fixed-step RK4 on
/// [s_min, s_max], projecting onto O(d) after every step.
FrameField integrate_frame(const CurvatureProfile& profile, const Eigen::MatrixXd& initial_frame,
                           double s_min, double s_max, double h_s);

/// Nearest orthogonal matrix (orthogonal polar factor) by Newton iteration.
Eigen::MatrixXd nearest_orthogonal(const Eigen::MatrixXd& m);

/// Point Gamma(s) + t_mu R_{mu nu}(s) N_nu(s) of the tube map at grid node k.
Eigen::VectorXd tube_point(const FrameField& frames, const TwistProfile& twist, std::size_t k,
                           const Eigen::VectorXd& t);

struct MetricSample {
  double s = 0.0;
  Eigen::VectorXd t;
  double f = 1.0;
  Eigen::VectorXd shear;  ///< f_1..f_{d-1}
  Eigen::MatrixXd g;
  Eigen::MatrixXd g_inv;
};

/// Jacobian f and shear f_mu only (hot path of the tube assembly).
struct MetricScalars {
  double f = 1.0;
  Eigen::VectorXd shear;
};

MetricScalars metric_scalars(const Eigen::VectorXd& kappa, const Eigen::MatrixXd& rotation,
                             const Eigen::MatrixXd& rotation_derivative, const Eigen::VectorXd& t);

/// Full metric at (s, t) from kappa(s), R(s), R'(s). Throws NumericalError if f <= 0.
MetricSample evaluate_metric(const Eigen::VectorXd& kappa, const Eigen::MatrixXd& rotation,
                             const Eigen::MatrixXd& rotation_derivative, double s,
                             const Eigen::VectorXd& t);

struct TubeSpec {
  CurvatureProfile curvature;
  TwistProfile twist;
  CrossSectionDescriptor section;
  double radius_bound = 0.0;  ///< a = sup_{t in omega} |t|
  double half_length = 1.0;   ///< truncation L
  int slices = 10;            ///< longitudinal resolution M

  int dimension() const { return curvature.dimension(); }
  MetricSample metric(double s, const Eigen::VectorXd& t) const;
};

/// Builds a TubeSpec, validating dimensions and a ||kappa|| < 1.
TubeSpec make_tube_spec(CurvatureProfile curvature, TwistProfile twist,
                        CrossSectionDescriptor section, double half_length, int slices);

struct EmbeddingCheck {
  bool ok = false;
  double margin = 0.0;  ///< 1 - a ||kappa||
};

EmbeddingCheck check_embedding(double radius_bound, double curvature_sup);
EmbeddingCheck check_embedding(const TubeSpec& spec);

/// (1 - a||kappa||, 1 + a||kappa||), with the sup over |s| > l when given.
std::pair<double, double> jacobian_bounds(const TubeSpec& spec, std::optional<double> tail = {});

}  // namespace pwave
