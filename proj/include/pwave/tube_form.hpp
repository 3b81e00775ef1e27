#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>

#include "pwave/cell_form.hpp"
#include "pwave/cross_section.hpp"
#include "pwave/eigensolver.hpp"
#include "pwave/geometry.hpp"

namespace pwave {

enum class EndCondition { Dirichlet, Free };

/// V(s, t) on the straight reference tube.
using Potential = std::function<double(double s, const Eigen::VectorXd& t)>;

/// Tensor product of a uniform s-grid on [s_min, s_max] with a cross-section
/// mesh. Cells are (s-interval k, element e) with a single quadrature point at
/// the cell barycenter, where f and f_mu are cached.
class TubeMesh {
 public:
  TubeMesh(const TubeSpec& spec, std::shared_ptr<const CrossSectionMesh> section, double s_min,
           double s_max, int intervals, EndCondition left = EndCondition::Dirichlet,
           EndCondition right = EndCondition::Dirichlet);

  const TubeSpec& spec() const { return spec_; }
  const CrossSectionMesh& section() const { return *section_; }
  std::shared_ptr<const CrossSectionMesh> section_ptr() const { return section_; }

  int slice_count() const { return intervals_ + 1; }
  int interval_count() const { return intervals_; }
  double s_min() const { return s_min_; }
  double s_max() const { return s_max_; }
  double step() const { return step_; }
  double s(int k) const { return s_min_ + step_ * k; }
  EndCondition left() const { return left_; }
  EndCondition right() const { return right_; }

  /// Free-dof index of (slice k, transverse node i), -1 when pinned.
  int dof(int k, int node) const;
  Eigen::Index dof_count() const { return dof_count_; }

  /// f and f_mu at the barycenter of cell (k, e).
  double jacobian(int k, int e) const { return f_[cell(k, e)]; }
  double shear(int k, int e, int mu) const { return shear_[cell(k, e) * dim_ + mu]; }
  double min_jacobian() const { return min_f_; }

 private:
  std::size_t cell(int k, int e) const {
    return static_cast<std::size_t>(k) * section_->element_count() + e;
  }

  TubeSpec spec_;
  std::shared_ptr<const CrossSectionMesh> section_;
  double s_min_;
  double s_max_;
  int intervals_;
  double step_;
  EndCondition left_;
  EndCondition right_;
  int dim_;
  int first_free_slice_;
  Eigen::Index dof_count_ = 0;
  std::vector<double> f_;
  std::vector<double> shear_;
  double min_f_ = 1.0;
};

/// Nodal values psi(s_k, t_i), one row per slice.
struct DiscreteField {
  Eigen::MatrixXd values;

  static DiscreteField zeros(const TubeMesh& mesh);
  /// g(s_k) phi(t_i) for a nodal cross-section vector phi.
  static DiscreteField tensor(const TubeMesh& mesh, const std::function<double(double)>& g,
                              const Eigen::VectorXd& phi);
  static DiscreteField from_free(const TubeMesh& mesh, const Eigen::VectorXd& free);
  /// Throws InputError when a pinned entry is nonzero.
  Eigen::VectorXd to_free(const TubeMesh& mesh) const;
};

struct FormValue {
  double energy = 0.0;     ///< Q
  double norm = 0.0;       ///< N = int |psi|^p f
  double potential = 0.0;  ///< int V |psi|^p f
  std::optional<DiscreteField> gradient;  ///< d(Q + potential)/d(psi) on free entries

  double quotient() const { return (energy + potential) / norm; }
};

/// Curvilinear quotient on a tube mesh:
///   cell density ((D_s - f_mu d_mu) psi)^2 / f^2 + |grad_t psi|^2,
///   weight f * h_s * |element|.
class TubeForm {
 public:
  TubeForm(std::shared_ptr<const TubeMesh> mesh, double p, Potential potential = {});

  const TubeMesh& mesh() const { return *mesh_; }
  const CellForm& cells() const { return form_; }
  double p() const { return form_.p(); }

  FormValue assemble(const DiscreteField& psi, double eps = 0.0, bool gradient = false) const;

 private:
  std::shared_ptr<const TubeMesh> mesh_;
  CellForm form_;
};

CellForm build_tube_cells(const TubeMesh& mesh, double p, const Potential& potential = {});

struct TubeEigenpair {
  double eigenvalue = 0.0;
  DiscreteField field;
  SolverResult solver;
};

/// Ground state of the tube truncated to [-L, L] with Dirichlet ends, using
/// spec.slices s-intervals.
TubeEigenpair dirichlet_tube_eigenvalue(const TubeSpec& spec,
                                        std::shared_ptr<const CrossSectionMesh> section, double p,
                                        const SolverConfig& config = {}, Potential potential = {});

/// p = 2 reference value for the same discretisation. A close initial guess
/// in `config` only speeds up the inertia bracketing.
double dirichlet_tube_eigenvalue_p2(const TubeSpec& spec,
                                    std::shared_ptr<const CrossSectionMesh> section,
                                    Potential potential = {}, const SolverConfig& config = {});

/// Threshold of the untwisted-or-twisted straight segment (-l, l) x omega with
/// free ends and `intervals` s-intervals. Requires zero curvature.
TubeEigenpair neumann_segment_eigenvalue(const TubeSpec& spec,
                                         std::shared_ptr<const CrossSectionMesh> section, double l,
                                         int intervals, double p, const SolverConfig& config = {});

double neumann_segment_eigenvalue_p2(const TubeSpec& spec,
                                     std::shared_ptr<const CrossSectionMesh> section, double l,
                                     int intervals, const SolverConfig& config = {});

/// Plateau cutoff: 1 on |s| <= n, linear down to 0 at |s| = 2n, shifted by n^2
/// when requested.
class CutoffProfile {
 public:
  explicit CutoffProfile(int n, bool shifted = false);

  int n() const { return n_; }
  double shift() const { return shift_; }
  double value(double s) const;
  double derivative(double s) const;
  /// Closed support [shift - 2n, shift + 2n].
  std::pair<double, double> support() const;
  /// int |phi_n'|^xi ds by exact piecewise-linear quadrature.
  double derivative_power_integral(double xi) const;
  /// Samples on a grid (the grid must contain the kinks for exactness).
  Eigen::VectorXd sample(const Eigen::VectorXd& s) const;

 private:
  int n_;
  double shift_;
};

CutoffProfile cutoff_sequence(int n, bool shifted = false);

/// (Q[psi] + V-term - lambda_1 N[psi]) / N[psi].
double rayleigh_gap(const TubeForm& form, const DiscreteField& psi, double lambda1);

/// CSV with columns s, t_1[, t_2], psi.
void write_field_csv(std::ostream& out, const TubeMesh& mesh, const DiscreteField& psi);

}  // namespace pwave
