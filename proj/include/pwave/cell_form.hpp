#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <vector>

namespace pwave {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct FormEvaluation {
  double energy = 0.0;     ///< sum_c (|B_c x|^2 + eps^2)^{p/2} w_c
  double mass = 0.0;       ///< sum_c |a_c . x|^p w_c
  double potential = 0.0;  ///< sum_c V_c |a_c . x|^p w_c
  Eigen::VectorXd energy_gradient;
  Eigen::VectorXd mass_gradient;
  Eigen::VectorXd potential_gradient;

  double numerator() const { return energy + potential; }
  double quotient() const { return numerator() / mass; }
};

/// p-homogeneous quadrature form on a set of cells.
///
/// Each cell carries `local` degrees of freedom (indices into the free-dof
/// vector, -1 for pinned zeros), an energy operator B_c (rows x local), a value
/// functional a_c, a positive weight w_c and an optional potential value V_c:
///
///   energy    sum_c (|B_c x_c|^2 + eps^2)^{p/2} w_c
///   mass      sum_c |a_c . x_c|^p w_c
///   potential sum_c V_c |a_c . x_c|^p w_c
///
/// Both the cross-section and the tube Rayleigh quotients are of this form.
class CellForm {
 public:
  CellForm(Eigen::Index free_size, int local, int rows, double p);

  Eigen::Index size() const { return free_size_; }
  int local() const { return local_; }
  int rows() const { return rows_; }
  double p() const { return p_; }
  std::size_t cell_count() const { return weights_.size(); }
  bool has_potential() const { return has_potential_; }
  double min_potential() const;

  /// Appends a cell; `b` is row-major rows x local.
  void add_cell(const int* dofs, const double* b, const double* a, double weight,
                double potential = 0.0);

  FormEvaluation evaluate(const Eigen::VectorXd& x, double eps, bool gradient) const;

  /// Quadratic forms of the p = 2 case: x^T K x = energy, x^T M x = mass,
  /// x^T P x = potential.
  SparseMatrix stiffness() const;
  SparseMatrix mass_matrix() const;
  SparseMatrix potential_matrix() const;

  /// Secant (lagged-diffusivity) stiffness sum_c w_c rho_c B_c^T B_c with
  /// rho_c = (|B_c x|^2 + eps^2)^{(p-2)/2}, clamped to [1e-4, 1e4] times the
  /// mean weight. SPD whenever the plain stiffness is.
  SparseMatrix secant_stiffness(const Eigen::VectorXd& x, double eps) const;

 private:
  SparseMatrix assemble_outer(const std::vector<double>& cell_scale, bool energy_rows) const;

  Eigen::Index free_size_;
  int local_;
  int rows_;
  double p_;
  bool has_potential_ = false;
  std::vector<int> dofs_;
  std::vector<double> b_;
  std::vector<double> a_;
  std::vector<double> weights_;
  std::vector<double> potential_;
};

}  // namespace pwave
