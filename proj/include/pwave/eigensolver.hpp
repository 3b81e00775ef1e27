#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "pwave/cell_form.hpp"

namespace pwave {

/// Knobs of the Rayleigh-quotient minimiser. Defaults are the documented ones.
struct SolverConfig {
  int max_iterations = 20000;
  /// Stop once the quotient drops by less than this (relative) over 100 iterations.
  double quotient_tolerance = 1e-10;
  /// Relative preconditioned gradient norm required for `converged`.
  double gradient_tolerance = 1e-7;
  double eps_start = 1e-1;
  double eps_factor = 0.25;
  double eps_floor = 1e-8;
  /// eps-continuation; unset means "on for p < 2".
  std::optional<bool> continuation;
  double initial_step = 1.0;
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
  /// Iterations between secant-preconditioner refreshes (p != 2).
  int preconditioner_refresh = 10;
  /// Declared relative accuracy of a converged eigenvalue.
  double eigenvalue_tolerance = 1e-8;
  /// Deterministic starting field; only "ones" is defined.
  std::string initialization = "ones";
  /// Overrides the initialization when set (free-dof vector).
  std::optional<Eigen::VectorXd> initial_guess;
  /// Record the quotient after every iteration in SolverResult::history.
  bool record_history = false;

  void validate() const;
};

struct SolverResult {
  double eigenvalue = 0.0;
  Eigen::VectorXd field;  ///< free-dof vector, unit p-norm
  int iterations = 0;
  double gradient_norm = 0.0;  ///< relative preconditioned norm at termination
  double eps = 0.0;            ///< regularisation at termination
  bool converged = false;      ///< gradient tolerance met at the final eps
  bool stalled = false;        ///< quotient-decrease tolerance met instead
  double tolerance = 0.0;      ///< absolute eigenvalue tolerance
  /// (eps stage, quotient) per iteration when requested.
  std::vector<std::pair<double, double>> history;

  bool ok() const { return converged || stalled; }
};

/// Minimises (energy + potential) / mass of a p-homogeneous cell form by
/// preconditioned nonlinear conjugate gradients on the unit p-sphere, with
/// backtracking line search and eps-continuation.
SolverResult minimize_quotient(const CellForm& form, const SolverConfig& config = {});

/// Shift-and-invert power iteration on the p = 2 pencil (K + P, M), with the
/// shift certified below lambda_1 by Sylvester inertia. Oracle only.
SolverResult inverse_iteration_p2(const CellForm& form, const SolverConfig& config = {});

/// Number of eigenvalues of the p = 2 pencil strictly below sigma.
int count_eigenvalues_below(const CellForm& form, double sigma);

/// Max relative deviation between the analytic energy and mass gradients and
/// central differences on `samples` random coordinates.
double gradient_check(const CellForm& form, const Eigen::VectorXd& x, double eps,
                      int samples = 50, unsigned seed = 7);

}  // namespace pwave
