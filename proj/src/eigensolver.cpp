#include "pwave/eigensolver.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>

#include "pwave/errors.hpp"

namespace pwave {
namespace {

struct Point {
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd grad;
};

// Quotient objective restricted to the unit p-sphere {mass(x) = 1}.
class SphereObjective {
 public:
  SphereObjective(const CellForm& form, double eps) : form_(form), eps_(eps) {}

  void normalize(Eigen::VectorXd& x) const {
    const double mass = form_.evaluate(x, 0.0, false).mass;
    if (!(mass > 0.0) || !std::isfinite(mass)) {
      throw NumericalError("iterate has zero or non-finite p-norm");
    }
    x *= std::pow(mass, -1.0 / form_.p());
  }

  double value(Eigen::VectorXd x) const {
    normalize(x);
    return form_.evaluate(x, eps_, false).numerator();
  }

  Point point(Eigen::VectorXd x) const {
    normalize(x);
    Point pt;
    FormEvaluation ev = form_.evaluate(x, eps_, true);
    pt.value = ev.numerator();
    Eigen::VectorXd g = std::move(ev.energy_gradient);
    if (form_.has_potential()) g += ev.potential_gradient;
    // Tangential part: grad F = grad(Q + V) - (x . grad(Q + V) / p) grad N.
    const double radial = x.dot(g) / form_.p();
    g -= radial * ev.mass_gradient;
    pt.grad = std::move(g);
    pt.x = std::move(x);
    return pt;
  }

 private:
  const CellForm& form_;
  double eps_;
};

class Preconditioner {
 public:
  explicit Preconditioner(const CellForm& form) : form_(form) {}

  void refresh(const Eigen::VectorXd& x, double eps) {
    matrix_ = form_.secant_stiffness(x, eps);
    if (!analyzed_) {
      llt_.analyzePattern(matrix_);
      analyzed_ = true;
    }
    llt_.factorize(matrix_);
    if (llt_.info() != Eigen::Success) {
      throw NumericalError("preconditioner factorisation failed (stiffness not positive definite)");
    }
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& g) const { return llt_.solve(g); }
  double energy(const Eigen::VectorXd& x) const { return x.dot(matrix_ * x); }

 private:
  const CellForm& form_;
  SparseMatrix matrix_;
  Eigen::SimplicialLLT<SparseMatrix> llt_;
  bool analyzed_ = false;
};

struct LineSearchResult {
  bool ok = false;
  double alpha = 0.0;
};

LineSearchResult line_search(const SphereObjective& objective, const Point& cur,
                             const Eigen::VectorXd& d, double alpha0, const SolverConfig& config) {
  const double phi0 = cur.value;
  const double slope = cur.grad.dot(d);
  if (!(slope < 0.0)) return {};
  const double slack = 8.0 * std::numeric_limits<double>::epsilon() * std::abs(phi0);
  auto armijo = [&](double alpha, double f) {
    return std::isfinite(f) && f <= phi0 + config.sufficient_decrease * alpha * slope + slack;
  };
  auto eval = [&](double alpha) { return objective.value(cur.x + alpha * d); };

  double best_alpha = 0.0;
  double best_f = std::numeric_limits<double>::infinity();
  double alpha = alpha0;
  double f = eval(alpha);
  if (armijo(alpha, f)) {
    best_alpha = alpha;
    best_f = f;
  }
  // Quadratic model through (0, phi0, slope) and the trial point, refined twice.
  double probe_alpha = alpha;
  double probe_f = f;
  for (int round = 0; round < 2 && std::isfinite(probe_f); ++round) {
    const double curvature = (probe_f - phi0 - slope * probe_alpha) / (probe_alpha * probe_alpha);
    if (!(curvature > 0.0)) break;
    const double aq = std::clamp(-slope / (2.0 * curvature), 1e-3 * probe_alpha, 10.0 * probe_alpha);
    if (std::abs(aq - probe_alpha) <= 1e-3 * probe_alpha) break;
    const double fq = eval(aq);
    if (armijo(aq, fq) && fq < best_f) {
      best_alpha = aq;
      best_f = fq;
    }
    probe_alpha = aq;
    probe_f = fq;
  }
  if (best_alpha > 0.0) return {true, best_alpha};

  alpha = std::min(alpha0, probe_alpha);
  for (int k = 0; k < 60; ++k) {
    alpha *= config.shrink;
    f = eval(alpha);
    if (armijo(alpha, f)) return {true, alpha};
  }
  return {};
}

std::vector<double> eps_schedule(const SolverConfig& config, double p) {
  const bool continuation = config.continuation.value_or(p < 2.0);
  if (!continuation) return {0.0};
  std::vector<double> stages;
  for (double e = config.eps_start; e > config.eps_floor; e *= config.eps_factor) {
    stages.push_back(e);
  }
  stages.push_back(config.eps_floor);
  return stages;
}

}  // namespace

void SolverConfig::validate() const {
  if (max_iterations <= 0) throw InputError("solver.max_iterations must be positive");
  if (!(quotient_tolerance > 0.0)) throw InputError("solver.quotient_tolerance must be positive");
  if (!(gradient_tolerance > 0.0)) throw InputError("solver.gradient_tolerance must be positive");
  if (!(eps_start > 0.0) || !(eps_floor > 0.0)) {
    throw InputError("solver eps schedule must be positive");
  }
  if (!(eps_factor > 0.0 && eps_factor < 1.0)) throw InputError("solver.eps_factor must lie in (0,1)");
  if (!(shrink > 0.0 && shrink < 1.0)) throw InputError("solver.shrink must lie in (0,1)");
  if (!(initial_step > 0.0)) throw InputError("solver.initial_step must be positive");
  if (!(sufficient_decrease > 0.0 && sufficient_decrease < 1.0)) {
    throw InputError("solver.sufficient_decrease must lie in (0,1)");
  }
  if (preconditioner_refresh <= 0) throw InputError("solver.preconditioner_refresh must be positive");
  if (!(eigenvalue_tolerance > 0.0)) throw InputError("solver.eigenvalue_tolerance must be positive");
  if (initialization != "ones") {
    throw InputError("solver.initialization '" + initialization + "' is unknown (expected ones)");
  }
}

SolverResult minimize_quotient(const CellForm& form, const SolverConfig& config) {
  config.validate();
  const double p = form.p();
  const Eigen::Index n = form.size();
  if (n == 0) throw InputError("quotient has no free degrees of freedom");

  Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  if (config.initial_guess) {
    if (config.initial_guess->size() != n) throw InputError("initial guess has the wrong size");
    x = *config.initial_guess;
  }

  SolverResult result;
  const std::vector<double> stages = eps_schedule(config, p);
  Preconditioner precond(form);
  int total = 0;

  for (std::size_t stage = 0; stage < stages.size(); ++stage) {
    const double eps = stages[stage];
    const bool final_stage = stage + 1 == stages.size();
    SphereObjective objective(form, eps);
    Point cur = objective.point(x);
    precond.refresh(cur.x, eps);
    Eigen::VectorXd z = precond.solve(cur.grad);
    Eigen::VectorXd d = -z;
    double gz = cur.grad.dot(z);
    double alpha_prev = config.initial_step;
    std::deque<double> window{cur.value};
    int stage_iterations = 0;
    bool restarted = true;
    result.converged = false;
    result.stalled = false;

    while (true) {
      const double rel = std::sqrt(std::max(gz, 0.0) / precond.energy(cur.x)) / p;
      result.gradient_norm = rel;
      if (final_stage && rel < config.gradient_tolerance) {
        result.converged = true;
        break;
      }
      if (!final_stage && (rel < std::max(1e-3, config.gradient_tolerance) || stage_iterations >= 400)) {
        break;
      }
      if (total >= config.max_iterations) break;

      LineSearchResult ls = line_search(objective, cur, d, alpha_prev, config);
      if (!ls.ok) {
        if (restarted) {
          result.stalled = true;
          break;
        }
        d = -z;
        restarted = true;
        alpha_prev = config.initial_step;
        continue;
      }
      ++total;
      ++stage_iterations;
      alpha_prev = ls.alpha;
      Point next = objective.point(cur.x + ls.alpha * d);
      if (config.record_history) result.history.emplace_back(eps, next.value);

      bool reset = false;
      if (p != 2.0 && stage_iterations % config.preconditioner_refresh == 0) {
        precond.refresh(next.x, eps);
        reset = true;
      }
      Eigen::VectorXd z_next = precond.solve(next.grad);
      double beta = 0.0;
      if (!reset && gz > 0.0) beta = std::max(0.0, next.grad.dot(z_next - z) / gz);
      d = -z_next + beta * d;
      if (next.grad.dot(d) >= 0.0) {
        d = -z_next;
        beta = 0.0;
      }
      restarted = beta == 0.0;
      if (restarted) alpha_prev = std::max(alpha_prev, config.initial_step);
      gz = next.grad.dot(z_next);
      z = std::move(z_next);
      cur = std::move(next);

      window.push_back(cur.value);
      if (window.size() > 101) window.pop_front();
      if (window.size() == 101 &&
          window.front() - cur.value <= config.quotient_tolerance * std::abs(cur.value)) {
        result.stalled = true;
        break;
      }
    }
    x = cur.x;
    result.eps = eps;
    if (total >= config.max_iterations) break;
  }

  const FormEvaluation final_eval = form.evaluate(x, 0.0, false);
  result.eigenvalue = final_eval.quotient();
  result.field = x;
  result.iterations = total;
  result.tolerance = config.eigenvalue_tolerance * std::abs(result.eigenvalue);
  return result;
}

int count_eigenvalues_below(const CellForm& form, double sigma) {
  SparseMatrix a = form.stiffness() - sigma * form.mass_matrix();
  if (form.has_potential()) a += form.potential_matrix();
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(a);
  if (ldlt.info() != Eigen::Success) {
    throw NumericalError("LDL^T factorisation failed during inertia count");
  }
  const Eigen::VectorXd dvec = ldlt.vectorD();
  return static_cast<int>((dvec.array() < 0.0).count());
}

SolverResult inverse_iteration_p2(const CellForm& form, const SolverConfig& config) {
  if (form.p() != 2.0) throw InputError("inverse_iteration_p2 requires a p = 2 form");
  const Eigen::Index n = form.size();
  if (n == 0) throw InputError("quotient has no free degrees of freedom");
  SparseMatrix k = form.stiffness();
  if (form.has_potential()) k += form.potential_matrix();
  const SparseMatrix m = form.mass_matrix();

  {
    Eigen::SimplicialLDLT<SparseMatrix> check(form.stiffness());
    const Eigen::VectorXd dvec = check.vectorD();
    if (check.info() != Eigen::Success || (dvec.array().abs() < 1e-300).any()) {
      throw InputError("stiffness matrix is singular (degenerate constraint set)");
    }
  }

  auto quotient = [&](const Eigen::VectorXd& v) { return v.dot(k * v) / v.dot(m * v); };

  Eigen::VectorXd x = config.initial_guess ? *config.initial_guess : Eigen::VectorXd::Ones(n);
  if (x.size() != n) throw InputError("initial guess has the wrong size");
  // P >= min(V) M cellwise, so K + P - sigma M is positive definite for sigma < min(V, 0).
  const double floor_shift = std::min(0.0, form.min_potential()) - 1.0;

  Eigen::SimplicialLDLT<SparseMatrix> ldlt;
  // The union pattern of K and M, shared by every shifted matrix.
  ldlt.analyzePattern(SparseMatrix(k - floor_shift * m));
  auto negatives = [&](double sigma) {
    SparseMatrix s = k - sigma * m;
    ldlt.factorize(s);
    if (ldlt.info() != Eigen::Success) throw NumericalError("LDL^T factorisation failed");
    return static_cast<int>((ldlt.vectorD().array() < 0.0).count());
  };

  // hi >= lambda_1 always (a Rayleigh quotient or a shift with negative
  // inertia); lo < lambda_1 once certified by zero negative pivots. The
  // bracket is searched downward from the quotient of the initial guess, so a
  // good guess costs only a few factorisations.
  double hi = quotient(x);
  double delta = 1e-10 * std::max(1.0, std::abs(hi));
  double lo = hi - delta;
  while (lo > floor_shift && negatives(lo) > 0) {
    hi = lo;
    delta *= 8.0;
    lo = hi - delta;
  }
  lo = std::max(lo, floor_shift);
  int factorizations = 0;
  while (hi - lo > 1e-9 * std::max(1.0, std::abs(hi)) && factorizations < 200) {
    const double mid = 0.5 * (lo + hi);
    if (negatives(mid) > 0) {
      hi = mid;
    } else {
      lo = mid;
    }
    ++factorizations;
  }

  const double shift = lo - 1e-10 * std::max(1.0, std::abs(lo));
  SparseMatrix shifted = k - shift * m;
  ldlt.factorize(shifted);
  if (ldlt.info() != Eigen::Success) throw NumericalError("shifted factorisation failed");

  SolverResult result;
  double lambda = quotient(x);
  int it = 0;
  for (; it < 100; ++it) {
    Eigen::VectorXd y = ldlt.solve(m * x);
    y /= std::sqrt(y.dot(m * y));
    const double next = quotient(y);
    x = std::move(y);
    const double change = std::abs(next - lambda);
    lambda = next;
    if (change <= 1e-14 * std::abs(lambda)) {
      result.converged = true;
      break;
    }
  }
  if (x.sum() < 0.0) x = -x;
  result.eigenvalue = lambda;
  result.field = x;
  result.iterations = it + 1;
  const Eigen::VectorXd residual = k * x - lambda * (m * x);
  result.gradient_norm = residual.norm() / std::max(1e-300, (k * x).norm());
  result.tolerance = config.eigenvalue_tolerance * std::abs(lambda);
  return result;
}

double gradient_check(const CellForm& form, const Eigen::VectorXd& x, double eps, int samples,
                      unsigned seed) {
  const Eigen::Index n = form.size();
  const FormEvaluation analytic = form.evaluate(x, eps, true);
  const double scale = x.size() > 0 && x.cwiseAbs().maxCoeff() > 0.0 ? x.cwiseAbs().maxCoeff() : 1.0;
  const double step = 1e-6 * scale;
  std::mt19937 rng(seed);
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);

  const double energy_scale = analytic.energy_gradient.cwiseAbs().maxCoeff();
  const double mass_scale = analytic.mass_gradient.cwiseAbs().maxCoeff();
  double worst = 0.0;
  Eigen::VectorXd probe = x;
  for (int s = 0; s < samples; ++s) {
    const Eigen::Index i = pick(rng);
    probe[i] = x[i] + step;
    const FormEvaluation plus = form.evaluate(probe, eps, false);
    probe[i] = x[i] - step;
    const FormEvaluation minus = form.evaluate(probe, eps, false);
    probe[i] = x[i];
    const double fd_energy = (plus.energy - minus.energy) / (2.0 * step);
    const double fd_mass = (plus.mass - minus.mass) / (2.0 * step);
    const double de = std::abs(fd_energy - analytic.energy_gradient[i]);
    const double dm = std::abs(fd_mass - analytic.mass_gradient[i]);
    if (energy_scale > 0.0) worst = std::max(worst, de / energy_scale);
    else worst = std::max(worst, de);
    if (mass_scale > 0.0) worst = std::max(worst, dm / mass_scale);
    else worst = std::max(worst, dm);
  }
  return worst;
}

}  // namespace pwave
