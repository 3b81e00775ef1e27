#include "pwave/tube_form.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "pwave/errors.hpp"

namespace pwave {

TubeMesh::TubeMesh(const TubeSpec& spec, std::shared_ptr<const CrossSectionMesh> section,
                   double s_min, double s_max, int intervals, EndCondition left,
                   EndCondition right)
    : spec_(spec),
      section_(std::move(section)),
      s_min_(s_min),
      s_max_(s_max),
      intervals_(intervals),
      left_(left),
      right_(right) {
  if (!section_) throw InputError("tube mesh needs a cross-section mesh");
  if (spec_.dimension() != section_->dimension() + 1) {
    throw InputError("cross-section mesh dimension does not match the tube dimension");
  }
  if (!(s_max > s_min)) throw InputError("tube window must satisfy s_min < s_max");
  if (intervals < 1) throw InputError("tube mesh needs at least one s-interval");
  step_ = (s_max - s_min) / intervals;
  dim_ = section_->dimension();
  first_free_slice_ = left_ == EndCondition::Dirichlet ? 1 : 0;
  const int last_free = right_ == EndCondition::Dirichlet ? intervals_ - 1 : intervals_;
  const int free_slices = std::max(0, last_free - first_free_slice_ + 1);
  dof_count_ = static_cast<Eigen::Index>(free_slices) * section_->dof_count();

  const int ne = section_->element_count();
  f_.resize(static_cast<std::size_t>(intervals_) * ne);
  shear_.resize(f_.size() * dim_);
  min_f_ = std::numeric_limits<double>::infinity();
  for (int k = 0; k < intervals_; ++k) {
    const double sm = s(k) + 0.5 * step_;
    const Eigen::VectorXd kappa = spec_.curvature.values(sm);
    const auto [r, dr] = spec_.twist.evaluate(sm);
    for (int e = 0; e < ne; ++e) {
      const MetricScalars m = metric_scalars(kappa, r, dr, section_->barycenter(e));
      if (!(m.f > 0.0)) {
        throw NumericalError("degenerate metric: f <= 0 at s = " + std::to_string(sm));
      }
      f_[cell(k, e)] = m.f;
      min_f_ = std::min(min_f_, m.f);
      for (int mu = 0; mu < dim_; ++mu) shear_[cell(k, e) * dim_ + mu] = m.shear[mu];
    }
  }
}

int TubeMesh::dof(int k, int node) const {
  const int t = section_->dof_map()[node];
  if (t < 0) return -1;
  if (k == 0 && left_ == EndCondition::Dirichlet) return -1;
  if (k == intervals_ && right_ == EndCondition::Dirichlet) return -1;
  return (k - first_free_slice_) * section_->dof_count() + t;
}

DiscreteField DiscreteField::zeros(const TubeMesh& mesh) {
  return {Eigen::MatrixXd::Zero(mesh.slice_count(), mesh.section().node_count())};
}

DiscreteField DiscreteField::tensor(const TubeMesh& mesh, const std::function<double(double)>& g,
                                    const Eigen::VectorXd& phi) {
  if (phi.size() != mesh.section().node_count()) {
    throw InputError("transverse factor must be a nodal vector of the cross-section mesh");
  }
  DiscreteField out = zeros(mesh);
  for (int k = 0; k < mesh.slice_count(); ++k) {
    const double gk = g(mesh.s(k));
    for (int i = 0; i < phi.size(); ++i) {
      if (mesh.dof(k, i) >= 0) out.values(k, i) = gk * phi[i];
    }
  }
  return out;
}

DiscreteField DiscreteField::from_free(const TubeMesh& mesh, const Eigen::VectorXd& free) {
  if (free.size() != mesh.dof_count()) throw InputError("free vector has the wrong size");
  DiscreteField out = zeros(mesh);
  for (int k = 0; k < mesh.slice_count(); ++k) {
    for (int i = 0; i < mesh.section().node_count(); ++i) {
      const int d = mesh.dof(k, i);
      if (d >= 0) out.values(k, i) = free[d];
    }
  }
  return out;
}

Eigen::VectorXd DiscreteField::to_free(const TubeMesh& mesh) const {
  if (values.rows() != mesh.slice_count() || values.cols() != mesh.section().node_count()) {
    throw InputError("field shape does not match the tube mesh");
  }
  Eigen::VectorXd free(mesh.dof_count());
  for (int k = 0; k < mesh.slice_count(); ++k) {
    for (int i = 0; i < mesh.section().node_count(); ++i) {
      const int d = mesh.dof(k, i);
      if (d >= 0) {
        free[d] = values(k, i);
      } else if (values(k, i) != 0.0) {
        throw InputError("field is nonzero at a pinned node (slice " + std::to_string(k) +
                         ", node " + std::to_string(i) + ")");
      }
    }
  }
  return free;
}

CellForm build_tube_cells(const TubeMesh& mesh, double p, const Potential& potential) {
  const CrossSectionMesh& sec = mesh.section();
  const int m = sec.dimension();
  const int k_nodes = m + 1;
  const int local = 2 * k_nodes;
  const int rows = 1 + m;
  CellForm form(mesh.dof_count(), local, rows, p);
  const double h = mesh.step();
  int dofs[6];
  double b[18];
  double a[6];
  std::fill(a, a + local, 1.0 / local);
  for (int k = 0; k < mesh.interval_count(); ++k) {
    const double sm = mesh.s(k) + 0.5 * h;
    for (int e = 0; e < sec.element_count(); ++e) {
      const double f = mesh.jacobian(k, e);
      for (int side = 0; side < 2; ++side) {
        const double ds = (side == 0 ? -1.0 : 1.0) / (k_nodes * h);
        for (int i = 0; i < k_nodes; ++i) {
          const int col = side * k_nodes + i;
          dofs[col] = mesh.dof(k + side, sec.element_node(e, i));
          double shear_term = 0.0;
          for (int mu = 0; mu < m; ++mu) {
            const double g = 0.5 * sec.gradient(e, mu, i);
            shear_term += mesh.shear(k, e, mu) * g;
            b[(1 + mu) * local + col] = g;
          }
          b[col] = (ds - shear_term) / f;
        }
      }
      const double v = potential ? potential(sm, sec.barycenter(e)) : 0.0;
      form.add_cell(dofs, b, a, f * h * sec.volume(e), v);
    }
  }
  return form;
}

TubeForm::TubeForm(std::shared_ptr<const TubeMesh> mesh, double p, Potential potential)
    : mesh_(std::move(mesh)), form_(build_tube_cells(*mesh_, p, potential)) {}

FormValue TubeForm::assemble(const DiscreteField& psi, double eps, bool gradient) const {
  if (eps < 0.0) throw InputError("regularisation eps must be nonnegative");
  const Eigen::VectorXd x = psi.to_free(*mesh_);
  const FormEvaluation ev = form_.evaluate(x, eps, gradient);
  FormValue out;
  out.energy = ev.energy;
  out.norm = ev.mass;
  out.potential = ev.potential;
  if (gradient) {
    Eigen::VectorXd g = ev.energy_gradient;
    if (form_.has_potential()) g += ev.potential_gradient;
    out.gradient = DiscreteField::from_free(*mesh_, g);
  }
  return out;
}

namespace {

std::shared_ptr<const TubeMesh> dirichlet_mesh(const TubeSpec& spec,
                                               std::shared_ptr<const CrossSectionMesh> section) {
  return std::make_shared<const TubeMesh>(spec, std::move(section), -spec.half_length,
                                          spec.half_length, spec.slices);
}

std::shared_ptr<const TubeMesh> segment_mesh(const TubeSpec& spec,
                                             std::shared_ptr<const CrossSectionMesh> section,
                                             double l, int intervals) {
  if (!spec.curvature.is_zero()) {
    throw InputError("Neumann-segment thresholds are defined for unbent tubes only");
  }
  if (!(l > 0.0)) throw InputError("segment half-length l must be positive");
  return std::make_shared<const TubeMesh>(spec, std::move(section), -l, l, intervals,
                                          EndCondition::Free, EndCondition::Free);
}

TubeEigenpair solve_on(std::shared_ptr<const TubeMesh> mesh, double p, const SolverConfig& config,
                       Potential potential) {
  const CellForm form = build_tube_cells(*mesh, p, potential);
  SolverResult result = minimize_quotient(form, config);
  if (!result.ok()) {
    throw ConvergenceError("tube eigenvalue solve did not converge within " +
                               std::to_string(config.max_iterations) + " iterations",
                           result.eigenvalue, result.gradient_norm);
  }
  if (result.field.sum() < 0.0) result.field = -result.field;
  TubeEigenpair out;
  out.eigenvalue = result.eigenvalue;
  out.field = DiscreteField::from_free(*mesh, result.field);
  out.solver = std::move(result);
  return out;
}

}  // namespace

TubeEigenpair dirichlet_tube_eigenvalue(const TubeSpec& spec,
                                        std::shared_ptr<const CrossSectionMesh> section, double p,
                                        const SolverConfig& config, Potential potential) {
  return solve_on(dirichlet_mesh(spec, std::move(section)), p, config, std::move(potential));
}

double dirichlet_tube_eigenvalue_p2(const TubeSpec& spec,
                                    std::shared_ptr<const CrossSectionMesh> section,
                                    Potential potential, const SolverConfig& config) {
  const auto mesh = dirichlet_mesh(spec, std::move(section));
  return inverse_iteration_p2(build_tube_cells(*mesh, 2.0, potential), config).eigenvalue;
}

TubeEigenpair neumann_segment_eigenvalue(const TubeSpec& spec,
                                         std::shared_ptr<const CrossSectionMesh> section, double l,
                                         int intervals, double p, const SolverConfig& config) {
  return solve_on(segment_mesh(spec, std::move(section), l, intervals), p, config, {});
}

double neumann_segment_eigenvalue_p2(const TubeSpec& spec,
                                     std::shared_ptr<const CrossSectionMesh> section, double l,
                                     int intervals, const SolverConfig& config) {
  const auto mesh = segment_mesh(spec, std::move(section), l, intervals);
  return inverse_iteration_p2(build_tube_cells(*mesh, 2.0), config).eigenvalue;
}

CutoffProfile::CutoffProfile(int n, bool shifted)
    : n_(n), shift_(shifted ? static_cast<double>(n) * n : 0.0) {
  if (n < 1) throw InputError("cutoff index n must be at least 1");
}

double CutoffProfile::value(double s) const {
  const double r = std::abs(s - shift_);
  if (r <= n_) return 1.0;
  if (r >= 2.0 * n_) return 0.0;
  return (2.0 * n_ - r) / n_;
}

double CutoffProfile::derivative(double s) const {
  const double x = s - shift_;
  const double r = std::abs(x);
  if (r <= n_ || r >= 2.0 * n_) return 0.0;
  return x > 0.0 ? -1.0 / n_ : 1.0 / n_;
}

std::pair<double, double> CutoffProfile::support() const {
  return {shift_ - 2.0 * n_, shift_ + 2.0 * n_};
}

double CutoffProfile::derivative_power_integral(double xi) const {
  // Two ramps of length n with slope 1/n.
  return 2.0 * n_ * std::pow(1.0 / n_, xi);
}

Eigen::VectorXd CutoffProfile::sample(const Eigen::VectorXd& s) const {
  return s.unaryExpr([this](double v) { return value(v); });
}

CutoffProfile cutoff_sequence(int n, bool shifted) { return CutoffProfile(n, shifted); }

double rayleigh_gap(const TubeForm& form, const DiscreteField& psi, double lambda1) {
  const FormValue v = form.assemble(psi);
  if (!(v.norm > 0.0)) throw InputError("Rayleigh gap of a zero field");
  return (v.energy + v.potential - lambda1 * v.norm) / v.norm;
}

void write_field_csv(std::ostream& out, const TubeMesh& mesh, const DiscreteField& psi) {
  const CrossSectionMesh& sec = mesh.section();
  const auto precision = out.precision(17);
  out << "s";
  for (int a = 0; a < sec.dimension(); ++a) out << ",t" << (a + 1);
  out << ",psi\n";
  for (int k = 0; k < mesh.slice_count(); ++k) {
    for (int i = 0; i < sec.node_count(); ++i) {
      out << mesh.s(k);
      for (int a = 0; a < sec.dimension(); ++a) out << "," << sec.coord(i, a);
      out << "," << psi.values(k, i) << "\n";
    }
  }
  out.precision(precision);
}

}  // namespace pwave
