#include "pwave/cell_form.hpp"

#include <algorithm>
#include <cmath>

#include "pwave/errors.hpp"

namespace pwave {
namespace {

// sign(v) |v|^{q}
double signed_pow(double v, double q) {
  if (v == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(v), q), v);
}

double abs_pow(double v, double p) {
  if (p == 2.0) return v * v;
  return std::pow(std::abs(v), p);
}

}  // namespace

CellForm::CellForm(Eigen::Index free_size, int local, int rows, double p)
    : free_size_(free_size), local_(local), rows_(rows), p_(p) {
  if (!(p > 1.0)) throw InputError("p must exceed 1");
  if (local < 1 || local > 16 || rows < 1 || rows > 8) {
    throw InputError("cell form supports up to 16 local dofs and 8 energy rows");
  }
}

void CellForm::add_cell(const int* dofs, const double* b, const double* a, double weight,
                        double potential) {
  dofs_.insert(dofs_.end(), dofs, dofs + local_);
  b_.insert(b_.end(), b, b + static_cast<std::ptrdiff_t>(rows_) * local_);
  a_.insert(a_.end(), a, a + local_);
  weights_.push_back(weight);
  potential_.push_back(potential);
  if (potential != 0.0) has_potential_ = true;
}

FormEvaluation CellForm::evaluate(const Eigen::VectorXd& x, double eps, bool gradient) const {
  FormEvaluation out;
  if (gradient) {
    out.energy_gradient = Eigen::VectorXd::Zero(free_size_);
    out.mass_gradient = Eigen::VectorXd::Zero(free_size_);
    if (has_potential_) out.potential_gradient = Eigen::VectorXd::Zero(free_size_);
  }
  const double eps2 = eps * eps;
  const double half_p = 0.5 * p_;
  double xl[16];
  double e[8];
  const std::size_t n = weights_.size();
  for (std::size_t c = 0; c < n; ++c) {
    const int* dof = &dofs_[c * local_];
    const double* b = &b_[c * rows_ * local_];
    const double* a = &a_[c * local_];
    const double w = weights_[c];
    double v = 0.0;
    for (int i = 0; i < local_; ++i) {
      xl[i] = dof[i] >= 0 ? x[dof[i]] : 0.0;
      v += a[i] * xl[i];
    }
    double energy_density = eps2;
    for (int r = 0; r < rows_; ++r) {
      double acc = 0.0;
      for (int i = 0; i < local_; ++i) acc += b[r * local_ + i] * xl[i];
      e[r] = acc;
      energy_density += acc * acc;
    }
    const double pe = p_ == 2.0 ? energy_density : std::pow(energy_density, half_p);
    out.energy += pe * w;
    const double pv = abs_pow(v, p_);
    out.mass += pv * w;
    if (has_potential_) out.potential += potential_[c] * pv * w;

    if (!gradient) continue;
    // d/dx (E + eps^2)^{p/2} = p (E + eps^2)^{p/2 - 1} B^T e
    double ge = 0.0;
    if (energy_density > 0.0) ge = p_ == 2.0 ? 2.0 * w : p_ * pe / energy_density * w;
    const double gv = p_ * signed_pow(v, p_ - 1.0) * w;
    for (int i = 0; i < local_; ++i) {
      if (dof[i] < 0) continue;
      double acc = 0.0;
      for (int r = 0; r < rows_; ++r) acc += b[r * local_ + i] * e[r];
      out.energy_gradient[dof[i]] += ge * acc;
      out.mass_gradient[dof[i]] += gv * a[i];
      if (has_potential_) out.potential_gradient[dof[i]] += potential_[c] * gv * a[i];
    }
  }
  return out;
}

SparseMatrix CellForm::assemble_outer(const std::vector<double>& cell_scale,
                                      bool energy_rows) const {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(weights_.size() * local_ * local_);
  const std::size_t n = weights_.size();
  for (std::size_t c = 0; c < n; ++c) {
    const double scale = cell_scale[c];
    if (scale == 0.0) continue;
    const int* dof = &dofs_[c * local_];
    const double* b = &b_[c * rows_ * local_];
    const double* a = &a_[c * local_];
    for (int i = 0; i < local_; ++i) {
      if (dof[i] < 0) continue;
      for (int j = 0; j < local_; ++j) {
        if (dof[j] < 0) continue;
        double entry = 0.0;
        if (energy_rows) {
          for (int r = 0; r < rows_; ++r) entry += b[r * local_ + i] * b[r * local_ + j];
        } else {
          entry = a[i] * a[j];
        }
        if (entry != 0.0) triplets.emplace_back(dof[i], dof[j], scale * entry);
      }
    }
  }
  SparseMatrix m(free_size_, free_size_);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

double CellForm::min_potential() const {
  if (potential_.empty()) return 0.0;
  return *std::min_element(potential_.begin(), potential_.end());
}

SparseMatrix CellForm::stiffness() const { return assemble_outer(weights_, true); }

SparseMatrix CellForm::mass_matrix() const { return assemble_outer(weights_, false); }

SparseMatrix CellForm::potential_matrix() const {
  std::vector<double> scale(weights_.size());
  for (std::size_t c = 0; c < scale.size(); ++c) scale[c] = weights_[c] * potential_[c];
  return assemble_outer(scale, false);
}

SparseMatrix CellForm::secant_stiffness(const Eigen::VectorXd& x, double eps) const {
  if (p_ == 2.0) return stiffness();
  const std::size_t n = weights_.size();
  std::vector<double> rho(n);
  const double eps2 = eps * eps;
  double xl[16];
  double sum = 0.0, wsum = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    const int* dof = &dofs_[c * local_];
    const double* b = &b_[c * rows_ * local_];
    for (int i = 0; i < local_; ++i) xl[i] = dof[i] >= 0 ? x[dof[i]] : 0.0;
    double energy_density = eps2;
    for (int r = 0; r < rows_; ++r) {
      double acc = 0.0;
      for (int i = 0; i < local_; ++i) acc += b[r * local_ + i] * xl[i];
      energy_density += acc * acc;
    }
    rho[c] = energy_density > 0.0 ? std::pow(energy_density, 0.5 * p_ - 1.0) : 0.0;
    if (std::isfinite(rho[c]) && rho[c] > 0.0) {
      sum += rho[c] * weights_[c];
      wsum += weights_[c];
    }
  }
  const double mean = wsum > 0.0 ? sum / wsum : 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    double r = std::isfinite(rho[c]) ? rho[c] : 1e4 * mean;
    r = std::clamp(r, 1e-4 * mean, 1e4 * mean);
    rho[c] = r * weights_[c];
  }
  return assemble_outer(rho, true);
}

}  // namespace pwave
