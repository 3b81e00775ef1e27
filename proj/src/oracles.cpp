#include "pwave/oracles.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <numbers>

#include "pwave/errors.hpp"

namespace pwave::oracle {
namespace {

constexpr double kPi = std::numbers::pi;

// Flux w = |u'|^{p-2} u' at the midpoint when shooting with u(0) = 0, w(0) = 1.
double midpoint_flux(double p, double lambda, double half, int steps) {
  const double q = 1.0 / (p - 1.0);
  auto rhs = [&](double u, double w, double& du, double& dw) {
    du = std::copysign(std::pow(std::abs(w), q), w);
    dw = -lambda * std::copysign(std::pow(std::abs(u), p - 1.0), u);
  };
  const double h = half / steps;
  double u = 0.0, w = 1.0;
  for (int i = 0; i < steps; ++i) {
    double k1u, k1w, k2u, k2w, k3u, k3w, k4u, k4w;
    rhs(u, w, k1u, k1w);
    rhs(u + 0.5 * h * k1u, w + 0.5 * h * k1w, k2u, k2w);
    rhs(u + 0.5 * h * k2u, w + 0.5 * h * k2w, k3u, k3w);
    rhs(u + h * k3u, w + h * k3w, k4u, k4w);
    u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
  }
  return w;
}

double smallest_tridiagonal(Eigen::VectorXd diag, Eigen::VectorXd sub) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

}  // namespace

double shooting_interval(double p, double length, int steps) {
  if (!(p > 1.0)) throw InputError("p must exceed 1");
  if (!(length > 0.0)) throw InputError("interval length must be positive");
  const double half = 0.5 * length;
  // The midpoint flux is positive below lambda_1 and negative just above it.
  double lo = 0.0;
  double hi = 1.0;
  while (midpoint_flux(p, hi, half, steps) > 0.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (midpoint_flux(p, mid, half, steps) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double interval_closed_form(double p, double length) {
  const double pi_p = 2.0 * kPi / (p * std::sin(kPi / p));
  return (p - 1.0) * std::pow(pi_p / length, p);
}

double tridiagonal_interval(double length, int cells) {
  if (cells < 2) throw InputError("tridiagonal oracle needs at least 2 cells");
  const double h = length / cells;
  const int n = cells - 1;
  Eigen::VectorXd diag = Eigen::VectorXd::Constant(n, 2.0 / (h * h));
  Eigen::VectorXd sub = Eigen::VectorXd::Constant(n - 1, -1.0 / (h * h));
  return smallest_tridiagonal(diag, sub);
}

double radial_disk(double radius, int cells) {
  if (cells < 2) throw InputError("radial oracle needs at least 2 cells");
  // Unknowns at cell centres r_i = (i + 1/2) h; u = 0 at r = radius via a ghost
  // value mirrored across the wall. Symmetrised by the mass r_i.
  const double h = radius / cells;
  Eigen::VectorXd diag(cells), sub(cells - 1);
  for (int i = 0; i < cells; ++i) {
    const double r = (i + 0.5) * h;
    const double left = i * h;
    const double right = (i + 1) * h;
    double d = (left + right) / (h * h * r);
    if (i == cells - 1) d += right / (h * h * r);
    diag[i] = d;
    if (i + 1 < cells) {
      const double r_next = (i + 1.5) * h;
      sub[i] = -right / (h * h * std::sqrt(r * r_next));
    }
  }
  return smallest_tridiagonal(diag, sub);
}

double bessel_disk(double radius) {
  const double j = boost::math::cyl_bessel_j_zero(0.0, 1);
  return j * j / (radius * radius);
}

double straight_tube_p2(double lambda1, double half_length) {
  const double k = kPi / (2.0 * half_length);
  return lambda1 + k * k;
}

}  // namespace pwave::oracle
