#pragma once

// Reference values computed without the finite-element machinery. Used by the
// test suite and by `pwave --seed-oracle`.

namespace pwave::oracle {

/// First Dirichlet eigenvalue of the 1D p-Laplacian on an interval of the given
/// length, by shooting on (u, |u'|^{p-2} u') and bisection in lambda.
double shooting_interval(double p, double length = 1.0, int steps = 20000);

/// (p - 1) (pi_p / length)^p with pi_p = 2 pi / (p sin(pi / p)).
double interval_closed_form(double p, double length = 1.0);

/// Smallest eigenvalue of the second-difference Dirichlet Laplacian on n cells.
double tridiagonal_interval(double length, int cells);

/// Smallest eigenvalue of -(1/r)(r u')' on (0, radius) with u(radius) = 0,
/// finite volumes on n radial cells.
double radial_disk(double radius, int cells);

/// j_{0,1}^2 / radius^2.
double bessel_disk(double radius = 1.0);

/// Separable p = 2 straight-tube value lambda_1(omega) + (pi / (2 L))^2.
double straight_tube_p2(double lambda1, double half_length);

}  // namespace pwave::oracle
