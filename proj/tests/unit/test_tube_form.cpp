#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "frozen_values.hpp"
#include "pwave/errors.hpp"
#include "pwave/experiments.hpp"
#include "pwave/tube_form.hpp"

using namespace pwave;

namespace {

std::shared_ptr<const CrossSectionMesh> mesh_of(const CrossSectionDescriptor& d, double h) {
  return std::make_shared<const CrossSectionMesh>(build_mesh(d, h));
}

DiscreteField random_field(const TubeMesh& mesh, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  DiscreteField psi = DiscreteField::zeros(mesh);
  for (int k = 0; k < mesh.slice_count(); ++k) {
    for (int i = 0; i < mesh.section().node_count(); ++i) {
      if (mesh.dof(k, i) >= 0) psi.values(k, i) = u(rng);
    }
  }
  return psi;
}

TubeSpec bent_twisted_spec(const CrossSectionDescriptor& section) {
  return make_tube_spec(CurvatureProfile(3, {Profile::bump(0.6, 0.0, 1.5), Profile::decaying(0.2)}),
                        TwistProfile::planar(Profile::plateau(1.0, 0.0, 1.0, 0.5)), section, 2.0,
                        20);
}

}  // namespace

TEST(TubeForm, QuotientIsScaleInvariant) {
  const auto section = mesh_of(CrossSectionDescriptor::rectangle(0.6, 0.2), 0.05);
  const TubeSpec spec = bent_twisted_spec(section->descriptor());
  auto mesh = std::make_shared<const TubeMesh>(spec, section, -2.0, 2.0, 20);
  std::mt19937 rng(1);
  for (double p : {1.5, 2.0, 3.0}) {
    const TubeForm form(mesh, p);
    const DiscreteField psi = random_field(*mesh, rng);
    const double q = form.assemble(psi).quotient();
    for (double c : {0.1, 10.0}) {
      DiscreteField scaled{c * psi.values};
      EXPECT_NEAR(form.assemble(scaled).quotient(), q, 1e-12 * q) << "p=" << p;
    }
  }
}

TEST(TubeForm, DiscretePoincareOnStraightTubes) {
  for (double p : {1.5, 2.0, 3.0}) {
    const auto section = mesh_of(CrossSectionDescriptor::disk(1.0), 0.2);
    const GroundState gs = solve_ground_state(section, p);
    const TubeSpec spec = make_tube_spec(CurvatureProfile::straight(3), TwistProfile::untwisted(3),
                                         section->descriptor(), 3.0, 30);
    auto mesh = std::make_shared<const TubeMesh>(spec, section, -3.0, 3.0, 30);
    const TubeForm form(mesh, p);
    std::mt19937 rng(2);
    for (int i = 0; i < 100; ++i) {
      const FormValue v = form.assemble(random_field(*mesh, rng));
      EXPECT_GE(v.energy - gs.eigenvalue * v.norm, -1e-10 * v.norm) << "p=" << p;
    }
  }
}

TEST(TubeForm, GradientMatchesFiniteDifferences) {
  const auto section = mesh_of(CrossSectionDescriptor::ellipse(0.5, 0.3), 0.15);
  const TubeSpec spec = bent_twisted_spec(section->descriptor());
  auto mesh = std::make_shared<const TubeMesh>(spec, section, -2.0, 2.0, 10);
  const Potential v = [](double s, const Eigen::VectorXd& t) { return -0.3 * std::exp(-s * s) + t[0]; };
  std::mt19937 rng(4);
  for (double p : {1.5, 2.0, 3.0}) {
    const TubeForm form(mesh, p, v);
    for (int i = 0; i < 20; ++i) {
      const Eigen::VectorXd x = random_field(*mesh, rng).to_free(*mesh);
      EXPECT_LE(gradient_check(form.cells(), x, 1e-3, 30, i), 1e-5) << "p=" << p;
    }
  }
}

TEST(TubeForm, MetricCachedAtCellBarycenters) {
  const auto section = mesh_of(CrossSectionDescriptor::disk(0.5), 0.2);
  const TubeSpec spec = bent_twisted_spec(section->descriptor());
  const TubeMesh mesh(spec, section, -2.0, 2.0, 8);
  for (int k = 0; k < mesh.interval_count(); ++k) {
    for (int e = 0; e < section->element_count(); e += 5) {
      const double s = mesh.s(k) + 0.5 * mesh.step();
      const MetricSample m = spec.metric(s, section->barycenter(e));
      EXPECT_NEAR(mesh.jacobian(k, e), m.f, 1e-14);
      EXPECT_NEAR(mesh.shear(k, e, 0), m.shear[0], 1e-14);
      EXPECT_NEAR(mesh.shear(k, e, 1), m.shear[1], 1e-14);
    }
  }
}

TEST(TubeForm, FieldConversions) {
  const auto section = mesh_of(CrossSectionDescriptor::interval(1.0), 0.25);
  const TubeSpec spec = make_tube_spec(CurvatureProfile::straight(2), TwistProfile::untwisted(2),
                                       section->descriptor(), 1.0, 4);
  const TubeMesh dir(spec, section, -1.0, 1.0, 4);
  EXPECT_EQ(dir.dof_count(), 3 * 3);
  const TubeMesh free(spec, section, -1.0, 1.0, 4, EndCondition::Free, EndCondition::Free);
  EXPECT_EQ(free.dof_count(), 5 * 3);
  DiscreteField psi = DiscreteField::zeros(dir);
  psi.values(0, 2) = 1.0;
  EXPECT_THROW(psi.to_free(dir), InputError);
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(dir.dof_count(), 1.0, 9.0);
  EXPECT_TRUE(DiscreteField::from_free(dir, x).to_free(dir).isApprox(x));
}

TEST(TubeForm, StraightStripGapNearSeparableValue) {
  const auto section = mesh_of(CrossSectionDescriptor::interval(1.0), 0.05);
  const GroundState gs = solve_ground_state(section, 2.0);
  const TubeSpec spec = make_tube_spec(CurvatureProfile::straight(2), TwistProfile::untwisted(2),
                                       section->descriptor(), 10.0, 200);
  const TubeEigenpair tube = dirichlet_tube_eigenvalue(spec, section, 2.0);
  EXPECT_NEAR((tube.eigenvalue - gs.eigenvalue) / frozen::kStraightTubeGapL10, 1.0, 0.01);
  const double ref = dirichlet_tube_eigenvalue_p2(spec, section, {}, [&] {
    SolverConfig c;
    c.initial_guess = tube.solver.field;
    return c;
  }());
  EXPECT_NEAR(tube.eigenvalue / ref, 1.0, 1e-6);
}

TEST(TubeForm, NeumannSegmentOfStraightTubeHasNoGap) {
  const auto section = mesh_of(CrossSectionDescriptor::rectangle(0.6, 0.2), 0.05);
  const GroundState gs = solve_ground_state(section, 3.0);
  const TubeSpec spec = make_tube_spec(CurvatureProfile::straight(3), TwistProfile::untwisted(3),
                                       section->descriptor(), 1.0, 1);
  const TubeEigenpair seg = neumann_segment_eigenvalue(spec, section, 1.0, 10, 3.0);
  EXPECT_NEAR(seg.eigenvalue, gs.eigenvalue, 1e-7 * gs.eigenvalue);
  const TubeSpec bent = make_tube_spec(CurvatureProfile(3, {Profile::bump(0.5, 0, 1), Profile::zero()}),
                                       TwistProfile::untwisted(3), section->descriptor(), 1.0, 1);
  EXPECT_THROW(neumann_segment_eigenvalue(bent, section, 1.0, 10, 2.0), InputError);
}

TEST(TubeForm, TwistedSegmentGapIsPositive) {
  const auto section = mesh_of(CrossSectionDescriptor::rectangle(0.6, 0.2), 0.05);
  const GroundState gs = solve_ground_state(section, 2.0);
  const TubeSpec spec = make_tube_spec(CurvatureProfile::straight(3),
                                       TwistProfile::planar(Profile::plateau(1.0, 0.0, 2.0, 1.0)),
                                       section->descriptor(), 1.0, 1);
  const TubeEigenpair seg = neumann_segment_eigenvalue(spec, section, 1.0, 20, 2.0);
  EXPECT_GT(seg.eigenvalue - gs.eigenvalue, 1.0);
}

TEST(Cutoff, Identities) {
  for (int n : {1, 4, 16}) {
    const CutoffProfile phi(n);
    EXPECT_EQ(phi.value(0.0), 1.0);
    EXPECT_EQ(phi.value(n), 1.0);
    EXPECT_EQ(phi.value(2.0 * n), 0.0);
    EXPECT_NEAR(phi.value(1.5 * n), 0.5, 1e-15);
    EXPECT_NEAR(std::abs(phi.derivative(1.5 * n)), 1.0 / n, 1e-15);
    for (double xi : {1.5, 2.0, 3.0}) {
      EXPECT_NEAR(phi.derivative_power_integral(xi), 2.0 * n * std::pow(n, -xi), 1e-13);
    }
    const CutoffProfile shifted(n, true);
    EXPECT_EQ(shifted.shift(), double(n) * n);
    EXPECT_EQ(shifted.support().first, double(n) * n - 2.0 * n);
    EXPECT_EQ(shifted.value(double(n) * n), 1.0);
  }
}

TEST(Cutoff, RayleighGapDecreases) {
  const auto section = mesh_of(CrossSectionDescriptor::interval(1.0), 0.1);
  const GroundState gs = solve_ground_state(section, 3.0);
  double previous = std::numeric_limits<double>::infinity();
  for (int n : {2, 4, 8}) {
    const TubeSpec spec = make_tube_spec(CurvatureProfile::straight(2), TwistProfile::untwisted(2),
                                         section->descriptor(), 2.0 * n, 40 * n);
    auto mesh = std::make_shared<const TubeMesh>(spec, section, -2.0 * n, 2.0 * n, 40 * n);
    const CutoffProfile phi(n);
    const DiscreteField psi =
        DiscreteField::tensor(*mesh, [&](double s) { return phi.value(s); }, gs.values);
    const double r = rayleigh_gap(TubeForm(mesh, 3.0), psi, gs.eigenvalue);
    EXPECT_GE(r, 0.0);
    EXPECT_LT(r, previous);
    previous = r;
  }
}

TEST(Inequalities, SplitPowerBound) {
  std::mt19937 rng(22);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = 10.0 * u(rng), b = 10.0 * u(rng), q = 6.0 * u(rng);
    const double alpha = 1.0 + 1e-3 + 9.0 * u(rng);
    const double beta = alpha / (alpha - 1.0);
    const double lhs = std::pow(a + b, q);
    const double rhs = std::pow(alpha, q) * std::pow(a, q) + std::pow(beta, q) * std::pow(b, q);
    EXPECT_LE(lhs, rhs * (1.0 + 1e-12)) << a << " " << b << " " << q << " " << alpha;
  }
}

TEST(Inequalities, CutoffBoundScheduleTendsToZero) {
  const double lambda1 = frozen::kPiSquared;
  for (double p : {2.5, 3.0, 4.0}) {
    double previous = std::numeric_limits<double>::infinity();
    for (double n = 10; n <= 1e6; n *= std::sqrt(10.0)) {
      const double v = cutoff_bound_sequence(p, static_cast<int>(n), lambda1);
      EXPECT_LT(v, previous) << "p=" << p << " n=" << n;
      previous = v;
    }
    EXPECT_LT(cutoff_bound_sequence(p, 1000000, lambda1), 0.25 * cutoff_bound_sequence(p, 10, lambda1));
  }
}
