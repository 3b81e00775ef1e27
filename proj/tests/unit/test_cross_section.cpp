#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "frozen_values.hpp"
#include "pwave/errors.hpp"
#include "pwave/cross_section.hpp"
#include "pwave/oracles.hpp"

using namespace pwave;

namespace {

std::shared_ptr<const CrossSectionMesh> mesh_of(const CrossSectionDescriptor& d, double h) {
  return std::make_shared<const CrossSectionMesh>(build_mesh(d, h));
}

}  // namespace

TEST(Mesh, MeasuresMatchShapes) {
  const std::vector<std::pair<CrossSectionDescriptor, double>> cases{
      {CrossSectionDescriptor::interval(2.0, 0.5), 1e-12},
      {CrossSectionDescriptor::rectangle(0.6, 0.2), 1e-12},
      {CrossSectionDescriptor::disk(1.0), 0.01},
      {CrossSectionDescriptor::annulus(0.5, 1.0), 0.01},
      {CrossSectionDescriptor::ellipse(1.0, 0.5), 0.01},
      {CrossSectionDescriptor::polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}), 1e-12},
      {CrossSectionDescriptor::polygon({{0, 0}, {2, 0}, {0, 1}}), 1e-12}};
  for (const auto& [d, tol] : cases) {
    const CrossSectionMesh m = build_mesh(d, 0.05);
    EXPECT_NEAR(m.total_volume() / d.measure(), 1.0, tol) << d.describe();
    for (int e = 0; e < m.element_count(); ++e) ASSERT_GT(m.volume(e), 0.0) << d.describe();
  }
}

TEST(Mesh, BoundaryNodesLieOnTheBoundary) {
  const CrossSectionMesh disk = build_mesh(CrossSectionDescriptor::disk(1.0), 0.1);
  const CrossSectionMesh ann = build_mesh(CrossSectionDescriptor::annulus(0.4, 1.0), 0.1);
  for (int i = 0; i < disk.node_count(); ++i) {
    const double r = disk.point(i).norm();
    if (disk.is_boundary(i)) {
      EXPECT_NEAR(r, 1.0, 1e-12);
    } else {
      EXPECT_LT(r, 1.0 - 1e-3);
    }
  }
  for (int i = 0; i < ann.node_count(); ++i) {
    const double r = ann.point(i).norm();
    if (ann.is_boundary(i)) {
      EXPECT_TRUE(std::abs(r - 1.0) < 1e-12 || std::abs(r - 0.4) < 1e-12);
    }
  }
  const CrossSectionMesh interval = build_mesh(CrossSectionDescriptor::interval(1.0, 2.0), 0.1);
  EXPECT_EQ(interval.node_count(), 11);
  EXPECT_EQ(interval.dof_count(), 9);
  EXPECT_NEAR(interval.coord(0, 0), 1.5, 1e-15);
}

TEST(Mesh, InvalidDescriptorsThrow) {
  EXPECT_THROW(build_mesh(CrossSectionDescriptor::disk(-1.0), 0.1), InputError);
  EXPECT_THROW(build_mesh(CrossSectionDescriptor::annulus(1.0, 0.5), 0.1), InputError);
  EXPECT_THROW(build_mesh(CrossSectionDescriptor::interval(1.0), 0.0), InputError);
  EXPECT_THROW(build_mesh(CrossSectionDescriptor::polygon({{0, 0}, {1, 0}}), 0.1), InputError);
}

TEST(Mesh, AsciiExport) {
  const CrossSectionMesh m = build_mesh(CrossSectionDescriptor::interval(1.0), 0.25);
  std::ostringstream out;
  m.write(out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "nodes 5 elements 4 dim 1");
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 2), "0 ");
}

TEST(GroundState, DiscreteIntervalMatchesFrozenP1Value) {
  const GroundState gs = solve_ground_state(mesh_of(CrossSectionDescriptor::interval(1.0), 0.05), 2.0);
  EXPECT_NEAR(gs.eigenvalue, frozen::kP1Interval20, 1e-8 * frozen::kP1Interval20);
}

TEST(GroundState, IntervalOracles) {
  const auto mesh = mesh_of(CrossSectionDescriptor::interval(1.0), 0.005);
  EXPECT_NEAR(solve_ground_state(mesh, 2.0).eigenvalue / frozen::kPiSquared, 1.0, 0.01);
  EXPECT_NEAR(solve_ground_state(mesh, 1.5).eigenvalue / frozen::kShootingP15, 1.0, 0.01);
  EXPECT_NEAR(solve_ground_state(mesh, 3.0).eigenvalue / frozen::kShootingP3, 1.0, 0.01);
}

TEST(GroundState, LibraryOraclesAgreeWithFrozenValues) {
  EXPECT_NEAR(oracle::shooting_interval(1.5), frozen::kShootingP15, 1e-8);
  EXPECT_NEAR(oracle::shooting_interval(3.0), frozen::kShootingP3, 1e-7);
  EXPECT_NEAR(oracle::interval_closed_form(3.0), frozen::kPiPP3, 1e-10);
  EXPECT_NEAR(oracle::bessel_disk(), frozen::kBesselDisk, 1e-12);
  EXPECT_NEAR(oracle::tridiagonal_interval(1.0, 100), frozen::kSecondDifference100, 1e-9);
  EXPECT_NEAR(oracle::radial_disk(1.0, 2000), frozen::kBesselDisk, 1e-4);
}

TEST(GroundState, DiskWithinTwoPercentOfBessel) {
  const GroundState gs = solve_ground_state(mesh_of(CrossSectionDescriptor::disk(1.0), 0.05), 2.0);
  EXPECT_NEAR(gs.eigenvalue / frozen::kBesselDisk, 1.0, 0.02);
  const SymmetryMoments m = symmetry_moments(gs);
  EXPECT_LE(m.mass.cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE(m.gradient.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(GroundState, PoincareOnRandomFields) {
  for (double p : {1.5, 2.0, 3.0}) {
    const auto mesh = mesh_of(CrossSectionDescriptor::ellipse(1.0, 0.6), 0.1);
    const GroundState gs = solve_ground_state(mesh, p);
    const CellForm form = cross_section_form(*mesh, p);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 100; ++i) {
      Eigen::VectorXd x(form.size());
      for (Eigen::Index k = 0; k < x.size(); ++k) x[k] = i % 2 ? u(rng) : 1.0 + 0.3 * u(rng);
      const FormEvaluation ev = form.evaluate(x, 0.0, false);
      EXPECT_GE(ev.energy, (1.0 - 1e-6) * gs.eigenvalue * ev.mass) << "p=" << p;
    }
    EXPECT_NEAR(form.evaluate(mesh->restrict(gs.values), 0.0, false).quotient(), gs.eigenvalue,
                1e-12 * gs.eigenvalue);
  }
}

TEST(GroundState, PositiveAndNormalised) {
  for (double p : {1.5, 2.0, 4.0}) {
    const auto mesh = mesh_of(CrossSectionDescriptor::rectangle(0.6, 0.2), 0.025);
    const GroundState gs = solve_ground_state(mesh, p);
    EXPECT_TRUE(gs.solver.ok());
    EXPECT_LE(gs.normalization_residual, 1e-8);
    for (int i = 0; i < mesh->node_count(); ++i) {
      if (mesh->is_boundary(i)) {
        EXPECT_EQ(gs.values[i], 0.0);
      } else {
        EXPECT_GT(gs.values[i], 0.0);
      }
    }
  }
}

TEST(GroundState, ScalingLaw) {
  const CrossSectionMesh mesh = build_mesh(CrossSectionDescriptor::disk(1.0), 0.15);
  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    for (double c : {0.5, 2.0}) {
      EXPECT_NEAR(scale_eigenvalue_check(mesh, p, c), 1.0, 1e-3) << "p=" << p << " c=" << c;
    }
  }
}

TEST(GroundState, RefinementDecreasesOnNestedMeshes) {
  double previous = std::numeric_limits<double>::infinity();
  for (double h : {0.1, 0.05, 0.025, 0.0125}) {
    const double lambda =
        solve_ground_state(mesh_of(CrossSectionDescriptor::interval(1.0), h), 3.0).eigenvalue;
    EXPECT_LE(lambda, previous * (1.0 + 1e-8)) << "h=" << h;
    previous = lambda;
  }
}

TEST(GroundState, Deterministic) {
  const auto mesh = mesh_of(CrossSectionDescriptor::ellipse(1.0, 0.5), 0.1);
  const GroundState a = solve_ground_state(mesh, 1.5);
  const GroundState b = solve_ground_state(mesh, 1.5);
  EXPECT_EQ(a.eigenvalue, b.eigenvalue);
  EXPECT_EQ(a.solver.iterations, b.solver.iterations);
  EXPECT_TRUE((a.values.array() == b.values.array()).all());
}

TEST(GroundState, CircularIdentityVanishesOnDisk) {
  const GroundState gs = solve_ground_state(mesh_of(CrossSectionDescriptor::disk(1.0), 0.1), 3.0);
  EXPECT_LE(circular_identity_residual(gs).cwiseAbs().maxCoeff(), 1e-10);
}
