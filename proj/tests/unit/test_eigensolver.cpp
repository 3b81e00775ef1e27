#include <gtest/gtest.h>

#include <random>

#include "pwave/cross_section.hpp"
#include "pwave/eigensolver.hpp"
#include "pwave/errors.hpp"
#include "pwave/tube_form.hpp"

using namespace pwave;

namespace {

Eigen::VectorXd random_field(Eigen::Index n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = u(rng);
  return x;
}

}  // namespace

TEST(Solver, P2AgreesWithShiftInvertOnBenchmarkMeshes) {
  const std::vector<std::pair<CrossSectionDescriptor, double>> meshes{
      {CrossSectionDescriptor::interval(1.0), 0.01},
      {CrossSectionDescriptor::disk(1.0), 0.1},
      {CrossSectionDescriptor::rectangle(0.6, 0.2), 0.025},
      {CrossSectionDescriptor::ellipse(1.0, 0.5), 0.08},
      {CrossSectionDescriptor::annulus(0.5, 1.0), 0.08}};
  for (const auto& [d, h] : meshes) {
    const CellForm form = cross_section_form(build_mesh(d, h), 2.0);
    const SolverResult pncg = minimize_quotient(form);
    const SolverResult ref = inverse_iteration_p2(form);
    ASSERT_TRUE(pncg.ok()) << d.describe();
    EXPECT_NEAR(pncg.eigenvalue / ref.eigenvalue, 1.0, 1e-6) << d.describe();
    EXPECT_EQ(count_eigenvalues_below(form, ref.eigenvalue * (1.0 - 1e-6)), 0);
    EXPECT_EQ(count_eigenvalues_below(form, ref.eigenvalue * (1.0 + 1e-6)), 1);
  }
}

TEST(Solver, GradientMatchesFiniteDifferences) {
  const CrossSectionMesh mesh = build_mesh(CrossSectionDescriptor::ellipse(1.0, 0.6), 0.15);
  for (double p : {1.5, 2.0, 3.0}) {
    const CellForm form = cross_section_form(mesh, p);
    for (unsigned seed = 0; seed < 20; ++seed) {
      EXPECT_LE(gradient_check(form, random_field(form.size(), seed), 1e-3), 1e-5) << p;
    }
  }
}

TEST(Solver, QuotientNonincreasingWithinEachStage) {
  const CellForm form = cross_section_form(build_mesh(CrossSectionDescriptor::disk(1.0), 0.15), 1.5);
  SolverConfig config;
  config.record_history = true;
  const SolverResult r = minimize_quotient(form, config);
  ASSERT_TRUE(r.ok());
  ASSERT_FALSE(r.history.empty());
  for (std::size_t i = 1; i < r.history.size(); ++i) {
    if (r.history[i].first != r.history[i - 1].first) continue;
    EXPECT_LE(r.history[i].second, r.history[i - 1].second + 1e-14 * std::abs(r.history[i - 1].second));
  }
}

TEST(Solver, DeterministicBitForBit) {
  const CellForm form = cross_section_form(build_mesh(CrossSectionDescriptor::disk(1.0), 0.15), 3.0);
  const SolverResult a = minimize_quotient(form);
  const SolverResult b = minimize_quotient(form);
  EXPECT_EQ(a.eigenvalue, b.eigenvalue);
  EXPECT_TRUE((a.field.array() == b.field.array()).all());
}

TEST(Solver, ConfigValidation) {
  SolverConfig c;
  c.initialization = "random";
  EXPECT_THROW(c.validate(), InputError);
  SolverConfig d;
  d.max_iterations = 0;
  EXPECT_THROW(d.validate(), InputError);
}

TEST(Solver, IterationCapIsReported) {
  const CellForm form = cross_section_form(build_mesh(CrossSectionDescriptor::disk(1.0), 0.1), 3.0);
  SolverConfig c;
  c.max_iterations = 2;
  const SolverResult r = minimize_quotient(form, c);
  EXPECT_FALSE(r.ok());
  EXPECT_EQ(r.iterations, 2);
  EXPECT_THROW(solve_ground_state(std::make_shared<const CrossSectionMesh>(
                                      build_mesh(CrossSectionDescriptor::disk(1.0), 0.1)),
                                  3.0, c),
               ConvergenceError);
}
