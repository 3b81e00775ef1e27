// Acceptance run: one PASS/FAIL line per criterion, at desk-scale settings.
// Exit status is the number of failed criteria (capped at 1 for ctest).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "pwave/cross_section.hpp"
#include "pwave/experiments.hpp"
#include "pwave/geometry.hpp"
#include "pwave/oracles.hpp"
#include "pwave/tube_form.hpp"

using namespace pwave;

namespace {

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    passed = passed && ok;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [miss]");
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

int failures = 0;

void criterion(int id, const std::string& title, double budget_s,
               const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.check(false, std::string("error: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.check(secs <= budget_s, "runtime " + num(secs) + " s <= " + num(budget_s) + " s");
  if (!out.passed) ++failures;
  std::cout << "criterion " << id << " (" << title << "): " << (out.passed ? "PASS" : "FAIL")
            << "  " << out.detail.str() << std::endl;
}

std::shared_ptr<const CrossSectionMesh> mesh_of(const CrossSectionDescriptor& d, double h) {
  return std::make_shared<const CrossSectionMesh>(build_mesh(d, h));
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Numerics numerics(double p, double h, double h_s = 0.1) {
  Numerics n;
  n.p = p;
  n.h = h;
  n.h_s = h_s;
  return n;
}

double verdict_value(const ExperimentReport& r, const std::string& rule) {
  const Verdict* v = r.find(rule);
  if (!v) throw std::runtime_error("missing verdict " + rule);
  return v->value;
}

bool verdict_ok(const ExperimentReport& r, const std::string& rule) {
  const Verdict* v = r.find(rule);
  return v && v->passed;
}

}  // namespace

int main() {
  const auto strip = CrossSectionDescriptor::interval(1.0);

  criterion(1, "cross-section oracles", 4 * 30.0, [&](Outcome& o) {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const auto interval = mesh_of(strip, 0.005);
    const double l2 = solve_ground_state(interval, 2.0).eigenvalue;
    o.check(rel(l2, pi2) <= 0.01, "interval p=2 " + num(l2) + " vs pi^2 rel " + num(rel(l2, pi2)));
    const double disk = solve_ground_state(mesh_of(CrossSectionDescriptor::disk(1.0), 0.05), 2.0).eigenvalue;
    o.check(rel(disk, 5.7832) <= 0.02, "disk p=2 " + num(disk) + " rel " + num(rel(disk, 5.7832)));
    for (double p : {1.5, 3.0}) {
      const double v = solve_ground_state(interval, p).eigenvalue;
      const double ref = oracle::shooting_interval(p);
      o.check(rel(v, ref) <= 0.01, "interval p=" + num(p) + " " + num(v) + " vs shooting " +
                                       num(ref) + " rel " + num(rel(v, ref)));
    }
  });

  criterion(2, "scaling law", 60.0, [&](Outcome& o) {
    const CrossSectionMesh disk = build_mesh(CrossSectionDescriptor::disk(1.0), 0.1);
    double worst = 0.0;
    for (double p : {1.5, 2.0, 3.0}) {
      for (double c : {0.5, 2.0}) worst = std::max(worst, std::abs(scale_eigenvalue_check(disk, p, c) - 1.0));
    }
    o.check(worst <= 1e-3, "max |ratio - 1| = " + num(worst));
  });

  criterion(3, "straight-tube equality", 300.0, [&](Outcome& o) {
    for (double p : {1.5, 2.0, 3.0}) {
      StraightParams params;
      params.section = strip;
      params.numerics = numerics(p, 0.05);
      params.lengths = {5.0, 10.0, 20.0};
      params.cutoffs = {4, 8, 16};
      const ExperimentReport r = straight_tube_experiment(params);
      const double lambda1 = r.quantities["ground_state"]["eigenvalue"];
      const double gap = r.quantities["gap_at_largest_L"];
      o.check(verdict_ok(r, "straight.poincare"),
              "p=" + num(p) + " min gap " + num(verdict_value(r, "straight.poincare")));
      o.check(gap <= 0.02 * lambda1, "gap/lambda1 at L=20 " + num(gap / lambda1));
      o.check(verdict_ok(r, "straight.cutoff_decay"), "R[psi_n] decreasing");
    }
  });

  criterion(4, "criticality", 120.0, [&](Outcome& o) {
    CriticalityParams params;
    params.section = strip;
    params.numerics = numerics(2.0, 0.05);
    params.potential = Profile::bump(-0.5, 0.0, 1.0);
    params.lengths = {30.0};
    const ExperimentReport r = criticality_experiment(params);
    const double gap = r.quantities["gap_at_largest_L"];
    o.check(gap < -1e-3, "lambda_V - lambda_1 = " + num(gap));
    const double diff = r.quantities["oracle_max_difference"];
    o.check(diff <= 1e-4, "oracle difference " + num(diff));
  });

  criterion(5, "bending gap", 600.0, [&](Outcome& o) {
    const CurvatureProfile kappa(2, {Profile::bump(0.5, 0.0, 2.0)});
    {
      BendingParams params;
      params.curvature = kappa;
      params.section = strip;
      params.numerics = numerics(2.0, 0.05);
      params.lengths = {30.0};
      const ExperimentReport r = bending_experiment(params);
      const double gap = r.quantities["gap_at_largest_L"];
      o.check(gap < -0.05, "p=2 lambda - lambda_1 = " + num(gap) + " (< -0.05 required)");
      const double diff = r.quantities["oracle_max_difference"];
      o.check(diff <= 1e-3, "p=2 oracle difference " + num(diff));
    }
    for (double p : {1.5, 3.0}) {
      BendingParams params;
      params.curvature = kappa;
      params.section = strip;
      params.numerics = numerics(p, 0.05);
      params.lengths = {30.0};
      if (p < 2.0) params.cutoffs = {32, 128, 512};
      const ExperimentReport r = bending_experiment(params);
      const double paired = r.quantities["paired_difference"];
      const double margin = r.quantities["margin"];
      o.check(paired < -margin, "p=" + num(p) + " bent - straight " + num(paired) + " vs margin " + num(margin));
      o.check(verdict_ok(r, "bend.witness"), "p=" + num(p) + " witness " + r.quantities["witness"].dump());
    }
  });

  criterion(6, "twisting Hardy inequality", 900.0, [&](Outcome& o) {
    TwistParams params;
    params.twist = TwistProfile::planar(Profile::plateau(1.0, 0.0, 2.0, 1.0));
    params.section = CrossSectionDescriptor::rectangle(0.6, 0.2);
    params.numerics = numerics(2.0, 0.025);
    const ExperimentReport r = twisting_hardy_experiment(params);
    for (const char* l : {"3", "5", "8"}) {
      const std::string rule = std::string("twist.gap_l") + l;
      o.check(verdict_ok(r, rule), "c_" + std::string(l) + " = " + num(verdict_value(r, rule)));
    }
    o.check(verdict_ok(r, "twist.p2_oracle"), "oracle rel " + num(verdict_value(r, "twist.p2_oracle")));
    o.check(verdict_ok(r, "twist.hardy_direct"),
            "direct slack " + num(verdict_value(r, "twist.hardy_direct")));
    TwistParams control = params;
    control.section = CrossSectionDescriptor::disk(1.0);
    control.numerics = numerics(2.0, 0.15);
    control.control = true;
    control.random_fields = 0;
    const ExperimentReport c = twisting_hardy_experiment(control);
    for (const char* l : {"3", "5", "8"}) {
      const std::string rule = std::string("twist.null_gap_l") + l;
      o.check(verdict_ok(c, rule), "disk c_" + std::string(l) + " = " + num(verdict_value(c, rule)));
    }
  });

  criterion(7, "essential-threshold bracketing", 300.0, [&](Outcome& o) {
    EssentialParams params;
    params.curvature = CurvatureProfile(2, {Profile::decaying(0.3)});
    params.twist = TwistProfile::untwisted(2);
    params.section = strip;
    params.numerics = numerics(2.0, 0.05);
    params.tail_length = 20.0;
    params.cutoffs = {16};
    const ExperimentReport r = essential_threshold_bounds(params);
    const double lambda1 = r.quantities["ground_state"]["eigenvalue"];
    const double lower = r.quantities["lower_bound"];
    const double upper = r.quantities["upper_bound"];
    o.check(lower <= lambda1 && (lambda1 - lower) / lambda1 <= 0.03,
            "lower " + num(lower) + " rel " + num((lambda1 - lower) / lambda1));
    o.check(std::abs(upper - lambda1) / lambda1 <= 0.03,
            "upper " + num(upper) + " rel " + num((upper - lambda1) / lambda1));
  });

  criterion(8, "numerical hygiene", 60.0, [&](Outcome& o) {
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    // Gradients on a bent, twisted tube at p = 1.5 and 3.
    const auto section = mesh_of(CrossSectionDescriptor::ellipse(0.5, 0.3), 0.15);
    const TubeSpec spec = make_tube_spec(
        CurvatureProfile(3, {Profile::bump(0.6, 0.0, 1.5), Profile::decaying(0.2)}),
        TwistProfile::planar(Profile::plateau(1.0, 0.0, 1.0, 0.5)), section->descriptor(), 2.0, 10);
    auto mesh = std::make_shared<const TubeMesh>(spec, section, -2.0, 2.0, 10);
    double worst_grad = 0.0;
    for (double p : {1.5, 3.0}) {
      const TubeForm form(mesh, p);
      for (int i = 0; i < 20; ++i) {
        Eigen::VectorXd x(mesh->dof_count());
        for (Eigen::Index k = 0; k < x.size(); ++k) x[k] = u(rng);
        worst_grad = std::max(worst_grad, gradient_check(form.cells(), x, 1e-3, 30, i));
      }
    }
    o.check(worst_grad <= 1e-5, "gradient rel " + num(worst_grad));

    const CurvatureProfile k3(3, {Profile::bump(0.5, 0.0, 3.0), Profile::decaying(0.4, 1.0, 2.0)});
    const FrameField frames = integrate_frame(k3, Eigen::MatrixXd::Identity(3, 3), -10.0, 10.0, 1e-3);
    o.check(frames.max_drift <= 1e-8, "frame drift " + num(frames.max_drift));

    double det_err = 0.0, inv_err = 0.0, shear_err = 0.0;
    const TwistProfile twist = TwistProfile::planar(Profile::decaying(2.0));
    for (int i = 0; i < 1000; ++i) {
      Eigen::VectorXd kappa(2), t(2);
      kappa << u(rng), u(rng);
      t << 0.6 * u(rng), 0.6 * u(rng);
      const double s = 5.0 * u(rng);
      const auto [r, dr] = twist.evaluate(s);
      const MetricSample g = evaluate_metric(kappa, r, dr, s, t);
      det_err = std::max(det_err, std::abs(g.g.determinant() - g.f * g.f));
      inv_err = std::max(inv_err, (g.g * g.g_inv - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff());
      shear_err = std::max(shear_err, std::abs(g.shear.dot(t)));
    }
    o.check(det_err <= 1e-10, "det g - f^2 " + num(det_err));
    o.check(inv_err <= 1e-9, "g g^-1 - I " + num(inv_err));
    o.check(shear_err <= 1e-10, "f_mu t_mu " + num(shear_err));

    int violations = 0;
    std::uniform_real_distribution<double> pos(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
      const double a = 10 * pos(rng), b = 10 * pos(rng), q = 6 * pos(rng);
      const double alpha = 1.001 + 9 * pos(rng), beta = alpha / (alpha - 1.0);
      if (std::pow(a + b, q) > (std::pow(alpha * a, q) + std::pow(beta * b, q)) * (1 + 1e-12)) ++violations;
    }
    o.check(violations == 0, "split-power inequality violations " + std::to_string(violations));
  });

  std::cout << (failures == 0 ? "all criteria PASS" : std::to_string(failures) + " criterion(s) FAIL")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
