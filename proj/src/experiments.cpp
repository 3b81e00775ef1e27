#include "pwave/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "pwave/errors.hpp"
#include "pwave/oracles.hpp"

namespace pwave {
namespace {

using json = nlohmann::ordered_json;
constexpr double kPi = std::numbers::pi;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(10);
  out << v;
  return out.str();
}

int intervals_for(double length, double h_s) {
  if (!(h_s > 0.0)) throw InputError("numerics.h_s must be positive");
  const double ratio = length / h_s;
  const long n = std::lround(ratio);
  if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * std::max(1.0, ratio)) {
    throw InputError("length " + fmt(length) + " is not a multiple of h_s = " + fmt(h_s));
  }
  return static_cast<int>(n);
}

void check_p(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw InputError("p must exceed 1");
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

GroundState section_ground_state(const CrossSectionDescriptor& section, const Numerics& num) {
  auto mesh = std::make_shared<const CrossSectionMesh>(build_mesh(section, num.h));
  return solve_ground_state(mesh, num.p, num.solver);
}

json ground_state_json(const GroundState& gs) {
  json j;
  j["eigenvalue"] = gs.eigenvalue;
  j["iterations"] = gs.solver.iterations;
  j["gradient_norm"] = gs.solver.gradient_norm;
  j["converged"] = gs.solver.converged;
  j["tolerance"] = gs.solver.tolerance;
  j["nodes"] = gs.mesh->node_count();
  j["elements"] = gs.mesh->element_count();
  j["interior_nodes"] = gs.mesh->dof_count();
  return j;
}

json numerics_json(const Numerics& n) {
  json j;
  j["p"] = n.p;
  j["h"] = n.h;
  j["h_s"] = n.h_s;
  j["solver_max_iterations"] = n.solver.max_iterations;
  j["solver_gradient_tolerance"] = n.solver.gradient_tolerance;
  j["solver_eigenvalue_tolerance"] = n.solver.eigenvalue_tolerance;
  j["oracle"] = n.oracle;
  return j;
}

json vector_json(const Eigen::VectorXd& v) {
  json j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

TubeSpec straight_spec(const CrossSectionDescriptor& section, double half_length, int slices,
                       const TwistProfile* twist = nullptr) {
  const int d = section.dimension() + 1;
  return make_tube_spec(CurvatureProfile::straight(d), twist ? *twist : TwistProfile::untwisted(d),
                        section, half_length, slices);
}

SolverConfig with_guess(const SolverConfig& base, const Eigen::VectorXd& guess) {
  SolverConfig c = base;
  c.initial_guess = guess;
  return c;
}

double relative(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

void DataTable::write_csv(std::ostream& out) const {
  const auto precision = out.precision(17);
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
  out.precision(precision);
}

bool ExperimentReport::passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
}

const Verdict* ExperimentReport::find(const std::string& rule) const {
  for (const Verdict& v : verdicts) {
    if (v.rule == rule) return &v;
  }
  return nullptr;
}

nlohmann::ordered_json ExperimentReport::to_json(const std::string& timestamp) const {
  json j;
  j["experiment"] = experiment;
  j["timestamp"] = timestamp;
  j["inputs"] = inputs;
  j["quantities"] = quantities;
  json verdict_list = json::array();
  for (const Verdict& v : verdicts) {
    verdict_list.push_back(
        {{"rule", v.rule}, {"passed", v.passed}, {"value", v.value}, {"threshold", v.threshold},
         {"detail", v.detail}});
  }
  j["verdicts"] = verdict_list;
  j["warnings"] = warnings;
  json table_list = json::array();
  for (const DataTable& t : tables) table_list.push_back(t.name + ".csv");
  j["tables"] = table_list;
  j["passed"] = passed();
  return j;
}

double essential_lower_bound(const CurvatureProfile& curvature, double radius_bound,
                             double lambda1, double tail_length) {
  const double ak = radius_bound * curvature.tail_sup_norm(tail_length);
  if (!(ak < 1.0)) throw InputError("a * |kappa|_tail must be below 1");
  return (1.0 - ak) / (1.0 + ak) * lambda1;
}

double hardy_weight(const std::vector<double>& c, double l, int depth, double s) {
  if (depth < 1) throw InputError("Hardy depth J must be at least 1");
  if (static_cast<int>(c.size()) < depth) throw InputError("need c_{l+j} for j = 1..J");
  double rho = 0.0;
  double scale = 0.5;
  for (int j = 1; j <= depth; ++j, scale *= 0.5) {
    if (std::abs(s) <= l + j) rho += scale * std::min(c[j - 1], 1.0);
  }
  return rho;
}

std::vector<double> assemble_hardy_weight(const std::vector<double>& c, double l, int depth,
                                          const std::vector<double>& samples) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (double s : samples) out.push_back(hardy_weight(c, l, depth, s));
  return out;
}

double twist_condition_magnitude(const TubeSpec& spec, const GroundState& state, double s) {
  const CrossSectionMesh& mesh = *state.mesh;
  const auto [r, dr] = spec.twist.evaluate(s);
  const Eigen::VectorXd kappa = spec.curvature.values(s);
  double total = 0.0;
  for (int e = 0; e < mesh.element_count(); ++e) {
    const MetricScalars m = metric_scalars(kappa, r, dr, mesh.barycenter(e));
    const double v = m.shear.dot(element_gradient(mesh, state.values, e));
    total += std::pow(std::abs(v), state.p) * mesh.volume(e);
  }
  return total;
}

double cutoff_bound_sequence(double p, int n, double lambda1, double c) {
  if (n < 2) throw InputError("the n-dependent beta needs n >= 2");
  const double nl = n * std::log(static_cast<double>(n));
  const double alpha = 1.0 + nl;
  const double beta = 1.0 + 1.0 / nl;
  return std::pow(alpha, 0.5 * p) * 2.0 / std::pow(n, p - 1.0) * c +
         (std::pow(beta, 0.5 * p) - 1.0) * lambda1 * 4.0 * n;
}

ExperimentReport cross_section_experiment(const CrossSectionParams& params) {
  check_p(params.numerics.p);
  ExperimentReport rep;
  rep.experiment = "cross-section";
  rep.inputs["section"] = params.section.describe();
  rep.inputs["numerics"] = numerics_json(params.numerics);
  Stopwatch clock;
  const GroundState gs = section_ground_state(params.section, params.numerics);
  rep.runtimes["ground_state"] = clock.seconds();
  const CrossSectionMesh& mesh = *gs.mesh;
  const double p = params.numerics.p;

  rep.quantities["ground_state"] = ground_state_json(gs);
  rep.quantities["normalization_residual"] = gs.normalization_residual;
  rep.quantities["mesh_volume"] = mesh.total_volume();
  rep.quantities["exact_measure"] = params.section.measure();
  rep.quantities["radius_bound"] = mesh.radius_bound();
  const SymmetryMoments moments = symmetry_moments(gs);
  rep.quantities["moment_mass"] = vector_json(moments.mass);
  rep.quantities["moment_gradient"] = vector_json(moments.gradient);
  rep.quantities["identity_residual"] = vector_json(circular_identity_residual(gs));

  double min_interior = std::numeric_limits<double>::infinity();
  for (int i = 0; i < mesh.node_count(); ++i) {
    if (!mesh.is_boundary(i)) min_interior = std::min(min_interior, gs.values[i]);
  }
  rep.add({"cross_section.converged", gs.solver.ok(), gs.solver.gradient_norm,
           params.numerics.solver.gradient_tolerance, "solver termination"});
  rep.add({"cross_section.normalization", gs.normalization_residual <= 1e-8,
           gs.normalization_residual, 1e-8, "| ||phi_1||_p - 1 |"});
  rep.add({"cross_section.positivity", min_interior > 0.0, min_interior, 0.0,
           "minimum of phi_1 over interior nodes"});
  const double area_error = relative(mesh.total_volume(), params.section.measure());
  rep.add({"cross_section.measure", area_error <= 0.01, area_error, 0.01,
           "relative error of the meshed measure"});

  json oracle;
  if (p == 2.0) {
    clock = Stopwatch();
    const double ref =
        inverse_iteration_p2(cross_section_form(mesh, 2.0), with_guess({}, gs.solver.field))
            .eigenvalue;
    rep.runtimes["p2_oracle"] = clock.seconds();
    oracle["p2_same_mesh"] = ref;
    const double err = relative(gs.eigenvalue, ref);
    rep.add({"cross_section.p2_oracle", err <= 1e-6, err, 1e-6,
             "relative difference to shift-and-invert iteration on the same mesh"});
  }
  if (params.numerics.oracle) {
    if (params.section.shape == Shape::Interval) {
      const double ref = oracle::shooting_interval(p, params.section.length);
      oracle["shooting"] = ref;
      const double err = relative(gs.eigenvalue, ref);
      rep.add({"cross_section.shooting_oracle", err <= 0.01, err, 0.01,
               "relative difference to the 1D shooting value"});
    }
    if (params.section.shape == Shape::Disk && p == 2.0) {
      const double ref = oracle::radial_disk(params.section.radius, 2000);
      oracle["radial"] = ref;
      oracle["bessel"] = oracle::bessel_disk(params.section.radius);
      const double err = relative(gs.eigenvalue, ref);
      rep.add({"cross_section.radial_oracle", err <= 0.02, err, 0.02,
               "relative difference to the radial finite-difference value"});
    }
  }
  if (!oracle.empty()) rep.quantities["oracle"] = oracle;

  DataTable table{"ground_state", {}, {}};
  for (int a = 0; a < mesh.dimension(); ++a) table.columns.push_back("t" + std::to_string(a + 1));
  table.columns.push_back("phi");
  for (int i = 0; i < mesh.node_count(); ++i) {
    std::vector<double> row;
    for (int a = 0; a < mesh.dimension(); ++a) row.push_back(mesh.coord(i, a));
    row.push_back(gs.values[i]);
    table.rows.push_back(std::move(row));
  }
  rep.tables.push_back(std::move(table));
  return rep;
}

ExperimentReport straight_tube_experiment(const StraightParams& params) {
  check_p(params.numerics.p);
  if (params.lengths.empty()) throw InputError("numerics.lengths must not be empty");
  const Numerics& num = params.numerics;
  ExperimentReport rep;
  rep.experiment = "straight";
  rep.inputs["section"] = params.section.describe();
  rep.inputs["numerics"] = numerics_json(num);
  rep.inputs["lengths"] = params.lengths;
  rep.inputs["cutoffs"] = params.cutoffs;
  rep.inputs["gap_fraction"] = params.gap_fraction;

  Stopwatch clock;
  const GroundState gs = section_ground_state(params.section, num);
  rep.runtimes["ground_state"] = clock.seconds();
  const double lambda1 = gs.eigenvalue;
  rep.quantities["ground_state"] = ground_state_json(gs);

  const std::vector<double> lengths = sorted_unique(params.lengths);
  DataTable gaps{"gaps", {"L", "lambda_L", "gap"}, {}};
  if (num.p == 2.0) gaps.columns.push_back("separable_gap");
  if (num.oracle && num.p == 2.0) gaps.columns.push_back("oracle_lambda_L");
  double min_gap = std::numeric_limits<double>::infinity();
  std::vector<double> lambdas;
  double tube_tolerance = 0.0;
  bool separable_ok = true;
  double separable_worst = 0.0;
  double oracle_worst = 0.0;
  for (double length : lengths) {
    clock = Stopwatch();
    const TubeSpec spec =
        straight_spec(params.section, length, intervals_for(2.0 * length, num.h_s));
    const TubeEigenpair tube = dirichlet_tube_eigenvalue(spec, gs.mesh, num.p, num.solver);
    rep.runtimes["tube_L" + fmt(length)] = clock.seconds();
    const double gap = tube.eigenvalue - lambda1;
    tube_tolerance = std::max(tube_tolerance, tube.solver.tolerance);
    min_gap = std::min(min_gap, gap);
    lambdas.push_back(tube.eigenvalue);
    std::vector<double> row{length, tube.eigenvalue, gap};
    if (num.p == 2.0) {
      const double sep = oracle::straight_tube_p2(0.0, length);
      row.push_back(sep);
      const double err = std::abs(gap - sep) / sep;
      separable_worst = std::max(separable_worst, err);
      separable_ok = separable_ok && err <= 0.1;
    }
    if (num.oracle && num.p == 2.0) {
      const double ref =
          dirichlet_tube_eigenvalue_p2(spec, gs.mesh, {}, with_guess({}, tube.solver.field));
      row.push_back(ref);
      oracle_worst = std::max(oracle_worst, relative(tube.eigenvalue, ref));
    }
    gaps.rows.push_back(std::move(row));
  }
  const double last_gap = lambdas.back() - lambda1;
  rep.quantities["lambda_L"] = lambdas;
  rep.quantities["gap_at_largest_L"] = last_gap;
  rep.quantities["relative_gap_at_largest_L"] = last_gap / lambda1;
  rep.quantities["extrapolation_note"] =
      "lambda_L approaches lambda_1(omega_h) from above; the infinite-tube value is the limit, "
      "never reported as exact";

  rep.add({"straight.poincare", min_gap >= -1e-10, min_gap, -1e-10,
           "min over L of lambda_L - lambda_1(omega_h)"});
  rep.add({"straight.gap", last_gap <= params.gap_fraction * lambda1, last_gap,
           params.gap_fraction * lambda1, "gap at the largest L"});
  bool monotone = true;
  for (std::size_t i = 1; i < lambdas.size(); ++i) {
    monotone = monotone && lambdas[i] <= lambdas[i - 1] + tube_tolerance;
  }
  rep.add({"straight.monotone", monotone, lambdas.back(), lambdas.front(),
           "lambda_L nonincreasing in L"});
  if (num.p == 2.0) {
    rep.add({"straight.separable", separable_ok, separable_worst, 0.1,
             "gap vs (pi / 2L)^2, worst relative deviation"});
  }
  if (num.oracle && num.p == 2.0) {
    rep.add({"straight.p2_oracle", oracle_worst <= 1e-6, oracle_worst, 1e-6,
             "relative difference to shift-and-invert iteration"});
  }
  rep.tables.push_back(std::move(gaps));

  DataTable cut{"cutoff_sequence", {"n", "R", "bound"}, {}};
  std::vector<double> rs;
  const Eigen::VectorXd& phi = gs.values;
  for (int n : params.cutoffs) {
    const CutoffProfile prof(n);
    const TubeSpec spec = straight_spec(params.section, 2.0 * n, intervals_for(4.0 * n, num.h_s));
    auto mesh = std::make_shared<const TubeMesh>(spec, gs.mesh, -2.0 * n, 2.0 * n, spec.slices);
    const TubeForm form(mesh, num.p);
    const DiscreteField psi =
        DiscreteField::tensor(*mesh, [&](double s) { return prof.value(s); }, phi);
    const double r = rayleigh_gap(form, psi, lambda1);
    const double mass = 2.0 * n + 2.0 * n / (num.p + 1.0);  // int |phi_n|^p
    const double bound = n >= 2 ? cutoff_bound_sequence(num.p, n, lambda1, 1.0 / mass) : 0.0;
    rs.push_back(r);
    cut.rows.push_back({static_cast<double>(n), r, bound});
  }
  if (!rs.empty()) {
    bool decreasing = true;
    for (std::size_t i = 1; i < rs.size(); ++i) decreasing = decreasing && rs[i] < rs[i - 1];
    rep.quantities["cutoff_R"] = rs;
    rep.add({"straight.cutoff_decay", decreasing, rs.back(), rs.front(),
             "R[psi_n] strictly decreasing along the cutoff sequence"});
  }
  rep.tables.push_back(std::move(cut));
  return rep;
}

ExperimentReport criticality_experiment(const CriticalityParams& params) {
  check_p(params.numerics.p);
  const Numerics& num = params.numerics;
  const Profile& v = params.potential;
  if (!v.is_zero()) {
    if (v.amplitude() > 0.0) throw InputError("potential must be nonpositive (amplitude <= 0)");
    const auto support = v.support();
    if (!support) throw InputError("potential must be compactly supported (bump or plateau)");
  }
  if (params.lengths.empty()) throw InputError("numerics.lengths must not be empty");
  ExperimentReport rep;
  rep.experiment = "criticality";
  rep.inputs["section"] = params.section.describe();
  rep.inputs["potential"] = v.describe();
  rep.inputs["numerics"] = numerics_json(num);
  rep.inputs["lengths"] = params.lengths;
  rep.inputs["margin"] = params.margin;

  Stopwatch clock;
  const GroundState gs = section_ground_state(params.section, num);
  rep.runtimes["ground_state"] = clock.seconds();
  const double lambda1 = gs.eigenvalue;
  rep.quantities["ground_state"] = ground_state_json(gs);
  // int V |phi_1|^p ds dt = int V ds since phi_1 is normalised.
  const double witness = v.is_zero() ? 0.0 : integrate_product(v, Profile::constant(1.0));
  rep.quantities["witness_integral"] = witness;

  const Potential potential = [v](double s, const Eigen::VectorXd&) { return v.value(s); };
  DataTable table{"criticality", {"L", "lambda_V", "gap"}, {}};
  const bool p2_check = num.p == 2.0;
  if (p2_check) table.columns.push_back("oracle_lambda_V");
  std::vector<double> lambdas;
  double oracle_diff = 0.0;
  double tolerance = 0.0;
  for (double length : sorted_unique(params.lengths)) {
    clock = Stopwatch();
    const TubeSpec spec =
        straight_spec(params.section, length, intervals_for(2.0 * length, num.h_s));
    const TubeEigenpair tube =
        dirichlet_tube_eigenvalue(spec, gs.mesh, num.p, num.solver, potential);
    tolerance = std::max(tolerance, tube.solver.tolerance);
    rep.runtimes["tube_L" + fmt(length)] = clock.seconds();
    lambdas.push_back(tube.eigenvalue);
    std::vector<double> row{length, tube.eigenvalue, tube.eigenvalue - lambda1};
    if (p2_check) {
      const double ref = dirichlet_tube_eigenvalue_p2(spec, gs.mesh, potential,
                                                      with_guess({}, tube.solver.field));
      row.push_back(ref);
      oracle_diff = std::max(oracle_diff, std::abs(tube.eigenvalue - ref));
    }
    table.rows.push_back(std::move(row));
  }
  const double gap = lambdas.back() - lambda1;
  rep.quantities["lambda_V"] = lambdas;
  rep.quantities["gap_at_largest_L"] = gap;
  if (v.is_zero()) {
    rep.warnings.push_back("V = 0: the experiment reduces to the straight tube");
    rep.add({"criticality.reduces_to_straight", gap >= -1e-10, gap, -1e-10,
             "lambda_L - lambda_1(omega_h) with V = 0"});
  } else {
    rep.add({"criticality.witness", witness < 0.0, witness, 0.0, "int V |phi_1|^p ds dt"});
    rep.add({"criticality.negative", gap < -params.margin, gap, -params.margin,
             "lambda_1^V - lambda_1(omega_h) at the largest L"});
  }
  bool monotone = true;
  for (std::size_t i = 1; i < lambdas.size(); ++i) {
    monotone = monotone && lambdas[i] <= lambdas[i - 1] + tolerance;
  }
  rep.add({"criticality.monotone", monotone, lambdas.back(), lambdas.front(),
           "lambda_1^V nonincreasing in L"});
  if (p2_check) {
    rep.quantities["oracle_max_difference"] = oracle_diff;
    rep.add({"criticality.p2_oracle", oracle_diff <= 1e-4, oracle_diff, 1e-4,
             "absolute difference to shift-and-invert iteration"});
  }
  rep.tables.push_back(std::move(table));
  return rep;
}

ExperimentReport essential_threshold_bounds(const EssentialParams& params) {
  check_p(params.numerics.p);
  const Numerics& num = params.numerics;
  if (!params.curvature.decays()) throw InputError("curvature must decay at infinity");
  if (!params.twist.decays()) throw InputError("twist rate must decay at infinity");
  const TubeSpec spec = make_tube_spec(params.curvature, params.twist, params.section, 1.0, 1);
  ExperimentReport rep;
  rep.experiment = "essential";
  rep.inputs["section"] = params.section.describe();
  json curvature = json::array();
  for (const Profile& c : params.curvature.components()) curvature.push_back(c.describe());
  rep.inputs["curvature"] = curvature;
  json twist = json::array();
  for (const auto& r : params.twist.rotations()) twist.push_back(r.rate.describe());
  rep.inputs["twist"] = twist;
  rep.inputs["numerics"] = numerics_json(num);
  rep.inputs["tail_length"] = params.tail_length;
  rep.inputs["cutoffs"] = params.cutoffs;

  Stopwatch clock;
  const GroundState gs = section_ground_state(params.section, num);
  rep.runtimes["ground_state"] = clock.seconds();
  const double lambda1 = gs.eigenvalue;
  rep.quantities["ground_state"] = ground_state_json(gs);
  const double a = params.section.radius_bound();
  const double lower = essential_lower_bound(params.curvature, a, lambda1, params.tail_length);
  rep.quantities["tail_curvature"] = params.curvature.tail_sup_norm(params.tail_length);
  rep.quantities["lower_bound"] = lower;

  DataTable table{"upper_bound", {"n", "window_start", "window_end", "quotient", "r_start"}, {}};
  double upper = std::numeric_limits<double>::infinity();
  for (int n : params.cutoffs) {
    const CutoffProfile prof(n, true);
    const auto [lo, hi] = prof.support();
    auto mesh = std::make_shared<const TubeMesh>(spec, gs.mesh, lo, hi,
                                                 intervals_for(hi - lo, num.h_s));
    const TubeForm form(mesh, num.p);
    const DiscreteField psi =
        DiscreteField::tensor(*mesh, [&](double s) { return prof.value(s); }, gs.values);
    const double q = form.assemble(psi).quotient();
    upper = std::min(upper, q);
    table.rows.push_back({static_cast<double>(n), lo, hi, q,
                          twist_condition_magnitude(spec, gs, lo)});
  }
  if (params.cutoffs.empty()) throw InputError("numerics.cutoffs must not be empty");
  rep.quantities["upper_bound"] = upper;
  rep.quantities["brackets"] = lower <= lambda1 && lambda1 <= upper;

  const double lower_gap = (lambda1 - lower) / lambda1;
  const double upper_gap = std::abs(upper - lambda1) / lambda1;
  rep.add({"essential.lower", lower <= lambda1 && lower_gap <= params.bracket, lower_gap,
           params.bracket, "(lambda_1 - lower) / lambda_1"});
  rep.add({"essential.upper", upper_gap <= params.bracket, upper_gap, params.bracket,
           "|upper - lambda_1| / lambda_1"});
  rep.tables.push_back(std::move(table));
  return rep;
}

namespace {

Profile default_perturbation(const CurvatureProfile& curvature) {
  for (const Profile& c : curvature.components()) {
    if (c.is_zero()) continue;
    const auto support = c.support();
    if (support) {
      return Profile::bump(1.0, 0.5 * (support->first + support->second),
                           0.5 * (support->second - support->first));
    }
    return Profile::bump(1.0, c.center(), 2.0 * c.width());
  }
  return Profile::bump(1.0, 0.0, 1.0);
}

}  // namespace

ExperimentReport bending_experiment(const BendingParams& params) {
  check_p(params.numerics.p);
  const Numerics& num = params.numerics;
  if (params.curvature.is_zero()) {
    // Allowed: the gap then reduces to the straight case and is reported as such.
  }
  if (params.lengths.empty()) throw InputError("numerics.lengths must not be empty");
  const int d = params.curvature.dimension();
  const TwistProfile untwisted = TwistProfile::untwisted(d);
  const TubeSpec probe_spec = make_tube_spec(params.curvature, untwisted, params.section, 1.0, 1);
  const bool assertive = params.section.shape == Shape::Interval || params.section.is_circular();

  ExperimentReport rep;
  rep.experiment = "bend";
  rep.inputs["section"] = params.section.describe();
  json curvature = json::array();
  for (const Profile& c : params.curvature.components()) curvature.push_back(c.describe());
  rep.inputs["curvature"] = curvature;
  rep.inputs["numerics"] = numerics_json(num);
  rep.inputs["lengths"] = params.lengths;
  rep.inputs["margin_factor"] = params.margin_factor;
  rep.inputs["mode"] = assertive ? "assert" : "exploratory";
  if (!assertive) {
    rep.warnings.push_back("non-circular cross-section: gap reported without assertion");
  }

  Stopwatch clock;
  const GroundState gs = section_ground_state(params.section, num);
  rep.runtimes["ground_state"] = clock.seconds();
  const double lambda1 = gs.eigenvalue;
  rep.quantities["ground_state"] = ground_state_json(gs);
  rep.quantities["identity_residual"] = vector_json(circular_identity_residual(gs));
  rep.quantities["embedding_margin"] = check_embedding(probe_spec).margin;

  // Probe (i): direct truncated eigenvalues.
  DataTable gaps{"bend_gaps", {"L", "lambda_bent", "gap"}, {}};
  if (params.paired_straight) gaps.columns.push_back("lambda_straight");
  const bool p2_check = num.p == 2.0;
  if (p2_check) gaps.columns.push_back("oracle_lambda_bent");
  double bent = 0.0, straight = 0.0, tolerance = 0.0, oracle_diff = 0.0;
  for (double length : sorted_unique(params.lengths)) {
    clock = Stopwatch();
    const int slices = intervals_for(2.0 * length, num.h_s);
    const TubeSpec spec = make_tube_spec(params.curvature, untwisted, params.section, length, slices);
    const TubeEigenpair tube = dirichlet_tube_eigenvalue(spec, gs.mesh, num.p, num.solver);
    bent = tube.eigenvalue;
    tolerance = tube.solver.tolerance;
    std::vector<double> row{length, bent, bent - lambda1};
    if (params.paired_straight) {
      const TubeSpec flat = straight_spec(params.section, length, slices);
      const TubeEigenpair ref = dirichlet_tube_eigenvalue(flat, gs.mesh, num.p, num.solver);
      straight = ref.eigenvalue;
      tolerance = std::max(tolerance, ref.solver.tolerance);
      row.push_back(straight);
    }
    if (p2_check) {
      const double ref =
          dirichlet_tube_eigenvalue_p2(spec, gs.mesh, {}, with_guess({}, tube.solver.field));
      oracle_diff = std::max(oracle_diff, std::abs(bent - ref));
      row.push_back(ref);
    }
    rep.runtimes["tube_L" + fmt(length)] = clock.seconds();
    gaps.rows.push_back(std::move(row));
  }
  const double gap = bent - lambda1;
  const double margin = params.margin_factor * tolerance;
  rep.quantities["lambda_bent"] = bent;
  rep.quantities["gap_at_largest_L"] = gap;
  rep.quantities["margin"] = margin;
  if (params.paired_straight) {
    rep.quantities["lambda_straight"] = straight;
    rep.quantities["paired_difference"] = bent - straight;
  }
  if (params.curvature.is_zero()) {
    rep.add({"bend.straight_reduction", gap >= -1e-10, gap, -1e-10,
             "kappa = 0: lambda_L - lambda_1(omega_h)"});
  } else if (assertive) {
    rep.add({"bend.gap", gap < -margin, gap, -margin,
             "lambda_1(bent, largest L) - lambda_1(omega_h)"});
    if (params.paired_straight) {
      rep.add({"bend.paired", bent < straight - margin, bent - straight, -margin,
               "lambda_1(bent) - lambda_1(straight) on the same mesh"});
    }
  }
  if (p2_check) {
    rep.quantities["oracle_max_difference"] = oracle_diff;
    rep.add({"bend.p2_oracle", oracle_diff <= 1e-3, oracle_diff, 1e-3,
             "absolute difference to shift-and-invert iteration"});
  }
  rep.tables.push_back(std::move(gaps));

  // Probes (ii) and (iii): the perturbed cutoff trial functions.
  const Profile j = params.perturbation.value_or(default_perturbation(params.curvature));
  rep.inputs["perturbation"] = j.describe();
  Eigen::VectorXd k(d - 1);
  for (int i = 0; i < d - 1; ++i) {
    k[i] = j.is_zero() || params.curvature.components()[i].is_zero()
               ? 0.0
               : integrate_product(j, params.curvature.components()[i]);
  }
  rep.quantities["k"] = vector_json(k);
  if (!(k.norm() > 1e-14)) {
    rep.warnings.push_back("k = int j kappa ds vanishes: trial-function probes skipped");
    return rep;
  }
  const auto jsupport = j.support();
  if (!jsupport) throw InputError("perturbation profile must be compactly supported");
  const double reach = std::max(std::abs(jsupport->first), std::abs(jsupport->second));
  const Eigen::VectorXd xi_dir = k / k.norm();
  const CrossSectionMesh& sec = *gs.mesh;
  Eigen::VectorXd transverse(sec.node_count());
  double xi_sup = 0.0;
  for (int i = 0; i < sec.node_count(); ++i) {
    const double xi = xi_dir.dot(sec.point(i));
    xi_sup = std::max(xi_sup, std::abs(xi));
    transverse[i] = xi * gs.values[i];
  }
  const double eps_max = 1.0 / (j.sup_norm() * std::max(xi_sup, 1e-300));
  std::vector<double> eps_grid;
  for (double e : sorted_unique(params.eps_grid)) {
    if (e > 0.0 && e < eps_max) {
      eps_grid.push_back(e);
    } else {
      rep.warnings.push_back("eps " + fmt(e) + " outside (0, 1/(|j| |xi|)) skipped");
    }
  }
  if (eps_grid.empty()) throw InputError("no admissible eps in the grid");

  DataTable trial{"bend_trial", {"n", "eps", "I"}, {}};
  json derivatives = json::array();
  std::optional<std::pair<int, double>> witness;
  double first_variation = 0.0;
  bool sign_change = false;
  bool probed = false;
  for (int n : params.cutoffs) {
    if (n < reach) {
      rep.warnings.push_back("n = " + std::to_string(n) + " skipped: phi_n is not 1 on supp j");
      continue;
    }
    const CutoffProfile prof(n);
    const int slices = intervals_for(4.0 * n, num.h_s);
    const TubeSpec spec =
        make_tube_spec(params.curvature, untwisted, params.section, 2.0 * n, slices);
    auto mesh = std::make_shared<const TubeMesh>(spec, gs.mesh, -2.0 * n, 2.0 * n, slices);
    const TubeForm form(mesh, num.p);
    const DiscreteField base =
        DiscreteField::tensor(*mesh, [&](double s) { return prof.value(s); }, gs.values);
    const DiscreteField pert =
        DiscreteField::tensor(*mesh, [&](double s) { return j.value(s); }, transverse);
    auto q1 = [&](double eps) {
      DiscreteField psi{base.values + eps * pert.values};
      const FormValue v = form.assemble(psi);
      return v.energy + v.potential - lambda1 * v.norm;
    };
    const double i0 = q1(0.0);
    trial.rows.push_back({static_cast<double>(n), 0.0, i0});
    if (!witness && i0 < 0.0) witness = std::pair{n, 0.0};
    std::vector<std::pair<double, double>> values;
    for (double e : eps_grid) {
      for (double eps : {-e, e}) {
        const double v = q1(eps);
        values.emplace_back(eps, v);
        trial.rows.push_back({static_cast<double>(n), eps, v});
        if (!witness && v < 0.0) witness = std::pair{n, eps};
      }
    }
    const double e1 = eps_grid.front();
    const double i_minus = values[0].second, i_plus = values[1].second;
    const double derivative = (i_plus - i_minus) / (2.0 * e1);
    derivatives.push_back({{"n", n}, {"I0", i0}, {"dI0", derivative}});
    if (!probed) {
      first_variation = derivative;
      sign_change = (i_plus - i0) * (i_minus - i0) < 0.0;
      probed = true;
    }
  }
  rep.quantities["first_variation"] = derivatives;
  if (witness) {
    rep.quantities["witness"] = {{"n", witness->first}, {"eps", witness->second}};
  } else {
    rep.quantities["witness"] = nullptr;
  }
  if (probed && assertive) {
    rep.add({"bend.first_variation", std::abs(first_variation) > 1e-8, std::abs(first_variation),
             1e-8, "|I'(0)| by symmetric difference at the smallest eps"});
    rep.add({"bend.sign_change", sign_change, first_variation, 0.0,
             "I(eps) - I(0) and I(-eps) - I(0) have opposite signs"});
    rep.add({"bend.witness", witness.has_value(), witness ? witness->second : 0.0, 0.0,
             "some (n, eps) with Q_1[psi_{n,eps}] < 0"});
  }
  rep.tables.push_back(std::move(trial));
  return rep;
}

ExperimentReport twisting_hardy_experiment(const TwistParams& params) {
  check_p(params.numerics.p);
  const Numerics& num = params.numerics;
  if (params.twist.dimension() != 3 || params.section.dimension() != 2) {
    throw InputError("the twisting experiment needs d = 3 (a planar cross-section)");
  }
  if (!params.control) {
    if (params.section.is_circular()) {
      throw InputError(
          "circular cross-section: the twist is invisible and no Hardy inequality is expected; "
          "set numerics.mode = control for the null test");
    }
    if (params.twist.is_untwisted()) {
      throw InputError("twist rate is zero; set numerics.mode = control for the null test");
    }
  }
  if (params.depth < 1) throw InputError("numerics.hardy_depth must be at least 1");
  const TubeSpec base =
      make_tube_spec(CurvatureProfile::straight(3), params.twist, params.section, 1.0, 1);

  ExperimentReport rep;
  rep.experiment = "twist-hardy";
  rep.inputs["section"] = params.section.describe();
  json twist = json::array();
  for (const auto& r : params.twist.rotations()) twist.push_back(r.rate.describe());
  rep.inputs["twist"] = twist;
  rep.inputs["numerics"] = numerics_json(num);
  rep.inputs["lengths"] = params.lengths;
  rep.inputs["hardy_length"] = params.hardy_length;
  rep.inputs["depth"] = params.depth;
  rep.inputs["random_fields"] = params.random_fields;
  rep.inputs["seed"] = params.seed;
  rep.inputs["mode"] = params.control ? "control" : "assert";

  Stopwatch clock;
  const GroundState gs = section_ground_state(params.section, num);
  rep.runtimes["ground_state"] = clock.seconds();
  const double lambda1 = gs.eigenvalue;
  rep.quantities["ground_state"] = ground_state_json(gs);

  // Twist condition r(s).
  std::vector<double> all_lengths = params.lengths;
  for (int jj = 1; jj <= params.depth; ++jj) all_lengths.push_back(params.hardy_length + jj);
  all_lengths = sorted_unique(all_lengths);
  const double reach = all_lengths.back();
  DataTable rtable{"twist_condition", {"s", "r"}, {}};
  double r_max = 0.0;
  for (double s = -reach; s <= reach + 1e-9; s += 0.25) {
    const double r = twist_condition_magnitude(base, gs, s);
    r_max = std::max(r_max, r);
    rtable.rows.push_back({s, r});
  }
  rep.quantities["r_max"] = r_max;
  if (params.control) {
    rep.add({"twist.condition_null", r_max <= 1e-6, r_max, 1e-6, "max_s r(s)"});
  } else {
    rep.add({"twist.condition", r_max > 1e-6, r_max, 1e-6, "max_s r(s)"});
  }
  rep.tables.push_back(std::move(rtable));

  // Neumann-segment gaps.
  std::map<double, double> c_of;
  std::map<double, double> tol_of;
  DataTable ctable{"segment_gaps", {"l", "lambda_N", "c"}, {}};
  if (num.p == 2.0) ctable.columns.push_back("oracle_lambda_N");
  double oracle_worst = 0.0;
  for (double l : all_lengths) {
    clock = Stopwatch();
    const int intervals = intervals_for(2.0 * l, num.h_s);
    const TubeEigenpair seg =
        neumann_segment_eigenvalue(base, gs.mesh, l, intervals, num.p, num.solver);
    c_of[l] = seg.eigenvalue - lambda1;
    tol_of[l] = seg.solver.tolerance;
    std::vector<double> row{l, seg.eigenvalue, c_of[l]};
    if (num.p == 2.0) {
      const double ref = neumann_segment_eigenvalue_p2(base, gs.mesh, l, intervals,
                                                       with_guess({}, seg.solver.field));
      oracle_worst = std::max(oracle_worst, relative(seg.eigenvalue, ref));
      row.push_back(ref);
    }
    rep.runtimes["segment_l" + fmt(l)] = clock.seconds();
    ctable.rows.push_back(std::move(row));
  }
  for (double l : sorted_unique(params.lengths)) {
    const double c = c_of[l];
    const double tol = tol_of[l];
    if (params.control) {
      rep.add({"twist.null_gap_l" + fmt(l), std::abs(c) <= tol, c, tol,
               "c_l within the solver tolerance"});
    } else {
      rep.add({"twist.gap_l" + fmt(l), c > params.margin_factor * tol, c,
               params.margin_factor * tol, "c_l above the margin"});
    }
  }
  bool nonnegative = true;
  for (const auto& [l, c] : c_of) nonnegative = nonnegative && c >= -tol_of[l];
  rep.add({"twist.nonnegative", nonnegative, std::min_element(c_of.begin(), c_of.end(),
                                                             [](auto& a, auto& b) {
                                                               return a.second < b.second;
                                                             })->second,
           0.0, "every c_l >= -tolerance"});
  if (num.p == 2.0) {
    rep.add({"twist.p2_oracle", oracle_worst <= 1e-6, oracle_worst, 1e-6,
             "relative difference of lambda_N to shift-and-invert iteration"});
  }
  rep.tables.push_back(std::move(ctable));

  // Hardy weight.
  HardyCertificate cert;
  cert.base_length = params.hardy_length;
  cert.depth = params.depth;
  for (int jj = 1; jj <= params.depth; ++jj) {
    const double l = params.hardy_length + jj;
    cert.lengths.push_back(l);
    cert.c.push_back(std::max(0.0, c_of[l]));
  }
  const double l0 = params.hardy_length;
  const double outer = l0 + params.depth + 2.0;
  const int n_samples = intervals_for(2.0 * outer, num.h_s);
  for (int i = 0; i <= n_samples; ++i) cert.samples.push_back(-outer + 2.0 * outer * i / n_samples);
  cert.weight = assemble_hardy_weight(cert.c, l0, params.depth, cert.samples);
  cert.positivity_margin = std::numeric_limits<double>::infinity();
  bool monotone = true;
  double rho_max = 0.0;
  for (std::size_t i = 0; i < cert.samples.size(); ++i) {
    const double s = cert.samples[i];
    rho_max = std::max(rho_max, cert.weight[i]);
    if (std::abs(s) <= l0 + 1.0) cert.positivity_margin = std::min(cert.positivity_margin, cert.weight[i]);
    if (i > 0 && s > 0.0 && cert.weight[i] > cert.weight[i - 1]) monotone = false;
    if (i > 0 && s <= 0.0 && cert.weight[i] < cert.weight[i - 1]) monotone = false;
  }
  const double rho_cap = 1.0 - std::ldexp(1.0, -params.depth);
  rep.quantities["hardy"] = {{"base_length", cert.base_length},
                             {"depth", cert.depth},
                             {"lengths", cert.lengths},
                             {"c", cert.c},
                             {"positivity_margin", cert.positivity_margin},
                             {"rho_max", rho_max}};
  rep.add({"twist.weight_cap", rho_max <= rho_cap + 1e-15, rho_max, rho_cap,
           "rho <= 1 - 2^-J"});
  rep.add({"twist.weight_monotone", monotone, 0.0, 0.0, "rho nonincreasing in |s|"});
  if (!params.control) {
    rep.add({"twist.weight_positive", cert.positivity_margin > 0.0, cert.positivity_margin, 0.0,
             "min rho on [-(l+1), l+1]"});
  }
  DataTable rho_table{"hardy_weight", {"s", "rho"}, {}};
  for (std::size_t i = 0; i < cert.samples.size(); ++i) {
    rho_table.rows.push_back({cert.samples[i], cert.weight[i]});
  }
  rep.tables.push_back(std::move(rho_table));

  // Direct Hardy test on compactly supported fields.
  clock = Stopwatch();
  const TubeSpec window_spec = make_tube_spec(CurvatureProfile::straight(3), params.twist,
                                              params.section, outer, n_samples);
  auto mesh = std::make_shared<const TubeMesh>(window_spec, gs.mesh, -outer, outer, n_samples);
  const std::vector<double> cvals = cert.c;
  const int depth = params.depth;
  const CellForm cells = build_tube_cells(
      *mesh, num.p,
      [cvals, l0, depth](double s, const Eigen::VectorXd&) { return hardy_weight(cvals, l0, depth, s); });
  std::mt19937 rng(params.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> centre(-(l0 + depth), l0 + depth);
  std::uniform_real_distribution<double> width(0.5, l0 + depth);
  DataTable fields{"hardy_fields", {"field", "Q", "N", "rho_term", "slack"}, {}};
  double worst = std::numeric_limits<double>::infinity();
  for (int f = 0; f < params.random_fields; ++f) {
    DiscreteField u = DiscreteField::zeros(*mesh);
    if (f % 2 == 0) {
      // Smooth longitudinal envelope times phi_1, slightly perturbed.
      const Profile envelope = Profile::bump(1.0, centre(rng), width(rng));
      u = DiscreteField::tensor(*mesh, [&](double s) { return envelope.value(s); }, gs.values);
      const double noise = 0.05 * (f % 4 == 0 ? 0.0 : 1.0);
      for (int k = 0; k < mesh->slice_count(); ++k) {
        for (int i = 0; i < gs.mesh->node_count(); ++i) {
          if (mesh->dof(k, i) >= 0) u.values(k, i) += noise * envelope.value(mesh->s(k)) * unit(rng);
        }
      }
    } else {
      for (int k = 0; k < mesh->slice_count(); ++k) {
        for (int i = 0; i < gs.mesh->node_count(); ++i) {
          if (mesh->dof(k, i) >= 0) u.values(k, i) = unit(rng);
        }
      }
    }
    const FormEvaluation ev = cells.evaluate(u.to_free(*mesh), 0.0, false);
    const double slack = (ev.energy - lambda1 * ev.mass - ev.potential) / ev.mass;
    worst = std::min(worst, slack);
    fields.rows.push_back({static_cast<double>(f), ev.energy, ev.mass, ev.potential, slack});
  }
  rep.runtimes["hardy_direct"] = clock.seconds();
  if (params.random_fields > 0) {
    rep.quantities["hardy_worst_slack"] = worst;
    rep.add({"twist.hardy_direct", worst >= -1e-8, worst, -1e-8,
             "min over fields of (Q - lambda_1 N - int rho |u|^p) / N"});
  }
  rep.tables.push_back(std::move(fields));

  // The sharpest field: the minimiser of (Q - int rho |u|^p) / N on the window.
  clock = Stopwatch();
  const CellForm shifted = build_tube_cells(
      *mesh, num.p, [cvals, l0, depth](double s, const Eigen::VectorXd&) {
        return -hardy_weight(cvals, l0, depth, s);
      });
  const SolverResult extremal = minimize_quotient(shifted, num.solver);
  rep.runtimes["hardy_extremal"] = clock.seconds();
  const double extremal_slack = extremal.eigenvalue - lambda1;
  const double extremal_floor = -(extremal.tolerance + lambda1 * num.solver.eigenvalue_tolerance);
  rep.quantities["hardy_extremal_slack"] = extremal_slack;
  rep.add({"twist.hardy_extremal", extremal.ok() && extremal_slack >= extremal_floor,
           extremal_slack, extremal_floor,
           "min_u (Q - int rho |u|^p) / N - lambda_1 on the window"});
  return rep;
}

const std::vector<ExperimentInfo>& experiment_catalogue() {
  static const std::vector<ExperimentInfo> catalogue{
      {"cross-section", "cross-section ground state",
       "first Dirichlet p-Laplacian eigenpair of omega, Poincare inequality and scaling law",
       {"geometry.shape", "numerics.p"}},
      {"straight", "straight tubes",
       "lambda_1(R x omega) = lambda_1(omega): truncated thresholds and cutoff sequence",
       {"geometry.shape", "numerics.p"}},
      {"criticality", "straight tubes: criticality",
       "any nonpositive nontrivial compactly supported V lowers the threshold",
       {"geometry.shape", "geometry.potential", "numerics.p"}},
      {"essential", "asymptotically straight tubes",
       "lambda_infinity = lambda_1(omega) when bending and twisting vanish at infinity",
       {"geometry.shape", "geometry.curvature", "numerics.p"}},
      {"bend", "bending",
       "bent tubes with circular cross-section have lambda_1 < lambda_1(omega)",
       {"geometry.shape", "geometry.curvature", "numerics.p"}},
      {"twist-hardy", "twisting",
       "twisted tubes with non-circular cross-section satisfy a Hardy inequality",
       {"geometry.shape", "geometry.twist", "numerics.p"}},
  };
  return catalogue;
}

}  // namespace pwave
