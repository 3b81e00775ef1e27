#pragma once

#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pwave/cross_section.hpp"
#include "pwave/eigensolver.hpp"
#include "pwave/geometry.hpp"
#include "pwave/profile.hpp"
#include "pwave/tube_form.hpp"

namespace pwave {

struct Verdict {
  std::string rule;  ///< named acceptance rule, e.g. "straight.gap"
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct DataTable {
  std::string name;  ///< file stem of the CSV
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void write_csv(std::ostream& out) const;
};

struct ExperimentReport {
  std::string experiment;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  nlohmann::ordered_json quantities = nlohmann::ordered_json::object();
  std::vector<Verdict> verdicts;
  std::vector<std::string> warnings;
  std::vector<DataTable> tables;
  /// Wall-clock seconds per phase; kept out of to_json so reports are reproducible.
  std::map<std::string, double> runtimes;

  bool passed() const;
  const Verdict* find(const std::string& rule) const;
  void add(Verdict v) { verdicts.push_back(std::move(v)); }
  nlohmann::ordered_json to_json(const std::string& timestamp) const;
};

/// Shared discretisation and solver knobs.
struct Numerics {
  double p = 2.0;
  double h = 0.05;    ///< cross-section mesh resolution
  double h_s = 0.1;   ///< longitudinal step
  SolverConfig solver;
  bool oracle = false;  ///< also run the p = 2 / 1D reference computations
};

struct CrossSectionParams {
  CrossSectionDescriptor section;
  Numerics numerics;
};

struct StraightParams {
  CrossSectionDescriptor section;
  Numerics numerics;
  std::vector<double> lengths{5.0, 10.0, 20.0};
  std::vector<int> cutoffs{4, 8, 16};
  double gap_fraction = 0.02;  ///< gap / lambda_1 allowed at the largest L
};

struct CriticalityParams {
  CrossSectionDescriptor section;
  Numerics numerics;
  Profile potential = Profile::bump(-0.5, 0.0, 1.0);  ///< V(s), constant across omega
  std::vector<double> lengths{10.0, 20.0, 30.0};
  double margin = 1e-3;  ///< required lambda_1^V - lambda_1 < -margin
};

struct EssentialParams {
  CurvatureProfile curvature;
  TwistProfile twist;
  CrossSectionDescriptor section;
  Numerics numerics;
  double tail_length = 20.0;
  std::vector<int> cutoffs{4, 8, 16};
  double bracket = 0.03;  ///< relative distance allowed on each side
};

struct BendingParams {
  CurvatureProfile curvature;
  CrossSectionDescriptor section;
  Numerics numerics;
  std::vector<double> lengths{10.0, 20.0, 30.0};
  /// Longitudinal perturbation profile j; defaults to a unit bump on the support of kappa.
  std::optional<Profile> perturbation;
  std::vector<int> cutoffs{4, 8, 16, 32};
  std::vector<double> eps_grid{0.01, 0.02, 0.05, 0.1, 0.2, 0.5};
  double margin_factor = 10.0;  ///< gap margin in units of the solver tolerance
  bool paired_straight = true;
};

struct TwistParams {
  TwistProfile twist;
  CrossSectionDescriptor section;
  Numerics numerics;
  std::vector<double> lengths{3.0, 5.0, 8.0};
  double hardy_length = 2.0;  ///< base l of the Hardy weight
  int depth = 6;              ///< J
  int random_fields = 20;
  unsigned seed = 1;
  double margin_factor = 10.0;
  /// Null test for circular sections or untwisted tubes: asserts c_l ~ 0.
  bool control = false;
};

ExperimentReport cross_section_experiment(const CrossSectionParams& params);
ExperimentReport straight_tube_experiment(const StraightParams& params);
ExperimentReport criticality_experiment(const CriticalityParams& params);
ExperimentReport essential_threshold_bounds(const EssentialParams& params);
ExperimentReport bending_experiment(const BendingParams& params);
ExperimentReport twisting_hardy_experiment(const TwistParams& params);

/// ((1 - a k) / (1 + a k)) lambda_1 with k the curvature sup over |s| > l.
double essential_lower_bound(const CurvatureProfile& curvature, double radius_bound,
                             double lambda1, double tail_length);

/// rho(s) = sum_{j=1}^J 2^{-j} min(c_{l+j}, 1) chi_{[-(l+j), l+j]}(s); c[j-1] = c_{l+j}.
double hardy_weight(const std::vector<double>& c, double l, int depth, double s);
std::vector<double> assemble_hardy_weight(const std::vector<double>& c, double l, int depth,
                                          const std::vector<double>& samples);

struct HardyCertificate {
  double base_length = 0.0;
  int depth = 0;
  std::vector<double> lengths;  ///< l + j
  std::vector<double> c;        ///< c_{l+j}
  std::vector<double> samples;
  std::vector<double> weight;
  double positivity_margin = 0.0;  ///< min rho over [-(l+1), l+1]
};

/// r(s) = int |f_mu d_mu phi_1|^p dt on the ground-state mesh.
double twist_condition_magnitude(const TubeSpec& spec, const GroundState& state, double s);

/// Upper bound of the Prop. 3.1 kind for R[psi_n] with n-dependent beta = 1 + 1/(n log n):
/// alpha^{p/2} * 2/n^{p-1} * C + (beta^{p/2} - 1) * lambda_1 * 4n.
double cutoff_bound_sequence(double p, int n, double lambda1, double c = 1.0);

struct ExperimentInfo {
  std::string name;
  std::string section;
  std::string verifies;
  std::vector<std::string> required_keys;
};

/// Stable, ordered catalogue of the six experiments.
const std::vector<ExperimentInfo>& experiment_catalogue();

}  // namespace pwave
