#include "pwave/config.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "pwave/errors.hpp"

namespace pwave {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\''))) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_number(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || trim(text.substr(used)) != "") {
    throw InputError(key + ": '" + text + "' is not a number");
  }
  return v;
}

// Keys each experiment reads besides experiment/output and the solver block.
const std::map<std::string, std::set<std::string>>& used_keys() {
  static const std::set<std::string> common{
      "geometry.shape", "geometry.length", "geometry.center", "geometry.radius",
      "geometry.inner_radius", "geometry.width", "geometry.height", "geometry.semi_a",
      "geometry.semi_b", "geometry.vertices", "numerics.p", "numerics.h", "numerics.h_s"};
  auto with = [&](std::initializer_list<const char*> extra) {
    std::set<std::string> s = common;
    for (const char* k : extra) s.insert(k);
    return s;
  };
  static const std::map<std::string, std::set<std::string>> table{
      {"cross-section", with({})},
      {"straight", with({"numerics.lengths", "numerics.cutoffs", "verdict.gap_fraction"})},
      {"criticality", with({"geometry.potential", "numerics.lengths", "verdict.margin"})},
      {"essential", with({"geometry.curvature", "geometry.curvature2", "geometry.twist",
                          "numerics.tail_l", "numerics.cutoffs", "verdict.bracket"})},
      {"bend", with({"geometry.curvature", "geometry.curvature2", "geometry.perturbation",
                     "numerics.lengths", "numerics.cutoffs", "numerics.eps_grid",
                     "numerics.paired_straight", "verdict.margin_factor"})},
      {"twist-hardy", with({"geometry.twist", "numerics.lengths", "numerics.hardy_l",
                            "numerics.hardy_depth", "numerics.random_fields", "numerics.seed",
                            "numerics.mode", "verdict.margin_factor"})},
  };
  return table;
}

Profile profile(const RunConfig& config, const std::string& key, const std::string& fallback) {
  const std::string text = config.text(key, fallback);
  try {
    return Profile::parse(text);
  } catch (const InputError& e) {
    throw InputError(key + ": " + e.what());
  }
}

CurvatureProfile curvature_from_config(const RunConfig& config, int dimension) {
  std::vector<Profile> components{profile(config, "geometry.curvature", "zero")};
  if (dimension == 3) {
    components.push_back(profile(config, "geometry.curvature2", "zero"));
  } else if (config.has("geometry.curvature2")) {
    throw InputError("geometry.curvature2 needs a planar cross-section (d = 3)");
  }
  return CurvatureProfile(dimension, std::move(components));
}

TwistProfile twist_from_config(const RunConfig& config, int dimension) {
  const Profile rate = profile(config, "geometry.twist", "zero");
  if (dimension != 3) {
    if (!rate.is_zero()) throw InputError("geometry.twist needs a planar cross-section (d = 3)");
    return TwistProfile::untwisted(dimension);
  }
  return rate.is_zero() ? TwistProfile::untwisted(3) : TwistProfile::planar(rate);
}

}  // namespace

const std::vector<ConfigKey>& config_schema() {
  static const std::vector<ConfigKey> schema{
      {"experiment", "", "cross-section | straight | criticality | essential | bend | twist-hardy"},
      {"output", "out", "output directory (overridden by --out)"},
      {"geometry.shape", "", "interval | disk | annulus | rectangle | ellipse | polygon"},
      {"geometry.length", "1", "interval length"},
      {"geometry.center", "0", "interval midpoint"},
      {"geometry.radius", "1", "disk radius, annulus outer radius"},
      {"geometry.inner_radius", "0.5", "annulus inner radius"},
      {"geometry.width", "1", "rectangle width"},
      {"geometry.height", "1", "rectangle height"},
      {"geometry.semi_a", "1", "ellipse semi-axis along t1"},
      {"geometry.semi_b", "1", "ellipse semi-axis along t2"},
      {"geometry.vertices", "", "polygon vertices 'x,y; x,y; ...' counter-clockwise"},
      {"geometry.curvature", "zero", "first curvature component kappa_1(s), a profile"},
      {"geometry.curvature2", "zero", "second curvature component (planar cross-sections)"},
      {"geometry.twist", "zero", "twist rate theta'(s) (planar cross-sections)"},
      {"geometry.potential", "bump amplitude=-0.5 center=0 width=1", "V(s), constant across omega"},
      {"geometry.perturbation", "", "bending probe profile j(s); default is a unit bump on supp kappa"},
      {"numerics.p", "", "exponent p in [1.1, 10] (required)"},
      {"numerics.h", "0.05", "cross-section mesh size"},
      {"numerics.h_s", "0.1", "longitudinal step"},
      {"numerics.lengths", "", "half-lengths L (or l for twist-hardy); default per experiment"},
      {"numerics.cutoffs", "", "cutoff indices n; default per experiment"},
      {"numerics.tail_l", "20", "tail length l of the essential lower bound"},
      {"numerics.eps_grid", "0.01,0.02,0.05,0.1,0.2,0.5", "bending probe amplitudes"},
      {"numerics.paired_straight", "true", "also solve the straight tube on the same mesh"},
      {"numerics.hardy_l", "2", "base length l of the Hardy weight"},
      {"numerics.hardy_depth", "6", "number J of nested segments in the Hardy weight"},
      {"numerics.random_fields", "20", "fields in the direct Hardy test"},
      {"numerics.seed", "1", "seed of the direct Hardy test"},
      {"numerics.mode", "assert", "twist-hardy: assert | control"},
      {"verdict.gap_fraction", "0.02", "straight: allowed gap / lambda_1 at the largest L"},
      {"verdict.margin", "0.001", "criticality: required lambda_1(omega) - lambda_1^V"},
      {"verdict.bracket", "0.03", "essential: allowed relative distance of each bound"},
      {"verdict.margin_factor", "10", "bend, twist-hardy: margin in solver tolerances"},
      {"solver.max_iterations", "20000", "iteration cap"},
      {"solver.quotient_tolerance", "1e-10", "relative quotient decrease per 100 iterations"},
      {"solver.gradient_tolerance", "1e-7", "relative preconditioned gradient norm"},
      {"solver.eigenvalue_tolerance", "1e-8", "declared relative eigenvalue accuracy"},
      {"solver.eps_start", "0.1", "initial regularisation"},
      {"solver.eps_factor", "0.25", "regularisation reduction factor"},
      {"solver.eps_floor", "1e-8", "final regularisation"},
      {"solver.continuation", "auto", "auto | on | off (auto: on for p < 2)"},
      {"solver.preconditioner_refresh", "10", "iterations between preconditioner refreshes"},
  };
  return schema;
}

RunConfig RunConfig::parse(std::istream& in, const std::string& origin) {
  std::set<std::string> known;
  for (const ConfigKey& k : config_schema()) known.insert(k.name);
  RunConfig config;
  std::vector<std::string> unknown;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError(origin + ":" + std::to_string(number) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = unquote(trim(line.substr(eq + 1)));
    if (!known.count(key)) {
      unknown.push_back(key);
      continue;
    }
    if (config.values_.count(key)) {
      throw InputError(origin + ":" + std::to_string(number) + ": duplicate key " + key);
    }
    config.values_[key] = value;
  }
  if (!unknown.empty()) {
    std::string list;
    for (const auto& k : unknown) list += (list.empty() ? "" : ", ") + k;
    throw InputError("unknown config keys: " + list);
  }
  if (!config.has("experiment")) throw InputError("missing required key: experiment");
  config.experiment_ = config.values_.at("experiment");
  if (!used_keys().count(config.experiment_)) {
    throw InputError("unknown experiment '" + config.experiment_ + "' (see `pwave list`)");
  }
  config.output_ = config.text("output", "out");
  return config;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read config file " + path.string());
  return parse(in, path.string());
}

std::string RunConfig::text(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double RunConfig::number(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : to_number(key, it->second);
}

double RunConfig::required_number(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw InputError("missing required key: " + key);
  return to_number(key, it->second);
}

int RunConfig::integer(const std::string& key, int fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const double v = to_number(key, it->second);
  if (v != std::floor(v)) throw InputError(key + ": '" + it->second + "' is not an integer");
  return static_cast<int>(v);
}

bool RunConfig::flag(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true" || it->second == "1" || it->second == "on") return true;
  if (it->second == "false" || it->second == "0" || it->second == "off") return false;
  throw InputError(key + ": expected true or false, got '" + it->second + "'");
}

std::vector<double> RunConfig::numbers(const std::string& key, std::vector<double> fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  for (const auto& item : split(it->second, ',')) out.push_back(to_number(key, item));
  if (out.empty()) throw InputError(key + ": empty list");
  return out;
}

std::vector<int> RunConfig::integers(const std::string& key, std::vector<int> fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<int> out;
  for (const auto& item : split(it->second, ',')) {
    const double v = to_number(key, item);
    if (v != std::floor(v)) throw InputError(key + ": '" + item + "' is not an integer");
    out.push_back(static_cast<int>(v));
  }
  if (out.empty()) throw InputError(key + ": empty list");
  return out;
}

CrossSectionDescriptor section_from_config(const RunConfig& c) {
  if (!c.has("geometry.shape")) throw InputError("missing required key: geometry.shape");
  const std::string shape = c.text("geometry.shape", "");
  CrossSectionDescriptor d;
  if (shape == "interval") {
    d = CrossSectionDescriptor::interval(c.number("geometry.length", 1.0),
                                         c.number("geometry.center", 0.0));
  } else if (shape == "disk") {
    d = CrossSectionDescriptor::disk(c.number("geometry.radius", 1.0));
  } else if (shape == "annulus") {
    d = CrossSectionDescriptor::annulus(c.number("geometry.inner_radius", 0.5),
                                        c.number("geometry.radius", 1.0));
  } else if (shape == "rectangle") {
    d = CrossSectionDescriptor::rectangle(c.number("geometry.width", 1.0),
                                          c.number("geometry.height", 1.0));
  } else if (shape == "ellipse") {
    d = CrossSectionDescriptor::ellipse(c.number("geometry.semi_a", 1.0),
                                        c.number("geometry.semi_b", 1.0));
  } else if (shape == "polygon") {
    if (!c.has("geometry.vertices")) throw InputError("missing required key: geometry.vertices");
    std::vector<Eigen::Vector2d> vertices;
    for (const auto& pair : split(c.text("geometry.vertices", ""), ';')) {
      const auto xy = split(pair, ',');
      if (xy.size() != 2) throw InputError("geometry.vertices: '" + pair + "' is not 'x,y'");
      vertices.emplace_back(to_number("geometry.vertices", xy[0]),
                            to_number("geometry.vertices", xy[1]));
    }
    d = CrossSectionDescriptor::polygon(std::move(vertices));
  } else {
    throw InputError("geometry.shape: unknown shape '" + shape + "'");
  }
  d.validate();
  return d;
}

Numerics numerics_from_config(const RunConfig& c, const RunOptions& options) {
  Numerics n;
  n.p = c.required_number("numerics.p");
  if (!(n.p >= kMinP && n.p <= kMaxP)) {
    std::ostringstream msg;
    msg << "numerics.p = " << n.p << " is outside the supported range [" << kMinP << ", "
        << kMaxP << "]";
    throw InputError(msg.str());
  }
  n.h = c.number("numerics.h", n.h);
  n.h_s = c.number("numerics.h_s", n.h_s);
  if (!(n.h > 0.0)) throw InputError("numerics.h must be positive");
  if (!(n.h_s > 0.0)) throw InputError("numerics.h_s must be positive");
  SolverConfig& s = n.solver;
  s.max_iterations = c.integer("solver.max_iterations", s.max_iterations);
  s.quotient_tolerance = c.number("solver.quotient_tolerance", s.quotient_tolerance);
  s.gradient_tolerance = c.number("solver.gradient_tolerance", s.gradient_tolerance);
  s.eigenvalue_tolerance = c.number("solver.eigenvalue_tolerance", s.eigenvalue_tolerance);
  s.eps_start = c.number("solver.eps_start", s.eps_start);
  s.eps_factor = c.number("solver.eps_factor", s.eps_factor);
  s.eps_floor = c.number("solver.eps_floor", s.eps_floor);
  s.preconditioner_refresh = c.integer("solver.preconditioner_refresh", s.preconditioner_refresh);
  const std::string cont = c.text("solver.continuation", "auto");
  if (cont == "on") {
    s.continuation = true;
  } else if (cont == "off") {
    s.continuation = false;
  } else if (cont != "auto") {
    throw InputError("solver.continuation: expected auto, on or off");
  }
  s.validate();
  n.oracle = options.oracle;
  return n;
}

ExperimentReport run_experiment(const RunConfig& c, const RunOptions& options) {
  const std::string& name = c.experiment();
  const Numerics numerics = numerics_from_config(c, options);
  const CrossSectionDescriptor section = section_from_config(c);
  const int d = section.dimension() + 1;

  ExperimentReport report;
  if (name == "cross-section") {
    report = cross_section_experiment({section, numerics});
  } else if (name == "straight") {
    StraightParams p{section, numerics};
    p.lengths = c.numbers("numerics.lengths", p.lengths);
    p.cutoffs = c.integers("numerics.cutoffs", p.cutoffs);
    p.gap_fraction = c.number("verdict.gap_fraction", p.gap_fraction);
    report = straight_tube_experiment(p);
  } else if (name == "criticality") {
    CriticalityParams p{section, numerics};
    p.potential = profile(c, "geometry.potential", "bump amplitude=-0.5 center=0 width=1");
    p.lengths = c.numbers("numerics.lengths", p.lengths);
    p.margin = c.number("verdict.margin", p.margin);
    report = criticality_experiment(p);
  } else if (name == "essential") {
    if (!c.has("geometry.curvature") && !c.has("geometry.twist")) {
      throw InputError("missing required key: geometry.curvature (or geometry.twist)");
    }
    EssentialParams p{curvature_from_config(c, d), twist_from_config(c, d), section, numerics};
    p.tail_length = c.number("numerics.tail_l", p.tail_length);
    p.cutoffs = c.integers("numerics.cutoffs", p.cutoffs);
    p.bracket = c.number("verdict.bracket", p.bracket);
    report = essential_threshold_bounds(p);
  } else if (name == "bend") {
    if (!c.has("geometry.curvature")) throw InputError("missing required key: geometry.curvature");
    BendingParams p;
    p.curvature = curvature_from_config(c, d);
    p.section = section;
    p.numerics = numerics;
    if (c.has("geometry.perturbation")) p.perturbation = profile(c, "geometry.perturbation", "");
    p.lengths = c.numbers("numerics.lengths", p.lengths);
    p.cutoffs = c.integers("numerics.cutoffs", p.cutoffs);
    p.eps_grid = c.numbers("numerics.eps_grid", p.eps_grid);
    p.paired_straight = c.flag("numerics.paired_straight", p.paired_straight);
    p.margin_factor = c.number("verdict.margin_factor", p.margin_factor);
    report = bending_experiment(p);
  } else {
    TwistParams p{twist_from_config(c, d), section, numerics};
    const std::string mode = c.text("numerics.mode", "assert");
    if (mode != "assert" && mode != "control") {
      throw InputError("numerics.mode: expected assert or control");
    }
    p.control = mode == "control";
    p.lengths = c.numbers("numerics.lengths", p.lengths);
    p.hardy_length = c.number("numerics.hardy_l", p.hardy_length);
    p.depth = c.integer("numerics.hardy_depth", p.depth);
    p.random_fields = c.integer("numerics.random_fields", p.random_fields);
    const int seed = c.integer("numerics.seed", static_cast<int>(p.seed));
    if (seed < 0) throw InputError("numerics.seed must be nonnegative");
    p.seed = static_cast<unsigned>(seed);
    p.margin_factor = c.number("verdict.margin_factor", p.margin_factor);
    report = twisting_hardy_experiment(p);
  }

  const auto& used = used_keys().at(name);
  for (const auto& [key, value] : c.values()) {
    if (key == "experiment" || key == "output" || key.rfind("solver.", 0) == 0) continue;
    if (!used.count(key)) report.warnings.push_back("key " + key + " is ignored by " + name);
  }
  nlohmann::ordered_json raw = nlohmann::ordered_json::object();
  for (const auto& [key, value] : c.values()) raw[key] = value;
  report.inputs["config"] = raw;
  return report;
}

void print_catalogue(std::ostream& out) {
  for (const ExperimentInfo& info : experiment_catalogue()) {
    out << std::left << std::setw(14) << info.name << " [" << info.section << "]\n"
        << "    verifies: " << info.verifies << "\n"
        << "    requires: ";
    for (std::size_t i = 0; i < info.required_keys.size(); ++i) {
      out << (i ? ", " : "") << info.required_keys[i];
    }
    out << "\n";
  }
}

}  // namespace pwave
