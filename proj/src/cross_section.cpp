#include "pwave/cross_section.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "pwave/errors.hpp"

namespace pwave {
namespace {

constexpr double kPi = std::numbers::pi;

struct MeshBuilder {
  std::vector<double> coords;
  std::vector<int> elements;
  std::vector<bool> boundary;

  int add_node(double x, double y, bool on_boundary) {
    coords.push_back(x);
    coords.push_back(y);
    boundary.push_back(on_boundary);
    return static_cast<int>(boundary.size()) - 1;
  }

  void add_triangle(int a, int b, int c) {
    // Store counter-clockwise.
    const double ax = coords[2 * a], ay = coords[2 * a + 1];
    const double cross = (coords[2 * b] - ax) * (coords[2 * c + 1] - ay) -
                         (coords[2 * b + 1] - ay) * (coords[2 * c] - ax);
    if (cross < 0.0) std::swap(b, c);
    elements.insert(elements.end(), {a, b, c});
  }
};

int count_for(double extent, double h) {
  return std::max(1, static_cast<int>(std::ceil(extent / h - 1e-9)));
}

CrossSectionMesh interval_mesh(const CrossSectionDescriptor& d, double h) {
  const int n = count_for(d.length, h);
  std::vector<double> coords(n + 1);
  std::vector<bool> boundary(n + 1, false);
  const double left = d.center - 0.5 * d.length;
  for (int i = 0; i <= n; ++i) coords[i] = left + d.length * i / n;
  boundary.front() = boundary.back() = true;
  std::vector<int> elements;
  for (int i = 0; i < n; ++i) elements.insert(elements.end(), {i, i + 1});
  return CrossSectionMesh(1, std::move(coords), std::move(elements), std::move(boundary), d, h);
}

// Polar rings r_0 < ... < r_N with the same number of nodes on every ring and
// alternate rings rotated by half an angular step. Every triangle is then
// isosceles about a radial ray, so rotationally invariant fields have exactly
// radial element gradients.
MeshBuilder polar_rings(double inner, double outer, double h) {
  const int rings = count_for(outer - inner, h);
  const int sectors = std::max(8, count_for(2.0 * kPi * outer, h));
  const double dtheta = 2.0 * kPi / sectors;
  MeshBuilder mb;
  std::vector<std::vector<int>> ring_nodes;
  int center = -1;
  const int first = inner > 0.0 ? 0 : 1;
  if (inner == 0.0) center = mb.add_node(0.0, 0.0, false);
  for (int k = first; k <= rings; ++k) {
    const double r = inner + (outer - inner) * k / rings;
    const double offset = 0.5 * (k % 2);
    const bool on_boundary = k == rings || (inner > 0.0 && k == 0);
    std::vector<int> ids(sectors);
    for (int j = 0; j < sectors; ++j) {
      const double theta = (j + offset) * dtheta;
      ids[j] = mb.add_node(r * std::cos(theta), r * std::sin(theta), on_boundary);
    }
    ring_nodes.push_back(std::move(ids));
  }
  if (center >= 0) {
    const auto& ring = ring_nodes.front();
    for (int j = 0; j < sectors; ++j) mb.add_triangle(center, ring[j], ring[(j + 1) % sectors]);
  }
  for (std::size_t k = 0; k + 1 < ring_nodes.size(); ++k) {
    const auto& a = ring_nodes[k];
    const auto& b = ring_nodes[k + 1];
    const int ring_index = static_cast<int>(k) + first;
    // Outer node sitting angularly midway between a[j] and a[j+1].
    const int shift = (ring_index % 2 == 0) ? 0 : 1;
    for (int j = 0; j < sectors; ++j) {
      const int a0 = a[j], a1 = a[(j + 1) % sectors];
      const int m0 = b[(j + shift) % sectors], m1 = b[(j + shift + 1) % sectors];
      mb.add_triangle(a0, a1, m0);
      mb.add_triangle(a1, m1, m0);
    }
  }
  return mb;
}

CrossSectionMesh rectangle_mesh(const CrossSectionDescriptor& d, double h) {
  const int nx = count_for(d.width, h);
  const int ny = count_for(d.height, h);
  MeshBuilder mb;
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const bool edge = i == 0 || j == 0 || i == nx || j == ny;
      mb.add_node(-0.5 * d.width + d.width * i / nx, -0.5 * d.height + d.height * j / ny, edge);
    }
  }
  auto id = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      mb.add_triangle(id(i, j), id(i + 1, j), id(i + 1, j + 1));
      mb.add_triangle(id(i, j), id(i + 1, j + 1), id(i, j + 1));
    }
  }
  return CrossSectionMesh(2, std::move(mb.coords), std::move(mb.elements), std::move(mb.boundary),
                          d, h);
}

double signed_area(const std::vector<Eigen::Vector2d>& v) {
  double area = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& p = v[i];
    const auto& q = v[(i + 1) % v.size()];
    area += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * area;
}

Eigen::Vector2d area_centroid(const std::vector<Eigen::Vector2d>& v) {
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  const double a = signed_area(v);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& p = v[i];
    const auto& q = v[(i + 1) % v.size()];
    c += (p + q) * (p.x() * q.y() - q.x() * p.y());
  }
  return c / (6.0 * a);
}

// Fan of uniformly subdivided sector triangles around the area centroid; the
// polygon must be star-shaped with respect to it.
CrossSectionMesh polygon_mesh(const CrossSectionDescriptor& d, double h) {
  std::vector<Eigen::Vector2d> v = d.vertices;
  if (signed_area(v) < 0.0) std::reverse(v.begin(), v.end());
  const Eigen::Vector2d c = area_centroid(v);
  const std::size_t nv = v.size();
  double longest = 0.0;
  for (std::size_t i = 0; i < nv; ++i) {
    const Eigen::Vector2d& p = v[i];
    const Eigen::Vector2d& q = v[(i + 1) % nv];
    const double cross = (p - c).x() * (q - c).y() - (p - c).y() * (q - c).x();
    if (!(cross > 1e-12 * (p - c).norm() * (q - c).norm())) {
      throw InputError("polygon is not star-shaped about its centroid; only such polygons are meshed");
    }
    longest = std::max({longest, (p - c).norm(), (q - p).norm()});
  }
  const int n = count_for(longest, h);
  MeshBuilder mb;
  std::map<std::pair<long long, long long>, int> index;
  const double scale = 1e9 / std::max(1.0, longest);
  auto node = [&](const Eigen::Vector2d& x, bool on_boundary) {
    const std::pair<long long, long long> key{std::llround(x.x() * scale), std::llround(x.y() * scale)};
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    const int id = mb.add_node(x.x(), x.y(), on_boundary);
    index.emplace(key, id);
    return id;
  };
  for (std::size_t s = 0; s < nv; ++s) {
    const Eigen::Vector2d e1 = v[s] - c;
    const Eigen::Vector2d e2 = v[(s + 1) % nv] - c;
    std::vector<std::vector<int>> grid(n + 1);
    for (int a = 0; a <= n; ++a) {
      for (int b = 0; a + b <= n; ++b) {
        const Eigen::Vector2d x = c + (double(a) / n) * e1 + (double(b) / n) * e2;
        grid[a].push_back(node(x, a + b == n));
      }
    }
    for (int a = 0; a < n; ++a) {
      for (int b = 0; a + b < n; ++b) {
        mb.add_triangle(grid[a][b], grid[a + 1][b], grid[a][b + 1]);
        if (a + b + 1 < n) mb.add_triangle(grid[a + 1][b], grid[a + 1][b + 1], grid[a][b + 1]);
      }
    }
  }
  return CrossSectionMesh(2, std::move(mb.coords), std::move(mb.elements), std::move(mb.boundary),
                          d, h);
}

}  // namespace

CrossSectionDescriptor CrossSectionDescriptor::interval(double length, double center) {
  CrossSectionDescriptor d;
  d.shape = Shape::Interval;
  d.length = length;
  d.center = center;
  d.validate();
  return d;
}

CrossSectionDescriptor CrossSectionDescriptor::disk(double radius) {
  CrossSectionDescriptor d;
  d.shape = Shape::Disk;
  d.radius = radius;
  d.validate();
  return d;
}

CrossSectionDescriptor CrossSectionDescriptor::annulus(double inner_radius, double radius) {
  CrossSectionDescriptor d;
  d.shape = Shape::Annulus;
  d.inner_radius = inner_radius;
  d.radius = radius;
  d.validate();
  return d;
}

CrossSectionDescriptor CrossSectionDescriptor::rectangle(double width, double height) {
  CrossSectionDescriptor d;
  d.shape = Shape::Rectangle;
  d.width = width;
  d.height = height;
  d.validate();
  return d;
}

CrossSectionDescriptor CrossSectionDescriptor::ellipse(double semi_a, double semi_b) {
  CrossSectionDescriptor d;
  d.shape = Shape::Ellipse;
  d.semi_a = semi_a;
  d.semi_b = semi_b;
  d.validate();
  return d;
}

CrossSectionDescriptor CrossSectionDescriptor::polygon(std::vector<Eigen::Vector2d> vertices) {
  CrossSectionDescriptor d;
  d.shape = Shape::Polygon;
  d.vertices = std::move(vertices);
  d.validate();
  return d;
}

double CrossSectionDescriptor::radius_bound() const {
  switch (shape) {
    case Shape::Interval:
      return std::abs(center) + 0.5 * length;
    case Shape::Disk:
    case Shape::Annulus:
      return radius;
    case Shape::Rectangle:
      return std::hypot(0.5 * width, 0.5 * height);
    case Shape::Ellipse:
      return std::max(semi_a, semi_b);
    case Shape::Polygon: {
      double r = 0.0;
      for (const auto& v : vertices) r = std::max(r, v.norm());
      return r;
    }
  }
  return 0.0;
}

double CrossSectionDescriptor::measure() const {
  switch (shape) {
    case Shape::Interval:
      return length;
    case Shape::Disk:
      return kPi * radius * radius;
    case Shape::Annulus:
      return kPi * (radius * radius - inner_radius * inner_radius);
    case Shape::Rectangle:
      return width * height;
    case Shape::Ellipse:
      return kPi * semi_a * semi_b;
    case Shape::Polygon:
      return std::abs(signed_area(vertices));
  }
  return 0.0;
}

bool CrossSectionDescriptor::is_circular() const {
  return shape == Shape::Disk || shape == Shape::Annulus ||
         (shape == Shape::Ellipse && semi_a == semi_b);
}

std::string CrossSectionDescriptor::name() const {
  switch (shape) {
    case Shape::Interval: return "interval";
    case Shape::Disk: return "disk";
    case Shape::Annulus: return "annulus";
    case Shape::Rectangle: return "rectangle";
    case Shape::Ellipse: return "ellipse";
    case Shape::Polygon: return "polygon";
  }
  return "unknown";
}

std::string CrossSectionDescriptor::describe() const {
  std::ostringstream out;
  out.precision(17);
  out << name();
  switch (shape) {
    case Shape::Interval:
      out << " length=" << length << " center=" << center;
      break;
    case Shape::Disk:
      out << " radius=" << radius;
      break;
    case Shape::Annulus:
      out << " inner_radius=" << inner_radius << " radius=" << radius;
      break;
    case Shape::Rectangle:
      out << " width=" << width << " height=" << height;
      break;
    case Shape::Ellipse:
      out << " semi_a=" << semi_a << " semi_b=" << semi_b;
      break;
    case Shape::Polygon:
      out << " vertices=";
      for (std::size_t i = 0; i < vertices.size(); ++i) {
        out << (i ? ";" : "") << vertices[i].x() << "," << vertices[i].y();
      }
      break;
  }
  return out.str();
}

void CrossSectionDescriptor::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InputError(std::string(what) + " must be positive");
  };
  switch (shape) {
    case Shape::Interval:
      positive(length, "interval length");
      if (!std::isfinite(center)) throw InputError("interval center must be finite");
      break;
    case Shape::Disk:
      positive(radius, "disk radius");
      break;
    case Shape::Annulus:
      positive(inner_radius, "annulus inner radius");
      positive(radius, "annulus radius");
      if (inner_radius >= radius) {
        throw InputError("annulus needs inner_radius < radius");
      }
      break;
    case Shape::Rectangle:
      positive(width, "rectangle width");
      positive(height, "rectangle height");
      break;
    case Shape::Ellipse:
      positive(semi_a, "ellipse semi_a");
      positive(semi_b, "ellipse semi_b");
      break;
    case Shape::Polygon: {
      if (vertices.size() < 3) throw InputError("polygon needs at least 3 vertices");
      double extent = 0.0;
      for (const auto& v : vertices) extent = std::max(extent, v.norm());
      if (!(std::abs(signed_area(vertices)) > 1e-12 * std::max(1.0, extent * extent))) {
        throw InputError("polygon is degenerate (zero area)");
      }
      break;
    }
  }
}

CrossSectionMesh::CrossSectionMesh(int dimension, std::vector<double> coordinates,
                                   std::vector<int> elements, std::vector<bool> boundary,
                                   CrossSectionDescriptor descriptor, double h)
    : dim_(dimension),
      coords_(std::move(coordinates)),
      elements_(std::move(elements)),
      boundary_(std::move(boundary)),
      descriptor_(std::move(descriptor)),
      h_(h) {
  if (dim_ != 1 && dim_ != 2) throw InputError("cross-section meshes are 1D or 2D");
  const int k = dim_ + 1;
  const int ne = static_cast<int>(elements_.size()) / k;
  volumes_.resize(ne);
  grads_.assign(static_cast<std::size_t>(ne) * dim_ * k, 0.0);
  bary_.assign(static_cast<std::size_t>(ne) * dim_, 0.0);
  for (int e = 0; e < ne; ++e) {
    const int* nodes = &elements_[e * k];
    for (int a = 0; a < dim_; ++a) {
      for (int i = 0; i < k; ++i) bary_[e * dim_ + a] += coords_[nodes[i] * dim_ + a] / k;
    }
    if (dim_ == 1) {
      const double len = coords_[nodes[1]] - coords_[nodes[0]];
      volumes_[e] = std::abs(len);
      grads_[e * 2 + 0] = -1.0 / len;
      grads_[e * 2 + 1] = 1.0 / len;
    } else {
      Eigen::Matrix2d j;
      for (int a = 0; a < 2; ++a) {
        j(a, 0) = coords_[nodes[1] * 2 + a] - coords_[nodes[0] * 2 + a];
        j(a, 1) = coords_[nodes[2] * 2 + a] - coords_[nodes[0] * 2 + a];
      }
      const double det = j.determinant();
      volumes_[e] = 0.5 * std::abs(det);
      // Rows of J^{-1} are the gradients of the hats at nodes 1 and 2.
      const Eigen::Matrix2d inv = j.inverse();
      for (int a = 0; a < 2; ++a) {
        const double g1 = inv(0, a), g2 = inv(1, a);
        grads_[(e * 2 + a) * 3 + 0] = -g1 - g2;
        grads_[(e * 2 + a) * 3 + 1] = g1;
        grads_[(e * 2 + a) * 3 + 2] = g2;
      }
    }
    if (!(volumes_[e] > 0.0)) throw InputError("mesh element with non-positive volume");
  }
  dof_map_.assign(boundary_.size(), -1);
  for (std::size_t i = 0; i < boundary_.size(); ++i) {
    if (!boundary_[i]) dof_map_[i] = dof_count_++;
    radius_bound_ = std::max(radius_bound_, point(static_cast<int>(i)).norm());
  }
}

Eigen::VectorXd CrossSectionMesh::point(int node) const {
  Eigen::VectorXd x(dim_);
  for (int a = 0; a < dim_; ++a) x[a] = coord(node, a);
  return x;
}

Eigen::VectorXd CrossSectionMesh::barycenter(int e) const {
  Eigen::VectorXd x(dim_);
  for (int a = 0; a < dim_; ++a) x[a] = barycenter(e, a);
  return x;
}

double CrossSectionMesh::total_volume() const {
  double total = 0.0;
  for (double v : volumes_) total += v;
  return total;
}

CrossSectionMesh CrossSectionMesh::scaled(double c) const {
  if (!(c > 0.0)) throw InputError("scale factor must be positive");
  std::vector<double> coords = coords_;
  for (double& x : coords) x *= c;
  CrossSectionDescriptor d = descriptor_;
  d.length *= c;
  d.center *= c;
  d.radius *= c;
  d.inner_radius *= c;
  d.width *= c;
  d.height *= c;
  d.semi_a *= c;
  d.semi_b *= c;
  for (auto& v : d.vertices) v *= c;
  return CrossSectionMesh(dim_, std::move(coords), elements_, boundary_, std::move(d), h_ * c);
}

Eigen::VectorXd CrossSectionMesh::expand(const Eigen::VectorXd& free) const {
  if (free.size() != dof_count_) throw InputError("free vector has the wrong size");
  Eigen::VectorXd nodal = Eigen::VectorXd::Zero(node_count());
  for (int i = 0; i < node_count(); ++i) {
    if (dof_map_[i] >= 0) nodal[i] = free[dof_map_[i]];
  }
  return nodal;
}

Eigen::VectorXd CrossSectionMesh::restrict(const Eigen::VectorXd& nodal) const {
  if (nodal.size() != node_count()) throw InputError("nodal vector has the wrong size");
  Eigen::VectorXd free(dof_count_);
  for (int i = 0; i < node_count(); ++i) {
    if (dof_map_[i] >= 0) free[dof_map_[i]] = nodal[i];
  }
  return free;
}

void CrossSectionMesh::write(std::ostream& out) const {
  const auto precision = out.precision(17);
  out << "nodes " << node_count() << " elements " << element_count() << " dim " << dim_ << "\n";
  for (int i = 0; i < node_count(); ++i) {
    out << i;
    for (int a = 0; a < dim_; ++a) out << " " << coord(i, a);
    out << "\n";
  }
  for (int e = 0; e < element_count(); ++e) {
    out << e;
    for (int l = 0; l <= dim_; ++l) out << " " << element_node(e, l);
    out << "\n";
  }
  bool first = true;
  for (int i = 0; i < node_count(); ++i) {
    if (!boundary_[i]) continue;
    out << (first ? "" : " ") << i;
    first = false;
  }
  out << "\n";
  out.precision(precision);
}

CrossSectionMesh build_mesh(const CrossSectionDescriptor& descriptor, double h) {
  descriptor.validate();
  if (!(h > 0.0) || !std::isfinite(h)) throw InputError("mesh resolution h must be positive");
  switch (descriptor.shape) {
    case Shape::Interval:
      return interval_mesh(descriptor, h);
    case Shape::Disk: {
      MeshBuilder mb = polar_rings(0.0, descriptor.radius, h);
      return CrossSectionMesh(2, std::move(mb.coords), std::move(mb.elements),
                              std::move(mb.boundary), descriptor, h);
    }
    case Shape::Annulus: {
      MeshBuilder mb = polar_rings(descriptor.inner_radius, descriptor.radius, h);
      return CrossSectionMesh(2, std::move(mb.coords), std::move(mb.elements),
                              std::move(mb.boundary), descriptor, h);
    }
    case Shape::Ellipse: {
      const double r = std::max(descriptor.semi_a, descriptor.semi_b);
      MeshBuilder mb = polar_rings(0.0, 1.0, h / r);
      for (std::size_t i = 0; i < mb.boundary.size(); ++i) {
        mb.coords[2 * i] *= descriptor.semi_a;
        mb.coords[2 * i + 1] *= descriptor.semi_b;
      }
      return CrossSectionMesh(2, std::move(mb.coords), std::move(mb.elements),
                              std::move(mb.boundary), descriptor, h);
    }
    case Shape::Rectangle:
      return rectangle_mesh(descriptor, h);
    case Shape::Polygon:
      return polygon_mesh(descriptor, h);
  }
  throw InputError("unknown cross-section shape");
}

CellForm cross_section_form(const CrossSectionMesh& mesh, double p) {
  const int m = mesh.dimension();
  const int k = m + 1;
  CellForm form(mesh.dof_count(), k, m, p);
  const auto& map = mesh.dof_map();
  int dofs[3];
  double b[6];
  double a[3];
  for (int e = 0; e < mesh.element_count(); ++e) {
    for (int i = 0; i < k; ++i) {
      dofs[i] = map[mesh.element_node(e, i)];
      a[i] = 1.0 / k;
      for (int r = 0; r < m; ++r) b[r * k + i] = mesh.gradient(e, r, i);
    }
    form.add_cell(dofs, b, a, mesh.volume(e));
  }
  return form;
}

GroundState solve_ground_state(std::shared_ptr<const CrossSectionMesh> mesh, double p,
                               const SolverConfig& config) {
  if (!mesh) throw InputError("ground state needs a mesh");
  if (!(p > 1.0)) throw InputError("p must exceed 1");
  if (mesh->dof_count() < 1) throw InputError("mesh has no interior node");
  const CellForm form = cross_section_form(*mesh, p);
  SolverResult result = minimize_quotient(form, config);
  if (!result.ok()) {
    throw ConvergenceError("ground-state solve did not converge within " +
                               std::to_string(config.max_iterations) + " iterations",
                           result.eigenvalue, result.gradient_norm);
  }
  if (result.field.sum() < 0.0) result.field = -result.field;
  GroundState state;
  state.mesh = mesh;
  state.p = p;
  state.eigenvalue = result.eigenvalue;
  state.values = mesh->expand(result.field);
  const double mass = form.evaluate(result.field, 0.0, false).mass;
  state.normalization_residual = std::abs(std::pow(mass, 1.0 / p) - 1.0);
  state.solver = std::move(result);
  return state;
}

double scale_eigenvalue_check(const CrossSectionMesh& mesh, double p, double c,
                              const SolverConfig& config) {
  if (!(c > 0.0)) throw InputError("scale factor must be positive");
  if (c == 1.0) return 1.0;
  auto base = std::make_shared<const CrossSectionMesh>(mesh);
  auto scaled = std::make_shared<const CrossSectionMesh>(mesh.scaled(c));
  const double l1 = solve_ground_state(base, p, config).eigenvalue;
  const double lc = solve_ground_state(scaled, p, config).eigenvalue;
  return lc * std::pow(c, p) / l1;
}

Eigen::VectorXd element_gradient(const CrossSectionMesh& mesh, const Eigen::VectorXd& nodal, int e) {
  const int m = mesh.dimension();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(m);
  for (int a = 0; a < m; ++a) {
    for (int i = 0; i <= m; ++i) g[a] += mesh.gradient(e, a, i) * nodal[mesh.element_node(e, i)];
  }
  return g;
}

double element_average(const CrossSectionMesh& mesh, const Eigen::VectorXd& nodal, int e) {
  const int k = mesh.nodes_per_element();
  double v = 0.0;
  for (int i = 0; i < k; ++i) v += nodal[mesh.element_node(e, i)];
  return v / k;
}

SymmetryMoments symmetry_moments(const GroundState& state) {
  const CrossSectionMesh& mesh = *state.mesh;
  const int m = mesh.dimension();
  SymmetryMoments out{Eigen::VectorXd::Zero(m), Eigen::VectorXd::Zero(m)};
  for (int e = 0; e < mesh.element_count(); ++e) {
    const double v = std::pow(std::abs(element_average(mesh, state.values, e)), state.p);
    const double g = std::pow(element_gradient(mesh, state.values, e).norm(), state.p);
    const Eigen::VectorXd t = mesh.barycenter(e);
    out.mass += v * mesh.volume(e) * t;
    out.gradient += g * mesh.volume(e) * t;
  }
  return out;
}

Eigen::VectorXd circular_identity_residual(const GroundState& state) {
  const CrossSectionMesh& mesh = *state.mesh;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.dimension());
  for (int e = 0; e < mesh.element_count(); ++e) {
    const Eigen::VectorXd g = element_gradient(mesh, state.values, e);
    const double norm = g.norm();
    if (norm == 0.0) continue;
    // grad(phi^2) = 2 phi grad(phi); phi is linear so its element mean is the barycentric value.
    const double weight = std::pow(norm, state.p - 2.0);
    out += weight * 2.0 * element_average(mesh, state.values, e) * mesh.volume(e) * g;
  }
  return out;
}

}  // namespace pwave
