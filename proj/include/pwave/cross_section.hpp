#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "pwave/cell_form.hpp"
#include "pwave/eigensolver.hpp"

namespace pwave {

enum class Shape { Interval, Disk, Annulus, Rectangle, Ellipse, Polygon };

/// Shape of the cross-section omega in R^{d-1}, d - 1 in {1, 2}.
struct CrossSectionDescriptor {
  Shape shape = Shape::Interval;
  double length = 1.0;        ///< interval
  double center = 0.0;        ///< interval midpoint
  double radius = 1.0;        ///< disk, annulus (outer)
  double inner_radius = 0.0;  ///< annulus
  double width = 1.0;         ///< rectangle
  double height = 1.0;        ///< rectangle
  double semi_a = 1.0;        ///< ellipse
  double semi_b = 1.0;        ///< ellipse
  std::vector<Eigen::Vector2d> vertices;  ///< polygon, counter-clockwise

  static CrossSectionDescriptor interval(double length, double center = 0.0);
  static CrossSectionDescriptor disk(double radius);
  static CrossSectionDescriptor annulus(double inner_radius, double radius);
  static CrossSectionDescriptor rectangle(double width, double height);
  static CrossSectionDescriptor ellipse(double semi_a, double semi_b);
  static CrossSectionDescriptor polygon(std::vector<Eigen::Vector2d> vertices);

  /// Dimension of omega (d - 1).
  int dimension() const { return shape == Shape::Interval ? 1 : 2; }
  /// a = sup_{t in omega} |t| of the exact shape.
  double radius_bound() const;
  /// Lebesgue measure of the exact shape.
  double measure() const;
  /// Ball or spherical shell centred at the origin.
  bool is_circular() const;
  std::string name() const;
  std::string describe() const;
  /// Throws InputError on inconsistent parameters.
  void validate() const;
};

/// Conforming simplicial mesh of omega with piecewise-linear gradient data.
class CrossSectionMesh {
 public:
  CrossSectionMesh(int dimension, std::vector<double> coordinates, std::vector<int> elements,
                   std::vector<bool> boundary, CrossSectionDescriptor descriptor, double h);

  int dimension() const { return dim_; }
  int nodes_per_element() const { return dim_ + 1; }
  int node_count() const { return static_cast<int>(boundary_.size()); }
  int element_count() const { return static_cast<int>(volumes_.size()); }

  double coord(int node, int axis) const { return coords_[node * dim_ + axis]; }
  Eigen::VectorXd point(int node) const;
  int element_node(int e, int local) const { return elements_[e * (dim_ + 1) + local]; }
  bool is_boundary(int node) const { return boundary_[node]; }
  double volume(int e) const { return volumes_[e]; }
  /// d(phi_local)/d(t_axis) of the local hat function on element e.
  double gradient(int e, int axis, int local) const {
    return grads_[(e * dim_ + axis) * (dim_ + 1) + local];
  }
  double barycenter(int e, int axis) const { return bary_[e * dim_ + axis]; }
  Eigen::VectorXd barycenter(int e) const;

  double total_volume() const;
  double radius_bound() const { return radius_bound_; }
  const CrossSectionDescriptor& descriptor() const { return descriptor_; }
  double resolution() const { return h_; }

  /// Free (interior) node -> dof index, boundary node -> -1.
  const std::vector<int>& dof_map() const { return dof_map_; }
  int dof_count() const { return dof_count_; }

  /// Mesh of c * omega.
  CrossSectionMesh scaled(double c) const;

  /// Nodal vector (size node_count) from a free-dof vector.
  Eigen::VectorXd expand(const Eigen::VectorXd& free) const;
  Eigen::VectorXd restrict(const Eigen::VectorXd& nodal) const;

  /// ASCII export: header "nodes K elements E dim m", node lines, element
  /// lines, then the boundary node ids on one line.
  void write(std::ostream& out) const;

 private:
  int dim_;
  std::vector<double> coords_;
  std::vector<int> elements_;
  std::vector<bool> boundary_;
  std::vector<double> volumes_;
  std::vector<double> grads_;
  std::vector<double> bary_;
  std::vector<int> dof_map_;
  int dof_count_ = 0;
  double radius_bound_ = 0.0;
  CrossSectionDescriptor descriptor_;
  double h_ = 0.0;
};

CrossSectionMesh build_mesh(const CrossSectionDescriptor& descriptor, double h);

/// Ground state of the Dirichlet p-Laplacian on a mesh.
struct GroundState {
  std::shared_ptr<const CrossSectionMesh> mesh;
  double p = 2.0;
  double eigenvalue = 0.0;
  Eigen::VectorXd values;  ///< nodal, size node_count, zero on the boundary
  double normalization_residual = 0.0;
  SolverResult solver;
};

/// Quadrature form of int |grad phi|^p / int |phi|^p over the interior dofs.
CellForm cross_section_form(const CrossSectionMesh& mesh, double p);

GroundState solve_ground_state(std::shared_ptr<const CrossSectionMesh> mesh, double p,
                               const SolverConfig& config = {});

/// lambda_1(c omega) c^p / lambda_1(omega).
double scale_eigenvalue_check(const CrossSectionMesh& mesh, double p, double c,
                              const SolverConfig& config = {});

struct SymmetryMoments {
  Eigen::VectorXd mass;      ///< int |phi_1|^p t dt
  Eigen::VectorXd gradient;  ///< int |grad phi_1|^p t dt
};

SymmetryMoments symmetry_moments(const GroundState& state);

/// int |grad phi_1|^{p-2} grad(phi_1^2) dt.
Eigen::VectorXd circular_identity_residual(const GroundState& state);

/// Element-wise gradient of a nodal field.
Eigen::VectorXd element_gradient(const CrossSectionMesh& mesh, const Eigen::VectorXd& nodal, int e);
/// Value of a nodal field at the element barycenter.
double element_average(const CrossSectionMesh& mesh, const Eigen::VectorXd& nodal, int e);

}  // namespace pwave
