// Simplicial complexes over R^n for n in {2, 3}.
//
// Provides:
//  - construction from a vertex list and cells, with conformity validation
//  - the subsimplex lattice, superstars and facet orientation signs
//  - affine charts of simplices (reference <-> physical, form pullback)
//  - uniform refinement (red in 2D, Bey in 3D) and built-in generators
//  - boundary subcomplexes, representatives (F_S, T_S) and face connections
//
// Simplices of dimension below n carry increasing vertex ids and are numbered
// per dimension in lexicographic order of their vertex tuples. Cells keep the
// order in which they were supplied.

#ifndef FEEC_MESH_HPP
#define FEEC_MESH_HPP

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "feec/polyform.hpp"

namespace feec {

struct Simplex {
  int id = -1;
  int dim = 0;
  /// Strictly increasing vertex ids.
  std::vector<int> vertices;
};

/// Affine parametrisation x = origin + J xi of an m-simplex in R^n, with the
/// vertices taken in canonical order.
class SimplexChart {
public:
  SimplexChart() = default;
  /// Columns of `points` are the vertices in canonical order.
  explicit SimplexChart(const Eigen::MatrixXd& points);

  int dim() const { return static_cast<int>(J_.cols()); }
  int ambient_dim() const { return static_cast<int>(J_.rows()); }
  const Eigen::VectorXd& origin() const { return origin_; }
  const Eigen::MatrixXd& jacobian() const { return J_; }
  /// Left inverse of the Jacobian (m x n).
  const Eigen::MatrixXd& inverse() const { return Jinv_; }
  /// m-dimensional measure.
  double measure() const { return measure_; }
  /// Sign of det J for full-dimensional simplices, +1 otherwise.
  int orientation() const { return orientation_; }

  Eigen::VectorXd to_physical(std::span<const double> xi) const;
  Eigen::VectorXd to_reference(const Eigen::VectorXd& x) const;

  /// Physical form in offset coordinates z = x - origin, to reference coordinates.
  PolyForm pull_back(const PolyForm& physical) const;
  /// Reference form to a physical form in offset coordinates; requires m = n.
  PolyForm push_forward(const PolyForm& reference) const;

  /// Matrices acting on component vectors at a point.
  Eigen::MatrixXd pullback_components(int k) const { return pullback_matrix(J_, k); }
  Eigen::MatrixXd pushforward_components(int k) const { return pullback_matrix(Jinv_, k); }

private:
  Eigen::VectorXd origin_;
  Eigen::MatrixXd J_;
  Eigen::MatrixXd Jinv_;
  double measure_ = 0.0;
  int orientation_ = 1;
};

class SimplicialComplex {
public:
  SimplicialComplex() = default;
  /// Builds and validates the complex. `vertices` is n x (number of vertices).
  /// Throws std::invalid_argument on degenerate cells, non-manifold facets,
  /// hanging or duplicate vertices, unused vertices and stars that are not
  /// face-connected.
  SimplicialComplex(Eigen::MatrixXd vertices, std::vector<std::vector<int>> cells);

  int dimension() const { return n_; }
  int num_vertices() const { return static_cast<int>(vertices_.cols()); }
  int num_simplices(int d) const { return static_cast<int>(simplices_.at(d).size()); }
  int num_cells() const { return num_simplices(n_); }

  const Eigen::MatrixXd& vertices() const { return vertices_; }
  Eigen::VectorXd vertex(int v) const { return vertices_.col(v); }
  const Simplex& simplex(int d, int id) const { return simplices_.at(d).at(id); }
  const std::vector<Simplex>& simplices(int d) const { return simplices_.at(d); }
  /// Id of the simplex with the given increasing vertex ids, -1 if absent.
  int find(std::span<const int> vertices) const;

  /// Cell vertices in the order supplied at construction.
  const std::vector<int>& ordered_cell(int cell) const { return ordered_cells_[cell]; }
  /// The d-subsimplices of a cell, in lexicographic order of local positions.
  const std::vector<int>& cell_faces(int cell, int d) const { return cell_faces_[cell][d]; }
  /// Position of simplex (d, id) in cell_faces(cell, d), -1 if not a face.
  int local_index(int cell, int d, int id) const;

  /// Delta_d(S): the d-subsimplices of S in canonical order.
  std::vector<int> subsimplices(int dim_s, int id, int d) const;
  /// nabla_d(T, S): the d-simplices containing S, by increasing id.
  std::vector<int> superstar(int dim_s, int id, int d) const;
  /// Cells containing S, by increasing id.
  const std::vector<int>& cells_containing(int dim_s, int id) const { return cell_star_[dim_s][id]; }
  bool contains(int dim_big, int big, int dim_small, int small) const;

  /// o(F, T) for a facet F of the cell T.
  int orientation_sign(int facet, int cell) const;
  bool is_boundary_facet(int facet) const { return cell_star_[n_ - 1][facet].size() == 1; }
  std::vector<int> boundary_facets() const;

  const SimplexChart& cell_chart(int cell) const { return charts_[cell]; }
  SimplexChart chart(int d, int id) const;
  double diameter(int d, int id) const;
  double volume(int d, int id) const;
  Eigen::VectorXd centroid(int d, int id) const;
  double h_max() const;

private:
  void enumerate();
  void validate() const;

  int n_ = 0;
  Eigen::MatrixXd vertices_;
  std::vector<std::vector<int>> ordered_cells_;
  std::vector<std::vector<Simplex>> simplices_;
  std::vector<std::map<std::vector<int>, int>> lookup_;
  std::vector<std::vector<std::vector<int>>> cell_faces_;
  std::vector<std::vector<std::vector<int>>> cell_star_;
  std::vector<SimplexChart> charts_;
};

/// Shape measure: max over simplices of positive dimension of h^d / vol_d.
double shape_measure(const SimplicialComplex& mesh);
/// Minimal length of the edges at each vertex (diagnostic).
std::vector<double> vertex_diameters(const SimplicialComplex& mesh);

/// Every cell replaced by 2^n children; the children keep the vertex order
/// of their parent so that repeated refinement stays shape regular.
SimplicialComplex refine_uniform(const SimplicialComplex& mesh);

/// Closed subcomplex generated by a set of boundary facets.
class BoundarySubcomplex {
public:
  BoundarySubcomplex() = default;
  explicit BoundarySubcomplex(const SimplicialComplex& mesh);

  bool contains(int d, int id) const { return !member_.empty() && member_[d][id]; }
  bool empty() const;
  /// Member ids of the given dimension, increasing.
  std::vector<int> ids(int d) const;

private:
  friend BoundarySubcomplex boundary_subcomplex_from_facets(const SimplicialComplex&, const std::vector<int>&);
  std::vector<std::vector<char>> member_;
};

/// Subcomplex generated by the given facets; throws on interior facets.
BoundarySubcomplex boundary_subcomplex_from_facets(const SimplicialComplex& mesh, const std::vector<int>& facets);
/// Subcomplex generated by the boundary facets whose centroid satisfies the selector.
BoundarySubcomplex boundary_subcomplex(const SimplicialComplex& mesh,
                                       const std::function<bool(const Eigen::VectorXd&)>& selector);
/// Named selectors: "none", "all", "bottom" (last coordinate 0), "left" (x_1 = 0).
BoundarySubcomplex named_boundary(const SimplicialComplex& mesh, const std::string& name);
std::vector<std::string> boundary_selector_names();

/// Cells T_1, ..., T_m = T after T0, each containing S, consecutive ones
/// sharing a facet that contains S. Empty when T0 = T.
std::vector<int> face_connection(const SimplicialComplex& mesh, int t0, int t, int dim_s, int s);

/// Chosen F_S (facet) and T_S (cell) for every simplex.
struct Representatives {
  /// facet[d][id]; -1 for cells.
  std::vector<std::vector<int>> facet;
  /// cell[d][id].
  std::vector<std::vector<int>> cell;
};
Representatives choose_representatives(const SimplicialComplex& mesh, const BoundarySubcomplex& boundary);

/// Built-in meshes: unit_square_2, unit_cube_kuhn_6, square_with_hole_16,
/// reference_triangle, reference_tetrahedron, vertex_star_6.
SimplicialComplex make_mesh(const std::string& name);
std::vector<std::string> mesh_generator_names();
/// JSON file {"dimension": n, "vertices": [[...]], "cells": [[...]]}.
SimplicialComplex read_mesh_file(const std::string& path);

}  // namespace feec

#endif
