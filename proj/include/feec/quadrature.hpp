// Numerical integration on simplices and norms of piecewise forms.
//
// Provides:
//  - collapsed Gauss-Jacobi rules on the reference simplex, checked for
//    exactness when built, and a bump-weighted rule on the unit ball
//  - integrals of forms over simplices and L2 inner products in the
//    Euclidean coefficient metric of the ambient coordinates
//  - the CellFunction interface and L^p norms / integer Sobolev seminorms

#ifndef FEEC_QUADRATURE_HPP
#define FEEC_QUADRATURE_HPP

#include <limits>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "feec/field.hpp"
#include "feec/mesh.hpp"
#include "feec/polyform.hpp"

namespace feec {

inline constexpr int kMaxQuadratureOrder = 14;
/// Every simplex rule reproduces all monomials up to its order within this absolute error.
inline constexpr double kQuadratureExactnessTol = 1e-13;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct QuadratureRule {
  int dim = 0;
  int order = 0;
  /// Reference coordinates of the nodes, one column per node.
  Eigen::MatrixXd points;
  /// Weights summing to 1.
  Eigen::VectorXd weights;

  int size() const { return static_cast<int>(weights.size()); }
  /// Barycentric coordinates (lambda_0, ..., lambda_dim) of node q.
  Eigen::VectorXd barycentric(int q) const;
};

/// Rule on the reference simplex of dimension 0..3 exact for total degree
/// `order`. Throws std::invalid_argument for orders above kMaxQuadratureOrder.
const QuadratureRule& simplex_rule(int dim, int order);
/// Rule on the unit ball of R^dim (dim 2 or 3) for the weight (1 - |z|^2)^4,
/// normalised to total mass 1. Points are columns.
const QuadratureRule& ball_rule(int dim);

/// Exact integral of a top-degree form over its reference simplex, in the
/// orientation of the reference coordinates.
double integrate_reference(const PolyForm& top);
/// Integral of a field k-form over a k-simplex described by its chart, in
/// the chart orientation.
double integrate_form(const FieldSample& field, const SimplexChart& chart, int order, const FieldHint& hint = {});
/// int_T <a, b> dx for reference-coordinate forms on the full-dimensional
/// simplex T, in the Euclidean metric of the ambient components.
double inner_product_l2(const PolyForm& a, const PolyForm& b, const SimplexChart& chart);
double inner_product_l2(const FieldSample& a, const FieldSample& b, const SimplexChart& chart, int order,
                        const FieldHint& hint = {});

/// A k-form known on each cell of a mesh, with Taylor expansions available
/// up to max_derivative_order().
class CellFunction {
public:
  virtual ~CellFunction() = default;
  virtual int num_components() const = 0;
  virtual int max_derivative_order() const = 0;
  virtual void value(int cell, const Eigen::VectorXd& x, std::span<double> out) const = 0;
  /// Taylor polynomials of each component at x in the offset y - x.
  virtual void taylor(int cell, const Eigen::VectorXd& x, int order, std::vector<Polynomial>& out) const = 0;
};

/// An analytic or piecewise field restricted to the cells of a mesh.
class FieldCellFunction : public CellFunction {
public:
  FieldCellFunction(const SimplicialComplex& mesh, const FieldSample& field);
  int num_components() const override { return field_.num_components(); }
  int max_derivative_order() const override { return field_.max_derivative_order(); }
  void value(int cell, const Eigen::VectorXd& x, std::span<double> out) const override;
  void taylor(int cell, const Eigen::VectorXd& x, int order, std::vector<Polynomial>& out) const override;

private:
  const SimplicialComplex& mesh_;
  FieldSample field_;
  std::vector<Eigen::VectorXd> anchors_;
};

/// Piecewise polynomial form: one physical PolyForm per cell, in offset
/// coordinates x - origin of the cell chart.
class PiecewiseCellFunction : public CellFunction {
public:
  PiecewiseCellFunction(const SimplicialComplex& mesh, std::vector<PolyForm> physical);
  int num_components() const override { return nc_; }
  int max_derivative_order() const override { return kMaxDegree; }
  void value(int cell, const Eigen::VectorXd& x, std::span<double> out) const override;
  void taylor(int cell, const Eigen::VectorXd& x, int order, std::vector<Polynomial>& out) const override;
  const PolyForm& form(int cell) const { return forms_[cell]; }

private:
  const SimplicialComplex& mesh_;
  std::vector<PolyForm> forms_;
  int nc_ = 0;
};

/// a - b.
class DifferenceCellFunction : public CellFunction {
public:
  DifferenceCellFunction(const CellFunction& a, const CellFunction& b);
  int num_components() const override { return a_.num_components(); }
  int max_derivative_order() const override;
  void value(int cell, const Eigen::VectorXd& x, std::span<double> out) const override;
  void taylor(int cell, const Eigen::VectorXd& x, int order, std::vector<Polynomial>& out) const override;

private:
  const CellFunction& a_;
  const CellFunction& b_;
};

struct NormResult {
  double global = 0.0;
  /// Indexed like the requested cell list.
  std::vector<double> per_cell;
};

/// ||f||_{L^p} over the given cells for p in {1, 2, inf}; the sup norm is
/// the maximum over the nodes of the order-10 rule.
NormResult lp_norm(const SimplicialComplex& mesh, const CellFunction& f, const std::vector<int>& cells, double p,
                   int order);
/// |f|_{W^{m,p}} = sum over |alpha| = m of ||D^alpha f||_{L^p}.
NormResult sobolev_seminorm(const SimplicialComplex& mesh, const CellFunction& f, const std::vector<int>& cells, int m,
                            double p, int order);

std::vector<int> all_cells(const SimplicialComplex& mesh);

}  // namespace feec

#endif
