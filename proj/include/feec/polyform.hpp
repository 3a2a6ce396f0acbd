// Polynomial differential forms on a single simplex.
//
// A PolyForm on a d-simplex is sum_sigma p_sigma(x) dx_sigma in reference
// coordinates, where sigma runs over the increasing k-subsets of {0..d-1}
// in lexicographic order. Provides exterior algebra (wedge, d, Koszul),
// pullback along affine maps (traces), pointwise evaluation and bases of
// the full and trimmed polynomial families.

#ifndef FEEC_POLYFORM_HPP
#define FEEC_POLYFORM_HPP

#include <span>
#include <vector>

#include "feec/polynomial.hpp"

namespace feec {

/// Increasing k-subsets of {0..d-1} as bitmasks, lexicographic order.
class SubsetTable {
public:
  static const SubsetTable& get(int dim, int k);

  int size() const { return static_cast<int>(masks_.size()); }
  unsigned mask(int idx) const { return masks_[idx]; }
  /// Index of a mask, -1 if not a k-subset.
  int index(unsigned mask) const;
  /// Elements of the idx-th subset in increasing order.
  std::vector<int> elements(int idx) const;

private:
  SubsetTable(int dim, int k);
  std::vector<unsigned> masks_;
  std::vector<int> lookup_;
};

/// Sign of dx_i ^ dx_sigma relative to dx_(sigma + i); 0 if i in sigma.
int insertion_sign(int i, unsigned sigma);
/// Sign of dx_sigma ^ dx_tau relative to dx_(sigma | tau); 0 if they overlap.
int wedge_sign(unsigned sigma, unsigned tau);

class PolyForm {
public:
  PolyForm() = default;
  /// Zero k-form on a dim-simplex with polynomial degree bound `degree`.
  PolyForm(int dim, int k, int degree);
  PolyForm(int dim, int k, std::vector<Polynomial> components);

  /// dx_sigma with unit coefficient.
  static PolyForm coframe(int dim, unsigned sigma);
  /// p * dx_sigma.
  static PolyForm scaled_coframe(const Polynomial& p, unsigned sigma);
  /// The 0-form p.
  static PolyForm scalar(const Polynomial& p);

  int dim() const { return dim_; }
  int form_degree() const { return k_; }
  int degree_bound() const;
  /// Largest polynomial degree over all components; -1 for the zero form.
  int degree(double tol = 0.0) const;
  int num_components() const { return static_cast<int>(comps_.size()); }

  const Polynomial& component(int idx) const { return comps_[idx]; }
  Polynomial& component(int idx) { return comps_[idx]; }

  /// Component values at a reference point.
  void evaluate_components(std::span<const double> x, std::span<double> out) const;
  std::vector<double> evaluate_components(std::span<const double> x) const;
  /// omega_x(v_1, ..., v_k) with vectors given as columns of a dim x k matrix.
  double evaluate(std::span<const double> x, const Eigen::MatrixXd& vectors) const;

  /// Coefficients for all components stacked, padded to the given degree.
  Eigen::VectorXd flatten(int degree) const;
  static PolyForm unflatten(int dim, int k, int degree, const Eigen::VectorXd& v);

  double max_abs() const;

  PolyForm& operator+=(const PolyForm& o);
  PolyForm& operator-=(const PolyForm& o);
  PolyForm& operator*=(double s);
  void axpy(double s, const PolyForm& o);
  friend PolyForm operator+(PolyForm a, const PolyForm& b) { return a += b; }
  friend PolyForm operator-(PolyForm a, const PolyForm& b) { return a -= b; }
  friend PolyForm operator*(PolyForm a, double s) { return a *= s; }
  friend PolyForm operator*(double s, PolyForm a) { return a *= s; }

private:
  void check_compatible(const PolyForm& o) const;

  int dim_ = 0;
  int k_ = 0;
  std::vector<Polynomial> comps_;
};

PolyForm wedge(const PolyForm& a, const PolyForm& b);
/// Exterior derivative. Top-degree forms map to the zero form of degree d+1,
/// represented with no components.
PolyForm exterior_derivative(const PolyForm& a);
/// Contraction with the position vector field.
PolyForm koszul(const PolyForm& a);
/// Pullback along y -> A y + b.
PolyForm pullback(const PolyForm& a, const AffineMap& map);
/// Pointwise pullback of k-form components along a linear map with matrix A
/// (target x source): entry (tau, sigma) is det A[sigma, tau].
Eigen::MatrixXd pullback_matrix(const Eigen::MatrixXd& A, int k);
/// Affine inclusion of the reference simplex of a face into the reference
/// simplex of dimension `dim`; the face is given by its local vertex
/// positions in increasing order (position 0 is the origin, i > 0 is e_i).
AffineMap face_inclusion(int dim, std::span<const int> face_vertices);
/// Trace onto a face described by local vertex positions.
PolyForm trace(const PolyForm& a, std::span<const int> face_vertices);

/// Closed-form dimensions of the full and trimmed spaces over a d-simplex.
int dim_full(int d, int r, int k);
int dim_trimmed(int d, int r, int k);

/// Basis of P_r Lambda^k on the reference d-simplex: monomials times coframes.
const std::vector<PolyForm>& basis_full(int d, int r, int k);
/// Basis of P^-_r Lambda^k = P_{r-1} Lambda^k + kappa P_{r-1} Lambda^{k+1},
/// selected from the generating set in a fixed pivot order.
const std::vector<PolyForm>& basis_trimmed(int d, int r, int k);

/// Greedy rank-revealing selection: indices of generators that increase the
/// rank of the span, visited in order.
std::vector<int> select_independent(const std::vector<Eigen::VectorXd>& generators, double tol = 1e-10);

}  // namespace feec

#endif
