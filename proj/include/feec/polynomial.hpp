// Dense multivariate polynomials in up to three variables.
//
// Provides:
//  - graded monomial enumeration shared by every polynomial object
//  - arithmetic, differentiation and affine substitution (pullback)
//
// Coefficients are stored densely in graded order: all monomials of total
// degree 0, then degree 1, and so on up to the degree bound of the object.

#ifndef FEEC_POLYNOMIAL_HPP
#define FEEC_POLYNOMIAL_HPP

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace feec {

inline constexpr int kMaxDim = 3;
inline constexpr int kMaxDegree = 24;

using MultiIndex = std::array<int, kMaxDim>;

long binomial(int n, int k);

/// Graded enumeration of the monomials in `dim` variables.
class MonomialTable {
public:
  static const MonomialTable& get(int dim);

  int dim() const { return dim_; }
  /// Number of monomials of total degree at most `degree`.
  int count(int degree) const;
  const MultiIndex& exponent(int idx) const { return exponents_[idx]; }
  int total_degree(int idx) const { return degrees_[idx]; }
  /// Position of a monomial, or -1 if its degree exceeds kMaxDegree.
  int index(const MultiIndex& a) const;

private:
  explicit MonomialTable(int dim);

  int dim_;
  std::vector<MultiIndex> exponents_;
  std::vector<int> degrees_;
  std::vector<int> lookup_;
};

/// Affine map y -> A y + b from R^m into R^d.
struct AffineMap {
  Eigen::MatrixXd A;  // d x m
  Eigen::VectorXd b;  // d

  int source_dim() const { return static_cast<int>(A.cols()); }
  int target_dim() const { return static_cast<int>(A.rows()); }
};

class Polynomial {
public:
  Polynomial() = default;
  /// Zero polynomial with the given degree bound.
  Polynomial(int dim, int degree_bound);

  static Polynomial constant(int dim, double c);
  static Polynomial variable(int dim, int i);
  static Polynomial monomial(int dim, const MultiIndex& a, double c = 1.0);

  int dim() const { return dim_; }
  int degree_bound() const { return degree_; }
  /// Largest total degree carrying a coefficient with |c| > tol; -1 for zero.
  int degree(double tol = 0.0) const;
  int size() const { return static_cast<int>(c_.size()); }

  std::span<const double> coefficients() const { return c_; }
  std::span<double> coefficients() { return c_; }
  double operator[](int idx) const { return c_[idx]; }
  double& operator[](int idx) { return c_[idx]; }
  double coefficient(const MultiIndex& a) const;

  double operator()(std::span<const double> x) const;
  double max_abs() const;

  Polynomial derivative(int i) const;
  /// Drops every term of total degree above `degree`.
  Polynomial truncated(int degree) const;
  /// Same polynomial stored with a different degree bound; the bound may only
  /// shrink when the dropped terms are zero.
  Polynomial rebounded(int degree) const;
  /// p(A y + b) as a polynomial in y.
  Polynomial compose(const AffineMap& map) const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(double s);
  void axpy(double s, const Polynomial& o);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator-(Polynomial a) { return a *= -1.0; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

private:
  int dim_ = 0;
  int degree_ = 0;
  std::vector<double> c_;
};

/// Product with every term above `max_degree` discarded.
Polynomial multiply_truncated(const Polynomial& a, const Polynomial& b, int max_degree);

/// Exact integral of x^a over the reference d-simplex conv(0, e_1, ..., e_d).
double reference_monomial_integral(int dim, const MultiIndex& a);

}  // namespace feec

#endif
