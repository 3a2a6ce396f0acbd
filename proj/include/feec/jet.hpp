// Truncated multivariate Taylor expansions for exact field derivatives.
//
// A Jet holds sum_a c_a t^a with c_a = D^a f(x0) / a!, truncated at a fixed
// order. Analytic fields are written once as generic callables and evaluated
// either with doubles or with jets.

#ifndef FEEC_JET_HPP
#define FEEC_JET_HPP

#include "feec/polynomial.hpp"

namespace feec {

class Jet {
public:
  Jet() = default;
  Jet(int dim, int order, double value);
  /// Jet with the given Taylor coefficients, truncated at `order`.
  Jet(const Polynomial& series, int order);

  /// Expansion of the coordinate function x_i around a point with x_i = value.
  static Jet variable(int dim, int order, int i, double value);

  int dim() const { return series_.dim(); }
  int order() const { return order_; }
  double value() const { return series_[0]; }
  const Polynomial& series() const { return series_; }

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator/=(const Jet& o);
  Jet& operator+=(double s);
  Jet& operator-=(double s);
  Jet& operator*=(double s);
  Jet& operator/=(double s);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, const Jet& b) { return a *= b; }
  friend Jet operator/(Jet a, const Jet& b) { return a /= b; }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a -= s; }
  friend Jet operator-(double s, const Jet& a) { return Jet(a.dim(), a.order(), s) - a; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, double s) { return a /= s; }
  friend Jet operator/(double s, const Jet& a) { return Jet(a.dim(), a.order(), s) / a; }
  friend Jet operator-(const Jet& a) { return a * -1.0; }

  /// f(value + t) = sum_j derivs[j] / j! * t^j applied to this jet.
  Jet compose(std::span<const double> derivs) const;

private:
  Polynomial series_;
  int order_ = 0;
};

Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sqrt(const Jet& a);
/// Smooth away from zero; the branch is taken from the sign of the value.
Jet abs(const Jet& a);
Jet pow(const Jet& a, int e);

}  // namespace feec

#endif
