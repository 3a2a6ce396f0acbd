#include "feec/jet.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace feec {

Jet::Jet(int dim, int order, double value) : series_(dim, order), order_(order) {
  series_[0] = value;
}

Jet::Jet(const Polynomial& series, int order) : series_(series.truncated(order).rebounded(order)), order_(order) {}

Jet Jet::variable(int dim, int order, int i, double value) {
  Jet j(dim, order, value);
  if (order >= 1) j.series_[1 + i] = 1.0;
  return j;
}

Jet& Jet::operator+=(const Jet& o) {
  series_ += o.series_;
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  series_ -= o.series_;
  return *this;
}

Jet& Jet::operator*=(const Jet& o) {
  series_ = multiply_truncated(series_, o.series_, order_);
  return *this;
}

Jet& Jet::operator/=(const Jet& o) {
  const double v = o.value();
  if (v == 0.0) throw std::domain_error("division by a jet with zero value");
  // derivatives of 1/x: (-1)^j j! / x^(j+1)
  std::vector<double> d(o.order() + 1);
  double f = 1.0;
  for (int j = 0; j <= o.order(); ++j) {
    d[j] = f / std::pow(v, j + 1);
    f *= -static_cast<double>(j + 1);
  }
  return *this *= o.compose(d);
}

Jet& Jet::operator+=(double s) {
  series_[0] += s;
  return *this;
}

Jet& Jet::operator-=(double s) {
  series_[0] -= s;
  return *this;
}

Jet& Jet::operator*=(double s) {
  series_ *= s;
  return *this;
}

Jet& Jet::operator/=(double s) {
  series_ *= 1.0 / s;
  return *this;
}

Jet Jet::compose(std::span<const double> derivs) const {
  // Horner in the nilpotent part t = self - value.
  Jet t = *this;
  t.series_[0] = 0.0;
  double fact = 1.0;
  for (int j = 1; j <= order_; ++j) fact *= j;
  Jet out(dim(), order_, derivs[order_] / fact);
  for (int j = order_ - 1; j >= 0; --j) {
    fact /= (j + 1);
    out *= t;
    out.series_[0] += derivs[j] / fact;
  }
  return out;
}

namespace {
std::vector<double> cyclic(double s, double c, int order, bool is_sin) {
  // derivatives of sin: s, c, -s, -c ...
  std::vector<double> d(order + 1);
  const double seq_sin[4] = {s, c, -s, -c};
  const double seq_cos[4] = {c, -s, -c, s};
  for (int j = 0; j <= order; ++j) d[j] = is_sin ? seq_sin[j % 4] : seq_cos[j % 4];
  return d;
}
}  // namespace

Jet sin(const Jet& a) {
  return a.compose(cyclic(std::sin(a.value()), std::cos(a.value()), a.order(), true));
}

Jet cos(const Jet& a) {
  return a.compose(cyclic(std::sin(a.value()), std::cos(a.value()), a.order(), false));
}

Jet exp(const Jet& a) {
  std::vector<double> d(a.order() + 1, std::exp(a.value()));
  return a.compose(d);
}

Jet log(const Jet& a) {
  const double v = a.value();
  if (v <= 0.0) throw std::domain_error("log of a non-positive jet");
  std::vector<double> d(a.order() + 1);
  d[0] = std::log(v);
  double f = 1.0;  // (j-1)! with alternating sign
  for (int j = 1; j <= a.order(); ++j) {
    d[j] = f / std::pow(v, j);
    f *= -static_cast<double>(j);
  }
  return a.compose(d);
}

Jet sqrt(const Jet& a) {
  const double v = a.value();
  if (v <= 0.0) throw std::domain_error("sqrt of a non-positive jet");
  std::vector<double> d(a.order() + 1);
  double coeff = 1.0;
  double expo = 0.5;
  for (int j = 0; j <= a.order(); ++j) {
    d[j] = coeff * std::pow(v, expo);
    coeff *= expo;
    expo -= 1.0;
  }
  return a.compose(d);
}

Jet abs(const Jet& a) {
  return a.value() < 0.0 ? -a : a;
}

Jet pow(const Jet& a, int e) {
  if (e < 0) return 1.0 / pow(a, -e);
  Jet r(a.dim(), a.order(), 1.0);
  for (int i = 0; i < e; ++i) r *= a;
  return r;
}

}  // namespace feec
