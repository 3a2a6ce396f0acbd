// Differential forms given pointwise on a domain in R^n.
//
// A FieldSample returns the components of a k-form with respect to the
// ambient coframe dx_sigma (increasing k-subsets, lexicographic). Fields
// that are only piecewise smooth select their branch from a hint: the cell
// being integrated and an anchor point inside it.

#ifndef FEEC_FIELD_HPP
#define FEEC_FIELD_HPP

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "feec/jet.hpp"
#include "feec/polyform.hpp"

namespace feec {

/// Where a field is being evaluated.
struct FieldHint {
  int cell = -1;
  /// A point in the interior of the cell, or empty when unknown.
  std::span<const double> anchor;
};

class FieldSample {
public:
  using ValueFn = std::function<void(std::span<const double> x, const FieldHint&, std::span<double> out)>;
  /// Fills one jet per component, expanded at x to the given order.
  using JetFn = std::function<void(std::span<const double> x, const FieldHint&, int order, std::vector<Jet>& out)>;

  FieldSample() = default;
  /// Form degree n + 1 is allowed and denotes the zero form without components.
  FieldSample(int ambient_dim, int form_degree, ValueFn value, JetFn jet = {}, int max_order = 0);

  int ambient_dim() const { return n_; }
  int form_degree() const { return k_; }
  int num_components() const { return SubsetTable::get(n_, k_).size(); }
  /// Largest derivative order available; 0 for value-only fields.
  int max_derivative_order() const { return jet_ ? max_order_ : 0; }
  bool has_jets() const { return static_cast<bool>(jet_); }

  void value(std::span<const double> x, const FieldHint& hint, std::span<double> out) const;
  std::vector<double> value(std::span<const double> x, const FieldHint& hint = {}) const;
  /// Throws std::logic_error when the field has no derivatives of that order.
  void jet(std::span<const double> x, const FieldHint& hint, int order, std::vector<Jet>& out) const;

  std::string name;

private:
  int n_ = 0;
  int k_ = 0;
  ValueFn value_;
  JetFn jet_;
  int max_order_ = 0;
};

/// Region selector for piecewise fields: maps a point to a branch index.
using RegionFn = std::function<int(std::span<const double>)>;

/// Field from a generic callable f(x, region) returning std::array<T, 3> of
/// components (unused trailing entries ignored), where x is std::array<T, 3>
/// and T is double or Jet. The region is taken from the hint anchor when
/// present, else from the evaluation point.
template <class F>
FieldSample make_field(int n, int k, F f, RegionFn region = {}, int max_order = kMaxDegree) {
  const int nc = SubsetTable::get(n, k).size();
  auto pick_region = [region](std::span<const double> x, const FieldHint& h) {
    if (!region) return 0;
    return region(h.anchor.empty() ? x : h.anchor);
  };
  auto value = [n, nc, f, pick_region](std::span<const double> x, const FieldHint& h, std::span<double> out) {
    std::array<double, 3> xa{0.0, 0.0, 0.0};
    for (int i = 0; i < n; ++i) xa[i] = x[i];
    const auto r = f(xa, pick_region(x, h));
    for (int c = 0; c < nc; ++c) out[c] = r[c];
  };
  auto jet = [n, nc, f, pick_region](std::span<const double> x, const FieldHint& h, int order, std::vector<Jet>& out) {
    std::array<Jet, 3> xj;
    for (int i = 0; i < 3; ++i) xj[i] = i < n ? Jet::variable(n, order, i, x[i]) : Jet(n, order, 0.0);
    const auto r = f(xj, pick_region(x, h));
    out.assign(r.begin(), r.begin() + nc);
  };
  return FieldSample(n, k, value, jet, max_order);
}

/// d of a field with jets; the result has one derivative order less.
FieldSample exterior_derivative(const FieldSample& field);
/// alpha * a + beta * b.
FieldSample combine(double alpha, const FieldSample& a, double beta, const FieldSample& b);
/// A global polynomial form given in ambient coordinates.
FieldSample polynomial_field(const PolyForm& physical);
/// The zero k-form.
FieldSample zero_field(int n, int k);

}  // namespace feec

#endif
