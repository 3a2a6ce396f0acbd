#include "feec/field.hpp"

#include <stdexcept>

namespace feec {

FieldSample::FieldSample(int ambient_dim, int form_degree, ValueFn value, JetFn jet, int max_order)
    : n_(ambient_dim), k_(form_degree), value_(std::move(value)), jet_(std::move(jet)), max_order_(max_order) {
  if (k_ < 0 || k_ > n_ + 1) throw std::invalid_argument("FieldSample: form degree out of range");
}

void FieldSample::value(std::span<const double> x, const FieldHint& hint, std::span<double> out) const {
  value_(x, hint, out);
}

std::vector<double> FieldSample::value(std::span<const double> x, const FieldHint& hint) const {
  std::vector<double> out(num_components());
  value_(x, hint, out);
  return out;
}

void FieldSample::jet(std::span<const double> x, const FieldHint& hint, int order, std::vector<Jet>& out) const {
  if (!jet_ || order > max_order_)
    throw std::logic_error("field '" + name + "' provides no derivatives of order " + std::to_string(order));
  jet_(x, hint, order, out);
}

FieldSample exterior_derivative(const FieldSample& field) {
  const int n = field.ambient_dim();
  const int k = field.form_degree();
  if (!field.has_jets() || field.max_derivative_order() < 1)
    throw std::logic_error("exterior_derivative: field '" + field.name + "' has no derivatives");
  if (k >= n) {
    FieldSample z = zero_field(n, k + 1);
    z.name = "d(" + field.name + ")";
    return z;
  }
  const auto& src = SubsetTable::get(n, k);
  const auto& dst = SubsetTable::get(n, k + 1);

  // d applied to component series: sum_j sign * d/dt_j of the sigma series.
  auto apply_d = [=](const std::vector<Jet>& in, int order, std::vector<Jet>& out) {
    out.assign(dst.size(), Jet(n, order, 0.0));
    std::vector<Polynomial> acc(dst.size(), Polynomial(n, order));
    for (int s = 0; s < src.size(); ++s)
      for (int j = 0; j < n; ++j) {
        const int sgn = insertion_sign(j, src.mask(s));
        if (sgn == 0) continue;
        acc[dst.index(src.mask(s) | (1u << j))].axpy(sgn, in[s].series().derivative(j).truncated(order));
      }
    for (int t = 0; t < dst.size(); ++t) out[t] = Jet(acc[t], order);
  };

  FieldSample::ValueFn value = [field, apply_d](std::span<const double> x, const FieldHint& h, std::span<double> out) {
    std::vector<Jet> in, d;
    field.jet(x, h, 1, in);
    apply_d(in, 0, d);
    for (size_t t = 0; t < d.size(); ++t) out[t] = d[t].value();
  };
  FieldSample::JetFn jet = [field, apply_d](std::span<const double> x, const FieldHint& h, int order,
                                            std::vector<Jet>& out) {
    std::vector<Jet> in;
    field.jet(x, h, order + 1, in);
    apply_d(in, order, out);
  };
  FieldSample d(n, k + 1, value, jet, field.max_derivative_order() - 1);
  d.name = "d(" + field.name + ")";
  return d;
}

FieldSample combine(double alpha, const FieldSample& a, double beta, const FieldSample& b) {
  if (a.ambient_dim() != b.ambient_dim() || a.form_degree() != b.form_degree())
    throw std::invalid_argument("combine: incompatible fields");
  const int nc = a.num_components();
  FieldSample::ValueFn value = [=](std::span<const double> x, const FieldHint& h, std::span<double> out) {
    std::vector<double> va(nc), vb(nc);
    a.value(x, h, va);
    b.value(x, h, vb);
    for (int c = 0; c < nc; ++c) out[c] = alpha * va[c] + beta * vb[c];
  };
  FieldSample::JetFn jet;
  int order = 0;
  if (a.has_jets() && b.has_jets()) {
    order = std::min(a.max_derivative_order(), b.max_derivative_order());
    jet = [=](std::span<const double> x, const FieldHint& h, int ord, std::vector<Jet>& out) {
      std::vector<Jet> ja, jb;
      a.jet(x, h, ord, ja);
      b.jet(x, h, ord, jb);
      out.clear();
      for (int c = 0; c < nc; ++c) out.push_back(alpha * ja[c] + beta * jb[c]);
    };
  }
  FieldSample f(a.ambient_dim(), a.form_degree(), value, jet, order);
  f.name = a.name + "+" + b.name;
  return f;
}

FieldSample polynomial_field(const PolyForm& physical) {
  const int n = physical.dim();
  const int nc = physical.num_components();
  FieldSample::ValueFn value = [physical](std::span<const double> x, const FieldHint&, std::span<double> out) {
    physical.evaluate_components(x.first(physical.dim()), out);
  };
  FieldSample::JetFn jet = [physical, n, nc](std::span<const double> x, const FieldHint&, int order,
                                              std::vector<Jet>& out) {
    AffineMap shift{Eigen::MatrixXd::Identity(n, n), Eigen::Map<const Eigen::VectorXd>(x.data(), n)};
    out.clear();
    for (int c = 0; c < nc; ++c) out.emplace_back(physical.component(c).compose(shift), order);
  };
  FieldSample f(n, physical.form_degree(), value, jet, kMaxDegree);
  f.name = "polynomial";
  return f;
}

FieldSample zero_field(int n, int k) {
  const int nc = SubsetTable::get(n, k).size();
  FieldSample::ValueFn value = [nc](std::span<const double>, const FieldHint&, std::span<double> out) {
    for (int c = 0; c < nc; ++c) out[c] = 0.0;
  };
  FieldSample::JetFn jet = [n, nc](std::span<const double>, const FieldHint&, int order, std::vector<Jet>& out) {
    out.assign(nc, Jet(n, order, 0.0));
  };
  FieldSample f(n, k, value, jet, kMaxDegree);
  f.name = "zero";
  return f;
}

}  // namespace feec
