#include "feec/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace feec {

namespace {

struct Gauss1D {
  std::vector<double> nodes;  // in [0, 1]
  std::vector<double> weights;
};

/// Gauss-Jacobi rule with q nodes on [0, 1] for the weight (1 - u)^alpha
/// (Golub-Welsch on the monic Jacobi recurrence).
Gauss1D gauss_jacobi(int q, double alpha) {
  const double beta = 0.0;
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(q, q);
  for (int j = 0; j < q; ++j) {
    const double s = 2.0 * j + alpha + beta;
    T(j, j) = j == 0 ? (beta - alpha) / (alpha + beta + 2.0) : (beta * beta - alpha * alpha) / (s * (s + 2.0));
    if (j + 1 < q) {
      const double jj = j + 1.0;
      const double s1 = 2.0 * jj + alpha + beta;
      const double b = 4.0 * jj * (jj + alpha) * (jj + beta) * (jj + alpha + beta) /
                       (s1 * s1 * (s1 + 1.0) * (s1 - 1.0));
      T(j, j + 1) = T(j + 1, j) = std::sqrt(b);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  Gauss1D g;
  double total = 0.0;
  for (int i = 0; i < q; ++i) {
    g.nodes.push_back(0.5 * (1.0 + es.eigenvalues()(i)));
    const double v0 = es.eigenvectors()(0, i);
    g.weights.push_back(v0 * v0);
    total += v0 * v0;
  }
  for (double& w : g.weights) w /= total;
  return g;
}

QuadratureRule build_simplex_rule(int dim, int order) {
  QuadratureRule rule;
  rule.dim = dim;
  rule.order = order;
  const int q = order / 2 + 1;
  std::vector<Eigen::VectorXd> pts;
  std::vector<double> wts;
  if (dim == 0) {
    pts.emplace_back(0);
    wts.push_back(1.0);
  } else if (dim == 1) {
    auto g = gauss_jacobi(q, 0.0);
    for (int i = 0; i < q; ++i) {
      pts.push_back(Eigen::VectorXd::Constant(1, g.nodes[i]));
      wts.push_back(g.weights[i]);
    }
  } else if (dim == 2) {
    auto gu = gauss_jacobi(q, 1.0), gv = gauss_jacobi(q, 0.0);
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j) {
        const double u = gu.nodes[i], v = gv.nodes[j];
        Eigen::VectorXd x(2);
        x << u, (1.0 - u) * v;
        pts.push_back(x);
        wts.push_back(gu.weights[i] * gv.weights[j]);
      }
  } else if (dim == 3) {
    auto gu = gauss_jacobi(q, 2.0), gv = gauss_jacobi(q, 1.0), gw = gauss_jacobi(q, 0.0);
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j)
        for (int l = 0; l < q; ++l) {
          const double u = gu.nodes[i], v = gv.nodes[j], w = gw.nodes[l];
          Eigen::VectorXd x(3);
          x << u, (1.0 - u) * v, (1.0 - u) * (1.0 - v) * w;
          pts.push_back(x);
          wts.push_back(gu.weights[i] * gv.weights[j] * gw.weights[l]);
        }
  } else {
    throw std::invalid_argument("simplex_rule: dimension must be 0..3");
  }
  rule.points.resize(dim, pts.size());
  rule.weights.resize(wts.size());
  double total = 0.0;
  for (double w : wts) total += w;
  for (size_t i = 0; i < pts.size(); ++i) {
    rule.points.col(i) = pts[i];
    rule.weights(i) = wts[i] / total;
  }

  // Exactness on every monomial up to the order, against the Dirichlet formula.
  double factorial = 1.0;
  for (int i = 2; i <= dim; ++i) factorial *= i;
  const auto& mono = MonomialTable::get(dim);
  for (int idx = 0; idx < mono.count(order); ++idx) {
    const auto& a = mono.exponent(idx);
    double s = 0.0;
    for (int qn = 0; qn < rule.size(); ++qn) {
      double term = rule.weights(qn);
      for (int i = 0; i < dim; ++i) term *= std::pow(rule.points(i, qn), a[i]);
      s += term;
    }
    const double exact = factorial * reference_monomial_integral(dim, a);
    if (std::abs(s - exact) > kQuadratureExactnessTol)
      throw std::logic_error("simplex_rule: exactness check failed for order " + std::to_string(order));
  }
  return rule;
}

QuadratureRule build_ball_rule(int dim) {
  QuadratureRule rule;
  rule.dim = dim;
  std::vector<Eigen::VectorXd> pts;
  std::vector<double> wts;
  auto bump = [](double rho) { return std::pow(1.0 - rho * rho, 4); };
  if (dim == 2) {
    auto gr = gauss_jacobi(8, 0.0);
    const int na = 16;
    for (int i = 0; i < 8; ++i)
      for (int a = 0; a < na; ++a) {
        const double rho = gr.nodes[i], th = 2.0 * std::numbers::pi * a / na;
        Eigen::VectorXd z(2);
        z << rho * std::cos(th), rho * std::sin(th);
        pts.push_back(z);
        wts.push_back(gr.weights[i] * rho * bump(rho));
      }
  } else if (dim == 3) {
    auto gr = gauss_jacobi(6, 0.0), gc = gauss_jacobi(6, 0.0);
    const int na = 12;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        for (int a = 0; a < na; ++a) {
          const double rho = gr.nodes[i], ct = 2.0 * gc.nodes[j] - 1.0, st = std::sqrt(1.0 - ct * ct);
          const double ph = 2.0 * std::numbers::pi * a / na;
          Eigen::VectorXd z(3);
          z << rho * st * std::cos(ph), rho * st * std::sin(ph), rho * ct;
          pts.push_back(z);
          wts.push_back(gr.weights[i] * gc.weights[j] * rho * rho * bump(rho));
        }
  } else {
    throw std::invalid_argument("ball_rule: dimension must be 2 or 3");
  }
  rule.points.resize(dim, pts.size());
  rule.weights.resize(wts.size());
  double total = 0.0;
  for (double w : wts) total += w;
  for (size_t i = 0; i < pts.size(); ++i) {
    rule.points.col(i) = pts[i];
    rule.weights(i) = wts[i] / total;
  }
  return rule;
}

double simplex_factorial(int m) {
  double f = 1.0;
  for (int i = 2; i <= m; ++i) f *= i;
  return f;
}

}  // namespace

Eigen::VectorXd QuadratureRule::barycentric(int q) const {
  Eigen::VectorXd b(dim + 1);
  b(0) = 1.0 - points.col(q).sum();
  b.tail(dim) = points.col(q);
  return b;
}

const QuadratureRule& simplex_rule(int dim, int order) {
  if (order < 0 || order > kMaxQuadratureOrder)
    throw std::invalid_argument("simplex_rule: unsupported order " + std::to_string(order));
  if (dim < 0 || dim > 3) throw std::invalid_argument("simplex_rule: dimension must be 0..3");
  static std::mutex mutex;
  static std::map<std::pair<int, int>, QuadratureRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find({dim, order});
  if (it == cache.end()) it = cache.emplace(std::make_pair(dim, order), build_simplex_rule(dim, order)).first;
  return it->second;
}

const QuadratureRule& ball_rule(int dim) {
  static std::once_flag once;
  static QuadratureRule rules[2];
  std::call_once(once, [] {
    rules[0] = build_ball_rule(2);
    rules[1] = build_ball_rule(3);
  });
  if (dim != 2 && dim != 3) throw std::invalid_argument("ball_rule: dimension must be 2 or 3");
  return rules[dim - 2];
}

double integrate_reference(const PolyForm& top) {
  if (top.form_degree() != top.dim()) throw std::invalid_argument("integrate_reference: form is not top-degree");
  const auto& p = top.component(0);
  const auto& mono = MonomialTable::get(top.dim());
  double s = 0.0;
  for (int i = 0; i < p.size(); ++i)
    if (p[i] != 0.0) s += p[i] * reference_monomial_integral(top.dim(), mono.exponent(i));
  return s;
}

double integrate_form(const FieldSample& field, const SimplexChart& chart, int order, const FieldHint& hint) {
  const int m = chart.dim();
  if (field.form_degree() != m) throw std::invalid_argument("integrate_form: form degree differs from simplex dimension");
  const Eigen::MatrixXd P = chart.pullback_components(m);
  const auto& rule = simplex_rule(m, order);
  std::vector<double> val(field.num_components());
  double s = 0.0;
  for (int q = 0; q < rule.size(); ++q) {
    Eigen::VectorXd x = chart.to_physical(std::span<const double>(rule.points.col(q).data(), m));
    field.value(std::span<const double>(x.data(), x.size()), hint, val);
    s += rule.weights(q) * (P * Eigen::Map<Eigen::VectorXd>(val.data(), val.size()))(0);
  }
  return s / simplex_factorial(m);
}

double inner_product_l2(const PolyForm& a, const PolyForm& b, const SimplexChart& chart) {
  if (a.form_degree() != b.form_degree() || a.dim() != b.dim() || a.dim() != chart.dim())
    throw std::invalid_argument("inner_product_l2: incompatible forms");
  const Eigen::MatrixXd K = chart.pushforward_components(a.form_degree());
  const auto& rule = simplex_rule(a.dim(), std::max(a.degree(), 0) + std::max(b.degree(), 0));
  double s = 0.0;
  for (int q = 0; q < rule.size(); ++q) {
    std::span<const double> xi(rule.points.col(q).data(), a.dim());
    auto va = a.evaluate_components(xi), vb = b.evaluate_components(xi);
    Eigen::VectorXd pa = K * Eigen::Map<Eigen::VectorXd>(va.data(), va.size());
    Eigen::VectorXd pb = K * Eigen::Map<Eigen::VectorXd>(vb.data(), vb.size());
    s += rule.weights(q) * pa.dot(pb);
  }
  return s * chart.measure();
}

double inner_product_l2(const FieldSample& a, const FieldSample& b, const SimplexChart& chart, int order,
                        const FieldHint& hint) {
  if (a.form_degree() != b.form_degree()) throw std::invalid_argument("inner_product_l2: degree mismatch");
  const auto& rule = simplex_rule(chart.dim(), order);
  std::vector<double> va(a.num_components()), vb(b.num_components());
  double s = 0.0;
  for (int q = 0; q < rule.size(); ++q) {
    Eigen::VectorXd x = chart.to_physical(std::span<const double>(rule.points.col(q).data(), chart.dim()));
    a.value(std::span<const double>(x.data(), x.size()), hint, va);
    b.value(std::span<const double>(x.data(), x.size()), hint, vb);
    double dot = 0.0;
    for (size_t c = 0; c < va.size(); ++c) dot += va[c] * vb[c];
    s += rule.weights(q) * dot;
  }
  return s * chart.measure();
}

// ---------------------------------------------------------------------------
// Cell functions

FieldCellFunction::FieldCellFunction(const SimplicialComplex& mesh, const FieldSample& field)
    : mesh_(mesh), field_(field) {
  if (field.ambient_dim() != mesh.dimension()) throw std::invalid_argument("FieldCellFunction: dimension mismatch");
  for (int c = 0; c < mesh.num_cells(); ++c) anchors_.push_back(mesh.centroid(mesh.dimension(), c));
}

void FieldCellFunction::value(int cell, const Eigen::VectorXd& x, std::span<double> out) const {
  FieldHint h{cell, std::span<const double>(anchors_[cell].data(), anchors_[cell].size())};
  field_.value(std::span<const double>(x.data(), x.size()), h, out);
}

void FieldCellFunction::taylor(int cell, const Eigen::VectorXd& x, int order, std::vector<Polynomial>& out) const {
  FieldHint h{cell, std::span<const double>(anchors_[cell].data(), anchors_[cell].size())};
  std::vector<Jet> jets;
  field_.jet(std::span<const double>(x.data(), x.size()), h, order, jets);
  out.clear();
  for (const auto& j : jets) out.push_back(j.series());
}

PiecewiseCellFunction::PiecewiseCellFunction(const SimplicialComplex& mesh, std::vector<PolyForm> physical)
    : mesh_(mesh), forms_(std::move(physical)) {
  if (static_cast<int>(forms_.size()) != mesh.num_cells())
    throw std::invalid_argument("PiecewiseCellFunction: one form per cell required");
  nc_ = forms_.empty() ? 0 : forms_[0].num_components();
}

void PiecewiseCellFunction::value(int cell, const Eigen::VectorXd& x, std::span<double> out) const {
  Eigen::VectorXd z = x - mesh_.cell_chart(cell).origin();
  forms_[cell].evaluate_components(std::span<const double>(z.data(), z.size()), out);
}

void PiecewiseCellFunction::taylor(int cell, const Eigen::VectorXd& x, int order, std::vector<Polynomial>& out) const {
  const int n = mesh_.dimension();
  AffineMap shift{Eigen::MatrixXd::Identity(n, n), x - mesh_.cell_chart(cell).origin()};
  out.clear();
  for (int c = 0; c < nc_; ++c) out.push_back(forms_[cell].component(c).compose(shift).truncated(order));
}

DifferenceCellFunction::DifferenceCellFunction(const CellFunction& a, const CellFunction& b) : a_(a), b_(b) {
  if (a.num_components() != b.num_components()) throw std::invalid_argument("DifferenceCellFunction: size mismatch");
}

int DifferenceCellFunction::max_derivative_order() const {
  return std::min(a_.max_derivative_order(), b_.max_derivative_order());
}

void DifferenceCellFunction::value(int cell, const Eigen::VectorXd& x, std::span<double> out) const {
  std::vector<double> vb(out.size());
  a_.value(cell, x, out);
  b_.value(cell, x, vb);
  for (size_t c = 0; c < out.size(); ++c) out[c] -= vb[c];
}

void DifferenceCellFunction::taylor(int cell, const Eigen::VectorXd& x, int order, std::vector<Polynomial>& out) const {
  std::vector<Polynomial> tb;
  a_.taylor(cell, x, order, out);
  b_.taylor(cell, x, order, tb);
  for (size_t c = 0; c < out.size(); ++c) out[c] -= tb[c];
}

// ---------------------------------------------------------------------------
// Norms

namespace {

void check_p(double p) {
  if (p != 1.0 && p != 2.0 && p != kInfinity) throw std::invalid_argument("norm: p must be 1, 2 or infinity");
}

}  // namespace

std::vector<int> all_cells(const SimplicialComplex& mesh) {
  std::vector<int> cells(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) cells[c] = c;
  return cells;
}

NormResult lp_norm(const SimplicialComplex& mesh, const CellFunction& f, const std::vector<int>& cells, double p,
                   int order) {
  check_p(p);
  const int n = mesh.dimension();
  const bool sup = p == kInfinity;
  const auto& rule = simplex_rule(n, sup ? 10 : order);
  std::vector<double> val(f.num_components());
  NormResult r;
  double total = 0.0;
  for (int c : cells) {
    const auto& chart = mesh.cell_chart(c);
    double acc = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
      Eigen::VectorXd x = chart.to_physical(std::span<const double>(rule.points.col(q).data(), n));
      f.value(c, x, val);
      double norm2 = 0.0;
      for (double v : val) norm2 += v * v;
      const double a = std::sqrt(norm2);
      if (sup) acc = std::max(acc, a);
      else acc += rule.weights(q) * std::pow(a, p);
    }
    if (sup) {
      r.per_cell.push_back(acc);
      total = std::max(total, acc);
    } else {
      acc *= chart.measure();
      r.per_cell.push_back(std::pow(acc, 1.0 / p));
      total += acc;
    }
  }
  r.global = sup ? total : std::pow(total, 1.0 / p);
  return r;
}

NormResult sobolev_seminorm(const SimplicialComplex& mesh, const CellFunction& f, const std::vector<int>& cells, int m,
                            double p, int order) {
  check_p(p);
  if (m < 1) throw std::invalid_argument("sobolev_seminorm: order must be at least 1");
  if (f.max_derivative_order() < m)
    throw std::logic_error("sobolev_seminorm: derivatives of order " + std::to_string(m) + " are not available");
  const int n = mesh.dimension();
  const bool sup = p == kInfinity;
  const auto& rule = simplex_rule(n, sup ? 10 : order);
  const auto& mono = MonomialTable::get(n);
  const int first = mono.count(m - 1), last = mono.count(m);
  std::vector<double> alpha_factorial;
  for (int idx = first; idx < last; ++idx) {
    double fa = 1.0;
    for (int i = 0; i < n; ++i) fa *= std::tgamma(mono.exponent(idx)[i] + 1.0);
    alpha_factorial.push_back(fa);
  }
  const int na = last - first;
  std::vector<double> global(na, 0.0);
  NormResult r;
  std::vector<Polynomial> t;
  for (int c : cells) {
    const auto& chart = mesh.cell_chart(c);
    std::vector<double> acc(na, 0.0);
    for (int q = 0; q < rule.size(); ++q) {
      Eigen::VectorXd x = chart.to_physical(std::span<const double>(rule.points.col(q).data(), n));
      f.taylor(c, x, m, t);
      for (int a = 0; a < na; ++a) {
        double norm2 = 0.0;
        for (const auto& comp : t) {
          const double d = alpha_factorial[a] * (first + a < comp.size() ? comp[first + a] : 0.0);
          norm2 += d * d;
        }
        const double v = std::sqrt(norm2);
        if (sup) acc[a] = std::max(acc[a], v);
        else acc[a] += rule.weights(q) * std::pow(v, p);
      }
    }
    double cell_value = 0.0;
    for (int a = 0; a < na; ++a) {
      if (sup) {
        cell_value += acc[a];
        global[a] = std::max(global[a], acc[a]);
      } else {
        acc[a] *= chart.measure();
        cell_value += std::pow(acc[a], 1.0 / p);
        global[a] += acc[a];
      }
    }
    r.per_cell.push_back(cell_value);
  }
  for (int a = 0; a < na; ++a) r.global += sup ? global[a] : std::pow(global[a], 1.0 / p);
  return r;
}

}  // namespace feec
