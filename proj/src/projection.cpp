#include "feec/projection.hpp"

#include <cmath>
#include <stdexcept>

namespace feec {

std::string backend_name(Backend b) { return b == Backend::L2 ? "l2" : "taylor"; }

Backend parse_backend(const std::string& s) {
  if (s == "l2") return Backend::L2;
  if (s == "taylor") return Backend::Taylor;
  throw std::invalid_argument("unknown projection backend '" + s + "' (expected l2 or taylor)");
}

Ball taylor_ball(const SimplicialComplex& mesh, int cell) {
  const int n = mesh.dimension();
  const auto& verts = mesh.simplex(n, cell).vertices;
  // Facet i is opposite to vertex i; the incenter weights vertices by the
  // measure of the opposite facet.
  Eigen::VectorXd center = Eigen::VectorXd::Zero(n);
  double area = 0.0;
  for (int i = 0; i <= n; ++i) {
    Eigen::MatrixXd pts(n, n);
    for (int j = 0, c = 0; j <= n; ++j)
      if (j != i) pts.col(c++) = mesh.vertex(verts[j]);
    const double a = SimplexChart(pts).measure();
    center += a * mesh.vertex(verts[i]);
    area += a;
  }
  return Ball{center / area, 0.9 * n * mesh.volume(n, cell) / area};
}

PolyForm averaged_taylor(const SimplicialComplex& mesh, int cell, const FieldSample& field, int degree) {
  const int n = mesh.dimension();
  const int k = field.form_degree();
  const auto& chart = mesh.cell_chart(cell);
  const Ball ball = taylor_ball(mesh, cell);
  const auto& rule = ball_rule(n);
  const Eigen::VectorXd anchor = mesh.centroid(n, cell);
  const FieldHint hint{cell, std::span<const double>(anchor.data(), n)};

  std::vector<Polynomial> acc(SubsetTable::get(n, k).size(), Polynomial(n, degree));
  std::vector<Jet> jets;
  AffineMap shift{Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd(n)};
  for (int q = 0; q < rule.size(); ++q) {
    const Eigen::VectorXd y = ball.center + ball.radius * rule.points.col(q);
    field.jet(std::span<const double>(y.data(), n), hint, degree, jets);
    // The jet is a polynomial in x - y; the result uses x - origin.
    shift.b = chart.origin() - y;
    for (size_t c = 0; c < acc.size(); ++c)
      acc[c].axpy(rule.weights(q), jets[c].series().truncated(degree).rebounded(degree).compose(shift));
  }
  return chart.pull_back(PolyForm(n, k, std::move(acc)));
}

PolyForm trimming_interpolation(const PolyForm& a, int r) {
  if (a.degree() > r + 1) throw std::invalid_argument("trimming_interpolation: input degree exceeds r + 1");
  const auto& el = LocalElement::get(a.dim(), Family::Trimmed, r, a.form_degree());
  return el.combine(el.apply_dofs(a));
}

namespace {

Eigen::VectorXd l2_coefficients(const FESpace& space, int cell, const FieldSample& field) {
  const auto& mesh = space.mesh();
  const int n = mesh.dimension();
  const auto& el = space.element();
  const auto& chart = mesh.cell_chart(cell);
  const auto& rule = simplex_rule(n, kProjectionQuadratureOrder);
  const auto& vals = el.values_at(rule);
  const Eigen::MatrixXd P = chart.pushforward_components(space.form_degree());
  const Eigen::VectorXd anchor = mesh.centroid(n, cell);
  const FieldHint hint{cell, std::span<const double>(anchor.data(), n)};
  Eigen::VectorXd b = Eigen::VectorXd::Zero(el.size());
  Eigen::VectorXd w(field.num_components());
  for (int q = 0; q < rule.size(); ++q) {
    const Eigen::VectorXd xi = rule.points.col(q);
    const Eigen::VectorXd x = chart.to_physical(std::span<const double>(xi.data(), n));
    field.value(std::span<const double>(x.data(), n), hint, std::span<double>(w.data(), w.size()));
    b += rule.weights(q) * (P * vals[q]).transpose() * w;
  }
  b *= chart.measure();
  const Eigen::MatrixXd M = el.mass_matrix(chart);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw std::runtime_error("local_project_l2: local mass matrix is not positive definite");
  return ldlt.solve(b);
}

}  // namespace

Eigen::VectorXd local_projection(const FESpace& space, int cell, const FieldSample& field, Backend backend) {
  if (field.ambient_dim() != space.mesh().dimension() || field.form_degree() != space.form_degree())
    throw std::invalid_argument("local_projection: field has the wrong form degree");
  if (backend == Backend::L2) return l2_coefficients(space, cell, field);
  const int deg = space.family() == Family::Full ? space.degree() : space.degree() + 1;
  if (field.max_derivative_order() < deg)
    throw std::invalid_argument("local_project_taylor: field '" + field.name + "' provides no derivatives of order " +
                                std::to_string(deg));
  // For the trimmed family the local DOFs of the degree r+1 polynomial are
  // those of its trimmed interpolant.
  return space.element().apply_dofs(averaged_taylor(space.mesh(), cell, field, deg));
}

PolyForm local_project_l2(const FESpace& space, int cell, const FieldSample& field) {
  return space.element().combine(local_projection(space, cell, field, Backend::L2));
}

PolyForm local_project_taylor(const FESpace& space, int cell, const FieldSample& field) {
  return space.element().combine(local_projection(space, cell, field, Backend::Taylor));
}

PolyForm local_commuting_partner(const FESpace& space, int cell, const FieldSample& dfield) {
  if (dfield.form_degree() != space.form_degree() + 1)
    throw std::invalid_argument("local_commuting_partner: expects a (k+1)-form");
  const int r = space.degree();
  if (space.form_degree() == space.mesh().dimension())
    return exterior_derivative(PolyForm(dfield.ambient_dim(), space.form_degree(), 0));
  if (space.family() == Family::Full) return averaged_taylor(space.mesh(), cell, dfield, r - 1);
  return trimming_interpolation(averaged_taylor(space.mesh(), cell, dfield, r), r);
}

BrokenField broken_from_coefficients(const FESpace& space, std::vector<Eigen::VectorXd> coefficients) {
  if (static_cast<int>(coefficients.size()) != space.mesh().num_cells())
    throw std::invalid_argument("broken_from_coefficients: one coefficient vector per cell is required");
  BrokenField b;
  b.form_degree = space.form_degree();
  for (const auto& c : coefficients) b.forms.push_back(space.element().combine(c));
  b.coefficients = std::move(coefficients);
  return b;
}

BrokenField broken_projection(const FESpace& space, const FieldSample& field, Backend backend) {
  std::vector<Eigen::VectorXd> c;
  for (int cell = 0; cell < space.mesh().num_cells(); ++cell) c.push_back(local_projection(space, cell, field, backend));
  return broken_from_coefficients(space, std::move(c));
}

std::string weight_kind_name(WeightKind w) {
  switch (w) {
    case WeightKind::ErnGuermond: return "eg";
    case WeightKind::Clement: return "clement";
    default: return "custom";
  }
}

WeightKind parse_weight_kind(const std::string& s) {
  if (s == "eg") return WeightKind::ErnGuermond;
  if (s == "clement") return WeightKind::Clement;
  if (s == "custom") return WeightKind::Custom;
  throw std::invalid_argument("unknown weight scheme '" + s + "' (expected eg or clement)");
}

double WeightScheme::weight(int d, int s, int cell) const {
  for (const auto& [c, w] : w_.at(d).at(s))
    if (c == cell) return w;
  return 0.0;
}

WeightScheme make_weights(WeightKind kind, const SimplicialComplex& mesh, const BoundarySubcomplex& boundary) {
  if (kind == WeightKind::Custom) throw std::invalid_argument("make_weights: use make_custom_weights for custom weights");
  WeightScheme w;
  w.kind_ = kind;
  const int n = mesh.dimension();
  Representatives reps;
  if (kind == WeightKind::Clement) reps = choose_representatives(mesh, boundary);
  w.w_.resize(n + 1);
  for (int d = 0; d <= n; ++d) {
    w.w_[d].resize(mesh.num_simplices(d));
    for (int s = 0; s < mesh.num_simplices(d); ++s) {
      const auto& cells = mesh.cells_containing(d, s);
      for (int c : cells) {
        const double v =
            kind == WeightKind::ErnGuermond ? 1.0 / static_cast<double>(cells.size()) : (c == reps.cell[d][s] ? 1.0 : 0.0);
        w.w_[d][s].emplace_back(c, v);
      }
    }
  }
  return w;
}

WeightScheme make_custom_weights(const SimplicialComplex& mesh, const std::function<double(int, int, int)>& c) {
  WeightScheme w;
  w.kind_ = WeightKind::Custom;
  const int n = mesh.dimension();
  w.w_.resize(n + 1);
  for (int d = 0; d <= n; ++d) {
    w.w_[d].resize(mesh.num_simplices(d));
    for (int s = 0; s < mesh.num_simplices(d); ++s) {
      double sum = 0.0;
      for (int cell : mesh.cells_containing(d, s)) {
        const double v = c(d, s, cell);
        if (!(v >= 0.0))
          throw std::invalid_argument("make_custom_weights: negative weight for simplex (" + std::to_string(d) + ", " +
                                      std::to_string(s) + ")");
        sum += v;
        w.w_[d][s].emplace_back(cell, v);
      }
      if (std::abs(sum - 1.0) > 1e-14)
        throw std::invalid_argument("make_custom_weights: weights of simplex (" + std::to_string(d) + ", " +
                                    std::to_string(s) + ") sum to " + std::to_string(sum));
    }
  }
  return w;
}

FEFunction average(const FESpace& space, const BrokenField& broken, const WeightScheme& weights) {
  const auto& mesh = space.mesh();
  if (static_cast<int>(broken.coefficients.size()) != mesh.num_cells() || broken.form_degree != space.form_degree())
    throw std::invalid_argument("average: broken field does not match the space");
  FEFunction u = zero_function(space);
  const auto& el = space.element();
  for (const auto& dof : space.dofs()) {
    if (dof.active < 0) continue;
    double v = 0.0;
    for (const auto& [cell, c] : weights.weights(dof.dim, dof.simplex)) {
      if (c == 0.0) continue;
      const int p = mesh.local_index(cell, dof.dim, dof.simplex);
      v += c * broken.coefficients[cell](el.dof_offset(dof.dim, p) + dof.index);
    }
    u.coefficients(dof.active) = v;
  }
  return u;
}

FEFunction project(const FESpace& space, const FieldSample& field, const WeightScheme& weights, Backend backend) {
  return average(space, broken_projection(space, field, backend), weights);
}

}  // namespace feec
