#include "feec/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace feec {

std::string norm_id(const NormSpec& norm) {
  const std::string p = norm.p == kInfinity ? "inf" : std::to_string(static_cast<int>(norm.p));
  return norm.s == 0 ? "L" + p : "W" + std::to_string(norm.s) + "," + p;
}

NormSpec parse_norm(const std::string& id) {
  auto parse_p = [&](const std::string& p) {
    if (p == "1") return 1.0;
    if (p == "2") return 2.0;
    if (p == "inf") return kInfinity;
    throw std::invalid_argument("unknown norm '" + id + "'");
  };
  if (id.size() >= 2 && id[0] == 'L') return NormSpec{0, parse_p(id.substr(1))};
  if (id.rfind("W1,", 0) == 0) return NormSpec{1, parse_p(id.substr(3))};
  if (id == "H1") return NormSpec{1, 2.0};
  throw std::invalid_argument("unknown norm '" + id + "' (expected L1, L2, Linf, W1,1, W1,2 or W1,inf)");
}

ErrorReport error_report(const FEFunction& u, const FieldSample& field, const std::vector<NormSpec>& norms,
                         std::vector<int> cells) {
  const auto& mesh = u.space->mesh();
  if (cells.empty()) cells = all_cells(mesh);
  FieldCellFunction f(mesh, field);
  PiecewiseCellFunction g(mesh, physical_forms(u));
  DifferenceCellFunction diff(f, g);
  ErrorReport rep;
  rep.norms = norms;
  rep.cells = cells;
  for (const auto& nm : norms) {
    if (nm.s < 0 || nm.s > 1) throw std::invalid_argument("error_report: Sobolev order must be 0 or 1");
    const NormResult r = nm.s == 0 ? lp_norm(mesh, diff, cells, nm.p, kAnalysisQuadratureOrder)
                                   : sobolev_seminorm(mesh, diff, cells, nm.s, nm.p, kAnalysisQuadratureOrder);
    rep.global.push_back(r.global);
    rep.per_cell.push_back(r.per_cell);
  }
  return rep;
}

double fit_slope(const std::vector<double>& h, const std::vector<double>& error) {
  if (h.size() != error.size() || h.size() < 3) throw std::invalid_argument("fit_slope: slopes need at least 3 levels");
  const size_t n0 = h.size() - 3;
  double mx = 0.0, my = 0.0;
  for (size_t i = n0; i < h.size(); ++i) {
    if (!(error[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    mx += std::log(h[i]) / 3.0;
    my += std::log(error[i]) / 3.0;
  }
  double sxy = 0.0, sxx = 0.0;
  for (size_t i = n0; i < h.size(); ++i) {
    const double dx = std::log(h[i]) - mx;
    sxy += dx * (std::log(error[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

std::vector<int> cells_touching(const SimplicialComplex& mesh, const BoundarySubcomplex& boundary) {
  std::set<int> out;
  for (int v : boundary.ids(0))
    for (int c : mesh.cells_containing(0, v)) out.insert(c);
  return {out.begin(), out.end()};
}

ConvergenceReport convergence_study(const SimplicialComplex& base, int first_level, int last_level,
                                    const SpaceParams& params, const FieldSample& field, WeightKind weights,
                                    Backend backend, const std::vector<NormSpec>& norms, CellSelector cells) {
  if (first_level < 0 || last_level < first_level) throw std::invalid_argument("convergence_study: bad level range");
  ConvergenceReport rep;
  rep.weights = weight_kind_name(weights);
  rep.backend = backend_name(backend);
  rep.field = field.name;
  rep.norms = norms;
  SimplicialComplex mesh = base;
  for (int i = 0; i < first_level; ++i) mesh = refine_uniform(mesh);
  std::vector<double> hs;
  std::vector<std::vector<double>> errs(norms.size());
  for (int level = first_level; level <= last_level; ++level) {
    if (level > first_level) mesh = refine_uniform(mesh);
    const auto U = named_boundary(mesh, params.boundary);
    FESpace space(mesh, params.family, params.r, params.k, U);
    rep.space = space.label();
    const FEFunction u = project(space, field, make_weights(weights, mesh, U), backend);
    const ErrorReport er = error_report(u, field, norms, cells ? cells(mesh) : std::vector<int>{});
    LevelRecord rec{level, mesh.h_max(), mesh.num_cells(), space.num_active(), er.global};
    if (!hs.empty() && !(rec.h_max < hs.back())) throw std::logic_error("convergence_study: h_max is not decreasing");
    hs.push_back(rec.h_max);
    for (size_t i = 0; i < norms.size(); ++i) errs[i].push_back(er.global[i]);
    rep.levels.push_back(std::move(rec));
  }
  if (hs.size() >= 3)
    for (const auto& e : errs) rep.slopes.push_back(fit_slope(hs, e));
  return rep;
}

namespace {

// Per-cell pieces of the weighted quadratic functional.
struct CellSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};

double cell_h(const SimplicialComplex& mesh, int cell) { return mesh.diameter(mesh.dimension(), cell); }

CellSystem cell_system(const FESpace& space, int cell, const FieldSample& field, const FieldSample& dfield) {
  const auto& mesh = space.mesh();
  const int n = mesh.dimension();
  const int k = space.form_degree();
  const auto& el = space.element();
  const auto& chart = mesh.cell_chart(cell);
  const double h2 = std::pow(cell_h(mesh, cell), 2);
  CellSystem sys{el.mass_matrix(chart), Eigen::VectorXd::Zero(el.size())};
  if (k < n) sys.A += h2 * el.derivative_mass_matrix(chart);
  const auto& rule = simplex_rule(n, kAnalysisQuadratureOrder);
  const auto& vals = el.values_at(rule);
  const Eigen::MatrixXd P = chart.pushforward_components(k);
  Eigen::MatrixXd Pd;
  if (k < n) Pd = chart.pushforward_components(k + 1);
  const Eigen::VectorXd anchor = mesh.centroid(n, cell);
  const FieldHint hint{cell, std::span<const double>(anchor.data(), n)};
  Eigen::VectorXd w(field.num_components()), dw(k < n ? dfield.num_components() : 0);
  for (int q = 0; q < rule.size(); ++q) {
    const Eigen::VectorXd xi = rule.points.col(q);
    const Eigen::VectorXd x = chart.to_physical(std::span<const double>(xi.data(), n));
    const std::span<const double> xs(x.data(), n);
    field.value(xs, hint, std::span<double>(w.data(), w.size()));
    sys.b += rule.weights(q) * (P * vals[q]).transpose() * w;
    if (k < n) {
      dfield.value(xs, hint, std::span<double>(dw.data(), dw.size()));
      sys.b += rule.weights(q) * h2 * (Pd * el.derivative_values_at(rule)[q]).transpose() * dw;
    }
  }
  sys.b *= chart.measure();
  return sys;
}

// Squared weighted error of local coefficients c on a cell, by quadrature.
double cell_error_sq(const FESpace& space, int cell, const Eigen::VectorXd& c, const FieldSample& field,
                     const FieldSample& dfield) {
  const auto& mesh = space.mesh();
  const int n = mesh.dimension();
  const int k = space.form_degree();
  const auto& el = space.element();
  const auto& chart = mesh.cell_chart(cell);
  const double h2 = std::pow(cell_h(mesh, cell), 2);
  const auto& rule = simplex_rule(n, kAnalysisQuadratureOrder);
  const auto& vals = el.values_at(rule);
  const Eigen::MatrixXd P = chart.pushforward_components(k);
  Eigen::MatrixXd Pd;
  if (k < n) Pd = chart.pushforward_components(k + 1);
  const Eigen::VectorXd anchor = mesh.centroid(n, cell);
  const FieldHint hint{cell, std::span<const double>(anchor.data(), n)};
  Eigen::VectorXd w(field.num_components()), dw(k < n ? dfield.num_components() : 0);
  double s = 0.0;
  for (int q = 0; q < rule.size(); ++q) {
    const Eigen::VectorXd xi = rule.points.col(q);
    const Eigen::VectorXd x = chart.to_physical(std::span<const double>(xi.data(), n));
    const std::span<const double> xs(x.data(), n);
    field.value(xs, hint, std::span<double>(w.data(), w.size()));
    double e = (w - P * (vals[q] * c)).squaredNorm();
    if (k < n) {
      dfield.value(xs, hint, std::span<double>(dw.data(), dw.size()));
      e += h2 * (dw - Pd * (el.derivative_values_at(rule)[q] * c)).squaredNorm();
    }
    s += rule.weights(q) * e;
  }
  return s * chart.measure();
}

void check_fields(const FESpace& space, const FieldSample& field, const FieldSample& dfield) {
  const int k = space.form_degree();
  if (field.form_degree() != k || field.ambient_dim() != space.mesh().dimension())
    throw std::invalid_argument("best approximation: field has the wrong form degree");
  if (k < space.mesh().dimension() && dfield.form_degree() != k + 1)
    throw std::invalid_argument("best approximation: derivative field has the wrong form degree");
}

}  // namespace

double weighted_error(const FEFunction& u, const FieldSample& field, const FieldSample& dfield) {
  const auto& space = *u.space;
  check_fields(space, field, dfield);
  double s = 0.0;
  for (int c = 0; c < space.mesh().num_cells(); ++c) s += cell_error_sq(space, c, local_coefficients(u, c), field, dfield);
  return std::sqrt(s);
}

std::vector<double> local_best_errors(const FESpace& space, const FieldSample& field, const FieldSample& dfield) {
  check_fields(space, field, dfield);
  std::vector<double> out;
  for (int c = 0; c < space.mesh().num_cells(); ++c) {
    const CellSystem sys = cell_system(space, c, field, dfield);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(sys.A);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
      throw std::runtime_error("local_best_errors: local system is not positive definite");
    out.push_back(std::sqrt(cell_error_sq(space, c, ldlt.solve(sys.b), field, dfield)));
  }
  return out;
}

BestApproxResult best_approximation(const FESpace& space, const FieldSample& field, const FieldSample& dfield) {
  check_fields(space, field, dfield);
  const auto& mesh = space.mesh();
  const int na = space.num_active();
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(na);
  BestApproxResult res;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellSystem sys = cell_system(space, c, field, dfield);
    const auto& ids = space.cell_dofs(c);
    std::vector<int> act(ids.size());
    for (size_t l = 0; l < ids.size(); ++l) act[l] = space.dofs()[ids[l]].active;
    for (size_t i = 0; i < ids.size(); ++i) {
      if (act[i] < 0) continue;
      rhs(act[i]) += sys.b(i);
      for (size_t j = 0; j < ids.size(); ++j)
        if (act[j] >= 0) trip.emplace_back(act[i], act[j], sys.A(i, j));
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(sys.A);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
      throw std::runtime_error("best_approximation: local system is not positive definite");
    res.local.push_back(std::sqrt(cell_error_sq(space, c, ldlt.solve(sys.b), field, dfield)));
  }
  res.minimizer = zero_function(space);
  if (na > 0) {
    Eigen::SparseMatrix<double> A(na, na);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
    if (solver.info() != Eigen::Success) throw std::runtime_error("best_approximation: global system is singular");
    res.minimizer.coefficients = solver.solve(rhs);
    if (solver.info() != Eigen::Success) throw std::runtime_error("best_approximation: global solve failed");
  }
  res.global = weighted_error(res.minimizer, field, dfield);
  double s = 0.0;
  for (double e : res.local) s += e * e;
  res.local_total = std::sqrt(s);
  constexpr double kFloor = 1e-10;
  res.ratio = (res.global < kFloor && res.local_total < kFloor) ? 1.0 : res.global / res.local_total;
  return res;
}

StabilityResult stability_constant(const FESpace& space, const WeightScheme& weights) {
  const auto& mesh = space.mesh();
  const auto& el = space.element();
  const int N = el.size();
  StabilityResult res;
  std::vector<Eigen::MatrixXd> mass;
  std::vector<Eigen::LLT<Eigen::MatrixXd>> chol;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    mass.push_back(el.mass_matrix(mesh.cell_chart(c)));
    chol.emplace_back(mass.back());
    if (chol.back().info() != Eigen::Success)
      throw std::runtime_error("stability_constant: mass matrix is not positive definite");
  }
  for (int t = 0; t < mesh.num_cells(); ++t) {
    // G_c maps the local coefficients on patch cell c to the coefficients of
    // the averaged function on T. The squared constant is the largest
    // eigenvalue of L_T^T (sum_c G_c M_c^{-1} G_c^T) L_T with M_T = L_T L_T^T.
    std::map<int, Eigen::MatrixXd> G;
    const auto& ids = space.cell_dofs(t);
    for (int l = 0; l < N; ++l) {
      const auto& dof = space.dofs()[ids[l]];
      if (dof.active < 0) continue;
      for (const auto& [c, w] : weights.weights(dof.dim, dof.simplex)) {
        if (w == 0.0) continue;
        auto it = G.try_emplace(c, Eigen::MatrixXd::Zero(N, N)).first;
        const int p = mesh.local_index(c, dof.dim, dof.simplex);
        it->second(l, el.dof_offset(dof.dim, p) + dof.index) += w;
      }
    }
    Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(N, N);
    for (const auto& [c, Gc] : G) Z += Gc * chol[c].solve(Gc.transpose());
    const Eigen::MatrixXd LT = chol[t].matrixL();
    const Eigen::MatrixXd K = LT.transpose() * Z * LT;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K, Eigen::EigenvaluesOnly);
    const double ratio = std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
    res.per_cell.push_back(ratio);
    res.constant = std::max(res.constant, ratio);
  }
  return res;
}

namespace {

// Barycentric coordinate of local position p on a cell, in offset
// coordinates x - origin.
// Barycentric coordinate p of the reference simplex.
Polynomial reference_barycentric(int n, int p) {
  if (p > 0) return Polynomial::variable(n, p - 1);
  Polynomial out = Polynomial::constant(n, 1.0).rebounded(1);
  for (int j = 0; j < n; ++j) out.axpy(-1.0, Polynomial::variable(n, j));
  return out;
}

}  // namespace

BoundaryTestResult weak_boundary_residual(const FEFunction& u, int num_tests, unsigned seed) {
  return weak_boundary_residual(u, u.space->boundary(), num_tests, seed);
}

BoundaryTestResult weak_boundary_residual(const FEFunction& u, const BoundarySubcomplex& U, int num_tests,
                                          unsigned seed) {
  const auto& space = *u.space;
  const auto& mesh = space.mesh();
  const int n = mesh.dimension();
  const int k = space.form_degree();
  BoundaryTestResult res;
  const int m = n - k - 1;
  if (m < 0 || U.empty()) return res;

  // Vertices of U all of whose boundary facets lie in U, and the facets of U.
  std::vector<std::pair<int, int>> supports;
  for (int v : U.ids(0)) {
    bool inside = true;
    for (int f : mesh.superstar(0, v, n - 1))
      if (mesh.is_boundary_facet(f) && !U.contains(n - 1, f)) inside = false;
    if (inside) supports.emplace_back(0, v);
  }
  for (int f : U.ids(n - 1)) supports.emplace_back(n - 1, f);
  if (supports.empty()) return res;

  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const int nc = SubsetTable::get(n, m).size();
  double reference_volume = 1.0;
  for (int i = 2; i <= n; ++i) reference_volume /= i;
  std::vector<PolyForm> local(mesh.num_cells());
  for (int t = 0; t < num_tests; ++t) {
    const auto [sd, s] = supports[rng() % supports.size()];
    std::vector<Polynomial> constant(nc);
    for (auto& p : constant) p = Polynomial::constant(n, coef(rng));
    const PolyForm C(n, m, constant);
    double total = 0.0, scale = 0.0;
    for (int c : mesh.cells_containing(sd, s)) {
      const auto& chart = mesh.cell_chart(c);
      // Both integrands are pulled back to the reference cell before expansion.
      if (local[c].num_components() == 0) local[c] = local_form(u, c);
      const PolyForm& w = local[c];
      const auto& verts = mesh.simplex(n, c).vertices;
      Polynomial bump = Polynomial::constant(n, 1.0);
      for (int v : mesh.simplex(sd, s).vertices) {
        const int p = static_cast<int>(std::find(verts.begin(), verts.end(), v) - verts.begin());
        const Polynomial lam = reference_barycentric(n, p);
        bump = bump * (sd == 0 ? lam * lam : lam);
      }
      const PolyForm eta = wedge(PolyForm::scalar(bump), chart.pull_back(C));
      const PolyForm deta = exterior_derivative(eta);
      const PolyForm dw = exterior_derivative(w);
      const double i1 = chart.orientation() * integrate_reference(wedge(w, deta));
      const double i2 = chart.orientation() * integrate_reference(wedge(dw, eta));
      const double sign = k % 2 ? -1.0 : 1.0;
      total += i1 + sign * i2;
      scale += reference_volume * (w.max_abs() * deta.max_abs() + dw.max_abs() * eta.max_abs());
    }
    const double rel = scale > 0.0 ? std::abs(total) / scale : 0.0;
    res.residuals.push_back(rel);
    res.max_relative = std::max(res.max_relative, rel);
    ++res.num_tests;
  }
  return res;
}

}  // namespace feec
