#include "feec/fespace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace feec {

namespace {

constexpr double kMaxCondition = 1e12;
constexpr double kInsideTol = 1e-10;

std::vector<std::vector<int>> subsets_of_size(int count, int size) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(cur.size()) == size) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < count; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

double dof_value(const PolyForm& weight, const PolyForm& reference, std::span<const int> positions) {
  return integrate_reference(wedge(weight, trace(reference, positions)));
}

bool inside_reference(const Eigen::VectorXd& xi, double tol) {
  double s = 0.0;
  for (int i = 0; i < xi.size(); ++i) {
    if (xi(i) < -tol) return false;
    s += xi(i);
  }
  return s <= 1.0 + tol;
}

}  // namespace

std::string family_name(Family f) { return f == Family::Full ? "P" : "Pminus"; }

Family parse_family(const std::string& s) {
  if (s == "P" || s == "A" || s == "full") return Family::Full;
  if (s == "Pminus" || s == "B" || s == "trimmed") return Family::Trimmed;
  throw std::invalid_argument("unknown element family '" + s + "' (expected P or Pminus)");
}

std::vector<PolyForm> dof_weight_basis(Family family, int m, int r, int k) {
  if (m < k) return {};
  const int wdeg = family == Family::Full ? r + k - m : r + k - m - 1;
  if (family == Family::Full) {
    if (wdeg < 1) return {};
    return basis_trimmed(m, wdeg, m - k);
  }
  if (wdeg < 0) return {};
  return basis_full(m, wdeg, m - k);
}

const std::vector<std::vector<int>>& local_subsimplices(int n, int d) {
  static const auto tables = [] {
    std::vector<std::vector<std::vector<std::vector<int>>>> t(kMaxDim + 1);
    for (int nn = 0; nn <= kMaxDim; ++nn)
      for (int dd = 0; dd <= nn; ++dd) t[nn].push_back(subsets_of_size(nn + 1, dd + 1));
    return t;
  }();
  if (n < 0 || n > kMaxDim || d < 0 || d > n) throw std::invalid_argument("local_subsimplices: dimension out of range");
  return tables[n][d];
}

const LocalElement& LocalElement::get(int n, Family family, int r, int k) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, int, int>, std::unique_ptr<LocalElement>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_tuple(n, static_cast<int>(family), r, k);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::unique_ptr<LocalElement>(new LocalElement(n, family, r, k))).first;
  return *it->second;
}

LocalElement::LocalElement(int n, Family family, int r, int k) : n_(n), r_(r), k_(k), family_(family) {
  if (n < 1 || n > kMaxDim || k < 0 || k > n) throw std::invalid_argument("LocalElement: dimension out of range");
  if (r < 1) throw std::invalid_argument("LocalElement: degree must be at least 1");
  basis_ = family == Family::Full ? &basis_full(n, r, k) : &basis_trimmed(n, r, k);

  offsets_.assign(n + 1, {});
  per_simplex_.assign(n + 1, 0);
  for (int d = 0; d <= n; ++d) {
    const auto weights = dof_weight_basis(family, d, r, k);
    per_simplex_[d] = static_cast<int>(weights.size());
    const auto& subs = local_subsimplices(n, d);
    for (int s = 0; s < static_cast<int>(subs.size()); ++s) {
      offsets_[d].push_back(static_cast<int>(dofs_.size()));
      for (int i = 0; i < per_simplex_[d]; ++i) dofs_.push_back(LocalDof{d, s, i, weights[i]});
    }
  }
  const int N = static_cast<int>(basis_->size());
  if (static_cast<int>(dofs_.size()) != N)
    throw std::logic_error("LocalElement: " + std::to_string(dofs_.size()) + " DOFs for a shape space of dimension " +
                           std::to_string(N));

  Eigen::MatrixXd D(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) D(i, j) = apply_dof(i, (*basis_)[j]);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(D);
  const auto& sv = svd.singularValues();
  condition_ = sv(N - 1) > 0.0 ? sv(0) / sv(N - 1) : std::numeric_limits<double>::infinity();
  if (!(condition_ <= kMaxCondition))
    throw std::runtime_error("LocalElement: DOF matrix of " + family_name(family) + std::to_string(r) + "Lambda" +
                             std::to_string(k) + " is singular (condition " + std::to_string(condition_) + ")");

  const Eigen::MatrixXd X = D.colPivHouseholderQr().solve(Eigen::MatrixXd::Identity(N, N));
  const int len = static_cast<int>(PolyForm(n, k, r).flatten(r).size());
  Eigen::MatrixXd B(len, N);
  for (int j = 0; j < N; ++j) B.col(j) = (*basis_)[j].flatten(r);
  const Eigen::MatrixXd Psi = B * X;
  for (int l = 0; l < N; ++l) dual_.push_back(PolyForm::unflatten(n, k, r, Psi.col(l)));

  std::vector<PolyForm> dpsi;
  if (k < n)
    for (const auto& p : dual_) dpsi.push_back(exterior_derivative(p));
  gram_ = gram_tensor(dual_, k, n);
  if (k < n) dgram_ = gram_tensor(dpsi, k + 1, n);
}

Eigen::MatrixXd LocalElement::gram_tensor(const std::vector<PolyForm>& forms, int k_forms, int n) {
  const int N = static_cast<int>(forms.size());
  const int nc = SubsetTable::get(n, k_forms).size();
  int deg = 0;
  for (const auto& f : forms) deg = std::max(deg, f.degree_bound());
  const auto& mono = MonomialTable::get(n);
  const int nm = mono.count(deg);
  Eigen::MatrixXd H(nm, nm);
  for (int a = 0; a < nm; ++a)
    for (int b = 0; b < nm; ++b) {
      MultiIndex e{};
      for (int i = 0; i < kMaxDim; ++i) e[i] = mono.exponent(a)[i] + mono.exponent(b)[i];
      H(a, b) = reference_monomial_integral(n, e);
    }
  std::vector<Eigen::MatrixXd> C(nc, Eigen::MatrixXd::Zero(nm, N));
  for (int l = 0; l < N; ++l)
    for (int t = 0; t < nc; ++t) {
      const Polynomial p = forms[l].component(t).rebounded(deg);
      for (int a = 0; a < nm; ++a) C[t](a, l) = p[a];
    }
  Eigen::MatrixXd G(nc * N, nc * N);
  for (int t = 0; t < nc; ++t)
    for (int u = 0; u < nc; ++u) G.block(t * N, u * N, N, N) = C[t].transpose() * H * C[u];
  return G;
}

double LocalElement::apply_dof(int i, const PolyForm& a) const {
  const auto& dof = dofs_.at(i);
  return dof_value(dof.weight, a, local_subsimplices(n_, dof.dim)[dof.subsimplex]);
}

const Eigen::MatrixXd& LocalElement::dof_matrix(int degree) const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto it = dof_matrices_.find(degree);
  if (it != dof_matrices_.end()) return it->second;
  const auto& full = basis_full(n_, degree, k_);
  Eigen::MatrixXd A(size(), full.size());
  for (int j = 0; j < static_cast<int>(full.size()); ++j)
    for (int i = 0; i < size(); ++i) {
      const auto& dof = dofs_[i];
      A(i, j) = dof_value(dof.weight, full[j], local_subsimplices(n_, dof.dim)[dof.subsimplex]);
    }
  return dof_matrices_.emplace(degree, std::move(A)).first->second;
}

Eigen::VectorXd LocalElement::apply_dofs(const PolyForm& a) const {
  if (a.dim() != n_ || a.form_degree() != k_) throw std::invalid_argument("apply_dofs: form of the wrong shape");
  const int deg = a.degree();
  if (deg < 0) return Eigen::VectorXd::Zero(size());
  return dof_matrix(deg) * a.flatten(deg);
}

PolyForm LocalElement::combine(const Eigen::VectorXd& c) const {
  if (c.size() != size()) throw std::invalid_argument("combine: coefficient vector of the wrong length");
  PolyForm out(n_, k_, r_);
  for (int l = 0; l < size(); ++l)
    if (c(l) != 0.0) out.axpy(c(l), dual_[l]);
  return out;
}

namespace {

Eigen::MatrixXd contract_gram(const Eigen::MatrixXd& G, const Eigen::MatrixXd& P, int N, double jac) {
  const Eigen::MatrixXd R = P.transpose() * P;
  const int nc = static_cast<int>(R.rows());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
  for (int t = 0; t < nc; ++t)
    for (int u = 0; u < nc; ++u)
      if (R(t, u) != 0.0) M += R(t, u) * G.block(t * N, u * N, N, N);
  return jac * M;
}

}  // namespace

Eigen::MatrixXd LocalElement::mass_matrix(const SimplexChart& chart) const {
  return contract_gram(gram_, chart.pushforward_components(k_), size(), std::abs(chart.jacobian().determinant()));
}

Eigen::MatrixXd LocalElement::derivative_mass_matrix(const SimplexChart& chart) const {
  if (k_ == n_) return Eigen::MatrixXd::Zero(size(), size());
  return contract_gram(dgram_, chart.pushforward_components(k_ + 1), size(),
                       std::abs(chart.jacobian().determinant()));
}

const std::vector<Eigen::MatrixXd>& LocalElement::values_at(const QuadratureRule& rule) const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  const auto key = std::make_pair(rule.dim, rule.order);
  auto it = values_.find(key);
  if (it != values_.end()) return it->second;
  std::vector<Eigen::MatrixXd> out;
  const int nc = SubsetTable::get(n_, k_).size();
  for (int q = 0; q < rule.size(); ++q) {
    Eigen::MatrixXd V(nc, size());
    const Eigen::VectorXd xi = rule.points.col(q);
    for (int l = 0; l < size(); ++l)
      for (int t = 0; t < nc; ++t) V(t, l) = dual_[l].component(t)(std::span<const double>(xi.data(), xi.size()));
    out.push_back(std::move(V));
  }
  return values_.emplace(key, std::move(out)).first->second;
}

const std::vector<Eigen::MatrixXd>& LocalElement::derivative_values_at(const QuadratureRule& rule) const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  const auto key = std::make_pair(rule.dim, rule.order);
  auto it = dvalues_.find(key);
  if (it != dvalues_.end()) return it->second;
  std::vector<Eigen::MatrixXd> out;
  const int nc = SubsetTable::get(n_, k_ + 1).size();
  std::vector<PolyForm> dpsi;
  for (const auto& p : dual_) dpsi.push_back(exterior_derivative(p));
  for (int q = 0; q < rule.size(); ++q) {
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(nc, size());
    const Eigen::VectorXd xi = rule.points.col(q);
    for (int l = 0; l < size(); ++l)
      for (int t = 0; t < nc; ++t) V(t, l) = dpsi[l].component(t)(std::span<const double>(xi.data(), xi.size()));
    out.push_back(std::move(V));
  }
  return dvalues_.emplace(key, std::move(out)).first->second;
}

FESpace::FESpace(const SimplicialComplex& mesh, Family family, int r, int k, BoundarySubcomplex boundary)
    : mesh_(&mesh), family_(family), r_(r), k_(k), boundary_(std::move(boundary)) {
  const int n = mesh.dimension();
  if (k < 0 || k > n) throw std::invalid_argument("FESpace: form degree out of range");
  if (k == 0 && family == Family::Trimmed) {
    family_ = Family::Full;
    note_ = "Pminus" + std::to_string(r) + "Lambda0 is the same space as P" + std::to_string(r) +
            "Lambda0; using the full family";
  } else if (k == n && family == Family::Full) {
    family_ = Family::Trimmed;
    r_ = r + 1;
    note_ = "P" + std::to_string(r) + "Lambda" + std::to_string(n) + " is the same space as Pminus" +
            std::to_string(r + 1) + "Lambda" + std::to_string(n) + "; using the trimmed family";
  }
  if (r_ < 1) throw std::invalid_argument("FESpace: degree must be at least 1 (at least 0 for P with k = n)");
  element_ = &LocalElement::get(n, family_, r_, k_);

  first_dof_.assign(n + 1, {});
  for (int d = 0; d <= n; ++d) {
    first_dof_[d].assign(mesh.num_simplices(d), -1);
    const int per = element_->dofs_per_simplex(d);
    if (per == 0) continue;
    for (int s = 0; s < mesh.num_simplices(d); ++s) {
      first_dof_[d][s] = static_cast<int>(dofs_.size());
      const bool masked = boundary_.contains(d, s);
      for (int i = 0; i < per; ++i) {
        GlobalDof g{d, s, i, masked ? -1 : num_active_};
        if (!masked) {
          active_dofs_.push_back(static_cast<int>(dofs_.size()));
          ++num_active_;
        }
        dofs_.push_back(g);
      }
    }
  }

  cell_dofs_.assign(mesh.num_cells(), {});
  for (int c = 0; c < mesh.num_cells(); ++c)
    for (const auto& dof : element_->dofs())
      cell_dofs_[c].push_back(dof_index(dof.dim, mesh.cell_faces(c, dof.dim)[dof.subsimplex], dof.index));
}

std::string FESpace::label() const {
  return family_name(family_) + std::to_string(r_) + "Lambda" + std::to_string(k_);
}

int FESpace::dof_index(int d, int s, int i) const {
  if (d < 0 || d > mesh_->dimension() || s < 0 || s >= mesh_->num_simplices(d) || i < 0 ||
      i >= element_->dofs_per_simplex(d))
    throw std::invalid_argument("dof_index: no such degree of freedom");
  return first_dof_[d][s] + i;
}

std::vector<DofFunctional> FESpace::dof_functionals(int d, int s) const {
  if (d < 0 || d > mesh_->dimension() || s < 0 || s >= mesh_->num_simplices(d))
    throw std::invalid_argument("dof_functionals: no such simplex");
  std::vector<DofFunctional> out;
  const auto weights = dof_weight_basis(family_, d, r_, k_);
  for (int i = 0; i < static_cast<int>(weights.size()); ++i) out.push_back(DofFunctional{d, s, i, weights[i]});
  return out;
}

double apply_dof(const FESpace& space, const DofFunctional& f, int cell, const PolyForm& reference_on_cell) {
  const auto& mesh = space.mesh();
  const int p = mesh.local_index(cell, f.dim, f.simplex);
  if (p < 0) throw std::invalid_argument("apply_dof: the simplex of the functional is not a face of the cell");
  return dof_value(f.weight, reference_on_cell, local_subsimplices(mesh.dimension(), f.dim)[p]);
}

FEFunction zero_function(const FESpace& space) { return FEFunction{&space, Eigen::VectorXd::Zero(space.num_active())}; }

FEFunction global_shape_function(const FESpace& space, int global_dof) {
  if (global_dof < 0 || global_dof >= space.num_dofs()) throw std::invalid_argument("global_shape_function: no such DOF");
  const int a = space.dofs()[global_dof].active;
  if (a < 0) throw std::invalid_argument("global_shape_function: DOF is masked by the boundary subcomplex");
  FEFunction u = zero_function(space);
  u.coefficients(a) = 1.0;
  return u;
}

Eigen::VectorXd local_coefficients(const FEFunction& u, int cell) {
  const auto& space = *u.space;
  if (u.coefficients.size() != space.num_active())
    throw std::invalid_argument("FEFunction: coefficient vector does not match the space");
  const auto& ids = space.cell_dofs(cell);
  Eigen::VectorXd c(ids.size());
  for (size_t l = 0; l < ids.size(); ++l) {
    const int a = space.dofs()[ids[l]].active;
    c(l) = a < 0 ? 0.0 : u.coefficients(a);
  }
  return c;
}

PolyForm local_form(const FEFunction& u, int cell) {
  return u.space->element().combine(local_coefficients(u, cell));
}

PolyForm physical_form(const FEFunction& u, int cell) {
  return u.space->mesh().cell_chart(cell).push_forward(local_form(u, cell));
}

std::vector<PolyForm> physical_forms(const FEFunction& u) {
  std::vector<PolyForm> out;
  for (int c = 0; c < u.space->mesh().num_cells(); ++c) out.push_back(physical_form(u, c));
  return out;
}

std::vector<double> evaluate_fe(const FEFunction& u, int cell, const Eigen::VectorXd& x) {
  const auto& chart = u.space->mesh().cell_chart(cell);
  const Eigen::VectorXd xi = chart.to_reference(x);
  if (!inside_reference(xi, kInsideTol)) throw std::invalid_argument("evaluate_fe: point lies outside the cell");
  const Eigen::VectorXd ref = Eigen::Map<const Eigen::VectorXd>(
      local_form(u, cell).evaluate_components(std::span<const double>(xi.data(), xi.size())).data(),
      SubsetTable::get(chart.dim(), u.space->form_degree()).size());
  const Eigen::VectorXd phys = chart.pushforward_components(u.space->form_degree()) * ref;
  return {phys.data(), phys.data() + phys.size()};
}

FieldSample fe_field(const FEFunction& u) {
  const auto& mesh = u.space->mesh();
  const int n = mesh.dimension();
  const int k = u.space->form_degree();
  auto forms = std::make_shared<const std::vector<PolyForm>>(physical_forms(u));
  const SimplicialComplex* m = &mesh;
  auto locate = [m](std::span<const double> x, const FieldHint& h) {
    if (h.cell >= 0) return h.cell;
    const Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(x.data(), m->dimension());
    for (int c = 0; c < m->num_cells(); ++c)
      if (inside_reference(m->cell_chart(c).to_reference(p), kInsideTol)) return c;
    throw std::invalid_argument("fe_field: point lies outside the mesh");
  };
  FieldSample::ValueFn value = [forms, m, locate, n](std::span<const double> x, const FieldHint& h,
                                                      std::span<double> out) {
    const int c = locate(x, h);
    const Eigen::VectorXd z = Eigen::Map<const Eigen::VectorXd>(x.data(), n) - m->cell_chart(c).origin();
    (*forms)[c].evaluate_components(std::span<const double>(z.data(), n), out);
  };
  FieldSample::JetFn jet = [forms, m, locate, n](std::span<const double> x, const FieldHint& h, int order,
                                                  std::vector<Jet>& out) {
    const int c = locate(x, h);
    AffineMap shift{Eigen::MatrixXd::Identity(n, n),
                    Eigen::Map<const Eigen::VectorXd>(x.data(), n) - m->cell_chart(c).origin()};
    const auto& f = (*forms)[c];
    out.clear();
    for (int t = 0; t < f.num_components(); ++t) out.emplace_back(f.component(t).compose(shift), order);
  };
  FieldSample f(n, k, value, jet, kMaxDegree);
  f.name = "fe(" + u.space->label() + ")";
  return f;
}

FEFunction interpolate_polynomial(const FESpace& space, const PolyForm& physical) {
  const auto& mesh = space.mesh();
  if (physical.dim() != mesh.dimension() || physical.form_degree() != space.form_degree())
    throw std::invalid_argument("interpolate_polynomial: form of the wrong shape");
  FEFunction u = zero_function(space);
  std::vector<char> done(space.num_dofs(), 0);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& ids = space.cell_dofs(c);
    bool needed = false;
    for (int g : ids) needed = needed || (!done[g] && space.dofs()[g].active >= 0);
    if (!needed) continue;
    const auto& chart = mesh.cell_chart(c);
    const PolyForm ref = pullback(physical, AffineMap{chart.jacobian(), chart.origin()});
    const Eigen::VectorXd vals = space.element().apply_dofs(ref);
    for (size_t l = 0; l < ids.size(); ++l) {
      const int a = space.dofs()[ids[l]].active;
      if (a >= 0 && !done[ids[l]]) u.coefficients(a) = vals(l);
      done[ids[l]] = 1;
    }
  }
  return u;
}

}  // namespace feec
