#include "feec/polyform.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace feec {

SubsetTable::SubsetTable(int dim, int k) {
  lookup_.assign(1u << dim, -1);
  if (k < 0 || k > dim) return;
  std::vector<int> c(k);
  for (int i = 0; i < k; ++i) c[i] = i;
  while (true) {
    unsigned m = 0;
    for (int v : c) m |= 1u << v;
    lookup_[m] = static_cast<int>(masks_.size());
    masks_.push_back(m);
    int i = k - 1;
    while (i >= 0 && c[i] == dim - k + i) --i;
    if (i < 0) break;
    ++c[i];
    for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  }
}

const SubsetTable& SubsetTable::get(int dim, int k) {
  static std::once_flag once;
  static std::vector<std::vector<SubsetTable>> tables;
  std::call_once(once, [] {
    for (int d = 0; d <= kMaxDim; ++d) {
      tables.emplace_back();
      for (int kk = 0; kk <= kMaxDim + 1; ++kk) tables[d].push_back(SubsetTable(d, kk));
    }
  });
  if (dim < 0 || dim > kMaxDim || k < 0) throw std::invalid_argument("SubsetTable: arguments out of range");
  return tables[dim][std::min(k, kMaxDim + 1)];
}

int SubsetTable::index(unsigned mask) const {
  return mask < lookup_.size() ? lookup_[mask] : -1;
}

std::vector<int> SubsetTable::elements(int idx) const {
  std::vector<int> e;
  for (int i = 0; i < kMaxDim; ++i)
    if (masks_[idx] & (1u << i)) e.push_back(i);
  return e;
}

int insertion_sign(int i, unsigned sigma) {
  if (sigma & (1u << i)) return 0;
  unsigned below = sigma & ((1u << i) - 1u);
  return (std::popcount(below) % 2) ? -1 : 1;
}

int wedge_sign(unsigned sigma, unsigned tau) {
  if (sigma & tau) return 0;
  int inversions = 0;
  for (int i = 0; i < kMaxDim; ++i)
    if (sigma & (1u << i)) inversions += std::popcount(tau & ((1u << i) - 1u));
  return (inversions % 2) ? -1 : 1;
}

namespace {

double minor_det(const Eigen::MatrixXd& M, const std::vector<int>& rows, const std::vector<int>& cols) {
  const int k = static_cast<int>(rows.size());
  if (k == 0) return 1.0;
  Eigen::MatrixXd S(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) S(i, j) = M(rows[i], cols[j]);
  return S.determinant();
}

}  // namespace

PolyForm::PolyForm(int dim, int k, int degree) : dim_(dim), k_(k) {
  const int n = SubsetTable::get(dim, k).size();
  comps_.assign(n, Polynomial(dim, degree));
}

PolyForm::PolyForm(int dim, int k, std::vector<Polynomial> components)
    : dim_(dim), k_(k), comps_(std::move(components)) {
  if (static_cast<int>(comps_.size()) != SubsetTable::get(dim, k).size())
    throw std::invalid_argument("PolyForm: wrong number of components");
  int bound = 0;
  for (const auto& p : comps_) {
    if (p.dim() != dim) throw std::invalid_argument("PolyForm: component dimension mismatch");
    bound = std::max(bound, p.degree_bound());
  }
  for (auto& p : comps_)
    if (p.degree_bound() != bound) p = p.rebounded(bound);
}

PolyForm PolyForm::coframe(int dim, unsigned sigma) {
  return scaled_coframe(Polynomial::constant(dim, 1.0), sigma);
}

PolyForm PolyForm::scaled_coframe(const Polynomial& p, unsigned sigma) {
  const int k = std::popcount(sigma);
  PolyForm f(p.dim(), k, p.degree_bound());
  int idx = SubsetTable::get(p.dim(), k).index(sigma);
  if (idx < 0) throw std::invalid_argument("PolyForm: invalid coframe");
  f.comps_[idx] = p;
  return f;
}

PolyForm PolyForm::scalar(const Polynomial& p) {
  return PolyForm(p.dim(), 0, std::vector<Polynomial>{p});
}

int PolyForm::degree_bound() const {
  return comps_.empty() ? 0 : comps_[0].degree_bound();
}

int PolyForm::degree(double tol) const {
  int d = -1;
  for (const auto& p : comps_) d = std::max(d, p.degree(tol));
  return d;
}

void PolyForm::evaluate_components(std::span<const double> x, std::span<double> out) const {
  for (int i = 0; i < num_components(); ++i) out[i] = comps_[i](x);
}

std::vector<double> PolyForm::evaluate_components(std::span<const double> x) const {
  std::vector<double> out(num_components());
  evaluate_components(x, out);
  return out;
}

double PolyForm::evaluate(std::span<const double> x, const Eigen::MatrixXd& vectors) const {
  if (vectors.cols() != k_ || vectors.rows() != dim_)
    throw std::invalid_argument("PolyForm::evaluate: expected " + std::to_string(k_) + " vectors");
  const auto& subsets = SubsetTable::get(dim_, k_);
  std::vector<int> cols(k_);
  for (int j = 0; j < k_; ++j) cols[j] = j;
  double s = 0.0;
  for (int i = 0; i < subsets.size(); ++i) s += comps_[i](x) * minor_det(vectors, subsets.elements(i), cols);
  return s;
}

Eigen::VectorXd PolyForm::flatten(int degree) const {
  const int per = MonomialTable::get(dim_).count(degree);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(per * num_components());
  for (int i = 0; i < num_components(); ++i) {
    if (comps_[i].degree() > degree) throw std::invalid_argument("PolyForm::flatten: degree too small");
    const int n = std::min(per, comps_[i].size());
    for (int j = 0; j < n; ++j) v(i * per + j) = comps_[i][j];
  }
  return v;
}

PolyForm PolyForm::unflatten(int dim, int k, int degree, const Eigen::VectorXd& v) {
  PolyForm f(dim, k, degree);
  const int per = MonomialTable::get(dim).count(degree);
  if (v.size() != per * f.num_components()) throw std::invalid_argument("PolyForm::unflatten: size mismatch");
  for (int i = 0; i < f.num_components(); ++i)
    for (int j = 0; j < per; ++j) f.comps_[i][j] = v(i * per + j);
  return f;
}

double PolyForm::max_abs() const {
  double m = 0.0;
  for (const auto& p : comps_) m = std::max(m, p.max_abs());
  return m;
}

void PolyForm::check_compatible(const PolyForm& o) const {
  if (o.dim_ != dim_ || o.k_ != k_) throw std::invalid_argument("PolyForm: incompatible forms");
}

PolyForm& PolyForm::operator+=(const PolyForm& o) {
  axpy(1.0, o);
  return *this;
}

PolyForm& PolyForm::operator-=(const PolyForm& o) {
  axpy(-1.0, o);
  return *this;
}

PolyForm& PolyForm::operator*=(double s) {
  for (auto& p : comps_) p *= s;
  return *this;
}

void PolyForm::axpy(double s, const PolyForm& o) {
  if (comps_.empty() && dim_ == 0 && k_ == 0) *this = PolyForm(o.dim_, o.k_, o.degree_bound());
  check_compatible(o);
  for (int i = 0; i < num_components(); ++i) comps_[i].axpy(s, o.comps_[i]);
}

PolyForm wedge(const PolyForm& a, const PolyForm& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("wedge: dimension mismatch");
  const int d = a.dim();
  const int k = a.form_degree() + b.form_degree();
  if (k > d) throw std::invalid_argument("wedge: form degree exceeds simplex dimension");
  const auto& sa = SubsetTable::get(d, a.form_degree());
  const auto& sb = SubsetTable::get(d, b.form_degree());
  const auto& sr = SubsetTable::get(d, k);
  PolyForm out(d, k, a.degree_bound() + b.degree_bound());
  for (int i = 0; i < sa.size(); ++i) {
    if (a.component(i).max_abs() == 0.0) continue;
    for (int j = 0; j < sb.size(); ++j) {
      int sgn = wedge_sign(sa.mask(i), sb.mask(j));
      if (sgn == 0) continue;
      out.component(sr.index(sa.mask(i) | sb.mask(j))).axpy(sgn, a.component(i) * b.component(j));
    }
  }
  return out;
}

PolyForm exterior_derivative(const PolyForm& a) {
  const int d = a.dim();
  const int k = a.form_degree();
  if (k >= d) return PolyForm(d, k + 1, 0);
  const auto& sa = SubsetTable::get(d, k);
  const auto& sr = SubsetTable::get(d, k + 1);
  PolyForm out(d, k + 1, std::max(a.degree_bound() - 1, 0));
  for (int i = 0; i < sa.size(); ++i) {
    for (int j = 0; j < d; ++j) {
      int sgn = insertion_sign(j, sa.mask(i));
      if (sgn == 0) continue;
      out.component(sr.index(sa.mask(i) | (1u << j))).axpy(sgn, a.component(i).derivative(j));
    }
  }
  return out;
}

PolyForm koszul(const PolyForm& a) {
  const int d = a.dim();
  const int k = a.form_degree();
  if (k == 0) throw std::invalid_argument("koszul: not defined on 0-forms");
  const auto& sa = SubsetTable::get(d, k);
  const auto& sr = SubsetTable::get(d, k - 1);
  PolyForm out(d, k - 1, a.degree_bound() + 1);
  for (int i = 0; i < sa.size(); ++i) {
    auto elems = sa.elements(i);
    for (int p = 0; p < k; ++p) {
      const int sgn = (p % 2) ? -1 : 1;
      unsigned rest = sa.mask(i) & ~(1u << elems[p]);
      out.component(sr.index(rest)).axpy(sgn, Polynomial::variable(d, elems[p]) * a.component(i));
    }
  }
  return out;
}

PolyForm pullback(const PolyForm& a, const AffineMap& map) {
  if (map.target_dim() != a.dim()) throw std::invalid_argument("pullback: dimension mismatch");
  const int m = map.source_dim();
  const int k = a.form_degree();
  const auto& sa = SubsetTable::get(a.dim(), k);
  const auto& sr = SubsetTable::get(m, k);
  PolyForm out(m, k, std::max(a.degree(), 0));
  if (sr.size() == 0) return out;
  for (int i = 0; i < sa.size(); ++i) {
    if (a.component(i).max_abs() == 0.0) continue;
    Polynomial composed = a.component(i).compose(map);
    auto rows = sa.elements(i);
    for (int j = 0; j < sr.size(); ++j) {
      double m_det = minor_det(map.A, rows, sr.elements(j));
      if (m_det != 0.0) out.component(j).axpy(m_det, composed);
    }
  }
  return out;
}

Eigen::MatrixXd pullback_matrix(const Eigen::MatrixXd& A, int k) {
  const auto& st = SubsetTable::get(static_cast<int>(A.rows()), k);
  const auto& ss = SubsetTable::get(static_cast<int>(A.cols()), k);
  Eigen::MatrixXd P(ss.size(), st.size());
  for (int t = 0; t < ss.size(); ++t)
    for (int s = 0; s < st.size(); ++s) P(t, s) = minor_det(A, st.elements(s), ss.elements(t));
  return P;
}

AffineMap face_inclusion(int dim, std::span<const int> face_vertices) {
  const int m = static_cast<int>(face_vertices.size()) - 1;
  if (m < 0) throw std::invalid_argument("face_inclusion: empty face");
  auto corner = [dim](int v) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(dim);
    if (v > 0) p(v - 1) = 1.0;
    return p;
  };
  AffineMap map{Eigen::MatrixXd(dim, m), corner(face_vertices[0])};
  for (int j = 0; j < m; ++j) map.A.col(j) = corner(face_vertices[j + 1]) - map.b;
  return map;
}

PolyForm trace(const PolyForm& a, std::span<const int> face_vertices) {
  for (size_t i = 0; i < face_vertices.size(); ++i) {
    if (face_vertices[i] < 0 || face_vertices[i] > a.dim() || (i > 0 && face_vertices[i] <= face_vertices[i - 1]))
      throw std::invalid_argument("trace: not a subsimplex in canonical order");
  }
  return pullback(a, face_inclusion(a.dim(), face_vertices));
}

int dim_full(int d, int r, int k) {
  if (r < 0 || k < 0 || k > d) return 0;
  return static_cast<int>(binomial(d + r, d) * binomial(d, k));
}

int dim_trimmed(int d, int r, int k) {
  if (r < 1 || k < 0 || k > d) return 0;
  return static_cast<int>(binomial(r + k - 1, k) * binomial(d + r, d - k));
}

std::vector<int> select_independent(const std::vector<Eigen::VectorXd>& generators, double tol) {
  std::vector<Eigen::VectorXd> q;
  std::vector<int> chosen;
  for (int i = 0; i < static_cast<int>(generators.size()); ++i) {
    const double scale = generators[i].norm();
    if (scale == 0.0) continue;
    Eigen::VectorXd v = generators[i];
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& u : q) v -= u.dot(v) * u;
    const double rn = v.norm();
    if (rn > tol * scale) {
      q.push_back(v / rn);
      chosen.push_back(i);
    }
  }
  return chosen;
}

namespace {

using BasisKey = std::tuple<int, int, int, int>;

std::mutex& basis_mutex() {
  static std::mutex m;
  return m;
}

std::map<BasisKey, std::vector<PolyForm>>& basis_cache() {
  static std::map<BasisKey, std::vector<PolyForm>> c;
  return c;
}

void check_params(int d, int r, int k, int min_r) {
  if (d < 0 || d > kMaxDim || k < 0 || k > d || r < min_r || r > kMaxDegree)
    throw std::invalid_argument("basis: invalid parameters (d=" + std::to_string(d) + ", r=" + std::to_string(r) +
                                ", k=" + std::to_string(k) + ")");
}

std::vector<PolyForm> build_full(int d, int r, int k) {
  std::vector<PolyForm> basis;
  const auto& subsets = SubsetTable::get(d, k);
  const auto& mono = MonomialTable::get(d);
  for (int s = 0; s < subsets.size(); ++s)
    for (int idx = 0; idx < mono.count(r); ++idx) {
      Polynomial p(d, r);
      p[idx] = 1.0;
      basis.push_back(PolyForm::scaled_coframe(p, subsets.mask(s)));
    }
  return basis;
}

std::vector<PolyForm> build_trimmed(int d, int r, int k) {
  std::vector<PolyForm> generators = build_full(d, r - 1, k);
  if (k < d) {
    const auto& subsets = SubsetTable::get(d, k + 1);
    const auto& mono = MonomialTable::get(d);
    for (int s = 0; s < subsets.size(); ++s)
      for (int idx = mono.count(r - 2); idx < mono.count(r - 1); ++idx) {
        Polynomial p(d, r - 1);
        p[idx] = 1.0;
        generators.push_back(koszul(PolyForm::scaled_coframe(p, subsets.mask(s))));
      }
  }
  std::vector<Eigen::VectorXd> flat;
  for (const auto& g : generators) flat.push_back(g.flatten(r));
  std::vector<PolyForm> basis;
  for (int i : select_independent(flat)) basis.push_back(generators[i]);
  return basis;
}

}  // namespace

const std::vector<PolyForm>& basis_full(int d, int r, int k) {
  check_params(d, r, k, 0);
  std::lock_guard lock(basis_mutex());
  auto [it, inserted] = basis_cache().try_emplace(BasisKey{0, d, r, k});
  if (inserted) it->second = build_full(d, r, k);
  return it->second;
}

const std::vector<PolyForm>& basis_trimmed(int d, int r, int k) {
  check_params(d, r, k, 1);
  std::lock_guard lock(basis_mutex());
  auto [it, inserted] = basis_cache().try_emplace(BasisKey{1, d, r, k});
  if (inserted) it->second = build_trimmed(d, r, k);
  return it->second;
}

}  // namespace feec
