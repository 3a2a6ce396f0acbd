#include "feec/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace feec {

long binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

namespace {
constexpr int kStride = kMaxDegree + 1;

int encode(const MultiIndex& a, int dim) {
  int code = 0;
  for (int i = dim - 1; i >= 0; --i) code = code * kStride + a[i];
  return code;
}
}  // namespace

MonomialTable::MonomialTable(int dim) : dim_(dim) {
  int lookup_size = 1;
  for (int i = 0; i < dim; ++i) lookup_size *= kStride;
  lookup_.assign(lookup_size, -1);

  // Within each total degree, exponents of earlier variables come first.
  for (int g = 0; g <= kMaxDegree; ++g) {
    if (dim == 0) {
      if (g == 0) {
        exponents_.push_back({0, 0, 0});
        degrees_.push_back(0);
      }
      continue;
    }
    MultiIndex a{0, 0, 0};
    auto fill = [&](auto&& self, int var, int remaining) -> void {
      if (var == dim - 1) {
        a[var] = remaining;
        exponents_.push_back(a);
        degrees_.push_back(g);
        return;
      }
      for (int e = remaining; e >= 0; --e) {
        a[var] = e;
        self(self, var + 1, remaining - e);
      }
      a[var] = 0;
    };
    fill(fill, 0, g);
  }
  for (int i = 0; i < static_cast<int>(exponents_.size()); ++i) lookup_[encode(exponents_[i], dim)] = i;
}

const MonomialTable& MonomialTable::get(int dim) {
  static std::once_flag once;
  static std::vector<MonomialTable> tables;
  std::call_once(once, [] {
    for (int d = 0; d <= kMaxDim; ++d) tables.push_back(MonomialTable(d));
  });
  if (dim < 0 || dim > kMaxDim) throw std::invalid_argument("MonomialTable: dimension out of range");
  return tables[dim];
}

int MonomialTable::count(int degree) const {
  if (degree < 0) return 0;
  return static_cast<int>(binomial(degree + dim_, dim_));
}

int MonomialTable::index(const MultiIndex& a) const {
  int g = 0;
  for (int i = 0; i < dim_; ++i) {
    if (a[i] < 0) return -1;
    g += a[i];
  }
  if (g > kMaxDegree) return -1;
  return lookup_[encode(a, dim_)];
}

Polynomial::Polynomial(int dim, int degree_bound)
    : dim_(dim), degree_(std::max(degree_bound, 0)) {
  if (degree_ > kMaxDegree) throw std::out_of_range("Polynomial: degree bound exceeds kMaxDegree");
  c_.assign(MonomialTable::get(dim).count(degree_), 0.0);
}

Polynomial Polynomial::constant(int dim, double c) {
  Polynomial p(dim, 0);
  p.c_[0] = c;
  return p;
}

Polynomial Polynomial::variable(int dim, int i) {
  MultiIndex a{0, 0, 0};
  a[i] = 1;
  return monomial(dim, a);
}

Polynomial Polynomial::monomial(int dim, const MultiIndex& a, double c) {
  int g = 0;
  for (int i = 0; i < dim; ++i) g += a[i];
  Polynomial p(dim, g);
  p.c_[MonomialTable::get(dim).index(a)] = c;
  return p;
}

int Polynomial::degree(double tol) const {
  const auto& table = MonomialTable::get(dim_);
  for (int i = size() - 1; i >= 0; --i)
    if (std::abs(c_[i]) > tol) return table.total_degree(i);
  return -1;
}

double Polynomial::coefficient(const MultiIndex& a) const {
  int idx = MonomialTable::get(dim_).index(a);
  return (idx >= 0 && idx < size()) ? c_[idx] : 0.0;
}

double Polynomial::operator()(std::span<const double> x) const {
  const auto& table = MonomialTable::get(dim_);
  std::array<std::array<double, kMaxDegree + 1>, kMaxDim> pw{};
  for (int i = 0; i < dim_; ++i) {
    pw[i][0] = 1.0;
    for (int e = 1; e <= degree_; ++e) pw[i][e] = pw[i][e - 1] * x[i];
  }
  double s = 0.0;
  for (int idx = 0; idx < size(); ++idx) {
    if (c_[idx] == 0.0) continue;
    const auto& a = table.exponent(idx);
    double term = c_[idx];
    for (int i = 0; i < dim_; ++i) term *= pw[i][a[i]];
    s += term;
  }
  return s;
}

double Polynomial::max_abs() const {
  double m = 0.0;
  for (double v : c_) m = std::max(m, std::abs(v));
  return m;
}

Polynomial Polynomial::derivative(int i) const {
  const auto& table = MonomialTable::get(dim_);
  Polynomial d(dim_, std::max(degree_ - 1, 0));
  for (int idx = 0; idx < size(); ++idx) {
    if (c_[idx] == 0.0) continue;
    MultiIndex a = table.exponent(idx);
    if (a[i] == 0) continue;
    double f = a[i];
    a[i] -= 1;
    d.c_[table.index(a)] += f * c_[idx];
  }
  return d;
}

Polynomial Polynomial::truncated(int degree) const {
  Polynomial p(dim_, std::min(degree, degree_));
  std::copy_n(c_.begin(), p.size(), p.c_.begin());
  return p;
}

Polynomial Polynomial::rebounded(int degree) const {
  if (degree < degree_ && this->degree() > degree)
    throw std::logic_error("Polynomial::rebounded: nonzero terms above the new bound");
  Polynomial p(dim_, degree);
  std::copy_n(c_.begin(), std::min(p.size(), size()), p.c_.begin());
  return p;
}

Polynomial Polynomial::compose(const AffineMap& map) const {
  if (map.target_dim() != dim_) throw std::invalid_argument("Polynomial::compose: dimension mismatch");
  const int m = map.source_dim();
  const auto& table = MonomialTable::get(dim_);
  const int deg = std::max(degree(), 0);

  // powers[i][e] = (b_i + A_i. y)^e
  std::vector<std::vector<Polynomial>> powers(dim_);
  for (int i = 0; i < dim_; ++i) {
    Polynomial lin(m, 1);
    lin[0] = map.b(i);
    for (int j = 0; j < m; ++j) lin[1 + j] = map.A(i, j);
    powers[i].push_back(Polynomial::constant(m, 1.0));
    for (int e = 1; e <= deg; ++e) powers[i].push_back(powers[i].back() * lin);
  }

  Polynomial out(m, deg);
  for (int idx = 0; idx < size(); ++idx) {
    if (c_[idx] == 0.0) continue;
    const auto& a = table.exponent(idx);
    Polynomial term = Polynomial::constant(m, c_[idx]);
    for (int i = 0; i < dim_; ++i)
      if (a[i] > 0) term = term * powers[i][a[i]];
    out.axpy(1.0, term);
  }
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  axpy(1.0, o);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  axpy(-1.0, o);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

void Polynomial::axpy(double s, const Polynomial& o) {
  if (c_.empty() && dim_ == 0 && degree_ == 0) {
    *this = Polynomial(o.dim_, o.degree_);
  }
  if (o.dim_ != dim_) throw std::invalid_argument("Polynomial: dimension mismatch");
  if (o.degree_ > degree_) {
    degree_ = o.degree_;
    c_.resize(o.c_.size(), 0.0);
  }
  for (int i = 0; i < o.size(); ++i) c_[i] += s * o.c_[i];
}

Polynomial multiply_truncated(const Polynomial& a, const Polynomial& b, int max_degree) {
  if (a.dim() != b.dim()) throw std::invalid_argument("Polynomial: dimension mismatch");
  const int dim = a.dim();
  const auto& table = MonomialTable::get(dim);
  const int bound = std::min(a.degree_bound() + b.degree_bound(), max_degree);
  Polynomial p(dim, bound);
  auto pc = p.coefficients();
  for (int i = 0; i < a.size(); ++i) {
    double ai = a[i];
    if (ai == 0.0) continue;
    const auto& ea = table.exponent(i);
    int ga = table.total_degree(i);
    for (int j = 0; j < b.size(); ++j) {
      double bj = b[j];
      if (bj == 0.0) continue;
      if (ga + table.total_degree(j) > bound) break;
      const auto& eb = table.exponent(j);
      MultiIndex e{ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]};
      pc[table.index(e)] += ai * bj;
    }
  }
  return p;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  return multiply_truncated(a, b, kMaxDegree);
}

double reference_monomial_integral(int dim, const MultiIndex& a) {
  // Dirichlet: int x^a = prod(a_i!) / (dim + |a|)!
  double num = 1.0;
  int total = 0;
  for (int i = 0; i < dim; ++i) {
    num *= std::tgamma(a[i] + 1.0);
    total += a[i];
  }
  return num / std::tgamma(dim + total + 1.0);
}

}  // namespace feec
