#include "feec/vecproxy.hpp"

#include <stdexcept>

namespace feec {

std::string proxy_kind_name(ProxyKind kind) {
  switch (kind) {
    case ProxyKind::Scalar: return "scalar";
    case ProxyKind::Tangential: return "tangential";
    case ProxyKind::Flux: return "flux";
    case ProxyKind::Density: return "density";
  }
  return "";
}

namespace {

void check_dim(int n) {
  if (n != 2 && n != 3) throw std::invalid_argument("vector proxies exist in two and three dimensions only");
}

}  // namespace

int proxy_form_degree(ProxyKind kind, int n) {
  check_dim(n);
  switch (kind) {
    case ProxyKind::Scalar: return 0;
    case ProxyKind::Tangential: return 1;
    case ProxyKind::Flux: return n - 1;
    case ProxyKind::Density: return n;
  }
  return 0;
}

int proxy_size(ProxyKind kind, int n) {
  check_dim(n);
  return kind == ProxyKind::Scalar || kind == ProxyKind::Density ? 1 : n;
}

ProxyKind derivative_kind(ProxyKind kind, int n) {
  check_dim(n);
  switch (kind) {
    case ProxyKind::Scalar: return ProxyKind::Tangential;
    case ProxyKind::Tangential: return n == 3 ? ProxyKind::Flux : ProxyKind::Density;
    case ProxyKind::Flux: return ProxyKind::Density;
    case ProxyKind::Density: break;
  }
  throw std::invalid_argument("derivative_kind: densities have no derivative proxy");
}

Eigen::MatrixXd proxy_matrix(ProxyKind kind, int n) {
  const int k = proxy_form_degree(kind, n);
  const auto& table = SubsetTable::get(n, k);
  const int m = proxy_size(kind, n);
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(table.size(), m);
  if (kind != ProxyKind::Flux) {
    S.setIdentity();
    return S;
  }
  const unsigned full = (1u << n) - 1;
  for (int i = 0; i < n; ++i) S(table.index(full & ~(1u << i)), i) = i % 2 ? -1.0 : 1.0;
  return S;
}

Eigen::VectorXd proxy_to_form(ProxyKind kind, int n, const Eigen::VectorXd& proxy) {
  if (proxy.size() != proxy_size(kind, n)) throw std::invalid_argument("proxy_to_form: wrong number of components");
  return proxy_matrix(kind, n) * proxy;
}

Eigen::VectorXd form_to_proxy(ProxyKind kind, int n, const Eigen::VectorXd& form) {
  const Eigen::MatrixXd S = proxy_matrix(kind, n);
  if (form.size() != S.rows()) throw std::invalid_argument("form_to_proxy: wrong number of components");
  return S.transpose() * form;
}

namespace {

// Column index and sign of the single entry of row j of a signed permutation.
std::pair<int, double> row_entry(const Eigen::MatrixXd& S, int j) {
  for (int i = 0; i < S.cols(); ++i)
    if (S(j, i) != 0.0) return {i, S(j, i)};
  throw std::logic_error("proxy matrix row without entry");
}

}  // namespace

PolyForm proxy_to_form(ProxyKind kind, int n, const std::vector<Polynomial>& proxy) {
  if (static_cast<int>(proxy.size()) != proxy_size(kind, n))
    throw std::invalid_argument("proxy_to_form: wrong number of components");
  const Eigen::MatrixXd S = proxy_matrix(kind, n);
  std::vector<Polynomial> comps;
  for (int j = 0; j < S.rows(); ++j) {
    const auto [i, s] = row_entry(S, j);
    comps.push_back(s * proxy[i]);
  }
  return PolyForm(n, proxy_form_degree(kind, n), std::move(comps));
}

std::vector<Polynomial> form_to_proxy(ProxyKind kind, const PolyForm& form) {
  const int n = form.dim();
  if (form.form_degree() != proxy_form_degree(kind, n))
    throw std::invalid_argument("form_to_proxy: form degree does not match the proxy kind");
  const Eigen::MatrixXd S = proxy_matrix(kind, n);
  std::vector<Polynomial> out(S.cols());
  for (int j = 0; j < S.rows(); ++j) {
    const auto [i, s] = row_entry(S, j);
    out[i] = s * form.component(j);
  }
  return out;
}

std::vector<Polynomial> proxy_derivative(ProxyKind kind, int n, const std::vector<Polynomial>& u) {
  if (static_cast<int>(u.size()) != proxy_size(kind, n))
    throw std::invalid_argument("proxy_derivative: wrong number of components");
  auto D = [&](int comp, int i) { return u[comp].derivative(i); };
  switch (derivative_kind(kind, n)) {
    case ProxyKind::Tangential: {
      std::vector<Polynomial> grad;
      for (int i = 0; i < n; ++i) grad.push_back(D(0, i));
      return grad;
    }
    case ProxyKind::Flux:
      return {D(2, 1) - D(1, 2), D(0, 2) - D(2, 0), D(1, 0) - D(0, 1)};
    case ProxyKind::Density: {
      if (kind == ProxyKind::Tangential) return {D(1, 0) - D(0, 1)};
      Polynomial div = D(0, 0);
      for (int i = 1; i < n; ++i) div += D(i, i);
      return {div};
    }
    case ProxyKind::Scalar: break;
  }
  throw std::logic_error("proxy_derivative: unreachable");
}

namespace {

FieldSample permuted_field(const FieldSample& in, int k_out, const Eigen::MatrixXd& S, bool forward) {
  const int n = in.ambient_dim();
  const int rows = forward ? static_cast<int>(S.rows()) : static_cast<int>(S.cols());
  // out[j] = sign[j] * in[source[j]]
  std::vector<int> source(rows);
  std::vector<double> sign(rows);
  for (int j = 0; j < S.rows(); ++j) {
    const auto [i, s] = row_entry(S, j);
    if (forward) {
      source[j] = i;
      sign[j] = s;
    } else {
      source[i] = j;
      sign[i] = s;
    }
  }
  const int nin = in.num_components();
  auto value = [in, source, sign, nin](std::span<const double> x, const FieldHint& h, std::span<double> out) {
    std::vector<double> tmp(nin);
    in.value(x, h, tmp);
    for (size_t j = 0; j < source.size(); ++j) out[j] = sign[j] * tmp[source[j]];
  };
  FieldSample::JetFn jet;
  if (in.has_jets())
    jet = [in, source, sign](std::span<const double> x, const FieldHint& h, int order, std::vector<Jet>& out) {
      std::vector<Jet> tmp;
      in.jet(x, h, order, tmp);
      out.clear();
      for (size_t j = 0; j < source.size(); ++j) out.push_back(sign[j] * tmp[source[j]]);
    };
  FieldSample f(n, k_out, value, jet, in.max_derivative_order());
  f.name = in.name;
  return f;
}

}  // namespace

FieldSample proxy_to_form(const VectorProxyField& v) {
  const int n = v.data.ambient_dim();
  const int expected = proxy_size(v.kind, n) == 1 ? 0 : 1;
  if (v.data.form_degree() != expected)
    throw std::invalid_argument("proxy_to_form: " + proxy_kind_name(v.kind) + " proxies are stored as " +
                                std::to_string(expected) + "-forms");
  return permuted_field(v.data, proxy_form_degree(v.kind, n), proxy_matrix(v.kind, n), true);
}

VectorProxyField form_to_proxy(ProxyKind kind, const FieldSample& form) {
  const int n = form.ambient_dim();
  if (form.form_degree() != proxy_form_degree(kind, n))
    throw std::invalid_argument("form_to_proxy: form degree does not match the proxy kind");
  const int stored = proxy_size(kind, n) == 1 ? 0 : 1;
  return {kind, permuted_field(form, stored, proxy_matrix(kind, n), false)};
}

std::vector<std::string> named_space_names() { return {"BDM", "Lagrange", "Ned1", "Ned2", "RT"}; }

NamedSpaceInfo named_space_info(const std::string& name, int n) {
  check_dim(n);
  if (name == "Lagrange") return {Family::Full, 0, ProxyKind::Scalar};
  if (name == "BDM") return {Family::Full, n - 1, ProxyKind::Flux};
  if (name == "RT") return {Family::Trimmed, n - 1, ProxyKind::Flux};
  if (name == "Ned1" || name == "Ned2") {
    if (n != 3) throw std::invalid_argument("named space '" + name + "' is defined in three dimensions only");
    return {name == "Ned1" ? Family::Trimmed : Family::Full, 1, ProxyKind::Tangential};
  }
  throw std::invalid_argument("unknown named space '" + name + "' (expected BDM, Lagrange, Ned1, Ned2 or RT)");
}

FESpace named_space(const std::string& name, const SimplicialComplex& mesh, int r, const BoundarySubcomplex& boundary) {
  const auto info = named_space_info(name, mesh.dimension());
  return FESpace(mesh, info.family, r, info.k, boundary);
}

NamedProjection projection_named(const std::string& name, const SimplicialComplex& mesh, int r,
                                 const BoundarySubcomplex& boundary, const VectorProxyField& field, WeightKind weights,
                                 Backend backend, const std::vector<NormSpec>& norms) {
  const auto info = named_space_info(name, mesh.dimension());
  if (field.kind != info.kind)
    throw std::invalid_argument("projection_named: " + name + " expects a " + proxy_kind_name(info.kind) + " proxy");
  NamedProjection out;
  out.space = std::make_unique<FESpace>(named_space(name, mesh, r, boundary));
  const FieldSample form = proxy_to_form(field);
  out.u = project(*out.space, form, make_weights(weights, mesh, boundary), backend);
  out.errors = error_report(out.u, form, norms);
  return out;
}

double embedding_residual(const std::string& name_a, int r_a, const std::string& name_b, int r_b, int n) {
  const auto a = named_space_info(name_a, n);
  const auto b = named_space_info(name_b, n);
  if (a.k != b.k) throw std::invalid_argument("embedding_residual: spaces of different form degrees");
  const auto& ea = LocalElement::get(n, a.family, r_a, a.k);
  const auto& eb = LocalElement::get(n, b.family, r_b, b.k);
  int degree = 0;
  for (const auto* e : {&ea, &eb})
    for (const auto& f : e->shape_basis()) degree = std::max(degree, f.degree());
  auto stack = [degree](const LocalElement& e) {
    const auto& basis = e.shape_basis();
    Eigen::MatrixXd M(basis[0].flatten(degree).size(), basis.size());
    for (size_t j = 0; j < basis.size(); ++j) M.col(j) = basis[j].flatten(degree);
    return M;
  };
  const Eigen::MatrixXd A = stack(ea), B = stack(eb);
  const Eigen::MatrixXd X = B.colPivHouseholderQr().solve(A);
  double worst = 0.0;
  for (int j = 0; j < A.cols(); ++j)
    worst = std::max(worst, (B * X.col(j) - A.col(j)).norm() / A.col(j).norm());
  return worst;
}

}  // namespace feec
