// Vector-calculus proxies of differential forms in two and three dimensions.
//
// Provides:
//  - proxy kinds and the signed identifications between proxy vectors and
//    form components (pointwise, polynomial and as fields)
//  - grad, curl, rot and div of polynomial proxies
//  - named spaces Lagrange, Ned1, Ned2, BDM, RT and their projections
//  - embedding residuals between local shape spaces
//
// Identifications, with components indexed by increasing subsets:
//   Scalar      f                 <-> f                        (k = 0)
//   Tangential  u                 <-> sum_i u_i dx_i           (k = 1)
//   Flux        u                 <-> sum_i u_i (-1)^i dx_0 ^ .. (no dx_i) .. ^ dx_{n-1}   (k = n - 1)
//   Density     f                 <-> f dx_0 ^ ... ^ dx_{n-1}  (k = n)
// so in 3D a 2-form has components [01] = u_3, [02] = -u_2, [12] = u_1 and in
// 2D a flux 1-form has components [0] = -u_2, [1] = u_1.
//
// Degree convention: every named space of index r contains the polynomial
// fields of degree r - 1, and Lagrange, Ned2 and BDM contain those of degree r.

#ifndef FEEC_VECPROXY_HPP
#define FEEC_VECPROXY_HPP

#include <memory>
#include <string>
#include <vector>

#include "feec/analysis.hpp"

namespace feec {

enum class ProxyKind { Scalar, Tangential, Flux, Density };

std::string proxy_kind_name(ProxyKind kind);
/// Form degree represented by the kind in dimension n (2 or 3).
int proxy_form_degree(ProxyKind kind, int n);
/// Number of proxy components: 1 for Scalar and Density, n otherwise.
int proxy_size(ProxyKind kind, int n);
/// Kind of the proxy of d omega: Scalar -> Tangential, Tangential -> Flux (n = 3)
/// or Density (n = 2), Flux -> Density. Throws for Density.
ProxyKind derivative_kind(ProxyKind kind, int n);

/// Signed permutation S with form components = S * proxy.
Eigen::MatrixXd proxy_matrix(ProxyKind kind, int n);

Eigen::VectorXd proxy_to_form(ProxyKind kind, int n, const Eigen::VectorXd& proxy);
Eigen::VectorXd form_to_proxy(ProxyKind kind, int n, const Eigen::VectorXd& form);
PolyForm proxy_to_form(ProxyKind kind, int n, const std::vector<Polynomial>& proxy);
std::vector<Polynomial> form_to_proxy(ProxyKind kind, const PolyForm& form);

/// grad, curl (n = 3), rot (n = 2, Tangential) or div of a polynomial proxy,
/// returned as the proxy of kind derivative_kind(kind, n).
std::vector<Polynomial> proxy_derivative(ProxyKind kind, int n, const std::vector<Polynomial>& proxy);

/// A proxy field: a scalar stored as a 0-form, or a vector stored as the
/// components of a 1-form.
struct VectorProxyField {
  ProxyKind kind = ProxyKind::Scalar;
  FieldSample data;
};
/// Form-valued field of the proxy; derivatives carry over.
FieldSample proxy_to_form(const VectorProxyField& v);
/// Inverse of proxy_to_form; throws when the form degree does not match the kind.
VectorProxyField form_to_proxy(ProxyKind kind, const FieldSample& form);

struct NamedSpaceInfo {
  Family family = Family::Full;
  int k = 0;
  ProxyKind kind = ProxyKind::Scalar;
};
/// Sorted names: BDM, Lagrange, Ned1, Ned2, RT.
std::vector<std::string> named_space_names();
/// Lagrange -> (P, 0), Ned2 -> (P, 1), Ned1 -> (Pminus, 1), BDM -> (P, n - 1),
/// RT -> (Pminus, n - 1). Ned1 and Ned2 require n = 3.
NamedSpaceInfo named_space_info(const std::string& name, int n);
FESpace named_space(const std::string& name, const SimplicialComplex& mesh, int r,
                    const BoundarySubcomplex& boundary = {});

struct NamedProjection {
  /// Owns the space referenced by u.
  std::unique_ptr<FESpace> space;
  FEFunction u;
  ErrorReport errors;
};
NamedProjection projection_named(const std::string& name, const SimplicialComplex& mesh, int r,
                                 const BoundarySubcomplex& boundary, const VectorProxyField& field, WeightKind weights,
                                 Backend backend, const std::vector<NormSpec>& norms = {{0, 2.0}});

/// Largest relative least-squares residual of the shape functions of
/// (name_a, r_a) expanded in the shape functions of (name_b, r_b) on the
/// reference n-simplex; zero up to rounding iff the first space is contained
/// in the second.
double embedding_residual(const std::string& name_a, int r_a, const std::string& name_b, int r_b, int n);

}  // namespace feec

#endif
