// Conforming finite element spaces of polynomial differential forms.
//
// Provides:
//  - LocalElement: degrees of freedom and the dual (biorthogonal) basis on
//    the reference n-simplex for the full (A) and trimmed (B) families
//  - FESpace: global DOF enumeration over all simplices with masking of the
//    boundary subcomplex
//  - FEFunction and its cellwise reconstruction and evaluation
//
// A degree of freedom attached to an m-simplex S is omega -> int_S eta ^ tr_S omega
// with eta from the weight space of the family, integrated in the orientation
// of the canonical chart of S. Because the canonical chart of a subsimplex is
// the restriction of the chart of every cell containing it, the local DOF
// matrix and the dual basis are the same on every cell.

#ifndef FEEC_FESPACE_HPP
#define FEEC_FESPACE_HPP

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "feec/field.hpp"
#include "feec/mesh.hpp"
#include "feec/polyform.hpp"
#include "feec/quadrature.hpp"

namespace feec {

/// Full = P_r Lambda^k (family A), Trimmed = P^-_r Lambda^k (family B).
enum class Family { Full, Trimmed };

/// "P" or "Pminus".
std::string family_name(Family f);
/// Accepts "P", "A", "full", "Pminus", "B", "trimmed".
Family parse_family(const std::string& s);

/// Weight forms of the DOFs interior to an m-simplex.
std::vector<PolyForm> dof_weight_basis(Family family, int m, int r, int k);

/// Increasing position subsets of the reference n-simplex of size d + 1.
const std::vector<std::vector<int>>& local_subsimplices(int n, int d);

struct LocalDof {
  int dim = 0;
  /// Index into local_subsimplices(n, dim).
  int subsimplex = 0;
  int index = 0;
  PolyForm weight;
};

class LocalElement {
public:
  static const LocalElement& get(int n, Family family, int r, int k);

  int dim() const { return n_; }
  Family family() const { return family_; }
  int degree() const { return r_; }
  int form_degree() const { return k_; }
  int size() const { return static_cast<int>(dofs_.size()); }

  const std::vector<PolyForm>& shape_basis() const { return *basis_; }
  const std::vector<LocalDof>& dofs() const { return dofs_; }
  /// psi_l with dof_i(psi_l) = delta_il.
  const std::vector<PolyForm>& dual_basis() const { return dual_; }
  double condition_number() const { return condition_; }

  /// First local DOF of a subsimplex and the number of DOFs per d-simplex.
  int dof_offset(int d, int subsimplex) const { return offsets_[d][subsimplex]; }
  int dofs_per_simplex(int d) const { return per_simplex_[d]; }

  /// One DOF applied to a reference form on the cell (exact integration).
  double apply_dof(int i, const PolyForm& a) const;
  /// All DOFs applied to a reference form of any polynomial degree.
  Eigen::VectorXd apply_dofs(const PolyForm& a) const;
  /// sum_l c_l psi_l.
  PolyForm combine(const Eigen::VectorXd& c) const;

  /// Physical L2 mass matrix of the dual basis on a cell.
  Eigen::MatrixXd mass_matrix(const SimplexChart& chart) const;
  /// Physical L2 mass matrix of d psi on a cell (zero-size when k = n).
  Eigen::MatrixXd derivative_mass_matrix(const SimplexChart& chart) const;
  /// Reference component values of psi at the nodes of a rule:
  /// entry [q] is (components x size).
  const std::vector<Eigen::MatrixXd>& values_at(const QuadratureRule& rule) const;
  /// Same for d psi.
  const std::vector<Eigen::MatrixXd>& derivative_values_at(const QuadratureRule& rule) const;

private:
  LocalElement(int n, Family family, int r, int k);
  const Eigen::MatrixXd& dof_matrix(int degree) const;
  static Eigen::MatrixXd gram_tensor(const std::vector<PolyForm>& forms, int k_forms, int n);

  int n_, r_, k_;
  Family family_;
  const std::vector<PolyForm>* basis_ = nullptr;
  std::vector<LocalDof> dofs_;
  std::vector<PolyForm> dual_;
  std::vector<std::vector<int>> offsets_;
  std::vector<int> per_simplex_;
  double condition_ = 0.0;
  // Reference integrals of products of components: block (tau, tau2) of size
  // size x size, stored for all pairs.
  Eigen::MatrixXd gram_;
  Eigen::MatrixXd dgram_;

  mutable std::mutex cache_mutex_;
  mutable std::map<int, Eigen::MatrixXd> dof_matrices_;
  mutable std::map<std::pair<int, int>, std::vector<Eigen::MatrixXd>> values_;
  mutable std::map<std::pair<int, int>, std::vector<Eigen::MatrixXd>> dvalues_;
};

struct GlobalDof {
  int dim = 0;
  int simplex = 0;
  int index = 0;
  /// Position in the active coefficient vector, -1 for masked DOFs.
  int active = -1;
};

struct DofFunctional {
  int dim = 0;
  int simplex = 0;
  int index = 0;
  /// Weight form in the canonical chart of the simplex.
  PolyForm weight;
};

class FESpace {
public:
  /// Family forcing: k = 0 always uses the full family and k = n the trimmed
  /// family, with the degree adjusted so that the space is unchanged
  /// (P_r Lambda^n = P^-_{r+1} Lambda^n). note() records the normalisation.
  FESpace(const SimplicialComplex& mesh, Family family, int r, int k, BoundarySubcomplex boundary = {});

  const SimplicialComplex& mesh() const { return *mesh_; }
  Family family() const { return family_; }
  int degree() const { return r_; }
  int form_degree() const { return k_; }
  const BoundarySubcomplex& boundary() const { return boundary_; }
  const LocalElement& element() const { return *element_; }
  const std::string& note() const { return note_; }
  /// "P_r" or "Pminus_r" with the normalised family and degree.
  std::string label() const;

  int num_dofs() const { return static_cast<int>(dofs_.size()); }
  int num_active() const { return num_active_; }
  const std::vector<GlobalDof>& dofs() const { return dofs_; }
  /// Global id of DOF i on simplex (d, s).
  int dof_index(int d, int s, int i) const;
  /// Global DOF ids of a cell in the order of the local dual basis.
  const std::vector<int>& cell_dofs(int cell) const { return cell_dofs_[cell]; }
  /// Global ids of the active DOFs, by active index.
  const std::vector<int>& active_dofs() const { return active_dofs_; }

  /// The functionals of a simplex; empty when its dimension is below k.
  std::vector<DofFunctional> dof_functionals(int d, int s) const;

private:
  const SimplicialComplex* mesh_;
  Family family_;
  int r_, k_;
  BoundarySubcomplex boundary_;
  const LocalElement* element_;
  std::string note_;
  std::vector<GlobalDof> dofs_;
  std::vector<std::vector<int>> first_dof_;
  std::vector<std::vector<int>> cell_dofs_;
  std::vector<int> active_dofs_;
  int num_active_ = 0;
};

/// Value of a functional on a reference form living on a cell T containing
/// the simplex of the functional. Throws if the simplex is not in T.
double apply_dof(const FESpace& space, const DofFunctional& f, int cell, const PolyForm& reference_on_cell);

/// Coefficients over the active DOFs of a space.
struct FEFunction {
  const FESpace* space = nullptr;
  Eigen::VectorXd coefficients;
};

FEFunction zero_function(const FESpace& space);
/// phi_{S,i} for an active DOF given by its global id.
FEFunction global_shape_function(const FESpace& space, int global_dof);
/// Local dual-basis coefficients on a cell (masked DOFs are zero).
Eigen::VectorXd local_coefficients(const FEFunction& u, int cell);
/// Cell restriction in reference coordinates.
PolyForm local_form(const FEFunction& u, int cell);
/// Cell restriction as a physical form in offset coordinates x - origin.
PolyForm physical_form(const FEFunction& u, int cell);
std::vector<PolyForm> physical_forms(const FEFunction& u);
/// Ambient components at a point of a cell; throws if x is outside the cell.
std::vector<double> evaluate_fe(const FEFunction& u, int cell, const Eigen::VectorXd& x);
/// An FE function viewed as a field; the cell comes from the hint or, when
/// absent, from a point location search.
FieldSample fe_field(const FEFunction& u);
/// Canonical interpolation of a global physical polynomial form (ambient
/// coordinates) into the space; masked DOFs are dropped.
FEFunction interpolate_polynomial(const FESpace& space, const PolyForm& physical);

}  // namespace feec

#endif
