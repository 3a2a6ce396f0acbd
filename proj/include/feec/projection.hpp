// Local polynomial projections and the averaging projection onto a
// conforming finite element space.
//
// Provides:
//  - P_T with two backends: the L2-orthogonal projection on the cell and the
//    averaged Taylor polynomial over a ball inside the cell (commuting with d)
//  - the canonical interpolation I_T onto a trimmed space
//  - weight schemes c(S, T) and the averaged global operator
//
// Local results are stored as coefficients over the local dual basis of the
// space, so the coefficients are the local degrees of freedom.

#ifndef FEEC_PROJECTION_HPP
#define FEEC_PROJECTION_HPP

#include <functional>
#include <string>
#include <vector>

#include "feec/fespace.hpp"

namespace feec {

enum class Backend { L2, Taylor };
/// "l2" or "taylor".
std::string backend_name(Backend b);
Backend parse_backend(const std::string& s);

/// Quadrature order of the L2 backend.
inline constexpr int kProjectionQuadratureOrder = 12;

struct Ball {
  Eigen::VectorXd center;
  double radius = 0.0;
};
/// The inscribed ball of a cell shrunk by the factor 0.9.
Ball taylor_ball(const SimplicialComplex& mesh, int cell);

/// Componentwise averaged Taylor polynomial of the given degree over the
/// Taylor ball of a cell, as a reference form on the cell. The field must
/// provide jets of that order.
PolyForm averaged_taylor(const SimplicialComplex& mesh, int cell, const FieldSample& field, int degree);

/// Canonical interpolation of a reference form of degree at most r + 1 onto
/// the trimmed space of degree r on the same reference simplex.
PolyForm trimming_interpolation(const PolyForm& a, int r);

/// P_T omega as local dual-basis coefficients.
Eigen::VectorXd local_projection(const FESpace& space, int cell, const FieldSample& field, Backend backend);
PolyForm local_project_l2(const FESpace& space, int cell, const FieldSample& field);
PolyForm local_project_taylor(const FESpace& space, int cell, const FieldSample& field);
/// Q_T applied to a (k+1)-form field, as a reference form: the averaged
/// Taylor polynomial of degree r - 1 for the full family, the trimmed
/// interpolation of the degree-r averaged Taylor polynomial otherwise. With
/// the Taylor backend d P_T omega = Q_T d omega.
PolyForm local_commuting_partner(const FESpace& space, int cell, const FieldSample& dfield);

struct BrokenField {
  int form_degree = 0;
  /// Reference form on each cell.
  std::vector<PolyForm> forms;
  /// The same forms as local dual-basis coefficients.
  std::vector<Eigen::VectorXd> coefficients;
};

BrokenField broken_projection(const FESpace& space, const FieldSample& field, Backend backend);
/// A broken field from local coefficient vectors.
BrokenField broken_from_coefficients(const FESpace& space, std::vector<Eigen::VectorXd> coefficients);

enum class WeightKind { ErnGuermond, Clement, Custom };
/// "eg", "clement" or "custom".
std::string weight_kind_name(WeightKind w);
WeightKind parse_weight_kind(const std::string& s);

/// c(S, T) for all simplices S and the cells T containing them.
class WeightScheme {
public:
  WeightKind kind() const { return kind_; }
  /// Pairs (cell, c(S, cell)) over the cells containing S, by increasing cell id.
  const std::vector<std::pair<int, double>>& weights(int d, int s) const { return w_[d][s]; }
  double weight(int d, int s, int cell) const;

private:
  friend WeightScheme make_weights(WeightKind, const SimplicialComplex&, const BoundarySubcomplex&);
  friend WeightScheme make_custom_weights(const SimplicialComplex&,
                                          const std::function<double(int, int, int)>&);
  WeightKind kind_ = WeightKind::ErnGuermond;
  std::vector<std::vector<std::vector<std::pair<int, double>>>> w_;
};

/// Uniform weights (ErnGuermond) or the indicator of T_S (Clement) with T_S
/// from choose_representatives(mesh, boundary).
WeightScheme make_weights(WeightKind kind, const SimplicialComplex& mesh, const BoundarySubcomplex& boundary);
/// Weights c(d, s, cell); throws std::invalid_argument unless they are
/// nonnegative and sum to 1 within 1e-14 for every simplex.
WeightScheme make_custom_weights(const SimplicialComplex& mesh, const std::function<double(int, int, int)>& c);

/// Active coefficient of (S, i) = sum over T containing S of c(S, T) times
/// the local DOF of (S, i) in the broken field on T.
FEFunction average(const FESpace& space, const BrokenField& broken, const WeightScheme& weights);
/// The averaging projection applied to a field.
FEFunction project(const FESpace& space, const FieldSample& field, const WeightScheme& weights, Backend backend);

}  // namespace feec

#endif
