// Error measurement and measured versions of the approximation estimates.
//
// Provides:
//  - error reports in W^{s,p} (s in {0, 1}, p in {1, 2, inf}) per cell and globally
//  - convergence studies over uniform refinement with least-squares slopes
//  - the weighted best-approximation errors E_2 (global, conforming) and
//    e_{2,T} (cellwise, unconstrained) with weight h_T^2 on the d-term
//  - the patch stability constant of the averaging projection
//  - the weak boundary-condition residual of discrete forms

#ifndef FEEC_ANALYSIS_HPP
#define FEEC_ANALYSIS_HPP

#include <functional>
#include <string>
#include <vector>

#include "feec/projection.hpp"

namespace feec {

inline constexpr int kAnalysisQuadratureOrder = 12;

struct NormSpec {
  /// Sobolev order, 0 or 1 (seminorm).
  int s = 0;
  /// 1, 2 or kInfinity.
  double p = 2.0;
};
/// "L2", "L1", "Linf", "W1,2", ...
std::string norm_id(const NormSpec& norm);
NormSpec parse_norm(const std::string& id);

struct ErrorReport {
  std::vector<NormSpec> norms;
  /// global[i] for norms[i].
  std::vector<double> global;
  /// per_cell[i][j] for norms[i] and cells[j].
  std::vector<std::vector<double>> per_cell;
  std::vector<int> cells;
};

/// Norms of field - u over the given cells (all cells when empty).
ErrorReport error_report(const FEFunction& u, const FieldSample& field, const std::vector<NormSpec>& norms,
                         std::vector<int> cells = {});

/// Least-squares slope of log(error) against log(h) over the last three
/// points; requires at least three.
double fit_slope(const std::vector<double>& h, const std::vector<double>& error);

struct SpaceParams {
  Family family = Family::Full;
  int r = 1;
  int k = 0;
  std::string boundary = "none";
};

struct LevelRecord {
  int level = 0;
  double h_max = 0.0;
  int num_cells = 0;
  int num_dofs = 0;
  std::vector<double> errors;
};

struct ConvergenceReport {
  std::string space;
  std::string weights;
  std::string backend;
  std::string field;
  std::vector<NormSpec> norms;
  std::vector<LevelRecord> levels;
  /// One per norm; empty when fewer than three levels were run.
  std::vector<double> slopes;
};

/// Cells on which errors are measured; all cells when not set.
using CellSelector = std::function<std::vector<int>(const SimplicialComplex&)>;

/// Projects the field on base refined first_level, ..., last_level times and
/// records the requested errors of the averaging projection.
ConvergenceReport convergence_study(const SimplicialComplex& base, int first_level, int last_level,
                                    const SpaceParams& params, const FieldSample& field, WeightKind weights,
                                    Backend backend, const std::vector<NormSpec>& norms, CellSelector cells = {});

/// Cells having a vertex in the boundary subcomplex.
std::vector<int> cells_touching(const SimplicialComplex& mesh, const BoundarySubcomplex& boundary);

struct BestApproxResult {
  /// E_2 = min over the space of (||w - u||^2 + sum_T h_T^2 ||dw - du||_T^2)^(1/2).
  double global = 0.0;
  /// e_{2,T} per cell.
  std::vector<double> local;
  /// (sum_T e_{2,T}^2)^(1/2).
  double local_total = 0.0;
  /// global / local_total, or 1 when both are below 1e-10.
  double ratio = 1.0;
  FEFunction minimizer;
};

/// Global and local best approximations; dfield is d of field.
BestApproxResult best_approximation(const FESpace& space, const FieldSample& field, const FieldSample& dfield);
std::vector<double> local_best_errors(const FESpace& space, const FieldSample& field, const FieldSample& dfield);
/// Weighted error (||w - u||^2 + sum_T h_T^2 ||dw - du||_T^2)^(1/2) of a candidate.
double weighted_error(const FEFunction& u, const FieldSample& field, const FieldSample& dfield);

struct StabilityResult {
  /// max over cells of the per-cell constant.
  double constant = 0.0;
  /// sup over broken polynomial data w of ||Pw||_{L2(T)} / (sum_{T' meets T} ||w||_{L2(T')}^2)^(1/2).
  std::vector<double> per_cell;
};
/// Patch stability of the averaging operator applied to broken data of the
/// local spaces (equivalently the L2 backend acting on L2 fields).
StabilityResult stability_constant(const FESpace& space, const WeightScheme& weights);

struct BoundaryTestResult {
  /// Largest |int w ^ d eta + (-1)^k int dw ^ eta| relative to the integrand
  /// magnitude sum_T |T^| (|w| |d eta| + |dw| |eta|), with |.| the largest
  /// reference-coordinate coefficient and |T^| the reference volume.
  double max_relative = 0.0;
  std::vector<double> residuals;
  int num_tests = 0;
};
/// Integration-by-parts test of a discrete form against random smooth
/// (n-k-1)-forms supported near the boundary subcomplex of its space: squared
/// hat functions of vertices inside it and bubbles of its facets, each times a
/// random constant form.
BoundaryTestResult weak_boundary_residual(const FEFunction& u, int num_tests, unsigned seed);
/// The same test against an explicit subcomplex of the mesh of u.
BoundaryTestResult weak_boundary_residual(const FEFunction& u, const BoundarySubcomplex& boundary, int num_tests,
                                          unsigned seed);

}  // namespace feec

#endif
