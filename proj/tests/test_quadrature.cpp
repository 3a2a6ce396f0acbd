#include "doctest.h"

#include <cmath>
#include <random>

#include "feec/field.hpp"
#include "feec/quadrature.hpp"
#include "test_support.hpp"

using namespace feec;
using feec::testing::random_form;

TEST_CASE("rule examples") {
  const auto& r1 = simplex_rule(1, 1);
  double s = 0.0;
  for (int q = 0; q < r1.size(); ++q) s += r1.weights(q) * r1.points(0, q);
  CHECK(s == doctest::Approx(0.5).epsilon(1e-15));
  const auto& r2 = simplex_rule(2, 2);
  s = 0.0;
  for (int q = 0; q < r2.size(); ++q) s += r2.weights(q) * r2.points(0, q) * r2.points(1, q);
  // Beta integral: int_T x1 x2 = 1! 1! / 4! = 1/24, and |T| = 1/2.
  CHECK(s * 0.5 == doctest::Approx(1.0 / 24.0).epsilon(1e-14));
  for (int d = 0; d <= 3; ++d)
    for (int order = 0; order <= kMaxQuadratureOrder; ++order) {
      const auto& r = simplex_rule(d, order);
      CHECK(r.weights.sum() == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(r.weights.minCoeff() > 0.0);
      for (int q = 0; q < r.size(); ++q) CHECK(r.barycentric(q).minCoeff() >= 0.0);
    }
  CHECK_THROWS_AS(simplex_rule(2, kMaxQuadratureOrder + 1), std::invalid_argument);
  for (int d = 2; d <= 3; ++d) {
    const auto& b = ball_rule(d);
    CHECK(b.weights.sum() == doctest::Approx(1.0));
    for (int q = 0; q < b.size(); ++q) CHECK(b.points.col(q).norm() < 1.0);
    // The bump weight is radial, so odd moments vanish.
    CHECK(std::abs((b.points * b.weights)(0)) < 1e-14);
  }
}

TEST_CASE("integrals of forms") {
  Eigen::MatrixXd edge(2, 2);
  edge << 0, 1, 0, 0;
  SimplexChart e(edge);
  // d t along the unit edge.
  auto dx = polynomial_field(PolyForm::coframe(2, 0b01u));
  CHECK(integrate_form(dx, e, 2) == doctest::Approx(1.0));
  // Whitney form lambda_0 d lambda_1 - lambda_1 d lambda_0 of the edge (0,0)-(1,0)
  // in the reference triangle: lambda_0 = 1 - x - y, lambda_1 = x.
  PolyForm whitney(2, 1, 1);
  whitney.component(0)[0] = 1.0;  // dx coefficient: (1 - x - y) + x = 1 - y
  whitney.component(0)[2] = -1.0;
  whitney.component(1)[1] = 1.0;  // dy coefficient: x
  CHECK(integrate_form(polynomial_field(whitney), e, 4) == doctest::Approx(1.0));
  CHECK(integrate_reference(PolyForm::coframe(2, 0b11u)) == doctest::Approx(0.5));
  CHECK_THROWS_AS(integrate_form(dx, make_mesh("reference_triangle").cell_chart(0), 2), std::invalid_argument);
}

TEST_CASE("L2 inner products") {
  auto tri = make_mesh("reference_triangle").cell_chart(0);
  auto dx1 = PolyForm::coframe(2, 0b01u), dx2 = PolyForm::coframe(2, 0b10u);
  CHECK(inner_product_l2(dx1, dx2, tri) == doctest::Approx(0.0));
  CHECK(inner_product_l2(dx1, dx1, tri) == doctest::Approx(0.5));
  auto x1 = PolyForm::scalar(Polynomial::variable(2, 0));
  CHECK(inner_product_l2(x1, x1, tri) == doctest::Approx(1.0 / 12.0));
  // Physical metric: on a scaled cell the reference dx1 is (1/2) dx1.
  Eigen::MatrixXd big(2, 3);
  big << 0, 2, 0, 0, 0, 2;
  SimplexChart b(big);
  CHECK(inner_product_l2(dx1, dx1, b) == doctest::Approx(0.25 * 2.0));
  CHECK(inner_product_l2(polynomial_field(dx1), polynomial_field(dx1), b, 2) == doctest::Approx(2.0));
  CHECK_THROWS_AS(inner_product_l2(dx1, x1, tri), std::invalid_argument);
}

TEST_CASE("Stokes on a cell") {
  std::mt19937 rng(17);
  for (const char* name : {"unit_square_2", "unit_cube_kuhn_6"}) {
    auto mesh = make_mesh(name);
    const int n = mesh.dimension();
    for (int trial = 0; trial < 10; ++trial) {
      auto phys = random_form(rng, n, n - 1, 3);
      auto field = polynomial_field(phys);
      auto dfield = polynomial_field(exterior_derivative(phys));
      for (int c = 0; c < mesh.num_cells(); ++c) {
        const double lhs = mesh.cell_chart(c).orientation() * integrate_form(dfield, mesh.cell_chart(c), 4);
        double rhs = 0.0;
        for (int f : mesh.cell_faces(c, n - 1)) rhs += mesh.orientation_sign(f, c) * integrate_form(field, mesh.chart(n - 1, f), 4);
        CHECK(std::abs(lhs - rhs) < 1e-11);
      }
    }
  }
}

TEST_CASE("norms") {
  auto mesh = make_mesh("unit_square_2");
  auto cells = all_cells(mesh);
  FieldCellFunction zero(mesh, zero_field(2, 0));
  CHECK(lp_norm(mesh, zero, cells, 2.0, 4).global == 0.0);
  FieldCellFunction one(mesh, polynomial_field(PolyForm::scalar(Polynomial::constant(2, 1.0))));
  CHECK(lp_norm(mesh, one, cells, 2.0, 4).global == doctest::Approx(1.0));
  CHECK(lp_norm(mesh, one, cells, 1.0, 4).global == doctest::Approx(1.0));
  CHECK(lp_norm(mesh, one, cells, kInfinity, 4).global == doctest::Approx(1.0));
  FieldCellFunction x1(mesh, polynomial_field(PolyForm::scalar(Polynomial::variable(2, 0))));
  CHECK(lp_norm(mesh, x1, cells, 2.0, 4).global == doctest::Approx(1.0 / std::sqrt(3.0)));
  auto x1sq = PolyForm::scalar(Polynomial::monomial(2, {2, 0, 0}));
  FieldCellFunction sq(mesh, polynomial_field(x1sq));
  CHECK(sobolev_seminorm(mesh, sq, cells, 1, 2.0, 4).global == doctest::Approx(2.0 / std::sqrt(3.0)));
  CHECK(sobolev_seminorm(mesh, x1, cells, 2, 2.0, 4).global == doctest::Approx(0.0));
  CHECK(sobolev_seminorm(mesh, one, cells, 1, 2.0, 4).global == doctest::Approx(0.0));
  // Homogeneity and per-cell additivity.
  auto scaled = polynomial_field(PolyForm::scalar(Polynomial::variable(2, 0) * -3.0));
  FieldCellFunction s3(mesh, scaled);
  auto base = lp_norm(mesh, x1, cells, 2.0, 4);
  CHECK(lp_norm(mesh, s3, cells, 2.0, 4).global == doctest::Approx(3.0 * base.global));
  double sum = 0.0;
  for (double v : base.per_cell) sum += v * v;
  CHECK(sum == doctest::Approx(base.global * base.global));
  // Piecewise polynomial representation agrees with the analytic one.
  std::vector<PolyForm> pieces;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    AffineMap shift{Eigen::MatrixXd::Identity(2, 2), mesh.cell_chart(c).origin()};
    pieces.push_back(PolyForm::scalar(x1sq.component(0).compose(shift)));
  }
  PiecewiseCellFunction pw(mesh, pieces);
  DifferenceCellFunction diff(pw, sq);
  CHECK(lp_norm(mesh, diff, cells, 2.0, 6).global < 1e-14);
  CHECK(sobolev_seminorm(mesh, diff, cells, 1, 2.0, 6).global < 1e-13);
  CHECK_THROWS_AS(lp_norm(mesh, x1, cells, 3.0, 4), std::invalid_argument);
  FieldSample no_jets(2, 0, [](std::span<const double>, const FieldHint&, std::span<double> out) { out[0] = 0.0; });
  FieldCellFunction nj(mesh, no_jets);
  CHECK_THROWS_AS(sobolev_seminorm(mesh, nj, cells, 1, 2.0, 4), std::logic_error);
}

TEST_CASE("field derivatives") {
  auto f = make_field(2, 0, [](const auto& x, int) {
    using std::sin;
    using std::cos;
    return std::array{sin(x[0]) * cos(x[1]), x[0] * 0.0, x[0] * 0.0};
  });
  auto df = exterior_derivative(f);
  std::vector<double> p{0.3, 0.7};
  auto v = df.value(p);
  CHECK(v[0] == doctest::Approx(std::cos(0.3) * std::cos(0.7)));
  CHECK(v[1] == doctest::Approx(-std::sin(0.3) * std::sin(0.7)));
  auto ddf = exterior_derivative(df);
  CHECK(std::abs(ddf.value(p)[0]) < 1e-14);
  CHECK(exterior_derivative(ddf).num_components() == 0);
}
