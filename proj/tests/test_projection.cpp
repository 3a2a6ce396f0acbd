#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "feec/catalog.hpp"
#include "feec/projection.hpp"
#include "test_support.hpp"

using namespace feec;
using feec::testing::random_form;
using feec::testing::random_point_in_simplex;

namespace {

SimplicialComplex refined(const std::string& name, int levels) {
  SimplicialComplex m = make_mesh(name);
  for (int i = 0; i < levels; ++i) m = refine_uniform(m);
  return m;
}

FEFunction random_member(const FESpace& space, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FEFunction w = zero_function(space);
  for (int i = 0; i < w.coefficients.size(); ++i) w.coefficients(i) = u(rng);
  return w;
}

double l2_error(const FESpace& space, const FieldSample& field, const FEFunction& u) {
  FieldCellFunction f(space.mesh(), field);
  PiecewiseCellFunction g(space.mesh(), physical_forms(u));
  DifferenceCellFunction diff(f, g);
  return lp_norm(space.mesh(), diff, all_cells(space.mesh()), 2.0, 12).global;
}

// A reference form on a cell as a field in ambient coordinates.
FieldSample reference_as_field(const SimplicialComplex& mesh, int cell, const PolyForm& ref) {
  const auto& chart = mesh.cell_chart(cell);
  const int n = mesh.dimension();
  const PolyForm offset = chart.push_forward(ref);
  return polynomial_field(pullback(offset, AffineMap{Eigen::MatrixXd::Identity(n, n), -chart.origin()}));
}

double relative_difference(const PolyForm& a, const PolyForm& b) {
  return (a - b).max_abs() / std::max(1.0, std::max(a.max_abs(), b.max_abs()));
}

}  // namespace

TEST_CASE("taylor ball lies inside the cell") {
  const auto tri = make_mesh("reference_triangle");
  const Ball b = taylor_ball(tri, 0);
  const double inradius = (2.0 - std::sqrt(2.0)) / 2.0;
  CHECK(b.radius == doctest::Approx(0.9 * inradius).epsilon(1e-14));
  CHECK(b.center(0) == doctest::Approx(inradius).epsilon(1e-14));
  CHECK(b.center(1) == doctest::Approx(inradius).epsilon(1e-14));
  const auto tet = make_mesh("reference_tetrahedron");
  const Ball bt = taylor_ball(tet, 0);
  // Inradius of the reference tetrahedron: 3 V / total facet area.
  const double rt = 3.0 * (1.0 / 6.0) / (1.5 + std::sqrt(3.0) / 2.0);
  CHECK(bt.radius == doctest::Approx(0.9 * rt).epsilon(1e-14));
  for (const std::string name : {"unit_square_2", "unit_cube_kuhn_6", "square_with_hole_16"}) {
    const auto mesh = make_mesh(name);
    const int n = mesh.dimension();
    const auto& rule = ball_rule(n);
    for (int c = 0; c < mesh.num_cells(); ++c) {
      const Ball bc = taylor_ball(mesh, c);
      for (int q = 0; q < rule.size(); ++q) {
        const Eigen::VectorXd xi = mesh.cell_chart(c).to_reference(bc.center + bc.radius * rule.points.col(q));
        CHECK(xi.minCoeff() > 0.0);
        CHECK(xi.sum() < 1.0);
      }
    }
  }
}

TEST_CASE("averaged taylor polynomials reproduce polynomials") {
  std::mt19937 rng(41);
  for (const std::string name : {"unit_square_2", "unit_cube_kuhn_6"}) {
    const auto mesh = make_mesh(name);
    const int n = mesh.dimension();
    for (int k = 0; k <= n; ++k)
      for (int r = 0; r <= 3; ++r) {
        const PolyForm p = random_form(rng, n, k, r);
        const FieldSample f = polynomial_field(p);
        for (int c = 0; c < mesh.num_cells(); ++c) {
          const auto& chart = mesh.cell_chart(c);
          const PolyForm exact = pullback(p, AffineMap{chart.jacobian(), chart.origin()});
          CHECK(relative_difference(averaged_taylor(mesh, c, f, r), exact) <= 1e-10);
        }
      }
  }
  // Constants are reproduced by the degree-0 operator.
  const auto mesh = make_mesh("unit_square_2");
  const FieldSample dx1 = make_field(2, 1, [](const auto& x, int) { return std::array{x[0] * 0.0 + 1.0, x[0] * 0.0, x[0] * 0.0}; });
  const PolyForm q = mesh.cell_chart(0).push_forward(averaged_taylor(mesh, 0, dx1, 0));
  CHECK(q.component(0)[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(q.component(1)[0]) < 1e-14);
}

TEST_CASE("local L2 projection") {
  std::mt19937 rng(43);
  const auto mesh = refined("unit_square_2", 1);
  const auto cube = make_mesh("unit_cube_kuhn_6");
  for (const auto* m : {&mesh, &cube}) {
    const int n = m->dimension();
    for (int k = 0; k <= n; ++k)
      for (Family fam : {Family::Full, Family::Trimmed}) {
        FESpace space(*m, fam, 2, k);
        // Idempotence on members of the local space.
        const FEFunction u = random_member(space, rng);
        const FieldSample uf = fe_field(u);
        for (int c = 0; c < m->num_cells(); c += 3) {
          CHECK(relative_difference(local_project_l2(space, c, uf), local_form(u, c)) <= 1e-10);
        }
        // The residual is orthogonal to the local space.
        const FieldSample s = make_catalog_field("smooth", n, k);
        const int c = m->num_cells() / 2;
        const PolyForm p = local_project_l2(space, c, s);
        const FieldSample pf = reference_as_field(*m, c, p);
        const double scale = std::sqrt(inner_product_l2(s, s, m->cell_chart(c), 12));
        for (int l = 0; l < space.element().size(); ++l) {
          const FieldSample psi = reference_as_field(*m, c, space.element().dual_basis()[l]);
          const double norm = std::sqrt(inner_product_l2(psi, psi, m->cell_chart(c), 12));
          const double res = inner_product_l2(s, psi, m->cell_chart(c), 12) - inner_product_l2(pf, psi, m->cell_chart(c), 12);
          CHECK(std::abs(res) <= 1e-10 * scale * norm);
        }
      }
  }
  // Constant 1-form dx_1 is reproduced exactly.
  FESpace ned(mesh, Family::Trimmed, 1, 1);
  const FieldSample dx1 = make_field(2, 1, [](const auto& x, int) { return std::array{x[0] * 0.0 + 1.0, x[0] * 0.0, x[0] * 0.0}; });
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const PolyForm q = mesh.cell_chart(c).push_forward(local_project_l2(ned, c, dx1));
    CHECK(q.component(0)[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(q.component(1)[0]) < 1e-12);
    CHECK(q.degree(1e-12) == 0);
  }
}

TEST_CASE("local projection error of sin(pi x1) dx1 has third order") {
  // Family A, r = 2: the cellwise error on similar cells scales with h^3 in
  // L^inf norm, i.e. h^4 in L2 over a cell of area ~ h^2.
  const FieldSample f = make_field(2, 1, [](const auto& x, int) {
    using std::sin;
    return std::array{sin(std::numbers::pi * x[0]), x[0] * 0.0, x[0] * 0.0};
  });
  std::vector<double> err;
  SimplicialComplex mesh = refined("unit_square_2", 1);
  for (int level = 1; level <= 3; ++level, mesh = refine_uniform(mesh)) {
    FESpace space(mesh, Family::Full, 2, 1);
    std::vector<PolyForm> phys;
    for (int c = 0; c < mesh.num_cells(); ++c) phys.push_back(mesh.cell_chart(c).push_forward(local_project_l2(space, c, f)));
    FieldCellFunction fc(mesh, f);
    PiecewiseCellFunction pc(mesh, phys);
    DifferenceCellFunction diff(fc, pc);
    err.push_back(lp_norm(mesh, diff, all_cells(mesh), 2.0, 12).global);
  }
  CHECK(std::log2(err[1] / err[2]) == doctest::Approx(3.0).epsilon(0.08));
}

TEST_CASE("trimming interpolation") {
  std::mt19937 rng(47);
  for (int n = 2; n <= 3; ++n)
    for (int k = 0; k <= n; ++k)
      for (int r = 1; r <= 3; ++r) {
        // Idempotent on the trimmed space.
        const auto& basis = basis_trimmed(n, r, k);
        Eigen::VectorXd c = Eigen::VectorXd::Random(basis.size());
        PolyForm a(n, k, r);
        for (size_t i = 0; i < basis.size(); ++i) a.axpy(c(i), basis[i]);
        CHECK(relative_difference(trimming_interpolation(a, r), a) <= 1e-10);
        // d I a = d a on the full space of degree r.
        const PolyForm b = random_form(rng, n, k, r);
        const PolyForm ib = trimming_interpolation(b, r);
        if (k < n) CHECK(relative_difference(exterior_derivative(ib), exterior_derivative(b)) <= 1e-9);
        if (k == 0) CHECK(relative_difference(ib, b) <= 1e-10);
        // Degree r + 1 inputs are accepted and land in the trimmed space.
        const PolyForm e = random_form(rng, n, k, r + 1);
        const PolyForm ie = trimming_interpolation(e, r);
        CHECK(relative_difference(trimming_interpolation(ie, r), ie) <= 1e-10);
        CHECK_THROWS_AS(trimming_interpolation(random_form(rng, n, k, r + 2), r), std::invalid_argument);
      }
}

TEST_CASE("taylor backend commutes with d") {
  for (const std::string name : {"unit_square_2", "unit_cube_kuhn_6"}) {
    const auto mesh = name == "unit_square_2" ? refined(name, 1) : make_mesh(name);
    const int n = mesh.dimension();
    for (const std::string fname : {"polynomial", "smooth"})
      for (Family fam : {Family::Full, Family::Trimmed})
        for (int r = 1; r <= 3; ++r)
          for (int k = 0; k < n; ++k) {
            FESpace space(mesh, fam, r, k);
            const FieldSample f = make_catalog_field(fname, n, k);
            const FieldSample df = exterior_derivative(f);
            double res = 0.0;
            for (int c = 0; c < mesh.num_cells(); c += 2) {
              const PolyForm lhs = exterior_derivative(local_project_taylor(space, c, f));
              const PolyForm rhs = local_commuting_partner(space, c, df);
              res = std::max(res, relative_difference(lhs, rhs));
            }
            CAPTURE(space.label());
            CAPTURE(fname);
            CHECK(res <= 1e-8);
          }
  }
}

TEST_CASE("weight schemes") {
  const auto mesh = refined("unit_square_2", 1);
  const auto U = named_boundary(mesh, "bottom");
  const auto eg = make_weights(WeightKind::ErnGuermond, mesh, U);
  const auto cl = make_weights(WeightKind::Clement, mesh, U);
  const auto reps = choose_representatives(mesh, U);
  for (int d = 0; d <= 2; ++d)
    for (int s = 0; s < mesh.num_simplices(d); ++s) {
      double se = 0.0, sc = 0.0;
      const auto& cells = mesh.cells_containing(d, s);
      for (const auto& [c, w] : eg.weights(d, s)) {
        CHECK(w == doctest::Approx(1.0 / cells.size()));
        se += w;
      }
      for (const auto& [c, w] : cl.weights(d, s)) {
        CHECK(w == (c == reps.cell[d][s] ? 1.0 : 0.0));
        sc += w;
      }
      CHECK(se == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(sc == 1.0);
      if (d == 1 && cells.size() == 2) {
        CHECK(eg.weight(d, s, cells[0]) == 0.5);
        CHECK(eg.weight(d, s, cells[1]) == 0.5);
      }
      if (d == 1 && cells.size() == 1) {
        CHECK(eg.weight(d, s, cells[0]) == 1.0);
        CHECK(cl.weight(d, s, cells[0]) == 1.0);
      }
    }
  CHECK_THROWS_AS(make_custom_weights(mesh, [](int, int, int) { return 0.3; }), std::invalid_argument);
  CHECK_THROWS_AS(make_custom_weights(mesh,
                                      [&](int d, int s, int c) {
                                        const auto& cells = mesh.cells_containing(d, s);
                                        if (cells.size() == 1) return 1.0;
                                        return c == cells[0] ? 1.5 : -0.5 / (cells.size() - 1);
                                      }),
                  std::invalid_argument);
  const auto custom = make_custom_weights(mesh, [&](int d, int s, int c) {
    const auto& cells = mesh.cells_containing(d, s);
    if (cells.size() == 1) return 1.0;
    return c == cells.back() ? 0.25 : 0.75 / (cells.size() - 1);
  });
  CHECK(custom.kind() == WeightKind::Custom);
  CHECK(parse_weight_kind("eg") == WeightKind::ErnGuermond);
  CHECK_THROWS_AS(parse_weight_kind("sz"), std::invalid_argument);
  CHECK(parse_backend("taylor") == Backend::Taylor);
  CHECK_THROWS_AS(parse_backend("h1"), std::invalid_argument);
}

TEST_CASE("projection property") {
  std::mt19937 rng(53);
  for (const std::string name : {"unit_square_2", "unit_cube_kuhn_6"}) {
    const auto mesh = name == "unit_square_2" ? refined(name, 1) : make_mesh(name);
    const int n = mesh.dimension();
    for (const std::string sel : {"none", "bottom"}) {
      const auto U = named_boundary(mesh, sel);
      const WeightScheme ws[] = {make_weights(WeightKind::ErnGuermond, mesh, U), make_weights(WeightKind::Clement, mesh, U)};
      for (Family fam : {Family::Full, Family::Trimmed})
        for (int r = 1; r <= 2; ++r)
          for (int k = 0; k <= n; ++k) {
            FESpace space(mesh, fam, r, k, U);
            const FEFunction u = random_member(space, rng);
            const FieldSample uf = fe_field(u);
            for (const auto& w : ws)
              for (Backend b : {Backend::L2, Backend::Taylor}) {
                const FEFunction pu = project(space, uf, w, b);
                CAPTURE(space.label());
                CHECK((pu.coefficients - u.coefficients).norm() <= 1e-9 * u.coefficients.norm());
              }
            const FEFunction z = project(space, zero_field(n, k), ws[0], Backend::Taylor);
            CHECK(z.coefficients.norm() == 0.0);
          }
    }
  }
}

TEST_CASE("linearity and locality") {
  const auto mesh = refined("unit_square_2", 2);
  FESpace space(mesh, Family::Full, 2, 1);
  const auto w = make_weights(WeightKind::ErnGuermond, mesh, {});
  const FieldSample a = make_catalog_field("smooth", 2, 1);
  const FieldSample b = make_catalog_field("polynomial", 2, 1);
  for (Backend be : {Backend::L2, Backend::Taylor}) {
    const FEFunction pa = project(space, a, w, be);
    const FEFunction pb = project(space, b, w, be);
    const FEFunction pc = project(space, combine(2.0, a, -3.0, b), w, be);
    CHECK((pc.coefficients - (2.0 * pa.coefficients - 3.0 * pb.coefficients)).norm() <= 1e-10 * pc.coefficients.norm());
  }
  // Changing the broken data away from the vertex patch of T leaves the
  // projection on T unchanged.
  BrokenField broken = broken_projection(space, a, Backend::L2);
  const int t = 5;
  std::vector<char> near(mesh.num_cells(), 0);
  for (int v : mesh.cell_faces(t, 0))
    for (int c : mesh.cells_containing(0, v)) near[c] = 1;
  const FEFunction before = average(space, broken, w);
  auto coeffs = broken.coefficients;
  int changed = 0;
  for (int c = 0; c < mesh.num_cells(); ++c)
    if (!near[c]) {
      coeffs[c] = Eigen::VectorXd::Constant(coeffs[c].size(), 7.0);
      ++changed;
    }
  CHECK(changed > 0);
  const FEFunction after = average(space, broken_from_coefficients(space, coeffs), w);
  CHECK(local_coefficients(before, t) == local_coefficients(after, t));
}

TEST_CASE("broken projections and convergence of the averaged projection") {
  const FieldSample f = make_catalog_field("smooth", 2, 1);
  std::vector<double> err, jumps;
  SimplicialComplex mesh = make_mesh("unit_square_2");
  for (int level = 0; level < 3; ++level, mesh = refine_uniform(mesh)) {
    FESpace space(mesh, Family::Trimmed, 1, 1);
    const auto w = make_weights(WeightKind::ErnGuermond, mesh, {});
    err.push_back(l2_error(space, f, project(space, f, w, Backend::Taylor)));
    // Largest jump of the broken L2 projection across interior facets, in the
    // tangential component at the facet midpoint.
    const BrokenField br = broken_projection(space, f, Backend::L2);
    double jump = 0.0;
    for (int e = 0; e < mesh.num_simplices(1); ++e) {
      const auto& cells = mesh.cells_containing(1, e);
      if (cells.size() != 2) continue;
      double vals[2];
      for (int i = 0; i < 2; ++i) {
        const int p = mesh.local_index(cells[i], 1, e);
        const PolyForm tr = trace(br.forms[cells[i]], local_subsimplices(2, 1)[p]);
        const double mid[1] = {0.5};
        vals[i] = tr.evaluate_components(mid)[0];
      }
      jump = std::max(jump, std::abs(vals[0] - vals[1]));
    }
    jumps.push_back(jump);
  }
  CHECK(err[1] < err[0]);
  CHECK(err[2] < err[1]);
  CHECK(jumps[0] > 1e-3);
  CHECK(jumps[2] < jumps[1]);
  // A global polynomial in the space has single-valued broken projections.
  const auto m = refined("unit_square_2", 1);
  FESpace space(m, Family::Full, 2, 1);
  std::mt19937 rng(59);
  const PolyForm p = random_form(rng, 2, 1, 2);
  const BrokenField br = broken_projection(space, polynomial_field(p), Backend::Taylor);
  const FEFunction ip = interpolate_polynomial(space, p);
  for (int c = 0; c < m.num_cells(); ++c)
    CHECK((br.coefficients[c] - local_coefficients(ip, c)).lpNorm<Eigen::Infinity>() <= 1e-10);
}
