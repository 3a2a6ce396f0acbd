#include "doctest.h"

#include <cmath>
#include <random>

#include "feec/fespace.hpp"
#include "test_support.hpp"

using namespace feec;
using feec::testing::random_form;
using feec::testing::random_point_in_simplex;

namespace {

struct Config {
  Family family;
  int r;
  int k;
};

std::vector<Config> configs(int n, int rmax) {
  std::vector<Config> out;
  for (Family f : {Family::Full, Family::Trimmed})
    for (int r = 1; r <= rmax; ++r)
      for (int k = 0; k <= n; ++k) out.push_back({f, r, k});
  return out;
}

SimplicialComplex refined(const std::string& name, int levels) {
  SimplicialComplex m = make_mesh(name);
  for (int i = 0; i < levels; ++i) m = refine_uniform(m);
  return m;
}

// Positions of a simplex inside a cell, in canonical order.
std::vector<int> positions(const SimplicialComplex& mesh, int cell, int d, int s) {
  return local_subsimplices(mesh.dimension(), d)[mesh.local_index(cell, d, s)];
}

// Tangential components of a physical offset form of cell c on simplex (d, s)
// at reference point xi of the simplex, computed by pointwise evaluation.
Eigen::VectorXd tangential(const SimplicialComplex& mesh, const PolyForm& phys, int c, int d, int s,
                           const std::vector<double>& xi) {
  const auto sc = mesh.chart(d, s);
  const Eigen::VectorXd x = sc.to_physical(xi) - mesh.cell_chart(c).origin();
  const auto v = phys.evaluate_components(std::span<const double>(x.data(), x.size()));
  return sc.pullback_components(phys.form_degree()) * Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
}

}  // namespace

TEST_CASE("space dimension examples") {
  const auto tri = make_mesh("reference_triangle");
  CHECK(FESpace(tri, Family::Trimmed, 1, 1).num_dofs() == 3);
  const auto sq = make_mesh("unit_square_2");
  CHECK(FESpace(sq, Family::Full, 1, 0).num_dofs() == 4);
  const auto tet = make_mesh("reference_tetrahedron");
  FESpace face(tet, Family::Trimmed, 1, 2);
  CHECK(face.num_dofs() == 4);
  for (const auto& g : face.dofs()) CHECK(g.dim == 2);
}

TEST_CASE("dof functional examples") {
  const auto tri = make_mesh("reference_triangle");
  FESpace ned(tri, Family::Trimmed, 1, 1);
  auto fe = ned.dof_functionals(1, 0);
  REQUIRE(fe.size() == 1);
  CHECK(fe[0].weight.form_degree() == 0);
  CHECK(fe[0].weight.degree() == 0);
  CHECK(ned.dof_functionals(0, 0).empty());
  FESpace p2(tri, Family::Full, 2, 0);
  CHECK(p2.dof_functionals(1, 2).size() == 1);
  CHECK(p2.dof_functionals(2, 0).empty());
  CHECK_THROWS_AS(p2.dof_functionals(1, 7), std::invalid_argument);
}

TEST_CASE("weight spaces have the interior dimension") {
  // dim of the interior space of P_r Lambda^k(f^m) equals dim P^-_{r+k-m} Lambda^{m-k}(f)
  // and that of P^-_r Lambda^k(f^m) equals dim P_{r+k-m-1} Lambda^{m-k}(f).
  for (int m = 0; m <= 3; ++m)
    for (int r = 1; r <= 4; ++r)
      for (int k = 0; k <= m; ++k) {
        CHECK(static_cast<int>(dof_weight_basis(Family::Full, m, r, k).size()) == dim_trimmed(m, r + k - m, m - k));
        CHECK(static_cast<int>(dof_weight_basis(Family::Trimmed, m, r, k).size()) ==
              dim_full(m, r + k - m - 1, m - k));
      }
}

TEST_CASE("whitney forms are the dual basis of the lowest trimmed 1-forms") {
  const auto& el = LocalElement::get(2, Family::Trimmed, 1, 1);
  // Edges in position order (0,1), (0,2), (1,2); lambda_0 = 1 - x - y,
  // lambda_1 = x, lambda_2 = y; W_ij = lambda_i d lambda_j - lambda_j d lambda_i.
  auto whitney = [](int e, double x, double y) -> std::array<double, 2> {
    switch (e) {
      case 0: return {1.0 - y, x};
      case 1: return {y, 1.0 - x};
      default: return {-y, x};
    }
  };
  std::mt19937 rng(3);
  for (int e = 0; e < 3; ++e)
    for (int t = 0; t < 10; ++t) {
      auto p = random_point_in_simplex(rng, 2);
      auto v = el.dual_basis()[e].evaluate_components(p);
      auto w = whitney(e, p[0], p[1]);
      CHECK(std::abs(v[0] - w[0]) < 1e-12);
      CHECK(std::abs(v[1] - w[1]) < 1e-12);
    }
  const auto tri = make_mesh("reference_triangle");
  FESpace ned(tri, Family::Trimmed, 1, 1);
  for (int e = 0; e < 3; ++e) {
    auto f = ned.dof_functionals(1, e)[0];
    for (int e2 = 0; e2 < 3; ++e2)
      CHECK(apply_dof(ned, f, 0, el.dual_basis()[e2]) == doctest::Approx(e == e2 ? 1.0 : 0.0).epsilon(1e-13));
    PolyForm a = el.dual_basis()[1];
    CHECK(apply_dof(ned, f, 0, 2.0 * a) == doctest::Approx(2.0 * apply_dof(ned, f, 0, a)));
  }
}

TEST_CASE("lowest order 0-forms are barycentric coordinates") {
  for (int n = 2; n <= 3; ++n) {
    const auto& el = LocalElement::get(n, Family::Full, 1, 0);
    std::mt19937 rng(5);
    for (int t = 0; t < 10; ++t) {
      auto p = random_point_in_simplex(rng, n);
      double l0 = 1.0;
      for (double v : p) l0 -= v;
      CHECK(el.dual_basis()[0].evaluate_components(p)[0] == doctest::Approx(l0).epsilon(1e-12));
      for (int i = 0; i < n; ++i)
        CHECK(el.dual_basis()[i + 1].evaluate_components(p)[0] == doctest::Approx(p[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("local elements are unisolvent and well conditioned") {
  for (int n = 2; n <= 3; ++n)
    for (const auto& c : configs(n, n == 2 ? 4 : 3)) {
      if ((c.k == 0 && c.family == Family::Trimmed) || (c.k == n && c.family == Family::Full)) continue;
      const auto& el = LocalElement::get(n, c.family, c.r, c.k);
      CAPTURE(n);
      CAPTURE(c.r);
      CAPTURE(c.k);
      CHECK(el.condition_number() < 1e12);
      // Biorthogonality of the local dual basis, evaluated via both paths.
      for (int l = 0; l < el.size(); ++l) {
        const Eigen::VectorXd v = el.apply_dofs(el.dual_basis()[l]);
        for (int i = 0; i < el.size(); ++i) {
          CHECK(std::abs(v(i) - (i == l ? 1.0 : 0.0)) < 1e-10);
          if (l < 3) CHECK(std::abs(el.apply_dof(i, el.dual_basis()[l]) - v(i)) < 1e-14 * el.dual_basis()[l].max_abs() + 1e-12);
        }
      }
    }
}

TEST_CASE("mass matrices match direct inner products") {
  std::mt19937 rng(11);
  Eigen::MatrixXd pts(3, 4);
  pts << 0.1, 1.0, 0.2, 0.3, 0.0, 0.2, 0.9, 0.1, 0.0, 0.1, 0.3, 1.2;
  SimplexChart chart3(pts);
  Eigen::MatrixXd pts2(2, 3);
  pts2 << 0.3, 0.1, 1.1, 0.2, 0.9, 0.4;
  SimplexChart chart2(pts2);
  for (const auto& [el, chart] : {std::make_pair(&LocalElement::get(3, Family::Trimmed, 2, 1), &chart3),
                                  std::make_pair(&LocalElement::get(3, Family::Full, 1, 2), &chart3),
                                  std::make_pair(&LocalElement::get(2, Family::Full, 2, 1), &chart2)}) {
    const Eigen::MatrixXd M = el->mass_matrix(*chart);
    const Eigen::MatrixXd Md = el->derivative_mass_matrix(*chart);
    for (int a = 0; a < std::min(5, el->size()); ++a)
      for (int b = 0; b < el->size(); b += 2) {
        CHECK(M(a, b) == doctest::Approx(inner_product_l2(el->dual_basis()[a], el->dual_basis()[b], *chart))
                             .epsilon(1e-10));
        CHECK(Md(a, b) == doctest::Approx(inner_product_l2(exterior_derivative(el->dual_basis()[a]),
                                                           exterior_derivative(el->dual_basis()[b]), *chart))
                              .epsilon(1e-10));
      }
  }
}

TEST_CASE("global biorthogonality, locality and conformity") {
  std::vector<std::pair<SimplicialComplex, int>> meshes;
  meshes.emplace_back(refined("unit_square_2", 1), 3);
  meshes.emplace_back(make_mesh("square_with_hole_16"), 2);
  meshes.emplace_back(make_mesh("unit_cube_kuhn_6"), 2);
  for (const auto& [mesh, rmax] : meshes) {
    const int n = mesh.dimension();
    for (const auto& c : configs(n, rmax)) {
      FESpace space(mesh, c.family, c.r, c.k);
      CAPTURE(n);
      CAPTURE(space.label());
      std::vector<std::vector<PolyForm>> local(space.num_dofs());
      double bio = 0.0;
      double loc = 0.0;
      for (int g = 0; g < space.num_dofs(); ++g) {
        const FEFunction phi = global_shape_function(space, g);
        for (int cell = 0; cell < mesh.num_cells(); ++cell) local[g].push_back(local_form(phi, cell));
      }
      // phi*_{S,i}(phi_{S',j}) from every cell containing S.
      for (int g = 0; g < space.num_dofs(); ++g) {
        const auto& dof = space.dofs()[g];
        const auto fs = space.dof_functionals(dof.dim, dof.simplex);
        for (int cell : mesh.cells_containing(dof.dim, dof.simplex))
          for (int h = 0; h < space.num_dofs(); ++h)
            bio = std::max(bio, std::abs(apply_dof(space, fs[dof.index], cell, local[h][cell]) - (g == h ? 1.0 : 0.0)));
      }
      CHECK(bio <= 1e-9);
      // Tr_{S'} phi_{S,i} = 0 whenever S is not contained in S', relative to the
      // coefficient size of phi on the cell.
      for (int g = 0; g < space.num_dofs(); ++g) {
        const auto& dof = space.dofs()[g];
        for (int cell = 0; cell < mesh.num_cells(); ++cell)
          for (int d = c.k; d <= n; ++d)
            for (int s : mesh.cell_faces(cell, d))
              if (!mesh.contains(d, s, dof.dim, dof.simplex))
                loc = std::max(loc, trace(local[g][cell], positions(mesh, cell, d, s)).max_abs() /
                                        std::max(1.0, local[g][cell].max_abs()));
      }
      CHECK(loc <= 1e-11);

      // Two-sided evaluation of the tangential trace on interior facets.
      std::mt19937 rng(17);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      FEFunction w = zero_function(space);
      for (int i = 0; i < w.coefficients.size(); ++i) w.coefficients(i) = u(rng);
      const auto phys = physical_forms(w);
      double jump = 0.0;
      for (int f = 0; f < mesh.num_simplices(n - 1); ++f) {
        const auto& cells = mesh.cells_containing(n - 1, f);
        if (cells.size() != 2 || c.k > n - 1) continue;
        for (int t = 0; t < 3; ++t) {
          auto xi = random_point_in_simplex(rng, n - 1);
          const Eigen::VectorXd a = tangential(mesh, phys[cells[0]], cells[0], n - 1, f, xi);
          const Eigen::VectorXd b = tangential(mesh, phys[cells[1]], cells[1], n - 1, f, xi);
          jump = std::max(jump, (a - b).lpNorm<Eigen::Infinity>());
        }
      }
      CHECK(jump <= 1e-10);
    }
  }
}

TEST_CASE("global dimension counts") {
  for (int level = 0; level <= 1; ++level)
    for (const std::string name : {"unit_square_2", "unit_cube_kuhn_6"}) {
      const auto mesh = refined(name, level);
      const int n = mesh.dimension();
      std::vector<long> N(n + 1);
      for (int d = 0; d <= n; ++d) N[d] = mesh.num_simplices(d);
      for (int r = 1; r <= 3; ++r) {
        // Lagrange nodes: C(r-1, d) per d-simplex.
        long lagrange = 0;
        for (int d = 0; d <= n; ++d) lagrange += N[d] * binomial(r - 1, d);
        CHECK(FESpace(mesh, Family::Full, r, 0).num_dofs() == lagrange);
        CHECK(FESpace(mesh, Family::Trimmed, r, n).num_dofs() == N[n] * dim_trimmed(n, r, n));
      }
      for (int k = 0; k <= n; ++k) CHECK(FESpace(mesh, Family::Trimmed, 1, k).num_dofs() == N[k]);
      // Second-kind edge elements: two DOFs per edge, plus interior ones from r = 2.
      if (n == 2) CHECK(FESpace(mesh, Family::Full, 1, 1).num_dofs() == 2 * N[1]);
    }
}

TEST_CASE("family forcing keeps the space") {
  const auto mesh = make_mesh("unit_square_2");
  FESpace a(mesh, Family::Trimmed, 2, 0);
  CHECK(a.family() == Family::Full);
  CHECK(a.degree() == 2);
  CHECK(!a.note().empty());
  FESpace b(mesh, Family::Full, 1, 2);
  CHECK(b.family() == Family::Trimmed);
  CHECK(b.degree() == 2);
  CHECK(b.num_dofs() == mesh.num_cells() * dim_full(2, 1, 2));
  FESpace p0(mesh, Family::Full, 0, 2);
  CHECK(p0.num_dofs() == mesh.num_cells());
  CHECK(FESpace(mesh, Family::Full, 1, 1).note().empty());
  CHECK_THROWS_AS(FESpace(mesh, Family::Trimmed, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(FESpace(mesh, Family::Full, 1, 3), std::invalid_argument);
  CHECK(parse_family("Pminus") == Family::Trimmed);
  CHECK(parse_family("P") == Family::Full);
  CHECK_THROWS_AS(parse_family("Q"), std::invalid_argument);
}

TEST_CASE("boundary masking") {
  for (const std::string name : {"unit_square_2", "unit_cube_kuhn_6"}) {
    const auto mesh = refined(name, name == "unit_square_2" ? 1 : 0);
    const int n = mesh.dimension();
    for (const std::string sel : {"all", "bottom"}) {
      const auto U = named_boundary(mesh, sel);
      for (const auto& c : configs(n, 2)) {
        FESpace space(mesh, c.family, c.r, c.k, U);
        FESpace full(mesh, c.family, c.r, c.k);
        CAPTURE(space.label());
        int masked = 0;
        for (int g = 0; g < space.num_dofs(); ++g) {
          const auto& dof = space.dofs()[g];
          CHECK((dof.active < 0) == U.contains(dof.dim, dof.simplex));
          masked += dof.active < 0;
        }
        CHECK(space.num_active() + masked == full.num_dofs());
        // Every member has vanishing trace on the simplices of U.
        std::mt19937 rng(23);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        FEFunction w = zero_function(space);
        for (int i = 0; i < w.coefficients.size(); ++i) w.coefficients(i) = u(rng);
        double res = 0.0;
        for (int cell = 0; cell < mesh.num_cells(); ++cell) {
          const PolyForm lf = local_form(w, cell);
          for (int d = c.k; d < n; ++d)
            for (int s : mesh.cell_faces(cell, d))
              if (U.contains(d, s)) res = std::max(res, trace(lf, positions(mesh, cell, d, s)).max_abs());
        }
        CHECK(res <= 1e-10);
        if (!U.empty() && space.num_active() < space.num_dofs()) {
          int g = 0;
          while (space.dofs()[g].active >= 0) ++g;
          CHECK_THROWS_AS(global_shape_function(space, g), std::invalid_argument);
        }
      }
    }
  }
}

TEST_CASE("evaluation reproduces polynomials in the space") {
  std::mt19937 rng(29);
  for (const std::string name : {"unit_square_2", "unit_cube_kuhn_6"}) {
    const auto mesh = refined(name, 1 - (name == "unit_cube_kuhn_6"));
    const int n = mesh.dimension();
    for (const auto& c : configs(n, 2)) {
      FESpace space(mesh, c.family, c.r, c.k);
      // P_{r-1} is contained in both families; P_r in the full one.
      const int deg = space.family() == Family::Full ? space.degree() : space.degree() - 1;
      const PolyForm p = random_form(rng, n, c.k, deg);
      const FEFunction u = interpolate_polynomial(space, p);
      double err = 0.0;
      for (int t = 0; t < 20; ++t) {
        const int cell = static_cast<int>(rng() % mesh.num_cells());
        const auto xi = random_point_in_simplex(rng, n);
        const Eigen::VectorXd x = mesh.cell_chart(cell).to_physical(xi);
        const auto v = evaluate_fe(u, cell, x);
        const auto exact = p.evaluate_components(std::span<const double>(x.data(), n));
        for (size_t i = 0; i < v.size(); ++i) err = std::max(err, std::abs(v[i] - exact[i]));
      }
      CAPTURE(space.label());
      CHECK(err <= 1e-10);
      const auto z = evaluate_fe(zero_function(space), 0, mesh.centroid(n, 0));
      for (double v : z) CHECK(v == 0.0);
    }
  }
  const auto mesh = make_mesh("unit_square_2");
  FESpace p1(mesh, Family::Full, 1, 0);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const auto hat = global_shape_function(p1, p1.dof_index(0, v, 0));
    const int cell = mesh.cells_containing(0, v)[0];
    CHECK(evaluate_fe(hat, cell, mesh.vertex(v))[0] == doctest::Approx(1.0).epsilon(1e-13));
  }
  Eigen::VectorXd far(2);
  far << 2.0, 2.0;
  CHECK_THROWS_AS(evaluate_fe(zero_function(p1), 0, far), std::invalid_argument);
}

TEST_CASE("fe_field agrees with evaluate_fe") {
  const auto mesh = refined("unit_square_2", 1);
  FESpace space(mesh, Family::Full, 2, 1);
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FEFunction w = zero_function(space);
  for (int i = 0; i < w.coefficients.size(); ++i) w.coefficients(i) = u(rng);
  const FieldSample f = fe_field(w);
  for (int cell = 0; cell < mesh.num_cells(); ++cell) {
    const auto xi = random_point_in_simplex(rng, 2);
    const Eigen::VectorXd x = mesh.cell_chart(cell).to_physical(xi);
    const std::span<const double> xs(x.data(), 2);
    const auto a = evaluate_fe(w, cell, x);
    const auto b = f.value(xs, FieldHint{cell, {}});
    const auto c = f.value(xs);
    std::vector<Jet> j;
    f.jet(xs, FieldHint{cell, {}}, 2, j);
    for (int i = 0; i < 2; ++i) {
      CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
      CHECK(a[i] == doctest::Approx(c[i]).epsilon(1e-12));
      CHECK(a[i] == doctest::Approx(j[i].value()).epsilon(1e-12));
    }
  }
}

TEST_CASE("inverse estimate scaling of shape functions") {
  // ||phi_{S,i}||_{L2(T)} h_S^{k - n/2} stays bounded under refinement; the
  // refinements are self-similar around the chosen simplex.
  for (const std::string name : {"unit_square_2", "unit_cube_kuhn_6"}) {
    const int levels = name == "unit_square_2" ? 4 : 2;
    for (const auto& c : std::vector<Config>{{Family::Full, 1, 0}, {Family::Trimmed, 1, 1}, {Family::Full, 2, 1}}) {
      std::vector<double> scaled;
      SimplicialComplex mesh = make_mesh(name);
      for (int level = 0; level < levels; ++level, mesh = refine_uniform(mesh)) {
        const int n = mesh.dimension();
        FESpace space(mesh, c.family, c.r, c.k);
        // The DOF nearest to the origin vertex with the lowest id.
        const auto& dof = space.dofs()[space.dof_index(c.k, 0, 0)];
        const int cell = mesh.cells_containing(dof.dim, dof.simplex)[0];
        const Eigen::VectorXd lc = local_coefficients(global_shape_function(space, space.dof_index(c.k, 0, 0)), cell);
        const double l2 = std::sqrt(lc.dot(space.element().mass_matrix(mesh.cell_chart(cell)) * lc));
        const double h = c.k == 0 ? mesh.diameter(n, cell) : mesh.diameter(dof.dim, dof.simplex);
        scaled.push_back(l2 * std::pow(h, c.k - n / 2.0));
      }
      const double lo = *std::min_element(scaled.begin(), scaled.end());
      const double hi = *std::max_element(scaled.begin(), scaled.end());
      CAPTURE(name);
      CHECK(lo > 0.0);
      CHECK(hi / lo < 2.0);
    }
  }
}
