#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "feec/mesh.hpp"

using namespace feec;

TEST_CASE("counts of the built-in meshes") {
  auto sq = make_mesh("unit_square_2");
  CHECK(sq.num_vertices() == 4);
  CHECK(sq.num_simplices(1) == 5);
  CHECK(sq.num_cells() == 2);
  auto tet = make_mesh("reference_tetrahedron");
  CHECK(tet.num_simplices(0) == 4);
  CHECK(tet.num_simplices(1) == 6);
  CHECK(tet.num_simplices(2) == 4);
  CHECK(tet.num_simplices(3) == 1);
  auto hole = make_mesh("square_with_hole_16");
  CHECK(hole.num_cells() == 16);
  CHECK(hole.num_vertices() == 16);
  // Euler characteristic of an annulus is 0.
  CHECK(hole.num_vertices() - hole.num_simplices(1) + hole.num_cells() == 0);
}

TEST_CASE("Kuhn cube facet census") {
  auto cube = make_mesh("unit_cube_kuhn_6");
  CHECK(cube.num_vertices() == 8);
  CHECK(cube.num_cells() == 6);
  // Independent census: count how often each sorted vertex triple occurs.
  std::map<std::vector<int>, int> census;
  for (int c = 0; c < 6; ++c) {
    auto v = cube.ordered_cell(c);
    std::sort(v.begin(), v.end());
    for (int omit = 0; omit < 4; ++omit) {
      std::vector<int> f;
      for (int i = 0; i < 4; ++i)
        if (i != omit) f.push_back(v[i]);
      ++census[f];
    }
  }
  int interior = 0;
  for (const auto& [f, count] : census) {
    const int id = cube.find(f);
    REQUIRE(id >= 0);
    CHECK(static_cast<int>(cube.superstar(2, id, 3).size()) == count);
    if (count == 2) ++interior;
    auto c = cube.centroid(2, id);
    const bool on_boundary = (c.array() < 1e-12).any() || (c.array() > 1 - 1e-12).any();
    CHECK(on_boundary == (count == 1));
  }
  CHECK(interior == 6);
  CHECK(census.size() == static_cast<size_t>(cube.num_simplices(2)));
}

TEST_CASE("subsimplices and superstars") {
  auto tri = make_mesh("reference_triangle");
  CHECK(tri.subsimplices(2, 0, 1).size() == 3);
  auto tet = make_mesh("reference_tetrahedron");
  CHECK(tet.subsimplices(3, 0, 2).size() == 4);
  CHECK(tet.subsimplices(3, 0, 0) == std::vector<int>{0, 1, 2, 3});
  CHECK_THROWS_AS(tet.subsimplices(2, 0, 3), std::invalid_argument);
  auto sq = make_mesh("unit_square_2");
  CHECK(sq.superstar(0, 0, 2).size() == 2);
  for (int f : sq.boundary_facets()) CHECK(sq.superstar(1, f, 2).size() == 1);
}

TEST_CASE("orientation signs") {
  auto tri = make_mesh("reference_triangle");
  const int e12[] = {1, 2}, e02[] = {0, 2}, e01[] = {0, 1};
  CHECK(tri.orientation_sign(tri.find(e12), 0) == 1);
  CHECK(tri.orientation_sign(tri.find(e02), 0) == -1);
  CHECK(tri.orientation_sign(tri.find(e01), 0) == 1);
  for (const char* name : {"unit_square_2", "unit_cube_kuhn_6", "square_with_hole_16", "vertex_star_6"}) {
    auto mesh = refine_uniform(make_mesh(name));
    const int n = mesh.dimension();
    for (int f = 0; f < mesh.num_simplices(n - 1); ++f) {
      const auto& cells = mesh.cells_containing(n - 1, f);
      if (cells.size() == 2) CHECK(mesh.orientation_sign(f, cells[0]) * mesh.orientation_sign(f, cells[1]) == -1);
    }
  }
  auto sq = make_mesh("unit_square_2");
  CHECK_THROWS_AS(sq.orientation_sign(sq.find(e01), 1), std::invalid_argument);
}

TEST_CASE("shape measure") {
  Eigen::MatrixXd v(2, 3);
  v << 0, 1, 0.5, 0, 0, std::sqrt(3.0) / 2;
  SimplicialComplex eq(v, {{0, 1, 2}});
  CHECK(shape_measure(eq) == doctest::Approx(1.0 / (std::sqrt(3.0) / 4)));
  CHECK(shape_measure(make_mesh("reference_triangle")) == doctest::Approx(4.0));
  auto tri = make_mesh("reference_triangle");
  CHECK(shape_measure(refine_uniform(tri)) <= shape_measure(tri) + 1e-12);
}

TEST_CASE("uniform refinement") {
  auto sq = make_mesh("unit_square_2");
  auto r1 = refine_uniform(sq);
  auto r2 = refine_uniform(r1);
  CHECK(r1.num_cells() == 8);
  CHECK(r2.num_cells() == 32);
  CHECK(r2.h_max() == doctest::Approx(sq.h_max() / 4));
  auto cube = make_mesh("unit_cube_kuhn_6");
  auto c1 = refine_uniform(cube);
  CHECK(c1.num_cells() == 48);
  CHECK(c1.num_vertices() == 27);
  auto c2 = refine_uniform(c1);
  CHECK(c2.num_cells() == 384);
  CHECK(c2.num_vertices() == 125);
  // Kuhn cells refine into Kuhn cells, so the shape measure is preserved.
  CHECK(shape_measure(c2) == doctest::Approx(shape_measure(cube)));
  CHECK(c2.h_max() == doctest::Approx(cube.h_max() / 4));
  double volume = 0.0;
  for (int c = 0; c < c2.num_cells(); ++c) volume += c2.volume(3, c);
  CHECK(volume == doctest::Approx(1.0));
  // Bey refinement of a general tetrahedron keeps the shape measure bounded.
  auto tet = make_mesh("reference_tetrahedron");
  double mu_max = 0.0;
  for (int level = 0; level < 4; ++level) {
    mu_max = std::max(mu_max, shape_measure(tet));
    tet = refine_uniform(tet);
  }
  CHECK(mu_max < 3.0 * shape_measure(make_mesh("reference_tetrahedron")));
}

TEST_CASE("validation errors") {
  Eigen::MatrixXd v(2, 3);
  v << 0, 1, 2, 0, 0, 0;
  CHECK_THROWS_AS(SimplicialComplex(v, {{0, 1, 2}}), std::invalid_argument);
  // Hanging vertex: vertex 4 sits on the edge (1,2) of the first cell.
  Eigen::MatrixXd h(2, 5);
  h << 0, 1, 0, 1, 0.5, 0, 0, 1, 1, 0.5;
  CHECK_THROWS_AS(SimplicialComplex(h, {{0, 1, 2}, {1, 3, 4}, {2, 3, 4}}), std::invalid_argument);
  Eigen::MatrixXd t(2, 4);
  t << 0, 1, 0, 1, 0, 0, 1, 1;
  CHECK_THROWS_AS(SimplicialComplex(t, {{0, 1, 5}}), std::invalid_argument);
  // Two triangles touching only at a vertex: the vertex star is not face-connected.
  Eigen::MatrixXd bow(2, 5);
  bow << 0, 1, 0, -1, 0, 0, 0, 1, 0, -1;
  CHECK_THROWS_AS(SimplicialComplex(bow, {{0, 1, 2}, {0, 3, 4}}), std::invalid_argument);
}

TEST_CASE("boundary subcomplexes") {
  auto sq = make_mesh("unit_square_2");
  auto all = named_boundary(sq, "all");
  CHECK(all.ids(1).size() == 4);
  CHECK(all.ids(0).size() == 4);
  CHECK(named_boundary(sq, "none").empty());
  auto bottom = named_boundary(sq, "bottom");
  CHECK(bottom.ids(1).size() == 1);
  CHECK(bottom.ids(0) == std::vector<int>{0, 1});
  const int diagonal[] = {0, 3};
  CHECK_THROWS_AS(boundary_subcomplex_from_facets(sq, {sq.find(diagonal)}), std::invalid_argument);
  CHECK_THROWS_AS(named_boundary(sq, "top"), std::invalid_argument);
}

TEST_CASE("face connections") {
  auto sq = make_mesh("unit_square_2");
  CHECK(face_connection(sq, 0, 0, 0, 0).empty());
  const int diagonal[] = {0, 3};
  CHECK(face_connection(sq, 0, 1, 1, sq.find(diagonal)) == std::vector<int>{1});
  auto star = make_mesh("vertex_star_6");
  // Independent BFS distance on the cyclic cell adjacency of the star.
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      auto path = face_connection(star, a, b, 0, 0);
      const int hops = std::min((a - b + 6) % 6, (b - a + 6) % 6);
      CHECK(static_cast<int>(path.size()) == hops);
      CHECK(path.size() <= 3);
      int prev = a;
      for (int c : path) {
        CHECK(star.contains(2, c, 0, 0));
        std::vector<int> shared;
        const auto &x = star.simplex(2, prev).vertices, &y = star.simplex(2, c).vertices;
        std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(shared));
        CHECK(shared.size() == 2);
        prev = c;
      }
    }
}

TEST_CASE("representatives") {
  auto mesh = refine_uniform(make_mesh("unit_square_2"));
  auto u = named_boundary(mesh, "bottom");
  auto rep = choose_representatives(mesh, u);
  for (int d = 0; d < 2; ++d)
    for (int s = 0; s < mesh.num_simplices(d); ++s) {
      const int f = rep.facet[d][s];
      const int t = rep.cell[d][s];
      CHECK(mesh.contains(1, f, d, s));
      CHECK(mesh.contains(2, t, 1, f));
      if (u.contains(d, s)) CHECK(u.contains(1, f));
      if (d == 1) CHECK(f == s);
      if (!u.contains(d, s)) CHECK(f == mesh.superstar(d, s, 1).front());
    }
  for (int v : u.ids(0)) {
    auto candidates = mesh.superstar(0, v, 1);
    int lowest = -1;
    for (int f : candidates)
      if (u.contains(1, f)) {
        lowest = f;
        break;
      }
    CHECK(rep.facet[0][v] == lowest);
  }
}

TEST_CASE("mesh file input") {
  const char* path = "test_mesh_input.json";
  {
    std::FILE* f = std::fopen(path, "w");
    std::fputs(R"({"dimension": 2, "vertices": [[0,0],[1,0],[0,1]], "cells": [[0,1,2]]})", f);
    std::fclose(f);
  }
  auto mesh = read_mesh_file(path);
  CHECK(mesh.num_cells() == 1);
  std::remove(path);
  CHECK_THROWS_AS(read_mesh_file("does_not_exist.json"), std::invalid_argument);
}
