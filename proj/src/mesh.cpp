#include "feec/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <array>
#include <fstream>
#include <limits>
#include <numbers>
#include <queue>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace feec {

namespace {

/// All increasing (d+1)-subsets of {0..m-1}, lexicographic.
std::vector<std::vector<int>> position_subsets(int m, int size) {
  std::vector<std::vector<int>> out;
  if (size < 0 || size > m) return out;
  std::vector<int> c(size);
  for (int i = 0; i < size; ++i) c[i] = i;
  while (true) {
    out.push_back(c);
    int i = size - 1;
    while (i >= 0 && c[i] == m - size + i) --i;
    if (i < 0) break;
    ++c[i];
    for (int j = i + 1; j < size; ++j) c[j] = c[j - 1] + 1;
  }
  return out;
}

double factorial(int m) {
  double f = 1.0;
  for (int i = 2; i <= m; ++i) f *= i;
  return f;
}

std::string tuple_string(const std::vector<int>& v) {
  std::string s = "(";
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + ")";
}

}  // namespace

// ---------------------------------------------------------------------------
// SimplexChart

SimplexChart::SimplexChart(const Eigen::MatrixXd& points) {
  const int n = static_cast<int>(points.rows());
  const int m = static_cast<int>(points.cols()) - 1;
  origin_ = points.col(0);
  J_.resize(n, m);
  for (int j = 0; j < m; ++j) J_.col(j) = points.col(j + 1) - origin_;
  const Eigen::MatrixXd G = J_.transpose() * J_;
  const double gram = m == 0 ? 1.0 : G.determinant();
  measure_ = std::sqrt(std::max(gram, 0.0)) / factorial(m);
  if (m == 0) {
    Jinv_.resize(0, n);
  } else if (m == n) {
    Jinv_ = J_.inverse();
    orientation_ = J_.determinant() > 0.0 ? 1 : -1;
  } else {
    Jinv_ = G.ldlt().solve(J_.transpose());
  }
}

Eigen::VectorXd SimplexChart::to_physical(std::span<const double> xi) const {
  return origin_ + J_ * Eigen::Map<const Eigen::VectorXd>(xi.data(), dim());
}

Eigen::VectorXd SimplexChart::to_reference(const Eigen::VectorXd& x) const {
  return Jinv_ * (x - origin_);
}

PolyForm SimplexChart::pull_back(const PolyForm& physical) const {
  return pullback(physical, AffineMap{J_, Eigen::VectorXd::Zero(ambient_dim())});
}

PolyForm SimplexChart::push_forward(const PolyForm& reference) const {
  if (dim() != ambient_dim()) throw std::invalid_argument("SimplexChart::push_forward: chart is not full-dimensional");
  return pullback(reference, AffineMap{Jinv_, Eigen::VectorXd::Zero(dim())});
}

// ---------------------------------------------------------------------------
// SimplicialComplex

SimplicialComplex::SimplicialComplex(Eigen::MatrixXd vertices, std::vector<std::vector<int>> cells)
    : n_(static_cast<int>(vertices.rows())), vertices_(std::move(vertices)), ordered_cells_(std::move(cells)) {
  if (n_ < 2 || n_ > 3) throw std::invalid_argument("build_complex: only dimensions 2 and 3 are supported");
  if (ordered_cells_.empty()) throw std::invalid_argument("build_complex: no cells");
  for (size_t c = 0; c < ordered_cells_.size(); ++c) {
    const auto& cell = ordered_cells_[c];
    if (static_cast<int>(cell.size()) != n_ + 1)
      throw std::invalid_argument("build_complex: cell " + std::to_string(c) + " must have " + std::to_string(n_ + 1) +
                                  " vertices");
    for (int v : cell)
      if (v < 0 || v >= num_vertices())
        throw std::invalid_argument("build_complex: cell " + std::to_string(c) + " references invalid vertex " +
                                    std::to_string(v));
    std::vector<int> s = cell;
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
      throw std::invalid_argument("build_complex: cell " + std::to_string(c) + " repeats a vertex");
  }
  enumerate();
  validate();
}

void SimplicialComplex::enumerate() {
  const int nc = static_cast<int>(ordered_cells_.size());
  simplices_.assign(n_ + 1, {});
  lookup_.assign(n_ + 1, {});
  cell_faces_.assign(nc, std::vector<std::vector<int>>(n_ + 1));
  cell_star_.assign(n_ + 1, {});

  std::vector<std::vector<int>> sorted_cells(nc);
  for (int c = 0; c < nc; ++c) {
    sorted_cells[c] = ordered_cells_[c];
    std::sort(sorted_cells[c].begin(), sorted_cells[c].end());
  }

  for (int d = 0; d < n_; ++d) {
    std::set<std::vector<int>> all;
    const auto subsets = position_subsets(n_ + 1, d + 1);
    for (const auto& cell : sorted_cells)
      for (const auto& pos : subsets) {
        std::vector<int> s;
        for (int p : pos) s.push_back(cell[p]);
        all.insert(std::move(s));
      }
    for (const auto& s : all) {
      const int id = static_cast<int>(simplices_[d].size());
      simplices_[d].push_back(Simplex{id, d, s});
      lookup_[d][s] = id;
    }
  }
  for (int c = 0; c < nc; ++c) {
    if (!lookup_[n_].emplace(sorted_cells[c], c).second)
      throw std::invalid_argument("build_complex: cell " + std::to_string(c) + " is a duplicate");
    simplices_[n_].push_back(Simplex{c, n_, sorted_cells[c]});
  }

  for (int d = 0; d <= n_; ++d) cell_star_[d].assign(simplices_[d].size(), {});
  for (int c = 0; c < nc; ++c)
    for (int d = 0; d <= n_; ++d)
      for (const auto& pos : position_subsets(n_ + 1, d + 1)) {
        std::vector<int> s;
        for (int p : pos) s.push_back(sorted_cells[c][p]);
        const int id = lookup_[d].at(s);
        cell_faces_[c][d].push_back(id);
        cell_star_[d][id].push_back(c);
      }

  charts_.clear();
  for (int c = 0; c < nc; ++c) charts_.push_back(chart(n_, c));
}

void SimplicialComplex::validate() const {
  const int nc = num_cells();
  if (num_simplices(0) != num_vertices()) throw std::invalid_argument("build_complex: some vertices are not used by any cell");

  for (int c = 0; c < nc; ++c) {
    const double h = diameter(n_, c);
    if (charts_[c].measure() <= 1e-12 * std::pow(h, n_))
      throw std::invalid_argument("build_complex: cell " + std::to_string(c) + " is degenerate (zero volume)");
  }
  for (int f = 0; f < num_simplices(n_ - 1); ++f)
    if (cell_star_[n_ - 1][f].size() > 2)
      throw std::invalid_argument("build_complex: facet " + tuple_string(simplices_[n_ - 1][f].vertices) +
                                  " belongs to more than two cells");

  // No vertex may lie in a closed cell it is not a vertex of.
  std::vector<int> by_x(num_vertices());
  for (int v = 0; v < num_vertices(); ++v) by_x[v] = v;
  std::sort(by_x.begin(), by_x.end(), [&](int a, int b) { return vertices_(0, a) < vertices_(0, b); });
  for (int c = 0; c < nc; ++c) {
    const auto& cv = simplices_[n_][c].vertices;
    double lo = vertices_(0, cv[0]), hi = lo;
    for (int v : cv) {
      lo = std::min(lo, vertices_(0, v));
      hi = std::max(hi, vertices_(0, v));
    }
    const double tol = 1e-10 * std::max(1.0, diameter(n_, c));
    auto first = std::lower_bound(by_x.begin(), by_x.end(), lo - tol,
                                  [&](int v, double x) { return vertices_(0, v) < x; });
    for (auto it = first; it != by_x.end() && vertices_(0, *it) <= hi + tol; ++it) {
      const int v = *it;
      if (std::binary_search(cv.begin(), cv.end(), v)) continue;
      Eigen::VectorXd xi = charts_[c].to_reference(vertices_.col(v));
      if (xi.minCoeff() >= -1e-10 && xi.sum() <= 1.0 + 1e-10)
        throw std::invalid_argument("build_complex: vertex " + std::to_string(v) + " lies on cell " +
                                    tuple_string(cv) + " without being one of its vertices (non-conforming)");
    }
  }

  // Stars of lower-dimensional simplices must be face-connected.
  for (int d = 0; d + 1 < n_; ++d)
    for (int s = 0; s < num_simplices(d); ++s) {
      const auto& star = cell_star_[d][s];
      if (star.size() <= 1) continue;
      std::set<int> reached{star.front()};
      std::queue<int> q;
      q.push(star.front());
      while (!q.empty()) {
        int t = q.front();
        q.pop();
        for (int f : cell_faces_[t][n_ - 1]) {
          if (!contains(n_ - 1, f, d, s)) continue;
          for (int u : cell_star_[n_ - 1][f])
            if (reached.insert(u).second) q.push(u);
        }
      }
      if (reached.size() != star.size())
        throw std::invalid_argument("build_complex: the cells around " + tuple_string(simplices_[d][s].vertices) +
                                    " are not face-connected");
    }
}

int SimplicialComplex::find(std::span<const int> vertices) const {
  const int d = static_cast<int>(vertices.size()) - 1;
  if (d < 0 || d > n_) return -1;
  auto it = lookup_[d].find(std::vector<int>(vertices.begin(), vertices.end()));
  return it == lookup_[d].end() ? -1 : it->second;
}

int SimplicialComplex::local_index(int cell, int d, int id) const {
  const auto& f = cell_faces_[cell][d];
  auto it = std::find(f.begin(), f.end(), id);
  return it == f.end() ? -1 : static_cast<int>(it - f.begin());
}

bool SimplicialComplex::contains(int dim_big, int big, int dim_small, int small) const {
  if (dim_small > dim_big) return false;
  const auto& b = simplices_[dim_big][big].vertices;
  const auto& s = simplices_[dim_small][small].vertices;
  return std::includes(b.begin(), b.end(), s.begin(), s.end());
}

std::vector<int> SimplicialComplex::subsimplices(int dim_s, int id, int d) const {
  if (d < 0 || d > dim_s) throw std::invalid_argument("subsimplices: dimension out of range");
  const auto& v = simplex(dim_s, id).vertices;
  std::vector<int> out;
  for (const auto& pos : position_subsets(dim_s + 1, d + 1)) {
    std::vector<int> s;
    for (int p : pos) s.push_back(v[p]);
    out.push_back(lookup_[d].at(s));
  }
  return out;
}

std::vector<int> SimplicialComplex::superstar(int dim_s, int id, int d) const {
  if (d < dim_s || d > n_) return {};
  std::set<int> out;
  for (int c : cell_star_[dim_s].at(id))
    for (int f : cell_faces_[c][d])
      if (contains(d, f, dim_s, id)) out.insert(f);
  return {out.begin(), out.end()};
}

int SimplicialComplex::orientation_sign(int facet, int cell) const {
  const auto& t = simplex(n_, cell).vertices;
  const auto& f = simplex(n_ - 1, facet).vertices;
  if (!contains(n_, cell, n_ - 1, facet)) throw std::invalid_argument("orientation_sign: facet is not a facet of the cell");
  int p = 0;
  while (p < n_ && t[p] == f[p]) ++p;
  return ((p % 2) ? -1 : 1) * charts_[cell].orientation();
}

std::vector<int> SimplicialComplex::boundary_facets() const {
  std::vector<int> out;
  for (int f = 0; f < num_simplices(n_ - 1); ++f)
    if (is_boundary_facet(f)) out.push_back(f);
  return out;
}

SimplexChart SimplicialComplex::chart(int d, int id) const {
  const auto& v = simplex(d, id).vertices;
  Eigen::MatrixXd pts(n_, d + 1);
  for (int i = 0; i <= d; ++i) pts.col(i) = vertices_.col(v[i]);
  return SimplexChart(pts);
}

double SimplicialComplex::diameter(int d, int id) const {
  const auto& v = simplex(d, id).vertices;
  double h = 0.0;
  for (size_t i = 0; i < v.size(); ++i)
    for (size_t j = i + 1; j < v.size(); ++j) h = std::max(h, (vertices_.col(v[i]) - vertices_.col(v[j])).norm());
  return h;
}

double SimplicialComplex::volume(int d, int id) const {
  return d == n_ ? charts_[id].measure() : chart(d, id).measure();
}

Eigen::VectorXd SimplicialComplex::centroid(int d, int id) const {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n_);
  for (int v : simplex(d, id).vertices) c += vertices_.col(v);
  return c / (d + 1);
}

double SimplicialComplex::h_max() const {
  double h = 0.0;
  for (int c = 0; c < num_cells(); ++c) h = std::max(h, diameter(n_, c));
  return h;
}

double shape_measure(const SimplicialComplex& mesh) {
  double mu = 0.0;
  for (int d = 1; d <= mesh.dimension(); ++d)
    for (int s = 0; s < mesh.num_simplices(d); ++s)
      mu = std::max(mu, std::pow(mesh.diameter(d, s), d) / mesh.volume(d, s));
  return mu;
}

std::vector<double> vertex_diameters(const SimplicialComplex& mesh) {
  std::vector<double> h(mesh.num_vertices(), std::numeric_limits<double>::infinity());
  for (const auto& e : mesh.simplices(1)) {
    const double len = mesh.diameter(1, e.id);
    for (int v : e.vertices) h[v] = std::min(h[v], len);
  }
  return h;
}

SimplicialComplex refine_uniform(const SimplicialComplex& mesh) {
  const int n = mesh.dimension();
  if (n != 2 && n != 3) throw std::invalid_argument("refine_uniform: only dimensions 2 and 3 are supported");
  const int nv = mesh.num_vertices();
  const int ne = mesh.num_simplices(1);
  Eigen::MatrixXd verts(n, nv + ne);
  verts.leftCols(nv) = mesh.vertices();
  for (const auto& e : mesh.simplices(1))
    verts.col(nv + e.id) = 0.5 * (mesh.vertex(e.vertices[0]) + mesh.vertex(e.vertices[1]));

  auto mid = [&](int a, int b) {
    const int pair[2] = {std::min(a, b), std::max(a, b)};
    return nv + mesh.find(pair);
  };

  std::vector<std::vector<int>> cells;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& x = mesh.ordered_cell(c);
    if (n == 2) {
      const int x01 = mid(x[0], x[1]), x02 = mid(x[0], x[2]), x12 = mid(x[1], x[2]);
      cells.push_back({x[0], x01, x02});
      cells.push_back({x01, x[1], x12});
      cells.push_back({x02, x12, x[2]});
      cells.push_back({x01, x02, x12});
    } else {
      const int x01 = mid(x[0], x[1]), x02 = mid(x[0], x[2]), x03 = mid(x[0], x[3]);
      const int x12 = mid(x[1], x[2]), x13 = mid(x[1], x[3]), x23 = mid(x[2], x[3]);
      cells.push_back({x[0], x01, x02, x03});
      cells.push_back({x01, x[1], x12, x13});
      cells.push_back({x02, x12, x[2], x23});
      cells.push_back({x03, x13, x23, x[3]});
      cells.push_back({x01, x02, x03, x13});
      cells.push_back({x01, x02, x12, x13});
      cells.push_back({x02, x03, x13, x23});
      cells.push_back({x02, x12, x13, x23});
    }
  }
  return SimplicialComplex(std::move(verts), std::move(cells));
}

// ---------------------------------------------------------------------------
// Boundary subcomplexes, face connections, representatives

BoundarySubcomplex::BoundarySubcomplex(const SimplicialComplex& mesh) {
  for (int d = 0; d <= mesh.dimension(); ++d) member_.emplace_back(mesh.num_simplices(d), 0);
}

bool BoundarySubcomplex::empty() const {
  for (const auto& m : member_)
    for (char c : m)
      if (c) return false;
  return true;
}

std::vector<int> BoundarySubcomplex::ids(int d) const {
  std::vector<int> out;
  if (member_.empty()) return out;
  for (int i = 0; i < static_cast<int>(member_[d].size()); ++i)
    if (member_[d][i]) out.push_back(i);
  return out;
}

BoundarySubcomplex boundary_subcomplex_from_facets(const SimplicialComplex& mesh, const std::vector<int>& facets) {
  BoundarySubcomplex u(mesh);
  const int n = mesh.dimension();
  for (int f : facets) {
    if (f < 0 || f >= mesh.num_simplices(n - 1)) throw std::invalid_argument("boundary subcomplex: invalid facet id");
    if (!mesh.is_boundary_facet(f))
      throw std::invalid_argument("boundary subcomplex: facet " + std::to_string(f) + " is an interior facet");
    for (int d = 0; d < n; ++d)
      for (int s : mesh.subsimplices(n - 1, f, d)) u.member_[d][s] = 1;
  }
  return u;
}

BoundarySubcomplex boundary_subcomplex(const SimplicialComplex& mesh,
                                       const std::function<bool(const Eigen::VectorXd&)>& selector) {
  std::vector<int> selected;
  for (int f : mesh.boundary_facets())
    if (selector(mesh.centroid(mesh.dimension() - 1, f))) selected.push_back(f);
  return boundary_subcomplex_from_facets(mesh, selected);
}

std::vector<std::string> boundary_selector_names() { return {"all", "bottom", "left", "none"}; }

BoundarySubcomplex named_boundary(const SimplicialComplex& mesh, const std::string& name) {
  const int last = mesh.dimension() - 1;
  if (name == "none") return BoundarySubcomplex(mesh);
  if (name == "all") return boundary_subcomplex(mesh, [](const Eigen::VectorXd&) { return true; });
  if (name == "bottom")
    return boundary_subcomplex(mesh, [last](const Eigen::VectorXd& c) { return std::abs(c(last)) < 1e-12; });
  if (name == "left") return boundary_subcomplex(mesh, [](const Eigen::VectorXd& c) { return std::abs(c(0)) < 1e-12; });
  throw std::invalid_argument("unknown boundary selector '" + name + "'");
}

std::vector<int> face_connection(const SimplicialComplex& mesh, int t0, int t, int dim_s, int s) {
  const int n = mesh.dimension();
  if (!mesh.contains(n, t0, dim_s, s) || !mesh.contains(n, t, dim_s, s))
    throw std::invalid_argument("face_connection: S is not contained in both cells");
  if (t0 == t) return {};
  std::map<int, int> parent{{t0, -1}};
  std::queue<int> q;
  q.push(t0);
  while (!q.empty()) {
    const int c = q.front();
    q.pop();
    if (c == t) break;
    for (int f : mesh.cell_faces(c, n - 1)) {
      if (!mesh.contains(n - 1, f, dim_s, s)) continue;
      for (int u : mesh.cells_containing(n - 1, f))
        if (parent.emplace(u, c).second) q.push(u);
    }
  }
  if (!parent.count(t)) throw std::invalid_argument("face_connection: no face connection exists");
  std::vector<int> path;
  for (int c = t; c != t0; c = parent[c]) path.push_back(c);
  std::reverse(path.begin(), path.end());
  return path;
}

Representatives choose_representatives(const SimplicialComplex& mesh, const BoundarySubcomplex& boundary) {
  const int n = mesh.dimension();
  Representatives r;
  r.facet.resize(n + 1);
  r.cell.resize(n + 1);
  for (int d = 0; d <= n; ++d) {
    r.facet[d].assign(mesh.num_simplices(d), -1);
    r.cell[d].assign(mesh.num_simplices(d), -1);
    for (int s = 0; s < mesh.num_simplices(d); ++s) {
      if (d == n) {
        r.cell[d][s] = s;
        continue;
      }
      const auto facets = mesh.superstar(d, s, n - 1);
      int chosen = facets.front();
      if (boundary.contains(d, s)) {
        auto it = std::find_if(facets.begin(), facets.end(), [&](int f) { return boundary.contains(n - 1, f); });
        if (it == facets.end())
          throw std::invalid_argument("choose_representatives: simplex in the boundary subcomplex has no facet in it");
        chosen = *it;
      }
      r.facet[d][s] = chosen;
      r.cell[d][s] = mesh.cells_containing(n - 1, chosen).front();
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Generators and file input

std::vector<std::string> mesh_generator_names() {
  return {"reference_tetrahedron", "reference_triangle", "square_with_hole_16",
          "unit_cube_kuhn_6",      "unit_square_2",      "vertex_star_6"};
}

SimplicialComplex make_mesh(const std::string& name) {
  if (name == "unit_square_2") {
    Eigen::MatrixXd v(2, 4);
    v << 0, 1, 0, 1, 0, 0, 1, 1;
    return SimplicialComplex(v, {{0, 1, 3}, {0, 2, 3}});
  }
  if (name == "reference_triangle") {
    Eigen::MatrixXd v(2, 3);
    v << 0, 1, 0, 0, 0, 1;
    return SimplicialComplex(v, {{0, 1, 2}});
  }
  if (name == "reference_tetrahedron") {
    Eigen::MatrixXd v(3, 4);
    v << 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1;
    return SimplicialComplex(v, {{0, 1, 2, 3}});
  }
  if (name == "unit_cube_kuhn_6") {
    Eigen::MatrixXd v(3, 8);
    for (int id = 0; id < 8; ++id)
      for (int a = 0; a < 3; ++a) v(a, id) = (id >> a) & 1;
    std::vector<std::vector<int>> cells;
    std::array<int, 3> perm{0, 1, 2};
    do {
      const int e1 = 1 << perm[0];
      const int e2 = e1 + (1 << perm[1]);
      cells.push_back({0, e1, e2, 7});
    } while (std::next_permutation(perm.begin(), perm.end()));
    return SimplicialComplex(v, cells);
  }
  if (name == "square_with_hole_16") {
    Eigen::MatrixXd v(2, 16);
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < 4; ++i) {
        v(0, i + 4 * j) = i / 3.0;
        v(1, i + 4 * j) = j / 3.0;
      }
    std::vector<std::vector<int>> cells;
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) {
        if (i == 1 && j == 1) continue;
        const int a = i + 4 * j, b = a + 1, c = a + 4, d = a + 5;
        cells.push_back({a, b, d});
        cells.push_back({a, c, d});
      }
    return SimplicialComplex(v, cells);
  }
  if (name == "vertex_star_6") {
    Eigen::MatrixXd v(2, 7);
    v.col(0).setZero();
    for (int i = 0; i < 6; ++i) {
      v(0, i + 1) = std::cos(i * std::numbers::pi / 3.0);
      v(1, i + 1) = std::sin(i * std::numbers::pi / 3.0);
    }
    std::vector<std::vector<int>> cells;
    for (int i = 1; i <= 6; ++i) cells.push_back({0, i, i % 6 + 1});
    return SimplicialComplex(v, cells);
  }
  throw std::invalid_argument("unknown mesh generator '" + name + "'");
}

SimplicialComplex read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open mesh file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
    const int n = j.at("dimension").get<int>();
    const auto& verts = j.at("vertices");
    Eigen::MatrixXd v(n, verts.size());
    for (size_t i = 0; i < verts.size(); ++i) {
      if (static_cast<int>(verts[i].size()) != n)
        throw std::invalid_argument("mesh file: vertex " + std::to_string(i) + " has the wrong length");
      for (int a = 0; a < n; ++a) v(a, i) = verts[i][a].get<double>();
    }
    auto cells = j.at("cells").get<std::vector<std::vector<int>>>();
    return SimplicialComplex(std::move(v), std::move(cells));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("mesh file '" + path + "': " + e.what());
  }
}

}  // namespace feec
