#include "feec/catalog.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace feec {

namespace {

constexpr double kPi = std::numbers::pi;

// Smooth scalar building block; j selects a phase.
template <class T>
T wave(const std::array<T, 3>& x, int j) {
  using std::cos;
  using std::sin;
  return sin(kPi * x[0] + (0.3 + j)) * cos(0.8 * kPi * x[1] - 0.2 * j) * cos(0.6 * kPi * x[2] + 0.1 * j);
}

FieldSample smooth(int n, int k) {
  return make_field(n, k, [](const auto& x, int) {
    return std::array{wave(x, 0), wave(x, 1), wave(x, 2)};
  });
}

FieldSample smooth_bc_bottom(int n, int k) {
  // Components whose coframe misses dx_n are multiplied by x_n, so the
  // tangential trace on x_n = 0 vanishes.
  const auto& table = SubsetTable::get(n, k);
  std::array<bool, 3> scaled{false, false, false};
  for (int c = 0; c < table.size(); ++c) scaled[c] = !(table.mask(c) & (1u << (n - 1)));
  return make_field(n, k, [n, scaled](const auto& x, int) {
    auto out = std::array{wave(x, 0), wave(x, 1), wave(x, 2)};
    for (int c = 0; c < 3; ++c)
      if (scaled[c]) out[c] = out[c] * x[n - 1];
    return out;
  });
}

FieldSample kinked(int n, int k, double at) {
  RegionFn region = [at](std::span<const double> x) { return x[0] < at ? 0 : 1; };
  return make_field(
      n, k,
      [at](const auto& x, int side) {
        const double s = side == 0 ? -1.0 : 1.0;
        auto out = std::array{wave(x, 0), wave(x, 1), wave(x, 2)};
        for (auto& v : out) v = s * (x[0] - at) + 0.5 * v;
        return out;
      },
      region);
}

FieldSample polynomial(int n, int k) {
  return make_field(n, k, [](const auto& x, int) {
    auto c = [&](int j) { return 1.0 + x[0] * x[1] - (j + 1.0) * x[0] * x[0] + 0.5 * x[1] + x[2] * x[0] - 0.25 * j * x[2]; };
    return std::array{c(0), c(1), c(2)};
  });
}

FieldSample angle_form() {
  return make_field(2, 1, [](const auto& x, int) {
    const auto u = x[0] - 0.5;
    const auto v = x[1] - 0.5;
    const auto r2 = u * u + v * v;
    return std::array{-1.0 * v / r2, u / r2, x[2] * 0.0};
  });
}

}  // namespace

std::vector<std::string> field_names() {
  return {"angle_form", "closed", "kinked", "kinked_offgrid", "polynomial", "smooth", "smooth_bc_bottom", "zero"};
}

FieldSample make_catalog_field(const std::string& name, int n, int k) {
  if (n < 2 || n > 3 || k < 0 || k > n) throw std::invalid_argument("field catalog: unsupported dimension or degree");
  FieldSample f;
  if (name == "zero") {
    f = zero_field(n, k);
  } else if (name == "smooth") {
    f = smooth(n, k);
  } else if (name == "smooth_bc_bottom") {
    f = smooth_bc_bottom(n, k);
  } else if (name == "closed") {
    if (k == 0)
      f = make_field(n, 0, [](const auto& x, int) { return std::array{x[0] * 0.0 + 1.5, x[0] * 0.0, x[0] * 0.0}; });
    else
      f = exterior_derivative(smooth(n, k - 1));
  } else if (name == "angle_form") {
    if (n != 2 || k != 1) throw std::invalid_argument("field catalog: angle_form is a 1-form in two dimensions");
    f = angle_form();
  } else if (name == "kinked") {
    f = kinked(n, k, 0.5);
  } else if (name == "kinked_offgrid") {
    f = kinked(n, k, 1.0 / 3.0);
  } else if (name == "polynomial") {
    f = polynomial(n, k);
  } else {
    throw std::invalid_argument("unknown field '" + name + "'");
  }
  f.name = name;
  return f;
}

}  // namespace feec
