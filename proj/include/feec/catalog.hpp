// Built-in analytic fields used by experiments and tests.
//
// Every field exposes exact jets. Names:
//   zero, polynomial       a fixed quadratic form
//   smooth                 products of sines and cosines in every component
//   smooth_bc_bottom       smooth, with vanishing trace on the plane x_n = 0
//   closed                 d of a smooth (k-1)-form (a constant when k = 0)
//   angle_form             d theta around (0.5, 0.5); n = 2, k = 1 only
//   kinked                 |x_1 - 1/2| plus a smooth part, split along x_1 = 1/2
//   kinked_offgrid         the same with the kink at x_1 = 1/3

#ifndef FEEC_CATALOG_HPP
#define FEEC_CATALOG_HPP

#include <string>
#include <vector>

#include "feec/field.hpp"

namespace feec {

/// Sorted catalog names.
std::vector<std::string> field_names();
/// Throws std::invalid_argument for unknown names and unsupported (n, k).
FieldSample make_catalog_field(const std::string& name, int n, int k);

}  // namespace feec

#endif
