#pragma once

// Checks and offsets shared by the E-theory sources.

#include <string>
#include <vector>

#include "sheafkit/etheory.hpp"

namespace sheafkit::detail {

bool has_shapes(const HomTuple& t, const BlockShapes& shapes);
void require_shapes(const HomTuple& t, const BlockShapes& shapes, const std::string& what);
void require_common_partition(const ElementaryAlgebra& a, const ElementaryAlgebra& b);
/// Throws ValidationError at the first singular point without an identity side.
void require_strict(const ElementaryAlgebra& b, const std::string& role);
/// Start of each block in a vectorized tuple, plus the total length.
std::vector<std::size_t> block_offsets(const BlockShapes& shapes);

}  // namespace sheafkit::detail

namespace sheafkit::detail {

/// left_k * mu_k * right_k = rhs_k for every segment k (empty vectors skip the equation).
struct BlockEquation {
  std::vector<IntMatrix> left;
  std::vector<IntMatrix> right;
  HomTuple rhs;
};

/// All mu in hom(A, B) satisfying every equation, or nothing.
std::optional<Factorization> solve_hom(const ElementaryAlgebra& a, const ElementaryAlgebra& b,
                                       const std::vector<BlockEquation>& equations);

}  // namespace sheafkit::detail
