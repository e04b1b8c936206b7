#pragma once

// Elementary C[0,1]-algebras at the level of K_0, and the presheaf
// I -> K_0(A(I)) over closed subintervals.
//
// Indexing is 1-based throughout, matching the partition
// 0 = x_0 < x_1 < ... < x_n < x_{n+1} = 1: singular points are x_1..x_n,
// open segments are U_1..U_{n+1}, fiber D_i sits at x_i and H_k over U_k.

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sheafkit/linalg.hpp"

namespace sheafkit {

struct ElementaryAlgebra {
  std::string name;
  std::optional<std::vector<double>> coords;  // display only
  std::vector<std::size_t> d_ranks;           // n entries
  std::vector<std::size_t> h_ranks;           // n + 1 entries
  std::vector<IntMatrix> gamma0;              // gamma0[i-1] : Z^{d_i} -> Z^{h_i}
  std::vector<IntMatrix> gamma1;              // gamma1[i-1] : Z^{d_i} -> Z^{h_{i+1}}
  bool strict_elementary = false;

  std::size_t n() const { return d_ranks.size(); }
  std::size_t d(std::size_t i) const { return d_ranks.at(i - 1); }
  std::size_t h(std::size_t k) const { return h_ranks.at(k - 1); }
  /// Connecting map [gamma_{i,j}], j in {0, 1}.
  const IntMatrix& gamma(std::size_t i, int j) const {
    return j == 0 ? gamma0.at(i - 1) : gamma1.at(i - 1);
  }
};

/// Closed interval whose left endpoint lies in U_p and right endpoint in U_q.
/// It contains the singular points x_p, ..., x_{q-1}.
struct CombInterval {
  std::size_t p = 1;
  std::size_t q = 1;

  bool contains(const CombInterval& j) const { return p <= j.p && j.q <= q; }
  bool is_segment() const { return p == q; }
  std::string to_string() const;
  /// Parses "p:q".
  static CombInterval parse(std::string_view text);

  friend auto operator<=>(const CombInterval&, const CombInterval&) = default;
};

struct Violation {
  std::size_t index = 0;  // singular index, 0 for whole-algebra problems
  std::string constraint;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool special_elementary = false;

  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

ValidationReport validate(const ElementaryAlgebra& a);
/// Throws ValidationError listing every violation.
void require_valid(const ElementaryAlgebra& a);
/// Every singular point has an identity connecting map on one side.
bool has_identity_sides(const ElementaryAlgebra& a);

ElementaryAlgebra refine(const ElementaryAlgebra& a, std::size_t segment);

/// Every combinatorial interval p:q with 1 <= p <= q <= n+1, in lexicographic order.
std::vector<CombInterval> all_intervals(const ElementaryAlgebra& a);
void require_interval(const ElementaryAlgebra& a, const CombInterval& i);

/// Block matrix (d_i) -> (G1_i d_i - G0_{i+1} d_{i+1}) for p <= i <= q-2.
IntMatrix zigzag_matrix(const ElementaryAlgebra& a, const CombInterval& i);

struct KPair {
  Lattice k0_embedding;  // inside (+)_{i=p}^{q-1} Z^{d_i}, or Z^{h_p} when p = q
  FgAbGroup k0;
  FgAbGroup k1;          // derived from the defining extension
};

KPair k_groups(const ElementaryAlgebra& a, const CombInterval& i);

/// K_0 of the fiber at the single point x_i.
std::size_t fiber_k0_rank(const ElementaryAlgebra& a, std::size_t i);

/// Restriction K_0(A(I)) -> K_0(A(J)) in the coordinates of the two k0 bases.
IntMatrix restriction_map(const ElementaryAlgebra& a, const CombInterval& i, const CombInterval& j);

/// Same map on ambient coordinates (before passing to k0 bases).
IntMatrix ambient_restriction(const ElementaryAlgebra& a, const CombInterval& i,
                              const CombInterval& j);

/// Open subset W of [0,1]: its left end is 0 or a point of U_p, its right end
/// is 1 or a point of U_q. Pieces of W touching 0 or 1 are cones.
struct OpenWindow {
  bool from_zero = false;
  std::size_t p = 1;
  bool to_one = false;
  std::size_t q = 1;

  bool contains(const OpenWindow& w) const;
};

/// Connecting map K_0(quotient) -> K_1(ideal) of
/// 0 -> (+) C_0(W cap U_k) (x) H_k -> A(W) -> (+) D_i -> 0, with columns the
/// singular points in W and rows the non-cone segments (`slots`).
struct WindowComplex {
  IntMatrix boundary;
  std::vector<std::size_t> singular;  // singular indices inside W
  std::vector<std::size_t> slots;     // segments contributing K_1
};

/// Throws RangeError for the compact window [0,1] of an algebra without
/// singular points, which has no such extension.
WindowComplex window_complex(const ElementaryAlgebra& a, const OpenWindow& w);
KPair k_groups(const ElementaryAlgebra& a, const OpenWindow& w);

}  // namespace sheafkit
