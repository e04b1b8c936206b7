#pragma once

// E_[0,1](A, B) for elementary C[0,1]-algebras whose fibers have free K_0 of
// finite rank and vanishing K_1. Elements are tuples (beta_1, ..., beta_{n+1})
// of matrices beta_k : Z^{h_k} -> Z^{h'_k}; each hom group is a lattice in the
// space of such tuples.
//
// Vectorization: each beta_k is flattened column-major, blocks in increasing
// k. Hom group bases are the canonical Hermite basis in that order.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sheafkit/interval_algebra.hpp"
#include "sheafkit/linalg.hpp"
#include "sheafkit/towers.hpp"

namespace sheafkit {

struct HomTuple {
  std::vector<IntMatrix> betas;

  friend bool operator==(const HomTuple&, const HomTuple&) = default;
};

/// (rows, cols) of each block of a tuple.
using BlockShapes = std::vector<std::pair<std::size_t, std::size_t>>;

std::size_t vectorized_size(const BlockShapes& shapes);
IntVector vectorize(const HomTuple& t);
HomTuple devectorize(std::span<const Integer> v, const BlockShapes& shapes);

class HomGroup {
 public:
  HomGroup(std::string source, std::string target, CombInterval range, BlockShapes shapes,
           Lattice lattice);

  const std::string& source() const { return source_; }
  const std::string& target() const { return target_; }
  /// Segments covered by the tuples (1:n+1 for the whole interval).
  const CombInterval& range() const { return range_; }
  const BlockShapes& shapes() const { return shapes_; }
  const Lattice& lattice() const { return lattice_; }

  std::size_t rank() const { return lattice_.rank(); }
  std::vector<HomTuple> basis() const;
  bool contains(const HomTuple& t) const;

  friend bool operator==(const HomGroup& a, const HomGroup& b) {
    return a.range_ == b.range_ && a.shapes_ == b.shapes_ && a.lattice_ == b.lattice_;
  }

 private:
  std::string source_;
  std::string target_;
  CombInterval range_;
  BlockShapes shapes_;
  Lattice lattice_;
};

struct GradedGroup {
  FgAbGroup e0;
  FgAbGroup e1;

  friend bool operator==(const GradedGroup&, const GradedGroup&) = default;
};

// ------------------------------------------------------------ hom groups

/// (j(i), j'(i)): the side on which B's connecting map at x_i is the
/// identity, preferring 0 when both are.
std::pair<int, int> j_index(const ElementaryAlgebra& b, std::size_t i);

BlockShapes hom_shapes(const ElementaryAlgebra& a, const ElementaryAlgebra& b,
                       const CombInterval& range);

/// Stacked relations beta_{i+j'} G_{i,j'} = G'_{i,j'} beta_{i+j} G_{i,j}
/// over singular points inside `range`, acting on vectorized tuples.
IntMatrix relation_matrix(const ElementaryAlgebra& a, const ElementaryAlgebra& b,
                          const CombInterval& range);

bool satisfies_relations(const ElementaryAlgebra& a, const ElementaryAlgebra& b, const HomTuple& t);

enum class SourceCheck {
  RequireStrict,  // source must have an identity side at every singular point
  AllowGeneral,   // caller accepts the relation form for a generalized source
};

HomGroup hom_sheaf(const ElementaryAlgebra& a, const ElementaryAlgebra& b,
                   SourceCheck check = SourceCheck::RequireStrict);

enum class DeltaSigns {
  Standard,  // minus sign on the gamma_{i,0} blocks
  Flipped,   // minus sign on the gamma_{i,1} blocks instead
};

struct DeltaMaps {
  IntMatrix source;  // Delta_A on (+)_k Hom(H_k, H'_k)
  IntMatrix target;  // Delta_B on (+)_i Hom(D_i, D'_i)
  std::size_t codomain_rank = 0;
};

/// Codomain (+)_i Hom(D_i, H'_i) (+) Hom(D_i, H'_{i+1}), blocks in that order.
DeltaMaps delta_matrices(const ElementaryAlgebra& a, const ElementaryAlgebra& b,
                         DeltaSigns signs = DeltaSigns::Standard);

/// The kernel of the boundary map: preimage under Delta_A of im Delta_B.
HomGroup hom_sheaf_via_delta(const ElementaryAlgebra& a, const ElementaryAlgebra& b,
                             DeltaSigns signs = DeltaSigns::Standard);

/// codomain / (im Delta_A + im Delta_B).
FgAbGroup e1_group(const ElementaryAlgebra& a, const ElementaryAlgebra& b,
                   DeltaSigns signs = DeltaSigns::Standard);

// ------------------------------------------------------------ skyscrapers

struct SkyscraperLocation {
  enum class Kind { Singular, Segment, Zero, One };
  Kind kind = Kind::Zero;
  std::size_t index = 0;  // singular index or segment index

  static SkyscraperLocation singular(std::size_t i) { return {Kind::Singular, i}; }
  static SkyscraperLocation segment(std::size_t k) { return {Kind::Segment, k}; }
  static SkyscraperLocation zero() { return {Kind::Zero, 0}; }
  static SkyscraperLocation one() { return {Kind::One, 0}; }

  /// "x_3", "seg_2", "end0", "end1".
  static SkyscraperLocation parse(const std::string& text);
  std::string to_string() const;
};

std::vector<SkyscraperLocation> all_locations(const ElementaryAlgebra& b);

GradedGroup skyscraper_e(std::size_t d_rank, const SkyscraperLocation& at, const ElementaryAlgebra& b);

struct SkyscraperTowers {
  Tower e0;
  Tower e1;
  std::vector<OpenWindow> windows;  // shrinking neighbourhoods, outermost first
};

/// Towers E^*(D, B(U_n)) over a shrinking neighbourhood basis of the point.
SkyscraperTowers skyscraper_towers(std::size_t d_rank, const SkyscraperLocation& at,
                                   const ElementaryAlgebra& b);

/// lim of the towers above; requires lim^1 = 0.
GradedGroup skyscraper_e_via_tower(std::size_t d_rank, const SkyscraperLocation& at,
                                   const ElementaryAlgebra& b);

// ------------------------------------------------------------ subintervals

HomGroup e_subinterval(const ElementaryAlgebra& a, const ElementaryAlgebra& b, const CombInterval& i);

/// Restricts a tuple over `from` to the segments of `to`.
HomTuple restrict_hom(const ElementaryAlgebra& a, const ElementaryAlgebra& b, const CombInterval& from,
                      const CombInterval& to, const HomTuple& t);

struct PullbackReport {
  bool holds = false;
  bool disjoint = false;
  CombInterval joined;
  std::size_t union_rank = 0;
  std::size_t pullback_rank = 0;
  /// A basis tuple of one side missing from the other, when the check fails.
  std::optional<HomTuple> witness;
};

PullbackReport pullback_check(const ElementaryAlgebra& a, const ElementaryAlgebra& b,
                              const CombInterval& y, const CombInterval& z);

// ------------------------------------------------------------ sheaf morphisms

/// alpha_i = beta_{i+j(i)} G_{i,j(i)}; both compatibility equations are checked.
std::vector<IntMatrix> recover_alpha(const ElementaryAlgebra& a, const ElementaryAlgebra& b,
                                     const HomTuple& t);

struct SheafMorphismRealization {
  std::map<CombInterval, IntMatrix> components;  // phi_I in k0 coordinates
};

SheafMorphismRealization gamma_realize(const ElementaryAlgebra& a, const ElementaryAlgebra& b,
                                       const HomTuple& t);

/// Segment values phi_{k:k}, k = 1..n+1.
HomTuple segment_values(const SheafMorphismRealization& r, std::size_t n);

/// Every square phi_J r^I_J = r^I_J phi_I, J inside I.
bool squares_commute(const ElementaryAlgebra& a, const ElementaryAlgebra& b,
                     const SheafMorphismRealization& r);

// ------------------------------------------------------------ category structure

/// t o s for s in hom(A,B) and t in hom(B,C), computed segmentwise.
HomTuple compose(const ElementaryAlgebra& a, const ElementaryAlgebra& b, const ElementaryAlgebra& c,
                 const HomTuple& s, const HomTuple& t);
HomTuple identity(const ElementaryAlgebra& a);
/// The two-sided inverse when every beta_k is unimodular and the inverse
/// tuple lies in hom(B, A).
std::optional<HomTuple> is_isomorphism(const ElementaryAlgebra& a, const ElementaryAlgebra& b,
                                       const HomTuple& t);

struct Factorization {
  HomTuple mu;
  HomGroup kernel;  // mu + kernel is the full solution set
};

/// All mu in hom(A, Bsmall) with psi o mu = alpha.
std::optional<Factorization> factor(const ElementaryAlgebra& a, const ElementaryAlgebra& b_small,
                                    const ElementaryAlgebra& b_big, const HomTuple& psi,
                                    const HomTuple& alpha);

/// Throws MembershipError naming `what` unless t is in hom(A, B).
void require_member(const ElementaryAlgebra& a, const ElementaryAlgebra& b, const HomTuple& t,
                    const std::string& what);

std::string to_string(const HomTuple& t);

}  // namespace sheafkit
