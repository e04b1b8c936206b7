#pragma once

// Inverse sequences of free abelian groups
//
//   Z^{r_0} <-f_1- Z^{r_1} <-f_2- ... <-f_m- Z^{r_m}
//
// with the convention that every stage past m equals Z^{r_m} and every map
// past f_m is the identity. Alternatively a tower can be a single
// endomorphism f iterated infinitely often: G <-f- G <-f- G <- ...

#include <cstddef>
#include <vector>

#include "sheafkit/linalg.hpp"

namespace sheafkit {

struct Tower {
  std::vector<std::size_t> ranks;
  std::vector<IntMatrix> maps;  // maps[k-1] = f_k : Z^{r_k} -> Z^{r_{k-1}}
  bool iterated_self_map = false;

  static Tower constant(std::size_t rank, std::size_t length);
  static Tower self_map(IntMatrix f);

  std::size_t last_stage() const { return ranks.size() - 1; }
};

enum class Lim1Status { Zero, NonzeroUncountable };

const char* to_string(Lim1Status s);

/// Throws ShapeError when the shapes do not chain.
void validate(const Tower& t);

struct InverseLimit {
  FgAbGroup group;
  /// projections[k] maps coordinates of the limit to stage k.
  std::vector<IntMatrix> projections;
};

/// Throws UnsupportedError for an iterated self-map without Mittag-Leffler.
InverseLimit inverse_limit(const Tower& t);

bool mittag_leffler(const Tower& t);
Lim1Status lim1_status(const Tower& t);

/// With lim^1 = 0 the lim/lim^1 sequence collapses, so `middle` must be
/// isomorphic to the inverse limit. Throws UnsupportedError if lim^1 != 0.
bool skyscraper_ses_check(const Tower& t, const FgAbGroup& middle);

/// Cap on image iterations for self-maps; reaching it is reported as an error.
inline constexpr std::size_t kMaxImageIterations = 64;

}  // namespace sheafkit
