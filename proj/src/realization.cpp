#include <stdexcept>

#include "engine_common.hpp"
#include "sheafkit/etheory.hpp"

namespace sheafkit {

std::vector<IntMatrix> recover_alpha(const ElementaryAlgebra& a, const ElementaryAlgebra& b,
                                     const HomTuple& t) {
  require_member(a, b, t, "tuple");
  std::vector<IntMatrix> alpha;
  for (std::size_t i = 1; i <= a.n(); ++i) {
    const auto [j, jp] = j_index(b, i);
    const std::size_t seg = i + static_cast<std::size_t>(j);
    IntMatrix ai = t.betas[seg - 1] * a.gamma(i, j);
    // G'_{i,0} alpha_i = beta_i G_{i,0} and G'_{i,1} alpha_i = beta_{i+1} G_{i,1}
    for (int side = 0; side <= 1; ++side) {
      const std::size_t k = i + static_cast<std::size_t>(side);
      if (b.gamma(i, side) * ai != t.betas[k - 1] * a.gamma(i, side))
        throw MembershipError("recover_alpha: compatibility fails at i=" + std::to_string(i) +
                              ", side " + std::to_string(side));
    }
    alpha.push_back(std::move(ai));
  }
  return alpha;
}

namespace {

// phi_I on the ambient coordinates of the k0 embeddings.
IntMatrix ambient_phi(const HomTuple& t, const std::vector<IntMatrix>& alpha, const CombInterval& range) {
  if (range.is_segment()) return t.betas[range.p - 1];
  std::vector<IntMatrix> blocks;
  for (std::size_t i = range.p; i < range.q; ++i) blocks.push_back(alpha[i - 1]);
  return block_diagonal(blocks);
}

}  // namespace

SheafMorphismRealization gamma_realize(const ElementaryAlgebra& a, const ElementaryAlgebra& b,
                                       const HomTuple& t) {
  const std::vector<IntMatrix> alpha = recover_alpha(a, b, t);
  SheafMorphismRealization out;
  for (const CombInterval& range : all_intervals(a)) {
    const Lattice src = k_groups(a, range).k0_embedding;
    const Lattice dst = k_groups(b, range).k0_embedding;
    const IntMatrix images = ambient_phi(t, alpha, range) * src.basis();
    IntMatrix phi(dst.rank(), src.rank());
    for (std::size_t c = 0; c < images.cols(); ++c) {
      const auto coords = dst.coordinates(images.column(c));
      if (!coords)
        throw MembershipError("gamma_realize: image of K_0(" + a.name + "(" + range.to_string() +
                              ")) leaves K_0 of the target");
      phi.set_column(c, *coords);
    }
    out.components.emplace(range, std::move(phi));
  }
  return out;
}

HomTuple segment_values(const SheafMorphismRealization& r, std::size_t n) {
  HomTuple t;
  for (std::size_t k = 1; k <= n + 1; ++k) {
    const auto it = r.components.find(CombInterval{k, k});
    if (it == r.components.end()) throw RangeError("segment_values: missing segment " + std::to_string(k));
    t.betas.push_back(it->second);
  }
  return t;
}

bool squares_commute(const ElementaryAlgebra& a, const ElementaryAlgebra& b,
                     const SheafMorphismRealization& r) {
  const auto intervals = all_intervals(a);
  for (const CombInterval& outer : intervals) {
    for (const CombInterval& inner : intervals) {
      if (!outer.contains(inner)) continue;
      const IntMatrix& phi_outer = r.components.at(outer);
      const IntMatrix& phi_inner = r.components.at(inner);
      if (phi_inner * restriction_map(a, outer, inner) != restriction_map(b, outer, inner) * phi_outer)
        return false;
    }
  }
  return true;
}

}  // namespace sheafkit
