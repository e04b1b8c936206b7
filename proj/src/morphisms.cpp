#include <sstream>

#include "engine_common.hpp"
#include "sheafkit/etheory.hpp"

namespace sheafkit {

HomTuple compose(const ElementaryAlgebra& a, const ElementaryAlgebra& b, const ElementaryAlgebra& c,
                 const HomTuple& s, const HomTuple& t) {
  require_member(a, b, s, "first morphism");
  require_member(b, c, t, "second morphism");
  HomTuple out;
  for (std::size_t k = 0; k < s.betas.size(); ++k) out.betas.push_back(t.betas[k] * s.betas[k]);
  if (!satisfies_relations(a, c, out))
    throw MembershipError("composite is not in hom(" + a.name + ", " + c.name + ")");
  return out;
}

HomTuple identity(const ElementaryAlgebra& a) {
  require_valid(a);
  HomTuple t;
  for (std::size_t k = 1; k <= a.n() + 1; ++k) t.betas.push_back(IntMatrix::identity(a.h(k)));
  return t;
}

std::optional<HomTuple> is_isomorphism(const ElementaryAlgebra& a, const ElementaryAlgebra& b,
                                       const HomTuple& t) {
  require_member(a, b, t, "morphism");
  detail::require_strict(a, "source");
  HomTuple inv;
  for (const IntMatrix& beta : t.betas) {
    auto bi = unimodular_inverse(beta);
    if (!bi) return std::nullopt;
    inv.betas.push_back(std::move(*bi));
  }
  // Componentwise invertibility alone is not taken as sufficient.
  if (!satisfies_relations(b, a, inv)) return std::nullopt;
  return inv;
}

namespace detail {

std::optional<Factorization> solve_hom(const ElementaryAlgebra& a, const ElementaryAlgebra& b,
                                       const std::vector<BlockEquation>& equations) {
  const CombInterval full{1, a.n() + 1};
  const BlockShapes shapes = hom_shapes(a, b, full);
  const auto off = block_offsets(shapes);

  IntMatrix system = relation_matrix(a, b, full);
  IntVector rhs(system.rows());
  for (const BlockEquation& eq : equations) {
    for (std::size_t k = 0; k < eq.left.size(); ++k) {
      const IntMatrix& l = eq.left[k];
      const IntMatrix& r = eq.right[k];
      const IntMatrix& target = eq.rhs.betas.at(k);
      if (l.cols() != shapes[k].first || r.rows() != shapes[k].second || target.rows() != l.rows() ||
          target.cols() != r.cols())
        throw ShapeError("factor: equation shapes do not chain at segment " + std::to_string(k + 1));
      // vec(L mu R) = (R^T (x) L) vec(mu)
      const IntMatrix coeff = kronecker(r.transpose(), l);
      IntMatrix rows(coeff.rows(), off.back());
      rows.set_block(0, off[k], coeff);
      system = vstack(system, rows);
      const IntVector v = vectorize(HomTuple{{target}});
      rhs.insert(rhs.end(), v.begin(), v.end());
    }
  }
  auto solution = solve_linear(system, rhs);
  if (!solution) return std::nullopt;
  return Factorization{devectorize(solution->particular, shapes),
                       HomGroup(a.name, b.name, full, shapes, std::move(solution->homogeneous))};
}

}  // namespace detail

std::optional<Factorization> factor(const ElementaryAlgebra& a, const ElementaryAlgebra& b_small,
                                    const ElementaryAlgebra& b_big, const HomTuple& psi,
                                    const HomTuple& alpha) {
  detail::require_common_partition(a, b_small);
  detail::require_strict(b_small, "target");
  require_member(b_small, b_big, psi, "psi");
  require_member(a, b_big, alpha, "alpha");
  detail::BlockEquation eq;
  for (std::size_t k = 1; k <= a.n() + 1; ++k) {
    eq.left.push_back(psi.betas[k - 1]);
    eq.right.push_back(IntMatrix::identity(a.h(k)));
  }
  eq.rhs = alpha;
  return detail::solve_hom(a, b_small, {eq});
}

std::string to_string(const HomTuple& t) {
  std::ostringstream os;
  os << '[';
  for (std::size_t k = 0; k < t.betas.size(); ++k) {
    const IntMatrix& m = t.betas[k];
    if (k) os << ',';
    os << '(';
    if (m.empty()) {
      os << m.rows() << 'x' << m.cols();
    } else {
      for (std::size_t r = 0; r < m.rows(); ++r) {
        if (r) os << "; ";
        for (std::size_t c = 0; c < m.cols(); ++c) os << (c ? " " : "") << m(r, c).get_str();
      }
    }
    os << ')';
  }
  os << ']';
  return os.str();
}

}  // namespace sheafkit
