#pragma once

// Random instances and brute-force oracles shared by the unit tests and the
// acceptance runner. Oracles here deliberately avoid the engine's vectorized
// assembly: relations are checked with plain long-long matrix products.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "sheafkit/etheory.hpp"
#include "sheafkit/interval_algebra.hpp"
#include "sheafkit/linalg.hpp"

namespace testing {

using namespace sheafkit;
using Rng = std::mt19937_64;

inline long uniform(Rng& rng, long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }

inline IntMatrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, long lo, long hi) {
  IntMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = uniform(rng, lo, hi);
  return m;
}

/// Rank in [0, max_rank], with zero rare.
inline std::size_t random_rank(Rng& rng, std::size_t max_rank) {
  if (uniform(rng, 0, 9) == 0) return 0;
  return static_cast<std::size_t>(uniform(rng, 1, static_cast<long>(max_rank)));
}

/// Strict elementary algebra: at each x_i one side is the identity (so d_i
/// equals that segment's rank) and the other side is random.
inline ElementaryAlgebra random_strict(Rng& rng, const std::string& name, std::size_t n, std::size_t max_rank,
                                       long bound) {
  ElementaryAlgebra a;
  a.name = name;
  a.strict_elementary = true;
  for (std::size_t k = 0; k <= n; ++k) a.h_ranks.push_back(random_rank(rng, max_rank));
  for (std::size_t i = 1; i <= n; ++i) {
    const int side = static_cast<int>(uniform(rng, 0, 1));
    const std::size_t d = a.h_ranks[i - 1 + static_cast<std::size_t>(side)];
    a.d_ranks.push_back(d);
    IntMatrix id = IntMatrix::identity(d);
    IntMatrix other = random_matrix(rng, a.h_ranks[i - static_cast<std::size_t>(side)], d, -bound, bound);
    a.gamma0.push_back(side == 0 ? id : other);
    a.gamma1.push_back(side == 0 ? other : id);
  }
  return a;
}

/// Same shape data as a strict algebra, but neither side forced to the identity.
inline ElementaryAlgebra random_general(Rng& rng, const std::string& name, std::size_t n, std::size_t max_rank,
                                        long bound) {
  ElementaryAlgebra a;
  a.name = name;
  for (std::size_t k = 0; k <= n; ++k) a.h_ranks.push_back(random_rank(rng, max_rank));
  for (std::size_t i = 1; i <= n; ++i) {
    const std::size_t d = random_rank(rng, max_rank);
    a.d_ranks.push_back(d);
    a.gamma0.push_back(random_matrix(rng, a.h_ranks[i - 1], d, -bound, bound));
    a.gamma1.push_back(random_matrix(rng, a.h_ranks[i], d, -bound, bound));
  }
  return a;
}

/// Algebra with n = 1 and rank-one fibers: gamma0 = [g0], gamma1 = [g1].
inline ElementaryAlgebra simple(const std::string& name, long g0, long g1) {
  ElementaryAlgebra a;
  a.name = name;
  a.d_ranks = {1};
  a.h_ranks = {1, 1};
  a.gamma0 = {IntMatrix{{g0}}};
  a.gamma1 = {IntMatrix{{g1}}};
  a.strict_elementary = g0 == 1 || g1 == 1;
  return a;
}

/// n = 2, rank-one fibers: (gamma0_1, gamma1_1 / gamma0_2, gamma1_2).
inline ElementaryAlgebra two_point(const std::string& name, long a0, long a1, long b0, long b1) {
  ElementaryAlgebra a;
  a.name = name;
  a.d_ranks = {1, 1};
  a.h_ranks = {1, 1, 1};
  a.gamma0 = {IntMatrix{{a0}}, IntMatrix{{b0}}};
  a.gamma1 = {IntMatrix{{a1}}, IntMatrix{{b1}}};
  a.strict_elementary = true;
  return a;
}

inline HomTuple tuple_of(std::initializer_list<long> scalars) {
  HomTuple t;
  for (long s : scalars) t.betas.push_back(IntMatrix{{s}});
  return t;
}

// ------------------------------------------------------------ plain integer oracle

using Small = std::vector<std::vector<long long>>;

inline Small to_small(const IntMatrix& m) {
  Small s(m.rows(), std::vector<long long>(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) s[r][c] = m(r, c).get_si();
  return s;
}

inline Small mul(const Small& a, const Small& b, std::size_t inner, std::size_t cols) {
  Small out(a.size(), std::vector<long long>(cols, 0));
  for (std::size_t r = 0; r < a.size(); ++r)
    for (std::size_t k = 0; k < inner; ++k)
      for (std::size_t c = 0; c < cols; ++c) out[r][c] += a[r][k] * b[k][c];
  return out;
}

/// The defining relations at every x_i, choosing B's identity side directly:
/// beta_{i+j'} G_{i,j'} = G'_{i,j'} beta_{i+j} G_{i,j}.
inline bool relations_hold(const ElementaryAlgebra& a, const ElementaryAlgebra& b, const HomTuple& t) {
  for (std::size_t i = 1; i <= a.n(); ++i) {
    const int j = b.gamma(i, 0).is_identity() ? 0 : 1;
    const int jp = 1 - j;
    const std::size_t fs = i + static_cast<std::size_t>(jp), is = i + static_cast<std::size_t>(j);
    const Small beta_f = to_small(t.betas[fs - 1]);
    const Small beta_i = to_small(t.betas[is - 1]);
    const Small lhs = mul(beta_f, to_small(a.gamma(i, jp)), a.h(fs), a.d(i));
    const Small mid = mul(to_small(b.gamma(i, jp)), beta_i, b.h(is), a.h(is));
    const Small rhs = mul(mid, to_small(a.gamma(i, j)), a.h(is), a.d(i));
    if (lhs != rhs) return false;
  }
  return true;
}

/// Calls f on every vector in [-box, box]^dim.
inline void for_each_box_vector(std::size_t dim, long box, const std::function<void(const IntVector&)>& f) {
  IntVector v(dim, Integer(-box));
  for (;;) {
    f(v);
    std::size_t i = 0;
    for (; i < dim; ++i) {
      if (v[i] < box) {
        ++v[i];
        break;
      }
      v[i] = -box;
    }
    if (i == dim) return;
  }
}

/// Random member of a hom group: small combination of its basis.
inline HomTuple random_member(Rng& rng, const HomGroup& g, long coeff = 2) {
  IntVector v(vectorized_size(g.shapes()));
  for (std::size_t j = 0; j < g.rank(); ++j) {
    const long c = uniform(rng, -coeff, coeff);
    const IntVector b = g.lattice().basis_vector(j);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += c * b[k];
  }
  return devectorize(v, g.shapes());
}

// ------------------------------------------------------------ normal form oracles

/// Determinant by cofactor expansion, independent of the engine's routine.
inline Integer cofactor_det(const std::vector<std::vector<Integer>>& m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  if (n == 1) return m[0][0];
  Integer det = 0;
  for (std::size_t c = 0; c < n; ++c) {
    if (m[0][c] == 0) continue;
    std::vector<std::vector<Integer>> minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<Integer> row;
      for (std::size_t cc = 0; cc < n; ++cc)
        if (cc != c) row.push_back(m[r][cc]);
      minor.push_back(std::move(row));
    }
    const Integer term = m[0][c] * cofactor_det(minor);
    det += (c % 2 == 0) ? term : Integer(-term);
  }
  return det;
}

inline void combinations(std::size_t n, std::size_t k, const std::function<void(const std::vector<std::size_t>&)>& f) {
  std::vector<std::size_t> idx(k);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t pos, std::size_t start) {
    if (pos == k) {
      f(idx);
      return;
    }
    for (std::size_t i = start; i < n; ++i) {
      idx[pos] = i;
      rec(pos + 1, i + 1);
    }
  };
  rec(0, 0);
}

/// Invariant factors from determinantal divisors: d_1...d_k = gcd of k x k minors.
inline std::vector<Integer> invariant_factors_by_minors(const IntMatrix& m) {
  std::vector<Integer> factors;
  Integer previous = 1;
  const std::size_t top = std::min(m.rows(), m.cols());
  for (std::size_t k = 1; k <= top; ++k) {
    Integer g = 0;
    combinations(m.rows(), k, [&](const std::vector<std::size_t>& rows) {
      combinations(m.cols(), k, [&](const std::vector<std::size_t>& cols) {
        std::vector<std::vector<Integer>> sub(k, std::vector<Integer>(k));
        for (std::size_t r = 0; r < k; ++r)
          for (std::size_t c = 0; c < k; ++c) sub[r][c] = m(rows[r], cols[c]);
        const Integer d = cofactor_det(sub);
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), d.get_mpz_t());
      });
    });
    if (g == 0) break;
    factors.push_back(g / previous);
    previous = g;
  }
  return factors;
}

inline bool is_unimodular(const IntMatrix& u) {
  if (!u.is_square()) return false;
  std::vector<std::vector<Integer>> rows(u.rows(), std::vector<Integer>(u.cols()));
  for (std::size_t r = 0; r < u.rows(); ++r)
    for (std::size_t c = 0; c < u.cols(); ++c) rows[r][c] = u(r, c);
  if (u.rows() <= 6) {
    const Integer d = cofactor_det(rows);
    return d == 1 || d == -1;
  }
  const Integer d = determinant(u);
  return d == 1 || d == -1;
}

/// Column-style Hermite shape: echelon pivots positive, entries left of a
/// pivot in its row reduced into [0, pivot), zero columns last.
inline bool is_column_hermite(const IntMatrix& h) {
  std::size_t last_pivot_row = 0;
  bool any = false;
  for (std::size_t c = 0; c < h.cols(); ++c) {
    std::size_t r = 0;
    while (r < h.rows() && h(r, c) == 0) ++r;
    if (r == h.rows()) {
      for (std::size_t c2 = c; c2 < h.cols(); ++c2)
        for (std::size_t r2 = 0; r2 < h.rows(); ++r2)
          if (h(r2, c2) != 0) return false;
      return true;
    }
    if (any && r <= last_pivot_row) return false;
    if (h(r, c) <= 0) return false;
    for (std::size_t c2 = 0; c2 < c; ++c2)
      if (h(r, c2) < 0 || h(r, c2) >= h(r, c)) return false;
    any = true;
    last_pivot_row = r;
  }
  return true;
}

}  // namespace testing
