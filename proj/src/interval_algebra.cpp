#include "sheafkit/interval_algebra.hpp"

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <sstream>

namespace sheafkit {

namespace {

std::string shape_string(std::size_t r, std::size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

bool has_shape(const IntMatrix& m, std::size_t r, std::size_t c) {
  return m.rows() == r && m.cols() == c;
}

// Offsets of the fiber blocks (+)_{i=p}^{q-1} Z^{d_i}.
std::vector<std::size_t> fiber_offsets(const ElementaryAlgebra& a, const CombInterval& iv) {
  std::vector<std::size_t> off{0};
  for (std::size_t i = iv.p; i < iv.q; ++i) off.push_back(off.back() + a.d(i));
  return off;
}

}  // namespace

std::string CombInterval::to_string() const { return std::to_string(p) + ":" + std::to_string(q); }

CombInterval CombInterval::parse(std::string_view text) {
  const auto colon = text.find(':');
  auto parse_part = [&](std::string_view part) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || ptr != part.data() + part.size() || part.empty())
      throw ParseError("interval must look like p:q, got '" + std::string(text) + "'");
    return v;
  };
  if (colon == std::string_view::npos)
    throw ParseError("interval must look like p:q, got '" + std::string(text) + "'");
  CombInterval iv{parse_part(text.substr(0, colon)), parse_part(text.substr(colon + 1))};
  if (iv.p < 1 || iv.p > iv.q)
    throw ParseError("interval p:q needs 1 <= p <= q, got '" + std::string(text) + "'");
  return iv;
}

std::string ValidationReport::summary() const {
  if (ok()) return "valid";
  std::ostringstream os;
  os << "invalid:";
  for (const auto& v : violations) {
    os << "\n  ";
    if (v.index > 0) os << "i=" << v.index << ": ";
    os << v.constraint;
  }
  return os.str();
}

ValidationReport validate(const ElementaryAlgebra& a) {
  ValidationReport report;
  auto fail = [&](std::size_t i, std::string what) { report.violations.push_back({i, std::move(what)}); };
  const std::size_t n = a.n();
  if (a.h_ranks.size() != n + 1)
    fail(0, "h_ranks must have n+1 = " + std::to_string(n + 1) + " entries, got " +
                std::to_string(a.h_ranks.size()));
  if (a.gamma0.size() != n) fail(0, "gamma0 must have n = " + std::to_string(n) + " matrices");
  if (a.gamma1.size() != n) fail(0, "gamma1 must have n = " + std::to_string(n) + " matrices");
  if (a.coords) {
    const auto& x = *a.coords;
    if (x.size() != n) fail(0, "coords must have n entries");
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!(x[i] > 0.0 && x[i] < 1.0)) fail(i + 1, "coordinate must lie in (0,1)");
      if (i > 0 && !(x[i - 1] < x[i])) fail(i + 1, "coordinates must be strictly increasing");
    }
  }
  if (!report.ok()) return report;

  for (std::size_t i = 1; i <= n; ++i) {
    const IntMatrix& g0 = a.gamma(i, 0);
    const IntMatrix& g1 = a.gamma(i, 1);
    if (!has_shape(g0, a.h(i), a.d(i)))
      fail(i, "gamma0 must be " + shape_string(a.h(i), a.d(i)) + ", got " +
                  shape_string(g0.rows(), g0.cols()));
    if (!has_shape(g1, a.h(i + 1), a.d(i)))
      fail(i, "gamma1 must be " + shape_string(a.h(i + 1), a.d(i)) + ", got " +
                  shape_string(g1.rows(), g1.cols()));
    if (a.strict_elementary && !g0.is_identity() && !g1.is_identity())
      fail(i, "strict elementary requires gamma0 or gamma1 to be the identity");
  }
  if (!report.ok()) return report;

  if (n % 2 == 0) {
    bool special = true;
    for (std::size_t i = 1; 2 * i <= n && special; ++i) {
      special = a.d(2 * i - 1) == a.h(2 * i) && a.h(2 * i) == a.d(2 * i) &&
                a.gamma(2 * i - 1, 1).is_identity() && a.gamma(2 * i, 0).is_identity();
    }
    report.special_elementary = special;
  }
  return report;
}

void require_valid(const ElementaryAlgebra& a) {
  const ValidationReport r = validate(a);
  if (!r.ok()) throw ValidationError("algebra '" + a.name + "' " + r.summary());
}

bool has_identity_sides(const ElementaryAlgebra& a) {
  for (std::size_t i = 1; i <= a.n(); ++i)
    if (!a.gamma(i, 0).is_identity() && !a.gamma(i, 1).is_identity()) return false;
  return true;
}

ElementaryAlgebra refine(const ElementaryAlgebra& a, std::size_t segment) {
  const std::size_t n = a.n();
  if (segment < 1 || segment > n + 1)
    throw RangeError("refine: segment " + std::to_string(segment) + " outside 1.." +
                     std::to_string(n + 1));
  const std::size_t k = segment;
  const std::size_t hk = a.h(k);
  ElementaryAlgebra r = a;
  const auto at = [](auto& v, std::size_t pos) { return v.begin() + static_cast<std::ptrdiff_t>(pos); };
  // New singular point x_k inside U_k; U_k splits into two copies of H_k.
  r.d_ranks.insert(at(r.d_ranks, k - 1), hk);
  r.h_ranks.insert(at(r.h_ranks, k - 1), hk);
  r.gamma0.insert(at(r.gamma0, k - 1), IntMatrix::identity(hk));
  r.gamma1.insert(at(r.gamma1, k - 1), IntMatrix::identity(hk));
  if (r.coords) {
    const double left = k == 1 ? 0.0 : (*a.coords)[k - 2];
    const double right = k == n + 1 ? 1.0 : (*a.coords)[k - 1];
    r.coords->insert(at(*r.coords, k - 1), 0.5 * (left + right));
  }
  return r;
}

std::vector<CombInterval> all_intervals(const ElementaryAlgebra& a) {
  std::vector<CombInterval> out;
  for (std::size_t p = 1; p <= a.n() + 1; ++p)
    for (std::size_t q = p; q <= a.n() + 1; ++q) out.push_back({p, q});
  return out;
}

void require_interval(const ElementaryAlgebra& a, const CombInterval& iv) {
  if (iv.p < 1 || iv.p > iv.q || iv.q > a.n() + 1)
    throw RangeError("interval " + iv.to_string() + " outside 1.." + std::to_string(a.n() + 1));
}

IntMatrix zigzag_matrix(const ElementaryAlgebra& a, const CombInterval& iv) {
  require_interval(a, iv);
  if (iv.is_segment()) throw RangeError("zigzag_matrix: interval " + iv.to_string() + " has no singular point");
  const auto col = fiber_offsets(a, iv);
  std::vector<std::size_t> row{0};
  for (std::size_t k = iv.p + 1; k < iv.q; ++k) row.push_back(row.back() + a.h(k));
  IntMatrix z(row.back(), col.back());
  for (std::size_t i = iv.p; i + 1 < iv.q; ++i) {
    const std::size_t r = row[i - iv.p];
    z.set_block(r, col[i - iv.p], a.gamma(i, 1));
    z.set_block(r, col[i + 1 - iv.p], -a.gamma(i + 1, 0));
  }
  return z;
}

KPair k_groups(const ElementaryAlgebra& a, const CombInterval& iv) {
  require_interval(a, iv);
  if (iv.is_segment()) {
    const std::size_t h = a.h(iv.p);
    return {Lattice::full(h), FgAbGroup::free(h), FgAbGroup::trivial()};
  }
  const IntMatrix z = zigzag_matrix(a, iv);
  Lattice k0 = kernel_basis(z);
  const std::size_t rank = k0.rank();
  return {std::move(k0), FgAbGroup::free(rank), cokernel(z)};
}

std::size_t fiber_k0_rank(const ElementaryAlgebra& a, std::size_t i) {
  if (i < 1 || i > a.n()) throw RangeError("fiber: singular index out of range");
  return a.d(i);
}

IntMatrix ambient_restriction(const ElementaryAlgebra& a, const CombInterval& iv,
                              const CombInterval& jv) {
  require_interval(a, iv);
  require_interval(a, jv);
  if (!iv.contains(jv))
    throw RangeError("restriction: " + jv.to_string() + " is not contained in " + iv.to_string());
  if (iv.is_segment()) return IntMatrix::identity(a.h(iv.p));
  const auto src = fiber_offsets(a, iv);
  if (!jv.is_segment()) {
    const auto dst = fiber_offsets(a, jv);
    IntMatrix r(dst.back(), src.back());
    for (std::size_t i = jv.p; i < jv.q; ++i)
      r.set_block(dst[i - jv.p], src[i - iv.p], IntMatrix::identity(a.d(i)));
    return r;
  }
  // Value on the segment U_k, read off the fiber on either side of it.
  const std::size_t k = jv.p;
  IntMatrix r(a.h(k), src.back());
  if (k <= iv.q - 1) r.set_block(0, src[k - iv.p], a.gamma(k, 0));
  else r.set_block(0, src[iv.q - 1 - iv.p], a.gamma(iv.q - 1, 1));
  return r;
}

IntMatrix restriction_map(const ElementaryAlgebra& a, const CombInterval& iv, const CombInterval& jv) {
  const IntMatrix ambient = ambient_restriction(a, iv, jv);
  const KPair from = k_groups(a, iv);
  const KPair to = k_groups(a, jv);
  const IntMatrix images = ambient * from.k0_embedding.basis();
  IntMatrix r(to.k0_embedding.rank(), from.k0_embedding.rank());
  for (std::size_t c = 0; c < images.cols(); ++c) {
    const auto coords = to.k0_embedding.coordinates(images.column(c));
    if (!coords) throw std::logic_error("restriction: image leaves K_0 of the subinterval");
    r.set_column(c, *coords);
  }
  return r;
}

bool OpenWindow::contains(const OpenWindow& w) const {
  const bool left = from_zero || (!w.from_zero && p <= w.p);
  const bool right = to_one || (!w.to_one && w.q <= q);
  return left && right;
}

WindowComplex window_complex(const ElementaryAlgebra& a, const OpenWindow& w) {
  const std::size_t n = a.n();
  const std::size_t p = w.from_zero ? 1 : w.p;
  const std::size_t q = w.to_one ? n + 1 : w.q;
  if (p < 1 || p > q || q > n + 1) throw RangeError("window: segment range out of bounds");
  if (w.from_zero && w.to_one && n == 0)
    throw RangeError("window: [0,1] without singular points is compact, not an extension");

  WindowComplex wc;
  for (std::size_t i = p; i < q; ++i) wc.singular.push_back(i);
  for (std::size_t k = p; k <= q; ++k) {
    const bool cone = (k == p && w.from_zero) || (k == q && w.to_one);
    if (!cone) wc.slots.push_back(k);
  }
  std::vector<std::size_t> row_of(n + 2, SIZE_MAX), row_off{0};
  for (std::size_t s = 0; s < wc.slots.size(); ++s) {
    row_of[wc.slots[s]] = row_off.back();
    row_off.push_back(row_off.back() + a.h(wc.slots[s]));
  }
  std::size_t cols = 0;
  for (std::size_t i : wc.singular) cols += a.d(i);
  wc.boundary = IntMatrix(row_off.back(), cols);
  std::size_t c = 0;
  for (std::size_t i : wc.singular) {
    if (row_of[i] != SIZE_MAX) wc.boundary.set_block(row_of[i], c, -a.gamma(i, 0));
    if (row_of[i + 1] != SIZE_MAX) wc.boundary.set_block(row_of[i + 1], c, a.gamma(i, 1));
    c += a.d(i);
  }
  return wc;
}

KPair k_groups(const ElementaryAlgebra& a, const OpenWindow& w) {
  const WindowComplex wc = window_complex(a, w);
  Lattice k0 = kernel_basis(wc.boundary);
  const std::size_t rank = k0.rank();
  return {std::move(k0), FgAbGroup::free(rank), cokernel(wc.boundary)};
}

}  // namespace sheafkit
