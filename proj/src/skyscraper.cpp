#include <algorithm>
#include <charconv>
#include <stdexcept>

#include "engine_common.hpp"
#include "sheafkit/etheory.hpp"

namespace sheafkit {

SkyscraperLocation SkyscraperLocation::parse(const std::string& text) {
  if (text == "end0") return zero();
  if (text == "end1") return one();
  const auto number = [&](std::size_t prefix) {
    std::size_t v = 0;
    const char* first = text.data() + prefix;
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (first == last || ec != std::errc() || ptr != last || v == 0)
      throw ParseError("location: expected x_<i>, seg_<k>, end0 or end1, got '" + text + "'");
    return v;
  };
  if (text.starts_with("x_")) return singular(number(2));
  if (text.starts_with("seg_")) return segment(number(4));
  throw ParseError("location: expected x_<i>, seg_<k>, end0 or end1, got '" + text + "'");
}

std::string SkyscraperLocation::to_string() const {
  switch (kind) {
    case Kind::Singular: return "x_" + std::to_string(index);
    case Kind::Segment: return "seg_" + std::to_string(index);
    case Kind::Zero: return "end0";
    case Kind::One: return "end1";
  }
  return "?";
}

std::vector<SkyscraperLocation> all_locations(const ElementaryAlgebra& b) {
  std::vector<SkyscraperLocation> out;
  for (std::size_t i = 1; i <= b.n(); ++i) out.push_back(SkyscraperLocation::singular(i));
  for (std::size_t k = 1; k <= b.n() + 1; ++k) out.push_back(SkyscraperLocation::segment(k));
  out.push_back(SkyscraperLocation::zero());
  out.push_back(SkyscraperLocation::one());
  return out;
}

namespace {

void require_location(const ElementaryAlgebra& b, const SkyscraperLocation& at) {
  using K = SkyscraperLocation::Kind;
  if (at.kind == K::Singular && (at.index < 1 || at.index > b.n()))
    throw RangeError("location " + at.to_string() + ": algebra has " + std::to_string(b.n()) +
                     " singular points");
  if (at.kind == K::Segment && (at.index < 1 || at.index > b.n() + 1))
    throw RangeError("location " + at.to_string() + ": algebra has " + std::to_string(b.n() + 1) +
                     " segments");
}

void prepare(const ElementaryAlgebra& b, const SkyscraperLocation& at) {
  require_valid(b);
  detail::require_strict(b, "target");
  require_location(b, at);
}

OpenWindow open_window(std::size_t p, std::size_t q) { return {false, p, false, q}; }

// Outermost window (possibly absent) and the small window that is repeated.
std::pair<std::optional<OpenWindow>, OpenWindow> plan_windows(const ElementaryAlgebra& b,
                                                             const SkyscraperLocation& at) {
  using K = SkyscraperLocation::Kind;
  const std::size_t last = b.n() + 1;
  switch (at.kind) {
    case K::Singular: {
      const std::size_t i = at.index;
      return {open_window(std::max<std::size_t>(1, i - 1), std::min(last, i + 2)), open_window(i, i + 1)};
    }
    case K::Segment: {
      const std::size_t k = at.index;
      return {open_window(std::max<std::size_t>(1, k - 1), std::min(last, k + 1)), open_window(k, k)};
    }
    case K::Zero: {
      std::optional<OpenWindow> big;
      if (last >= 2) big = OpenWindow{true, 1, false, 2};
      return {big, OpenWindow{true, 1, false, 1}};
    }
    case K::One: {
      std::optional<OpenWindow> big;
      if (last >= 2) big = OpenWindow{false, last - 1, true, last};
      return {big, OpenWindow{false, last, true, last}};
    }
  }
  throw std::logic_error("skyscraper: unknown location kind");
}

// K_0 and K_1 of B(W) with explicit free coordinates.
struct WindowK {
  OpenWindow window;
  WindowComplex complex;
  Lattice k0;                  // inside (+) Z^{d_i} over the singular points of W
  IntMatrix k1_coords;         // Z^{slots} -> coordinates of coker(boundary)
  IntMatrix k1_lift;           // coordinates -> Z^{slots}
  bool k1_free = true;
};

WindowK window_k(const ElementaryAlgebra& b, const OpenWindow& w) {
  WindowK out{w, window_complex(b, w), Lattice(), IntMatrix(), IntMatrix()};
  const IntMatrix& m = out.complex.boundary;
  out.k0 = kernel_basis(m);
  const SmithForm snf = smith_normal_form(m);
  for (std::size_t j = 0; j < snf.rank; ++j)
    if (snf.form(j, j) != 1) out.k1_free = false;
  const std::size_t rows = m.rows();
  const std::size_t free = rows - snf.rank;
  const auto inv = unimodular_inverse(snf.left);
  if (!inv) throw std::logic_error("skyscraper: Smith transform is not unimodular");
  out.k1_coords = snf.left.block(snf.rank, 0, free, rows);
  out.k1_lift = inv->block(0, snf.rank, rows, free);
  return out;
}

// Induced maps K_*(B(W_small)) -> K_*(B(W_big)) for W_small inside W_big.
std::pair<IntMatrix, IntMatrix> inclusion_maps(const ElementaryAlgebra& b, const WindowK& small,
                                               const WindowK& big) {
  // Quotients: extension by zero on the singular fibers.
  const auto& ss = small.complex.singular;
  const auto& sb = big.complex.singular;
  std::size_t rows = 0, cols = 0;
  for (std::size_t i : sb) rows += b.d(i);
  for (std::size_t i : ss) cols += b.d(i);
  IntMatrix extend(rows, cols);
  std::size_t c = 0;
  for (std::size_t i : ss) {
    std::size_t r = 0;
    for (std::size_t i2 : sb) {
      if (i2 == i) break;
      r += b.d(i2);
    }
    if (std::find(sb.begin(), sb.end(), i) == sb.end())
      throw std::logic_error("skyscraper: window is not contained in its predecessor");
    extend.set_block(r, c, IntMatrix::identity(b.d(i)));
    c += b.d(i);
  }
  const IntMatrix image0 = extend * small.k0.basis();
  IntMatrix f0(big.k0.rank(), small.k0.rank());
  for (std::size_t j = 0; j < image0.cols(); ++j) {
    const auto coords = big.k0.coordinates(image0.column(j));
    if (!coords) throw std::logic_error("skyscraper: K_0 class leaves the kernel");
    f0.set_column(j, *coords);
  }

  // Ideals: an open piece of U_k sits inside a larger open piece of U_k, an
  // isomorphism on K_1 unless the larger piece is a cone.
  const auto offsets = [&](const std::vector<std::size_t>& slots) {
    std::vector<std::size_t> off(b.n() + 2, SIZE_MAX);
    std::size_t pos = 0;
    for (std::size_t k : slots) {
      off[k] = pos;
      pos += b.h(k);
    }
    return std::pair{off, pos};
  };
  const auto [off_s, len_s] = offsets(small.complex.slots);
  const auto [off_b, len_b] = offsets(big.complex.slots);
  IntMatrix slot_map(len_b, len_s);
  for (std::size_t k : small.complex.slots)
    if (off_b[k] != SIZE_MAX) slot_map.set_block(off_b[k], off_s[k], IntMatrix::identity(b.h(k)));
  const IntMatrix f1 = big.k1_coords * slot_map * small.k1_lift;
  return {f0, f1};
}

}  // namespace

GradedGroup skyscraper_e(std::size_t d_rank, const SkyscraperLocation& at, const ElementaryAlgebra& b) {
  prepare(b, at);
  using K = SkyscraperLocation::Kind;
  switch (at.kind) {
    case K::Singular: {
      const auto [j, jp] = j_index(b, at.index);
      return {FgAbGroup::trivial(), FgAbGroup::free(d_rank * b.h(at.index + static_cast<std::size_t>(jp)))};
    }
    case K::Segment:
      return {FgAbGroup::trivial(), FgAbGroup::free(d_rank * b.h(at.index))};
    case K::Zero:
    case K::One:
      return {FgAbGroup::trivial(), FgAbGroup::trivial()};
  }
  throw std::logic_error("skyscraper: unknown location kind");
}

SkyscraperTowers skyscraper_towers(std::size_t d_rank, const SkyscraperLocation& at,
                                   const ElementaryAlgebra& b) {
  prepare(b, at);
  const auto [big_window, small_window] = plan_windows(b, at);

  std::vector<WindowK> stages;
  if (big_window) {
    WindowK big = window_k(b, *big_window);
    // E^1 = Hom(Z^d, K_1) is only a lattice when K_1 is free.
    if (big.k1_free) stages.push_back(std::move(big));
  }
  WindowK small = window_k(b, small_window);
  if (!small.k1_free)
    throw UnsupportedError("skyscraper tower: K_1 of the window around " + at.to_string() +
                           " has torsion");
  stages.push_back(small);
  stages.push_back(small);

  const IntMatrix id_d = IntMatrix::identity(d_rank);
  SkyscraperTowers out;
  for (const auto& s : stages) {
    out.windows.push_back(s.window);
    out.e0.ranks.push_back(d_rank * s.k0.rank());
    out.e1.ranks.push_back(d_rank * s.k1_coords.rows());
  }
  for (std::size_t k = 1; k < stages.size(); ++k) {
    const auto [f0, f1] = inclusion_maps(b, stages[k], stages[k - 1]);
    // Hom(Z^d, -) on column-major d-column matrices.
    out.e0.maps.push_back(kronecker(id_d, f0));
    out.e1.maps.push_back(kronecker(id_d, f1));
  }
  return out;
}

GradedGroup skyscraper_e_via_tower(std::size_t d_rank, const SkyscraperLocation& at,
                                   const ElementaryAlgebra& b) {
  const SkyscraperTowers towers = skyscraper_towers(d_rank, at, b);
  if (lim1_status(towers.e0) != Lim1Status::Zero || lim1_status(towers.e1) != Lim1Status::Zero)
    throw UnsupportedError("skyscraper tower: lim^1 does not vanish");
  return {inverse_limit(towers.e0).group, inverse_limit(towers.e1).group};
}

}  // namespace sheafkit
