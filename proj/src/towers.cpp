#include "sheafkit/towers.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace sheafkit {

Tower Tower::constant(std::size_t rank, std::size_t length) {
  Tower t;
  t.ranks.assign(length + 1, rank);
  t.maps.assign(length, IntMatrix::identity(rank));
  return t;
}

Tower Tower::self_map(IntMatrix f) {
  Tower t;
  t.ranks = {f.rows()};
  t.maps = {std::move(f)};
  t.iterated_self_map = true;
  return t;
}

const char* to_string(Lim1Status s) {
  return s == Lim1Status::Zero ? "zero" : "nonzero (uncountable)";
}

void validate(const Tower& t) {
  if (t.ranks.empty()) throw ShapeError("tower: at least one stage is required");
  if (t.iterated_self_map) {
    if (t.ranks.size() != 1 || t.maps.size() != 1)
      throw ShapeError("tower: an iterated self-map has exactly one stage and one map");
    const IntMatrix& f = t.maps.front();
    if (f.rows() != t.ranks[0] || f.cols() != t.ranks[0])
      throw ShapeError("tower: self-map must be square of the stage rank");
    return;
  }
  if (t.maps.size() + 1 != t.ranks.size())
    throw ShapeError("tower: expected " + std::to_string(t.ranks.size() - 1) + " maps, got " +
                     std::to_string(t.maps.size()));
  for (std::size_t k = 1; k < t.ranks.size(); ++k) {
    const IntMatrix& f = t.maps[k - 1];
    if (f.rows() != t.ranks[k - 1] || f.cols() != t.ranks[k])
      throw ShapeError("tower: map f_" + std::to_string(k) + " must be " +
                       std::to_string(t.ranks[k - 1]) + "x" + std::to_string(t.ranks[k]));
  }
}

namespace {

struct ImageChain {
  bool stabilizes = false;
  std::size_t index = 0;  // first j with im(f^j) = im(f^{j+1})
  Lattice stable;
};

ImageChain image_chain(const IntMatrix& f) {
  Lattice current = Lattice::full(f.rows());
  for (std::size_t j = 0; j < kMaxImageIterations; ++j) {
    Lattice next = image(f, current);
    if (next == current) return {true, j, std::move(current)};
    // Equal rank with a strict inclusion: f maps im(f^j) isomorphically onto
    // im(f^{j+1}), so the index [im f^j : im f^{j+1}] > 1 repeats forever.
    if (next.rank() == current.rank()) return {false, j, std::move(current)};
    current = std::move(next);
  }
  throw UnsupportedError("tower: image chain undecided after " +
                         std::to_string(kMaxImageIterations) + " iterations");
}

}  // namespace

InverseLimit inverse_limit(const Tower& t) {
  validate(t);
  if (t.iterated_self_map) {
    const IntMatrix& f = t.maps.front();
    ImageChain chain = image_chain(f);
    if (!chain.stabilizes)
      throw UnsupportedError("tower: inverse limit of a non-Mittag-Leffler self-map is not supported");
    // f restricts to an automorphism of the stable image; stage k of a limit
    // point is f^{-k} applied to its stage-0 component.
    const IntMatrix& basis = chain.stable.basis();
    const IntMatrix fb = f * basis;
    IntMatrix restricted(basis.cols(), basis.cols());
    for (std::size_t c = 0; c < basis.cols(); ++c)
      restricted.set_column(c, *chain.stable.coordinates(fb.column(c)));
    const auto inv = unimodular_inverse(restricted);
    if (!inv) throw std::logic_error("tower: restriction to the stable image is not invertible");
    InverseLimit out{FgAbGroup::free(basis.cols()), {basis}};
    IntMatrix power = IntMatrix::identity(basis.cols());
    for (std::size_t k = 1; k <= std::max<std::size_t>(chain.index, 1); ++k) {
      power = *inv * power;
      out.projections.push_back(basis * power);
    }
    return out;
  }

  // Compatible sequences (g_0, ..., g_m) with g_{k-1} = f_k g_k.
  const std::size_t m = t.last_stage();
  std::vector<std::size_t> offset(m + 2, 0);
  for (std::size_t k = 0; k <= m; ++k) offset[k + 1] = offset[k] + t.ranks[k];
  IntMatrix system(offset[m], offset[m + 1]);
  for (std::size_t k = 1; k <= m; ++k) {
    system.set_block(offset[k - 1], offset[k - 1], IntMatrix::identity(t.ranks[k - 1]));
    system.set_block(offset[k - 1], offset[k], -t.maps[k - 1]);
  }
  const Lattice compatible = kernel_basis(system);
  if (compatible.rank() != t.ranks[m])
    throw std::logic_error("tower: compatible sequences do not match the last stage");

  InverseLimit out{FgAbGroup::free(t.ranks[m]), std::vector<IntMatrix>(m + 1)};
  out.projections[m] = IntMatrix::identity(t.ranks[m]);
  for (std::size_t k = m; k-- > 0;) out.projections[k] = t.maps[k] * out.projections[k + 1];
  return out;
}

bool mittag_leffler(const Tower& t) {
  validate(t);
  if (!t.iterated_self_map) return true;
  return image_chain(t.maps.front()).stabilizes;
}

Lim1Status lim1_status(const Tower& t) {
  return mittag_leffler(t) ? Lim1Status::Zero : Lim1Status::NonzeroUncountable;
}

bool skyscraper_ses_check(const Tower& t, const FgAbGroup& middle) {
  if (lim1_status(t) != Lim1Status::Zero)
    throw UnsupportedError("skyscraper sequence: lim^1 is nonzero, middle term is not finitely presented");
  return inverse_limit(t).group == middle;
}

}  // namespace sheafkit
