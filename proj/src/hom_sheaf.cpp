#include "sheafkit/etheory.hpp"

#include <algorithm>
#include <sstream>

#include "engine_common.hpp"

namespace sheafkit {

// ------------------------------------------------------------ vectorization

std::size_t vectorized_size(const BlockShapes& shapes) {
  std::size_t n = 0;
  for (const auto& [r, c] : shapes) n += r * c;
  return n;
}

IntVector vectorize(const HomTuple& t) {
  IntVector v;
  for (const auto& m : t.betas)
    for (std::size_t c = 0; c < m.cols(); ++c)
      for (std::size_t r = 0; r < m.rows(); ++r) v.push_back(m(r, c));
  return v;
}

HomTuple devectorize(std::span<const Integer> v, const BlockShapes& shapes) {
  if (v.size() != vectorized_size(shapes)) throw ShapeError("devectorize: length mismatch");
  HomTuple t;
  std::size_t pos = 0;
  for (const auto& [rows, cols] : shapes) {
    IntMatrix m(rows, cols);
    for (std::size_t c = 0; c < cols; ++c)
      for (std::size_t r = 0; r < rows; ++r) m(r, c) = v[pos++];
    t.betas.push_back(std::move(m));
  }
  return t;
}

HomGroup::HomGroup(std::string source, std::string target, CombInterval range, BlockShapes shapes,
                   Lattice lattice)
    : source_(std::move(source)),
      target_(std::move(target)),
      range_(range),
      shapes_(std::move(shapes)),
      lattice_(std::move(lattice)) {
  if (lattice_.ambient_rank() != vectorized_size(shapes_))
    throw ShapeError("HomGroup: lattice does not live in the tuple space");
}

std::vector<HomTuple> HomGroup::basis() const {
  std::vector<HomTuple> out;
  for (std::size_t j = 0; j < rank(); ++j) out.push_back(devectorize(lattice_.basis_vector(j), shapes_));
  return out;
}

bool HomGroup::contains(const HomTuple& t) const {
  if (!detail::has_shapes(t, shapes_)) return false;
  return lattice_.contains(vectorize(t));
}

// ------------------------------------------------------------ shared checks

namespace detail {

bool has_shapes(const HomTuple& t, const BlockShapes& shapes) {
  if (t.betas.size() != shapes.size()) return false;
  for (std::size_t k = 0; k < shapes.size(); ++k)
    if (t.betas[k].rows() != shapes[k].first || t.betas[k].cols() != shapes[k].second) return false;
  return true;
}

void require_shapes(const HomTuple& t, const BlockShapes& shapes, const std::string& what) {
  if (has_shapes(t, shapes)) return;
  std::ostringstream os;
  os << what << ": expected " << shapes.size() << " blocks of shapes";
  for (const auto& [r, c] : shapes) os << ' ' << r << 'x' << c;
  throw ShapeError(os.str());
}

void require_common_partition(const ElementaryAlgebra& a, const ElementaryAlgebra& b) {
  require_valid(a);
  require_valid(b);
  if (a.n() != b.n())
    throw ShapeError("algebras '" + a.name + "' and '" + b.name + "' do not share a partition (n = " +
                     std::to_string(a.n()) + " vs " + std::to_string(b.n()) + ")");
}

void require_strict(const ElementaryAlgebra& b, const std::string& role) {
  for (std::size_t i = 1; i <= b.n(); ++i)
    if (!b.gamma(i, 0).is_identity() && !b.gamma(i, 1).is_identity())
      throw ValidationError(role + " algebra '" + b.name + "' is not strict elementary at i=" +
                            std::to_string(i) + " (neither connecting map is the identity)");
}

std::vector<std::size_t> block_offsets(const BlockShapes& shapes) {
  std::vector<std::size_t> off{0};
  for (const auto& [r, c] : shapes) off.push_back(off.back() + r * c);
  return off;
}

}  // namespace detail

// ------------------------------------------------------------ relations

std::pair<int, int> j_index(const ElementaryAlgebra& b, std::size_t i) {
  if (i < 1 || i > b.n()) throw RangeError("j_index: singular index out of range");
  if (b.gamma(i, 0).is_identity()) return {0, 1};
  if (b.gamma(i, 1).is_identity()) return {1, 0};
  throw ValidationError("j_index: algebra '" + b.name + "' is not strict elementary at i=" +
                        std::to_string(i));
}

BlockShapes hom_shapes(const ElementaryAlgebra& a, const ElementaryAlgebra& b, const CombInterval& range) {
  BlockShapes shapes;
  for (std::size_t k = range.p; k <= range.q; ++k) shapes.emplace_back(b.h(k), a.h(k));
  return shapes;
}

IntMatrix relation_matrix(const ElementaryAlgebra& a, const ElementaryAlgebra& b, const CombInterval& range) {
  detail::require_common_partition(a, b);
  require_interval(a, range);
  const BlockShapes shapes = hom_shapes(a, b, range);
  const auto off = detail::block_offsets(shapes);
  const auto block = [&](std::size_t k) { return off[k - range.p]; };

  std::vector<IntMatrix> rows;
  for (std::size_t i = range.p; i < range.q; ++i) {
    const auto [j, jp] = j_index(b, i);
    const std::size_t free_seg = i + static_cast<std::size_t>(jp);
    const std::size_t id_seg = i + static_cast<std::size_t>(j);
    // beta_{i+j'} G_{i,j'} - G'_{i,j'} beta_{i+j} G_{i,j} = 0, vectorized.
    const IntMatrix lhs = kronecker(a.gamma(i, jp).transpose(), IntMatrix::identity(b.h(free_seg)));
    const IntMatrix rhs = kronecker(a.gamma(i, j).transpose(), b.gamma(i, jp));
    IntMatrix r(lhs.rows(), off.back());
    r.set_block(0, block(free_seg), lhs);
    r.set_block(0, block(id_seg), r.block(0, block(id_seg), rhs.rows(), rhs.cols()) - rhs);
    rows.push_back(std::move(r));
  }
  IntMatrix stacked(0, off.back());
  for (const auto& r : rows) stacked = vstack(stacked, r);
  return stacked;
}

bool satisfies_relations(const ElementaryAlgebra& a, const ElementaryAlgebra& b, const HomTuple& t) {
  const CombInterval full{1, a.n() + 1};
  const BlockShapes shapes = hom_shapes(a, b, full);
  if (!detail::has_shapes(t, shapes)) return false;
  return (relation_matrix(a, b, full) * vectorize(t)) == IntVector(relation_matrix(a, b, full).rows());
}

void require_member(const ElementaryAlgebra& a, const ElementaryAlgebra& b, const HomTuple& t,
                    const std::string& what) {
  detail::require_common_partition(a, b);
  detail::require_strict(b, "target");
  detail::require_shapes(t, hom_shapes(a, b, {1, a.n() + 1}), what);
  if (!satisfies_relations(a, b, t))
    throw MembershipError(what + " is not in hom(" + a.name + ", " + b.name + ")");
}

HomGroup e_subinterval(const ElementaryAlgebra& a, const ElementaryAlgebra& b, const CombInterval& range) {
  detail::require_common_partition(a, b);
  detail::require_strict(b, "target");
  require_interval(a, range);
  return HomGroup(a.name, b.name, range, hom_shapes(a, b, range),
                  kernel_basis(relation_matrix(a, b, range)));
}

HomGroup hom_sheaf(const ElementaryAlgebra& a, const ElementaryAlgebra& b, SourceCheck check) {
  detail::require_common_partition(a, b);
  if (check == SourceCheck::RequireStrict) detail::require_strict(a, "source");
  return e_subinterval(a, b, {1, a.n() + 1});
}

// ------------------------------------------------------------ boundary route

DeltaMaps delta_matrices(const ElementaryAlgebra& a, const ElementaryAlgebra& b, DeltaSigns signs) {
  detail::require_common_partition(a, b);
  const std::size_t n = a.n();
  const Integer s0 = signs == DeltaSigns::Standard ? -1 : 1;
  const Integer s1 = -s0;

  const BlockShapes dom_a = hom_shapes(a, b, {1, n + 1});
  const auto off_a = detail::block_offsets(dom_a);
  BlockShapes dom_b;
  for (std::size_t i = 1; i <= n; ++i) dom_b.emplace_back(b.d(i), a.d(i));
  const auto off_b = detail::block_offsets(dom_b);

  std::size_t codomain = 0;
  std::vector<std::size_t> row_off;
  for (std::size_t i = 1; i <= n; ++i) {
    row_off.push_back(codomain);
    codomain += (b.h(i) + b.h(i + 1)) * a.d(i);
  }

  DeltaMaps out{IntMatrix(codomain, off_a.back()), IntMatrix(codomain, off_b.back()), codomain};
  for (std::size_t i = 1; i <= n; ++i) {
    const std::size_t r0 = row_off[i - 1];
    const std::size_t r1 = r0 + b.h(i) * a.d(i);
    // (beta) -> (s0 beta_i G_{i,0}, s1 beta_{i+1} G_{i,1})
    out.source.set_block(r0, off_a[i - 1],
                         s0 * kronecker(a.gamma(i, 0).transpose(), IntMatrix::identity(b.h(i))));
    out.source.set_block(r1, off_a[i],
                         s1 * kronecker(a.gamma(i, 1).transpose(), IntMatrix::identity(b.h(i + 1))));
    // (alpha) -> (s0 G'_{i,0} alpha_i, s1 G'_{i,1} alpha_i)
    out.target.set_block(r0, off_b[i - 1], s0 * kronecker(IntMatrix::identity(a.d(i)), b.gamma(i, 0)));
    out.target.set_block(r1, off_b[i - 1], s1 * kronecker(IntMatrix::identity(a.d(i)), b.gamma(i, 1)));
  }
  return out;
}

HomGroup hom_sheaf_via_delta(const ElementaryAlgebra& a, const ElementaryAlgebra& b, DeltaSigns signs) {
  detail::require_common_partition(a, b);
  detail::require_strict(b, "target");
  const DeltaMaps delta = delta_matrices(a, b, signs);
  return HomGroup(a.name, b.name, {1, a.n() + 1}, hom_shapes(a, b, {1, a.n() + 1}),
                  preimage(delta.source, image(delta.target)));
}

FgAbGroup e1_group(const ElementaryAlgebra& a, const ElementaryAlgebra& b, DeltaSigns signs) {
  detail::require_common_partition(a, b);
  detail::require_strict(b, "target");
  const DeltaMaps delta = delta_matrices(a, b, signs);
  return quotient(delta.codomain_rank, sum(image(delta.source), image(delta.target)));
}

// ------------------------------------------------------------ subintervals

HomTuple restrict_hom(const ElementaryAlgebra& a, const ElementaryAlgebra& b, const CombInterval& from,
                      const CombInterval& to, const HomTuple& t) {
  require_interval(a, from);
  require_interval(a, to);
  if (!from.contains(to))
    throw RangeError("restrict: " + to.to_string() + " is not contained in " + from.to_string());
  detail::require_shapes(t, hom_shapes(a, b, from), "restrict: tuple");
  HomTuple r;
  for (std::size_t k = to.p; k <= to.q; ++k) r.betas.push_back(t.betas[k - from.p]);
  return r;
}

namespace {

// Selects the blocks of `sub` out of vectorized tuples over `whole`.
IntMatrix block_selection(const ElementaryAlgebra& a, const ElementaryAlgebra& b,
                          const CombInterval& whole, const CombInterval& sub) {
  const auto off_w = detail::block_offsets(hom_shapes(a, b, whole));
  const auto off_s = detail::block_offsets(hom_shapes(a, b, sub));
  IntMatrix s(off_s.back(), off_w.back());
  for (std::size_t k = sub.p; k <= sub.q; ++k) {
    const std::size_t len = b.h(k) * a.h(k);
    s.set_block(off_s[k - sub.p], off_w[k - whole.p], IntMatrix::identity(len));
  }
  return s;
}

std::optional<HomTuple> missing_from(const Lattice& from, const Lattice& in, const BlockShapes& shapes) {
  for (std::size_t j = 0; j < from.rank(); ++j) {
    const IntVector v = from.basis_vector(j);
    if (!in.contains(v)) return devectorize(v, shapes);
  }
  return std::nullopt;
}

}  // namespace

PullbackReport pullback_check(const ElementaryAlgebra& a, const ElementaryAlgebra& b,
                              const CombInterval& y, const CombInterval& z) {
  detail::require_common_partition(a, b);
  detail::require_strict(b, "target");
  require_interval(a, y);
  require_interval(a, z);
  const HomGroup ey = e_subinterval(a, b, y);
  const HomGroup ez = e_subinterval(a, b, z);

  PullbackReport report;
  report.joined = {std::min(y.p, z.p), std::max(y.q, z.q)};

  if (std::max(y.p, z.p) > std::min(y.q, z.q)) {
    // Disjoint: the relations on Y and Z do not interact, so the solutions on
    // Y and Z jointly must form the direct sum.
    report.disjoint = true;
    const IntMatrix joint = block_diagonal({relation_matrix(a, b, y), relation_matrix(a, b, z)});
    const Lattice solved = kernel_basis(joint);
    const Lattice direct = Lattice::span(block_diagonal({ey.lattice().basis(), ez.lattice().basis()}));
    BlockShapes shapes = ey.shapes();
    shapes.insert(shapes.end(), ez.shapes().begin(), ez.shapes().end());
    report.union_rank = solved.rank();
    report.pullback_rank = direct.rank();
    report.holds = solved == direct;
    if (!report.holds) {
      report.witness = missing_from(solved, direct, shapes);
      if (!report.witness) report.witness = missing_from(direct, solved, shapes);
    }
    return report;
  }

  const CombInterval joined = report.joined;
  const CombInterval overlap{std::max(y.p, z.p), std::min(y.q, z.q)};
  const HomGroup eu = e_subinterval(a, b, joined);

  // Pairs (f, g) in E(Y) x E(Z) agreeing on the overlap.
  const IntMatrix fy = block_selection(a, b, y, overlap) * ey.lattice().basis();
  const IntMatrix fz = block_selection(a, b, z, overlap) * ez.lattice().basis();
  const Lattice pairs = kernel_basis(hstack(fy, -fz));

  // Glue each pair into a tuple over Y u Z: blocks of Y from f, the rest from g.
  const auto off_u = detail::block_offsets(eu.shapes());
  IntMatrix glue(off_u.back(), ey.rank() + ez.rank());
  const IntMatrix ys = block_selection(a, b, joined, y).transpose() * ey.lattice().basis();
  glue.set_block(0, 0, ys);
  const auto off_z = detail::block_offsets(ez.shapes());
  for (std::size_t k = z.p; k <= z.q; ++k) {
    if (y.p <= k && k <= y.q) continue;
    const std::size_t len = b.h(k) * a.h(k);
    glue.set_block(off_u[k - joined.p], ey.rank(),
                   ez.lattice().basis().block(off_z[k - z.p], 0, len, ez.rank()));
  }
  const Lattice glued = Lattice::span(glue * pairs.basis());

  report.union_rank = eu.rank();
  report.pullback_rank = glued.rank();
  report.holds = glued == eu.lattice();
  if (!report.holds) {
    report.witness = missing_from(eu.lattice(), glued, eu.shapes());
    if (!report.witness) report.witness = missing_from(glued, eu.lattice(), eu.shapes());
  }
  return report;
}

}  // namespace sheafkit
