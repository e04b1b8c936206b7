#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace sheafkit;
using testing::Rng;

namespace {

IntVector vec(std::initializer_list<long> xs) {
  IntVector v;
  for (long x : xs) v.emplace_back(x);
  return v;
}

Lattice span_of(std::initializer_list<std::initializer_list<long>> columns, std::size_t ambient) {
  IntMatrix m(ambient, columns.size());
  std::size_t c = 0;
  for (const auto& col : columns) {
    std::size_t r = 0;
    for (long x : col) m(r++, c) = x;
    ++c;
  }
  return Lattice::span(m);
}

}  // namespace

TEST_CASE("hnf of a small upper triangular matrix") {
  const IntMatrix m{{2, 4}, {0, 3}};
  const HermiteForm h = hermite_normal_form(m);
  CHECK(m * h.transform == h.form);
  CHECK(testing::is_unimodular(h.transform));
  CHECK(testing::is_column_hermite(h.form));
  CHECK(Lattice::span(h.form) == Lattice::span(m));
  CHECK(h.rank == 2);
}

TEST_CASE("hnf of identity and zero") {
  const HermiteForm id = hermite_normal_form(IntMatrix::identity(3));
  CHECK(id.form == IntMatrix::identity(3));
  CHECK(id.transform == IntMatrix::identity(3));
  const HermiteForm z = hermite_normal_form(IntMatrix(2, 2));
  CHECK(z.form == IntMatrix(2, 2));
  CHECK(z.transform == IntMatrix::identity(2));
  CHECK(z.rank == 0);
}

TEST_CASE("snf examples") {
  const SmithForm d = smith_normal_form(IntMatrix{{2, 0}, {0, 3}});
  CHECK(d.form == IntMatrix{{1, 0}, {0, 6}});
  CHECK(d.left * IntMatrix{{2, 0}, {0, 3}} * d.right == d.form);
  CHECK(testing::is_unimodular(d.left));
  CHECK(testing::is_unimodular(d.right));

  const SmithForm id = smith_normal_form(IntMatrix::identity(3));
  CHECK(id.form == IntMatrix::identity(3));

  const SmithForm row = smith_normal_form(IntMatrix{{2, -2}});
  CHECK(row.form == IntMatrix{{2, 0}});
  CHECK(row.left * IntMatrix{{2, -2}} * row.right == row.form);
}

TEST_CASE("kernel examples") {
  const Lattice k = kernel_basis(IntMatrix{{2, -3}});
  CHECK(k == span_of({{3, 2}}, 2));
  // every kernel vector in a box is a multiple of the generator
  testing::for_each_box_vector(2, 10, [&](const IntVector& v) {
    const bool in_kernel = 2 * v[0] - 3 * v[1] == 0;
    CHECK(k.contains(v) == in_kernel);
  });
  CHECK(kernel_basis(IntMatrix::identity(3)) == Lattice::zero(3));
  CHECK(kernel_basis(IntMatrix(1, 2)) == Lattice::full(2));
}

TEST_CASE("cokernel examples") {
  CHECK(cokernel(IntMatrix{{2, -2}}) == FgAbGroup(0, {Integer(2)}));
  CHECK(cokernel(IntMatrix::identity(3)).is_trivial());
  CHECK(cokernel(IntMatrix(3, 2)) == FgAbGroup::free(3));
  CHECK(cokernel(IntMatrix(0, 2)).is_trivial());
  CHECK(cokernel(IntMatrix(2, 0)) == FgAbGroup::free(2));
}

TEST_CASE("solve_linear examples") {
  CHECK_FALSE(solve_linear(IntMatrix{{2}}, vec({3})));
  const auto s = solve_linear(IntMatrix{{2}}, vec({4}));
  REQUIRE(s);
  CHECK(s->particular == vec({2}));
  CHECK(s->homogeneous.rank() == 0);

  const auto t = solve_linear(IntMatrix{{2, 3}}, vec({1}));
  REQUIRE(t);
  CHECK(t->particular == vec({-1, 1}));
  CHECK(t->homogeneous == span_of({{3, -2}}, 2));
}

TEST_CASE("lattice operations") {
  CHECK(membership(span_of({{3, 2}}, 2), vec({6, 4})));
  CHECK_FALSE(membership(span_of({{3, 2}}, 2), vec({3, 3})));
  CHECK(quotient(2, span_of({{1, 0}, {0, 2}}, 2)) == FgAbGroup(0, {Integer(2)}));

  const Lattice three = span_of({{3}}, 1);
  const Lattice pre = preimage(IntMatrix{{2}}, three);
  for (long x = -20; x <= 20; ++x) CHECK(pre.contains(vec({x})) == ((2 * x) % 3 == 0));
  CHECK(pre == three);
}

TEST_CASE("fg groups print and reject bad chains") {
  CHECK(FgAbGroup(2, {Integer(2), Integer(6)}).to_string() == "Z^2 (+) Z/2 (+) Z/6");
  CHECK(FgAbGroup::trivial().to_string() == "0");
  CHECK(FgAbGroup::free(1).to_string() == "Z");
  CHECK_THROWS_AS(FgAbGroup(0, {Integer(2), Integer(3)}), std::invalid_argument);
  CHECK_THROWS_AS(FgAbGroup(0, {Integer(1)}), std::invalid_argument);
}

TEST_CASE("empty matrices are legal") {
  const IntMatrix e(0, 3);
  CHECK(kernel_basis(e) == Lattice::full(3));
  CHECK(image(e) == Lattice::zero(0));
  CHECK(smith_normal_form(e).rank == 0);
  CHECK(hermite_normal_form(IntMatrix(3, 0)).form.cols() == 0);
  CHECK(determinant(IntMatrix(0, 0)) == 1);
}

TEST_CASE("big entries stay exact") {
  IntMatrix m{{1, 0}, {0, 1}};
  m(0, 0) = Integer("123456789012345678901234567890");
  m(1, 0) = Integer("987654321098765432109876543210");
  const SmithForm s = smith_normal_form(m);
  CHECK(s.left * m * s.right == s.form);
  CHECK(abs(determinant(m)) == abs(s.form(0, 0) * s.form(1, 1)));
}

TEST_CASE("property: kernels are annihilated and pure") {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const auto r = static_cast<std::size_t>(testing::uniform(rng, 0, 5));
    const auto c = static_cast<std::size_t>(testing::uniform(rng, 0, 5));
    const IntMatrix m = testing::random_matrix(rng, r, c, -4, 4);
    const Lattice k = kernel_basis(m);
    CHECK((m * k.basis()).is_zero());
    CHECK(k.rank() == c - rational_rank(m));
    const FgAbGroup q = quotient(c, k);
    CHECK(q.is_free());
    CHECK(q.free_rank() == rational_rank(m));
  }
}

TEST_CASE("property: cokernel invariant under unimodular changes") {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const auto r = static_cast<std::size_t>(testing::uniform(rng, 1, 4));
    const auto c = static_cast<std::size_t>(testing::uniform(rng, 1, 4));
    const IntMatrix m = testing::random_matrix(rng, r, c, -6, 6);
    // random unimodular matrices as products of elementary operations
    IntMatrix u = IntMatrix::identity(r), v = IntMatrix::identity(c);
    for (int s = 0; s < 6; ++s) {
      if (r > 1) u.add_row_multiple(0 + s % r, (1 + s) % r, testing::uniform(rng, -3, 3));
      if (c > 1) v.add_col_multiple(0 + s % c, (1 + s) % c, testing::uniform(rng, -3, 3));
      if (s % 3 == 0) u.negate_row(s % r);
    }
    CHECK(cokernel(u * m * v) == cokernel(m));
  }
}

TEST_CASE("property: solve_linear and membership agree with brute force") {
  Rng rng(13);
  for (int trial = 0; trial < 150; ++trial) {
    const auto r = static_cast<std::size_t>(testing::uniform(rng, 1, 2));
    const IntMatrix m = testing::random_matrix(rng, r, 2, -3, 3);
    IntVector b;
    for (std::size_t i = 0; i < r; ++i) b.emplace_back(testing::uniform(rng, -4, 4));
    const auto s = solve_linear(m, b);
    bool found = false;
    testing::for_each_box_vector(2, 12, [&](const IntVector& x) {
      if (m * x == b) {
        found = true;
        if (s) {
          IntVector diff{x[0] - s->particular[0], x[1] - s->particular[1]};
          CHECK(s->homogeneous.contains(diff));
        }
      }
    });
    if (s) CHECK(m * s->particular == b);
    // a solution within the box implies solvability; the converse needs no box
    if (found) CHECK(s.has_value());

    const Lattice l = Lattice::span(m.transpose());
    testing::for_each_box_vector(2, 5, [&](const IntVector& x) {
      bool oracle = false;
      testing::for_each_box_vector(r, 8, [&](const IntVector& c) {
        IntVector y(2);
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < 2; ++j) y[j] += m(i, j) * c[i];
        if (y == x) oracle = true;
      });
      if (oracle) CHECK(l.contains(x));
    });
  }
}

TEST_CASE("property: intersection and preimage against brute force") {
  Rng rng(14);
  for (int trial = 0; trial < 60; ++trial) {
    const IntMatrix ga = testing::random_matrix(rng, 2, 2, -3, 3);
    const IntMatrix gb = testing::random_matrix(rng, 2, 2, -3, 3);
    const IntMatrix m = testing::random_matrix(rng, 2, 2, -3, 3);
    const Lattice a = Lattice::span(ga), b = Lattice::span(gb);
    const Lattice both = intersection(a, b);
    const Lattice pre = preimage(m, b);
    testing::for_each_box_vector(2, 6, [&](const IntVector& x) {
      CHECK(both.contains(x) == (a.contains(x) && b.contains(x)));
      CHECK(pre.contains(x) == b.contains(m * x));
    });
    CHECK(lattices_equal(sum(a, b), Lattice::span(hstack(ga, gb))));
  }
}

TEST_CASE("unimodular inverse") {
  const IntMatrix u{{2, 1}, {1, 1}};
  const auto inv = unimodular_inverse(u);
  REQUIRE(inv);
  CHECK(u * *inv == IntMatrix::identity(2));
  CHECK_FALSE(unimodular_inverse(IntMatrix{{2, 0}, {0, 1}}));
  CHECK_FALSE(unimodular_inverse(IntMatrix{{1, 0}}));
}
