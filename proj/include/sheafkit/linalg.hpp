#pragma once

// Exact integer matrices, lattices in Z^n and finitely generated abelian
// groups. Every computation is carried out with GMP integers.

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "sheafkit/error.hpp"

namespace sheafkit {

using Integer = mpz_class;
using IntVector = std::vector<Integer>;

/// Dense row-major matrix of arbitrary-precision integers. Matrices with zero
/// rows or zero columns are legal and denote zero maps.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols);
  IntMatrix(std::initializer_list<std::initializer_list<long>> rows);

  static IntMatrix identity(std::size_t n);
  static IntMatrix from_rows(const std::vector<IntVector>& rows, std::size_t cols);
  /// Single column built from a vector.
  static IntMatrix column_vector(std::span<const Integer> v);
  static IntMatrix scalar(long value) { return IntMatrix{{value}}; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  Integer& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Integer& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  IntVector column(std::size_t c) const;
  void set_column(std::size_t c, std::span<const Integer> v);
  IntVector row(std::size_t r) const;

  /// Copy of the nr x nc block whose top-left corner is (r0, c0).
  IntMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const IntMatrix& b);

  IntMatrix transpose() const;
  bool is_zero() const;
  bool is_identity() const;
  bool is_square() const { return rows_ == cols_; }

  std::string to_string() const;

  friend bool operator==(const IntMatrix& a, const IntMatrix& b);
  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
  friend IntVector operator*(const IntMatrix& a, std::span<const Integer> x);
  friend IntMatrix operator+(const IntMatrix& a, const IntMatrix& b);
  friend IntMatrix operator-(const IntMatrix& a, const IntMatrix& b);
  friend IntMatrix operator-(const IntMatrix& a);
  friend IntMatrix operator*(const Integer& s, const IntMatrix& a);

  // Elementary operations, used by the normal form routines.
  void swap_rows(std::size_t i, std::size_t j);
  void swap_cols(std::size_t i, std::size_t j);
  /// row_i += factor * row_j
  void add_row_multiple(std::size_t i, std::size_t j, const Integer& factor);
  /// col_i += factor * col_j
  void add_col_multiple(std::size_t i, std::size_t j, const Integer& factor);
  void negate_row(std::size_t i);
  void negate_col(std::size_t i);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Integer> data_;
};

IntMatrix kronecker(const IntMatrix& a, const IntMatrix& b);
IntMatrix hstack(const IntMatrix& a, const IntMatrix& b);
IntMatrix vstack(const IntMatrix& a, const IntMatrix& b);
IntMatrix block_diagonal(const std::vector<IntMatrix>& blocks);

/// Finitely generated abelian group Z^r (+) Z/d1 (+) ... (+) Z/dk in
/// invariant factor form: each d_j >= 2 and d_j | d_{j+1}.
class FgAbGroup {
 public:
  FgAbGroup() = default;
  FgAbGroup(std::size_t free_rank, std::vector<Integer> torsion);

  static FgAbGroup free(std::size_t rank) { return FgAbGroup(rank, {}); }
  static FgAbGroup trivial() { return FgAbGroup(); }

  std::size_t free_rank() const { return free_rank_; }
  const std::vector<Integer>& torsion() const { return torsion_; }
  bool is_trivial() const { return free_rank_ == 0 && torsion_.empty(); }
  bool is_free() const { return torsion_.empty(); }

  /// "Z^2 (+) Z/2 (+) Z/6"; the trivial group prints as "0".
  std::string to_string() const;

  friend bool operator==(const FgAbGroup&, const FgAbGroup&) = default;

 private:
  std::size_t free_rank_ = 0;
  std::vector<Integer> torsion_;
};

/// Subgroup of Z^n, stored by its canonical basis: the nonzero columns of the
/// column-style Hermite normal form of any generating set. Two lattices are
/// equal exactly when their bases are identical.
class Lattice {
 public:
  explicit Lattice(std::size_t ambient_rank = 0);

  static Lattice zero(std::size_t ambient_rank) { return Lattice(ambient_rank); }
  static Lattice full(std::size_t ambient_rank);
  /// Lattice spanned by the columns of `generators`.
  static Lattice span(const IntMatrix& generators);

  std::size_t ambient_rank() const { return ambient_; }
  std::size_t rank() const { return basis_.cols(); }
  const IntMatrix& basis() const { return basis_; }
  IntVector basis_vector(std::size_t j) const { return basis_.column(j); }

  bool contains(std::span<const Integer> x) const;
  /// Coefficients c with basis * c = x, or nothing if x is not in the lattice.
  std::optional<IntVector> coordinates(std::span<const Integer> x) const;

  friend bool operator==(const Lattice&, const Lattice&) = default;

 private:
  std::size_t ambient_ = 0;
  IntMatrix basis_;
};

struct HermiteForm {
  IntMatrix form;       // = input * transform, column-style HNF
  IntMatrix transform;  // unimodular
  std::size_t rank = 0;
};

struct SmithForm {
  IntMatrix form;   // = left * input * right, diagonal, d1 | d2 | ...
  IntMatrix left;   // unimodular
  IntMatrix right;  // unimodular
  std::size_t rank = 0;
};

HermiteForm hermite_normal_form(const IntMatrix& m);
SmithForm smith_normal_form(const IntMatrix& m);

Integer determinant(const IntMatrix& m);
std::size_t rational_rank(const IntMatrix& m);
/// Inverse of a unimodular matrix; nothing if m is not square or |det m| != 1.
std::optional<IntMatrix> unimodular_inverse(const IntMatrix& m);

Lattice kernel_basis(const IntMatrix& m);
Lattice image(const IntMatrix& m);
/// Z^rows / column span of m.
FgAbGroup cokernel(const IntMatrix& m);

struct LinearSolution {
  IntVector particular;
  Lattice homogeneous;
};

/// All integer solutions of m * x = b, or nothing when there is none.
std::optional<LinearSolution> solve_linear(const IntMatrix& m, std::span<const Integer> b);

bool membership(const Lattice& l, std::span<const Integer> x);
Lattice sum(const Lattice& a, const Lattice& b);
Lattice intersection(const Lattice& a, const Lattice& b);
/// {x : m * x in l}
Lattice preimage(const IntMatrix& m, const Lattice& l);
/// Image of a lattice under m.
Lattice image(const IntMatrix& m, const Lattice& l);
FgAbGroup quotient(std::size_t ambient_rank, const Lattice& l);
bool lattices_equal(const Lattice& a, const Lattice& b);

std::string to_string(const Integer& v);

}  // namespace sheafkit
