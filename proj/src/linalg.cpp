#include "sheafkit/linalg.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

namespace sheafkit {

namespace {

Integer floor_div(const Integer& a, const Integer& b) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

Integer trunc_div(const Integer& a, const Integer& b) {
  Integer q;
  mpz_tdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

bool divides(const Integer& d, const Integer& a) {
  return mpz_divisible_p(a.get_mpz_t(), d.get_mpz_t()) != 0;
}

void require_same_shape(const IntMatrix& a, const IntMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError(std::string(what) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()));
}

// Row of the first nonzero entry of column c (rows() if the column is zero).
std::size_t pivot_row(const IntMatrix& h, std::size_t c) {
  for (std::size_t i = 0; i < h.rows(); ++i)
    if (h(i, c) != 0) return i;
  return h.rows();
}

// Solves echelon * y = x for an HNF-shaped basis (first `rank` columns).
std::optional<IntVector> echelon_solve(const IntMatrix& echelon, std::size_t rank,
                                       std::span<const Integer> x) {
  IntVector residual(x.begin(), x.end());
  IntVector y(rank);
  for (std::size_t j = 0; j < rank; ++j) {
    const std::size_t p = pivot_row(echelon, j);
    const Integer& pivot = echelon(p, j);
    if (!divides(pivot, residual[p])) return std::nullopt;
    y[j] = residual[p] / pivot;
    if (y[j] == 0) continue;
    for (std::size_t i = p; i < echelon.rows(); ++i) residual[i] -= y[j] * echelon(i, j);
  }
  for (const auto& r : residual)
    if (r != 0) return std::nullopt;
  return y;
}

}  // namespace

std::string to_string(const Integer& v) { return v.get_str(); }

// ---------------------------------------------------------------- IntMatrix

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ShapeError("IntMatrix: ragged initializer");
    for (long v : r) data_.emplace_back(v);
  }
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<IntVector>& rows, std::size_t cols) {
  IntMatrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw ShapeError("IntMatrix::from_rows: ragged rows");
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

IntMatrix IntMatrix::column_vector(std::span<const Integer> v) {
  IntMatrix m(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
  return m;
}

IntVector IntMatrix::column(std::size_t c) const {
  IntVector v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, c);
  return v;
}

void IntMatrix::set_column(std::size_t c, std::span<const Integer> v) {
  if (v.size() != rows_) throw ShapeError("IntMatrix::set_column: length mismatch");
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, c) = v[i];
}

IntVector IntMatrix::row(std::size_t r) const {
  return IntVector(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                   data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
}

IntMatrix IntMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) throw ShapeError("IntMatrix::block: out of bounds");
  IntMatrix b(nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
  return b;
}

void IntMatrix::set_block(std::size_t r0, std::size_t c0, const IntMatrix& b) {
  if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_)
    throw ShapeError("IntMatrix::set_block: out of bounds");
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

bool IntMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const Integer& v) { return v == 0; });
}

bool IntMatrix::is_identity() const {
  if (!is_square()) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if ((*this)(i, j) != (i == j ? 1 : 0)) return false;
  return true;
}

std::string IntMatrix::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < rows_; ++i) {
    if (i) os << ',';
    os << '[';
    for (std::size_t j = 0; j < cols_; ++j) {
      if (j) os << ',';
      os << (*this)(i, j).get_str();
    }
    os << ']';
  }
  os << ']';
  return os.str();
}

bool operator==(const IntMatrix& a, const IntMatrix& b) {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols_ != b.rows_)
    throw ShapeError("matrix product: " + std::to_string(a.rows_) + "x" + std::to_string(a.cols_) +
                     " times " + std::to_string(b.rows_) + "x" + std::to_string(b.cols_));
  IntMatrix c(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const Integer& aik = a(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

IntVector operator*(const IntMatrix& a, std::span<const Integer> x) {
  if (a.cols_ != x.size()) throw ShapeError("matrix-vector product: length mismatch");
  IntVector y(a.rows_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) y[i] += a(i, k) * x[k];
  return y;
}

IntMatrix operator+(const IntMatrix& a, const IntMatrix& b) {
  require_same_shape(a, b, "matrix sum");
  IntMatrix c = a;
  for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] += b.data_[i];
  return c;
}

IntMatrix operator-(const IntMatrix& a, const IntMatrix& b) {
  require_same_shape(a, b, "matrix difference");
  IntMatrix c = a;
  for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] -= b.data_[i];
  return c;
}

IntMatrix operator-(const IntMatrix& a) {
  IntMatrix c = a;
  for (auto& v : c.data_) v = -v;
  return c;
}

IntMatrix operator*(const Integer& s, const IntMatrix& a) {
  IntMatrix c = a;
  for (auto& v : c.data_) v *= s;
  return c;
}

void IntMatrix::swap_rows(std::size_t i, std::size_t j) {
  if (i == j) return;
  for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(i, c), (*this)(j, c));
}

void IntMatrix::swap_cols(std::size_t i, std::size_t j) {
  if (i == j) return;
  for (std::size_t r = 0; r < rows_; ++r) std::swap((*this)(r, i), (*this)(r, j));
}

void IntMatrix::add_row_multiple(std::size_t i, std::size_t j, const Integer& factor) {
  if (factor == 0) return;
  for (std::size_t c = 0; c < cols_; ++c) (*this)(i, c) += factor * (*this)(j, c);
}

void IntMatrix::add_col_multiple(std::size_t i, std::size_t j, const Integer& factor) {
  if (factor == 0) return;
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, i) += factor * (*this)(r, j);
}

void IntMatrix::negate_row(std::size_t i) {
  for (std::size_t c = 0; c < cols_; ++c) (*this)(i, c) = -(*this)(i, c);
}

void IntMatrix::negate_col(std::size_t i) {
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, i) = -(*this)(r, i);
}

IntMatrix kronecker(const IntMatrix& a, const IntMatrix& b) {
  IntMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (a(i, j) == 0) continue;
      for (std::size_t r = 0; r < b.rows(); ++r)
        for (std::size_t c = 0; c < b.cols(); ++c)
          k(i * b.rows() + r, j * b.cols() + c) = a(i, j) * b(r, c);
    }
  return k;
}

IntMatrix hstack(const IntMatrix& a, const IntMatrix& b) {
  if (a.rows() != b.rows()) throw ShapeError("hstack: row count mismatch");
  IntMatrix m(a.rows(), a.cols() + b.cols());
  m.set_block(0, 0, a);
  m.set_block(0, a.cols(), b);
  return m;
}

IntMatrix vstack(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols() != b.cols()) throw ShapeError("vstack: column count mismatch");
  IntMatrix m(a.rows() + b.rows(), a.cols());
  m.set_block(0, 0, a);
  m.set_block(a.rows(), 0, b);
  return m;
}

IntMatrix block_diagonal(const std::vector<IntMatrix>& blocks) {
  std::size_t rows = 0, cols = 0;
  for (const auto& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  IntMatrix m(rows, cols);
  std::size_t r = 0, c = 0;
  for (const auto& b : blocks) {
    m.set_block(r, c, b);
    r += b.rows();
    c += b.cols();
  }
  return m;
}

// ---------------------------------------------------------------- FgAbGroup

FgAbGroup::FgAbGroup(std::size_t free_rank, std::vector<Integer> torsion)
    : free_rank_(free_rank), torsion_(std::move(torsion)) {
  for (std::size_t j = 0; j < torsion_.size(); ++j) {
    if (torsion_[j] < 2) throw ShapeError("FgAbGroup: invariant factors must be >= 2");
    if (j > 0 && !divides(torsion_[j - 1], torsion_[j]))
      throw ShapeError("FgAbGroup: invariant factors must form a divisibility chain");
  }
}

std::string FgAbGroup::to_string() const {
  std::vector<std::string> parts;
  if (free_rank_ == 1) parts.emplace_back("Z");
  else if (free_rank_ > 1) parts.push_back("Z^" + std::to_string(free_rank_));
  for (const auto& d : torsion_) parts.push_back("Z/" + d.get_str());
  if (parts.empty()) return "0";
  std::string s = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) s += " (+) " + parts[i];
  return s;
}

// ---------------------------------------------------------------- normal forms

namespace {

// Column operation on (h, u): replaces columns (a, b) by
// (s*a + t*b, -(y/g)*a + (x/g)*b), which has determinant one.
void gcd_combine_columns(IntMatrix& h, IntMatrix& u, std::size_t a, std::size_t b,
                         std::size_t row) {
  const Integer x = h(row, a);
  const Integer y = h(row, b);
  Integer g, s, t;
  mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
  const Integer xg = x / g;
  const Integer yg = y / g;
  for (IntMatrix* m : {&h, &u}) {
    IntMatrix& mm = *m;
    for (std::size_t r = 0; r < mm.rows(); ++r) {
      const Integer ca = mm(r, a);
      const Integer cb = mm(r, b);
      mm(r, a) = s * ca + t * cb;
      mm(r, b) = xg * cb - yg * ca;
    }
  }
}

}  // namespace

HermiteForm hermite_normal_form(const IntMatrix& m) {
  HermiteForm out{m, IntMatrix::identity(m.cols()), 0};
  IntMatrix& h = out.form;
  IntMatrix& u = out.transform;
  const std::size_t n = m.cols();
  std::size_t r = 0;
  for (std::size_t i = 0; i < h.rows() && r < n; ++i) {
    for (std::size_t j = r + 1; j < n; ++j) {
      if (h(i, j) == 0) continue;
      if (h(i, r) == 0) {
        h.swap_cols(r, j);
        u.swap_cols(r, j);
      } else if (divides(h(i, r), h(i, j))) {
        const Integer q = -(h(i, j) / h(i, r));
        h.add_col_multiple(j, r, q);
        u.add_col_multiple(j, r, q);
      } else {
        gcd_combine_columns(h, u, r, j, i);
      }
    }
    if (h(i, r) == 0) continue;
    if (h(i, r) < 0) {
      h.negate_col(r);
      u.negate_col(r);
    }
    for (std::size_t k = 0; k < r; ++k) {
      const Integer q = -floor_div(h(i, k), h(i, r));
      h.add_col_multiple(k, r, q);
      u.add_col_multiple(k, r, q);
    }
    ++r;
  }
  out.rank = r;
  return out;
}

SmithForm smith_normal_form(const IntMatrix& m) {
  SmithForm out{m, IntMatrix::identity(m.rows()), IntMatrix::identity(m.cols()), 0};
  IntMatrix& d = out.form;
  IntMatrix& left = out.left;
  IntMatrix& right = out.right;
  const std::size_t rows = m.rows(), cols = m.cols();
  std::size_t s = 0;
  for (; s < std::min(rows, cols); ++s) {
    bool found_any = true;
    while (true) {
      // Pivot: smallest nonzero |entry|, ties broken by lowest (row, col).
      std::size_t pi = rows, pj = cols;
      for (std::size_t i = s; i < rows; ++i)
        for (std::size_t j = s; j < cols; ++j) {
          if (d(i, j) == 0) continue;
          if (pi == rows || abs(d(i, j)) < abs(d(pi, pj))) {
            pi = i;
            pj = j;
          }
        }
      if (pi == rows) {
        found_any = false;
        break;
      }
      d.swap_rows(s, pi);
      left.swap_rows(s, pi);
      d.swap_cols(s, pj);
      right.swap_cols(s, pj);

      bool clean = true;
      for (std::size_t i = s + 1; i < rows; ++i) {
        if (d(i, s) == 0) continue;
        const Integer q = -trunc_div(d(i, s), d(s, s));
        d.add_row_multiple(i, s, q);
        left.add_row_multiple(i, s, q);
        if (d(i, s) != 0) clean = false;
      }
      for (std::size_t j = s + 1; j < cols; ++j) {
        if (d(s, j) == 0) continue;
        const Integer q = -trunc_div(d(s, j), d(s, s));
        d.add_col_multiple(j, s, q);
        right.add_col_multiple(j, s, q);
        if (d(s, j) != 0) clean = false;
      }
      if (!clean) continue;

      std::size_t bad_row = rows;
      for (std::size_t i = s + 1; i < rows && bad_row == rows; ++i)
        for (std::size_t j = s + 1; j < cols; ++j)
          if (!divides(d(s, s), d(i, j))) {
            bad_row = i;
            break;
          }
      if (bad_row == rows) break;
      d.add_row_multiple(s, bad_row, 1);
      left.add_row_multiple(s, bad_row, 1);
    }
    if (!found_any) break;
    if (d(s, s) < 0) {
      d.negate_row(s);
      left.negate_row(s);
    }
  }
  out.rank = s;
  return out;
}

Integer determinant(const IntMatrix& m) {
  if (!m.is_square()) throw ShapeError("determinant: matrix is not square");
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  // Bareiss fraction-free elimination.
  IntMatrix a = m;
  Integer sign = 1;
  Integer prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t swap = k + 1;
      while (swap < n && a(swap, k) == 0) ++swap;
      if (swap == n) return 0;
      a.swap_rows(k, swap);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

std::size_t rational_rank(const IntMatrix& m) { return hermite_normal_form(m).rank; }

std::optional<IntMatrix> unimodular_inverse(const IntMatrix& m) {
  if (!m.is_square()) return std::nullopt;
  HermiteForm h = hermite_normal_form(m);
  if (!h.form.is_identity()) return std::nullopt;
  return std::move(h.transform);
}

// ---------------------------------------------------------------- lattices

Lattice::Lattice(std::size_t ambient_rank) : ambient_(ambient_rank), basis_(ambient_rank, 0) {}

Lattice Lattice::full(std::size_t ambient_rank) {
  Lattice l(ambient_rank);
  l.basis_ = IntMatrix::identity(ambient_rank);
  return l;
}

Lattice Lattice::span(const IntMatrix& generators) {
  HermiteForm h = hermite_normal_form(generators);
  Lattice l(generators.rows());
  l.basis_ = h.form.block(0, 0, generators.rows(), h.rank);
  return l;
}

bool Lattice::contains(std::span<const Integer> x) const { return coordinates(x).has_value(); }

std::optional<IntVector> Lattice::coordinates(std::span<const Integer> x) const {
  if (x.size() != ambient_) throw ShapeError("Lattice: vector length does not match ambient rank");
  return echelon_solve(basis_, basis_.cols(), x);
}

Lattice kernel_basis(const IntMatrix& m) {
  HermiteForm h = hermite_normal_form(m);
  return Lattice::span(h.transform.block(0, h.rank, m.cols(), m.cols() - h.rank));
}

Lattice image(const IntMatrix& m) { return Lattice::span(m); }

FgAbGroup cokernel(const IntMatrix& m) {
  SmithForm s = smith_normal_form(m);
  std::vector<Integer> torsion;
  for (std::size_t i = 0; i < s.rank; ++i)
    if (s.form(i, i) != 1) torsion.push_back(s.form(i, i));
  return FgAbGroup(m.rows() - s.rank, std::move(torsion));
}

std::optional<LinearSolution> solve_linear(const IntMatrix& m, std::span<const Integer> b) {
  if (b.size() != m.rows()) throw ShapeError("solve_linear: right-hand side length mismatch");
  HermiteForm h = hermite_normal_form(m);
  auto y = echelon_solve(h.form, h.rank, b);
  if (!y) return std::nullopt;
  IntVector x(m.cols());
  for (std::size_t j = 0; j < h.rank; ++j)
    for (std::size_t i = 0; i < m.cols(); ++i) x[i] += h.transform(i, j) * (*y)[j];
  return LinearSolution{std::move(x),
                        Lattice::span(h.transform.block(0, h.rank, m.cols(), m.cols() - h.rank))};
}

bool membership(const Lattice& l, std::span<const Integer> x) { return l.contains(x); }

Lattice sum(const Lattice& a, const Lattice& b) {
  if (a.ambient_rank() != b.ambient_rank()) throw ShapeError("lattice sum: ambient rank mismatch");
  return Lattice::span(hstack(a.basis(), b.basis()));
}

Lattice preimage(const IntMatrix& m, const Lattice& l) {
  if (m.rows() != l.ambient_rank()) throw ShapeError("preimage: matrix rows do not match lattice");
  // x is in the preimage iff (x, c) solves m x - basis c = 0 for some c.
  const Lattice pairs = kernel_basis(hstack(m, -l.basis()));
  return Lattice::span(pairs.basis().block(0, 0, m.cols(), pairs.rank()));
}

Lattice image(const IntMatrix& m, const Lattice& l) {
  if (m.cols() != l.ambient_rank()) throw ShapeError("image: matrix columns do not match lattice");
  return Lattice::span(m * l.basis());
}

Lattice intersection(const Lattice& a, const Lattice& b) {
  if (a.ambient_rank() != b.ambient_rank())
    throw ShapeError("lattice intersection: ambient rank mismatch");
  return image(a.basis(), preimage(a.basis(), b));
}

FgAbGroup quotient(std::size_t ambient_rank, const Lattice& l) {
  if (ambient_rank != l.ambient_rank()) throw ShapeError("quotient: ambient rank mismatch");
  return cokernel(l.basis());
}

bool lattices_equal(const Lattice& a, const Lattice& b) { return a == b; }

}  // namespace sheafkit
