#pragma once

// Exact integer matrices: Smith normal form with unimodular transforms and
// Z-linear system solving. Everything is int64 with __int128 intermediates;
// overflow raises instead of wrapping.

#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <vector>

#include "cgt/error.hpp"

namespace cgt {

using IntVec = std::vector<long long>;

class IntMat {
public:
  IntMat() = default;
  IntMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  long long& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  long long at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  static IntMat identity(std::size_t n) {
    IntMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  IntMat transposed() const {
    IntMat t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
    return t;
  }

  bool operator==(const IntMat&) const = default;

private:
  std::size_t rows_ = 0, cols_ = 0;
  IntVec a_;
};

namespace detail {

inline long long checked(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN) fail(errc::overflow, "integer matrix entry overflow");
  return static_cast<long long>(v);
}

inline long long mul_add(long long a, long long b, long long c, long long d) {
  // a*b + c*d
  return checked(static_cast<__int128>(a) * b + static_cast<__int128>(c) * d);
}

// row_i += q * row_j
inline void row_op(IntMat& m, std::size_t i, std::size_t j, long long q) {
  for (std::size_t k = 0; k < m.cols(); ++k) m.at(i, k) = mul_add(m.at(i, k), 1, q, m.at(j, k));
}

inline void col_op(IntMat& m, std::size_t i, std::size_t j, long long q) {
  for (std::size_t k = 0; k < m.rows(); ++k) m.at(k, i) = mul_add(m.at(k, i), 1, q, m.at(k, j));
}

inline void row_swap(IntMat& m, std::size_t i, std::size_t j) {
  for (std::size_t k = 0; k < m.cols(); ++k) std::swap(m.at(i, k), m.at(j, k));
}

inline void col_swap(IntMat& m, std::size_t i, std::size_t j) {
  for (std::size_t k = 0; k < m.rows(); ++k) std::swap(m.at(k, i), m.at(k, j));
}

inline void row_negate(IntMat& m, std::size_t i) {
  for (std::size_t k = 0; k < m.cols(); ++k) m.at(i, k) = checked(-static_cast<__int128>(m.at(i, k)));
}

} // namespace detail

struct SmithForm {
  IntMat d; // U * A * V = D, diagonal with divisibility chain
  IntMat u; // rows x rows, unimodular
  IntMat v; // cols x cols, unimodular
  std::size_t rank = 0;
  IntVec diagonal() const {
    IntVec out;
    for (std::size_t i = 0; i < rank; ++i) out.push_back(d.at(i, i));
    return out;
  }
};

inline SmithForm smith_normal_form(IntMat a) {
  using namespace detail;
  const std::size_t r = a.rows(), c = a.cols();
  SmithForm out;
  out.u = IntMat::identity(r);
  out.v = IntMat::identity(c);

  std::size_t k = 0;
  while (k < r && k < c) {
    // pivot: minimal nonzero |entry| in the trailing submatrix
    std::size_t pi = k, pj = k;
    long long best = 0;
    for (std::size_t i = k; i < r; ++i)
      for (std::size_t j = k; j < c; ++j) {
        long long v = a.at(i, j);
        if (v != 0 && (best == 0 || std::llabs(v) < std::llabs(best))) {
          best = v;
          pi = i;
          pj = j;
        }
      }
    if (best == 0) break;
    if (pi != k) {
      row_swap(a, k, pi);
      row_swap(out.u, k, pi);
    }
    if (pj != k) {
      col_swap(a, k, pj);
      col_swap(out.v, k, pj);
    }

    bool clean = true;
    for (std::size_t i = k + 1; i < r; ++i)
      if (a.at(i, k) != 0) {
        long long q = -(a.at(i, k) / a.at(k, k));
        row_op(a, i, k, q);
        row_op(out.u, i, k, q);
        if (a.at(i, k) != 0) clean = false;
      }
    for (std::size_t j = k + 1; j < c; ++j)
      if (a.at(k, j) != 0) {
        long long q = -(a.at(k, j) / a.at(k, k));
        col_op(a, j, k, q);
        col_op(out.v, j, k, q);
        if (a.at(k, j) != 0) clean = false;
      }
    if (!clean) continue; // smaller remainders appeared; repick pivot

    // divisibility: pivot must divide the rest of the submatrix
    bool divides = true;
    for (std::size_t i = k + 1; i < r && divides; ++i)
      for (std::size_t j = k + 1; j < c && divides; ++j)
        if (a.at(i, j) % a.at(k, k) != 0) {
          row_op(a, k, i, 1);
          row_op(out.u, k, i, 1);
          divides = false;
        }
    if (!divides) continue;

    if (a.at(k, k) < 0) {
      row_negate(a, k);
      row_negate(out.u, k);
    }
    ++k;
  }
  out.rank = k;
  out.d = std::move(a);
  return out;
}

inline IntVec mat_vec(const IntMat& m, const IntVec& x) {
  if (x.size() != m.cols()) fail(errc::constraint, "mat_vec size mismatch");
  IntVec out(m.rows(), 0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    __int128 acc = 0;
    for (std::size_t j = 0; j < m.cols(); ++j) acc += static_cast<__int128>(m.at(i, j)) * x[j];
    out[i] = detail::checked(acc);
  }
  return out;
}

// One integral solution of A x = b, if any.
inline std::optional<IntVec> solve_integer(const IntMat& a, const IntVec& b) {
  if (b.size() != a.rows()) fail(errc::constraint, "solve_integer size mismatch");
  SmithForm s = smith_normal_form(a);
  IntVec y = mat_vec(s.u, b);
  IntVec z(a.cols(), 0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (i < s.rank) {
      long long d = s.d.at(i, i);
      if (y[i] % d != 0) return std::nullopt;
      z[i] = y[i] / d;
    } else if (y[i] != 0) {
      return std::nullopt;
    }
  }
  return mat_vec(s.v, z);
}

// Is v in the integer row span of A?
inline bool in_row_span(const IntMat& a, const IntVec& v) {
  return solve_integer(a.transposed(), v).has_value();
}

} // namespace cgt
