#include "cwac/intmat.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace cwac {

IntMatrix IntMatrix::identity(int n) {
  IntMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::from_columns(const std::vector<std::vector<Count>>& columns, int rows) {
  IntMatrix m(rows, static_cast<int>(columns.size()));
  for (int c = 0; c < m.cols(); ++c) {
    if (static_cast<int>(columns[c].size()) != rows) throw ArgumentError("column length mismatch");
    for (int r = 0; r < rows; ++r) m(r, c) = columns[c][r];
  }
  return m;
}

std::vector<Count> IntMatrix::apply(std::span<const Count> v) const {
  if (static_cast<int>(v.size()) != cols_) throw ArgumentError("matrix/vector size mismatch");
  std::vector<Count> out(rows_, 0);
  for (int r = 0; r < rows_; ++r) {
    Count acc = 0;
    for (int c = 0; c < cols_; ++c) {
      if (Count e = (*this)(r, c)) acc = checked_add(acc, checked_mul(e, v[c]));
    }
    out[r] = acc;
  }
  return out;
}

std::vector<Count> IntMatrix::column(int c) const {
  std::vector<Count> out(rows_);
  for (int r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

IntMatrix IntMatrix::operator*(const IntMatrix& rhs) const {
  if (cols_ != rhs.rows_) throw ArgumentError("matrix product size mismatch");
  IntMatrix out(rows_, rhs.cols_);
  for (int r = 0; r < rows_; ++r)
    for (int k = 0; k < cols_; ++k) {
      Count a = (*this)(r, k);
      if (!a) continue;
      for (int c = 0; c < rhs.cols_; ++c)
        if (Count b = rhs(k, c)) out(r, c) = checked_add(out(r, c), checked_mul(a, b));
    }
  return out;
}

bool IntMatrix::strictly_positive() const {
  return !data_.empty() && std::all_of(data_.begin(), data_.end(), [](Count x) { return x > 0; });
}

std::string IntMatrix::to_string() const {
  std::ostringstream os;
  os << '[';
  for (int r = 0; r < rows_; ++r) {
    os << (r ? ",[" : "[");
    for (int c = 0; c < cols_; ++c) os << (c ? "," : "") << (*this)(r, c);
    os << ']';
  }
  os << ']';
  return os.str();
}

void IntMatrix::swap_rows(int a, int b) {
  if (a == b) return;
  for (int c = 0; c < cols_; ++c) std::swap((*this)(a, c), (*this)(b, c));
}

void IntMatrix::swap_cols(int a, int b) {
  if (a == b) return;
  for (int r = 0; r < rows_; ++r) std::swap((*this)(r, a), (*this)(r, b));
}

void IntMatrix::add_row_multiple(int a, int b, Count factor) {
  if (!factor) return;
  for (int c = 0; c < cols_; ++c)
    if (Count x = (*this)(b, c)) (*this)(a, c) = checked_add((*this)(a, c), checked_mul(factor, x));
}

void IntMatrix::add_col_multiple(int a, int b, Count factor) {
  if (!factor) return;
  for (int r = 0; r < rows_; ++r)
    if (Count x = (*this)(r, b)) (*this)(r, a) = checked_add((*this)(r, a), checked_mul(factor, x));
}

void IntMatrix::negate_row(int r) {
  for (int c = 0; c < cols_; ++c) (*this)(r, c) = -(*this)(r, c);
}

SmithForm smith_normal_form(const IntMatrix& a) {
  const int m = a.rows();
  const int n = a.cols();
  SmithForm s{IntMatrix::identity(m), a, IntMatrix::identity(n), {}, 0};
  IntMatrix& d = s.D;

  for (int t = 0; t < std::min(m, n); ++t) {
    // pivot: smallest nonzero magnitude in the trailing block
    int pi = -1, pj = -1;
    Count best = 0;
    for (int i = t; i < m; ++i)
      for (int j = t; j < n; ++j) {
        Count x = d(i, j);
        if (x && (pi < 0 || std::abs(x) < best)) pi = i, pj = j, best = std::abs(x);
      }
    if (pi < 0) break;
    d.swap_rows(t, pi);
    s.U.swap_rows(t, pi);
    d.swap_cols(t, pj);
    s.V.swap_cols(t, pj);

    for (;;) {
      bool clean = true;
      for (int i = t + 1; i < m; ++i) {
        if (!d(i, t)) continue;
        Count q = d(i, t) / d(t, t);
        d.add_row_multiple(i, t, -q);
        s.U.add_row_multiple(i, t, -q);
        if (d(i, t)) {
          d.swap_rows(i, t);
          s.U.swap_rows(i, t);
          clean = false;
        }
      }
      for (int j = t + 1; j < n; ++j) {
        if (!d(t, j)) continue;
        Count q = d(t, j) / d(t, t);
        d.add_col_multiple(j, t, -q);
        s.V.add_col_multiple(j, t, -q);
        if (d(t, j)) {
          d.swap_cols(j, t);
          s.V.swap_cols(j, t);
          clean = false;
        }
      }
      if (!clean) continue;
      bool fixed = false;
      for (int i = t + 1; i < m && !fixed; ++i)
        for (int j = t + 1; j < n; ++j)
          if (d(i, j) % d(t, t)) {
            d.add_row_multiple(t, i, 1);
            s.U.add_row_multiple(t, i, 1);
            fixed = true;
            break;
          }
      if (!fixed) break;
    }
    if (d(t, t) < 0) {
      d.negate_row(t);
      s.U.negate_row(t);
    }
    s.diagonal.push_back(d(t, t));
    s.rank = t + 1;
  }
  return s;
}

IntMatrix integer_kernel(const IntMatrix& a) {
  SmithForm s = smith_normal_form(a);
  const int n = a.cols();
  IntMatrix k(n, n - s.rank);
  for (int c = s.rank; c < n; ++c)
    for (int r = 0; r < n; ++r) k(r, c - s.rank) = s.V(r, c);
  return k;
}

std::optional<std::vector<Count>> solve_integer(const IntMatrix& a, std::span<const Count> b) {
  if (static_cast<int>(b.size()) != a.rows()) throw ArgumentError("right-hand side size mismatch");
  SmithForm s = smith_normal_form(a);
  std::vector<Count> ub = s.U.apply(b);
  std::vector<Count> y(a.cols(), 0);
  for (int i = 0; i < a.rows(); ++i) {
    if (i < s.rank) {
      if (ub[i] % s.diagonal[i]) return std::nullopt;
      y[i] = ub[i] / s.diagonal[i];
    } else if (ub[i]) {
      return std::nullopt;
    }
  }
  return s.V.apply(y);
}

IntMatrix lattice_basis(const IntMatrix& generators) {
  // Integer row echelon form of the transpose.
  IntMatrix t(generators.cols(), generators.rows());
  for (int r = 0; r < generators.rows(); ++r)
    for (int c = 0; c < generators.cols(); ++c) t(c, r) = generators(r, c);
  int pivot = 0;
  for (int c = 0; c < t.cols() && pivot < t.rows(); ++c) {
    for (;;) {
      int best = -1;
      for (int r = pivot; r < t.rows(); ++r)
        if (t(r, c) != 0 && (best < 0 || std::abs(t(r, c)) < std::abs(t(best, c)))) best = r;
      if (best < 0) break;
      t.swap_rows(pivot, best);
      bool done = true;
      for (int r = pivot + 1; r < t.rows(); ++r)
        if (t(r, c) != 0) {
          t.add_row_multiple(r, pivot, -(t(r, c) / t(pivot, c)));
          if (t(r, c) != 0) done = false;
        }
      if (done) {
        ++pivot;
        break;
      }
    }
  }
  IntMatrix out(generators.rows(), pivot);
  for (int i = 0; i < pivot; ++i)
    for (int r = 0; r < generators.rows(); ++r) out(r, i) = t(i, r);
  return out;
}

Count QuotientStructure::torsion_order() const {
  Count order = 1;
  for (Count t : torsion) order = checked_mul(order, t);
  return order;
}

QuotientStructure quotient_structure(const IntMatrix& lattice, const IntMatrix& sub) {
  const int r = lattice.cols();
  IntMatrix coords(r, sub.cols());
  for (int c = 0; c < sub.cols(); ++c) {
    auto x = solve_integer(lattice, sub.column(c));
    if (!x) throw ArgumentError("sublattice generator outside the lattice");
    for (int i = 0; i < r; ++i) coords(i, c) = (*x)[i];
  }
  SmithForm s = smith_normal_form(coords);
  QuotientStructure q;
  for (Count d : s.diagonal)
    if (d > 1) q.torsion.push_back(d);
  q.free_rank = r - s.rank;
  return q;
}

}  // namespace cwac
