#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cwac/numeric.hpp"

namespace cwac {

// Dense row-major integer matrix with overflow-checked arithmetic.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(int rows, int cols, Count fill = 0)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

  static IntMatrix identity(int n);
  static IntMatrix from_columns(const std::vector<std::vector<Count>>& columns, int rows);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }

  Count& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  Count operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

  std::vector<Count> apply(std::span<const Count> v) const;
  std::vector<Count> column(int c) const;
  IntMatrix operator*(const IntMatrix& rhs) const;
  bool operator==(const IntMatrix&) const = default;

  bool strictly_positive() const;
  std::string to_string() const;

  void swap_rows(int a, int b);
  void swap_cols(int a, int b);
  // row[a] += factor * row[b]
  void add_row_multiple(int a, int b, Count factor);
  void add_col_multiple(int a, int b, Count factor);
  void negate_row(int r);

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Count> data_;
};

// U * A * V == D with U, V unimodular and D diagonal, d_i | d_{i+1}.
struct SmithForm {
  IntMatrix U;
  IntMatrix D;
  IntMatrix V;
  std::vector<Count> diagonal;  // nonzero invariant factors, in order
  int rank = 0;
};

SmithForm smith_normal_form(const IntMatrix& a);

/// Basis of {x in Z^cols : A x = 0}, one basis vector per column of the result.
IntMatrix integer_kernel(const IntMatrix& a);

/// Some integer solution of A x = b, or nullopt when none exists over Z.
std::optional<std::vector<Count>> solve_integer(const IntMatrix& a, std::span<const Count> b);

/// Independent columns spanning the same lattice as the columns of `generators`.
IntMatrix lattice_basis(const IntMatrix& generators);

struct QuotientStructure {
  std::vector<Count> torsion;  // invariant factors > 1
  int free_rank = 0;
  Count torsion_order() const;
};

/// Structure of L / S where L is spanned by the (independent) columns of `lattice`
/// and S by the columns of `sub`, which must lie in L.
QuotientStructure quotient_structure(const IntMatrix& lattice, const IntMatrix& sub);

}  // namespace cwac
