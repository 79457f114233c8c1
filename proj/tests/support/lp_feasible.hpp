#pragma once

// Test-only oracle: exact rational phase-1 simplex deciding whether x is a
// convex combination of the uniform k-subset vectors v_S. Independent of the
// greedy peel in the library.

#include <vector>

#include "regforge/rational.hpp"

namespace regforge::testsupport {

inline bool next_subset(std::vector<int>& c, int n) {
  int k = static_cast<int>(c.size());
  for (int i = k - 1; i >= 0; --i) {
    if (c[i] < n - (k - i)) {
      ++c[i];
      for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

// Phase-1 simplex with Bland's rule; returns true iff the system
// {sum_S c_S v_S = x, sum_S c_S = 1, c >= 0} is feasible.
inline bool convex_combination_feasible(const std::vector<Rat>& x, int k) {
  const int n = static_cast<int>(x.size());
  const int rows = n + 1;

  // Columns: one per k-subset, then one artificial per row.
  std::vector<std::vector<Rat>> cols;
  std::vector<int> sub(k);
  for (int i = 0; i < k; ++i) sub[i] = i;
  Rat unit = frac(1, k);
  do {
    std::vector<Rat> col(rows, Rat(0));
    for (int i : sub) col[i] = unit;
    col[n] = 1;
    cols.push_back(col);
  } while (next_subset(sub, n));
  const int real_cols = static_cast<int>(cols.size());

  std::vector<Rat> b(rows);
  for (int i = 0; i < n; ++i) b[i] = x[i];
  b[n] = 1;
  for (int i = 0; i < rows; ++i)
    if (b[i] < 0) return false;  // all rhs entries are nonnegative here anyway

  // Tableau: rows x (real_cols + rows artificials | rhs).
  const int total_cols = real_cols + rows;
  std::vector<std::vector<Rat>> T(rows, std::vector<Rat>(total_cols + 1, Rat(0)));
  std::vector<int> basis(rows);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < real_cols; ++j) T[i][j] = cols[j][i];
    T[i][real_cols + i] = 1;
    T[i][total_cols] = b[i];
    basis[i] = real_cols + i;
  }
  // Phase-1 objective: minimize the sum of artificials. Reduced cost row.
  std::vector<Rat> z(total_cols + 1, Rat(0));
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j <= total_cols; ++j) z[j] += T[i][j];
  for (int i = 0; i < rows; ++i) z[real_cols + i] -= 1;  // cost of artificials

  for (;;) {
    // Bland: first column with positive reduced cost among real columns.
    int enter = -1;
    for (int j = 0; j < real_cols; ++j)
      if (z[j] > 0) {
        enter = j;
        break;
      }
    if (enter < 0) break;
    int leave = -1;
    Rat best;
    for (int i = 0; i < rows; ++i) {
      if (T[i][enter] <= 0) continue;
      Rat ratio = T[i][total_cols] / T[i][enter];
      if (leave < 0 || ratio < best ||
          (ratio == best && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave < 0) break;  // unbounded (cannot happen: simplex of a polytope)
    Rat piv = T[leave][enter];
    for (int j = 0; j <= total_cols; ++j) T[leave][j] /= piv;
    for (int i = 0; i < rows; ++i) {
      if (i == leave || T[i][enter] == 0) continue;
      Rat f = T[i][enter];
      for (int j = 0; j <= total_cols; ++j) T[i][j] -= f * T[leave][j];
    }
    Rat fz = z[enter];
    for (int j = 0; j <= total_cols; ++j) z[j] -= fz * T[leave][j];
    basis[leave] = enter;
  }
  return z[total_cols] == 0;  // artificial mass driven to zero
}

}  // namespace regforge::testsupport
