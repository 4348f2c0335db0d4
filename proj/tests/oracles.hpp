#pragma once

// Test-side oracles, kept independent of the library's implementation paths.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "dascof/rng.hpp"
#include "dascof/zp.hpp"

namespace oracles {

// Determinant over Z_p by cofactor expansion.
inline std::uint64_t det_mod_p(const dascof::PrimeField& f, const dascof::FieldMatrix& m) {
  const Eigen::Index n = m.rows();
  if (n == 1) return m(0, 0);
  std::uint64_t acc = 0;
  bool negate = false;
  for (Eigen::Index c = 0; c < n; ++c) {
    dascof::FieldMatrix minor(n - 1, n - 1);
    for (Eigen::Index i = 1; i < n; ++i) {
      Eigen::Index out = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == c) continue;
        minor(i - 1, out++) = m(i, j);
      }
    }
    const std::uint64_t term = f.mul(m(0, c), det_mod_p(f, minor));
    acc = negate ? f.sub(acc, term) : f.add(acc, term);
    negate = !negate;
  }
  return acc;
}

// Rank over Z_p as the largest k with a nonzero k x k minor.
inline Eigen::Index rank_by_minors(const dascof::PrimeField& f, const dascof::FieldMatrix& m) {
  const Eigen::Index rows = m.rows(), cols = m.cols();
  auto combos = [](Eigen::Index n, Eigen::Index k) {
    std::vector<std::vector<Eigen::Index>> all;
    std::vector<Eigen::Index> cur(static_cast<std::size_t>(k));
    auto rec = [&](auto&& self, Eigen::Index depth, Eigen::Index start) -> void {
      if (depth == k) {
        all.push_back(cur);
        return;
      }
      for (Eigen::Index i = start; i < n; ++i) {
        cur[static_cast<std::size_t>(depth)] = i;
        self(self, depth + 1, i + 1);
      }
    };
    if (k <= n) rec(rec, 0, 0);
    return all;
  };

  for (Eigen::Index k = std::min(rows, cols); k >= 1; --k) {
    for (const auto& rsel : combos(rows, k)) {
      for (const auto& csel : combos(cols, k)) {
        dascof::FieldMatrix sub(k, k);
        for (Eigen::Index i = 0; i < k; ++i)
          for (Eigen::Index j = 0; j < k; ++j)
            sub(i, j) = m(rsel[static_cast<std::size_t>(i)], csel[static_cast<std::size_t>(j)]);
        if (det_mod_p(f, sub) != 0) return k;
      }
    }
  }
  return 0;
}

inline dascof::FieldMatrix random_field_matrix(const dascof::PrimeField& f, Eigen::Index rows,
                                               Eigen::Index cols, dascof::Rng& rng) {
  dascof::FieldMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.next_below(f.modulus());
  return m;
}

// Exhaustive shortest nonzero lattice vector by scanning the coordinate box
// ||z||_inf <= bound. Valid whenever the true shortest vector's coordinates
// fit the box (guaranteed for the small well-reduced bases tests use).
inline double brute_force_shortest_norm(const Eigen::MatrixXd& basis, long long bound) {
  const Eigen::Index n = basis.cols();
  Eigen::VectorXd best(n);
  double best_norm2 = -1.0;
  Eigen::VectorXi z = Eigen::VectorXi::Zero(n);
  std::vector<long long> idx(static_cast<std::size_t>(n), -bound);
  for (;;) {
    bool zero = true;
    for (auto v : idx)
      if (v != 0) zero = false;
    if (!zero) {
      Eigen::VectorXd zz(n);
      for (Eigen::Index i = 0; i < n; ++i) zz(i) = static_cast<double>(idx[static_cast<std::size_t>(i)]);
      const double norm2 = (basis * zz).squaredNorm();
      if (best_norm2 < 0.0 || norm2 < best_norm2) best_norm2 = norm2;
    }
    Eigen::Index carry = 0;
    while (carry < n) {
      if (++idx[static_cast<std::size_t>(carry)] <= bound) break;
      idx[static_cast<std::size_t>(carry)] = -bound;
      ++carry;
    }
    if (carry == n) break;
  }
  return std::sqrt(best_norm2);
}

}  // namespace oracles
