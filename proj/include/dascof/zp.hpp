#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

#include "dascof/errors.hpp"

namespace dascof {

using FieldElem = std::uint64_t;
using FieldMatrix = Eigen::Matrix<FieldElem, Eigen::Dynamic, Eigen::Dynamic>;
using FieldVector = Eigen::Matrix<FieldElem, Eigen::Dynamic, 1>;
using IntMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;
using IntVector = Eigen::Matrix<long long, Eigen::Dynamic, 1>;

namespace detail {

inline std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t powmod_u64(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t acc = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) acc = mulmod_u64(acc, base, m);
    base = mulmod_u64(base, base, m);
    exp >>= 1;
  }
  return acc;
}

}  // namespace detail

// Deterministic Miller-Rabin, valid for all 64-bit inputs with this base set.
inline bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % q == 0) return n == q;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = detail::powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int r = 1; r < s; ++r) {
      x = detail::mulmod_u64(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

// The field Z_p with its natural map g onto {0, ..., p-1}. The modulus may be
// any word-sized prime; products are reduced through 128-bit intermediates,
// so no overflow is possible for p < 2^64.
class PrimeField {
 public:
  explicit PrimeField(std::uint64_t p) : p_(p) {
    if (!is_prime_u64(p)) throw std::invalid_argument("PrimeField: modulus " + std::to_string(p) + " is not prime");
  }

  std::uint64_t modulus() const { return p_; }

  // g^-1([z] mod pZ): the unique u in Z_p congruent to z.
  FieldElem natural_map(long long z) const {
    const long long p = static_cast<long long>(p_);
    long long r = z % p;
    if (r < 0) r += p;
    return static_cast<FieldElem>(r);
  }

  FieldElem add(FieldElem a, FieldElem b) const {
    const FieldElem s = a + b;  // p < 2^63 assumed safe via natural_map range; guard anyway
    return s >= p_ || s < a ? s - p_ : s;
  }

  FieldElem sub(FieldElem a, FieldElem b) const { return a >= b ? a - b : a + p_ - b; }

  FieldElem neg(FieldElem a) const { return a == 0 ? 0 : p_ - a; }

  FieldElem mul(FieldElem a, FieldElem b) const { return detail::mulmod_u64(a, b, p_); }

  FieldElem pow(FieldElem a, std::uint64_t e) const { return detail::powmod_u64(a, e, p_); }

  FieldElem inv(FieldElem a) const {
    if (a == 0) throw SingularMatrix("PrimeField::inv: zero has no inverse");
    return pow(a, p_ - 2);
  }

 private:
  std::uint64_t p_;
};

// Entrywise natural map of an integer matrix into Z_p.
inline FieldMatrix to_field(const PrimeField& field, const IntMatrix& a) {
  FieldMatrix q(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) q(i, j) = field.natural_map(a(i, j));
  return q;
}

// Row rank over Z_p by Gaussian elimination with exact modular inverses.
// Pivots on the first nonzero entry in column order.
inline Eigen::Index rank(const PrimeField& field, FieldMatrix m) {
  const Eigen::Index rows = m.rows(), cols = m.cols();
  Eigen::Index r = 0;
  for (Eigen::Index c = 0; c < cols && r < rows; ++c) {
    Eigen::Index pivot = -1;
    for (Eigen::Index i = r; i < rows; ++i) {
      if (m(i, c) != 0) {
        pivot = i;
        break;
      }
    }
    if (pivot < 0) continue;
    m.row(r).swap(m.row(pivot));
    const FieldElem scale = field.inv(m(r, c));
    for (Eigen::Index j = c; j < cols; ++j) m(r, j) = field.mul(m(r, j), scale);
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (i == r || m(i, c) == 0) continue;
      const FieldElem f = m(i, c);
      for (Eigen::Index j = c; j < cols; ++j) m(i, j) = field.sub(m(i, j), field.mul(f, m(r, j)));
    }
    ++r;
  }
  return r;
}

// Inverse over Z_p via Gauss-Jordan on [M | I]. Throws SingularMatrix when
// rank < dimension (rank-deficient system matrix; the caller falls back to
// scheduling or declares outage).
inline FieldMatrix invert(const PrimeField& field, const FieldMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("invert: matrix must be square");
  const Eigen::Index n = m.rows();
  FieldMatrix work = m;
  FieldMatrix inv = FieldMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) inv(i, i) = 1;
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index pivot = -1;
    for (Eigen::Index i = c; i < n; ++i) {
      if (work(i, c) != 0) {
        pivot = i;
        break;
      }
    }
    if (pivot < 0) throw SingularMatrix("invert: matrix is singular over Z_p");
    work.row(c).swap(work.row(pivot));
    inv.row(c).swap(inv.row(pivot));
    const FieldElem scale = field.inv(work(c, c));
    for (Eigen::Index j = 0; j < n; ++j) {
      work(c, j) = field.mul(work(c, j), scale);
      inv(c, j) = field.mul(inv(c, j), scale);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == c || work(i, c) == 0) continue;
      const FieldElem f = work(i, c);
      for (Eigen::Index j = 0; j < n; ++j) {
        work(i, j) = field.sub(work(i, j), field.mul(f, work(c, j)));
        inv(i, j) = field.sub(inv(i, j), field.mul(f, inv(c, j)));
      }
    }
  }
  return inv;
}

inline FieldMatrix matmul(const PrimeField& field, const FieldMatrix& a, const FieldMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("matmul: inner dimensions disagree");
  FieldMatrix out = FieldMatrix::Zero(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
      if (a(i, k) == 0) continue;
      for (Eigen::Index j = 0; j < b.cols(); ++j)
        out(i, j) = field.add(out(i, j), field.mul(a(i, k), b(k, j)));
    }
  return out;
}

inline FieldVector matvec(const PrimeField& field, const FieldMatrix& a, const FieldVector& x) {
  if (a.cols() != x.size()) throw DimensionMismatch("matvec: dimensions disagree");
  FieldVector out = FieldVector::Zero(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out(i) = field.add(out(i), field.mul(a(i, j), x(j)));
  return out;
}

inline FieldElem dot(const PrimeField& field, const FieldVector& a, const FieldVector& b) {
  if (a.size() != b.size()) throw DimensionMismatch("dot: dimensions disagree");
  FieldElem acc = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) acc = field.add(acc, field.mul(a(i), b(i)));
  return acc;
}

// Linear code over Z_p given by a k x n generator matrix. The identity code
// (k = n, G = I) makes every information symbol its own code symbol; block
// codes plug in through the same interface.
struct LinearCode {
  Eigen::Index k = 0;
  Eigen::Index n = 0;
  FieldMatrix generator;  // empty means identity
  bool is_identity() const { return generator.size() == 0; }

  static LinearCode identity(Eigen::Index length) { return LinearCode{length, length, {}}; }

  FieldVector encode(const PrimeField& field, const FieldVector& info) const {
    if (info.size() != k) throw DimensionMismatch("LinearCode::encode: info length != k");
    if (is_identity()) return info;
    FieldVector out = FieldVector::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < k; ++i)
        out(j) = field.add(out(j), field.mul(info(i), generator(i, j)));
    return out;
  }
};

}  // namespace dascof
