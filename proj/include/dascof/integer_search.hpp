#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "dascof/errors.hpp"
#include "dascof/zp.hpp"

namespace dascof {

// Columns generate the lattice. Construction rejects numerically dependent
// columns: the column-normalized matrix must have smallest singular value
// above 1e-10.
struct LatticeBasis {
  Eigen::MatrixXd generator;

  explicit LatticeBasis(Eigen::MatrixXd g) : generator(std::move(g)) {
    if (generator.rows() != generator.cols() || generator.cols() == 0)
      throw DegenerateBasis("LatticeBasis: generator must be square and nonempty");
    Eigen::MatrixXd scaled = generator;
    for (Eigen::Index c = 0; c < scaled.cols(); ++c) {
      const double norm = scaled.col(c).norm();
      if (!(norm > 0.0)) throw DegenerateBasis("LatticeBasis: zero column");
      scaled.col(c) /= norm;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled);
    if (svd.singularValues().minCoeff() <= 1e-10)
      throw DegenerateBasis("LatticeBasis: columns are numerically dependent");
  }

  Eigen::Index dim() const { return generator.cols(); }
};

struct LllResult {
  Eigen::MatrixXd basis;    // generator * unimodular
  IntMatrix unimodular;     // exact integer transform, |det| = 1
};

// Exact determinant of an integer matrix (Bareiss, 128-bit intermediates).
inline long long integer_determinant(const IntMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("integer_determinant: matrix must be square");
  const Eigen::Index n = m.rows();
  std::vector<std::vector<__int128>> w(n, std::vector<__int128>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) w[i][j] = m(i, j);
  __int128 prev = 1;
  int sign = 1;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    if (w[k][k] == 0) {
      Eigen::Index pivot = -1;
      for (Eigen::Index i = k + 1; i < n; ++i)
        if (w[i][k] != 0) {
          pivot = i;
          break;
        }
      if (pivot < 0) return 0;
      std::swap(w[k], w[pivot]);
      sign = -sign;
    }
    for (Eigen::Index i = k + 1; i < n; ++i)
      for (Eigen::Index j = k + 1; j < n; ++j)
        w[i][j] = (w[i][j] * w[k][k] - w[i][k] * w[k][j]) / prev;
    prev = w[k][k];
  }
  return static_cast<long long>(sign * w[n - 1][n - 1]);
}

namespace detail {

inline void gram_schmidt(const Eigen::MatrixXd& b, Eigen::MatrixXd& mu, Eigen::VectorXd& norm2) {
  const Eigen::Index n = b.cols();
  Eigen::MatrixXd star = b;
  mu.setZero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      mu(i, j) = b.col(i).dot(star.col(j)) / norm2(j);
      star.col(i) -= mu(i, j) * star.col(j);
    }
    norm2(i) = star.col(i).squaredNorm();
  }
}

}  // namespace detail

// LLL reduction of the basis columns. Returns the reduced basis together with
// the exact unimodular transform U such that basis = generator * U; the
// output satisfies the size-reduction and Lovasz conditions for the given
// delta and generates the same lattice.
inline LllResult lll_reduce(const LatticeBasis& input, double delta = 0.75) {
  if (!(delta > 0.25 && delta < 1.0)) throw std::invalid_argument("lll_reduce: delta must lie in (1/4, 1)");
  const Eigen::Index n = input.dim();
  Eigen::MatrixXd b = input.generator;
  IntMatrix u = IntMatrix::Identity(n, n);
  Eigen::MatrixXd mu(n, n);
  Eigen::VectorXd norm2(n);
  detail::gram_schmidt(b, mu, norm2);

  Eigen::Index k = 1;
  long long guard = 0;
  while (k < n) {
    if (++guard > 20'000'000) throw std::runtime_error("lll_reduce: iteration guard tripped");
    for (Eigen::Index j = k - 1; j >= 0; --j) {
      const long long q = std::llround(mu(k, j));
      if (q == 0) continue;
      const double qd = static_cast<double>(q);
      b.col(k) -= qd * b.col(j);
      u.col(k) -= q * u.col(j);
      for (Eigen::Index i = 0; i < j; ++i) mu(k, i) -= qd * mu(j, i);
      mu(k, j) -= qd;
    }
    if (norm2(k) >= (delta - mu(k, k - 1) * mu(k, k - 1)) * norm2(k - 1)) {
      ++k;
    } else {
      b.col(k).swap(b.col(k - 1));
      u.col(k).swap(u.col(k - 1));
      detail::gram_schmidt(b, mu, norm2);
      k = std::max<Eigen::Index>(k - 1, 1);
    }
  }
  return LllResult{std::move(b), std::move(u)};
}

namespace detail {

// Flip sign so the first nonzero entry is positive.
inline void canonicalize_sign(IntVector& z) {
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (z(i) != 0) {
      if (z(i) < 0) z = -z;
      return;
    }
  }
}

inline bool lex_less(const IntVector& a, const IntVector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) != b(i)) return a(i) < b(i);
  }
  return false;
}

// Upper-triangular factor with positive diagonal; ||G z|| = ||R z||.
inline Eigen::MatrixXd r_factor(const Eigen::MatrixXd& g) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd r = qr.matrixQR().topRows(g.cols()).triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < r.rows(); ++i)
    if (r(i, i) < 0) r.row(i) = -r.row(i);
  return r;
}

// Schnorr-Euchner depth-first enumeration of nonzero integer points with
// ||R z||^2 <= bound2. The visitor receives (z, norm2) and may return a new
// (smaller) bound to keep searching under.
template <typename Visitor>
void se_enumerate(const Eigen::MatrixXd& r, double bound2, Visitor&& visit) {
  const Eigen::Index n = r.cols();
  IntVector z = IntVector::Zero(n);
  std::vector<double> partial(static_cast<std::size_t>(n) + 1, 0.0);

  // Recursion over levels n-1 .. 0; candidates per level are visited in
  // nondecreasing distance from the real-valued center, so the first bound
  // violation prunes the whole subtree.
  auto recurse = [&](auto&& self, Eigen::Index level) -> void {
    double center = 0.0;
    for (Eigen::Index j = level + 1; j < n; ++j) center -= r(level, j) * static_cast<double>(z(j));
    center /= r(level, level);
    long long zi = std::llround(center);
    long long step = (center >= static_cast<double>(zi)) ? 1 : -1;
    for (;;) {
      const double offset = r(level, level) * (static_cast<double>(zi) - center);
      const double norm2 = partial[static_cast<std::size_t>(level) + 1] + offset * offset;
      if (norm2 > bound2) break;
      z(level) = zi;
      if (level == 0) {
        if ((z.array() != 0).any()) {
          const double updated = visit(z, norm2);
          bound2 = std::min(bound2, updated);
        }
      } else {
        partial[static_cast<std::size_t>(level)] = norm2;
        self(self, level - 1);
      }
      // zig-zag: center, center+s, center-s, center+2s, ...
      zi += step;
      step = -step - (step > 0 ? 1 : -1);
      z(level) = 0;
    }
  };
  recurse(recurse, n - 1);
}

}  // namespace detail

// Exact shortest nonzero lattice point within the sphere of the given radius,
// as a coordinate vector in the supplied basis. Equal-norm ties resolve to
// the lexicographically smallest vector whose first nonzero entry is
// positive. Throws EmptySphere when no nonzero point lies inside.
inline IntVector shortest_vector_enumerate(const LatticeBasis& basis, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("shortest_vector_enumerate: radius must be positive");
  const Eigen::MatrixXd r = detail::r_factor(basis.generator);
  const double scale = radius * radius;
  double best2 = scale * (1.0 + 1e-12);
  bool found = false;
  IntVector best;
  detail::se_enumerate(r, best2, [&](const IntVector& z, double norm2) {
    IntVector cand = z;
    detail::canonicalize_sign(cand);
    if (!found || norm2 < best2 - 1e-12 * scale) {
      best = cand;
      best2 = norm2;
      found = true;
    } else if (std::abs(norm2 - best2) <= 1e-12 * scale && detail::lex_less(cand, best)) {
      best = cand;
    }
    return best2 + 1e-12 * scale;  // keep ties visitable
  });
  if (!found) throw EmptySphere("shortest_vector_enumerate: no nonzero point within radius");
  return best;
}

// All nonzero lattice points with norm <= radius, de-duplicated up to sign,
// sorted by (norm, lexicographic order), truncated to max_count.
inline std::vector<IntVector> enumerate_short_vectors(const LatticeBasis& basis, double radius,
                                                      std::size_t max_count) {
  const Eigen::MatrixXd r = detail::r_factor(basis.generator);
  const double bound2 = radius * radius * (1.0 + 1e-12);
  std::vector<std::pair<double, IntVector>> hits;
  detail::se_enumerate(r, bound2, [&](const IntVector& z, double norm2) {
    IntVector cand = z;
    detail::canonicalize_sign(cand);
    hits.emplace_back(norm2, std::move(cand));
    return bound2;
  });
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return detail::lex_less(a.second, b.second);
  });
  std::vector<IntVector> out;
  for (auto& [norm2, z] : hits) {
    if (!out.empty() && (out.back().array() == z.array()).all()) continue;  // sign duplicates
    out.push_back(std::move(z));
    if (out.size() >= max_count) break;
  }
  return out;
}

struct CoeffSearchOptions {
  double delta = 0.75;
  // Exact enumeration refinement after LLL runs when the (support-restricted)
  // dimension is at most this; 0 disables it.
  Eigen::Index enumeration_dim_limit = 8;
};

// Integer coefficient vector minimizing a^T (SNR^-1 I + h h^T)^-1 a over
// nonzero a. The quadratic form is ||C a||^2 for C the inverse Cholesky
// factor of SNR^-1 I + h h^T, so the minimizer is the shortest vector of the
// lattice generated by C; LLL supplies the search radius, enumeration makes
// it exact. Entries of a outside the support of h only add power, so the
// search restricts to the support.
inline IntVector best_coeff_qcof(const Eigen::VectorXd& h, double snr, std::uint64_t p,
                                 const CoeffSearchOptions& opts = {}) {
  if (!(snr > 0.0)) throw std::invalid_argument("best_coeff_qcof: snr must be positive");
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < h.size(); ++i)
    if (h(i) != 0.0) support.push_back(i);
  if (support.empty()) throw std::invalid_argument("best_coeff_qcof: h must be nonzero");

  const Eigen::Index d = static_cast<Eigen::Index>(support.size());
  Eigen::VectorXd hs(d);
  for (Eigen::Index i = 0; i < d; ++i) hs(i) = h(support[static_cast<std::size_t>(i)]);

  Eigen::MatrixXd m = hs * hs.transpose();
  m.diagonal().array() += 1.0 / snr;
  const Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw std::runtime_error("best_coeff_qcof: Cholesky failed");
  // C = L^-1 by triangular solve; sigma^2(a) = ||C a||^2.
  Eigen::MatrixXd c = Eigen::MatrixXd::Identity(d, d);
  llt.matrixL().solveInPlace(c);

  const LatticeBasis lattice(c);
  const LllResult red = lll_reduce(lattice, opts.delta);

  Eigen::Index best_col = 0;
  double best_norm = red.basis.col(0).norm();
  for (Eigen::Index j = 1; j < d; ++j) {
    const double norm = red.basis.col(j).norm();
    if (norm < best_norm) {
      best_norm = norm;
      best_col = j;
    }
  }
  IntVector a_support = red.unimodular.col(best_col);
  if (d <= opts.enumeration_dim_limit && opts.enumeration_dim_limit > 0) {
    const LatticeBasis reduced(red.basis);
    const IntVector z = shortest_vector_enumerate(reduced, best_norm * (1.0 + 1e-9));
    a_support = red.unimodular * z;
  }
  detail::canonicalize_sign(a_support);

  IntVector a = IntVector::Zero(h.size());
  for (Eigen::Index i = 0; i < d; ++i) a(support[static_cast<std::size_t>(i)]) = a_support(i);

  // A shortest vector cannot have every entry divisible by p: dividing by p
  // would yield a strictly shorter nonzero vector.
  bool zero_mod_p = true;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a(i) % static_cast<long long>(p) != 0) zero_mod_p = false;
  if (zero_mod_p) throw std::runtime_error("best_coeff_qcof: candidate reduced to the zero row");
  return a;
}

// Rows a_l together with their reduction Q = [A] mod p.
struct IntegerCoeffMatrix {
  IntMatrix a_rows;   // L x L, row l is a_l^T
  FieldMatrix q;      // entrywise natural map of a_rows
  bool full_rank = false;
};

struct IfbfOptions {
  double delta = 0.75;
  std::size_t candidate_budget = 100;
};

// Coefficient rows for integer-forcing beamforming: minimize
// max_l ||H^-1 a_l||^2 subject to Q full rank over Z_p. The rows are the
// columns of the unimodular transform that LLL-reduces the basis H^-1; being
// unimodular they are always independent over the reals, and det = +-1 keeps
// Q invertible mod p. Should the rank test ever fail, progressively longer
// enumeration candidates are tried up to the budget before giving up.
inline IntegerCoeffMatrix ifbf_coeffs(const Eigen::MatrixXd& h, std::uint64_t p,
                                      const IfbfOptions& opts = {}) {
  if (h.rows() != h.cols()) throw DimensionMismatch("ifbf_coeffs: H must be square");
  const Eigen::Index n = h.rows();
  {
    Eigen::MatrixXd scaled = h;
    for (Eigen::Index c = 0; c < n; ++c) {
      const double norm = scaled.col(c).norm();
      if (!(norm > 0.0)) throw SingularChannel("ifbf_coeffs: H has a zero column");
      scaled.col(c) /= norm;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled);
    if (svd.singularValues().minCoeff() <= 1e-10)
      throw SingularChannel("ifbf_coeffs: H is not invertible");
  }
  const Eigen::MatrixXd hinv = h.partialPivLu().solve(Eigen::MatrixXd::Identity(n, n));

  LllResult red = [&] {
    try {
      return lll_reduce(LatticeBasis(hinv), opts.delta);
    } catch (const DegenerateBasis&) {
      throw SingularChannel("ifbf_coeffs: H^-1 is numerically degenerate");
    }
  }();

  const PrimeField field(p);
  IntegerCoeffMatrix out;
  out.a_rows = red.unimodular.transpose();
  out.q = to_field(field, out.a_rows);
  out.full_rank = rank(field, out.q) == n;
  if (out.full_rank) return out;

  // Fallback: greedily assemble rows from the shortest lattice vectors that
  // keep growing the Z_p rank.
  double radius = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) radius = std::max(radius, red.basis.col(j).norm());
  const LatticeBasis lattice(hinv);
  std::vector<IntVector> cands;
  for (int attempt = 0; attempt < 4 && cands.size() < opts.candidate_budget; ++attempt) {
    cands = enumerate_short_vectors(lattice, radius * (1.0 + 1e-9), opts.candidate_budget);
    radius *= 1.5;
  }
  IntMatrix rows = IntMatrix::Zero(n, n);
  FieldMatrix qrows = FieldMatrix::Zero(n, n);
  Eigen::Index got = 0;
  for (const IntVector& z : cands) {
    rows.row(got) = z.transpose();
    for (Eigen::Index j = 0; j < n; ++j) qrows(got, j) = field.natural_map(z(j));
    if (rank(field, qrows.topRows(got + 1)) == got + 1) {
      ++got;
      if (got == n) break;
    }
  }
  if (got < n) throw RankDeficient("ifbf_coeffs: no full-rank coefficient matrix within budget");
  out.a_rows = rows;
  out.q = qrows;
  out.full_rank = true;
  return out;
}

}  // namespace dascof
