#include <doctest.h>

#include "dascof/zp.hpp"
#include "oracles.hpp"

using namespace dascof;

TEST_CASE("prime validation") {
  CHECK_THROWS_AS(PrimeField(1), std::invalid_argument);
  CHECK_THROWS_AS(PrimeField(4), std::invalid_argument);
  CHECK_THROWS_AS(PrimeField(249), std::invalid_argument);  // 3 * 83
  CHECK_NOTHROW(PrimeField(2));
  CHECK_NOTHROW(PrimeField(251));
  CHECK_NOTHROW(PrimeField(2147483647ULL));  // 2^31 - 1
}

TEST_CASE("natural map") {
  const PrimeField f5(5);
  CHECK(f5.natural_map(7) == 2);
  CHECK(f5.natural_map(-1) == 4);
  const PrimeField f251(251);
  CHECK(f251.natural_map(251) == 0);

  // ring homomorphism on Z
  Rng rng(42);
  const PrimeField f17(17);
  for (int t = 0; t < 200; ++t) {
    const long long a = static_cast<long long>(rng.next_below(20001)) - 10000;
    const long long b = static_cast<long long>(rng.next_below(20001)) - 10000;
    CHECK(f17.natural_map(a + b) == f17.add(f17.natural_map(a), f17.natural_map(b)));
    CHECK(f17.natural_map(a * b) == f17.mul(f17.natural_map(a), f17.natural_map(b)));
  }
}

TEST_CASE("rank examples") {
  const PrimeField f5(5);
  FieldMatrix m(2, 2);
  m << 1, 2, 2, 4;
  CHECK(rank(f5, m) == 1);  // second row is 2x first

  const PrimeField f2(2);
  FieldMatrix e(2, 2);
  e << 1, 1, 1, 1;
  CHECK(rank(f2, e) == 1);

  // random 5x5 over Z_17 with nonzero determinant (cofactor oracle)
  const PrimeField f17(17);
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    FieldMatrix r = oracles::random_field_matrix(f17, 5, 5, rng);
    if (oracles::det_mod_p(f17, r) == 0) continue;
    CHECK(rank(f17, r) == 5);
  }
}

TEST_CASE("rank matches all-minors oracle up to 4x4") {
  Rng rng(11);
  for (std::uint64_t p : {2ULL, 5ULL, 17ULL}) {
    const PrimeField f(p);
    for (int t = 0; t < 40; ++t) {
      const Eigen::Index rows = 1 + static_cast<Eigen::Index>(rng.next_below(4));
      const Eigen::Index cols = 1 + static_cast<Eigen::Index>(rng.next_below(4));
      const FieldMatrix m = oracles::random_field_matrix(f, rows, cols, rng);
      CHECK(rank(f, m) == oracles::rank_by_minors(f, m));
    }
  }
}

TEST_CASE("invert examples") {
  const PrimeField f5(5);
  FieldMatrix id3 = FieldMatrix::Identity(3, 3);
  CHECK(invert(f5, id3) == id3);

  FieldMatrix d(2, 2);
  d << 2, 0, 0, 3;
  FieldMatrix dinv(2, 2);
  dinv << 3, 0, 0, 2;
  CHECK(invert(f5, d) == dinv);

  const PrimeField f7(7);
  FieldMatrix u(2, 2);
  u << 1, 1, 0, 1;
  const FieldMatrix uinv = invert(f7, u);
  CHECK(matmul(f7, u, uinv) == FieldMatrix::Identity(2, 2));
  CHECK(uinv(0, 1) == 6);

  FieldMatrix sing(2, 2);
  sing << 1, 2, 2, 4;
  CHECK_THROWS_AS(invert(f5, sing), SingularMatrix);
}

TEST_CASE("inverse round-trip on random full-rank matrices") {
  Rng rng(3);
  for (std::uint64_t p : {2ULL, 5ULL, 17ULL, 251ULL}) {
    const PrimeField f(p);
    int done = 0;
    while (done < 100) {
      const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.next_below(5));
      const FieldMatrix m = oracles::random_field_matrix(f, n, n, rng);
      if (rank(f, m) != n) continue;
      const FieldMatrix minv = invert(f, m);
      CHECK(matmul(f, m, minv) == FieldMatrix::Identity(n, n));
      CHECK(matmul(f, minv, m) == FieldMatrix::Identity(n, n));
      ++done;
    }
  }
}

TEST_CASE("matvec and matmul") {
  const PrimeField f5(5);
  FieldMatrix q(2, 2);
  q << 1, 2, 3, 4;
  const FieldMatrix qinv = invert(f5, q);
  FieldVector w(2);
  w << 1, 4;
  CHECK(matvec(f5, q, matvec(f5, qinv, w)) == w);

  // row l of Q times Q^-1 w recovers w_l, exhaustively over random w
  const PrimeField f17(17);
  Rng rng(5);
  FieldMatrix big;
  do {
    big = oracles::random_field_matrix(f17, 5, 5, rng);
  } while (rank(f17, big) != 5);
  const FieldMatrix biginv = invert(f17, big);
  for (int t = 0; t < 100; ++t) {
    FieldVector v(5);
    for (Eigen::Index i = 0; i < 5; ++i) v(i) = rng.next_below(17);
    const FieldVector mu = matvec(f17, biginv, v);
    for (Eigen::Index l = 0; l < 5; ++l) {
      const FieldVector row = big.row(l).transpose();
      CHECK(dot(f17, row, mu) == v(l));
    }
  }

  const PrimeField f2(2);
  FieldMatrix x(1, 2);
  x << 1, 1;
  FieldVector ones(2);
  ones << 1, 1;
  CHECK(matvec(f2, x, ones)(0) == 0);  // XOR

  FieldMatrix bad(2, 3);
  bad.setZero();
  CHECK_THROWS_AS(matvec(f2, bad, ones), DimensionMismatch);
  CHECK_THROWS_AS(matmul(f2, bad, bad), DimensionMismatch);
}

TEST_CASE("linear code interface") {
  const PrimeField f5(5);
  const LinearCode id = LinearCode::identity(3);
  FieldVector info(3);
  info << 1, 4, 2;
  CHECK(id.encode(f5, info) == info);

  LinearCode rep;
  rep.k = 1;
  rep.n = 2;
  rep.generator = FieldMatrix(1, 2);
  rep.generator << 1, 3;
  FieldVector one(1);
  one << 2;
  const FieldVector coded = rep.encode(f5, one);
  CHECK(coded(0) == 2);
  CHECK(coded(1) == 1);  // 2 * 3 mod 5
}
