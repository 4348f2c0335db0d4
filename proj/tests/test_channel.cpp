#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "dascof/channel.hpp"

using namespace dascof;

TEST_CASE("soft handoff matrix structure") {
  Rng rng(1);
  SoftHandoffParams params{3, GammaSpec::fixed(0.7)};
  const Eigen::MatrixXcd h = soft_handoff_matrix(params, rng);
  Eigen::MatrixXd expected(3, 3);
  expected << 1, 0, 0, 0.7, 1, 0, 0, 0.7, 1;
  CHECK((h.real() - expected).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  CHECK(h.imag().cwiseAbs().maxCoeff() == doctest::Approx(0.0));

  SoftHandoffParams none{4, GammaSpec::fixed(0.0)};
  CHECK(soft_handoff_matrix(none, rng).real() == Eigen::MatrixXd::Identity(4, 4));
}

TEST_CASE("soft handoff is always invertible") {
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    SoftHandoffParams params{5, GammaSpec::uniform(0.0, 1.0)};
    const Eigen::MatrixXcd h = soft_handoff_matrix(params, rng);
    CHECK(std::abs(h.determinant()) == doctest::Approx(1.0));
  }
}

TEST_CASE("gamma draw modes") {
  SoftHandoffParams per_entry{4, GammaSpec::uniform(0.2, 0.9, GammaSpec::Draw::per_entry)};
  Rng rng(3);
  const Eigen::MatrixXcd h = soft_handoff_matrix(per_entry, rng);
  // per-entry draws differ with overwhelming probability
  CHECK(h(1, 0).real() != h(2, 1).real());

  SoftHandoffParams per_trial{4, GammaSpec::uniform(0.2, 0.9, GammaSpec::Draw::per_trial)};
  const Eigen::MatrixXcd g = soft_handoff_matrix(per_trial, rng);
  CHECK(g(1, 0).real() == doctest::Approx(g(2, 1).real()));
  CHECK(g(2, 1).real() == doctest::Approx(g(3, 2).real()));

  CHECK_THROWS_AS(GammaSpec::fixed(1.5), std::invalid_argument);
  CHECK_THROWS_AS(GammaSpec::uniform(0.5, 1.2), std::invalid_argument);
}

TEST_CASE("rayleigh matrix statistics and determinism") {
  Rng rng(11);
  const Eigen::Index k = 40, l = 25;
  const int trials = 40;
  double sum = 0.0, sumsq = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Eigen::MatrixXd h = rayleigh_matrix(k, l, rng);
    sum += h.sum();
    sumsq += h.cwiseProduct(h).sum();
  }
  const double n = static_cast<double>(k * l * trials);
  CHECK(std::abs(sum / n) < 4.0 / std::sqrt(n));
  CHECK(sumsq / n == doctest::Approx(1.0).epsilon(0.05));

  Rng r1(77), r2(77);
  CHECK(rayleigh_matrix(6, 4, r1) == rayleigh_matrix(6, 4, r2));  // bit-identical
}

TEST_CASE("complex to real expansion") {
  // real-valued input: block-diagonal duplication
  Eigen::MatrixXcd hr(2, 2);
  hr << 1.0, 0.5, 0.25, 2.0;
  const Eigen::MatrixXd er = complex_to_real(hr);
  CHECK(er.topLeftCorner(2, 2) == hr.real());
  CHECK(er.bottomRightCorner(2, 2) == hr.real());
  CHECK(er.topRightCorner(2, 2).cwiseAbs().maxCoeff() == 0.0);

  // 1x1 imaginary unit
  Eigen::MatrixXcd imag(1, 1);
  imag(0, 0) = std::complex<double>(0.0, 1.0);
  Eigen::MatrixXd rot(2, 2);
  rot << 0, -1, 1, 0;
  CHECK(complex_to_real(imag) == rot);

  // unitary input expands to an orthogonal matrix
  Eigen::MatrixXcd u(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  u << std::complex<double>(s, 0), std::complex<double>(0, s), std::complex<double>(0, s),
      std::complex<double>(s, 0);
  const Eigen::MatrixXd eu = complex_to_real(u);
  CHECK((eu.transpose() * eu - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("complex to real is a ring homomorphism") {
  Rng rng(5);
  for (int t = 0; t < 30; ++t) {
    Eigen::MatrixXcd a(3, 3), b(3, 3);
    for (Eigen::Index i = 0; i < 3; ++i)
      for (Eigen::Index j = 0; j < 3; ++j) {
        a(i, j) = std::complex<double>(rng.next_normal(), rng.next_normal());
        b(i, j) = std::complex<double>(rng.next_normal(), rng.next_normal());
      }
    const Eigen::MatrixXd lhs = complex_to_real((a * b).eval());
    const Eigen::MatrixXd rhs = complex_to_real(a) * complex_to_real(b);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("trials reproduce from seed and index") {
  for (std::uint64_t trial : {0ULL, 5ULL, 99ULL}) {
    Rng a = Rng::for_stream(42, trial);
    Rng b = Rng::for_stream(42, trial);
    const Eigen::MatrixXd ha = rayleigh_matrix(4, 3, a);
    const Eigen::MatrixXd hb = rayleigh_matrix(4, 3, b);
    CHECK(ha == hb);
  }
  Rng c = Rng::for_stream(42, 0);
  Rng d = Rng::for_stream(42, 1);
  CHECK(rayleigh_matrix(4, 3, c) != rayleigh_matrix(4, 3, d));
}
