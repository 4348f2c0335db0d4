#pragma once

#include <Eigen/Core>
#include <cmath>
#include <limits>

#include "dascof/lattice.hpp"

namespace dascof {

// sigma_eps^2 = a^T (SNR^-1 I + h h^T)^-1 a, evaluated through the
// matrix-inversion lemma: snr ||a||^2 - snr^2 (h.a)^2 / (1 + snr ||h||^2).
// This is the minimum over alpha of E|alpha y - a^T x|^2 for unit-variance
// noise and per-dimension power snr.
template <typename DerivedH, typename DerivedA>
double effective_variance(const Eigen::MatrixBase<DerivedH>& h, const Eigen::MatrixBase<DerivedA>& a,
                          double snr) {
  static_assert(std::is_floating_point_v<typename DerivedH::Scalar>);
  if (!(snr > 0.0)) throw std::invalid_argument("effective_variance: snr must be positive");
  if (h.size() != a.size()) throw DimensionMismatch("effective_variance: h and a sizes disagree");
  const double ha = h.template cast<double>().dot(a.template cast<double>());
  const double aa = a.template cast<double>().squaredNorm();
  const double hh = h.template cast<double>().squaredNorm();
  if (aa == 0.0) throw std::invalid_argument("effective_variance: a must be nonzero");
  return snr * aa - snr * snr * ha * ha / (1.0 + snr * hh);
}

// alpha* = snr h.a / (1 + snr ||h||^2); plugging it into E|alpha y - a^T x|^2
// reproduces effective_variance.
template <typename DerivedH, typename DerivedA>
double mmse_alpha(const Eigen::MatrixBase<DerivedH>& h, const Eigen::MatrixBase<DerivedA>& a,
                  double snr) {
  if (!(snr > 0.0)) throw std::invalid_argument("mmse_alpha: snr must be positive");
  if (h.size() != a.size()) throw DimensionMismatch("mmse_alpha: h and a sizes disagree");
  const double ha = h.template cast<double>().dot(a.template cast<double>());
  const double hh = h.template cast<double>().squaredNorm();
  return snr * ha / (1.0 + snr * hh);
}

struct EffectiveNoiseSpec {
  double variance;          // sigma_eps^2 > 0
  NestedLatticePair pair;   // supplies kappa and p
};

struct DiscreteNoisePmf {
  Eigen::VectorXd probs;  // length p, indexed by g(u)
};

namespace detail {

inline double std_normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

}  // namespace detail

// Law of z~ = m^-1([Q_{Lambda_c}(eps)] mod Lambda_s) for eps ~ N(0, sigma^2):
// the Gaussian mass of each width-kappa cell, folded modulo p cells.
// P(u) = sum_j Phi((r(u)+jp+1/2)/s) - Phi((r(u)+jp-1/2)/s) with s = sigma/kappa
// and r(u) the centered representative of u in [-p/2, p/2).
inline DiscreteNoisePmf discrete_noise_pmf(const EffectiveNoiseSpec& spec) {
  if (!(spec.variance > 0.0) || !std::isfinite(spec.variance))
    throw std::invalid_argument("discrete_noise_pmf: variance must be positive and finite");
  const auto p = static_cast<Eigen::Index>(spec.pair.modulus());
  const double s = std::sqrt(spec.variance) / spec.pair.kappa();
  const double pd = static_cast<double>(p);
  // |j| <= ceil(8 sigma / (kappa p)) + 2 captures all mass beyond 1e-12;
  // the loop below keeps extending while a tail term is still >= 1e-15.
  const long long base_j = static_cast<long long>(std::ceil(8.0 * s / pd)) + 2;

  DiscreteNoisePmf pmf;
  pmf.probs = Eigen::VectorXd::Zero(p);
  for (Eigen::Index u = 0; u < p; ++u) {
    const double r = (2 * u < p) ? static_cast<double>(u) : static_cast<double>(u) - pd;
    double acc = 0.0;
    auto cell_mass = [&](long long j) {
      const double center = r + static_cast<double>(j) * pd;
      return detail::std_normal_cdf((center + 0.5) / s) - detail::std_normal_cdf((center - 0.5) / s);
    };
    for (long long j = -base_j; j <= base_j; ++j) acc += cell_mass(j);
    for (long long j = base_j + 1;; ++j) {
      const double tail = cell_mass(j) + cell_mass(-j);
      if (!(tail >= 1e-15)) break;
      acc += tail;
    }
    pmf.probs(u) = acc;
  }

  const double total = pmf.probs.sum();
  if (std::abs(total - 1.0) > 1e-9)
    throw std::runtime_error("discrete_noise_pmf: mass does not sum to one");
  return pmf;
}

// H(z~) in bits, with 0 log 0 = 0.
inline double discrete_entropy(const DiscreteNoisePmf& pmf) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < pmf.probs.size(); ++i) {
    const double q = pmf.probs(i);
    if (q > 0.0) h -= q * std::log2(q);
  }
  return h;
}

}  // namespace dascof
