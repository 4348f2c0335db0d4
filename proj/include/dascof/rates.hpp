#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "dascof/errors.hpp"
#include "dascof/integer_search.hpp"
#include "dascof/noise.hpp"

namespace dascof {

enum class Scheme {
  QCoF,
  CoF,
  RQCoF,
  RCoF,
  IFBF_RQCoF,
  IFBF_RCoF,
  CIFBF_RQCoF,
  CIFBF_RCoF,
};

inline const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::QCoF: return "QCoF";
    case Scheme::CoF: return "CoF";
    case Scheme::RQCoF: return "RQCoF";
    case Scheme::RCoF: return "RCoF";
    case Scheme::IFBF_RQCoF: return "IFBF_RQCoF";
    case Scheme::IFBF_RCoF: return "IFBF_RCoF";
    case Scheme::CIFBF_RQCoF: return "CIFBF_RQCoF";
    case Scheme::CIFBF_RCoF: return "CIFBF_RCoF";
  }
  return "?";
}

inline Scheme scheme_from_name(const std::string& name) {
  for (Scheme s : {Scheme::QCoF, Scheme::CoF, Scheme::RQCoF, Scheme::RCoF, Scheme::IFBF_RQCoF,
                   Scheme::IFBF_RCoF, Scheme::CIFBF_RQCoF, Scheme::CIFBF_RCoF}) {
    if (name == scheme_name(s)) return s;
  }
  throw ConfigError("unknown scheme '" + name + "'");
}

// Symmetric rate in bits per real symbol plus the terms it was assembled
// from. Negative formula values clamp to zero; raw_rate keeps the unclamped
// value.
struct RateReport {
  Scheme scheme{};
  double symmetric_rate = 0.0;
  double raw_rate = 0.0;
  double entropy_bits = std::numeric_limits<double>::quiet_NaN();        // worst-user H(z~)
  double effective_variance = std::numeric_limits<double>::quiet_NaN();  // worst-user sigma_eps^2
  double backhaul_cap = std::numeric_limits<double>::infinity();         // R0 term of the min
  double quantization_penalty = std::numeric_limits<double>::quiet_NaN();  // CIFBF penalty, bits
  double quantization_noise_variance = std::numeric_limits<double>::quiet_NaN();  // sigma_zhat^2
  double power_deflation = std::numeric_limits<double>::quiet_NaN();  // E|v|^2 / SNR under CIFBF
};

// R_QCoF = log2(p) - H(z~), clamped at zero.
inline double rate_qcof(double sigma2, const NestedLatticePair& pair) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("rate_qcof: sigma2 must be positive");
  const double h = discrete_entropy(discrete_noise_pmf({sigma2, pair}));
  return std::max(0.0, std::log2(static_cast<double>(pair.modulus())) - h);
}

// R_CoF = 1/2 log2(SNR / sigma^2), clamped at zero.
inline double rate_cof(double sigma2, double snr) {
  if (!(sigma2 > 0.0) || !(snr > 0.0)) throw std::invalid_argument("rate_cof: arguments must be positive");
  return std::max(0.0, 0.5 * std::log2(snr / sigma2));
}

// R_RQCoF = min{R0, log2(p) - max_l H(z~_l)}.
inline RateReport rate_rqcof(const Eigen::VectorXd& per_user_sigma2, const NestedLatticePair& pair,
                             double r0) {
  if (per_user_sigma2.size() == 0) throw std::invalid_argument("rate_rqcof: no users");
  RateReport rep;
  rep.scheme = Scheme::RQCoF;
  rep.backhaul_cap = r0;
  double worst_h = -1.0;
  double worst_sigma2 = 0.0;
  for (Eigen::Index l = 0; l < per_user_sigma2.size(); ++l) {
    const double h = discrete_entropy(discrete_noise_pmf({per_user_sigma2(l), pair}));
    if (h > worst_h) {
      worst_h = h;
      worst_sigma2 = per_user_sigma2(l);
    }
  }
  rep.entropy_bits = worst_h;
  rep.effective_variance = worst_sigma2;
  rep.raw_rate = std::min(r0, std::log2(static_cast<double>(pair.modulus())) - worst_h);
  rep.symmetric_rate = std::max(0.0, rep.raw_rate);
  return rep;
}

// R_RCoF = min{R0, min_l R_CoF(sigma_l^2)}.
inline RateReport rate_rcof(const Eigen::VectorXd& per_user_sigma2, double snr, double r0) {
  if (per_user_sigma2.size() == 0) throw std::invalid_argument("rate_rcof: no users");
  RateReport rep;
  rep.scheme = Scheme::RCoF;
  rep.backhaul_cap = r0;
  double worst = 0.0;
  for (Eigen::Index l = 0; l < per_user_sigma2.size(); ++l) worst = std::max(worst, per_user_sigma2(l));
  rep.effective_variance = worst;
  rep.raw_rate = std::min(r0, 0.5 * std::log2(snr / worst));
  rep.symmetric_rate = std::max(0.0, rep.raw_rate);
  return rep;
}

// max_l ||H^-1 a_l||^2 over the rows of A.
inline double ifbf_max_norm_sq(const Eigen::MatrixXd& h, const IntMatrix& a) {
  if (h.rows() != h.cols() || a.rows() != h.rows() || a.cols() != h.cols())
    throw DimensionMismatch("ifbf_max_norm_sq: dimensions disagree");
  const auto lu = h.partialPivLu();
  double worst = 0.0;
  for (Eigen::Index l = 0; l < a.rows(); ++l) {
    const Eigen::VectorXd al = a.row(l).transpose().cast<double>();
    worst = std::max(worst, lu.solve(al).squaredNorm());
  }
  return worst;
}

namespace detail {

inline void require_ifbf_rank(const Eigen::MatrixXd& h, const IntMatrix& a, std::uint64_t p,
                              Scheme scheme) {
  const bool scalar_shaping = scheme == Scheme::IFBF_RQCoF || scheme == Scheme::CIFBF_RQCoF;
  if (scalar_shaping) {
    const PrimeField field(p);
    if (rank(field, to_field(field, a)) != a.rows())
      throw RankDeficient("rate_ifbf: Q = [A] mod p is rank deficient");
  } else {
    if (integer_determinant(a) == 0) throw RankDeficient("rate_ifbf: A is rank deficient over R");
  }
  if (h.rows() != h.cols()) throw DimensionMismatch("rate_ifbf: H must be square");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(h);
  if (svd.singularValues().minCoeff() <= 1e-12 * svd.singularValues().maxCoeff())
    throw SingularChannel("rate_ifbf: H is not invertible");
}

}  // namespace detail

// IFBF with ideal (RCoF-style) shaping: 1/2 log2(SNR / max_l ||H^-1 a_l||^2).
// With scalar (RQCoF-style) shaping: log2(p) - H(z~) for effective noise
// N(0, max_l ||H^-1 a_l||^2) against nominal-SNR symbols; the per-antenna
// power normalization E|x|^2 = SNR / max_l ||H^-1 a_l||^2 is folded into the
// effective noise.
inline RateReport rate_ifbf(const Eigen::MatrixXd& h, const IntMatrix& a, double snr, std::uint64_t p,
                            Scheme variant) {
  if (variant != Scheme::IFBF_RQCoF && variant != Scheme::IFBF_RCoF)
    throw std::invalid_argument("rate_ifbf: variant must be IFBF_RQCoF or IFBF_RCoF");
  detail::require_ifbf_rank(h, a, p, variant);
  const double max_norm = ifbf_max_norm_sq(h, a);

  RateReport rep;
  rep.scheme = variant;
  rep.effective_variance = max_norm;
  if (variant == Scheme::IFBF_RCoF) {
    rep.raw_rate = 0.5 * std::log2(snr / max_norm);
  } else {
    const NestedLatticePair pair = NestedLatticePair::from_snr(snr, p);
    rep.entropy_bits = discrete_entropy(discrete_noise_pmf({max_norm, pair}));
    rep.raw_rate = std::log2(static_cast<double>(p)) - rep.entropy_bits;
  }
  rep.symmetric_rate = std::max(0.0, rep.raw_rate);
  return rep;
}

// Compressed IFBF at finite backhaul R0. Quantization noise follows the
// rate-distortion argument: sigma_zhat^2 = SNR / 2^(2 R0), transmit power
// deflates by 1 / (1 + 1/(2^(2 R0) - 1)), and user l sees effective variance
// sigma'^2_l = max_l ||H^-1 a_l||^2 (1 + (1 + ||h_l||^2 SNR)/(2^(2 R0) - 1)).
// RCoF-style: R = R_IFBF - 1/2 max_l log2(1 + (1 + ||h_l||^2 SNR)/(2^(2 R0) - 1)).
// RQCoF-style: R = log2(p) - max_l H(z~_l) with z~_l from sigma'^2_l.
inline RateReport rate_cifbf(const Eigen::MatrixXd& h, const IntMatrix& a, double snr, std::uint64_t p,
                             double r0, Scheme variant) {
  if (variant != Scheme::CIFBF_RQCoF && variant != Scheme::CIFBF_RCoF)
    throw std::invalid_argument("rate_cifbf: variant must be CIFBF_RQCoF or CIFBF_RCoF");
  if (!(r0 > 0.0)) throw InvalidBackhaul("rate_cifbf: R0 must be positive");
  detail::require_ifbf_rank(h, a, p, variant);
  const double max_norm = ifbf_max_norm_sq(h, a);
  const double denom = std::exp2(2.0 * r0) - 1.0;

  RateReport rep;
  rep.scheme = variant;
  rep.backhaul_cap = r0;
  rep.quantization_noise_variance = snr / std::exp2(2.0 * r0);
  rep.power_deflation = 1.0 / (1.0 + 1.0 / denom);

  double worst_term = 0.0;  // (1 + ||h_l||^2 SNR) / (2^(2R0) - 1), worst user
  for (Eigen::Index l = 0; l < h.rows(); ++l)
    worst_term = std::max(worst_term, (1.0 + h.row(l).squaredNorm() * snr) / denom);

  if (variant == Scheme::CIFBF_RCoF) {
    rep.quantization_penalty = 0.5 * std::log2(1.0 + worst_term);
    rep.effective_variance = max_norm * (1.0 + worst_term);
    rep.raw_rate = 0.5 * std::log2(snr / max_norm) - rep.quantization_penalty;
  } else {
    const NestedLatticePair pair = NestedLatticePair::from_snr(snr, p);
    const double sigma2 = max_norm * (1.0 + worst_term);
    rep.effective_variance = sigma2;
    rep.entropy_bits = discrete_entropy(discrete_noise_pmf({sigma2, pair}));
    rep.quantization_penalty =
        rep.entropy_bits - discrete_entropy(discrete_noise_pmf({max_norm, pair}));
    rep.raw_rate = std::log2(static_cast<double>(p)) - rep.entropy_bits;
  }
  rep.symmetric_rate = std::max(0.0, rep.raw_rate);
  return rep;
}

}  // namespace dascof
