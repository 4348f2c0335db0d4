#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "dascof/errors.hpp"
#include "dascof/integer_search.hpp"
#include "dascof/lattice.hpp"
#include "dascof/noise.hpp"
#include "dascof/rates.hpp"
#include "dascof/rng.hpp"
#include "dascof/zp.hpp"

namespace dascof {

struct DownlinkConfig {
  Eigen::Index num_users = 1;  // L antennas serving L users
  std::uint64_t p = 2;
  double snr = 1.0;  // linear, per real dimension
  double r0 = std::numeric_limits<double>::infinity();
  Scheme scheme = Scheme::RQCoF;
  std::uint64_t seed = 1;
  Eigen::Index n_symbols = 1;
  bool with_noise = true;    // receiver AWGN; CIFBF quantization noise is separate
  bool record_trace = false;
};

// Per-symbol record for exact identity checks in tests.
struct SymbolTrace {
  FieldVector message;              // w
  FieldVector code_symbols;         // c transmitted by the antennas
  FieldVector recovered;            // receiver outputs u
  Eigen::VectorXd effective_noise;  // eps_l = alpha_l y_l - a_l^T x
};

struct ChainResult {
  Eigen::VectorXd symbol_error_rate;         // per user
  Eigen::MatrixXd empirical_noise_pmf;       // p x L, law of u (-) w per user
  bool all_recovered = false;
  Eigen::VectorXd mean_tx_power;             // per antenna
  Eigen::VectorXd empirical_noise_variance;  // per user, mean eps^2
  std::vector<SymbolTrace> trace;
};

namespace detail {

struct ChainAccumulator {
  Eigen::VectorXd errors;
  Eigen::MatrixXd pmf_counts;
  Eigen::VectorXd power;
  Eigen::VectorXd noise_sq;

  ChainAccumulator(Eigen::Index users, Eigen::Index antennas, Eigen::Index p)
      : errors(Eigen::VectorXd::Zero(users)),
        pmf_counts(Eigen::MatrixXd::Zero(p, users)),
        power(Eigen::VectorXd::Zero(antennas)),
        noise_sq(Eigen::VectorXd::Zero(users)) {}

  ChainResult finish(Eigen::Index n_symbols, std::vector<SymbolTrace> trace) const {
    ChainResult res;
    const double n = static_cast<double>(n_symbols);
    res.symbol_error_rate = errors / n;
    res.empirical_noise_pmf = pmf_counts / n;
    res.mean_tx_power = power / n;
    res.empirical_noise_variance = noise_sq / n;
    res.all_recovered = (errors.array() == 0.0).all();
    res.trace = std::move(trace);
    return res;
  }
};

}  // namespace detail

// Downlink RQCoF chain at symbol level (identity code: every information
// symbol is its own code symbol, so the finite-field identities are exactly
// testable). Per symbol: uniform messages w, precoding mu = Q^-1 w over Z_p,
// channel inputs x_l = [m(c_l) + d_l] mod Lambda_s, transmission y = H x + z,
// and per-user quantized recovery with its MMSE alpha. The recovered symbol
// is compared against w_l directly, which is what the precoding identity
// q_l^T Q^-1 w = w_l promises.
inline ChainResult run_rqcof_chain(const DownlinkConfig& cfg, const Eigen::MatrixXd& h,
                                   const IntMatrix& a) {
  const Eigen::Index users = cfg.num_users;
  if (users < 1 || cfg.n_symbols < 1)
    throw std::invalid_argument("run_rqcof_chain: need at least one user and one symbol");
  if (h.rows() != users || h.cols() != users || a.rows() != users || a.cols() != users)
    throw DimensionMismatch("run_rqcof_chain: H and A must be L x L");
  const PrimeField field(cfg.p);
  const FieldMatrix q = to_field(field, a);
  FieldMatrix qinv;
  try {
    qinv = invert(field, q);
  } catch (const SingularMatrix&) {
    throw RankDeficient("run_rqcof_chain: system matrix Q is rank deficient over Z_p");
  }
  const NestedLatticePair pair = NestedLatticePair::from_snr(cfg.snr, cfg.p);
  const LinearCode code = LinearCode::identity(users);

  Eigen::VectorXd alpha(users);
  Eigen::MatrixXd a_real = a.cast<double>();
  for (Eigen::Index l = 0; l < users; ++l)
    alpha(l) = mmse_alpha(h.row(l).transpose(), a_real.row(l).transpose(), cfg.snr);

  Rng msg_rng = Rng::for_stream(cfg.seed, 0x6d65);
  Rng noise_rng = Rng::for_stream(cfg.seed, 0x7a6e);

  detail::ChainAccumulator acc(users, users, static_cast<Eigen::Index>(cfg.p));
  std::vector<SymbolTrace> trace;
  if (cfg.record_trace) trace.reserve(static_cast<std::size_t>(cfg.n_symbols));

  FieldVector w(users);
  Eigen::VectorXd x(users), dith(users);
  for (Eigen::Index i = 0; i < cfg.n_symbols; ++i) {
    for (Eigen::Index l = 0; l < users; ++l) w(l) = msg_rng.next_below(cfg.p);
    const FieldVector mu = matvec(field, qinv, w);
    const FieldVector c = code.encode(field, mu);
    for (Eigen::Index l = 0; l < users; ++l) {
      dith(l) = dither_value(cfg.seed, static_cast<std::uint64_t>(l), static_cast<std::uint64_t>(i), pair);
      x(l) = pair.channel_input(c(l), dith(l));
    }
    acc.power += x.cwiseProduct(x);

    Eigen::VectorXd y = h * x;
    if (cfg.with_noise)
      for (Eigen::Index l = 0; l < users; ++l) y(l) += noise_rng.next_normal();

    SymbolTrace rec;
    if (cfg.record_trace) {
      rec.message = w;
      rec.code_symbols = c;
      rec.recovered.resize(users);
      rec.effective_noise.resize(users);
    }
    for (Eigen::Index l = 0; l < users; ++l) {
      const double combo = a_real.row(l).dot(dith);
      const FieldElem u = receiver_quantize(y(l), alpha(l), combo, pair);
      const double eps = alpha(l) * y(l) - a_real.row(l).dot(x);
      if (u != w(l)) acc.errors(l) += 1.0;
      acc.pmf_counts(static_cast<Eigen::Index>(field.sub(u, w(l))), l) += 1.0;
      acc.noise_sq(l) += eps * eps;
      if (cfg.record_trace) {
        rec.recovered(l) = u;
        rec.effective_noise(l) = eps;
      }
    }
    if (cfg.record_trace) trace.push_back(std::move(rec));
  }
  return acc.finish(cfg.n_symbols, std::move(trace));
}

// IFBF / CIFBF chain: beamforming W = H^-1 A makes the effective channel
// integer (verified to 1e-9), recovery then follows the RQCoF path with
// alpha = 1. Symbol power is normalized against the worst antenna row of W,
// which keeps every per-antenna power at or below SNR; under CIFBF the
// backhaul quantization noise sigma_zhat^2 = SNR / 2^(2 R0) rides on the
// forwarded signals and the symbol power deflates by 1/(1 + 1/(2^(2R0)-1)).
inline ChainResult run_ifbf_chain(const DownlinkConfig& cfg, const Eigen::MatrixXd& h) {
  const Eigen::Index users = cfg.num_users;
  if (users < 1 || cfg.n_symbols < 1)
    throw std::invalid_argument("run_ifbf_chain: need at least one user and one symbol");
  if (h.rows() != users || h.cols() != users)
    throw DimensionMismatch("run_ifbf_chain: H must be L x L");
  const bool compressed = cfg.scheme == Scheme::CIFBF_RQCoF || cfg.scheme == Scheme::CIFBF_RCoF;
  if (compressed && !(cfg.r0 > 0.0 && std::isfinite(cfg.r0)))
    throw InvalidBackhaul("run_ifbf_chain: CIFBF needs finite positive R0");

  const IntegerCoeffMatrix coeffs = ifbf_coeffs(h, cfg.p);
  const Eigen::MatrixXd a_real = coeffs.a_rows.cast<double>();
  const Eigen::MatrixXd w_mat = h.partialPivLu().solve(a_real);
  if (((h * w_mat - a_real).cwiseAbs()).maxCoeff() >= 1e-9)
    throw std::runtime_error("run_ifbf_chain: effective channel is not integer");

  double worst_row = 0.0;
  for (Eigen::Index j = 0; j < users; ++j)
    worst_row = std::max(worst_row, w_mat.row(j).squaredNorm());
  double symbol_power = cfg.snr / worst_row;
  double quant_var = 0.0;
  if (compressed) {
    const double denom = std::exp2(2.0 * cfg.r0) - 1.0;
    symbol_power /= 1.0 + 1.0 / denom;
    quant_var = cfg.snr / std::exp2(2.0 * cfg.r0);
  }
  const NestedLatticePair pair = NestedLatticePair::from_snr(symbol_power, cfg.p);

  const PrimeField field(cfg.p);
  const FieldMatrix qinv = invert(field, coeffs.q);
  const LinearCode code = LinearCode::identity(users);

  Rng msg_rng = Rng::for_stream(cfg.seed, 0x6d65);
  Rng noise_rng = Rng::for_stream(cfg.seed, 0x7a6e);
  Rng quant_rng = Rng::for_stream(cfg.seed, 0x717a);

  detail::ChainAccumulator acc(users, users, static_cast<Eigen::Index>(cfg.p));
  std::vector<SymbolTrace> trace;
  if (cfg.record_trace) trace.reserve(static_cast<std::size_t>(cfg.n_symbols));

  FieldVector w(users);
  Eigen::VectorXd x(users), dith(users);
  for (Eigen::Index i = 0; i < cfg.n_symbols; ++i) {
    for (Eigen::Index l = 0; l < users; ++l) w(l) = msg_rng.next_below(cfg.p);
    const FieldVector mu = matvec(field, qinv, w);
    const FieldVector c = code.encode(field, mu);
    for (Eigen::Index l = 0; l < users; ++l) {
      dith(l) = dither_value(cfg.seed, static_cast<std::uint64_t>(l), static_cast<std::uint64_t>(i), pair);
      x(l) = pair.channel_input(c(l), dith(l));
    }
    Eigen::VectorXd v = w_mat * x;
    if (compressed) {
      const double sd = std::sqrt(quant_var);
      for (Eigen::Index j = 0; j < users; ++j) v(j) += sd * quant_rng.next_normal();
    }
    acc.power += v.cwiseProduct(v);

    Eigen::VectorXd y = h * v;
    if (cfg.with_noise)
      for (Eigen::Index l = 0; l < users; ++l) y(l) += noise_rng.next_normal();

    SymbolTrace rec;
    if (cfg.record_trace) {
      rec.message = w;
      rec.code_symbols = c;
      rec.recovered.resize(users);
      rec.effective_noise.resize(users);
    }
    for (Eigen::Index l = 0; l < users; ++l) {
      const double combo = a_real.row(l).dot(dith);
      const FieldElem u = receiver_quantize(y(l), 1.0, combo, pair);
      const double eps = y(l) - a_real.row(l).dot(x);
      if (u != w(l)) acc.errors(l) += 1.0;
      acc.pmf_counts(static_cast<Eigen::Index>(field.sub(u, w(l))), l) += 1.0;
      acc.noise_sq(l) += eps * eps;
      if (cfg.record_trace) {
        rec.recovered(l) = u;
        rec.effective_noise(l) = eps;
      }
    }
    if (cfg.record_trace) trace.push_back(std::move(rec));
  }
  return acc.finish(cfg.n_symbols, std::move(trace));
}

}  // namespace dascof
