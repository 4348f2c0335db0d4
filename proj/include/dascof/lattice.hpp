#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "dascof/errors.hpp"
#include "dascof/rng.hpp"
#include "dascof/zp.hpp"

namespace dascof {

// Tie-breaking convention used by every quantizer in the library:
// round half up (toward +infinity), so Voronoi intervals are half-open
// [-step/2, step/2). All chain identities require one consistent convention.
inline double round_half_up(double x) { return std::floor(x + 0.5); }

// Nearest point of the scaled integer lattice step*Z.
inline double lattice_quantize(double x, double step) { return step * round_half_up(x / step); }

// [x] mod Lambda = x - Q_Lambda(x), in [-step/2, step/2).
inline double mod_lattice(double x, double step) { return x - lattice_quantize(x, step); }

// One-dimensional nested pair: coding lattice kappa*Z, shaping lattice
// kappa*p*Z. The constellation kappa*Z intersected with the shaping Voronoi
// interval has exactly p points, and E|x|^2 = kappa^2 p^2 / 12 for inputs
// uniform over the interval; kappa is always derived from (snr, p) so the
// power bookkeeping has a single source of truth.
class NestedLatticePair {
 public:
  NestedLatticePair(double kappa, std::uint64_t p) : kappa_(kappa), field_(p) {
    if (!(kappa > 0.0)) throw std::invalid_argument("NestedLatticePair: kappa must be positive");
  }

  static NestedLatticePair from_snr(double snr, std::uint64_t p) {
    if (!(snr > 0.0)) throw std::invalid_argument("NestedLatticePair: snr must be positive");
    return NestedLatticePair(std::sqrt(12.0 * snr) / static_cast<double>(p), p);
  }

  double kappa() const { return kappa_; }
  std::uint64_t modulus() const { return field_.modulus(); }
  const PrimeField& field() const { return field_; }
  double coarse_step() const { return kappa_ * static_cast<double>(field_.modulus()); }
  double snr() const {
    const double kp = coarse_step();
    return kp * kp / 12.0;
  }

  // m(u) = [kappa g(u)] mod Lambda_s; a bijection Z_p -> constellation.
  double modulate(FieldElem u) const {
    return mod_lattice(kappa_ * static_cast<double>(u), coarse_step());
  }

  // m^-1(v) = g^-1([v / kappa] mod pZ). v must be a constellation point up to
  // 1e-9 * kappa.
  FieldElem demodulate(double v) const {
    const double ratio = v / kappa_;
    const double zr = round_half_up(ratio);
    if (std::abs(v - kappa_ * zr) > 1e-9 * kappa_)
      throw NotInConstellation("demodulate: value is not a coding-lattice point");
    const double p = static_cast<double>(field_.modulus());
    if (2.0 * zr < -p || 2.0 * zr >= p)
      throw NotInConstellation("demodulate: value lies outside the shaping Voronoi interval");
    return field_.natural_map(static_cast<long long>(zr));
  }

  // x = [m(c) + d] mod Lambda_s. With d ~ Uniform(V_s) the output is
  // marginally uniform over V_s regardless of c.
  double channel_input(FieldElem c, double dither) const {
    return mod_lattice(modulate(c) + dither, coarse_step());
  }

 private:
  double kappa_;
  PrimeField field_;
};

// u = m^-1([Q_{Lambda_c}(alpha y - a^T d)] mod Lambda_s). Since the shaping
// lattice is a sublattice of the coding lattice, the composition collapses to
// one integer rounding followed by reduction mod p.
inline FieldElem receiver_quantize(double y, double alpha, double dither_combo,
                                   const NestedLatticePair& pair) {
  const double t = (alpha * y - dither_combo) / pair.kappa();
  return pair.field().natural_map(static_cast<long long>(round_half_up(t)));
}

// Dither symbols are reproduced at transmitter and receiver from indices
// alone: Uniform(V_s) keyed by (seed, stream, symbol).
inline double dither_value(std::uint64_t seed, std::uint64_t stream, std::uint64_t index,
                           const NestedLatticePair& pair) {
  const std::uint64_t h = hash_u64(hash_u64(seed, 0x5eedd17e72ULL), stream, index);
  const double unit = static_cast<double>(h >> 11) * 0x1.0p-53;  // [0, 1)
  return (unit - 0.5) * pair.coarse_step();                      // [-kappa p/2, kappa p/2)
}

struct DitherSequence {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::vector<double> values;
};

inline DitherSequence make_dither(std::uint64_t seed, std::uint64_t stream, std::size_t count,
                                  const NestedLatticePair& pair) {
  DitherSequence seq{seed, stream, {}};
  seq.values.reserve(count);
  for (std::size_t i = 0; i < count; ++i) seq.values.push_back(dither_value(seed, stream, i, pair));
  return seq;
}

}  // namespace dascof
