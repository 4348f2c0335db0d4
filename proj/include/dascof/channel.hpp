#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

#include "dascof/rng.hpp"

namespace dascof {

// Inter-cell interference level gamma in [0, 1], either fixed or drawn
// uniformly; uniform draws happen once per trial or independently for every
// subdiagonal entry (the default for figure reproduction).
struct GammaSpec {
  enum class Kind { fixed, uniform };
  enum class Draw { per_entry, per_trial };

  Kind kind = Kind::fixed;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  Draw draw = Draw::per_entry;

  static GammaSpec fixed(double v) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("GammaSpec: gamma must lie in [0,1]");
    return GammaSpec{Kind::fixed, v, 0.0, 0.0, Draw::per_entry};
  }
  static GammaSpec uniform(double lo, double hi, Draw draw = Draw::per_entry) {
    if (!(0.0 <= lo && lo <= hi && hi <= 1.0))
      throw std::invalid_argument("GammaSpec: uniform range must satisfy 0 <= lo <= hi <= 1");
    return GammaSpec{Kind::uniform, 0.0, lo, hi, draw};
  }
};

struct SoftHandoffParams {
  Eigen::Index num_cells = 1;  // L
  GammaSpec gamma;
};

// Lower bidiagonal channel of the Soft-Handoff model: unit diagonal, gamma on
// the first subdiagonal (cell l hears its own antenna plus a gamma-weighted
// neighbor; the first cell has no interference term). Unit-determinant
// triangular, hence invertible for every gamma.
inline Eigen::MatrixXcd soft_handoff_matrix(const SoftHandoffParams& params, Rng& rng) {
  if (params.num_cells < 1) throw std::invalid_argument("soft_handoff_matrix: need at least one cell");
  const Eigen::Index n = params.num_cells;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Identity(n, n);
  double trial_gamma = params.gamma.value;
  if (params.gamma.kind == GammaSpec::Kind::uniform && params.gamma.draw == GammaSpec::Draw::per_trial)
    trial_gamma = params.gamma.lo + (params.gamma.hi - params.gamma.lo) * rng.next_unit();
  for (Eigen::Index l = 1; l < n; ++l) {
    double g = trial_gamma;
    if (params.gamma.kind == GammaSpec::Kind::uniform && params.gamma.draw == GammaSpec::Draw::per_entry)
      g = params.gamma.lo + (params.gamma.hi - params.gamma.lo) * rng.next_unit();
    h(l, l - 1) = g;
  }
  return h;
}

// K x L i.i.d. standard normal entries.
inline Eigen::MatrixXd rayleigh_matrix(Eigen::Index k, Eigen::Index l, Rng& rng) {
  if (k < 1 || l < 1) throw std::invalid_argument("rayleigh_matrix: dimensions must be positive");
  Eigen::MatrixXd h(k, l);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < l; ++j) h(i, j) = rng.next_normal();
  return h;
}

// Block expansion [[Re, -Im], [Im, Re]] mapping the complex model onto the
// real-valued machinery. Rates computed on the expanded model are reported
// per complex symbol as the sum of the two real dimensions.
template <typename Derived>
Eigen::MatrixXd complex_to_real(const Eigen::MatrixBase<Derived>& hc) {
  const Eigen::Index rows = hc.rows(), cols = hc.cols();
  Eigen::MatrixXd out(2 * rows, 2 * cols);
  const Eigen::MatrixXd re = hc.real().template cast<double>();
  const Eigen::MatrixXd im = hc.imag().template cast<double>();
  out.topLeftCorner(rows, cols) = re;
  out.topRightCorner(rows, cols) = -im;
  out.bottomLeftCorner(rows, cols) = im;
  out.bottomRightCorner(rows, cols) = re;
  return out;
}

}  // namespace dascof
