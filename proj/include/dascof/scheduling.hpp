#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "dascof/errors.hpp"
#include "dascof/zp.hpp"

namespace dascof {

// User selection input: K candidate users, L slots, each user's decoded
// combination coefficients over Z_p and effective-noise variance. Weights
// w_k = 1 / sigma_k^2.
struct SelectionInstance {
  std::uint64_t p = 2;
  Eigen::Index num_slots = 1;  // L
  FieldMatrix q_rows;          // K x L
  Eigen::VectorXd sigma2;      // K

  Eigen::Index num_users() const { return q_rows.rows(); }

  void validate() const {
    if (q_rows.cols() != num_slots) throw DimensionMismatch("SelectionInstance: q_rows must be K x L");
    if (sigma2.size() != q_rows.rows())
      throw DimensionMismatch("SelectionInstance: one sigma^2 per user required");
    for (Eigen::Index k = 0; k < sigma2.size(); ++k)
      if (!(sigma2(k) > 0.0) || !std::isfinite(sigma2(k)))
        throw std::invalid_argument("SelectionInstance: sigma^2 must be positive and finite");
  }
};

struct SelectionResult {
  std::vector<Eigen::Index> chosen;  // subset of [0, K)
  double objective = std::numeric_limits<double>::infinity();  // max sigma^2 among chosen
  bool feasible = false;
};

// Best-In-Greedy over the linear matroid of Z_p-independent row subsets:
// sort users by descending weight 1/sigma^2 (stable by index), add a user
// iff it raises the rank, stop at rank L. Infeasibility (rank of the whole
// matrix below L) is a result state: the simulation convention scores such
// channel uses at zero rate.
inline SelectionResult greedy_select(const SelectionInstance& inst) {
  inst.validate();
  const PrimeField field(inst.p);
  const Eigen::Index users = inst.num_users();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(users));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return inst.sigma2(a) < inst.sigma2(b); });

  SelectionResult res;
  FieldMatrix stack(inst.num_slots, inst.num_slots);
  Eigen::Index current = 0;
  for (Eigen::Index k : order) {
    stack.row(current) = inst.q_rows.row(k);
    if (rank(field, stack.topRows(current + 1)) > current) {
      res.chosen.push_back(k);
      ++current;
      if (current == inst.num_slots) break;
    }
  }
  res.feasible = current == inst.num_slots;
  if (res.feasible) {
    res.objective = 0.0;
    for (Eigen::Index k : res.chosen) res.objective = std::max(res.objective, inst.sigma2(k));
    std::sort(res.chosen.begin(), res.chosen.end());
  }
  return res;
}

// Exact optimum of min max{sigma_k^2} subject to Rank_p(Q(K)) = L by
// enumerating all size-L subsets. Guarded to K <= 20.
inline SelectionResult brute_force_select(const SelectionInstance& inst) {
  inst.validate();
  if (inst.num_users() > 20) throw InstanceTooLarge("brute_force_select: K must be at most 20");
  const PrimeField field(inst.p);
  const Eigen::Index users = inst.num_users();
  const Eigen::Index slots = inst.num_slots;

  SelectionResult best;
  std::vector<Eigen::Index> pick(static_cast<std::size_t>(slots));
  FieldMatrix sub(slots, slots);

  auto consider = [&]() {
    for (Eigen::Index i = 0; i < slots; ++i) sub.row(i) = inst.q_rows.row(pick[static_cast<std::size_t>(i)]);
    if (rank(field, sub) != slots) return;
    double objective = 0.0;
    for (Eigen::Index k : pick) objective = std::max(objective, inst.sigma2(k));
    if (!best.feasible || objective < best.objective) {
      best.feasible = true;
      best.objective = objective;
      best.chosen = pick;
    }
  };

  // lexicographic combinations
  auto recurse = [&](auto&& self, Eigen::Index depth, Eigen::Index start) -> void {
    if (depth == slots) {
      consider();
      return;
    }
    for (Eigen::Index k = start; k <= users - (slots - depth); ++k) {
      pick[static_cast<std::size_t>(depth)] = k;
      self(self, depth + 1, k + 1);
    }
  };
  if (users >= slots) recurse(recurse, 0, 0);
  return best;
}

// Exhaustive check of the three matroid axioms for an independence oracle on
// subsets of {0, ..., ground-1}; ground is capped at 12 (4096 subsets).
inline bool matroid_check(int ground, const std::function<bool(const std::vector<int>&)>& independent) {
  if (ground < 0 || ground > 12) throw InstanceTooLarge("matroid_check: ground set capped at 12");
  const std::size_t total = std::size_t{1} << ground;
  std::vector<char> indep(total);
  std::vector<int> members;
  for (std::size_t mask = 0; mask < total; ++mask) {
    members.clear();
    for (int e = 0; e < ground; ++e)
      if (mask >> e & 1) members.push_back(e);
    indep[mask] = independent(members) ? 1 : 0;
  }

  if (!indep[0]) return false;  // axiom 1: the empty set is independent
  for (std::size_t mask = 0; mask < total; ++mask) {
    if (!indep[mask]) continue;
    for (int e = 0; e < ground; ++e)  // axiom 2: downward closed
      if ((mask >> e & 1) && !indep[mask & ~(std::size_t{1} << e)]) return false;
  }
  for (std::size_t x = 0; x < total; ++x) {
    if (!indep[x]) continue;
    for (std::size_t y = 0; y < total; ++y) {
      if (!indep[y] || __builtin_popcountll(x) >= __builtin_popcountll(y)) continue;
      bool extended = false;  // axiom 3: exchange
      for (int e = 0; e < ground; ++e) {
        if ((y >> e & 1) && !(x >> e & 1) && indep[x | (std::size_t{1} << e)]) {
          extended = true;
          break;
        }
      }
      if (!extended) return false;
    }
  }
  return true;
}

}  // namespace dascof
