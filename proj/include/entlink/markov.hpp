#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "entlink/fidelity.hpp"
#include "entlink/params.hpp"

namespace entlink {

// Two-dimensional state set {(age, distance)} with per-distance maximum age.
// age 0 means no usable link; ages 1..K(d) mean a stored link of that age.
// States are indexed densely, distance-major.
struct StateSpace {
  std::vector<double> distances;     // m, ascending
  std::vector<int> max_ages;         // K per distance
  std::vector<std::size_t> offsets;  // offsets[j] = first index of distance j

  std::size_t size() const {
    return offsets.empty() ? 0 : offsets.back();
  }

  std::size_t index(int age, std::size_t dist_idx) const;
  std::pair<int, std::size_t> state(std::size_t idx) const;  // (age, dist_idx)
  std::size_t distance_index(double distance) const;  // throws UnknownDistanceError
};

// Dense row-stochastic matrix over a StateSpace.
struct TransitionMatrix {
  std::size_t n = 0;
  std::vector<double> a;  // row-major, n*n

  double& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
  double row_sum(std::size_t i) const;
  bool is_row_stochastic(double tol = 1e-12) const;
};

struct DistributionVector {
  std::vector<double> p;
  long t = 0;  // slot index this distribution refers to

  double sum() const;
};

// Per-distance K from the link budget; distances whose delivered fidelity
// misses the threshold get K = 0. Throws EmptySpaceError.
StateSpace build_state_space(const ScenarioParams& params,
                             SpotModel model = SpotModel::exact,
                             AgeConvention convention = AgeConvention::storage_budget);

// Request-slot matrix: every row sends mass to (0, d_new) with 1 - p' and to
// (1, d_new) with p'. p' must be 0 when K(d_new) = 0.
TransitionMatrix build_request_matrix(const StateSpace& space, double d_new,
                                      double p_prime);

// No-request matrix: per distance block, (0,d) holds, (i,d) ages to (i+1,d),
// (K,d) expires to (0,d). Block diagonal.
TransitionMatrix build_no_request_matrix(const StateSpace& space);

// lambda * t_req + (1 - lambda) * t_norq.
TransitionMatrix combine(const TransitionMatrix& t_req,
                         const TransitionMatrix& t_norq, double lambda);

DistributionVector point_mass(const StateSpace& space, int age,
                              std::size_t dist_idx);

// One slot: P(t+1) = P(t) * T.
DistributionVector step(const DistributionVector& p,
                        const TransitionMatrix& t);

// P(1..steps). Normalization drift is renormalized away if it ever exceeds
// 1e-10 (it stays orders of magnitude below that in practice).
std::vector<DistributionVector> evolve(const DistributionVector& p0,
                                       const TransitionMatrix& t, long steps);

// Stationary distribution via power iteration from uniform, with a direct
// linear solve as fallback when iteration stalls. Residual is ||pi*T - pi||_1.
// Throws NotConvergedError if neither route meets `tol`.
DistributionVector steady_state(const TransitionMatrix& t, double tol = 1e-12,
                                long max_iters = 1000000);

// Sum of the (0, d_j) entries.
double no_link_probability(const DistributionVector& p,
                           const StateSpace& space);

}  // namespace entlink
