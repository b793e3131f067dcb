#include "entlink/markov.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "entlink/errors.hpp"
#include "entlink/metrics.hpp"

namespace entlink {

namespace {

constexpr std::size_t kMaxStates = 2000000;

// Stationary distribution by direct solve of pi (T - I) = 0 with sum(pi) = 1.
// Builds A = T^t - I with the last row replaced by ones, then LU with partial
// pivoting. Returns an empty vector if the system is numerically singular.
std::vector<double> solve_stationary(const TransitionMatrix& t) {
  const std::size_t n = t.n;
  std::vector<double> a(n * n);
  std::vector<double> b(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      a[i * n + j] = t.at(j, i) - (i == j ? 1.0 : 0.0);
    }
  }
  for (std::size_t j = 0; j < n; ++j) a[(n - 1) * n + j] = 1.0;
  b[n - 1] = 1.0;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::abs(a[col * n + col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double v = std::abs(a[r * n + col]);
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best < 1e-14) return {};
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a[col * n + j], a[pivot * n + j]);
      }
      std::swap(b[col], b[pivot]);
    }
    const double inv = 1.0 / a[col * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] * inv;
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) {
        a[r * n + j] -= f * a[col * n + j];
      }
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i * n + j] * x[j];
    x[i] = s / a[i * n + i];
  }
  // Clamp solver dust and renormalize.
  double sum = 0.0;
  for (double& v : x) {
    if (v < 0.0 && v > -1e-9) v = 0.0;
    if (v < 0.0) return {};
    sum += v;
  }
  if (sum <= 0.0) return {};
  for (double& v : x) v /= sum;
  return x;
}

double l1_residual(const std::vector<double>& pi, const TransitionMatrix& t) {
  const std::size_t n = t.n;
  double res = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double next = 0.0;
    for (std::size_t i = 0; i < n; ++i) next += pi[i] * t.at(i, j);
    res += std::abs(next - pi[j]);
  }
  return res;
}

}  // namespace

std::size_t StateSpace::index(int age, std::size_t dist_idx) const {
  return offsets[dist_idx] + static_cast<std::size_t>(age);
}

std::pair<int, std::size_t> StateSpace::state(std::size_t idx) const {
  std::size_t j = 0;
  while (j + 1 < distances.size() && idx >= offsets[j + 1]) ++j;
  return {static_cast<int>(idx - offsets[j]), j};
}

std::size_t StateSpace::distance_index(double distance) const {
  for (std::size_t j = 0; j < distances.size(); ++j) {
    if (distances[j] == distance) return j;
  }
  throw UnknownDistanceError(distance);
}

double TransitionMatrix::row_sum(std::size_t i) const {
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) s += at(i, j);
  return s;
}

bool TransitionMatrix::is_row_stochastic(double tol) const {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = at(i, j);
      if (v < -tol || v > 1.0 + tol) return false;
    }
    if (std::abs(row_sum(i) - 1.0) > tol) return false;
  }
  return true;
}

double DistributionVector::sum() const {
  return std::accumulate(p.begin(), p.end(), 0.0);
}

StateSpace build_state_space(const ScenarioParams& params, SpotModel model,
                             AgeConvention convention) {
  if (params.distances.empty()) {
    throw EmptySpaceError();
  }
  StateSpace space;
  space.distances = params.distances;
  space.offsets.resize(params.distances.size() + 1);
  std::size_t off = 0;
  for (std::size_t j = 0; j < params.distances.size(); ++j) {
    const LinkBudget lb =
        link_budget(params.distances[j], params, model, convention);
    space.max_ages.push_back(lb.feasible ? lb.max_age : 0);
    space.offsets[j] = off;
    off += static_cast<std::size_t>(space.max_ages.back()) + 1;
    if (off > kMaxStates) {
      throw RangeError("distances_km", "state space exceeds " +
                                           std::to_string(kMaxStates) +
                                           " states");
    }
  }
  space.offsets.back() = off;
  return space;
}

TransitionMatrix build_request_matrix(const StateSpace& space, double d_new,
                                      double p_prime) {
  const std::size_t j_new = space.distance_index(d_new);
  const std::size_t n = space.size();
  if (space.max_ages[j_new] == 0 && p_prime != 0.0) {
    throw std::invalid_argument(
        "p_prime must be 0 for a distance with no storage budget");
  }
  TransitionMatrix t;
  t.n = n;
  t.a.assign(n * n, 0.0);
  const std::size_t col_fail = space.index(0, j_new);
  for (std::size_t i = 0; i < n; ++i) {
    t.at(i, col_fail) = 1.0 - p_prime;
    if (p_prime != 0.0) {
      t.at(i, space.index(1, j_new)) = p_prime;
    }
  }
  return t;
}

TransitionMatrix build_no_request_matrix(const StateSpace& space) {
  const std::size_t n = space.size();
  TransitionMatrix t;
  t.n = n;
  t.a.assign(n * n, 0.0);
  for (std::size_t j = 0; j < space.distances.size(); ++j) {
    const int k = space.max_ages[j];
    t.at(space.index(0, j), space.index(0, j)) = 1.0;
    for (int age = 1; age < k; ++age) {
      t.at(space.index(age, j), space.index(age + 1, j)) = 1.0;
    }
    if (k >= 1) {
      t.at(space.index(k, j), space.index(0, j)) = 1.0;
    }
  }
  return t;
}

TransitionMatrix combine(const TransitionMatrix& t_req,
                         const TransitionMatrix& t_norq, double lambda) {
  if (t_req.n != t_norq.n) {
    throw DimensionMismatchError(t_req.n, t_norq.n);
  }
  TransitionMatrix t;
  t.n = t_req.n;
  t.a.resize(t.n * t.n);
  for (std::size_t i = 0; i < t.a.size(); ++i) {
    t.a[i] = lambda * t_req.a[i] + (1.0 - lambda) * t_norq.a[i];
  }
  return t;
}

DistributionVector point_mass(const StateSpace& space, int age,
                              std::size_t dist_idx) {
  DistributionVector v;
  v.p.assign(space.size(), 0.0);
  v.p[space.index(age, dist_idx)] = 1.0;
  v.t = 0;
  return v;
}

DistributionVector step(const DistributionVector& p,
                        const TransitionMatrix& t) {
  if (p.p.size() != t.n) {
    throw DimensionMismatchError(p.p.size(), t.n);
  }
  DistributionVector out;
  out.p.assign(t.n, 0.0);
  out.t = p.t + 1;
  for (std::size_t i = 0; i < t.n; ++i) {
    const double w = p.p[i];
    if (w == 0.0) continue;
    const double* row = &t.a[i * t.n];
    for (std::size_t j = 0; j < t.n; ++j) {
      out.p[j] += w * row[j];
    }
  }
  const double s = out.sum();
  if (std::abs(s - 1.0) > 1e-10) {
    for (double& v : out.p) v /= s;
  }
  return out;
}

std::vector<DistributionVector> evolve(const DistributionVector& p0,
                                       const TransitionMatrix& t, long steps) {
  std::vector<DistributionVector> out;
  out.reserve(static_cast<std::size_t>(steps));
  DistributionVector cur = p0;
  for (long s = 0; s < steps; ++s) {
    cur = step(cur, t);
    out.push_back(cur);
  }
  return out;
}

DistributionVector steady_state(const TransitionMatrix& t, double tol,
                                long max_iters) {
  const std::size_t n = t.n;
  DistributionVector pi;
  pi.p.assign(n, 1.0 / static_cast<double>(n));

  const auto try_solve = [&]() -> bool {
    std::vector<double> solved = solve_stationary(t);
    if (solved.empty() || l1_residual(solved, t) > tol) return false;
    pi.p = std::move(solved);
    return true;
  };

  double residual = 0.0;
  double best_residual = std::numeric_limits<double>::infinity();
  long since_improvement = 0;
  bool tried_solve = false;
  for (long iters = 0; iters < max_iters; ++iters) {
    DistributionVector next = step(pi, t);
    residual = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      residual += std::abs(next.p[j] - pi.p[j]);
    }
    if (residual <= tol) {
      pi.t = iters;  // residual of the returned vector is what was measured
      return pi;
    }
    pi.p.swap(next.p);
    if (residual < 0.1 * best_residual) {
      best_residual = residual;
      since_improvement = 0;
    } else if (++since_improvement > 2000 && !tried_solve) {
      tried_solve = true;  // stalled; try the direct solve once
      if (try_solve()) {
        pi.t = iters;
        return pi;
      }
    }
  }
  if (!tried_solve && try_solve()) {
    pi.t = max_iters;
    return pi;
  }
  throw NotConvergedError(max_iters, residual);
}

double no_link_probability(const DistributionVector& p,
                           const StateSpace& space) {
  double s = 0.0;
  for (std::size_t j = 0; j < space.distances.size(); ++j) {
    s += p.p[space.index(0, j)];
  }
  return s;
}

}  // namespace entlink
