#include "entlink/mcsim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "entlink/rng.hpp"

namespace entlink {

namespace {

// Running mean/variance with Chan's pairwise merge, so replication results
// combine in a fixed order regardless of scheduling.
struct Moments {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }

  void merge(const Moments& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double d = o.mean - mean;
    const double total = static_cast<double>(n + o.n);
    m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) / total;
    mean += d * static_cast<double>(o.n) / total;
    n += o.n;
  }

  Estimate estimate() const {
    Estimate e;
    e.n = n;
    e.value = n > 0 ? mean : 0.0;
    if (n > 1) {
      const double var = m2 / static_cast<double>(n - 1);
      e.stderr_ = std::sqrt(var / static_cast<double>(n));
    }
    return e;
  }
};

struct Counter {
  std::uint64_t hits = 0;
  std::uint64_t trials = 0;

  void add(bool hit) {
    ++trials;
    hits += hit ? 1 : 0;
  }
  void merge(const Counter& o) {
    hits += o.hits;
    trials += o.trials;
  }
  Estimate estimate() const {
    Estimate e;
    e.n = trials;
    if (trials == 0) return e;
    const double p = static_cast<double>(hits) / static_cast<double>(trials);
    e.value = p;
    if (trials > 1) {
      const double var =
          p * (1.0 - p) * static_cast<double>(trials) / static_cast<double>(trials - 1);
      e.stderr_ = std::sqrt(var / static_cast<double>(trials));
    }
    return e;
  }
};

struct ReplicationResult {
  Counter satisfied;
  Counter consumed_vs_expired;
  Moments wait_s;
  Moments consumed_age_s;
  Moments consumed_fidelity;
  std::vector<std::uint64_t> histogram;
  std::uint64_t histogram_samples = 0;
  std::uint64_t n_requests = 0;
  std::uint64_t n_links = 0;
  std::uint64_t n_consumed = 0;
  std::uint64_t n_expired = 0;
};

int worker_count(int n_replications) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("ENTM_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1 && static_cast<unsigned>(cap) < hw) hw = static_cast<unsigned>(cap);
  }
  return static_cast<int>(std::min<unsigned>(hw, static_cast<unsigned>(n_replications)));
}

ReplicationResult run_replication(const SimConfig& cfg, const LinkBudget& lb,
                                  const StateSpace& space, std::size_t j_new,
                                  double p_prime, long burn_in,
                                  std::uint64_t seed) {
  const double lambda = cfg.scenario.request_rate;
  const double gamma = cfg.scenario.noise.damping_rate;
  const double dt = cfg.scenario.timing.slot_dt;
  const double f_th = cfg.scenario.noise.fidelity_threshold;
  const int max_k = space.max_ages[j_new];
  const bool retry = cfg.variant == ProtocolVariant::retry_every_slot;

  Xoshiro256StarStar rng(seed);
  ReplicationResult r;
  r.histogram.assign(space.size(), 0);

  int age = 0;  // 0 = no stored link
  std::vector<long> pending;  // slots of unserved requests awaiting generation

  for (long slot = 1; slot <= cfg.n_slots; ++slot) {
    const bool counted = slot > burn_in;
    if (counted) {
      ++r.histogram[space.index(age, j_new)];
      ++r.histogram_samples;
    }

    const bool request = rng.bernoulli(lambda);
    bool satisfied = false;
    const bool had_link = age >= 1;
    if (request) {
      if (counted) ++r.n_requests;
      if (had_link) {
        // Case 1: consume the stored pair, served with zero wait.
        const double fidelity = stored_fidelity(lb.f0_prime, age * dt, gamma);
        if (cfg.convention == AgeConvention::storage_budget &&
            fidelity < f_th * (1.0 - 1e-12)) {
          throw std::logic_error("consumed link below fidelity threshold");
        }
        satisfied = true;
        if (counted) {
          ++r.n_consumed;
          r.consumed_vs_expired.add(true);
          r.consumed_age_s.add(age * dt);
          r.consumed_fidelity.add(fidelity);
          if (retry) r.wait_s.add(0.0);
        }
        age = 0;
      } else if (retry && counted) {
        // Wait clock opens now; the attempt below already counts as one slot.
        pending.push_back(slot);
      }
    }

    bool created = false;
    const bool attempt = request || (retry && age == 0);
    if (attempt && age == 0) {
      if (rng.bernoulli(p_prime)) {
        age = 1;
        created = true;
        if (counted) ++r.n_links;
        if (!had_link && request) satisfied = true;  // Case 2
        for (long started : pending) {
          r.wait_s.add(static_cast<double>(slot - started + 1) * dt);
        }
        pending.clear();
      }
    }
    if (request && counted) r.satisfied.add(satisfied);

    // Aging applies to links that predate this slot's generation.
    if (!request && age >= 1 && !created) {
      ++age;
      if (age > max_k) {
        age = 0;
        if (counted) {
          ++r.n_expired;
          r.consumed_vs_expired.add(false);
        }
      }
    }
  }
  return r;
}

}  // namespace

SimStats run_simulation(const SimConfig& cfg) {
  if (cfg.n_slots < 1 || cfg.n_replications < 1) {
    throw std::invalid_argument("n_slots and n_replications must be >= 1");
  }
  const StateSpace space =
      build_state_space(cfg.scenario, cfg.model, cfg.convention);
  const std::size_t j_new = space.distance_index(cfg.scenario.request_distance);
  const LinkBudget lb = link_budget(cfg.scenario.request_distance, cfg.scenario,
                                    cfg.model, cfg.convention);
  const double p_prime =
      link_p_prime(cfg.scenario.request_distance, cfg.scenario, cfg.model);
  const long burn_in =
      cfg.burn_in >= 0 ? cfg.burn_in : std::min<long>(10000, cfg.n_slots / 10);

  std::vector<ReplicationResult> results(
      static_cast<std::size_t>(cfg.n_replications));
  const int workers = worker_count(cfg.n_replications);
  if (workers <= 1) {
    for (int i = 0; i < cfg.n_replications; ++i) {
      results[static_cast<std::size_t>(i)] =
          run_replication(cfg, lb, space, j_new, p_prime, burn_in,
                          cfg.seed + static_cast<std::uint64_t>(i));
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (int i = next.fetch_add(1); i < cfg.n_replications;
             i = next.fetch_add(1)) {
          results[static_cast<std::size_t>(i)] =
              run_replication(cfg, lb, space, j_new, p_prime, burn_in,
                              cfg.seed + static_cast<std::uint64_t>(i));
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  // Merge in replication order; results are independent of thread timing.
  ReplicationResult total;
  total.histogram.assign(space.size(), 0);
  for (const auto& r : results) {
    total.satisfied.merge(r.satisfied);
    total.consumed_vs_expired.merge(r.consumed_vs_expired);
    total.wait_s.merge(r.wait_s);
    total.consumed_age_s.merge(r.consumed_age_s);
    total.consumed_fidelity.merge(r.consumed_fidelity);
    for (std::size_t i = 0; i < total.histogram.size(); ++i) {
      total.histogram[i] += r.histogram[i];
    }
    total.histogram_samples += r.histogram_samples;
    total.n_requests += r.n_requests;
    total.n_links += r.n_links;
    total.n_consumed += r.n_consumed;
    total.n_expired += r.n_expired;
  }

  SimStats stats;
  stats.satisfaction_frequency = total.satisfied.estimate();
  stats.mean_wait = total.wait_s.estimate();
  stats.consumed_fraction = total.consumed_vs_expired.estimate();
  stats.mean_consumed_age = total.consumed_age_s.estimate();
  stats.mean_consumed_fidelity = total.consumed_fidelity.estimate();
  stats.state_histogram.assign(space.size(), 0.0);
  if (total.histogram_samples > 0) {
    for (std::size_t i = 0; i < space.size(); ++i) {
      stats.state_histogram[i] = static_cast<double>(total.histogram[i]) /
                                 static_cast<double>(total.histogram_samples);
    }
  }
  stats.histogram_samples = total.histogram_samples;
  stats.n_requests = total.n_requests;
  stats.n_links = total.n_links;
  stats.n_consumed = total.n_consumed;
  stats.n_expired = total.n_expired;
  stats.rng_algorithm = Xoshiro256StarStar::kName;
  stats.seed = cfg.seed;
  stats.n_slots = cfg.n_slots;
  stats.n_replications = cfg.n_replications;
  stats.variant = cfg.variant;
  return stats;
}

bool ComparisonReport::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const ComparisonRow& r) {
    return r.verdict != ComparisonRow::Verdict::fail;
  });
}

ComparisonReport compare(const SimStats& sim, const MetricsReport& analytic,
                         const DistributionVector& steady,
                         const StateSpace& space, double z,
                         double tv_threshold, double wait_flag_rel) {
  ComparisonReport rep;
  const auto add_z_row = [&](const std::string& name, const Estimate& est,
                             double expected) {
    ComparisonRow row;
    row.metric = name;
    row.simulated = est.value;
    row.stderr_ = est.stderr_;
    row.analytic = expected;
    row.delta = est.value - expected;
    row.z = est.stderr_ > 0.0 ? std::abs(row.delta) / est.stderr_ : 0.0;
    bool ok;
    if (est.stderr_ > 0.0) {
      ok = std::abs(row.delta) <= z * est.stderr_;
    } else if (est.n > 0) {
      // Degenerate sample (all outcomes equal): rate-bound slack z/n in place
      // of the vanishing standard error.
      ok = std::abs(row.delta) <= z / static_cast<double>(est.n);
    } else {
      ok = row.delta == 0.0;
    }
    row.verdict =
        ok ? ComparisonRow::Verdict::pass : ComparisonRow::Verdict::fail;
    rep.rows.push_back(row);
  };

  const double r_steady =
      1.0 - no_link_probability(steady, space) * (1.0 - analytic.p_prime);
  add_z_row("satisfaction_frequency", sim.satisfaction_frequency, r_steady);
  add_z_row("consumed_fraction", sim.consumed_fraction, analytic.utilization);
  add_z_row("mean_consumed_age_s", sim.mean_consumed_age,
            analytic.expected_age);
  add_z_row("mean_consumed_fidelity", sim.mean_consumed_fidelity,
            analytic.expected_consumed_fidelity);

  ComparisonRow tv;
  tv.metric = "state_histogram_tvd";
  double tvd = 0.0;
  for (std::size_t i = 0; i < space.size(); ++i) {
    tvd += std::abs(sim.state_histogram[i] - steady.p[i]);
  }
  tvd *= 0.5;
  tv.simulated = tvd;
  tv.analytic = 0.0;
  tv.delta = tvd;
  tv.verdict = tvd <= tv_threshold ? ComparisonRow::Verdict::pass
                                   : ComparisonRow::Verdict::fail;
  rep.rows.push_back(tv);

  // Waiting time is informational: the closed form assumes a generation
  // attempt every slot, which only the retry variant provides, and even then
  // its occupancy differs from the request-only chain.
  if (sim.mean_wait.n > 0) {
    ComparisonRow w;
    w.metric = "mean_wait_s";
    w.simulated = sim.mean_wait.value;
    w.stderr_ = sim.mean_wait.stderr_;
    w.analytic = analytic.expected_wait;
    w.delta = w.simulated - w.analytic;
    const double rel =
        w.analytic != 0.0 ? std::abs(w.delta) / w.analytic : 0.0;
    w.z = w.stderr_ > 0.0 ? std::abs(w.delta) / w.stderr_ : 0.0;
    w.verdict = rel <= wait_flag_rel ? ComparisonRow::Verdict::info_ok
                                     : ComparisonRow::Verdict::info_flagged;
    rep.rows.push_back(w);
  }
  return rep;
}

}  // namespace entlink
