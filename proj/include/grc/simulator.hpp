#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "grc/bounds.hpp"
#include "grc/ifg.hpp"
#include "grc/matrix.hpp"
#include "grc/params.hpp"
#include "grc/rng.hpp"

namespace grc::sim {

enum class Schedule { uniform, round_robin, adversarial_thm5, adversarial_thm6 };
enum class CollectPolicy { all_subsets, random_subset };

inline Schedule parse_schedule(const std::string& s) {
  if (s == "uniform" || s == "uniform-random") return Schedule::uniform;
  if (s == "round-robin") return Schedule::round_robin;
  if (s == "adversarial-thm5") return Schedule::adversarial_thm5;
  if (s == "adversarial-thm6") return Schedule::adversarial_thm6;
  throw ParamError("unknown schedule '" + s + "'");
}

inline const char* to_string(Schedule s) {
  switch (s) {
    case Schedule::uniform:
      return "uniform";
    case Schedule::round_robin:
      return "round-robin";
    case Schedule::adversarial_thm5:
      return "adversarial-thm5";
    default:
      return "adversarial-thm6";
  }
}

struct SimConfig {
  SystemParams params;
  IntraParams intra;
  std::size_t trials = 100;
  std::size_t repairs_max = 50;
  Schedule schedule = Schedule::uniform;
  std::uint64_t seed = 1;
  CollectPolicy collect = CollectPolicy::all_subsets;
  std::size_t threads = 1;

  void validate() const {
    params.validate();
    intra.validate(params);
    if (trials < 1) throw ParamError("trials >= 1");
    if (threads < 1) throw ParamError("threads >= 1");
    if (file_size_bound(params) > params.k * params.m * params.alpha)
      throw ParamError("file size exceeds the data a collector downloads");
  }
};

/// Per-node alpha x B coefficient matrices over the B source symbols.
template <class F>
struct CoeffState {
  std::size_t file_size = 0;
  std::vector<std::vector<Matrix<F>>> nodes;  // [cluster][node]
};

namespace detail {

enum Role : std::uint64_t {
  role_init = 1,
  role_schedule,
  role_local,
  role_remote_node,
  role_remote_compute,
  role_store,
  role_collect,
  role_contributors,
};

// `count` distinct values from [0, bound) excluding `skip`, in draw order.
inline std::vector<std::size_t> draw_subset(KeyedStream& s, std::size_t bound, std::size_t count,
                                            std::size_t skip = static_cast<std::size_t>(-1)) {
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < bound; ++i)
    if (i != skip) pool.push_back(i);
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::size_t>(s.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

template <class F>
Matrix<F> combine(KeyedStream& s, std::size_t count, const Matrix<F>& rows) {
  return s.matrix<F>(count, rows.rows()) * rows;
}

}  // namespace detail

template <class F>
CoeffState<F> sim_init(const SimConfig& cfg, std::uint64_t trial) {
  const auto& p = cfg.params;
  CoeffState<F> st;
  st.file_size = static_cast<std::size_t>(file_size_bound(p));
  st.nodes.resize(static_cast<std::size_t>(p.n));
  for (std::size_t i = 0; i < st.nodes.size(); ++i) {
    for (std::size_t j = 0; j < static_cast<std::size_t>(p.m); ++j) {
      KeyedStream s{cfg.seed, trial, 0, detail::role_init, i, j};
      st.nodes[i].push_back(s.matrix<F>(static_cast<std::size_t>(p.alpha), st.file_size));
    }
  }
  return st;
}

/// Repair event number t (1-based) of a trial under the configured schedule.
inline ifg::RepairEvent scheduled_event(const SimConfig& cfg, std::uint64_t trial, std::uint64_t t) {
  const auto& p = cfg.params;
  const auto n = static_cast<std::size_t>(p.n);
  const auto m = static_cast<std::size_t>(p.m);
  if (cfg.schedule == Schedule::adversarial_thm5 || cfg.schedule == Schedule::adversarial_thm6) {
    const auto sc = cfg.schedule == Schedule::adversarial_thm5 ? ifg::adversarial_log_thm5(p)
                                                               : ifg::adversarial_log_thm6(p, cfg.intra.ell_prime);
    if (sc.log.events.empty()) throw ParamError("adversarial schedule has no events");
    return sc.log.events[(t - 1) % sc.log.events.size()];
  }
  KeyedStream s{cfg.seed, trial, t, detail::role_schedule};
  ifg::RepairEvent e;
  if (cfg.schedule == Schedule::round_robin) {
    e.cluster = static_cast<std::size_t>((t - 1) % n);
    e.node = static_cast<std::size_t>(((t - 1) / n) % m);
  } else {
    e.cluster = static_cast<std::size_t>(s.below(n));
    e.node = static_cast<std::size_t>(s.below(m));
  }
  e.local_helpers = detail::draw_subset(s, m, static_cast<std::size_t>(p.ell), e.node);
  e.remote_helpers = detail::draw_subset(s, n, static_cast<std::size_t>(p.d), e.cluster);
  for (std::size_t h = 0; h < e.remote_helpers.size(); ++h)
    e.remote_nodes.push_back(detail::draw_subset(s, m, static_cast<std::size_t>(cfg.intra.ell_prime)));
  return e;
}

/// Applies one repair: remote contributors send gamma' combinations each, the
/// helper cluster forwards beta combinations of what it gathered, local
/// helpers send gamma combinations each, and the replacement stores alpha
/// combinations of everything received.
template <class F>
void sim_repair_step(CoeffState<F>& st, const SimConfig& cfg, const ifg::RepairEvent& e, std::uint64_t trial,
                     std::uint64_t t) {
  const auto& p = cfg.params;
  const auto& in = cfg.intra;
  const auto m = static_cast<std::size_t>(p.m);
  Matrix<F> received(0, st.file_size);
  for (std::size_t h = 0; h < e.remote_helpers.size(); ++h) {
    const auto hc = e.remote_helpers[h];
    std::vector<std::size_t> contributors;
    if (h < e.remote_nodes.size()) {
      contributors = e.remote_nodes[h];
    } else {
      contributors.resize(static_cast<std::size_t>(in.ell_prime));
      std::iota(contributors.begin(), contributors.end(), std::size_t{0});
    }
    Matrix<F> gathered(0, st.file_size);
    for (std::size_t c : contributors) {
      KeyedStream s{cfg.seed, trial, t, detail::role_remote_node, hc, c};
      gathered = Matrix<F>::vstack(gathered, detail::combine(s, static_cast<std::size_t>(in.gamma_prime), st.nodes[hc][c]));
    }
    KeyedStream s{cfg.seed, trial, t, detail::role_remote_compute, hc};
    received = Matrix<F>::vstack(received, detail::combine(s, static_cast<std::size_t>(p.beta), gathered));
  }
  for (std::size_t l : e.local_helpers) {
    KeyedStream s{cfg.seed, trial, t, detail::role_local, l};
    received = Matrix<F>::vstack(received, detail::combine(s, static_cast<std::size_t>(in.gamma), st.nodes[e.cluster][l]));
  }
  KeyedStream s{cfg.seed, trial, t, detail::role_store};
  if (e.node >= m) throw ParamError("repair event node out of range");
  st.nodes[e.cluster][e.node] = detail::combine(s, static_cast<std::size_t>(p.alpha), received);
}

template <class F>
std::size_t collect_rank(const CoeffState<F>& st, std::span<const std::size_t> clusters) {
  Matrix<F> g(0, st.file_size);
  for (std::size_t c : clusters)
    for (const auto& node : st.nodes.at(c)) g = Matrix<F>::vstack(g, node);
  return rank(g);
}

template <class F>
bool sim_collect_check(const CoeffState<F>& st, std::span<const std::size_t> clusters) {
  return collect_rank(st, clusters) == st.file_size;
}

struct SimRow {
  std::size_t repairs = 0;
  double success_rate = 0;
  std::size_t trials = 0;
  double ci = 0;
  double mean_min_rank = 0;  // smallest checked collector rank, averaged over trials
};

struct SimResult {
  std::size_t file_size = 0;
  std::vector<SimRow> rows;

  std::vector<double> success_series() const {
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(r.success_rate);
    return v;
  }

  void write_csv(std::ostream& os) const {
    os << "repairs,success_rate,trials,ci\n";
    for (const auto& r : rows) os << r.repairs << ',' << r.success_rate << ',' << r.trials << ',' << r.ci << '\n';
  }
};

namespace detail {

inline std::vector<std::vector<std::size_t>> all_k_subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<bool> mask(n, false);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(k), true);
  do {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask[i]) s.push_back(i);
    out.push_back(std::move(s));
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return out;
}

struct TrialTrace {
  std::vector<bool> success;
  std::vector<std::size_t> min_rank;
};

template <class F>
TrialTrace run_trial(const SimConfig& cfg, std::uint64_t trial) {
  const auto n = static_cast<std::size_t>(cfg.params.n);
  const auto k = static_cast<std::size_t>(cfg.params.k);
  const auto subsets = all_k_subsets(n, k);
  auto st = sim_init<F>(cfg, trial);
  TrialTrace tr;
  for (std::uint64_t r = 0; r <= cfg.repairs_max; ++r) {
    if (r > 0) sim_repair_step(st, cfg, scheduled_event(cfg, trial, r), trial, r);
    std::size_t lowest = st.file_size;
    if (cfg.collect == CollectPolicy::all_subsets) {
      for (const auto& s : subsets) lowest = std::min(lowest, collect_rank(st, s));
    } else {
      KeyedStream ks{cfg.seed, trial, r, role_collect};
      auto s = draw_subset(ks, n, k);
      lowest = collect_rank(st, s);
    }
    tr.success.push_back(lowest == st.file_size);
    tr.min_rank.push_back(lowest);
  }
  return tr;
}

}  // namespace detail

template <class F>
SimResult run_experiment_in(const SimConfig& cfg) {
  cfg.validate();
  std::vector<detail::TrialTrace> traces(cfg.trials);
  const std::size_t workers = std::min(cfg.threads, cfg.trials);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t t = w; t < cfg.trials; t += workers) traces[t] = detail::run_trial<F>(cfg, t);
      });
    }
  }
  SimResult res;
  res.file_size = static_cast<std::size_t>(file_size_bound(cfg.params));
  for (std::size_t r = 0; r <= cfg.repairs_max; ++r) {
    SimRow row;
    row.repairs = r;
    row.trials = cfg.trials;
    std::size_t ok = 0;
    double ranks = 0;
    for (const auto& tr : traces) {
      ok += tr.success[r] ? 1 : 0;
      ranks += static_cast<double>(tr.min_rank[r]);
    }
    row.success_rate = static_cast<double>(ok) / static_cast<double>(cfg.trials);
    row.ci = 1.96 * std::sqrt(row.success_rate * (1 - row.success_rate) / static_cast<double>(cfg.trials));
    row.mean_min_rank = ranks / static_cast<double>(cfg.trials);
    res.rows.push_back(row);
  }
  return res;
}

/// Runs every trial and aggregates success frequencies per repair count.
inline SimResult run_experiment(const SimConfig& cfg) {
  if (cfg.params.field_width == 8) return run_experiment_in<GF256>(cfg);
  return run_experiment_in<GF65536>(cfg);
}

/// Mann-Kendall S statistic; negative means a decreasing trend.
inline long mann_kendall_s(const std::vector<double>& x) {
  long s = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) s += (x[j] > x[i]) - (x[j] < x[i]);
  return s;
}

/// Normal approximation of the Mann-Kendall statistic (no tie correction).
inline double mann_kendall_z(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  const double var = n * (n - 1) * (2 * n + 5) / 18.0;
  const long s = mann_kendall_s(x);
  if (s == 0 || var <= 0) return 0;
  return (s > 0 ? s - 1 : s + 1) / std::sqrt(var);
}

struct Preset {
  SystemParams params;
  IntraParams intra;
};

/// Parameter sets of the three repair-bandwidth experiments; the intra
/// parameters are the resource-sufficient defaults.
inline Preset fig5_preset(char which) {
  Preset p;
  p.params = SystemParams{3, 2, 2, 8, 4, 3, 2, 16};
  switch (which) {
    case 'a':
      p.intra = IntraParams{4, 3, 8};
      break;
    case 'b':
      p.params.ell = 1;
      p.intra = IntraParams{8, 3, 8};
      break;
    case 'c':
      p.params.ell = 1;
      p.intra = IntraParams{8, 3, 2};
      break;
    default:
      throw ParamError("unknown simulation preset");
  }
  return p;
}

}  // namespace grc::sim
