#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "grc/bounds.hpp"
#include "grc/params.hpp"

namespace grc::ifg {

enum class VertexKind { source, sink, in, out, ext };
enum class CapKind { alpha, beta, gamma, gamma_prime, infinite };

struct Vertex {
  VertexKind kind;
  int cluster = -1;
  int node = -1;
  int version = 0;  // model 1: cluster version; model 2: replacement generation
};

struct Edge {
  std::size_t from;
  std::size_t to;
  CapKind kind;
  std::int64_t capacity;  // meaningless for CapKind::infinite
};

/// Capacitated DAG with a single source and sink.
class FlowGraph {
 public:
  FlowGraph() {
    source_ = add_vertex({VertexKind::source});
    sink_ = add_vertex({VertexKind::sink});
  }

  std::size_t add_vertex(Vertex v) {
    vertices_.push_back(v);
    return vertices_.size() - 1;
  }

  void add_edge(std::size_t from, std::size_t to, CapKind kind, std::int64_t capacity = 0) {
    if (from == sink_ || to == source_) throw std::logic_error("edge violates source/sink orientation");
    if (kind != CapKind::infinite && capacity < 0) throw std::invalid_argument("negative capacity");
    edges_.push_back({from, to, kind, kind == CapKind::infinite ? 0 : capacity});
  }

  std::size_t source() const { return source_; }
  std::size_t sink() const { return sink_; }
  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::vector<Edge>& mutable_edges() { return edges_; }

  std::size_t count(VertexKind k) const {
    return static_cast<std::size_t>(std::ranges::count_if(vertices_, [k](const Vertex& v) { return v.kind == k; }));
  }
  std::size_t count(CapKind k) const {
    return static_cast<std::size_t>(std::ranges::count_if(edges_, [k](const Edge& e) { return e.kind == k; }));
  }

  bool is_acyclic() const {
    std::vector<std::vector<std::size_t>> adj(vertices_.size());
    std::vector<std::size_t> indeg(vertices_.size(), 0);
    for (const auto& e : edges_) {
      adj[e.from].push_back(e.to);
      ++indeg[e.to];
    }
    std::vector<std::size_t> stack;
    for (std::size_t v = 0; v < vertices_.size(); ++v)
      if (indeg[v] == 0) stack.push_back(v);
    std::size_t seen = 0;
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      ++seen;
      for (auto w : adj[v])
        if (--indeg[w] == 0) stack.push_back(w);
    }
    return seen == vertices_.size();
  }

 private:
  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  std::size_t source_ = 0;
  std::size_t sink_ = 0;
};

/// Exact integer max-flow (Dinic). Infinite edges get total finite capacity + 1,
/// which no cut that avoids them can reach.
inline std::int64_t max_flow(const FlowGraph& g) {
  std::int64_t finite_total = 0;
  for (const auto& e : g.edges())
    if (e.kind != CapKind::infinite) finite_total += e.capacity;
  const std::int64_t inf = finite_total + 1;

  struct Arc {
    std::size_t to;
    std::int64_t cap;
  };
  const std::size_t nv = g.vertices().size();
  std::vector<Arc> arcs;
  std::vector<std::vector<std::size_t>> adj(nv);
  arcs.reserve(2 * g.edges().size());
  for (const auto& e : g.edges()) {
    adj[e.from].push_back(arcs.size());
    arcs.push_back({e.to, e.kind == CapKind::infinite ? inf : e.capacity});
    adj[e.to].push_back(arcs.size());
    arcs.push_back({e.from, 0});
  }

  std::vector<int> level(nv);
  std::vector<std::size_t> it(nv);
  auto bfs = [&] {
    std::ranges::fill(level, -1);
    std::queue<std::size_t> q;
    level[g.source()] = 0;
    q.push(g.source());
    while (!q.empty()) {
      auto v = q.front();
      q.pop();
      for (auto a : adj[v]) {
        if (arcs[a].cap > 0 && level[arcs[a].to] < 0) {
          level[arcs[a].to] = level[v] + 1;
          q.push(arcs[a].to);
        }
      }
    }
    return level[g.sink()] >= 0;
  };
  auto dfs = [&](auto&& self, std::size_t v, std::int64_t pushed) -> std::int64_t {
    if (v == g.sink()) return pushed;
    for (; it[v] < adj[v].size(); ++it[v]) {
      auto a = adj[v][it[v]];
      auto& arc = arcs[a];
      if (arc.cap <= 0 || level[arc.to] != level[v] + 1) continue;
      auto got = self(self, arc.to, std::min(pushed, arc.cap));
      if (got > 0) {
        arc.cap -= got;
        arcs[a ^ 1].cap += got;
        return got;
      }
    }
    return 0;
  };

  std::int64_t flow = 0;
  while (bfs()) {
    std::ranges::fill(it, 0);
    while (auto f = dfs(dfs, g.source(), std::numeric_limits<std::int64_t>::max())) flow += f;
  }
  return flow;
}

/// One node failure and the helpers used to rebuild it.
struct RepairEvent {
  std::size_t cluster = 0;
  std::size_t node = 0;
  std::vector<std::size_t> local_helpers;
  std::vector<std::size_t> remote_helpers;
  // Model 2 only: contributing nodes inside each remote helper cluster, aligned
  // with remote_helpers. Empty means nodes 0..ell'-1.
  std::vector<std::vector<std::size_t>> remote_nodes;
};

struct EventLog {
  std::vector<RepairEvent> events;

  std::vector<std::size_t> failure_counts(std::size_t n) const {
    std::vector<std::size_t> f(n, 0);
    for (const auto& e : events) ++f.at(e.cluster);
    return f;
  }
};

struct Scenario {
  EventLog log;
  std::vector<std::size_t> collector;
};

namespace detail {

inline void check_distinct(const std::vector<std::size_t>& v, std::size_t bound, const char* what) {
  std::set<std::size_t> s(v.begin(), v.end());
  if (s.size() != v.size()) throw ParamError(std::string(what) + " contains duplicates");
  for (auto x : v)
    if (x >= bound) throw ParamError(std::string(what) + " index out of range");
}

inline void validate_event(const SystemParams& p, const RepairEvent& e) {
  if (e.cluster >= static_cast<std::size_t>(p.n) || e.node >= static_cast<std::size_t>(p.m))
    throw ParamError("repair event targets a node outside the system");
  if (e.local_helpers.size() != static_cast<std::size_t>(p.ell)) throw ParamError("local helper count must equal ell");
  if (e.remote_helpers.size() != static_cast<std::size_t>(p.d)) throw ParamError("remote helper count must equal d");
  check_distinct(e.local_helpers, p.m, "local helper set");
  check_distinct(e.remote_helpers, p.n, "remote helper set");
  if (std::ranges::find(e.local_helpers, e.node) != e.local_helpers.end())
    throw ParamError("failed node cannot be its own local helper");
  if (std::ranges::find(e.remote_helpers, e.cluster) != e.remote_helpers.end())
    throw ParamError("host cluster cannot be a remote helper");
}

inline void validate_collector(const SystemParams& p, const std::vector<std::size_t>& collector) {
  if (collector.size() != static_cast<std::size_t>(p.k)) throw ParamError("collector must contact exactly k clusters");
  check_distinct(collector, p.n, "collector");
}

}  // namespace detail

/// First model: every repair clones the host cluster into a new version whose
/// external node serves both data collection and remote help. Local helper
/// edges carry `gamma`.
inline FlowGraph build_model1(const SystemParams& p, std::int64_t gamma, const EventLog& log,
                              const std::vector<std::size_t>& collector) {
  p.validate();
  detail::validate_collector(p, collector);
  const auto n = static_cast<std::size_t>(p.n);
  const auto m = static_cast<std::size_t>(p.m);

  struct Version {
    std::vector<std::size_t> in, out;
    std::size_t ext;
  };
  FlowGraph g;
  auto make_version = [&](std::size_t cluster, int version) {
    Version v;
    for (std::size_t j = 0; j < m; ++j) {
      v.in.push_back(g.add_vertex({VertexKind::in, int(cluster), int(j), version}));
      v.out.push_back(g.add_vertex({VertexKind::out, int(cluster), int(j), version}));
      g.add_edge(v.in[j], v.out[j], CapKind::alpha, p.alpha);
    }
    v.ext = g.add_vertex({VertexKind::ext, int(cluster), -1, version});
    for (std::size_t j = 0; j < m; ++j) g.add_edge(v.out[j], v.ext, CapKind::alpha, p.alpha);
    return v;
  };

  std::vector<Version> active;
  std::vector<int> version(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    active.push_back(make_version(i, 0));
    for (std::size_t j = 0; j < m; ++j) g.add_edge(g.source(), active[i].in[j], CapKind::infinite);
  }

  for (const auto& e : log.events) {
    detail::validate_event(p, e);
    const Version old = active[e.cluster];
    Version fresh = make_version(e.cluster, ++version[e.cluster]);
    for (std::size_t j = 0; j < m; ++j)
      if (j != e.node) g.add_edge(old.out[j], fresh.in[j], CapKind::alpha, p.alpha);
    for (auto h : e.remote_helpers) g.add_edge(active[h].ext, fresh.in[e.node], CapKind::beta, p.beta);
    for (auto l : e.local_helpers) g.add_edge(old.out[l], fresh.in[e.node], CapKind::gamma, gamma);
    active[e.cluster] = fresh;
  }

  for (auto c : collector) g.add_edge(active[c].ext, g.sink(), CapKind::infinite);
  return g;
}

/// Second model: no cluster cloning, each node fails at most once, and every
/// act of remote help or collection gets a fresh external node. Local helper
/// edges carry alpha; remote contributors feed their external node through
/// `gamma_prime` edges.
inline FlowGraph build_model2(const SystemParams& p, std::int64_t ell_prime, std::int64_t gamma_prime,
                              const EventLog& log, const std::vector<std::size_t>& collector) {
  p.validate();
  detail::validate_collector(p, collector);
  if (ell_prime < 1 || ell_prime > p.m) throw ParamError("1 <= ell_prime <= m");
  const auto n = static_cast<std::size_t>(p.n);
  const auto m = static_cast<std::size_t>(p.m);

  FlowGraph g;
  std::vector<std::vector<std::size_t>> in(n), out(n);
  std::vector<std::vector<bool>> failed(n, std::vector<bool>(m, false));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      in[i].push_back(g.add_vertex({VertexKind::in, int(i), int(j), 0}));
      out[i].push_back(g.add_vertex({VertexKind::out, int(i), int(j), 0}));
      g.add_edge(g.source(), in[i][j], CapKind::infinite);
      g.add_edge(in[i][j], out[i][j], CapKind::alpha, p.alpha);
    }
  }

  for (const auto& e : log.events) {
    detail::validate_event(p, e);
    if (failed[e.cluster][e.node]) throw ParamError("model 2 allows each node to fail at most once");
    failed[e.cluster][e.node] = true;
    if (!e.remote_nodes.empty() && e.remote_nodes.size() != e.remote_helpers.size())
      throw ParamError("remote contributor sets must align with remote helpers");

    auto rin = g.add_vertex({VertexKind::in, int(e.cluster), int(e.node), 1});
    auto rout = g.add_vertex({VertexKind::out, int(e.cluster), int(e.node), 1});
    g.add_edge(rin, rout, CapKind::alpha, p.alpha);
    for (auto l : e.local_helpers) g.add_edge(out[e.cluster][l], rin, CapKind::alpha, p.alpha);
    for (std::size_t h = 0; h < e.remote_helpers.size(); ++h) {
      const auto hc = e.remote_helpers[h];
      std::vector<std::size_t> contributors;
      if (e.remote_nodes.empty()) {
        contributors.resize(static_cast<std::size_t>(ell_prime));
        std::iota(contributors.begin(), contributors.end(), std::size_t{0});
      } else {
        contributors = e.remote_nodes[h];
      }
      if (contributors.size() != static_cast<std::size_t>(ell_prime))
        throw ParamError("each remote helper cluster must use exactly ell_prime nodes");
      detail::check_distinct(contributors, m, "remote contributor set");
      auto ext = g.add_vertex({VertexKind::ext, int(hc), -1, 0});
      for (auto j : contributors) g.add_edge(out[hc][j], ext, CapKind::gamma_prime, gamma_prime);
      g.add_edge(ext, rin, CapKind::beta, p.beta);
    }
    in[e.cluster][e.node] = rin;
    out[e.cluster][e.node] = rout;
  }

  for (auto c : collector) {
    auto ext = g.add_vertex({VertexKind::ext, int(c), -1, 0});
    for (std::size_t j = 0; j < m; ++j) g.add_edge(out[c][j], ext, CapKind::alpha, p.alpha);
    g.add_edge(ext, g.sink(), CapKind::infinite);
  }
  return g;
}

namespace detail {

inline std::vector<std::size_t> iota_vec(std::size_t from, std::size_t to) {
  std::vector<std::size_t> v;
  for (std::size_t i = from; i < to; ++i) v.push_back(i);
  return v;
}

// Remote helpers for a repair in cluster i: the min(i, d) clusters rebuilt
// before it, topped up with the lowest-indexed clusters after it.
inline std::vector<std::size_t> staircase_helpers(const SystemParams& p, std::size_t i) {
  const auto d = static_cast<std::size_t>(p.d);
  auto helpers = iota_vec(0, std::min(i, d));
  for (std::size_t c = i + 1; helpers.size() < d; ++c) helpers.push_back(c);
  return helpers;
}

}  // namespace detail

/// Failure sequence whose cut meets the capacity bound: nodes ell..m-1 of
/// clusters 0..k-1 fail in order, each rebuilt from local nodes 0..ell-1 and
/// from every previously rebuilt cluster.
inline Scenario adversarial_log_thm2(const SystemParams& p) {
  p.validate();
  Scenario s;
  const auto ell = static_cast<std::size_t>(p.ell);
  for (std::size_t i = 0; i < static_cast<std::size_t>(p.k); ++i) {
    for (std::size_t j = ell; j < static_cast<std::size_t>(p.m); ++j) {
      s.log.events.push_back({i, j, detail::iota_vec(0, ell), detail::staircase_helpers(p, i), {}});
    }
  }
  s.collector = detail::iota_vec(0, static_cast<std::size_t>(p.k));
  return s;
}

/// As adversarial_log_thm2, except the last collected cluster loses m-ell+1
/// nodes (ell..m-1 and then node 0) with the local helper window shifted to
/// 1..ell after the first repair.
inline Scenario adversarial_log_thm5(const SystemParams& p) {
  p.validate();
  if (p.d == 0) throw ParamError("gamma undefined without remote help");
  Scenario s;
  const auto ell = static_cast<std::size_t>(p.ell);
  const auto m = static_cast<std::size_t>(p.m);
  const auto k = static_cast<std::size_t>(p.k);
  for (std::size_t i = 0; i + 1 < k; ++i)
    for (std::size_t j = ell; j < m; ++j)
      s.log.events.push_back({i, j, detail::iota_vec(0, ell), detail::staircase_helpers(p, i), {}});
  const std::size_t last = k - 1;
  for (std::size_t t = 0; t <= m - ell; ++t) {
    const std::size_t node = t == 0 ? ell : (ell + t) % m;
    auto local = t == 0 ? detail::iota_vec(0, ell) : detail::iota_vec(1, ell + 1);
    s.log.events.push_back({last, node, std::move(local), detail::staircase_helpers(p, last), {}});
  }
  s.collector = detail::iota_vec(0, k);
  return s;
}

/// Model-2 sequence for the remote-helper bounds: nodes ell..m-1 of clusters
/// 0..k-1 fail once each; remote help always comes from clusters 0..d minus
/// the host, and every remote cluster draws on its nodes 0..ell_prime-1.
///
/// Failures run in two sweeps over the clusters: nodes ell..ell_prime-1
/// first, then nodes max(ell, ell_prime)..m-1. For ell_prime = m or
/// ell_prime <= ell one sweep is empty and the order is plain cluster order.
/// With ell < ell_prime < m the second sweep only ever draws remote help from
/// nodes the collector already holds.
inline Scenario adversarial_log_thm6(const SystemParams& p, std::int64_t ell_prime) {
  p.validate();
  if (p.d < p.k) throw ParamError("remote-helper sequence requires d >= k");
  if (p.alpha < (p.d - p.k + 2) * p.beta) throw ParamError("remote-helper sequence requires alpha >= (d-k+2)*beta");
  if (ell_prime < 1 || ell_prime > p.m) throw ParamError("1 <= ell_prime <= m");
  Scenario s;
  const auto ell = static_cast<std::size_t>(p.ell);
  const auto m = static_cast<std::size_t>(p.m);
  const auto lp = static_cast<std::size_t>(ell_prime);
  const auto split = std::max(ell, lp);
  auto sweep = [&](std::size_t from, std::size_t to) {
    for (std::size_t i = 0; i < static_cast<std::size_t>(p.k); ++i) {
      std::vector<std::size_t> remote;
      for (std::size_t c = 0; c <= static_cast<std::size_t>(p.d); ++c)
        if (c != i) remote.push_back(c);
      std::vector<std::vector<std::size_t>> contributors(remote.size(), detail::iota_vec(0, lp));
      for (std::size_t j = from; j < to; ++j)
        s.log.events.push_back({i, j, detail::iota_vec(0, ell), remote, contributors});
    }
  };
  sweep(ell, split);
  sweep(split, m);
  s.collector = detail::iota_vec(0, static_cast<std::size_t>(p.k));
  return s;
}

/// Cut value of the local-helper adversarial sequence: B* - alpha + min(alpha, (d-k+1)^+ beta) + gamma.
inline std::int64_t thm5_cut_formula(const SystemParams& p, std::int64_t gamma) {
  return file_size_bound(p) - p.alpha + std::min(p.alpha, positive_part(p.d - p.k + 1) * p.beta) + gamma;
}

/// Cut value of the remote-helper adversarial sequence:
/// k ell alpha + (m-ell) sum_{i=1}^{k} min(alpha, (d-k+1) beta + (k-i)(m-ell) gamma').
inline std::int64_t thm6_cut_formula(const SystemParams& p, std::int64_t gamma_prime) {
  std::int64_t s = 0;
  for (std::int64_t i = 1; i <= p.k; ++i)
    s += std::min(p.alpha, (p.d - p.k + 1) * p.beta + (p.k - i) * (p.m - p.ell) * gamma_prime);
  return p.k * p.ell * p.alpha + (p.m - p.ell) * s;
}

/// Uniformly random valid model-1 scenario: failure targets sweep every node
/// round-robin before switching to uniform draws; helper sets and the
/// collector are uniform subsets.
inline Scenario random_scenario(const SystemParams& p, std::size_t events, std::mt19937_64& rng) {
  p.validate();
  const auto n = static_cast<std::size_t>(p.n);
  const auto m = static_cast<std::size_t>(p.m);
  auto pick = [&](std::vector<std::size_t> pool, std::size_t count) {
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(count);
    std::ranges::sort(pool);
    return pool;
  };
  Scenario s;
  for (std::size_t t = 0; t < events; ++t) {
    RepairEvent e;
    if (t < n * m) {
      e.cluster = t % n;
      e.node = (t / n) % m;
    } else {
      e.cluster = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
      e.node = std::uniform_int_distribution<std::size_t>(0, m - 1)(rng);
    }
    std::vector<std::size_t> locals, remotes;
    for (std::size_t j = 0; j < m; ++j)
      if (j != e.node) locals.push_back(j);
    for (std::size_t c = 0; c < n; ++c)
      if (c != e.cluster) remotes.push_back(c);
    e.local_helpers = pick(locals, static_cast<std::size_t>(p.ell));
    e.remote_helpers = pick(remotes, static_cast<std::size_t>(p.d));
    s.log.events.push_back(std::move(e));
  }
  s.collector = pick(detail::iota_vec(0, n), static_cast<std::size_t>(p.k));
  return s;
}

struct CapacityReport {
  SystemParams params;
  std::int64_t gamma = 0;
  std::int64_t b_star = 0;
  std::int64_t mincut = 0;  // on the local-helper adversarial sequence
  bool tight = false;       // mincut >= b_star
  std::size_t sampled = 0;  // random scenarios evaluated
  std::int64_t sampled_min = 0;
  bool sampled_ok = true;   // every sampled cut >= b_star (only asserted when gamma >= gamma*)
};

/// Checks whether local-helper bandwidth gamma preserves capacity B*.
inline CapacityReport verify_capacity(const SystemParams& p, std::int64_t gamma, std::size_t samples = 0,
                                      std::uint64_t seed = 1) {
  CapacityReport r;
  r.params = p;
  r.gamma = gamma;
  r.b_star = file_size_bound(p);
  const auto sc = adversarial_log_thm5(p);
  r.mincut = max_flow(build_model1(p, gamma, sc.log, sc.collector));
  r.tight = r.mincut >= r.b_star;
  r.sampled_min = r.mincut;
  std::mt19937_64 rng(seed);
  const bool assert_converse = gamma >= gamma_star(p);
  for (std::size_t s = 0; s < samples; ++s) {
    const auto events = std::uniform_int_distribution<std::size_t>(1, 2 * static_cast<std::size_t>(p.n * p.m))(rng);
    const auto rs = random_scenario(p, events, rng);
    const auto cut = max_flow(build_model1(p, gamma, rs.log, rs.collector));
    r.sampled_min = std::min(r.sampled_min, cut);
    if (assert_converse && cut < r.b_star) r.sampled_ok = false;
    ++r.sampled;
  }
  return r;
}

}  // namespace grc::ifg
