#include <gtest/gtest.h>

#include <random>

#include "grc/bounds.hpp"
#include "grc/ifg.hpp"

using namespace grc;
using namespace grc::ifg;

namespace {

// Brute-force min cut over every source-side vertex set. Only for tiny graphs.
std::int64_t brute_min_cut(const FlowGraph& g) {
  const std::size_t nv = g.vertices().size();
  std::int64_t finite = 0;
  for (const auto& e : g.edges())
    if (e.kind != CapKind::infinite) finite += e.capacity;
  std::int64_t best = -1;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << nv); ++mask) {
    auto side = [&](std::size_t v) { return (mask >> v) & 1u; };
    if (!side(g.source()) || side(g.sink())) continue;
    std::int64_t cut = 0;
    for (const auto& e : g.edges())
      if (side(e.from) && !side(e.to)) cut += e.kind == CapKind::infinite ? finite + 1 : e.capacity;
    if (best < 0 || cut < best) best = cut;
  }
  return best;
}

FlowGraph random_dag(std::mt19937_64& rng, std::size_t inner) {
  FlowGraph g;
  std::vector<std::size_t> ids{g.source()};
  for (std::size_t i = 0; i < inner; ++i) ids.push_back(g.add_vertex({VertexKind::in}));
  ids.push_back(g.sink());
  for (std::size_t a = 0; a < ids.size(); ++a)
    for (std::size_t b = a + 1; b < ids.size(); ++b)
      if (rng() % 3 == 0) g.add_edge(ids[a], ids[b], CapKind::alpha, static_cast<std::int64_t>(rng() % 6));
  return g;
}

SystemParams fig_params() { return {3, 2, 2, 8, 4, 2, 1, 8}; }

// Two repairs in cluster 0 then cluster 1, each using the other clusters.
EventLog fig1_log() {
  EventLog log;
  log.events.push_back({0, 1, {0}, {1, 2}, {}});
  log.events.push_back({1, 1, {0}, {0, 2}, {}});
  return log;
}

std::vector<SystemParams> desk_grid(std::int64_t max_n) {
  std::vector<SystemParams> out;
  for (std::int64_t n = 3; n <= max_n; ++n)
    for (std::int64_t k = 2; k <= n; ++k)
      for (std::int64_t d = 1; d <= n - 1; ++d)
        for (std::int64_t m = 1; m <= 3; ++m)
          for (std::int64_t ell = 0; ell < m; ++ell)
            for (std::int64_t beta = 1; beta <= 2; ++beta) {
              const std::int64_t lo = d >= k ? (d - k + 1) * beta : beta;
              for (std::int64_t alpha = lo; alpha <= d * beta; ++alpha) out.push_back({n, k, d, alpha, beta, m, ell, 8});
            }
  return out;
}

}  // namespace

TEST(MaxFlow, SingleEdgePath) {
  FlowGraph g;
  auto a = g.add_vertex({VertexKind::in});
  g.add_edge(g.source(), a, CapKind::infinite);
  g.add_edge(a, g.sink(), CapKind::alpha, 7);
  EXPECT_EQ(max_flow(g), 7);
}

TEST(MaxFlow, DisjointPathsAdd) {
  FlowGraph g;
  auto a = g.add_vertex({VertexKind::in});
  auto b = g.add_vertex({VertexKind::in});
  g.add_edge(g.source(), a, CapKind::alpha, 3);
  g.add_edge(g.source(), b, CapKind::alpha, 5);
  g.add_edge(a, g.sink(), CapKind::infinite);
  g.add_edge(b, g.sink(), CapKind::infinite);
  EXPECT_EQ(max_flow(g), 8);
}

TEST(MaxFlow, MatchesBruteForceCut) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 300; ++t) {
    auto g = random_dag(rng, 2 + rng() % 8);
    ASSERT_EQ(max_flow(g), brute_min_cut(g));
  }
}

TEST(MaxFlow, RaisingCapacityNeverLowersFlow) {
  const auto p = fig_params();
  const auto sc = adversarial_log_thm5(p);
  auto g = build_model1(p, 2, sc.log, sc.collector);
  const auto base = max_flow(g);
  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    auto h = g;
    if (h.edges()[i].kind == CapKind::infinite) continue;
    h.mutable_edges()[i].capacity += 3;
    ASSERT_GE(max_flow(h), base);
  }
}

TEST(Model1, HandCountedGraph) {
  const auto p = fig_params();
  const auto g = build_model1(p, p.alpha, fig1_log(), {0, 1});
  // Initial: 3 clusters x (2 in + 2 out + 1 ext) + source + sink.
  // Each repair adds one cluster version of 5 vertices.
  EXPECT_EQ(g.vertices().size(), 3u * 5 + 2 + 2 * 5);
  // Initial per cluster: 2 source edges, 2 in-out, 2 out-ext.
  // Per repair: 4 internal, 1 carried-over node, 2 remote, 1 local.
  // Collector: 2 sink edges.
  EXPECT_EQ(g.edges().size(), 3u * 6 + 2 * 8 + 2);
  EXPECT_EQ(g.count(CapKind::beta), 4u);
  EXPECT_EQ(g.count(CapKind::gamma), 2u);
  EXPECT_EQ(g.count(VertexKind::ext), 5u);
  EXPECT_TRUE(g.is_acyclic());
}

TEST(Model1, EmptyLogReadsWholeClusters) {
  for (const auto& p : desk_grid(4)) {
    std::vector<std::size_t> coll;
    for (std::int64_t i = 0; i < p.k; ++i) coll.push_back(static_cast<std::size_t>(i));
    const auto flow = max_flow(build_model1(p, p.alpha, EventLog{}, coll));
    ASSERT_EQ(flow, p.k * p.m * p.alpha);
    ASSERT_GE(flow, file_size_bound(p));
  }
}

TEST(Model1, TwoClusterPinCut) {
  const auto p = fig_params();
  const auto sc = adversarial_log_thm2(p);
  ASSERT_EQ(sc.log.events.size(), 2u);
  EXPECT_EQ(max_flow(build_model1(p, p.alpha, sc.log, sc.collector)), 2 * p.alpha + 3 * p.beta);
}

TEST(Model1, CollectorSizeChecked) {
  const auto p = fig_params();
  EXPECT_THROW(build_model1(p, p.alpha, EventLog{}, {0}), ParamError);
  EXPECT_THROW(build_model1(p, p.alpha, EventLog{}, {0, 0}), ParamError);
}

TEST(Model1, InvalidEventsRejected) {
  const auto p = fig_params();
  EventLog log;
  log.events.push_back({0, 1, {1}, {1, 2}, {}});
  EXPECT_THROW(build_model1(p, p.alpha, log, {0, 1}), ParamError);
  log.events = {{0, 1, {0}, {0, 2}, {}}};
  EXPECT_THROW(build_model1(p, p.alpha, log, {0, 1}), ParamError);
  log.events = {{0, 1, {0}, {1}, {}}};
  EXPECT_THROW(build_model1(p, p.alpha, log, {0, 1}), ParamError);
}

TEST(Model1, StaircaseLogMeetsBoundOnDeskGrid) {
  for (const auto& p : desk_grid(4)) {
    const auto sc = adversarial_log_thm2(p);
    ASSERT_EQ(sc.log.events.size(), static_cast<std::size_t>(p.k * (p.m - p.ell)));
    ASSERT_EQ(max_flow(build_model1(p, p.alpha, sc.log, sc.collector)), file_size_bound(p)) << p.describe();
  }
}

TEST(Model2, HandCountedGraph) {
  const auto p = fig_params();
  const auto g = build_model2(p, 1, 4, fig1_log(), {0, 1});
  // 12 physical vertices + source + sink; each repair adds in/out plus d ext;
  // the collector adds one ext per cluster read.
  EXPECT_EQ(g.vertices().size(), 12u + 2 + 2 * (2 + 2) + 2);
  // 6 source edges, 6 in-out; per repair 1 in-out, 1 local, d*(l'+1);
  // per collected cluster m alpha edges and one sink edge.
  EXPECT_EQ(g.edges().size(), 12u + 2 * (1 + 1 + 2 * 2) + 2 * 3);
  EXPECT_EQ(g.count(CapKind::gamma_prime), 4u);
  EXPECT_TRUE(g.is_acyclic());
}

TEST(Model2, EmptyLogReadsWholeClusters) {
  const auto p = fig_params();
  EXPECT_EQ(max_flow(build_model2(p, 1, 1, EventLog{}, {1, 2})), p.k * p.m * p.alpha);
}

TEST(Model2, RepeatedFailureRejected) {
  const auto p = fig_params();
  EventLog log;
  log.events.push_back({0, 1, {0}, {1, 2}, {}});
  log.events.push_back({0, 1, {0}, {1, 2}, {}});
  EXPECT_THROW(build_model2(p, 1, 4, log, {0, 1}), ParamError);
}

TEST(Model2, SlackRemoteHelpMatchesModel1) {
  for (const auto& p : desk_grid(4)) {
    const auto sc = adversarial_log_thm2(p);
    const auto m1 = max_flow(build_model1(p, p.alpha, sc.log, sc.collector));
    const auto m2 = max_flow(build_model2(p, p.m, p.alpha, sc.log, sc.collector));
    ASSERT_EQ(m1, m2) << p.describe();
  }
}

TEST(LocalHelperBound, CutFormulaAndThreshold) {
  for (const auto& p : desk_grid(4)) {
    if (p.ell == 0) continue;
    const auto sc = adversarial_log_thm5(p);
    ASSERT_EQ(sc.log.events.size(), static_cast<std::size_t>((p.k - 1) * (p.m - p.ell) + p.m - p.ell + 1));
    const auto bstar = file_size_bound(p);
    const auto gs = gamma_star(p);
    for (std::int64_t gamma = 0; gamma <= p.alpha; ++gamma) {
      const auto cut = max_flow(build_model1(p, gamma, sc.log, sc.collector));
      ASSERT_EQ(cut, std::min(thm5_cut_formula(p, gamma), bstar)) << p.describe() << " gamma=" << gamma;
      ASSERT_EQ(cut >= bstar, gamma >= gs);
    }
  }
}

TEST(LocalHelperBound, WithoutLocalHelpersGammaIsIdle) {
  const SystemParams p{4, 3, 3, 3, 1, 3, 0, 8};
  for (std::int64_t gamma = 0; gamma <= p.alpha; ++gamma) EXPECT_TRUE(verify_capacity(p, gamma).tight);
}

TEST(LocalHelperBound, SimulationPresetParameters) {
  const SystemParams p{3, 2, 2, 8, 4, 3, 2, 8};
  EXPECT_EQ(gamma_star(p), 4);
  EXPECT_TRUE(verify_capacity(p, 4).tight);
  const auto r = verify_capacity(p, 3);
  EXPECT_FALSE(r.tight);
  EXPECT_EQ(r.mincut, r.b_star - 1);
}

TEST(VerifyCapacity, SampledConverseHolds) {
  for (const auto& p : desk_grid(4)) {
    if (p.m > 2 || p.alpha != p.d * p.beta) continue;
    const auto r = verify_capacity(p, gamma_star(p), 20, 3);
    ASSERT_TRUE(r.tight) << p.describe();
    ASSERT_TRUE(r.sampled_ok) << p.describe();
    ASSERT_EQ(r.sampled, 20u);
  }
}

TEST(VerifyCapacity, FullLocalReadIsTight) {
  for (const auto& p : desk_grid(4)) ASSERT_TRUE(verify_capacity(p, p.alpha).tight) << p.describe();
}

TEST(RemoteHelperBound, PreconditionsChecked) {
  EXPECT_THROW(adversarial_log_thm6(SystemParams{5, 4, 3, 3, 1, 2, 1, 8}, 2), ParamError);
  EXPECT_THROW(adversarial_log_thm6(SystemParams{5, 3, 4, 2, 1, 2, 1, 8}, 2), ParamError);
}

TEST(RemoteHelperBound, GammaPrimeBoundary) {
  for (const auto& p : desk_grid(5)) {
    if (!gamma_prime_bound_applies(p)) continue;
    const auto sc = adversarial_log_thm6(p, p.m);
    const auto bstar = file_size_bound(p);
    for (std::int64_t gp = 0; gp <= p.alpha; ++gp) {
      const auto cut = max_flow(build_model2(p, p.m, gp, sc.log, sc.collector));
      ASSERT_LE(cut, thm6_cut_formula(p, gp)) << p.describe();
      if ((p.m - p.ell) * gp < p.beta) {
        ASSERT_LT(cut, bstar) << p.describe() << " gp=" << gp;
      }
    }
    if (p.beta % (p.m - p.ell) == 0) {
      const auto gp = p.beta / (p.m - p.ell);
      ASSERT_GE(max_flow(build_model2(p, p.m, gp, sc.log, sc.collector)), bstar) << p.describe();
    }
  }
}

TEST(RemoteHelperBound, TooFewContributorsLoseCapacity) {
  for (const auto& p : desk_grid(5)) {
    if (!gamma_prime_bound_applies(p) || p.m == 1) continue;
    const auto bstar = file_size_bound(p);
    for (std::int64_t lp = 1; lp < p.m; ++lp) {
      const auto sc = adversarial_log_thm6(p, lp);
      ASSERT_LT(max_flow(build_model2(p, lp, p.alpha, sc.log, sc.collector)), bstar)
          << p.describe() << " ell'=" << lp;
    }
  }
}

TEST(RandomScenario, ProducesValidLogs) {
  std::mt19937_64 rng(4);
  const SystemParams p{5, 3, 3, 3, 1, 3, 1, 8};
  const auto sc = random_scenario(p, 40, rng);
  EXPECT_EQ(sc.log.events.size(), 40u);
  const auto f = sc.log.failure_counts(5);
  for (auto c : f) EXPECT_GE(c, 3u);
  EXPECT_NO_THROW(build_model1(p, 1, sc.log, sc.collector));
}
