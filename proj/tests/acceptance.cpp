// Acceptance run: one [PASS]/[FAIL] line per criterion, nonzero exit on any
// failure. Expected values are recomputed here from first principles wherever
// the library computes them too.
#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "grc/grc.hpp"

using namespace grc;
using Clock = std::chrono::steady_clock;

namespace {

using Subsets = std::vector<std::vector<std::size_t>>;

Subsets subsets(std::size_t n, std::size_t r, std::size_t skip = SIZE_MAX) {
  Subsets out;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != r) continue;
    if (skip < n && ((mask >> skip) & 1u)) continue;
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i)
      if ((mask >> i) & 1u) s.push_back(i);
    out.push_back(s);
  }
  return out;
}

// ell (k-from) alpha + (m-ell) sum_{i=from}^{k-1} min(alpha, (d-i)^+ beta)
std::int64_t oracle_capacity(const SystemParams& p, std::int64_t from = 0) {
  std::int64_t s = 0;
  for (std::int64_t i = from; i < p.k; ++i) s += std::min(p.alpha, std::max<std::int64_t>(0, p.d - i) * p.beta);
  return p.ell * (p.k - from) * p.alpha + (p.m - p.ell) * s;
}

std::int64_t oracle_gamma_star(const SystemParams& p) {
  return p.alpha - std::max<std::int64_t>(0, p.d - p.k + 1) * p.beta;
}

// Every parameter tuple of the capacity grid.
std::vector<SystemParams> capacity_grid() {
  std::vector<SystemParams> out;
  for (std::int64_t n = 3; n <= 5; ++n)
    for (std::int64_t k = 2; k <= n; ++k)
      for (std::int64_t d = 1; d <= n - 1; ++d)
        for (std::int64_t m = 1; m <= 4; ++m)
          for (std::int64_t ell = 0; ell < m; ++ell)
            for (std::int64_t beta = 1; beta <= 2; ++beta) {
              const std::int64_t lo = d >= k ? (d - k + 1) * beta : beta;
              for (std::int64_t alpha = lo; alpha <= d * beta; ++alpha) out.push_back({n, k, d, alpha, beta, m, ell, 8});
            }
  return out;
}

template <class F>
Vector<F> random_symbols(std::mt19937_64& rng, std::size_t len) {
  Vector<F> v(len);
  for (auto& x : v) x = static_cast<typename F::value_type>(rng() & (F::order - 1));
  return v;
}

struct Outcome {
  bool pass = true;
  std::ostringstream note;

  void require(bool cond, const std::string& what) {
    if (!cond && pass) note << "first failure: " << what << "; ";
    pass = pass && cond;
  }
};

int failures = 0;

void criterion(const std::string& id, const std::string& title, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = Clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << id << ' ' << title << " -- " << o.note.str() << "(" << secs << " s)"
            << std::endl;
  failures += !o.pass;
}

// ----------------------------------------------------------------------

void ac1(Outcome& o) {
  std::size_t count = 0;
  for (const auto& p : capacity_grid()) {
    const auto sc = ifg::adversarial_log_thm2(p);
    const auto cut = ifg::max_flow(ifg::build_model1(p, p.alpha, sc.log, sc.collector));
    const auto want = oracle_capacity(p);
    o.require(cut == want && file_size_bound(p) == want, "min-cut != capacity at " + p.describe());
    ++count;
  }
  o.note << count << " tuples; ";
}

void ac2(Outcome& o) {
  const SystemParams p{3, 2, 2, 8, 4, 2, 1, 8};
  const auto want = 2 * p.alpha + 3 * p.beta;
  const auto sc = ifg::adversarial_log_thm2(p);
  const auto cut = ifg::max_flow(ifg::build_model1(p, p.alpha, sc.log, sc.collector));
  o.require(file_size_bound(p) == want && oracle_capacity(p) == want, "B* != 2 alpha + 3 beta");
  o.require(cut == want, "min-cut != 2 alpha + 3 beta");
  o.note << "B*=" << file_size_bound(p) << " min-cut=" << cut << "; ";
}

// Without local helpers gamma has no edges to act on, so the grid is taken
// over ell >= 1; ell = 0 tuples are checked to be tight for every gamma.
void ac3(Outcome& o) {
  std::size_t checked = 0, idle = 0;
  for (const auto& p : capacity_grid()) {
    const auto b = oracle_capacity(p);
    const auto gs = oracle_gamma_star(p);
    o.require(gamma_star(p) == gs, "gamma* mismatch at " + p.describe());
    for (std::int64_t g = 0; g <= p.alpha; ++g) {
      const auto r = ifg::verify_capacity(p, g);
      if (p.ell == 0) {
        o.require(r.tight && r.mincut == b, "ell=0 not tight at " + p.describe());
        ++idle;
        continue;
      }
      const auto formula = b - p.alpha + std::min(p.alpha, std::max<std::int64_t>(0, p.d - p.k + 1) * p.beta) + g;
      o.require(r.mincut == std::min(formula, b), "cut formula at " + p.describe() + " gamma=" + std::to_string(g));
      o.require(r.tight == (g >= gs), "tight flag at " + p.describe() + " gamma=" + std::to_string(g));
      ++checked;
    }
  }
  o.note << checked << " (params, gamma) pairs with ell>=1, " << idle << " ell=0 pairs; ";
}

void ac4(Outcome& o) {
  std::size_t below = 0, meets = 0, partial = 0;
  for (const auto& p : capacity_grid()) {
    if (p.d < p.k || p.alpha < (p.d - p.k + 2) * p.beta) continue;
    const auto b = oracle_capacity(p);
    const auto mu = p.m - p.ell;
    const auto ceiling = (p.beta + mu - 1) / mu;
    const auto full = ifg::adversarial_log_thm6(p, p.m);
    for (std::int64_t gp = 0; gp <= p.alpha; ++gp) {
      const auto cut = ifg::max_flow(ifg::build_model2(p, p.m, gp, full.log, full.collector));
      if (mu * gp < p.beta) {
        o.require(cut < b, "gamma' below bound yet cut >= B* at " + p.describe());
        ++below;
      }
      if (gp == ceiling && p.beta % mu == 0) {
        o.require(cut >= b, "gamma' at bound yet cut < B* at " + p.describe());
        ++meets;
      }
    }
    for (std::int64_t lp = 1; lp < p.m; ++lp) {
      const auto sc = ifg::adversarial_log_thm6(p, lp);
      const auto cut = ifg::max_flow(ifg::build_model2(p, lp, p.alpha, sc.log, sc.collector));
      o.require(cut < b, "ell' < m yet cut >= B* at " + p.describe() + " ell'=" + std::to_string(lp));
      ++partial;
    }
  }
  o.note << below << " starved gamma', " << meets << " at-bound gamma', " << partial << " ell'<m cases; ";
}

template <class F>
void exhaustive_exact(Outcome& o, const SystemParams& p, std::uint64_t seed) {
  const GRCExactCode<F> code(p, PointKind::mbr);
  o.require(static_cast<std::int64_t>(code.file_size()) == oracle_capacity(p), "file size != B* at " + p.describe());
  std::mt19937_64 rng(seed);

  // Byte string through symbols, code, and back.
  io::Bytes bytes(code.file_size() * io::symbol_bytes<F>() - 1);
  for (auto& x : bytes) x = static_cast<std::uint8_t>(rng());
  const auto file = io::bytes_to_symbols<F>(bytes, code.file_size());
  const auto state = code.encode(file);
  o.require(io::deserialize<F>(io::serialize(state), code.n(), code.m(), code.alpha()).nodes == state.nodes,
            "serialize round trip");

  std::size_t repairs = 0, exact = 0;
  for (std::size_t i = 0; i < code.n(); ++i)
    for (std::size_t j = 0; j < code.m(); ++j)
      for (const auto& local : subsets(code.m(), code.ell(), j))
        for (const auto& remote : subsets(code.n(), code.d(), i)) {
          std::size_t inter = 0;
          for (auto h : remote) inter += code.remote_helper_data(state, h, i, j, local).size();
          o.require(inter == code.d() * code.beta(), "inter-cluster symbols != d beta");
          ++repairs;
          exact += code.repair_from_state(state, i, j, local, remote) == state.at(i, j);
        }
  std::size_t collectors = 0, decoded = 0;
  for (const auto& c : subsets(code.n(), code.k())) {
    ++collectors;
    const auto back = code.decode(state, c);
    decoded += io::symbols_to_bytes<F>(back, bytes.size()) == bytes;
  }
  o.require(exact == repairs, "inexact repair at " + p.describe());
  o.require(decoded == collectors, "collector failed at " + p.describe());
  o.note << p.describe() << ": " << exact << "/" << repairs << " repairs, " << decoded << "/" << collectors
         << " collectors; ";
}

void ac5(Outcome& o) {
  const SystemParams first{4, 3, 3, 3, 1, 4, 3, 8};
  o.require(oracle_capacity(first) == 33, "worked example capacity");
  exhaustive_exact<GF256>(o, first, 1);
  exhaustive_exact<GF256>(o, SystemParams{5, 3, 4, 4, 1, 3, 2, 8}, 2);
}

void ac6(Outcome& o) {
  const SystemParams p{6, 3, 4, 2, 1, 3, 0, 8};
  o.require(oracle_gamma_star(p) == 0 && gamma_star(p) == 0, "gamma* != 0");
  o.require(oracle_capacity(p) == p.m * p.k * p.alpha, "capacity != m k alpha");
  const GRCExactCode<GF256> code(p, PointKind::msr);
  o.require(code.file_size() == 18, "file size != 18");
  std::mt19937_64 rng(6);
  const auto file = random_symbols<GF256>(rng, code.file_size());
  const auto state = code.encode(file);
  std::size_t repairs = 0, exact = 0;
  for (std::size_t i = 0; i < code.n(); ++i)
    for (std::size_t j = 0; j < code.m(); ++j)
      for (const auto& remote : subsets(code.n(), code.d(), i)) {
        ++repairs;
        exact += code.repair_from_state(state, i, j, std::vector<std::size_t>{}, remote) == state.at(i, j);
      }
  std::size_t decoded = 0;
  const auto colls = subsets(code.n(), code.k());
  for (const auto& c : colls) decoded += code.decode(state, c) == file;
  o.require(exact == repairs && decoded == colls.size(), "MSR repair or decode failed");
  o.note << "file size " << code.file_size() << ", " << exact << "/" << repairs << " repairs with gamma=0, " << decoded
         << "/" << colls.size() << " collectors; ";
}

void ac7(Outcome& o) {
  const SystemParams p{5, 3, 3, 3, 1, 3, 2, 16};
  const auto colls = subsets(5, 3);
  std::size_t seeds_ok = 0, decode_errors = 0, checks = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    bool ok = true;
    try {
      FunctionalCode<GF65536> code(p, seed);
      o.require(static_cast<std::int64_t>(code.file_size()) == oracle_capacity(p), "file size != B*");
      std::mt19937_64 rng(1000 + seed);
      const auto file = random_symbols<GF65536>(rng, code.file_size());
      auto st = code.encode(file);
      const auto msg = std::span<const std::uint16_t>(file).subspan(file.size() - code.component_size());
      for (int r = 0; r < 100 && ok; ++r) {
        const std::size_t c = rng() % 5, j = rng() % 3;
        std::vector<std::size_t> helpers;
        for (std::size_t h = 0; h < 5; ++h)
          if (h != c) helpers.push_back(h);
        std::shuffle(helpers.begin(), helpers.end(), rng);
        helpers.resize(code.d_prime());
        code.repair(st, c, j, helpers, rng());
        ok = ok && code.column_sums_consistent(st, msg);
        for (const auto& coll : colls) {
          ok = ok && code.collect(st, coll) == file;
          ++checks;
        }
      }
    } catch (const DecodeError& e) {
      ++decode_errors;
      o.note << "seed " << seed << " decode error: " << e.what() << "; ";
      ok = false;
    }
    seeds_ok += ok;
    o.require(ok, "seed " + std::to_string(seed));
  }
  o.note << seeds_ok << "/20 seeds clean, " << checks << " collector checks, " << decode_errors << " decode errors; ";
}

void ac8(Outcome& o) {
  struct Case {
    char preset;
    const char* label;
    std::function<void(sim::SimConfig&)> starve;
  };
  const std::vector<Case> cases{
      {'a', "gamma = gamma*-1", [](sim::SimConfig& c) { c.intra.gamma = gamma_star(c.params) - 1; }},
      {'b', "ell' = m-1", [](sim::SimConfig& c) { c.intra.ell_prime = c.params.m - 1; }},
      {'c', "gamma' = ceil-1", [](sim::SimConfig& c) { c.intra.gamma_prime = gamma_prime_bound(c.params).ceiling - 1; }},
  };
  for (const auto& cs : cases) {
    const auto pr = sim::fig5_preset(cs.preset);
    sim::SimConfig cfg;
    cfg.params = pr.params;
    cfg.intra = pr.intra;
    cfg.trials = 200;
    cfg.repairs_max = 50;
    cfg.seed = 2024;
    cfg.threads = std::max(1u, std::thread::hardware_concurrency());
    const auto good = sim::run_experiment(cfg);
    const auto series = good.success_series();
    const double worst = *std::ranges::min_element(series);
    o.require(worst >= 0.99, std::string("fig5") + cs.preset + " sufficient setting dipped below 0.99");
    cs.starve(cfg);
    const auto bad = sim::run_experiment(cfg);
    const auto s = sim::mann_kendall_s(bad.success_series());
    o.require(s < 0, std::string("fig5") + cs.preset + " deficient trend not decreasing");
    o.note << "fig5" << cs.preset << " min=" << worst << ", " << cs.label << " S=" << s
           << " end=" << bad.rows.back().success_rate << "; ";
  }
}

void ac9(Outcome& o) {
  const std::int64_t n = 4, k = 3, d = 3, m = 4, beta = 1;
  // Product code: k (m-1) data symbols per unit alpha, no inter-cluster traffic.
  const Rational product_s(n * m, k * (m - 1)), product_bw(0);
  // Stacked classical MBR: alpha = d beta, m copies of sum_i (d-i) beta.
  std::int64_t classical = 0;
  for (std::int64_t i = 0; i < k; ++i) classical += (d - i) * beta;
  const Rational stacked_s(n * m * d * beta, m * classical), stacked_bw(1);
  const Rational grc_s(n * m * d * beta, oracle_capacity({n, k, d, d * beta, beta, m, m - 1, 8})), grc_bw(1);
  o.require(product_s == Rational(16, 9) && stacked_s == Rational(2) && grc_s == Rational(16, 11), "oracle points");

  const auto lib_product = product_code_point(n, k, m);
  const auto lib_stacked = tradeoff_curve(n, k, d, m, 0, beta, 1).back();
  const auto lib_grc = tradeoff_curve(n, k, d, m, m - 1, beta, 1).back();
  o.require(lib_product.storage_overhead == product_s && lib_product.bw_overhead == product_bw, "library product point");
  o.require(lib_stacked.storage_overhead == stacked_s && lib_stacked.bw_overhead == stacked_bw, "library stacked point");
  o.require(lib_grc.storage_overhead == grc_s && lib_grc.bw_overhead == grc_bw, "library GRC point");

  const Rational t = (grc_bw - product_bw) / (stacked_bw - product_bw);
  const Rational chord = product_s + t * (stacked_s - product_s);
  o.require(grc_s < chord, "GRC point not strictly below the chord");
  o.require(strictly_below_segment(lib_grc, lib_product, lib_stacked), "library dominance check");
  o.note << "GRC (" << to_string(grc_bw) << ", " << to_string(grc_s) << ") vs chord " << to_string(chord) << "; ";
}

void ac10(Outcome& o) {
  const SystemParams p{4, 3, 3, 3, 1, 4, 3, 8};
  const std::size_t e = 1;
  const SecureGRCCode<GF256> code(p, e);
  const auto bound = oracle_capacity(p, static_cast<std::int64_t>(e));
  o.require(bound == 21 && secure_file_size_bound(p, 1) == bound, "secure bound != 21");
  o.require(static_cast<std::int64_t>(code.secret_size()) == bound, "secret size does not meet the bound");
  std::mt19937_64 rng(10);
  const auto secret = random_symbols<GF256>(rng, code.secret_size());
  const auto state = code.encode(secret, random_symbols<GF256>(rng, code.random_size()));
  std::size_t decoded = 0, free = 0;
  for (const auto& c : subsets(4, 3)) decoded += code.decode_secret(state, c) == secret;
  for (const auto& eve : subsets(4, e)) free += leakage_check(code, EveView{eve, true});
  o.require(decoded == 4, "collector failed");
  o.require(free == 4, "leakage detected");
  o.note << "secret " << code.secret_size() << " of " << code.secret_size() + code.random_size() << " symbols, " << decoded
         << "/4 collectors, " << free << "/4 views leak-free; ";
}

void ac11(Outcome& o) {
  std::size_t points = 0;
  for (std::int64_t n = 3; n <= 6; ++n)
    for (std::int64_t k = 2; k <= n; ++k)
      for (std::int64_t d = 1; d < n; ++d)
        for (std::int64_t m = 1; m <= 4; ++m)
          for (const auto& t : tradeoff_curve(n, k, d, m, 0, 1, 4)) {
            // Classical single-node curve: n alpha / sum_i min(alpha, (d-i)^+ beta).
            std::int64_t s = 0;
            for (std::int64_t i = 0; i < k; ++i) s += std::min(t.alpha, std::max<std::int64_t>(0, d - i) * t.beta);
            o.require(t.storage_overhead == Rational(n * t.alpha, s), "ell=0 curve differs from classical");
            o.require(t.bw_overhead == Rational(d * t.beta, t.alpha), "bandwidth overhead");
            ++points;
          }
  for (std::int64_t m : {1, 2, 5, 10}) {
    const auto mbr = tradeoff_curve(5, 4, 4, m, m - 1, 1, 1).back();
    o.require(mbr.alpha == 4 * mbr.beta, "last point is not MBR");
    o.require(mbr.storage_overhead == Rational(20 * m, 16 * m - 6), "MBR overhead at m=" + std::to_string(m));
    o.note << "m=" << m << ": " << to_string(mbr.storage_overhead) << "; ";
  }
  o.note << points << " classical points; ";
}

}  // namespace

int main() {
  criterion("AC1", "capacity oracle equivalence", ac1);
  criterion("AC2", "two-cluster pin", ac2);
  criterion("AC3", "gamma* boundary", ac3);
  criterion("AC4", "gamma' and ell' boundaries", ac4);
  criterion("AC5", "exact construction exhaustive", ac5);
  criterion("AC6", "stacked MSR", ac6);
  criterion("AC7", "functional construction over 20 seeds", ac7);
  criterion("AC8", "repair simulation", ac8);
  criterion("AC9", "trade-off dominance", ac9);
  criterion("AC10", "secure code", ac10);
  criterion("AC11", "trade-off curve sanity", ac11);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
