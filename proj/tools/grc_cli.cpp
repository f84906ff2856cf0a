#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "grc/bounds.hpp"
#include "grc/grc_exact.hpp"
#include "grc/ifg.hpp"
#include "grc/io.hpp"
#include "grc/secure.hpp"
#include "grc/simulator.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace grc;

namespace {

// Exit codes.
constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kBadParams = 2;
constexpr int kBadFormat = 3;
constexpr int kInternal = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::map<std::string, std::map<std::string, std::int64_t>>& presets() {
  static const auto table = [] {
    std::map<std::string, std::map<std::string, std::int64_t>> t;
    t["sec1e"] = {{"n", 4}, {"k", 3}, {"d", 3}, {"alpha", 3}, {"beta", 1}, {"m", 4}, {"ell", 3}, {"e", 1}};
    t["fig2"] = {{"n", 5}, {"k", 4}, {"d", 4}, {"beta", 1}};
    t["fig4"] = {{"n", 12}, {"k", 8}, {"d", 11}, {"alpha", 22}, {"beta", 2}, {"m", 10}};
    t["fig6"] = {{"n", 4}, {"k", 3}, {"d", 3}, {"alpha", 3}, {"beta", 1}, {"m", 4}, {"ell", 3}};
    t["fig7"] = {{"n", 3}, {"k", 2}, {"d", 2}, {"alpha", 8}, {"beta", 4}, {"m", 2}, {"ell", 1}};
    for (char c : {'a', 'b', 'c'}) {
      const auto pr = sim::fig5_preset(c);
      t[std::string("fig5") + c] = {{"n", pr.params.n},         {"k", pr.params.k},
                                    {"d", pr.params.d},         {"alpha", pr.params.alpha},
                                    {"beta", pr.params.beta},   {"m", pr.params.m},
                                    {"ell", pr.params.ell},     {"field", pr.params.field_width},
                                    {"gamma", pr.intra.gamma},  {"ell-prime", pr.intra.ell_prime},
                                    {"gamma-prime", pr.intra.gamma_prime},
                                    {"trials", 200},            {"repairs", 50}};
    }
    return t;
  }();
  return table;
}

// Option values for one subcommand. Lookup order: command line, --config
// file, --preset, caller default.
class Knobs {
 public:
  explicit Knobs(CLI::App* app) : app_(app) {
    app_->add_option("--preset", preset_, "named parameter set");
    app_->add_option("--config", config_path_, "JSON file supplying options not given on the command line");
  }

  void ints(std::initializer_list<const char*> names) {
    for (const char* name : names) {
      auto& slot = ints_[name];
      opts_[name] = app_->add_option(std::string("--") + name, slot);
    }
  }

  void str(const char* name, const std::string& help) {
    auto& slot = strs_[name];
    opts_[name] = app_->add_option(std::string("--") + name, slot, help);
  }

  void list(const char* name, const std::string& help) {
    auto& slot = lists_[name];
    opts_[name] = app_->add_option(std::string("--") + name, slot, help)->delimiter(',');
  }

  void flag(const char* name, const std::string& help) {
    auto& slot = flags_[name];
    opts_[name] = app_->add_flag(std::string("--") + name, slot, help);
  }

  // Called once the command line has been parsed.
  void load() {
    if (!config_path_.empty()) {
      std::ifstream in(config_path_);
      if (!in) throw UsageError("cannot open config file " + config_path_);
      try {
        in >> config_;
      } catch (const json::exception& e) {
        throw UsageError(std::string("config file is not valid JSON: ") + e.what());
      }
      if (!config_.is_object()) throw UsageError("config file must hold a JSON object");
      json normalized = json::object();
      for (auto& [key, value] : config_.items()) {
        std::string k = key;
        std::ranges::replace(k, '_', '-');
        normalized[k] = value;
      }
      config_ = std::move(normalized);
      if (preset_.empty() && config_.contains("preset")) preset_ = config_["preset"].get<std::string>();
    }
    if (!preset_.empty() && !presets().contains(preset_)) throw UsageError("unknown preset " + preset_);
  }

  const std::string& preset() const { return preset_; }

  bool given(const std::string& name) const { return opts_.contains(name) && opts_.at(name)->count() > 0; }

  std::optional<std::int64_t> get(const std::string& name) const {
    if (given(name)) return ints_.at(name);
    if (config_.contains(name)) return config_[name].get<std::int64_t>();
    if (!preset_.empty()) {
      const auto& p = presets().at(preset_);
      if (auto it = p.find(name); it != p.end()) return it->second;
    }
    return std::nullopt;
  }

  std::int64_t get_or(const std::string& name, std::int64_t fallback) const { return get(name).value_or(fallback); }

  std::int64_t need(const std::string& name) const {
    if (auto v = get(name)) return *v;
    throw UsageError("missing --" + name);
  }

  std::string get_str(const std::string& name, const std::string& fallback = "") const {
    if (given(name)) return strs_.at(name);
    if (config_.contains(name)) return config_[name].get<std::string>();
    return fallback;
  }

  std::optional<std::vector<std::size_t>> get_list(const std::string& name) const {
    if (given(name)) return lists_.at(name);
    if (config_.contains(name)) return config_[name].get<std::vector<std::size_t>>();
    return std::nullopt;
  }

  bool get_flag(const std::string& name) const {
    if (given(name)) return flags_.at(name);
    if (config_.contains(name)) return config_[name].get<bool>();
    return false;
  }

 private:
  CLI::App* app_;
  std::string preset_;
  std::string config_path_;
  json config_ = json::object();
  std::map<std::string, std::int64_t> ints_;
  std::map<std::string, std::string> strs_;
  std::map<std::string, std::vector<std::size_t>> lists_;
  std::map<std::string, bool> flags_;
  std::map<std::string, CLI::Option*> opts_;
};

PointKind parse_point(const std::string& s) {
  if (s == "mbr") return PointKind::mbr;
  if (s == "msr") return PointKind::msr;
  throw UsageError("--point must be mbr or msr");
}

// alpha defaults to the operating point named by --point (MBR unless given).
SystemParams system_params(const Knobs& k) {
  SystemParams p;
  p.n = k.need("n");
  p.k = k.need("k");
  p.d = k.need("d");
  p.beta = k.get_or("beta", p.d > 0 ? 1 : 0);
  p.m = k.get_or("m", 1);
  p.ell = k.get_or("ell", 0);
  p.field_width = static_cast<unsigned>(k.get_or("field", 8));
  if (auto a = k.get("alpha")) {
    p.alpha = *a;
  } else if (p.d == 0) {
    p.alpha = 1;
  } else {
    const auto [msr, mbr] = operating_points(p.n, p.k, p.d, p.beta);
    p.alpha = parse_point(k.get_str("point", "mbr")) == PointKind::msr ? msr.alpha : mbr.alpha;
  }
  p.validate();
  return p;
}

json params_json(const SystemParams& p) {
  return {{"n", p.n}, {"k", p.k}, {"d", p.d}, {"alpha", p.alpha}, {"beta", p.beta}, {"m", p.m}, {"ell", p.ell}};
}

json rational_json(const Rational& r) { return to_string(r); }

template <class Fn>
decltype(auto) with_field(unsigned width, Fn&& fn) {
  if (width == 8) return fn(std::type_identity<GF256>{});
  if (width == 16) return fn(std::type_identity<GF65536>{});
  throw UsageError("--field must be 8 or 16");
}

io::Bytes read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io::FormatError("cannot read " + path.string());
  return io::Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const fs::path& path, const io::Bytes& data) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw io::FormatError("cannot write " + path.string());
}

fs::path node_path(const fs::path& dir, std::size_t cluster, std::size_t node) {
  return dir / ("node_" + std::to_string(cluster) + "_" + std::to_string(node) + ".grc");
}

struct NodeFile {
  io::NodeFileHeader header;
  io::Bytes body;
};

NodeFile load_node(const fs::path& dir, std::size_t cluster, std::size_t node) {
  const auto bytes = read_file(node_path(dir, cluster, node));
  NodeFile f;
  f.header = io::read_header(bytes);
  if (f.header.cluster != cluster || f.header.node != node)
    throw io::FormatError("corrupt header: node index does not match file name");
  f.body.assign(bytes.begin() + io::NodeFileHeader::size, bytes.end());
  if (f.body.size() != io::body_size(f.header)) throw io::FormatError("corrupt node file: body size mismatch");
  return f;
}

void require_same_layout(const io::NodeFileHeader& a, const io::NodeFileHeader& b) {
  if (!(a.params == b.params) || a.point != b.point || a.file_length != b.file_length || a.generations != b.generations)
    throw io::FormatError("node files disagree on code parameters");
}

template <class F>
NodeVector<F> generation_of(const NodeFile& f, std::size_t g) {
  const auto alpha = static_cast<std::size_t>(f.header.params.alpha);
  std::size_t pos = g * alpha * io::symbol_bytes<F>();
  return io::read_symbols<F>(f.body, pos, alpha);
}

void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

// Writes CSV to --out when given, stdout otherwise.
void emit_csv(const Knobs& k, const std::string& text) {
  const auto out = k.get_str("out");
  if (out.empty()) {
    std::cout << text;
  } else {
    write_file(out, io::Bytes(text.begin(), text.end()));
  }
}

std::vector<std::size_t> default_range(std::size_t from, std::size_t count, std::size_t skip, std::size_t bound) {
  std::vector<std::size_t> v;
  for (std::size_t i = from; i < bound && v.size() < count; ++i)
    if (i != skip) v.push_back(i);
  return v;
}

// ---------------------------------------------------------------- bounds

int cmd_bounds(const Knobs& k) {
  const auto p = system_params(k);
  json out;
  out["params"] = params_json(p);
  out["B_star"] = file_size_bound(p);
  if (auto e = k.get("e")) out["B_secure"] = secure_file_size_bound(p, *e);
  if (p.d > 0) {
    out["gamma_star"] = gamma_star(p);
    if (gamma_prime_bound_applies(p)) {
      const auto g = gamma_prime_bound(p);
      out["gamma_prime_bound"] = {{"value", rational_json(g.value)}, {"ceiling", g.ceiling}, {"ell_prime", g.ell_prime}};
    }
    const auto [msr, mbr] = operating_points(p.n, p.k, p.d, p.beta);
    out["operating_points"] = {{"msr", {{"alpha", msr.alpha}, {"beta", msr.beta}}},
                               {"mbr", {{"alpha", mbr.alpha}, {"beta", mbr.beta}}}};
  }
  emit(out);
  return kOk;
}

// -------------------------------------------------------------- tradeoff

constexpr const char* kTradeoffHeader = "family,m,ell,alpha,beta,storage_overhead,bw_overhead,storage_overhead_f,bw_overhead_f\n";

void tradeoff_row(std::ostream& os, const std::string& family, std::int64_t m, std::int64_t ell, const TradeoffPoint& t) {
  os << family << ',' << m << ',' << ell << ',' << t.alpha << ',' << t.beta << ',' << to_string(t.storage_overhead) << ','
     << to_string(t.bw_overhead) << ',' << to_double(t.storage_overhead) << ',' << to_double(t.bw_overhead) << '\n';
}

int cmd_tradeoff(const Knobs& k) {
  const auto preset = k.preset();
  const auto samples = k.get_or("samples", 1);
  std::ostringstream os;
  bool ok = true;

  if (preset == "fig4") {
    const auto n = k.need("n"), kk = k.need("k"), d = k.need("d"), beta = k.need("beta"), m = k.need("m");
    const auto [msr, mbr] = operating_points(n, kk, d, beta);
    const auto point = parse_point(k.get_str("point", "mbr")) == PointKind::msr ? msr : mbr;
    os << "ell,storage_overhead,storage_overhead_f,inter_bw,gamma_star,helper_intra_bw\n";
    for (const auto& r : system_metrics_vs_ell(n, kk, d, beta, m, point)) {
      os << r.ell << ',' << to_string(r.storage_overhead) << ',' << to_double(r.storage_overhead) << ',' << r.inter_bw << ','
         << r.gamma_star << ',' << (r.helper_intra_bw ? to_string(*r.helper_intra_bw) : "NA") << '\n';
    }
    emit_csv(k, os.str());
    return kOk;
  }

  os << kTradeoffHeader;
  const auto n = k.need("n"), kk = k.need("k"), d = k.need("d"), beta = k.get_or("beta", 1);

  if (preset == "fig2") {
    std::vector<std::int64_t> ms{1, 2, 5, 10};
    if (auto m = k.get("m")) ms = {*m};
    for (auto m : ms) {
      const auto curve = tradeoff_curve(n, kk, d, m, m - 1, beta, samples);
      for (const auto& t : curve) tradeoff_row(os, "grc", m, m - 1, t);
      // At (5,4,4) the MBR end sits at 20m/(16m-6).
      if (n == 5 && kk == 4 && d == 4) {
        const Rational want(20 * m, 16 * m - 6);
        if (curve.back().storage_overhead != want) {
          std::cerr << "check failed: m=" << m << " MBR overhead " << to_string(curve.back().storage_overhead)
                    << " != " << to_string(want) << '\n';
          ok = false;
        }
      }
    }
    emit_csv(k, os.str());
    return ok ? kOk : kCheckFailed;
  }

  const auto m = k.get_or("m", 1);
  if (preset == "fig6" || k.get_str("family") == "all") {
    const auto product = product_code_point(n, kk, m);
    tradeoff_row(os, "product", m, m - 1, product);
    const auto stacked = tradeoff_curve(n, kk, d, m, 0, beta, samples);
    for (const auto& t : stacked) tradeoff_row(os, "stacked", m, 0, t);
    const auto grc_curve = tradeoff_curve(n, kk, d, m, m - 1, beta, samples);
    for (const auto& t : grc_curve) tradeoff_row(os, "grc", m, m - 1, t);
    const bool below = strictly_below_segment(grc_curve.back(), product, stacked.back());
    std::cerr << "grc MBR point (" << to_string(grc_curve.back().bw_overhead) << ", "
              << to_string(grc_curve.back().storage_overhead) << ") "
              << (below ? "lies strictly below" : "does not lie below") << " the product/stacked segment\n";
    ok = below;
    emit_csv(k, os.str());
    return ok ? kOk : kCheckFailed;
  }

  const auto family = k.get_str("family", "grc");
  if (family == "product") {
    tradeoff_row(os, "product", m, m - 1, product_code_point(n, kk, m));
  } else if (family == "stacked" || family == "classical") {
    for (const auto& t : tradeoff_curve(n, kk, d, m, 0, beta, samples)) tradeoff_row(os, family, m, 0, t);
  } else if (family == "grc") {
    const auto ell = k.get_or("ell", m - 1);
    for (const auto& t : tradeoff_curve(n, kk, d, m, ell, beta, samples)) tradeoff_row(os, "grc", m, ell, t);
  } else {
    throw UsageError("--family must be grc, stacked, classical, product or all");
  }
  emit_csv(k, os.str());
  return kOk;
}

// ------------------------------------------------- encode / repair / collect

template <class F>
int encode_in(const Knobs& k, const SystemParams& p, PointKind point) {
  const GRCExactCode<F> code(p, point);
  const auto input = k.get_str("input");
  const auto dir = k.get_str("out");
  if (input.empty() || dir.empty()) throw UsageError("encode needs --input and --out <dir>");
  const auto data = read_file(input);
  const auto fs_sym = code.file_size();
  const auto symbols = io::bytes_to_symbols<F>(data, fs_sym);
  const std::size_t gens = symbols.size() / fs_sym;

  std::vector<std::vector<io::Bytes>> bodies(code.n(), std::vector<io::Bytes>(code.m()));
  for (std::size_t g = 0; g < gens; ++g) {
    const auto state = code.encode(std::span<const typename F::value_type>(symbols).subspan(g * fs_sym, fs_sym));
    for (std::size_t i = 0; i < code.n(); ++i)
      for (std::size_t j = 0; j < code.m(); ++j) io::append_symbols<F>(bodies[i][j], state.at(i, j));
  }
  for (std::size_t i = 0; i < code.n(); ++i)
    for (std::size_t j = 0; j < code.m(); ++j) {
      io::NodeFileHeader h;
      h.params = p;
      h.point = point;
      h.file_length = data.size();
      h.generations = gens;
      h.cluster = static_cast<std::uint32_t>(i);
      h.node = static_cast<std::uint32_t>(j);
      auto bytes = io::write_header(h);
      bytes.insert(bytes.end(), bodies[i][j].begin(), bodies[i][j].end());
      write_file(node_path(dir, i, j), bytes);
    }
  emit({{"params", params_json(p)},
        {"point", to_string(point)},
        {"field", p.field_width},
        {"file_length", data.size()},
        {"file_size_symbols", fs_sym},
        {"generations", gens},
        {"node_files", code.n() * code.m()},
        {"dir", dir}});
  return kOk;
}

int cmd_encode(const Knobs& k) {
  const auto p = system_params(k);
  const auto point = parse_point(k.get_str("point", "mbr"));
  return with_field(p.field_width, [&](auto tag) { return encode_in<typename decltype(tag)::type>(k, p, point); });
}

// Reads the header of any node file in `dir` to learn the code layout.
io::NodeFileHeader probe_layout(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw io::FormatError("no such directory " + dir.string());
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".grc") continue;
    const auto bytes = read_file(entry.path());
    return io::read_header(bytes);
  }
  throw io::FormatError("no node files in " + dir.string());
}

template <class F>
int collect_in(const Knobs& k, const fs::path& dir, const io::NodeFileHeader& layout) {
  const GRCExactCode<F> code(layout.params, layout.point);
  auto clusters = k.get_list("clusters").value_or(default_range(0, code.k(), SIZE_MAX, code.n()));
  const auto out = k.get_str("out");
  if (out.empty()) throw UsageError("collect needs --out <file>");
  if (clusters.size() != code.k()) throw UsageError("--clusters must name exactly k clusters");

  std::vector<std::vector<NodeFile>> files;
  for (auto c : clusters) {
    if (c >= code.n()) throw UsageError("cluster index out of range");
    files.emplace_back();
    for (std::size_t j = 0; j < code.m(); ++j) {
      files.back().push_back(load_node(dir, c, j));
      require_same_layout(layout, files.back().back().header);
    }
  }
  std::vector<typename F::value_type> symbols;
  for (std::size_t g = 0; g < layout.generations; ++g) {
    std::vector<std::vector<NodeVector<F>>> contents;
    for (const auto& cl : files) {
      contents.emplace_back();
      for (const auto& f : cl) contents.back().push_back(generation_of<F>(f, g));
    }
    const auto part = code.decode(clusters, contents);
    symbols.insert(symbols.end(), part.begin(), part.end());
  }
  write_file(out, io::symbols_to_bytes<F>(symbols, layout.file_length));
  emit({{"clusters", clusters}, {"bytes", layout.file_length}, {"generations", layout.generations}, {"out", out}});
  return kOk;
}

int cmd_collect(const Knobs& k) {
  const fs::path dir = k.get_str("dir");
  if (dir.empty()) throw UsageError("collect needs --dir");
  const auto layout = probe_layout(dir);
  return with_field(layout.params.field_width,
                    [&](auto tag) { return collect_in<typename decltype(tag)::type>(k, dir, layout); });
}

template <class F>
int repair_in(const Knobs& k, const fs::path& dir, const io::NodeFileHeader& layout) {
  const GRCExactCode<F> code(layout.params, layout.point);
  const auto cluster = static_cast<std::size_t>(k.need("cluster"));
  const auto node = static_cast<std::size_t>(k.need("node"));
  if (cluster >= code.n() || node >= code.m()) throw UsageError("failed node out of range");
  const auto local = k.get_list("local").value_or(default_range(0, code.ell(), node, code.m()));
  const auto remote = k.get_list("remote").value_or(default_range(0, code.d(), cluster, code.n()));

  // Remote clusters are read whole: a helper cluster mixes its own m nodes
  // before sending beta symbols.
  std::map<std::pair<std::size_t, std::size_t>, NodeFile> loaded;
  auto want = [&](std::size_t c, std::size_t j) {
    if (c >= code.n() || j >= code.m()) throw UsageError("helper index out of range");
    if (loaded.contains({c, j})) return;
    auto f = load_node(dir, c, j);
    require_same_layout(layout, f.header);
    loaded.emplace(std::pair{c, j}, std::move(f));
  };
  for (auto l : local) want(cluster, l);
  for (auto h : remote)
    for (std::size_t j = 0; j < code.m(); ++j) want(h, j);

  io::Bytes body;
  for (std::size_t g = 0; g < layout.generations; ++g) {
    ClusterArray<F> state(code.n(), code.m(), code.alpha());
    for (const auto& [key, f] : loaded) state.nodes[key.first][key.second] = generation_of<F>(f, g);
    io::append_symbols<F>(body, code.repair_from_state(state, cluster, node, local, remote));
  }
  io::NodeFileHeader h = layout;
  h.cluster = static_cast<std::uint32_t>(cluster);
  h.node = static_cast<std::uint32_t>(node);
  auto bytes = io::write_header(h);
  bytes.insert(bytes.end(), body.begin(), body.end());
  const auto out_opt = k.get_str("out");
  const fs::path out = out_opt.empty() ? node_path(dir, cluster, node) : fs::path(out_opt);
  write_file(out, bytes);
  emit({{"cluster", cluster},
        {"node", node},
        {"local", local},
        {"remote", remote},
        {"inter_cluster_symbols", code.d() * code.beta() * layout.generations},
        {"intra_cluster_symbols", code.ell() * code.alpha() * layout.generations},
        {"out", out.string()}});
  return kOk;
}

int cmd_repair(const Knobs& k) {
  const fs::path dir = k.get_str("dir");
  if (dir.empty()) throw UsageError("repair needs --dir");
  const auto layout = probe_layout(dir);
  return with_field(layout.params.field_width,
                    [&](auto tag) { return repair_in<typename decltype(tag)::type>(k, dir, layout); });
}

// -------------------------------------------------------------- simulate

int cmd_simulate(const Knobs& k) {
  sim::SimConfig cfg;
  cfg.params = system_params(k);
  cfg.intra.gamma = k.get_or("gamma", cfg.params.d > 0 ? gamma_star(cfg.params) : 0);
  cfg.intra.ell_prime = k.get_or("ell-prime", cfg.params.m);
  cfg.intra.gamma_prime = k.get_or("gamma-prime", cfg.params.alpha);
  cfg.trials = static_cast<std::size_t>(k.get_or("trials", 100));
  cfg.repairs_max = static_cast<std::size_t>(k.get_or("repairs", 50));
  cfg.seed = static_cast<std::uint64_t>(k.get_or("seed", 1));
  cfg.threads = static_cast<std::size_t>(k.get_or("threads", std::max(1u, std::thread::hardware_concurrency())));
  cfg.schedule = sim::parse_schedule(k.get_str("schedule", "uniform"));
  const auto collect = k.get_str("collect", "all");
  if (collect == "random") {
    cfg.collect = sim::CollectPolicy::random_subset;
  } else if (collect != "all") {
    throw UsageError("--collect must be all or random");
  }
  const auto res = sim::run_experiment(cfg);
  std::ostringstream os;
  res.write_csv(os);
  emit_csv(k, os.str());

  const auto series = res.success_series();
  const double worst = *std::ranges::min_element(series);
  std::cerr << "file_size=" << res.file_size << " min_success=" << worst
            << " mann_kendall_s=" << sim::mann_kendall_s(series) << '\n';
  bool ok = true;
  if (auto floor = k.get_str("min-success"); !floor.empty()) ok = worst >= std::stod(floor);
  if (k.get_flag("expect-decline")) ok = ok && sim::mann_kendall_s(series) < 0;
  return ok ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------- verify

int cmd_verify(const Knobs& k) {
  const auto p = system_params(k);
  const auto mode = k.get_str("mode", "thm5");
  const bool sweep = k.get_flag("gamma-sweep");
  const auto b_star = file_size_bound(p);
  json out{{"mode", mode}, {"params", params_json(p)}, {"B_star", b_star}};
  bool ok = true;

  if (mode == "thm2") {
    const auto sc = ifg::adversarial_log_thm2(p);
    const auto cut = ifg::max_flow(ifg::build_model1(p, p.alpha, sc.log, sc.collector));
    out["mincut"] = cut;
    out["events"] = sc.log.events.size();
    ok = cut == b_star;
  } else if (mode == "thm5") {
    const auto gs = gamma_star(p);
    out["gamma_star"] = gs;
    std::vector<std::int64_t> gammas;
    if (sweep) {
      for (std::int64_t g = 0; g <= p.alpha; ++g) gammas.push_back(g);
    } else {
      gammas.push_back(k.get_or("gamma", gs));
    }
    const auto samples = static_cast<std::size_t>(k.get_or("samples", 0));
    json rows = json::array();
    std::optional<std::int64_t> flip;
    for (auto g : gammas) {
      const auto r = ifg::verify_capacity(p, g, samples, static_cast<std::uint64_t>(k.get_or("seed", 1)));
      const auto formula = std::min(ifg::thm5_cut_formula(p, g), b_star);
      // Without local helpers gamma never enters the graph.
      const bool expect_tight = p.ell == 0 || g >= gs;
      rows.push_back({{"gamma", g},
                      {"mincut", r.mincut},
                      {"formula", formula},
                      {"tight", r.tight},
                      {"sampled", r.sampled},
                      {"sampled_min", r.sampled_min},
                      {"sampled_ok", r.sampled_ok}});
      if (r.tight && !flip) flip = g;
      ok = ok && r.mincut == formula && r.tight == expect_tight && r.sampled_ok;
    }
    out["rows"] = rows;
    out["tight_from"] = flip ? json(*flip) : json(nullptr);
  } else if (mode == "thm6") {
    const auto lp = k.get_or("ell-prime", p.m);
    out["ell_prime"] = lp;
    if (gamma_prime_bound_applies(p)) {
      const auto gb = gamma_prime_bound(p);
      out["gamma_prime_bound"] = {{"value", rational_json(gb.value)}, {"ceiling", gb.ceiling}};
    }
    std::vector<std::int64_t> gps;
    if (sweep) {
      for (std::int64_t g = 0; g <= p.alpha; ++g) gps.push_back(g);
    } else {
      gps.push_back(k.get_or("gamma-prime", p.alpha));
    }
    const auto sc = ifg::adversarial_log_thm6(p, lp);
    json rows = json::array();
    for (auto gp : gps) {
      const auto cut = ifg::max_flow(ifg::build_model2(p, lp, gp, sc.log, sc.collector));
      const bool starved = (p.m - p.ell) * gp < p.beta || lp < p.m;
      const bool even = p.beta % (p.m - p.ell) == 0;
      json row{{"gamma_prime", gp},
               {"mincut", cut},
               {"upper_formula", ifg::thm6_cut_formula(p, gp)},
               {"below_capacity", cut < b_star}};
      rows.push_back(row);
      if (starved) ok = ok && cut < b_star;
      if (!starved && even) ok = ok && cut >= b_star;
    }
    out["rows"] = rows;
  } else {
    throw UsageError("--mode must be thm2, thm5 or thm6");
  }
  out["pass"] = ok;
  emit(out);
  return ok ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------- secure

template <class F>
int secure_in(const Knobs& k, const SystemParams& p, std::size_t e) {
  const SecureGRCCode<F> code(p, e);
  std::mt19937_64 rng(static_cast<std::uint64_t>(k.get_or("seed", 1)));
  auto draw = [&](std::size_t len) {
    Vector<F> v(len);
    for (auto& x : v) x = static_cast<typename F::value_type>(rng() & (F::order - 1));
    return v;
  };
  const auto secret = draw(code.secret_size());
  const auto state = code.encode(secret, draw(code.random_size()));
  const auto bound = secure_file_size_bound(p, static_cast<std::int64_t>(e));

  json collectors = json::array();
  bool ok = static_cast<std::int64_t>(code.secret_size()) == bound;
  for (const auto& c : sim::detail::all_k_subsets(code.base().n(), code.base().k())) {
    const bool got = code.decode_secret(state, c) == secret;
    collectors.push_back({{"clusters", c}, {"ok", got}});
    ok = ok && got;
  }
  json out{{"params", params_json(p)},
           {"e", e},
           {"B_secure", bound},
           {"secret_size", code.secret_size()},
           {"random_size", code.random_size()},
           {"collectors", collectors}};
  if (k.get_flag("check-leakage")) {
    json views = json::array();
    for (const auto& eve : sim::detail::all_k_subsets(code.base().n(), e)) {
      const bool free = leakage_check(code, EveView{eve, true});
      views.push_back({{"clusters", eve}, {"leak_free", free}});
      ok = ok && free;
    }
    out["leakage"] = views;
  }
  out["pass"] = ok;
  emit(out);
  return ok ? kOk : kCheckFailed;
}

int cmd_secure(const Knobs& k) {
  const auto p = system_params(k);
  const auto e = k.get_or("e", 1);
  if (e < 0) throw UsageError("--e must be non-negative");
  return with_field(p.field_width,
                    [&](auto tag) { return secure_in<typename decltype(tag)::type>(k, p, static_cast<std::size_t>(e)); });
}

int fail(int code, const std::string& kind, const std::string& message) {
  std::cerr << "error: " << message << '\n';
  std::cout << json{{"error", kind}, {"message", message}}.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"grc: clustered regenerating codes toolkit"};
  app.require_subcommand(1);

  struct Command {
    CLI::App* app;
    std::unique_ptr<Knobs> knobs;
    int (*run)(const Knobs&);
  };
  std::vector<Command> commands;
  auto add = [&](const char* name, const char* help, int (*run)(const Knobs&)) -> Knobs& {
    auto* sub = app.add_subcommand(name, help);
    commands.push_back({sub, std::make_unique<Knobs>(sub), run});
    auto& k = *commands.back().knobs;
    k.ints({"n", "k", "d", "alpha", "beta", "m", "ell", "field"});
    k.str("point", "operating point: mbr or msr");
    return k;
  };

  add("bounds", "capacity and bandwidth bounds as JSON", cmd_bounds).ints({"e"});

  auto& tr = add("tradeoff", "storage vs inter-cluster bandwidth trade-off as CSV", cmd_tradeoff);
  tr.ints({"samples"});
  tr.str("family", "grc, stacked, classical, product or all");
  tr.str("out", "CSV path");

  auto& en = add("encode", "encode a file into node files", cmd_encode);
  en.str("input", "file to encode");
  en.str("out", "output directory");

  auto& rp = add("repair", "rebuild one node file from helpers", cmd_repair);
  rp.ints({"cluster", "node"});
  rp.str("dir", "directory of node files");
  rp.list("local", "local helper nodes (0-based, comma separated)");
  rp.list("remote", "remote helper clusters (0-based, comma separated)");
  rp.str("out", "output path (default: the node's file in --dir)");

  auto& co = add("collect", "decode the file from k clusters", cmd_collect);
  co.str("dir", "directory of node files");
  co.list("clusters", "clusters to read (0-based, comma separated)");
  co.str("out", "decoded file path");

  auto& si = add("simulate", "random linear network coding repair simulation as CSV", cmd_simulate);
  si.ints({"gamma", "ell-prime", "gamma-prime", "seed", "trials", "repairs", "threads"});
  si.str("schedule", "uniform, round-robin, adversarial-thm5 or adversarial-thm6");
  si.str("collect", "all or random");
  si.str("out", "CSV path");
  si.str("min-success", "fail unless every success rate reaches this value");
  si.flag("expect-decline", "fail unless the success series trends downward");

  auto& ve = add("verify", "information flow graph cut checks as JSON", cmd_verify);
  ve.ints({"gamma", "ell-prime", "gamma-prime", "seed", "samples"});
  ve.str("mode", "thm2, thm5 or thm6");
  ve.flag("gamma-sweep", "sweep gamma (or gamma') over 0..alpha");

  auto& se = add("secure", "secure exact-repair code check as JSON", cmd_secure);
  se.ints({"e", "seed"});
  se.flag("check-leakage", "check every eavesdropper set of size e");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  for (auto& c : commands) {
    if (!c.app->parsed()) continue;
    try {
      c.knobs->load();
      return c.run(*c.knobs);
    } catch (const UsageError& e) {
      return fail(kBadParams, "usage", e.what());
    } catch (const ParamError& e) {
      return fail(kBadParams, "params", e.what());
    } catch (const io::FormatError& e) {
      return fail(kBadFormat, "format", e.what());
    } catch (const json::exception& e) {
      return fail(kBadParams, "config", e.what());
    } catch (const std::exception& e) {
      return fail(kInternal, "internal", e.what());
    }
  }
  return kInternal;
}
