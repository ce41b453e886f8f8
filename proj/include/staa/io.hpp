#pragma once

// Text formats and file plumbing:
//   edge stream     `u v [w] ts` per line, whitespace or comma separated,
//                   `#` comments, optional `# nodes N` directive
//   snapshot file   exact round-trip serialization of a SnapshotSequence
//   augmented file  `t row col value`, sorted by (t, col, row)
//   nodes.map       `original_id dense_id`
//   key = value     configuration, synth specs and run manifests

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "staa/activity.hpp"
#include "staa/diffusion.hpp"
#include "staa/error.hpp"
#include "staa/format.hpp"
#include "staa/graph.hpp"
#include "staa/synth.hpp"

namespace staa {

namespace io_detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  auto is_sep = [](char c) { return c == ' ' || c == '\t' || c == ',' || c == '\r'; };
  while (i < line.size()) {
    while (i < line.size() && is_sep(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_sep(line[j])) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace io_detail

// ---------------------------------------------------------------------------
// Edge streams

struct EdgeStreamRecord {
  NodeId u = 0;  // dense id
  NodeId v = 0;
  double w = 1.0;
  Timestamp ts = 0;

  friend bool operator==(const EdgeStreamRecord&, const EdgeStreamRecord&) = default;
};

struct EdgeStream {
  std::vector<EdgeStreamRecord> records;  // file order
  std::vector<std::int64_t> original_ids;  // dense id -> original id, ascending

  NodeId node_count() const { return static_cast<NodeId>(original_ids.size()); }
};

/// Parses an edge stream. Node ids are remapped densely in ascending order of
/// their original value, so the mapping does not depend on record order.
inline EdgeStream parse_edge_stream(std::istream& in) {
  struct Raw {
    std::int64_t u, v;
    double w;
    Timestamp ts;
  };
  std::vector<Raw> raw;
  std::vector<std::int64_t> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    const auto first = view.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    if (view[first] == '#') {
      const auto fields = io_detail::split_fields(view.substr(first + 1));
      if (fields.size() == 2 && fields[0] == "nodes") {
        std::int64_t count = 0;
        if (!io_detail::parse_number(fields[1], count) || count < 0)
          throw ParseError("line " + std::to_string(line_no) + ": bad nodes directive");
        for (std::int64_t i = 0; i < count; ++i) ids.push_back(i);
      }
      continue;
    }
    const auto fields = io_detail::split_fields(view);
    Raw r{0, 0, 1.0, 0};
    bool ok = fields.size() == 3 || fields.size() == 4;
    ok = ok && io_detail::parse_number(fields[0], r.u) && io_detail::parse_number(fields[1], r.v);
    if (ok && fields.size() == 4) ok = io_detail::parse_number(fields[2], r.w) && std::isfinite(r.w) && r.w >= 0.0;
    ok = ok && io_detail::parse_number(fields.back(), r.ts);
    if (!ok) throw ParseError("line " + std::to_string(line_no) + ": expected `u v [w] ts`, got `" + line + "`");
    if (r.u < 0 || r.v < 0) throw ParseError("line " + std::to_string(line_no) + ": negative node id");
    if (r.ts < 0) throw NegativeTimestampError("line " + std::to_string(line_no) + ": negative timestamp");
    ids.push_back(r.u);
    ids.push_back(r.v);
    raw.push_back(r);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  EdgeStream out;
  out.original_ids = ids;
  out.records.reserve(raw.size());
  auto dense = [&](std::int64_t id) {
    return static_cast<NodeId>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };
  for (const auto& r : raw) out.records.push_back({dense(r.u), dense(r.v), r.w, r.ts});
  return out;
}

inline EdgeStream parse_edge_stream(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_edge_stream(in);
}

enum class PartitionMode { EqualWidth, EqualCount };

struct PartitionOptions {
  bool directed = false;
  bool binarize = false;
  PartitionMode mode = PartitionMode::EqualWidth;
};

struct Partition {
  SnapshotSequence sequence;
  std::vector<std::string> warnings;
};

/// Splits the stream into T snapshots. EqualWidth: the timestamp range
/// [min, max] is cut into T equal half-open intervals, the last one closed.
/// EqualCount: distinct timestamps are ranked and cut into T groups of
/// nearly equal record count. Snapshot timestamps are the interval indices.
inline Partition partition_snapshots(const EdgeStream& stream, int snapshots, PartitionOptions options = {}) {
  if (snapshots < 1) throw ConfigError("snapshot count must be at least 1");
  if (stream.records.empty()) throw EmptyStreamError("edge stream has no records");
  const auto T = static_cast<std::size_t>(snapshots);
  std::vector<std::size_t> bucket(stream.records.size());

  if (options.mode == PartitionMode::EqualWidth) {
    Timestamp lo = stream.records.front().ts, hi = lo;
    for (const auto& r : stream.records) {
      lo = std::min(lo, r.ts);
      hi = std::max(hi, r.ts);
    }
    for (std::size_t i = 0; i < bucket.size(); ++i) {
      if (hi == lo) {
        bucket[i] = T - 1;
        continue;
      }
      const auto offset = static_cast<__int128>(stream.records[i].ts - lo) * static_cast<__int128>(T);
      bucket[i] = std::min<std::size_t>(T - 1, static_cast<std::size_t>(offset / (hi - lo)));
    }
  } else {
    std::map<Timestamp, std::size_t> first_rank;
    {
      std::vector<Timestamp> sorted;
      sorted.reserve(stream.records.size());
      for (const auto& r : stream.records) sorted.push_back(r.ts);
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t i = 0; i < sorted.size(); ++i) first_rank.try_emplace(sorted[i], i);
    }
    const std::size_t total = stream.records.size();
    for (std::size_t i = 0; i < bucket.size(); ++i)
      bucket[i] = std::min(T - 1, first_rank.at(stream.records[i].ts) * T / total);
  }

  const NodeId n = std::max<NodeId>(stream.node_count(), 1);
  std::vector<std::vector<WeightedEdge>> edges(T);
  for (std::size_t i = 0; i < bucket.size(); ++i) {
    const auto& r = stream.records[i];
    edges[bucket[i]].push_back({r.u, r.v, r.w});
  }
  std::vector<std::string> warnings;
  std::vector<Snapshot> snaps;
  snaps.reserve(T);
  for (std::size_t t = 0; t < T; ++t) {
    Snapshot s = Snapshot::from_edges(n, edges[t], options.directed);
    if (options.binarize) s = binarized(s);
    if (edges[t].empty()) warnings.push_back("snapshot " + std::to_string(t) + " is empty");
    snaps.push_back(std::move(s));
  }
  return Partition{SnapshotSequence(std::move(snaps)), std::move(warnings)};
}

// ---------------------------------------------------------------------------
// Snapshot sequence files (exact round trip)

inline void write_sequence(std::ostream& os, const SnapshotSequence& seq) {
  const bool directed = seq[0].directed();
  os << "# staa-snapshots\n# nodes " << seq.n() << "\n# directed " << (directed ? 1 : 0) << "\n# timestamps";
  for (Timestamp t : seq.timestamps()) os << ' ' << t;
  os << '\n';
  for (std::size_t t = 0; t < seq.size(); ++t)
    for (const auto& e : seq[t].entries()) {
      if (!directed && e.v < e.u) continue;
      os << seq.timestamp(t) << ' ' << e.u << ' ' << e.v << ' ' << format_exact(e.w) << '\n';
    }
}

inline SnapshotSequence read_sequence(std::istream& in) {
  NodeId n = 0;
  int directed = -1;
  std::vector<Timestamp> timestamps;
  std::map<Timestamp, std::vector<WeightedEdge>> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = io_detail::split_fields(line);
    if (fields.empty()) continue;
    auto fail = [&] { throw ParseError("line " + std::to_string(line_no) + ": malformed snapshot file"); };
    if (fields[0] == "#") {
      if (fields.size() >= 2 && fields[1] == "nodes") {
        if (fields.size() != 3 || !io_detail::parse_number(fields[2], n)) fail();
      } else if (fields.size() >= 2 && fields[1] == "directed") {
        if (fields.size() != 3 || !io_detail::parse_number(fields[2], directed)) fail();
      } else if (fields.size() >= 2 && fields[1] == "timestamps") {
        for (std::size_t i = 2; i < fields.size(); ++i) {
          Timestamp t = 0;
          if (!io_detail::parse_number(fields[i], t)) fail();
          timestamps.push_back(t);
        }
      }
      continue;
    }
    Timestamp t = 0;
    WeightedEdge e;
    if (fields.size() != 4 || !io_detail::parse_number(fields[0], t) || !io_detail::parse_number(fields[1], e.u) ||
        !io_detail::parse_number(fields[2], e.v) || !io_detail::parse_number(fields[3], e.w))
      fail();
    edges[t].push_back(e);
  }
  if (n < 1 || directed < 0 || timestamps.empty()) throw ParseError("snapshot file header incomplete");
  std::vector<Snapshot> snaps;
  for (Timestamp t : timestamps) {
    const auto it = edges.find(t);
    snaps.push_back(it == edges.end() ? Snapshot(n, directed != 0)
                                      : Snapshot::from_edges(n, it->second, directed != 0));
  }
  return SnapshotSequence(std::move(snaps), std::move(timestamps));
}

// ---------------------------------------------------------------------------
// Augmented matrices

inline void write_augmented(std::ostream& os, std::span<const AugmentedMatrix> xs) {
  for (const auto& x : xs)
    for (Eigen::Index col = 0; col < x.entries.outerSize(); ++col)
      for (SparseColMatrix::InnerIterator it(x.entries, col); it; ++it)
        os << x.t << ' ' << it.row() << ' ' << it.col() << ' ' << format_g12(it.value()) << '\n';
}

/// Reads `t row col value` lines into one matrix per distinct t (ascending).
/// `timestamps`, when given, fixes the emitted set (empty matrices kept).
inline std::vector<AugmentedMatrix> read_augmented(std::istream& in, NodeId n,
                                                   const std::vector<Timestamp>& timestamps = {}) {
  std::map<Timestamp, std::vector<Eigen::Triplet<double>>> triplets;
  for (Timestamp t : timestamps) triplets[t];
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = io_detail::split_fields(line);
    if (fields.empty() || fields[0].starts_with('#')) continue;
    Timestamp t = 0;
    NodeId row = 0, col = 0;
    double value = 0.0;
    if (fields.size() != 4 || !io_detail::parse_number(fields[0], t) || !io_detail::parse_number(fields[1], row) ||
        !io_detail::parse_number(fields[2], col) || !io_detail::parse_number(fields[3], value))
      throw ParseError("line " + std::to_string(line_no) + ": expected `t row col value`");
    if (row < 0 || col < 0 || row >= n || col >= n)
      throw ParseError("line " + std::to_string(line_no) + ": index outside node range");
    triplets[t].emplace_back(row, col, value);
  }
  std::vector<AugmentedMatrix> out;
  for (auto& [t, list] : triplets) {
    AugmentedMatrix x{t, SparseColMatrix(n, n), false};
    x.entries.setFromTriplets(list.begin(), list.end());
    out.push_back(std::move(x));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Node maps

inline void write_node_map(std::ostream& os, std::span<const std::int64_t> original_ids) {
  for (std::size_t i = 0; i < original_ids.size(); ++i) os << original_ids[i] << ' ' << i << '\n';
}

/// dense id -> original id.
inline std::vector<std::int64_t> read_node_map(std::istream& in) {
  std::vector<std::pair<NodeId, std::int64_t>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = io_detail::split_fields(line);
    if (fields.empty()) continue;
    std::int64_t original = 0;
    NodeId dense = 0;
    if (fields.size() != 2 || !io_detail::parse_number(fields[0], original) ||
        !io_detail::parse_number(fields[1], dense) || dense < 0)
      throw ParseError("line " + std::to_string(line_no) + ": expected `original_id dense_id`");
    rows.emplace_back(dense, original);
  }
  std::sort(rows.begin(), rows.end());
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].first != static_cast<NodeId>(i)) throw ParseError("node map dense ids are not 0..n-1");
    out.push_back(rows[i].second);
  }
  return out;
}

// ---------------------------------------------------------------------------
// key = value files

using KeyValues = std::vector<std::pair<std::string, std::string>>;

inline KeyValues parse_key_values(std::istream& in) {
  KeyValues out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = io_detail::trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError("line " + std::to_string(line_no) + ": expected `key = value`");
    std::string key = io_detail::trim(std::string_view(body).substr(0, eq));
    std::string value = io_detail::trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ParseError("line " + std::to_string(line_no) + ": empty key");
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

inline void write_key_values(std::ostream& os, const KeyValues& kv) {
  for (const auto& [k, v] : kv) os << k << " = " << v << '\n';
}

namespace io_detail {

inline double to_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  if (!parse_number(std::string_view(value), out)) throw ConfigError("`" + key + "` expects a number, got `" + value + "`");
  return out;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& value) {
  Int out = 0;
  if (!parse_number(std::string_view(value), out)) throw ConfigError("`" + key + "` expects an integer, got `" + value + "`");
  return out;
}

inline bool to_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "no") return false;
  throw ConfigError("`" + key + "` expects a boolean, got `" + value + "`");
}

}  // namespace io_detail

inline void apply_config_value(StaaConfig& cfg, const std::string& key, const std::string& value) {
  using namespace io_detail;
  if (key == "alpha") cfg.alpha = to_double(key, value);
  else if (key == "delta") cfg.delta = to_double(key, value);
  else if (key == "gamma") cfg.gamma = to_double(key, value);
  else if (key == "window") cfg.window = to_int<int>(key, value);
  else if (key == "decay") cfg.decay = to_double(key, value);
  else if (key == "scales") cfg.scales = to_int<int>(key, value);
  else if (key == "epsilon") cfg.epsilon = to_double(key, value);
  else if (key == "rho") cfg.rho = to_double(key, value);
  else if (key == "knot_lower") cfg.knots.lower = to_double(key, value);
  else if (key == "knot_upper") cfg.knots.upper = to_double(key, value);
  else if (key == "binarize") cfg.binarize = to_bool(key, value);
  else if (key == "solver_tol") cfg.solver_tol = to_double(key, value);
  else if (key == "max_iters") cfg.max_iters = to_int<int>(key, value);
  else if (key == "carry_sparsified") cfg.carry_sparsified = to_bool(key, value);
  else if (key == "symmetrize_output") cfg.symmetrize_output = to_bool(key, value);
  else if (key == "uniform_beta") cfg.uniform_beta = to_double(key, value);
  else if (key == "solver") {
    if (value == "direct") cfg.solver = SolverKind::Direct;
    else if (value == "fixed_point") cfg.solver = SolverKind::FixedPoint;
    else throw ConfigError("solver must be `direct` or `fixed_point`");
  } else if (key == "beta_mode") {
    if (value == "activity") cfg.beta_mode = BetaMode::Activity;
    else if (value == "zero") cfg.beta_mode = BetaMode::Zero;
    else if (value == "uniform") cfg.beta_mode = BetaMode::Uniform;
    else throw ConfigError("beta_mode must be `activity`, `zero` or `uniform`");
  } else {
    throw ConfigError("unknown config key `" + key + "`");
  }
}

inline StaaConfig parse_config(std::istream& in, StaaConfig base = {}) {
  for (const auto& [k, v] : parse_key_values(in)) apply_config_value(base, k, v);
  return base;
}

inline KeyValues config_entries(const StaaConfig& cfg) {
  const char* solver = cfg.solver == SolverKind::Direct ? "direct" : "fixed_point";
  const char* mode = cfg.beta_mode == BetaMode::Activity ? "activity" : cfg.beta_mode == BetaMode::Zero ? "zero" : "uniform";
  return {{"alpha", format_exact(cfg.alpha)},
          {"delta", format_exact(cfg.delta)},
          {"gamma", format_exact(cfg.gamma)},
          {"window", std::to_string(cfg.window)},
          {"decay", format_exact(cfg.decay)},
          {"scales", std::to_string(cfg.scales)},
          {"epsilon", format_exact(cfg.epsilon)},
          {"rho", format_exact(cfg.rho)},
          {"knot_lower", format_exact(cfg.knots.lower)},
          {"knot_upper", format_exact(cfg.knots.upper)},
          {"binarize", cfg.binarize ? "true" : "false"},
          {"solver", solver},
          {"solver_tol", format_exact(cfg.solver_tol)},
          {"max_iters", std::to_string(cfg.max_iters)},
          {"beta_mode", mode},
          {"uniform_beta", format_exact(cfg.uniform_beta)},
          {"carry_sparsified", cfg.carry_sparsified ? "true" : "false"},
          {"symmetrize_output", cfg.symmetrize_output ? "true" : "false"}};
}

inline SynthSpec parse_synth_spec(std::istream& in) {
  using namespace io_detail;
  SynthSpec spec;
  for (const auto& [key, value] : parse_key_values(in)) {
    if (key == "n") spec.n = to_int<NodeId>(key, value);
    else if (key == "communities") spec.communities = to_int<int>(key, value);
    else if (key == "snapshots") spec.snapshots = to_int<int>(key, value);
    else if (key == "p_in") spec.p_in = to_double(key, value);
    else if (key == "p_out") spec.p_out = to_double(key, value);
    else if (key == "active_fraction") spec.active_fraction = to_double(key, value);
    else if (key == "noise_rate") spec.noise_rate = to_double(key, value);
    else if (key == "churn_rate") spec.churn_rate = to_double(key, value);
    else if (key == "seed") spec.seed = to_int<std::uint64_t>(key, value);
    else throw ConfigError("unknown synth key `" + key + "`");
  }
  return spec;
}

inline KeyValues synth_spec_entries(const SynthSpec& spec) {
  return {{"n", std::to_string(spec.n)},
          {"communities", std::to_string(spec.communities)},
          {"snapshots", std::to_string(spec.snapshots)},
          {"p_in", format_exact(spec.p_in)},
          {"p_out", format_exact(spec.p_out)},
          {"active_fraction", format_exact(spec.active_fraction)},
          {"noise_rate", format_exact(spec.noise_rate)},
          {"churn_rate", format_exact(spec.churn_rate)},
          {"seed", std::to_string(spec.seed)}};
}

// ---------------------------------------------------------------------------
// Synth outputs

/// Edge stream with `# nodes N` header; timestamp = snapshot index.
inline void write_synth_edges(std::ostream& os, const SynthResult& result) {
  os << "# nodes " << result.sequence.n() << '\n';
  for (std::size_t t = 0; t < result.sequence.size(); ++t)
    for (const auto& e : result.sequence[t].entries())
      if (e.u <= e.v) os << e.u << ' ' << e.v << ' ' << format_exact(e.w) << ' ' << result.sequence.timestamp(t) << '\n';
}

inline void write_labels(std::ostream& os, std::span<const LabeledEdge> labels) {
  for (const auto& e : labels)
    os << e.t << ' ' << e.u << ' ' << e.v << ' ' << (e.label == EdgeLabel::Noise ? "noise" : "persistent") << '\n';
}

inline std::vector<LabeledEdge> read_labels(std::istream& in) {
  std::vector<LabeledEdge> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = io_detail::split_fields(line);
    if (fields.empty()) continue;
    LabeledEdge e;
    if (fields.size() != 4 || !io_detail::parse_number(fields[0], e.t) || !io_detail::parse_number(fields[1], e.u) ||
        !io_detail::parse_number(fields[2], e.v) || (fields[3] != "noise" && fields[3] != "persistent"))
      throw ParseError("line " + std::to_string(line_no) + ": expected `t u v label`");
    e.label = fields[3] == "noise" ? EdgeLabel::Noise : EdgeLabel::Persistent;
    out.push_back(e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Files, digests

/// Writes through a temporary sibling and renames it into place.
inline void atomic_write(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw IoError("sha256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

/// Digest of the canonical snapshot serialization.
inline std::string sequence_digest(const SnapshotSequence& seq) {
  std::ostringstream ss;
  write_sequence(ss, seq);
  return sha256_hex(ss.str());
}

}  // namespace staa
