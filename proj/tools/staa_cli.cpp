// Command-line front end: partitions edge streams, runs augmenters, generates
// synthetic data and scores augmented matrices.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "staa/staa.hpp"

namespace fs = std::filesystem;
using namespace staa;

namespace {

struct InputOptions {
  std::string input;
  int snapshots = 0;
  bool directed = false;
  bool equal_count = false;
  bool binarize = false;
};

struct ConfigOptions {
  std::string file;
  std::vector<std::string> set;
  std::optional<double> alpha, delta, gamma, rho;
  std::optional<int> window, scales;
  std::string beta_mode, solver;
};

struct LoadedInput {
  EdgeStream stream;
  SnapshotSequence sequence;
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("--input", in.input, "edge stream `u v [w] ts`")->required()->check(CLI::ExistingFile);
  cmd->add_option("--snapshots", in.snapshots, "number of snapshots T")->required()->check(CLI::PositiveNumber);
  cmd->add_flag("--directed", in.directed, "keep edge direction");
  cmd->add_flag("--equal-count", in.equal_count, "partition by record count instead of time width");
  cmd->add_flag("--binarize", in.binarize, "set every edge weight to 1");
}

void add_config_options(CLI::App* cmd, ConfigOptions& c) {
  cmd->add_option("--config", c.file, "key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("--set", c.set, "override a config key, `key=value` (repeatable)");
  cmd->add_option("--alpha", c.alpha, "restart probability");
  cmd->add_option("--delta", c.delta, "activity scale");
  cmd->add_option("--gamma", c.gamma, "change-rate weight");
  cmd->add_option("--rho", c.rho, "sparsification threshold");
  cmd->add_option("--window", c.window, "change-rate window");
  cmd->add_option("--scales", c.scales, "wavelet scale count");
  cmd->add_option("--beta-mode", c.beta_mode, "activity | zero | uniform")
      ->check(CLI::IsMember({"activity", "zero", "uniform"}));
  cmd->add_option("--solver", c.solver, "direct | fixed_point")->check(CLI::IsMember({"direct", "fixed_point"}));
}

StaaConfig load_config(const ConfigOptions& c) {
  StaaConfig cfg;
  if (!c.file.empty()) {
    std::istringstream in(read_file(c.file));
    cfg = parse_config(in, cfg);
  }
  for (const auto& kv : c.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got `" + kv + "`");
    apply_config_value(cfg, io_detail::trim(kv.substr(0, eq)), io_detail::trim(kv.substr(eq + 1)));
  }
  if (c.alpha) cfg.alpha = *c.alpha;
  if (c.delta) cfg.delta = *c.delta;
  if (c.gamma) cfg.gamma = *c.gamma;
  if (c.rho) cfg.rho = *c.rho;
  if (c.window) cfg.window = *c.window;
  if (c.scales) cfg.scales = *c.scales;
  if (!c.beta_mode.empty()) apply_config_value(cfg, "beta_mode", c.beta_mode);
  if (!c.solver.empty()) apply_config_value(cfg, "solver", c.solver);
  cfg.validate();
  return cfg;
}

LoadedInput load_input(const InputOptions& in) {
  EdgeStream stream = parse_edge_stream(fs::path(in.input));
  PartitionOptions options;
  options.directed = in.directed;
  options.binarize = in.binarize;
  options.mode = in.equal_count ? PartitionMode::EqualCount : PartitionMode::EqualWidth;
  Partition p = partition_snapshots(stream, in.snapshots, options);
  for (const auto& w : p.warnings) std::cerr << "staa: warning: " << w << '\n';
  return {std::move(stream), std::move(p.sequence)};
}

std::string join_timestamps(std::span<const Timestamp> ts) {
  std::string out;
  for (std::size_t i = 0; i < ts.size(); ++i) out += (i ? " " : "") + std::to_string(ts[i]);
  return out;
}

class Manifest {
 public:
  explicit Manifest(std::string command) : start_(std::chrono::steady_clock::now()) {
    add("version", kVersion);
    add("command", std::move(command));
  }
  void add(std::string key, std::string value) { entries_.emplace_back(std::move(key), std::move(value)); }
  void add_input(const InputOptions& in, const SnapshotSequence& seq) {
    add("input", in.input);
    add("input_sha256", sequence_digest(seq));
    add("nodes", std::to_string(seq.n()));
    add("snapshots", std::to_string(seq.size()));
    add("timestamps", join_timestamps(seq.timestamps()));
    add("directed", in.directed ? "true" : "false");
    add("partition", in.equal_count ? "equal_count" : "equal_width");
  }
  void add_config(const StaaConfig& cfg) {
    for (const auto& [k, v] : config_entries(cfg)) add("config." + k, v);
  }
  void write(const fs::path& path) {
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    add("wall_time_seconds", format_g12(seconds));
    std::ostringstream os;
    write_key_values(os, entries_);
    atomic_write(path, os.str());
  }

 private:
  KeyValues entries_;
  std::chrono::steady_clock::time_point start_;
};

std::string matrix_file_name(Timestamp t) { return "t" + std::to_string(t) + ".txt"; }

/// One sparse file per timestep, plus nodes.map and the manifest.
void write_augmented_dir(const fs::path& dir, const std::vector<AugmentedMatrix>& xs,
                         std::span<const std::int64_t> original_ids, Manifest& manifest) {
  fs::create_directories(dir);
  for (const auto& x : xs) {
    std::ostringstream os;
    write_augmented(os, std::span(&x, 1));
    atomic_write(dir / matrix_file_name(x.t), os.str());
    manifest.add("output." + std::to_string(x.t), matrix_file_name(x.t));
  }
  std::ostringstream map;
  write_node_map(map, original_ids);
  atomic_write(dir / "nodes.map", map.str());
  manifest.write(dir / "manifest.txt");
}

std::map<std::string, std::string> read_manifest(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::map<std::string, std::string> out;
  for (auto& [k, v] : parse_key_values(in)) out[k] = v;
  return out;
}

const std::string& manifest_value(const std::map<std::string, std::string>& m, const std::string& key,
                                  const fs::path& where) {
  const auto it = m.find(key);
  if (it == m.end()) throw ParseError(where.string() + ": manifest lacks `" + key + "`");
  return it->second;
}

std::vector<Timestamp> parse_timestamps(const std::string& text) {
  std::vector<Timestamp> out;
  for (auto field : io_detail::split_fields(text)) {
    Timestamp t = 0;
    if (!io_detail::parse_number(field, t)) throw ParseError("bad timestamp list `" + text + "`");
    out.push_back(t);
  }
  return out;
}

struct AugmentedDir {
  std::string method;
  std::vector<AugmentedMatrix> matrices;
  std::vector<std::int64_t> original_ids;
};

AugmentedDir read_augmented_dir(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest.txt";
  const auto m = read_manifest(manifest_path);
  AugmentedDir out;
  const auto method = m.find("method");
  out.method = method == m.end() ? "unknown" : method->second;
  NodeId n = 0;
  if (!io_detail::parse_number(std::string_view(manifest_value(m, "nodes", manifest_path)), n) || n < 1)
    throw ParseError(manifest_path.string() + ": bad node count");
  for (Timestamp t : parse_timestamps(manifest_value(m, "timestamps", manifest_path))) {
    std::istringstream in(read_file(dir / manifest_value(m, "output." + std::to_string(t), manifest_path)));
    auto xs = read_augmented(in, n, {t});
    if (xs.size() != 1) throw ParseError("file for timestep " + std::to_string(t) + " holds other timesteps");
    out.matrices.push_back(std::move(xs.front()));
  }
  std::istringstream map(read_file(dir / "nodes.map"));
  out.original_ids = read_node_map(map);
  return out;
}

/// Ground truth per augmented timestep: the graph X_t should predict and,
/// for synthetic data, the noise labels.
struct Truth {
  std::vector<std::optional<Snapshot>> targets;
  std::vector<LabeledEdge> labels;
  bool has_labels = false;
};

/// A synth directory predicts snapshot t + 1 from X_t and the persistent
/// backbone from the last X; an edge file is the graph after the last X.
Truth load_truth(const fs::path& path, std::size_t steps, NodeId n, std::span<const std::int64_t> original_ids) {
  Truth truth;
  truth.targets.resize(steps);
  if (fs::is_directory(path)) {
    const auto m = read_manifest(path / "manifest.txt");
    int T = 0;
    if (!io_detail::parse_number(std::string_view(manifest_value(m, "snapshots", path / "manifest.txt")), T) || T < 1)
      throw ParseError("synth manifest has a bad snapshot count");
    if (static_cast<std::size_t>(T) != steps)
      throw ConfigError("augmented run has " + std::to_string(steps) + " timesteps but the synth data has " +
                        std::to_string(T));
    const Partition p = partition_snapshots(parse_edge_stream(path / "edges.txt"), T);
    const EdgeStream next = parse_edge_stream(path / "next.txt");
    if (p.sequence.n() != n || next.node_count() != n) throw ConfigError("synth node count differs from augmented run");
    for (std::size_t t = 0; t + 1 < steps; ++t) truth.targets[t] = p.sequence[t + 1];
    truth.targets[steps - 1] = partition_snapshots(next, 1).sequence[0];
    std::istringstream labels(read_file(path / "labels.txt"));
    truth.labels = read_labels(labels);
    truth.has_labels = true;
    return truth;
  }
  const EdgeStream stream = parse_edge_stream(path);
  std::map<std::int64_t, NodeId> dense;
  for (std::size_t i = 0; i < original_ids.size(); ++i) dense[original_ids[i]] = static_cast<NodeId>(i);
  std::vector<WeightedEdge> edges;
  std::size_t skipped = 0;
  for (const auto& r : stream.records) {
    const auto u = dense.find(stream.original_ids[r.u]), v = dense.find(stream.original_ids[r.v]);
    if (u == dense.end() || v == dense.end()) {
      ++skipped;
      continue;
    }
    edges.push_back({u->second, v->second, 1.0});
  }
  if (skipped > 0) std::cerr << "staa: warning: " << skipped << " truth edges use unknown node ids and were skipped\n";
  truth.targets[steps - 1] = Snapshot::from_edges(n, edges, false);
  return truth;
}

Truth rolling_truth(const SnapshotSequence& seq) {
  Truth truth;
  truth.targets.resize(seq.size());
  for (std::size_t t = 0; t + 1 < seq.size(); ++t) truth.targets[t] = seq[t + 1];
  return truth;
}

void report_rows(std::ostream& os, const std::string& name, const std::vector<AugmentedMatrix>& xs, const Truth& truth,
                 std::uint64_t seed) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<SuppressionRow> suppression(xs.size());
  if (truth.has_labels) suppression = noise_suppression(xs, truth.labels);
  for (std::size_t t = 0; t < xs.size(); ++t) {
    double score = nan;
    if (truth.targets[t]) {
      try {
        score = link_prediction_auc(xs[t], *truth.targets[t], seed + t);
      } catch (const DegenerateError&) {
      } catch (const ExhaustedError&) {
      }
    }
    os << name << ',' << xs[t].t << ',' << format_g12(score) << ',' << format_g12(suppression[t].noise_mean) << ','
       << format_g12(suppression[t].persistent_mean) << ',' << format_g12(suppression[t].ratio) << '\n';
  }
}

constexpr const char* kReportHeader = "augmenter,t,auc,noise_mean,persistent_mean,suppression_ratio\n";

struct AugmentOptions {
  double drop_rate = 0.1;
  bool merge_sum = false;
  std::uint64_t seed = 0;
};

AugmenterKind make_augmenter(const std::string& method, const StaaConfig& cfg, const AugmentOptions& opt) {
  if (method == "none") return NoneAugmenter{};
  if (method == "merge") return MergeAugmenter{opt.merge_sum};
  if (method == "dropedge") return DropEdgeAugmenter{opt.drop_rate, opt.seed};
  if (method == "ppr") return PprAugmenter{cfg.alpha, cfg.rho};
  if (method == "staa") return StaaAugmenter{cfg};
  throw ConfigError("unknown method `" + method + "`");
}

const std::vector<std::string> kMethods{"none", "merge", "dropedge", "ppr", "staa"};

void add_augment_options(CLI::App* cmd, AugmentOptions& a) {
  cmd->add_option("--drop-rate", a.drop_rate, "dropedge removal probability")->check(CLI::Range(0.0, 1.0));
  cmd->add_flag("--merge-sum", a.merge_sum, "merge by summing instead of max");
  cmd->add_option("--seed", a.seed, "seed for stochastic augmenters and negative sampling");
}

void print_error(const std::exception& e, int depth = 0) {
  std::cerr << (depth == 0 ? "staa: error: " : "  caused by: ") << e.what() << '\n';
  try {
    std::rethrow_if_nested(e);
  } catch (const std::exception& inner) {
    print_error(inner, depth + 1);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Activity-aware dynamic graph augmentation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  InputOptions input;
  ConfigOptions config;
  AugmentOptions aug;
  std::string out, method, spec_file, augmented_dir, truth_path, methods_list;
  std::optional<std::uint64_t> synth_seed;

  auto* diffuse = app.add_subcommand("diffuse", "run the activity-aware diffusion and write per-timestep matrices");
  add_input_options(diffuse, input);
  add_config_options(diffuse, config);
  diffuse->add_option("--out", out, "output directory")->required();

  auto* activity = app.add_subcommand("activity", "export per-node activity scores as CSV");
  add_input_options(activity, input);
  add_config_options(activity, config);
  activity->add_option("--out", out, "output CSV")->required();

  auto* augment_cmd = app.add_subcommand("augment", "run one augmenter and write per-timestep matrices");
  add_input_options(augment_cmd, input);
  add_config_options(augment_cmd, config);
  add_augment_options(augment_cmd, aug);
  augment_cmd->add_option("--method", method, "none | merge | dropedge | ppr | staa")
      ->required()
      ->check(CLI::IsMember(kMethods));
  augment_cmd->add_option("--out", out, "output directory")->required();

  auto* synth = app.add_subcommand("synth", "generate a labeled noisy dynamic graph");
  synth->add_option("--spec", spec_file, "key = value generator spec")->required()->check(CLI::ExistingFile);
  synth->add_option("--seed", synth_seed, "override the generator seed");
  synth->add_option("--out", out, "output directory")->required();

  auto* eval = app.add_subcommand("eval", "link-prediction AUC and noise suppression of an augmented run");
  eval->add_option("--augmented", augmented_dir, "directory written by diffuse or augment")
      ->required()
      ->check(CLI::ExistingDirectory);
  eval->add_option("--truth", truth_path, "synth directory or edge file of the next graph")
      ->required()
      ->check(CLI::ExistingPath);
  eval->add_option("--seed", aug.seed, "negative sampling seed");
  eval->add_option("--out", out, "output CSV")->required();

  auto* compare = app.add_subcommand("compare", "run several augmenters on one input and report them together");
  add_input_options(compare, input);
  add_config_options(compare, config);
  add_augment_options(compare, aug);
  compare->add_option("--methods", methods_list, "comma separated methods")->default_val("none,merge,dropedge,ppr,staa");
  compare->add_option("--truth", truth_path, "synth directory matching the input")->check(CLI::ExistingDirectory);
  compare->add_option("--out", out, "output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (diffuse->parsed() || augment_cmd->parsed()) {
      const bool is_diffuse = diffuse->parsed();
      const StaaConfig cfg = load_config(config);
      const LoadedInput loaded = load_input(input);
      const std::string name = is_diffuse ? "staa" : method;
      Manifest manifest(is_diffuse ? "diffuse" : "augment");
      manifest.add("method", name);
      manifest.add_input(input, loaded.sequence);
      manifest.add_config(cfg);
      if (name == "dropedge") {
        manifest.add("drop_rate", format_exact(aug.drop_rate));
        manifest.add("seed", std::to_string(aug.seed));
      }
      if (name == "merge") manifest.add("merge", aug.merge_sum ? "sum" : "max");
      const auto xs = augment(loaded.sequence, make_augmenter(name, cfg, aug));
      write_augmented_dir(out, xs, loaded.stream.original_ids, manifest);
    } else if (activity->parsed()) {
      const StaaConfig cfg = load_config(config);
      const LoadedInput loaded = load_input(input);
      Manifest manifest("activity");
      manifest.add_input(input, loaded.sequence);
      manifest.add_config(cfg);
      std::ostringstream os;
      write_activity_csv(os, compute_activity(loaded.sequence, cfg));
      atomic_write(out, os.str());
      manifest.add("output", out);
      manifest.write(out + ".manifest");
    } else if (synth->parsed()) {
      std::istringstream spec_in(read_file(spec_file));
      SynthSpec spec = parse_synth_spec(spec_in);
      if (synth_seed) spec.seed = *synth_seed;
      const SynthResult result = generate(spec);
      const fs::path dir(out);
      fs::create_directories(dir);
      std::ostringstream edges, labels, next, active, spec_out;
      write_synth_edges(edges, result);
      write_labels(labels, result.labels);
      next << "# nodes " << result.next_snapshot.n() << '\n';
      for (const auto& e : result.next_snapshot.entries())
        if (e.u < e.v) next << e.u << ' ' << e.v << " 0\n";
      for (NodeId v : result.active_nodes) active << v << '\n';
      write_key_values(spec_out, synth_spec_entries(spec));
      atomic_write(dir / "edges.txt", edges.str());
      atomic_write(dir / "labels.txt", labels.str());
      atomic_write(dir / "next.txt", next.str());
      atomic_write(dir / "active.txt", active.str());
      atomic_write(dir / "spec.txt", spec_out.str());
      Manifest manifest("synth");
      for (const auto& [k, v] : synth_spec_entries(spec)) manifest.add(k, v);
      manifest.add("edges_sha256", sha256_hex(edges.str()));
      for (const char* f : {"edges.txt", "labels.txt", "next.txt", "active.txt", "spec.txt"}) manifest.add(std::string("output.") + f, f);
      manifest.write(dir / "manifest.txt");
    } else if (eval->parsed()) {
      const AugmentedDir run = read_augmented_dir(augmented_dir);
      if (run.matrices.empty()) throw ParseError("augmented directory holds no timesteps");
      const Truth truth =
          load_truth(truth_path, run.matrices.size(), run.matrices.front().n(), run.original_ids);
      std::ostringstream os;
      os << kReportHeader;
      report_rows(os, run.method, run.matrices, truth, aug.seed);
      atomic_write(out, os.str());
    } else if (compare->parsed()) {
      const StaaConfig cfg = load_config(config);
      const LoadedInput loaded = load_input(input);
      const Truth truth = truth_path.empty()
                              ? rolling_truth(loaded.sequence)
                              : load_truth(truth_path, loaded.sequence.size(), loaded.sequence.n(),
                                           loaded.stream.original_ids);
      Manifest manifest("compare");
      manifest.add("methods", methods_list);
      manifest.add_input(input, loaded.sequence);
      manifest.add_config(cfg);
      std::ostringstream os;
      os << kReportHeader;
      std::stringstream list(methods_list);
      std::string name;
      while (std::getline(list, name, ',')) {
        name = io_detail::trim(name);
        if (name.empty()) continue;
        report_rows(os, name, augment(loaded.sequence, make_augmenter(name, cfg, aug)), truth, aug.seed);
      }
      atomic_write(out, os.str());
      manifest.add("output", out);
      manifest.write(out + ".manifest");
    }
  } catch (const staa::Error& e) {
    print_error(e);
    return 1;
  } catch (const std::exception& e) {
    print_error(e);
    return 1;
  }
  return 0;
}
