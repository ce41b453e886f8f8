#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "staa/synth.hpp"

namespace staa {
namespace {

SynthSpec small_spec(std::uint64_t seed) {
  SynthSpec spec;
  spec.n = 60;
  spec.communities = 3;
  spec.snapshots = 5;
  spec.p_in = 0.3;
  spec.p_out = 0.02;
  spec.seed = seed;
  return spec;
}

TEST(Generate, NoNoiseMeansIdenticalPersistentSnapshots) {
  SynthSpec spec = small_spec(1);
  spec.noise_rate = 0.0;
  spec.churn_rate = 0.0;
  const SynthResult r = generate(spec);
  for (std::size_t t = 1; t < r.sequence.size(); ++t) EXPECT_EQ(r.sequence[t], r.sequence[0]);
  for (const auto& e : r.labels) EXPECT_EQ(e.label, EdgeLabel::Persistent);
  EXPECT_EQ(r.sequence[0], r.next_snapshot);
}

TEST(Generate, NoActiveNodesMeansNoNoise) {
  SynthSpec spec = small_spec(2);
  spec.active_fraction = 0.0;
  spec.noise_rate = 0.9;
  spec.churn_rate = 0.5;
  const SynthResult r = generate(spec);
  EXPECT_TRUE(r.active_nodes.empty());
  for (const auto& e : r.labels) EXPECT_EQ(e.label, EdgeLabel::Persistent);
}

TEST(Generate, DeterministicUnderSeed) {
  SynthSpec spec = small_spec(3);
  spec.churn_rate = 0.2;
  EXPECT_EQ(generate(spec), generate(spec));
  SynthSpec other = spec;
  other.seed = 4;
  EXPECT_NE(generate(spec).labels, generate(other).labels);
}

TEST(Generate, LabelsPartitionEdgeOccurrences) {
  SynthSpec spec = small_spec(5);
  spec.churn_rate = 0.3;
  spec.noise_rate = 0.2;
  const SynthResult r = generate(spec);
  std::set<std::tuple<std::size_t, NodeId, NodeId>> labeled;
  for (const auto& e : r.labels) {
    EXPECT_LT(e.u, e.v);
    EXPECT_TRUE(labeled.emplace(e.t, e.u, e.v).second);
    EXPECT_TRUE(r.sequence[e.t].has_edge(e.u, e.v));
    if (e.label == EdgeLabel::Noise) {
      EXPECT_FALSE(r.next_snapshot.has_edge(e.u, e.v));
      const bool touches_active = std::binary_search(r.active_nodes.begin(), r.active_nodes.end(), e.u) ||
                                  std::binary_search(r.active_nodes.begin(), r.active_nodes.end(), e.v);
      EXPECT_TRUE(touches_active);
    } else {
      EXPECT_TRUE(r.next_snapshot.has_edge(e.u, e.v));
    }
  }
  std::size_t occurrences = 0;
  for (const auto& s : r.sequence) occurrences += s.nnz() / 2;
  EXPECT_EQ(occurrences, r.labels.size());
}

TEST(Generate, ActiveNodesVaryMoreOverTime) {
  double active_var = 0.0, inert_var = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SynthSpec spec = small_spec(seed);
    spec.snapshots = 8;
    spec.noise_rate = 0.05;
    const SynthResult r = generate(spec);
    std::vector<bool> active(static_cast<std::size_t>(spec.n), false);
    for (NodeId v : r.active_nodes) active[v] = true;
    double a_sum = 0.0, i_sum = 0.0;
    for (NodeId v = 0; v < spec.n; ++v) {
      double mean = 0.0, sq = 0.0;
      for (const auto& s : r.sequence) {
        const auto d = static_cast<double>(s.neighbors(v).size());
        mean += d;
        sq += d * d;
      }
      const double T = static_cast<double>(r.sequence.size());
      const double var = sq / T - (mean / T) * (mean / T);
      (active[v] ? a_sum : i_sum) += var;
    }
    active_var += a_sum / static_cast<double>(r.active_nodes.size());
    inert_var += i_sum / static_cast<double>(spec.n - static_cast<NodeId>(r.active_nodes.size()));
  }
  EXPECT_GT(active_var, inert_var);
}

TEST(Generate, ActiveFractionAndCommunities) {
  const SynthSpec spec = small_spec(6);
  const SynthResult r = generate(spec);
  EXPECT_EQ(r.active_nodes.size(), 6u);
  EXPECT_TRUE(std::is_sorted(r.active_nodes.begin(), r.active_nodes.end()));
  // within-community density far exceeds between-community density
  double in = 0.0, out = 0.0;
  for (const auto& e : r.next_snapshot.entries()) (spec.community_of(e.u) == spec.community_of(e.v) ? in : out) += 1.0;
  EXPECT_GT(in, 2.0 * out);
}

TEST(Generate, RejectsDegenerateSpecs) {
  SynthSpec sparse = small_spec(0);
  sparse.p_in = 0.0;
  sparse.p_out = 0.0;
  EXPECT_THROW(generate(sparse), DegenerateSpecError);
  SynthSpec bad = small_spec(0);
  bad.noise_rate = 1.5;
  EXPECT_THROW(generate(bad), DegenerateSpecError);
  SynthSpec empty = small_spec(0);
  empty.snapshots = 0;
  EXPECT_THROW(generate(empty), DegenerateSpecError);
}

TEST(SynthSpec, ExpectedDegree) {
  SynthSpec spec;
  spec.n = 8;
  spec.communities = 2;
  spec.p_in = 0.5;
  spec.p_out = 0.25;
  // each community of 4: 0.5 * 3 + 0.25 * 4
  EXPECT_DOUBLE_EQ(spec.expected_degree(), 2.5);
}

}  // namespace
}  // namespace staa
