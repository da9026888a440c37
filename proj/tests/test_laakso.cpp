#include <gtest/gtest.h>

#include <cmath>
#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "heis/errors.hpp"
#include "heis/laakso.hpp"

using namespace heis;

namespace {

long expected_vertices(int n) { return 2 + 8 * (std::lround(std::pow(10, n)) - 1) / 9; }

struct Fixture {
  LaaksoStructure g;
  HeisEmbedding f;
};

const Fixture& fixture(int n) {
  static std::map<int, Fixture> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    Fixture x;
    x.g = build_laakso(n);
    x.f = embed_laakso(x.g, minimal_laakso_M());
    it = cache.emplace(n, std::move(x)).first;
  }
  return it->second;
}

// Regular k-gon: chord_j / j over graph distances j = 1..k/2, max over min.
double cycle_distortion(int k) {
  double hi = 0, lo = INFINITY;
  for (int j = 1; j <= k / 2; ++j) {
    const double r = 2 * std::sin(M_PI * j / k) / j;
    hi = std::max(hi, r);
    lo = std::min(lo, r);
  }
  return hi / lo;
}

std::vector<std::pair<int, int>> cycle(int k) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < k; ++i) e.emplace_back(i, (i + 1) % k);
  return e;
}

}  // namespace

TEST(LaaksoStructure, Counts) {
  for (int n = 1; n <= 4; ++n) {
    const auto& g = fixture(n).g;
    EXPECT_EQ(g.vertex_count, expected_vertices(n));
    EXPECT_EQ(long(g.edges.size()), std::lround(std::pow(10, n)));
    for (int i = 0; i <= n; ++i) EXPECT_EQ(long(g.copies_at(i).size()), std::lround(std::pow(10, i)));
    std::set<std::pair<int, int>> uniq;
    for (auto [u, w] : g.edges) {
      EXPECT_NE(u, w);
      uniq.insert({std::min(u, w), std::max(u, w)});
    }
    EXPECT_EQ(uniq.size(), g.edges.size());
    EXPECT_DOUBLE_EQ(g.edge_length(), std::pow(6.0, -n));
  }
  EXPECT_THROW(build_laakso(0), ResourceLimit);
  EXPECT_THROW(build_laakso(6), ResourceLimit);
}

TEST(LaaksoStructure, TerminalsAtUnitDistance) {
  for (int n = 1; n <= 4; ++n) {
    const auto& g = fixture(n).g;
    const auto& top = g.copies[0];
    EXPECT_NEAR(g.hops_from(top.source)[top.sink] * g.edge_length(), 1, 1e-12);
    // Every copy at level i has terminals at graph distance 6^{-i}.
    for (int c : g.copies_at(std::min(n, 2)))
      EXPECT_NEAR(g.hops_from(g.copies[c].source)[g.copies[c].sink] * g.edge_length(),
                  std::pow(6.0, -std::min(n, 2)), 1e-12);
  }
}

TEST(LaaksoStructure, ForkedChildren) {
  const auto& g = fixture(2).g;
  for (int c : g.copies_at(1)) {
    const auto& k = g.copies[c];
    EXPECT_EQ(k.forked, k.index >= 1 && k.index <= 8);
    EXPECT_EQ(k.side, k.index >= 1 && k.index <= 4 ? 1 : k.index >= 5 && k.index <= 8 ? -1 : 0);
  }
}

TEST(LaaksoAngles, MinimalM) {
  const long M = minimal_laakso_M();
  EXPECT_LT(100 * laakso_theta(M, 1), 0.01);
  EXPECT_GE(100 * laakso_theta(M - 1, 1), 0.01);
  const double oracle = 1 / (std::sqrt(double(M + 3)) * std::log(double(M + 3)));
  EXPECT_NEAR(laakso_theta(M, 3), oracle, 1e-18);
  EXPECT_GT(laakso_theta(M, 1), laakso_theta(M, 2));
  EXPECT_THROW(embed_laakso(fixture(1).g, M - 1), PreconditionError);
}

TEST(LaaksoEmbedding, AllChecksHold) {
  for (int n = 1; n <= 4; ++n) {
    const auto& [g, f] = fixture(n);
    const auto c = check_laakso(g, f);
    EXPECT_TRUE(c.terminals) << n;
    EXPECT_GE(c.terminal_margin, 1);
    EXPECT_TRUE(c.h_bound) << n;
    EXPECT_TRUE(c.convex_hull) << n;
    EXPECT_GT(c.hull_points, 0);
    EXPECT_LE(c.horizontality, 1e-12);
    EXPECT_TRUE(c.lipschitz) << n;
    EXPECT_LE(c.lipschitz_const, 1 + 1e-12);
    EXPECT_NEAR(c.distortion, c.lipschitz_const * c.contraction, 1e-9 * c.distortion);
    EXPECT_NEAR(measure_graph_distortion(g, f), c.distortion, 1e-9 * c.distortion);
  }
}

TEST(LaaksoEmbedding, EdgesAreHorizontalSegmentsOfLength) {
  const auto& [g, f] = fixture(3);
  for (auto [u, w] : g.edges) {
    const HPoint p = f.point[u], q = f.point[w];
    EXPECT_LE(std::abs(twisted_dz(p, q)), 1e-15);
    EXPECT_LE(d_H(p, q), g.edge_length() * (1 + 1e-9));
  }
}

TEST(LaaksoEmbedding, DistortionNonDecreasingAndGrowthRatio) {
  double prev = 0;
  std::vector<double> ratios;
  for (int n = 1; n <= 4; ++n) {
    const auto& [g, f] = fixture(n);
    const double d = measure_graph_distortion(g, f);
    EXPECT_GE(d, prev);
    prev = d;
    if (n >= 2) ratios.push_back(distortion_growth_ratio(g.vertex_count, d));
  }
  const double lnV = std::log(90.0);
  EXPECT_NEAR(distortion_growth_ratio(90, 2.0), 2.0 / (std::pow(lnV, 0.25) * std::sqrt(std::log(lnV))), 1e-12);
  EXPECT_LE(*std::max_element(ratios.begin(), ratios.end()) / *std::min_element(ratios.begin(), ratios.end()), 2);
}

TEST(LaaksoPorosity, WitnessesHold) {
  const auto& [g, f] = fixture(3);
  const auto w = porosity_scan(g, f);
  EXPECT_EQ(w.size(), 10u + 100u);
  for (const auto& x : w) {
    EXPECT_TRUE(x.verdict) << x.copy;
    EXPECT_TRUE(x.cone) << x.copy;
    EXPECT_GT(x.min_distance, x.radius);
    EXPECT_EQ(x.cone_samples, 256);
    EXPECT_DOUBLE_EQ(x.radius, std::pow(6.0, -x.level));
  }
  const auto a = porosity_witness(g, f, w[3].copy, kEdgeSamples, 256, 7);
  const auto b = porosity_witness(g, f, w[3].copy, kEdgeSamples, 256, 7);
  EXPECT_EQ(a.min_distance, b.min_distance);
}

TEST(Sdp, KnownGraphs) {
  const auto c4 = sdp_min_distortion(graph_metric(4, cycle(4)), cycle(4));
  EXPECT_NEAR(c4.distortion, std::sqrt(2.0), 1e-4);
  for (int k : {5, 6, 7, 8}) EXPECT_NEAR(sdp_min_distortion(graph_metric(k, cycle(k)), cycle(k)).distortion, cycle_distortion(k), 1e-4);
  std::vector<std::pair<int, int>> path{{0, 1}, {1, 2}, {2, 3}, {3, 4}};
  EXPECT_NEAR(sdp_min_distortion(graph_metric(5, path), path).distortion, 1, 1e-4);
  std::vector<std::pair<int, int>> q3;
  for (int v = 0; v < 8; ++v)
    for (int b = 0; b < 3; ++b)
      if (!(v >> b & 1)) q3.emplace_back(v, v | 1 << b);
  EXPECT_NEAR(sdp_min_distortion(graph_metric(8, q3), q3).distortion, std::sqrt(3.0), 1e-4);
}

TEST(Sdp, InvalidInput) {
  EXPECT_THROW(graph_metric(3, {{0, 1}}), InvalidInput);
  std::vector<std::vector<double>> bad{{0, 1}, {2, 0}};
  EXPECT_THROW(sdp_min_distortion(bad, {{0, 1}}), InvalidInput);
  EXPECT_THROW(sdp_min_distortion(fixture(3).g), ResourceLimit);
}

TEST(Sdp, LaaksoIncreasing) {
  const auto g1 = sdp_min_distortion(fixture(1).g);
  // G1 is an 8-cycle with two pendant paths; its optimum is the cycle value.
  EXPECT_NEAR(g1.distortion, cycle_distortion(8), 1e-4);
  const auto g2 = sdp_min_distortion(fixture(2).g);
  EXPECT_GT(g2.distortion, g1.distortion + 1e-3);
  EXPECT_LE(g2.gap, 1e-6);
}

TEST(LaaksoIo, EdgeListAndCsv) {
  const auto& [g, f] = fixture(1);
  std::istringstream es(laakso_edge_list(g));
  std::string line;
  int lines = 0;
  while (std::getline(es, line)) ++lines;
  EXPECT_EQ(lines, 10);
  std::istringstream cs(laakso_points_csv(f));
  std::getline(cs, line);
  EXPECT_EQ(line, "id,x,y,z");
  lines = 0;
  while (std::getline(cs, line)) ++lines;
  EXPECT_EQ(lines, 10);
}
