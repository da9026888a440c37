#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "heis/core.hpp"
#include "heis/sdp.hpp"

namespace heis {

// Skeleton slots of a split copy: source, first fork, upper branch, lower branch, second fork, sink.
enum Slot { kP = 0, kA, kU1, kU2, kU3, kL1, kL2, kL3, kB, kQ };

// Child c of a split copy runs between these two skeleton slots.
inline constexpr std::array<std::pair<int, int>, 10> kChildSlots{{
    {kP, kA}, {kA, kU1}, {kU1, kU2}, {kU2, kU3}, {kU3, kB},
    {kA, kL1}, {kL1, kL2}, {kL2, kL3}, {kL3, kB}, {kB, kQ}}};

struct LaaksoCopy {
  int level = 0;   // 0 is the whole graph, n the edges
  int parent = -1;
  int index = -1;  // position among the parent's children
  bool forked = false;
  int side = 0;    // +1 upper branch, -1 lower branch, 0 in series
  int source = 0, sink = 0;
  int vbegin = 0, vend = 0;  // internal vertices (all descendants) are [vbegin, vend)
  std::array<int, 10> skeleton{};  // vertex per Slot, when level < n
  std::array<int, 10> children{};  // copy ids, when level < n
};

struct LaaksoStructure {
  int n = 0;
  int vertex_count = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<LaaksoCopy> copies;  // copies[0] is the whole graph, DFS order
  std::vector<std::vector<int>> adjacency;

  double edge_length() const;  // 6^{-n}
  std::vector<int> hops_from(int v) const;
  std::vector<int> copies_at(int level) const;
};

// n in 1..5.
LaaksoStructure build_laakso(int n);

double laakso_theta(long M, int j);
// Smallest M with 100 theta_1 < 1/100.
long minimal_laakso_M();

struct CopyFrame {
  Vec2 base{0, 0};
  double heading = 0;  // planar direction from source to sink
  double chord = 0;
  int side = 0;
};

struct HeisEmbedding {
  long M = 0;
  std::vector<double> theta;  // theta[j], j >= 1; theta[0] unused
  std::vector<HPoint> point;  // per vertex
  std::vector<CopyFrame> frame;  // per copy
  double closure_gap = 0;  // worst height mismatch where a branch closes up
};

inline constexpr double kTopChord = 0.9;

HeisEmbedding embed_laakso(const LaaksoStructure& g, long M);

struct LaaksoChecks {
  bool terminals = true;
  double terminal_margin = 0;  // min over copies of |pi(f s) - pi(f t)| / (6^{-i}/2)
  bool h_bound = true;
  double h_bound_lo = 0, h_bound_hi = 0;  // extremes of diam / 6^{-i}
  bool convex_hull = true;
  long hull_points = 0;
  double horizontality = 0;  // max |twisted dz| over edges
  bool lipschitz = true;
  double lipschitz_const = 0;  // max d_H / d_G
  double contraction = 0;      // max d_G / d_H
  double distortion = 0;       // lipschitz_const * contraction
  double closure_gap = 0;
};

// Exact checks over all copies and all vertex pairs.
LaaksoChecks check_laakso(const LaaksoStructure& g, const HeisEmbedding& f);

double measure_graph_distortion(const LaaksoStructure& g, const HeisEmbedding& f);

// distortion / ((log |G|)^{1/4} (log log |G|)^{1/2}), natural logs.
double distortion_growth_ratio(int vertex_count, double distortion);

struct PorosityWitness {
  int copy = 0;
  int level = 0;
  HPoint center;
  double radius = 0;
  bool verdict = false;
  double min_distance = 0;  // d_K from center to the sampled image
  bool cone = true;         // 6B inside f(s_k) C_1 on all samples
  int cone_samples = 0;
  double flat_sum = 0;      // worst sum of theta over forked indices along the chain
};

inline constexpr int kEdgeSamples = 32;

PorosityWitness porosity_witness(const LaaksoStructure& g, const HeisEmbedding& f, int copy,
                                 int edge_samples = kEdgeSamples, int cone_samples = 256,
                                 std::uint64_t seed = 1);

// One witness per copy at levels 1..n-1.
std::vector<PorosityWitness> porosity_scan(const LaaksoStructure& g, const HeisEmbedding& f,
                                           int edge_samples = kEdgeSamples, std::uint64_t seed = 1);

SdpResult sdp_min_distortion(const LaaksoStructure& g, const SdpOptions& opt = {});

std::string laakso_edge_list(const LaaksoStructure& g);
std::string laakso_points_csv(const HeisEmbedding& f);

}  // namespace heis
