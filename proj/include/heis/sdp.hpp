#pragma once

#include <utility>
#include <vector>

namespace heis {

struct SdpResult {
  double distortion = 1;  // sqrt(gamma)
  double gamma = 1;
  double gap = 0;         // final relative duality gap
  int iterations = 0;     // interior-point iterations summed over cutting-plane rounds
  int rounds = 0;
  int lower_constraints = 0;
};

struct SdpOptions {
  double tol = 1e-9;           // relative gap and infeasibility target of each solve
  double accept_gap = 1e-6;    // certified gap accepted when the iteration stalls
  double lower_slack = 1e-7;   // relative violation that triggers a new lower constraint
  int max_iterations = 200;
  int max_rounds = 60;
  int add_per_round = 200;
};

// Minimum distortion of the finite metric D into l2, via the semidefinite program
//   min gamma  s.t.  d(u,w)^2 <= |v_u - v_w|^2  (all pairs),  |v_u - v_w|^2 <= gamma d(u,w)^2 (edges).
// `edges` must be a set of pairs whose shortest paths realise D (for a graph metric, the graph
// edges; otherwise pass all pairs). Lower constraints are added by cutting planes.
SdpResult sdp_min_distortion(const std::vector<std::vector<double>>& D,
                             const std::vector<std::pair<int, int>>& edges, const SdpOptions& opt = {});

// Hop-count metric of a connected graph.
std::vector<std::vector<double>> graph_metric(int n, const std::vector<std::pair<int, int>>& edges);

}  // namespace heis
