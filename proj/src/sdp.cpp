#include "heis/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "heis/errors.hpp"

namespace heis {

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Constraint i acts on the Gram block through sign_i * a_i a_i^T (a_i = e_u - e_w, vertex 0
// removed) and on the diagonal block through a few sparse coefficients.
struct Problem {
  int m = 0;        // Gram block size
  int nlp = 0;      // diagonal block size: [gamma, edge slacks, lower slacks]
  Mat A;            // m x K columns a_i
  Vec sign;         // +-1
  std::vector<std::vector<std::pair<int, double>>> lp;  // per constraint
  Vec b;
  Vec c;            // cost on the diagonal block (Gram cost is zero)
};

struct Point {
  Mat X, Z;   // Gram block
  Vec x, z;   // diagonal block
  Vec y;
};

Vec apply_A(const Problem& P, const Mat& X, const Vec& x) {
  const int K = int(P.sign.size());
  Vec r(K);
  const Mat XA = X * P.A;
  for (int i = 0; i < K; ++i) {
    double v = P.sign[i] * P.A.col(i).dot(XA.col(i));
    for (auto [k, a] : P.lp[i]) v += a * x[k];
    r[i] = v;
  }
  return r;
}

void apply_At(const Problem& P, const Vec& y, Mat& S, Vec& s) {
  S = P.A * (y.cwiseProduct(P.sign)).asDiagonal() * P.A.transpose();
  s = Vec::Zero(P.nlp);
  for (int i = 0; i < int(y.size()); ++i)
    for (auto [k, a] : P.lp[i]) s[k] += a * y[i];
}

double max_step(const Mat& X, const Mat& dX) {
  Eigen::LLT<Mat> llt(X);
  if (llt.info() != Eigen::Success) return 0;
  const Mat L = llt.matrixL();
  const Mat W = L.triangularView<Eigen::Lower>().solve(L.triangularView<Eigen::Lower>().solve(dX).transpose());
  const double lmin = Eigen::SelfAdjointEigenSolver<Mat>(0.5 * (W + W.transpose()), Eigen::EigenvaluesOnly)
                          .eigenvalues()
                          .minCoeff();
  return lmin < 0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

double max_step(const Vec& x, const Vec& dx) {
  double a = std::numeric_limits<double>::infinity();
  for (int k = 0; k < x.size(); ++k)
    if (dx[k] < 0) a = std::min(a, -x[k] / dx[k]);
  return a;
}

struct SolveOut {
  Point pt;
  double gap = 0;
  int iterations = 0;
};

SolveOut solve(const Problem& P, const SdpOptions& opt) {
  const int K = int(P.sign.size());
  const int N = P.m + P.nlp;
  Point pt;
  pt.X = Mat::Identity(P.m, P.m);
  pt.Z = Mat::Identity(P.m, P.m);
  pt.x = Vec::Ones(P.nlp);
  pt.z = Vec::Ones(P.nlp);
  pt.y = Vec::Zero(K);
  const double bnorm = 1 + P.b.norm(), cnorm = 1 + P.c.norm();
  double last_mu = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    Mat ATy;
    Vec aty;
    apply_At(P, pt.y, ATy, aty);
    const Mat Rd = -pt.Z - ATy;             // Gram cost is zero
    const Vec rd = P.c - pt.z - aty;
    const Vec Rp = P.b - apply_A(P, pt.X, pt.x);
    const double pobj = P.c.dot(pt.x), dobj = P.b.dot(pt.y);
    const double mu = ((pt.X.cwiseProduct(pt.Z)).sum() + pt.x.dot(pt.z)) / N;
    const double gap = std::abs(pobj - dobj) / (1 + std::abs(pobj) + std::abs(dobj));
    const double pinf = Rp.norm() / bnorm;
    const double dinf = std::sqrt(Rd.squaredNorm() + rd.squaredNorm()) / cnorm;
    if (gap < opt.tol && pinf < opt.tol && dinf < opt.tol) return {pt, gap, it};
    // Past the attainable precision the iterates stop moving; accept if certified.
    if (mu >= 0.9 * last_mu && ++stalled >= 10) {
      if (gap < opt.accept_gap && pinf < opt.accept_gap && dinf < opt.accept_gap) return {pt, gap, it};
      throw NumericError("SDP solver stalled with relative gap " + std::to_string(gap));
    }
    if (mu < 0.9 * last_mu) stalled = 0;
    last_mu = std::min(last_mu, mu);

    Eigen::LLT<Mat> zl(pt.Z);
    if (zl.info() != Eigen::Success) throw NumericError("SDP dual iterate lost definiteness");
    const Mat Zi = zl.solve(Mat::Identity(P.m, P.m));
    const Vec zi = pt.z.cwiseInverse();

    // Schur complement: (A^T X A) o (A^T Z^-1 A) on the Gram block plus the diagonal block.
    const Mat AX = P.A.transpose() * pt.X * P.A;
    const Mat AZ = P.A.transpose() * Zi * P.A;
    Mat M = AX.cwiseProduct(AZ).cwiseProduct(P.sign * P.sign.transpose());
    {
      // Diagonal block couples constraints sharing an LP variable (only gamma is shared).
      std::vector<std::vector<std::pair<int, double>>> byvar(P.nlp);
      for (int i = 0; i < K; ++i)
        for (auto [k, a] : P.lp[i]) byvar[k].push_back({i, a});
      for (int k = 0; k < P.nlp; ++k) {
        const double w = pt.x[k] * zi[k];
        for (auto [i, a] : byvar[k])
          for (auto [j, b2] : byvar[k]) M(i, j) += a * b2 * w;
      }
    }
    // Near the optimum M is badly conditioned; a tiny diagonal shift keeps the factorisation alive.
    M.diagonal().array() += 1e-14 * M.diagonal().maxCoeff();
    Eigen::LDLT<Mat> ml(M);
    if (ml.info() != Eigen::Success) throw NumericError("SDP Schur complement factorisation failed");

    auto direction = [&](double sigma_mu, Point& d) {
      // rhs = Rp - A(sigma mu Z^-1) + A(X) + A(X Rd Z^-1)
      const Mat G = sigma_mu * Zi - pt.X - pt.X * Rd * Zi;
      const Vec g = sigma_mu * zi - pt.x - pt.x.cwiseProduct(rd).cwiseProduct(zi);
      const Vec rhs = Rp - apply_A(P, G, g);
      d.y = ml.solve(rhs);
      Mat S;
      Vec s;
      apply_At(P, d.y, S, s);
      d.Z = Rd - S;
      d.z = rd - s;
      Mat dX = sigma_mu * Zi - pt.X - pt.X * d.Z * Zi;
      d.X = 0.5 * (dX + dX.transpose());
      d.x = sigma_mu * zi - pt.x - pt.x.cwiseProduct(d.z).cwiseProduct(zi);
    };
    auto steps = [&](const Point& d, double& ap, double& ad) {
      ap = std::min({1.0, 0.95 * max_step(pt.X, d.X), 0.95 * max_step(pt.x, d.x)});
      ad = std::min({1.0, 0.95 * max_step(pt.Z, d.Z), 0.95 * max_step(pt.z, d.z)});
    };

    Point d;
    direction(0.0, d);
    double ap, ad;
    steps(d, ap, ad);
    const double mu_aff = (((pt.X + ap * d.X).cwiseProduct(pt.Z + ad * d.Z)).sum() +
                           (pt.x + ap * d.x).dot(pt.z + ad * d.z)) / N;
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3), 1e-3, 0.9);
    direction(sigma * mu, d);
    steps(d, ap, ad);
    pt.X += ap * d.X;
    pt.x += ap * d.x;
    pt.Z += ad * d.Z;
    pt.z += ad * d.z;
    pt.y += ad * d.y;
  }
  throw NumericError("SDP solver did not converge within " + std::to_string(opt.max_iterations) + " iterations");
}

}  // namespace

std::vector<std::vector<double>> graph_metric(int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::vector<int>> adj(n);
  for (auto [u, w] : edges) {
    adj[u].push_back(w);
    adj[w].push_back(u);
  }
  std::vector<std::vector<double>> D(n, std::vector<double>(n, -1));
  for (int s = 0; s < n; ++s) {
    std::deque<int> q{s};
    D[s][s] = 0;
    while (!q.empty()) {
      const int u = q.front();
      q.pop_front();
      for (int w : adj[u])
        if (D[s][w] < 0) {
          D[s][w] = D[s][u] + 1;
          q.push_back(w);
        }
    }
    for (int w = 0; w < n; ++w)
      if (D[s][w] < 0) throw InvalidInput("graph is not connected");
  }
  return D;
}

SdpResult sdp_min_distortion(const std::vector<std::vector<double>>& Din, const std::vector<std::pair<int, int>>& edges,
                             const SdpOptions& opt) {
  const int n = int(Din.size());
  if (n < 2) throw InvalidInput("need at least 2 points");
  if (n > 200) throw ResourceLimit("SDP oracle is limited to 200 points");
  double diam = 0;
  for (int i = 0; i < n; ++i) {
    if (int(Din[i].size()) != n) throw InvalidInput("distance matrix must be square");
    for (int j = 0; j < n; ++j) {
      if (!(Din[i][j] >= 0) || std::abs(Din[i][j] - Din[j][i]) > 1e-12 * (1 + Din[i][j]))
        throw InvalidInput("distance matrix must be symmetric and nonnegative");
      if (i != j && !(Din[i][j] > 0)) throw InvalidInput("distinct points need positive distance");
      diam = std::max(diam, Din[i][j]);
    }
  }
  if (edges.empty()) throw InvalidInput("edge list is empty");
  std::vector<std::vector<double>> D = Din;
  for (auto& r : D)
    for (double& v : r) v /= diam;

  const int m = n - 1;  // vertex 0 pinned at the origin
  auto column = [&](int u, int w) {
    Vec a = Vec::Zero(m);
    if (u > 0) a[u - 1] += 1;
    if (w > 0) a[w - 1] -= 1;
    return a;
  };
  std::set<std::pair<int, int>> lower;
  for (auto [u, w] : edges) lower.insert({std::min(u, w), std::max(u, w)});
  // Seed the lower set with each vertex's farthest partner.
  for (int u = 0; u < n; ++u) {
    int far = u == 0 ? 1 : 0;
    for (int w = 0; w < n; ++w)
      if (w != u && D[u][w] > D[u][far]) far = w;
    lower.insert({std::min(u, far), std::max(u, far)});
  }

  SdpResult res;
  for (int round = 1; round <= opt.max_rounds; ++round) {
    Problem P;
    P.m = m;
    const int E = int(edges.size()), L = int(lower.size());
    const int K = E + L;
    P.nlp = 1 + E + L;
    P.A.resize(m, K);
    P.sign.resize(K);
    P.b.resize(K);
    P.lp.assign(K, {});
    P.c = Vec::Zero(P.nlp);
    P.c[0] = 1;
    for (int e = 0; e < E; ++e) {
      const auto [u, w] = edges[e];
      const double d2 = D[u][w] * D[u][w];
      // gamma d^2 - |v_u - v_w|^2 - s_e = 0
      P.A.col(e) = column(u, w);
      P.sign[e] = -1;
      P.lp[e] = {{0, d2}, {1 + e, -1.0}};
      P.b[e] = 0;
    }
    int i = E;
    for (auto [u, w] : lower) {
      // |v_u - v_w|^2 - t = d^2
      P.A.col(i) = column(u, w);
      P.sign[i] = 1;
      P.lp[i] = {{1 + i, -1.0}};
      P.b[i] = D[u][w] * D[u][w];
      ++i;
    }
    const SolveOut s = solve(P, opt);
    res.iterations += s.iterations;
    res.rounds = round;
    res.gap = s.gap;
    res.gamma = s.pt.x[0];
    res.lower_constraints = L;

    // Cutting plane: add the most violated lower constraints.
    auto dist2 = [&](int u, int w) {
      const Vec a = column(u, w);
      return a.dot(s.pt.X * a);
    };
    std::vector<std::pair<double, std::pair<int, int>>> viol;
    for (int u = 0; u < n; ++u)
      for (int w = u + 1; w < n; ++w) {
        if (lower.count({u, w})) continue;
        const double d2 = D[u][w] * D[u][w];
        const double r = dist2(u, w) / d2;
        if (r < 1 - opt.lower_slack) viol.push_back({r, {u, w}});
      }
    if (viol.empty()) {
      res.distortion = std::sqrt(std::max(1.0, res.gamma));
      return res;
    }
    std::sort(viol.begin(), viol.end());
    for (int k = 0; k < int(viol.size()) && k < opt.add_per_round; ++k) lower.insert(viol[k].second);
  }
  throw NumericError("SDP cutting-plane loop did not close (gap " + std::to_string(res.gap) + ")");
}

}  // namespace heis
