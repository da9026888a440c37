#include "heis/laakso.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include "heis/report_io.hpp"
#include "heis/rng.hpp"

namespace heis {

namespace {

// Runs body(i) for i in [0, count) on all cores; callers reduce per-index results in order.
void parallel_for(long count, const std::function<void(long)>& body) {
  const long workers = std::max(1L, std::min<long>(count, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (long w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (long i = w; i < count; i += workers) body(i);
    });
  for (auto& t : pool) t.join();
}

double cross(const Vec2& p, const Vec2& q) { return p.x() * q.y() - q.x() * p.y(); }

Vec2 planar(const HPoint& p) { return {p.x, p.y}; }

Vec2 rotated(const Vec2& d, double a) {
  return {std::cos(a) * d.x() - std::sin(a) * d.y(), std::sin(a) * d.x() + std::cos(a) * d.y()};
}

// Height reached from p by the horizontal segment to planar point q.
double lift(const HPoint& p, const Vec2& q) { return p.z + 0.5 * cross(planar(p), q); }

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  std::vector<Vec2> h(2 * pts.size());
  std::size_t k = 0;
  auto turn = [](const Vec2& o, const Vec2& a, const Vec2& b) { return cross(a - o, b - o); };
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && turn(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && turn(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;  // counter-clockwise
}

bool hull_contains(const std::vector<Vec2>& h, const Vec2& p, double tol) {
  for (std::size_t i = 0; i < h.size(); ++i) {
    const Vec2& a = h[i];
    const Vec2& b = h[(i + 1) % h.size()];
    if (cross(b - a, p - a) < -tol * (b - a).norm()) return false;
  }
  return true;
}

}  // namespace

double LaaksoStructure::edge_length() const { return std::pow(6.0, -n); }

std::vector<int> LaaksoStructure::hops_from(int v) const {
  std::vector<int> d(vertex_count, -1);
  std::deque<int> q{v};
  d[v] = 0;
  while (!q.empty()) {
    const int u = q.front();
    q.pop_front();
    for (int w : adjacency[u])
      if (d[w] < 0) {
        d[w] = d[u] + 1;
        q.push_back(w);
      }
  }
  return d;
}

std::vector<int> LaaksoStructure::copies_at(int level) const {
  std::vector<int> out;
  for (int c = 0; c < int(copies.size()); ++c)
    if (copies[c].level == level) out.push_back(c);
  return out;
}

LaaksoStructure build_laakso(int n) {
  if (n < 1 || n > 5) throw ResourceLimit("Laakso level must be in 1..5");
  LaaksoStructure g;
  g.n = n;
  int next = 1;  // 0 is the source; the sink gets the last id
  std::function<void(int)> split = [&](int c) {
    LaaksoCopy& cp = g.copies[c];
    if (cp.level == n) {
      g.edges.push_back({cp.source, cp.sink});
      return;
    }
    cp.vbegin = next;
    std::array<int, 10> sk{};
    sk[kP] = cp.source;
    sk[kQ] = cp.sink;
    for (int s = kA; s <= kB; ++s) sk[s] = next++;
    g.copies[c].skeleton = sk;
    for (int i = 0; i < 10; ++i) {
      LaaksoCopy ch;
      ch.level = g.copies[c].level + 1;
      ch.parent = c;
      ch.index = i;
      ch.forked = i != 0 && i != 9;
      ch.side = i == 0 || i == 9 ? 0 : (i <= 4 ? 1 : -1);
      ch.source = sk[kChildSlots[i].first];
      ch.sink = sk[kChildSlots[i].second];
      ch.vbegin = ch.vend = next;
      g.copies[c].children[i] = int(g.copies.size());
      g.copies.push_back(ch);
      split(int(g.copies.size()) - 1);
    }
    g.copies[c].vend = next;
  };
  LaaksoCopy root;
  root.source = 0;
  g.copies.push_back(root);
  // The sink id is only known after the recursion; use a placeholder and patch it.
  const int kSinkMark = -2;
  g.copies[0].sink = kSinkMark;
  split(0);
  g.vertex_count = next + 1;
  for (auto& cp : g.copies) {
    if (cp.sink == kSinkMark) cp.sink = next;
    for (int& v : cp.skeleton)
      if (v == kSinkMark) v = next;
  }
  for (auto& e : g.edges)
    if (e.second == kSinkMark) e.second = next;
  g.adjacency.assign(g.vertex_count, {});
  for (auto [u, w] : g.edges) {
    g.adjacency[u].push_back(w);
    g.adjacency[w].push_back(u);
  }
  return g;
}

double laakso_theta(long M, int j) {
  const double x = double(M) + j;
  return 1.0 / (std::sqrt(x) * std::log(x));
}

long minimal_laakso_M() {
  auto ok = [](long M) { return 100.0 * laakso_theta(M, 1) < 0.01; };
  long lo = 1, hi = 2;
  while (!ok(hi)) hi *= 2;
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

HeisEmbedding embed_laakso(const LaaksoStructure& g, long M) {
  if (M < 1 || !(100.0 * laakso_theta(M, 1) < 0.01))
    throw PreconditionError("M too small: need 100 theta_1 < 1/100 (minimal M is " +
                            std::to_string(minimal_laakso_M()) + ")");
  HeisEmbedding f;
  f.M = M;
  f.theta.assign(g.n + 2, std::numeric_limits<double>::quiet_NaN());
  for (int j = 1; j <= g.n + 1; ++j) f.theta[j] = laakso_theta(M, j);
  f.point.assign(g.vertex_count, HPoint{});
  f.frame.assign(g.copies.size(), CopyFrame{});
  f.point[g.copies[0].source] = HPoint(0, 0, 0);
  f.point[g.copies[0].sink] = HPoint(kTopChord, 0, 0);

  // Copies are stored parent-first, so one forward pass places every skeleton.
  for (int c = 0; c < int(g.copies.size()); ++c) {
    const LaaksoCopy& cp = g.copies[c];
    const HPoint P = f.point[cp.source], Q = f.point[cp.sink];
    const Vec2 chord = planar(Q) - planar(P);
    CopyFrame& fr = f.frame[c];
    fr.base = planar(P);
    fr.chord = chord.norm();
    fr.heading = std::atan2(chord.y(), chord.x());
    fr.side = cp.side;
    if (cp.level == g.n) continue;

    const double th = f.theta[cp.level + 1];
    const Vec2 d = chord / fr.chord;
    const double l = fr.chord / (2 + 4 * std::cos(th / 2));
    const Vec2 up = rotated(d, th / 2), dn = rotated(d, -th / 2);
    std::array<Vec2, 10> xy;
    xy[kP] = planar(P);
    xy[kQ] = planar(Q);
    xy[kA] = xy[kP] + l * d;
    xy[kB] = xy[kQ] - l * d;
    xy[kU1] = xy[kA] + l * up;
    xy[kU2] = xy[kA] + 2 * l * std::cos(th / 2) * d;
    xy[kU3] = xy[kB] - l * up;
    xy[kL1] = xy[kA] + l * dn;
    xy[kL2] = xy[kU2];
    xy[kL3] = xy[kB] - l * dn;

    auto& pt = f.point;
    const auto& sk = cp.skeleton;
    auto place = [&](int from, int to) { pt[sk[to]] = HPoint(xy[to].x(), xy[to].y(), lift(pt[sk[from]], xy[to])); };
    place(kP, kA);
    place(kA, kU1);
    place(kU1, kU2);
    place(kU2, kU3);
    place(kU3, kB);
    place(kA, kL1);
    place(kL1, kL2);
    place(kL2, kL3);
    const double lower_b = lift(pt[sk[kL3]], xy[kB]);
    const double sink_z = lift(pt[sk[kB]], xy[kQ]);
    f.closure_gap = std::max({f.closure_gap, std::abs(lower_b - pt[sk[kB]].z), std::abs(sink_z - Q.z)});
  }
  return f;
}

LaaksoChecks check_laakso(const LaaksoStructure& g, const HeisEmbedding& f) {
  LaaksoChecks r;
  r.closure_gap = f.closure_gap;
  r.terminal_margin = std::numeric_limits<double>::infinity();
  r.h_bound_lo = std::numeric_limits<double>::infinity();
  const double eps = 1e-12;

  for (auto [u, w] : g.edges) r.horizontality = std::max(r.horizontality, std::abs(twisted_dz(f.point[u], f.point[w])));

  // Terminals and convex hulls.
  for (int c = 0; c < int(g.copies.size()); ++c) {
    const LaaksoCopy& cp = g.copies[c];
    const double scale = std::pow(6.0, -cp.level);
    const HPoint &s = f.point[cp.source], &t = f.point[cp.sink];
    const double proj = (planar(t) - planar(s)).norm();
    r.terminal_margin = std::min(r.terminal_margin, proj / (scale / 2));
    if (!(scale / 2 <= proj * (1 + eps) && proj <= d_H(s, t) * (1 + eps))) r.terminals = false;
    if (cp.level == g.n) continue;
    std::vector<Vec2> sk;
    for (int v : cp.skeleton) sk.push_back(planar(f.point[v]));
    const auto hull = convex_hull(sk);
    for (int v = cp.vbegin; v < cp.vend; ++v) {
      ++r.hull_points;
      if (!hull_contains(hull, planar(f.point[v]), 1e-12 * scale)) r.convex_hull = false;
    }
  }

  // Diameters of every copy, from each copy's vertex range.
  std::vector<double> diam(g.copies.size(), 0.0);
  parallel_for(long(g.copies.size()), [&](long c) {
    const LaaksoCopy& cp = g.copies[c];
    std::vector<int> vs{cp.source, cp.sink};
    for (int v = cp.vbegin; v < cp.vend; ++v) vs.push_back(v);
    double m = 0;
    for (std::size_t i = 0; i < vs.size(); ++i)
      for (std::size_t j = i + 1; j < vs.size(); ++j) m = std::max(m, d_H(f.point[vs[i]], f.point[vs[j]]));
    diam[c] = m;
  });
  for (int c = 0; c < int(g.copies.size()); ++c) {
    const double scale = std::pow(6.0, -g.copies[c].level);
    const double ratio = diam[c] / scale;
    r.h_bound_lo = std::min(r.h_bound_lo, ratio);
    r.h_bound_hi = std::max(r.h_bound_hi, ratio);
    if (!(ratio >= 0.5 * (1 - eps) && ratio <= 1 + 1e-9 / scale)) r.h_bound = false;
  }

  // All pairs: BFS per source.
  const double e = g.edge_length();
  std::vector<double> up(g.vertex_count, 0.0), down(g.vertex_count, 0.0);
  std::vector<char> lip(g.vertex_count, 1);
  parallel_for(g.vertex_count, [&](long u) {
    const auto hops = g.hops_from(int(u));
    for (int w = int(u) + 1; w < g.vertex_count; ++w) {
      const double dg = hops[w] * e, dh = d_H(f.point[u], f.point[w]);
      up[u] = std::max(up[u], dh / dg);
      down[u] = std::max(down[u], dg / dh);
      if (dh > dg + 1e-9) lip[u] = 0;
    }
  });
  for (int u = 0; u < g.vertex_count; ++u) {
    r.lipschitz_const = std::max(r.lipschitz_const, up[u]);
    r.contraction = std::max(r.contraction, down[u]);
    if (!lip[u]) r.lipschitz = false;
  }
  r.distortion = r.lipschitz_const * r.contraction;
  return r;
}

double measure_graph_distortion(const LaaksoStructure& g, const HeisEmbedding& f) {
  const double e = g.edge_length();
  std::vector<double> up(g.vertex_count, 0.0), down(g.vertex_count, 0.0);
  parallel_for(g.vertex_count, [&](long u) {
    const auto hops = g.hops_from(int(u));
    for (int w = int(u) + 1; w < g.vertex_count; ++w) {
      const double dg = hops[w] * e, dh = d_H(f.point[u], f.point[w]);
      up[u] = std::max(up[u], dh / dg);
      down[u] = std::max(down[u], dg / dh);
    }
  });
  return *std::max_element(up.begin(), up.end()) * *std::max_element(down.begin(), down.end());
}

double distortion_growth_ratio(int vertex_count, double distortion) {
  const double l = std::log(double(vertex_count));
  return distortion / (std::pow(l, 0.25) * std::sqrt(std::log(l)));
}

PorosityWitness porosity_witness(const LaaksoStructure& g, const HeisEmbedding& f, int copy, int edge_samples,
                                 int cone_samples, std::uint64_t seed) {
  if (copy < 0 || copy >= int(g.copies.size())) throw InvalidInput("copy id out of range");
  const LaaksoCopy& cp = g.copies[copy];
  if (cp.level < 1 || cp.level > g.n - 1) throw InvalidInput("witness level must be in 1..n-1");
  PorosityWitness w;
  w.copy = copy;
  w.level = cp.level;
  const int k = cp.level;
  const HPoint sk = f.point[cp.source];
  const Vec2 dir = (planar(f.point[cp.sink]) - planar(sk)).normalized();
  const double u = dir.y(), v = -dir.x();  // clockwise quarter turn
  const double far = std::pow(6.0, 10 - k);
  w.center = group_mul(sk, HPoint(u * far, v * far, 0));
  w.radius = std::pow(6.0, -k);

  // Compare fourth powers of d_K.
  double best = std::numeric_limits<double>::infinity();
  auto visit = [&](const HPoint& q) {
    const double dx = q.x - w.center.x, dy = q.y - w.center.y;
    const double r2 = dx * dx + dy * dy, t = twisted_dz(w.center, q);
    best = std::min(best, r2 * r2 + 16 * t * t);
  };
  for (const HPoint& p : f.point) visit(p);
  for (auto [a, b] : g.edges) {
    const Vec3 pa = f.point[a].vec(), pb = f.point[b].vec();
    // A horizontal straight segment has height linear in the parameter.
    for (int j = 1; j < edge_samples; ++j) visit(HPoint(pa + (double(j) / edge_samples) * (pb - pa)));
  }
  w.min_distance = std::sqrt(std::sqrt(best));
  w.verdict = best > std::pow(w.radius, 4);

  // 6B as left translates of points of the d_K ball of radius 6r, half of them on its boundary.
  CounterRng rng(seed, std::uint64_t(copy));
  const double R = 6 * w.radius;
  const Cone c1(1.0);
  while (w.cone_samples < cone_samples) {
    HPoint p(rng.uniform(-R, R), rng.uniform(-R, R), rng.uniform(-R * R / 4, R * R / 4));
    const double n = d_K(HPoint(), p);
    if (n > R || n == 0) continue;
    if (w.cone_samples % 2) p = dilate(p, R / n);
    ++w.cone_samples;
    if (!cone_contains(c1, sk, group_mul(w.center, p))) w.cone = false;
  }

  // Flatness budget along the ancestor chain Y_0 > ... > Y_k.
  std::vector<int> chain;
  for (int c = copy; c >= 0; c = g.copies[c].parent) chain.push_back(c);
  std::reverse(chain.begin(), chain.end());  // chain[j] has level j
  for (int i = 0; i + 2 <= k; ++i) {
    double s = 0;
    for (int j = i + 2; j <= k; ++j)
      if (g.copies[chain[j]].forked) s += f.theta[j];
    w.flat_sum = std::max(w.flat_sum, s);
  }
  return w;
}

std::vector<PorosityWitness> porosity_scan(const LaaksoStructure& g, const HeisEmbedding& f, int edge_samples,
                                           std::uint64_t seed) {
  std::vector<int> ids;
  for (int k = 1; k <= g.n - 1; ++k)
    for (int c : g.copies_at(k)) ids.push_back(c);
  std::vector<PorosityWitness> out(ids.size());
  parallel_for(long(ids.size()), [&](long i) { out[i] = porosity_witness(g, f, ids[i], edge_samples, 256, seed); });
  return out;
}

SdpResult sdp_min_distortion(const LaaksoStructure& g, const SdpOptions& opt) {
  if (g.vertex_count > 200) throw ResourceLimit("SDP oracle is limited to 200 vertices");
  return sdp_min_distortion(graph_metric(g.vertex_count, g.edges), g.edges, opt);
}

std::string laakso_edge_list(const LaaksoStructure& g) {
  std::ostringstream os;
  for (auto [u, w] : g.edges) os << u << ' ' << w << '\n';
  return os.str();
}

std::string laakso_points_csv(const HeisEmbedding& f) {
  CsvWriter csv({"id", "x", "y", "z"});
  for (std::size_t i = 0; i < f.point.size(); ++i) csv.row({double(i), f.point[i].x, f.point[i].y, f.point[i].z});
  return csv.str();
}

}  // namespace heis
