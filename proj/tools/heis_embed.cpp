// heis-embed: command-line front end for the embedding library.
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "heis/affine.hpp"
#include "heis/config.hpp"
#include "heis/foliation.hpp"
#include "heis/laakso.hpp"
#include "heis/report_io.hpp"
#include "heis/snowflake.hpp"
#include "heis/special_surfaces.hpp"

using namespace heis;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::optional<std::uint64_t> seed;
  std::string config_path;
  std::string out = ".";
  Config config;

  SampleConfig sampler() const {
    SampleConfig c;
    c.buckets = int(config.get_int("buckets", c.buckets));
    c.quota = int(config.get_int("quota", c.quota));
    c.max_attempts = config.get_int("max_attempts", c.max_attempts);
    c.seed = seed ? *seed : std::uint64_t(config.get_int("seed", 1));
    return c;
  }
  std::uint64_t hash() const {
    Config c = config;
    c.set("seed", std::to_string(sampler().seed));
    return c.hash();
  }
  std::string path(const std::string& name) const { return (fs::path(out) / name).string(); }
};

Json header(const Common& c, const std::string& command) {
  return Json{{"schema", kSchemaVersion},
              {"command", command},
              {"seed", c.sampler().seed},
              {"config_hash", hex64(c.hash())},
              {"config", c.config.entries()}};
}

void emit(const Common& c, const std::string& name, const std::string& text) {
  write_text(c.path(name), text);
  std::cout << c.path(name) << '\n';
}

// ---- the embeddable families ----

struct Target {
  std::string kind = "line";
  std::vector<double> dir{1, 0, 0}, base{0, 0, 0};
  std::vector<double> plane{0, 0, 0};
  std::vector<double> vertical;
  std::vector<double> simplex{0, 0, 0, 1, 0, 0, 0, 1, 0};
  std::string F = "square";
  int family = 1;
  double rho = 0;
};

void add_target_options(CLI::App* app, Target& t) {
  const auto kinds = CLI::IsMember(
      {"line", "plane", "simplex", "revolution", "ksphere", "esphere", "saddle", "snowflake", "circle"});
  app->add_option("kind,--kind", t.kind, "line|plane|simplex|revolution|ksphere|esphere|saddle|snowflake|circle")
      ->check(kinds);
  app->add_option("--a,--dir", t.dir, "line direction a1,a2,a3")->delimiter(',')->expected(3);
  app->add_option("--c,--base", t.base, "line base point c1,c2,c3")->delimiter(',')->expected(3);
  app->add_option("--simplex", t.simplex, "simplex vertices x,y,z,... (2 or 3 vertices)")
      ->delimiter(',')
      ->expected(6, 9);
  app->add_option("--plane", t.plane, "graph plane z = a x + b y + c as a,b,c")->delimiter(',')->expected(3);
  app->add_option("--vertical", t.vertical, "vertical plane y = b x + c as b,c")->delimiter(',')->expected(2);
  app->add_option("--F", t.F, "revolution profile preset")->check(CLI::IsMember({"zero", "square", "cosh"}));
  app->add_option("--family", t.family, "saddle family")->check(CLI::Range(1, 4));
  app->add_option("--rho", t.rho, "revolution disc radius (default T)");
}

PlaneSpec plane_spec(const Target& t) {
  if (!t.vertical.empty()) return PlaneSpec::vertical(t.vertical[0], t.vertical[1]);
  return PlaneSpec::graph(t.plane[0], t.plane[1], t.plane[2]);
}

LineSpec line_spec(const Target& t) {
  Vec3 a(t.dir[0], t.dir[1], t.dir[2]);
  if (!(a.norm() > 0)) throw InvalidInput("line direction must be nonzero");
  return LineSpec{a.normalized(), Vec3(t.base[0], t.base[1], t.base[2])};
}

std::vector<Vec3> simplex_vertices(const Target& t) {
  if (t.simplex.size() % 3 != 0 || t.simplex.size() < 6 || t.simplex.size() > 9)
    throw InvalidInput("simplex needs 2 or 3 vertices");
  std::vector<Vec3> v;
  for (std::size_t i = 0; i < t.simplex.size(); i += 3) v.emplace_back(t.simplex[i], t.simplex[i + 1], t.simplex[i + 2]);
  return v;
}

DistortionReport measure(const Target& t, const SampleConfig& cfg, Json& info) {
  if (t.kind == "line") {
    const auto f = embed_line(line_spec(t));
    const char* tags[] = {"vertical", "horizontal", "generic"};
    info["case"] = tags[int(f.line_case().tag)];
    return line_distortion(f, cfg);
  }
  if (t.kind == "plane") return plane_distortion(embed_plane(plane_spec(t)), cfg);
  if (t.kind == "simplex") return simplex_distortion(embed_simplex(simplex_vertices(t)), cfg);
  if (t.kind == "revolution") {
    const auto spec = revolution_preset(t.F);
    const double rho = t.rho > 0 ? t.rho : spec.T;
    info["F"] = t.F;
    info["rho"] = rho;
    return revolution_distortion(embed_revolution(spec), rho, cfg);
  }
  if (t.kind == "ksphere" || t.kind == "esphere") {
    const auto r = sphere_distortion(t.kind == "ksphere" ? embed_koranyi_sphere() : embed_euclid_sphere(), cfg);
    info["far"] = {{"eps", r.eps},           {"count", r.far_count},       {"L_opt", r.far_L},
                   {"dH_min", r.far_dH_min}, {"dH_max", r.far_dH_max},     {"psi_min", r.far_psi_min},
                   {"psi_max", r.far_psi_max}, {"bound", r.far_bound()}};
    return r.all;
  }
  if (t.kind == "saddle") {
    info["family"] = t.family;
    return saddle_distortion(embed_saddle_family(t.family), cfg);
  }
  const auto& c = t.kind == "snowflake" ? default_line_snowflake() : default_circle_snowflake();
  info["measured_L"] = c.measured_L();
  info["holder"] = measure_holder_distortion(c, long(cfg.quota) * cfg.buckets, cfg.seed);
  DistortionReport r;
  r.id = t.kind;
  r.seed = cfg.seed;
  return r;
}

// Image samples on a deterministic parameter grid.
std::string dump_points(const Target& t, int m) {
  auto v4 = [](CsvWriter& w, double a, double b, const Vec4& y) { w.row({a, b, y[0], y[1], y[2], y[3]}); };
  CsvWriter w({"s", "t", "y1", "y2", "y3", "y4"});
  if (t.kind == "line") {
    const auto f = embed_line(line_spec(t));
    CsvWriter l({"t", "y1", "y2", "y3"});
    for (int i = 0; i <= m; ++i) {
      const double s = f.window() * i / m;
      const Vec3 y = f(s);
      l.row({s, y[0], y[1], y[2]});
    }
    return l.str();
  }
  if (t.kind == "snowflake" || t.kind == "circle") {
    const auto& c = t.kind == "snowflake" ? default_line_snowflake() : default_circle_snowflake();
    return c.export_csv(m * m);
  }
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= m; ++j) {
      const double a = double(i) / m, b = double(j) / m;
      if (t.kind == "plane") {
        const auto f = embed_plane(plane_spec(t));
        v4(w, 2 * a - 1, 2 * b - 1, f.at(2 * a - 1, 2 * b - 1));
      } else if (t.kind == "simplex") {
        const auto f = embed_simplex(simplex_vertices(t));
        if (f.dim() == 1 && j > 0) continue;
        if (f.dim() == 2 && a + b > 1) continue;
        v4(w, a, b, f.at(a, f.dim() == 2 ? b : 0));
      } else if (t.kind == "revolution") {
        static std::optional<RevolutionEmbedding> f;
        if (!f) f = embed_revolution(revolution_preset(t.F));
        const double T = revolution_preset(t.F).T;
        v4(w, a * T, 2 * M_PI * b, f->param(a * T, 2 * M_PI * b));
      } else if (t.kind == "ksphere" || t.kind == "esphere") {
        const auto& f = t.kind == "ksphere" ? embed_koranyi_sphere() : embed_euclid_sphere();
        v4(w, 2 * M_PI * a, 2 * b - 1, f.param(2 * M_PI * a, 2 * b - 1));
      } else {
        const SaddleEmbedding f(t.family);
        const double x = 4 * a - 2, y = 4 * b - 2;
        if (f.in_domain(x, y)) v4(w, x, y, f.param(x, y));
      }
    }
  return w.str();
}

std::optional<Surface> surface_by_name(const std::string& s) {
  if (s == "plane") return surfaces::plane(0, 0, 0);
  if (s == "vertical-plane") return surfaces::vertical_plane(0, 0);
  if (s == "paraboloid") return surfaces::paraboloid();
  if (s == "saddle") return surfaces::saddle();
  if (s == "torus") return surfaces::torus(1, 3);
  if (s == "ksphere") return surfaces::koranyi_sphere();
  if (s == "esphere") return surfaces::euclidean_sphere();
  return std::nullopt;
}

Json laakso_json(int n, long M, bool porosity, bool sdp, std::uint64_t seed, LaaksoStructure& g, HeisEmbedding& f) {
  g = build_laakso(n);
  f = embed_laakso(g, M);
  const auto c = check_laakso(g, f);
  Json j{{"n", n},
         {"M", M},
         {"theta_1", f.theta[1]},
         {"vertices", g.vertex_count},
         {"edges", g.edges.size()},
         {"copies", g.copies.size()},
         {"checks",
          {{"terminals", c.terminals},
           {"terminal_margin", c.terminal_margin},
           {"h_bound", c.h_bound},
           {"h_bound_range", {c.h_bound_lo, c.h_bound_hi}},
           {"convex_hull", c.convex_hull},
           {"hull_points", c.hull_points},
           {"horizontality", c.horizontality},
           {"closure_gap", c.closure_gap},
           {"lipschitz", c.lipschitz},
           {"lipschitz_const", c.lipschitz_const}}},
         {"distortion", c.distortion},
         {"growth_ratio", distortion_growth_ratio(g.vertex_count, c.distortion)}};
  if (porosity) {
    const auto ws = porosity_scan(g, f, kEdgeSamples, seed);
    bool verdict = true, cone = true;
    double min_ratio = std::numeric_limits<double>::infinity(), flat = 0;
    long samples = 0;
    for (const auto& w : ws) {
      verdict = verdict && w.verdict;
      cone = cone && w.cone;
      min_ratio = std::min(min_ratio, w.min_distance / w.radius);
      flat = std::max(flat, w.flat_sum);
      samples += w.cone_samples;
    }
    j["porosity"] = {{"witnesses", ws.size()}, {"verdict", verdict},       {"cone", cone},
                     {"cone_samples", samples}, {"min_distance_over_radius", ws.empty() ? 0.0 : min_ratio},
                     {"flat_sum_max", flat},    {"flat_ok", flat <= 0.01}};
  }
  if (sdp) {
    const auto r = sdp_min_distortion(g);
    j["sdp"] = {{"distortion", r.distortion}, {"gap", r.gap}, {"rounds", r.rounds}, {"lower_constraints", r.lower_constraints}};
  }
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bi-Lipschitz embeddings of Heisenberg submanifolds"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--seed", common.seed, "sampler seed (overrides config)");
  app.add_option("--config", common.config_path, "key=value configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", common.out, "output directory");

  Target target;
  int points = 64;
  auto* embed = app.add_subcommand("embed", "dump image samples of an embedding and its distortion");
  add_target_options(embed, target);
  embed->add_option("--points", points, "grid resolution of the CSV dump")->check(CLI::Range(2, 2000));

  auto* distort = app.add_subcommand("distort", "measure the distortion of an embedding");
  add_target_options(distort, target);

  std::string surface = "paraboloid";
  std::vector<double> p0;
  double eps = 0.2;
  auto* foliate = app.add_subcommand("foliate", "build a horizontal foliation chart");
  foliate->add_option("--surface", surface, "plane|vertical-plane|paraboloid|saddle|torus|ksphere|esphere");
  foliate->add_option("--p0", p0, "base point x,y,z on the surface")->delimiter(',')->expected(3);
  foliate->add_option("--eps", eps, "chart radius")->check(CLI::PositiveNumber);

  int n = 2;
  std::string Marg = "auto";
  bool porosity = false, sdp = false;
  auto* laakso = app.add_subcommand("laakso", "Laakso graph embedding and checks");
  laakso->add_option("--n", n, "level")->check(CLI::Range(1, 5));
  laakso->add_option("--M", Marg, "angle schedule offset, or auto");
  laakso->add_flag("--porosity", porosity, "run the porosity witness scan");
  laakso->add_flag("--sdp", sdp, "solve the minimum l2 distortion SDP (at most 200 vertices)");

  auto* report = app.add_subcommand("report", "fixed suite of distortion measurements");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!common.config_path.empty()) common.config = Config::load(common.config_path);
    fs::create_directories(common.out);
    const SampleConfig cfg = common.sampler();

    if (*embed || *distort) {
      Json info;
      DistortionReport r = measure(target, cfg, info);
      r.config_hash = common.hash();
      Json j = header(common, *embed ? "embed" : "distort");
      j["kind"] = target.kind;
      j["info"] = info;
      j["report"] = to_json(r);
      const std::string stem = *embed ? "embed" : "distort";
      emit(common, stem + ".json", dump(j));
      if (!r.buckets.empty()) emit(common, stem + ".svg", svg_distortion_plot(r));
      if (*embed) emit(common, "points.csv", dump_points(target, points));
    } else if (*foliate) {
      auto s = surface_by_name(surface);
      if (!s) throw InvalidInput("unknown surface " + surface);
      if (p0.empty()) {
        if (surface == "ksphere") p0 = {std::pow(0.5, 0.5), 0.0, std::sqrt(0.75) / 4};
        else if (surface == "esphere") p0 = {std::sqrt(0.75), 0.0, 0.5};
        else if (surface == "torus") p0 = {3 + std::cos(0.5), 0.0, std::sin(0.5)};
        else if (surface == "paraboloid") p0 = {0.5, 0.3, 0.34};
        else if (surface == "saddle") p0 = {0.4, 0.6, 0.12};
        else if (surface == "vertical-plane") p0 = {0.3, 0.0, 0.2};
        else p0 = {1.0, 0.0, 0.0};
      }
      const HPoint p(p0[0], p0[1], p0[2]);
      const auto a = adaptive_regular_chart(*s, p, eps, cfg);
      const auto& ch = a.chart;
      DistortionReport r = a.report;
      r.config_hash = common.hash();
      Json j = header(common, "foliate");
      j["surface"] = surface;
      j["p0"] = {p.x, p.y, p.z};
      j["chart"] = {{"epsilon", ch.epsilon()},  {"kappa", ch.kappa()},          {"lambda", ch.lambda()},
                    {"L_chart", ch.L_chart()},  {"ode_error", ch.ode_error()},  {"dominant_axis", ch.dominant_axis()},
                    {"rounds", a.rounds},       {"history", a.history},
                    {"u_line_residual", horizontality_residual(ch.u_line(0))}};
      j["report"] = to_json(r);
      emit(common, "foliate.json", dump(j));
      emit(common, "foliate.svg", svg_distortion_plot(r));
      CsvWriter w({"v", "u", "x", "y", "z"});
      for (int i = -4; i <= 4; ++i) {
        const double v = ch.snap_v(ch.epsilon() * i / 4);
        for (int k = -32; k <= 32; ++k) {
          const double u = ch.epsilon() * k / 32;
          const HPoint q = ch.G(u, v);
          w.row({v, u, q.x, q.y, q.z});
        }
      }
      emit(common, "ulines.csv", w.str());
    } else if (*laakso) {
      long M = 0;
      if (Marg == "auto") {
        M = common.config.get_int("M", minimal_laakso_M());
      } else {
        try {
          M = std::stol(Marg);
        } catch (const std::exception&) {
          throw InvalidInput("--M must be an integer or auto");
        }
      }
      LaaksoStructure g;
      HeisEmbedding f;
      Json j = header(common, "laakso");
      j["laakso"] = laakso_json(n, M, porosity, sdp, cfg.seed, g, f);
      emit(common, "laakso.json", dump(j));
      emit(common, "laakso_edges.txt", laakso_edge_list(g));
      emit(common, "laakso_points.csv", laakso_points_csv(f));
    } else if (*report) {
      Json j = header(common, "report");
      Json rows = Json::object();
      auto run = [&](const std::string& id, Target t) {
        Json info;
        DistortionReport r = measure(t, cfg, info);
        r.config_hash = common.hash();
        rows[id] = {{"L", r.L}, {"L_opt", r.L_opt}, {"samples", r.sample_count}, {"info", info}};
        if (!r.buckets.empty()) emit(common, "report_" + id + ".svg", svg_distortion_plot(r));
      };
      Target t;
      run("line_generic", (t.kind = "line", t.dir = {1, 0.5, 0.3}, t));
      run("line_vertical", (t.dir = {0, 0, 1}, t.base = {0.3, -0.2, 0}, t));
      run("plane_z0", (t = Target{}, t.kind = "plane", t));
      run("plane_tilted", (t.plane = {0.4, -0.7, 0.2}, t));
      run("ksphere", (t = Target{}, t.kind = "ksphere", t));
      run("saddle_1", (t = Target{}, t.kind = "saddle", t));
      LaaksoStructure g;
      HeisEmbedding f;
      rows["laakso_2"] = laakso_json(2, minimal_laakso_M(), true, false, cfg.seed, g, f);
      j["rows"] = rows;
      j["pinned"] = {{"L_line", affinecal::L_line},  {"L_plane", affinecal::L_plane}, {"L_reg", foliationcal::L_reg},
                     {"L_sphere", specialcal::L_sphere}, {"L_saddle", specialcal::L_saddle}};
      emit(common, "report.json", dump(j));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
