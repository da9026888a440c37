#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "heis/errors.hpp"
#include "heis/config.hpp"
#include "heis/harness.hpp"
#include "heis/report_io.hpp"
#include "heis/rng.hpp"

using namespace heis;

TEST(Rng, ReferenceVectors) {
  // Sequential SplitMix64 from seed 1234567.
  CounterRng r(1234567);
  const std::uint64_t expect[] = {6457827717110365317ULL, 3203168211198807973ULL, 9817491932198370423ULL,
                                  4593380528125082431ULL, 16408922859458223821ULL};
  for (std::uint64_t e : expect) EXPECT_EQ(r.next(), e);
  EXPECT_EQ(r.at(2), expect[2]);
}

TEST(Rng, SequentialOracle) {
  // Plain SplitMix64 state machine.
  std::uint64_t state = 42;
  auto step = [&] {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  CounterRng r(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(r.next(), step());
}

TEST(Rng, UniformRangeAndStreams) {
  CounterRng a(1), b(1, 1), c(1, 2);
  std::set<std::uint64_t> firsts{a.at(0), b.at(0), c.at(0)};
  EXPECT_EQ(firsts.size(), 3u);
  double mean = 0;
  for (int i = 0; i < 100000; ++i) {
    const double u = a.uniform();
    ASSERT_GE(u, 0);
    ASSERT_LT(u, 1);
    mean += u;
  }
  EXPECT_NEAR(mean / 100000, 0.5, 0.005);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(a.below(7), 7u);
}

TEST(Config, ParseAndHash) {
  const Config c = Config::parse("# comment\nquota = 50\nseed=3 # trailing\n\n");
  EXPECT_EQ(c.get_int("quota", 0), 50);
  EXPECT_EQ(c.get_int("seed", 0), 3);
  EXPECT_EQ(c.get("missing", "d"), "d");
  EXPECT_EQ(c.canonical(), "quota=50\nseed=3\n");
  EXPECT_EQ(c.hash(), fnv1a64("quota=50\nseed=3\n"));
  EXPECT_EQ(Config::parse("seed=3\nquota=50").hash(), c.hash());
  EXPECT_THROW(Config::parse("novalue\n"), InvalidInput);
  EXPECT_THROW(Config::parse("=3\n"), InvalidInput);
  EXPECT_THROW(Config::parse("quota=abc").get_int("quota", 0), InvalidInput);
  EXPECT_THROW(Config::load("/nonexistent/file.cfg"), InvalidInput);
}

TEST(Config, Fnv1aReference) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Sampler, BucketsFilledAndSeparationsInRange) {
  SampleConfig cfg;
  cfg.buckets = 8;
  cfg.quota = 50;
  const auto s = sample_scale_pairs(ParamDomain::interval(0, 1), cfg);
  ASSERT_EQ(s.pairs.size(), 400u);
  std::vector<int> count(8, 0);
  for (const auto& p : s.pairs) {
    ++count[p.bucket];
    EXPECT_EQ(s.bucket_of(p.sep), p.bucket);
    EXPECT_GE(p.p[0], 0);
    EXPECT_LE(p.q[0], 1);
  }
  for (int c : count) EXPECT_EQ(c, 50);
}

TEST(Sampler, Deterministic) {
  SampleConfig cfg;
  cfg.seed = 99;
  const auto a = sample_scale_pairs(ParamDomain::box(0, 1, 0, 2), cfg);
  const auto b = sample_scale_pairs(ParamDomain::box(0, 1, 0, 2), cfg);
  ASSERT_EQ(a.pairs.size(), b.pairs.size());
  for (std::size_t i = 0; i < a.pairs.size(); ++i) EXPECT_EQ(a.pairs[i].p, b.pairs[i].p);
}

TEST(Sampler, CoverageErrorOnUnreachableBucket) {
  SampleConfig cfg;
  cfg.max_sep = 10;  // far beyond the unit interval
  cfg.max_attempts = 1000;
  try {
    sample_scale_pairs(ParamDomain::interval(0, 1), cfg);
    FAIL() << "expected CoverageError";
  } catch (const CoverageError& e) {
    EXPECT_EQ(e.bucket, 0);
  }
  cfg.buckets = 2;
  EXPECT_THROW(sample_scale_pairs(ParamDomain::interval(0, 1), cfg), InvalidInput);
}

TEST(Distortion, DoublingMap) {
  SampleConfig cfg;
  cfg.quota = 20;
  const DistanceFn src = [](const Param& a, const Param& b) { return std::abs(a[0] - b[0]); };
  const DistanceFn dst = [](const Param& a, const Param& b) { return 2 * std::abs(a[0] - b[0]); };
  const auto r = measure_distortion("double", ParamDomain::interval(0, 1), cfg, src, dst);
  EXPECT_NEAR(r.L_lower, 2, 1e-12);
  EXPECT_NEAR(r.L_upper, 0.5, 1e-12);
  EXPECT_NEAR(r.L, 2, 1e-12);
  EXPECT_NEAR(r.L_opt, 1, 1e-12);
  EXPECT_NEAR(r.prescale, 0.5, 1e-12);
}

TEST(Distortion, SnowflakeOfLineAndSubsampleMonotone) {
  SampleConfig cfg;
  cfg.quota = 40;
  const DistanceFn src = [](const Param& a, const Param& b) { return std::abs(a[0] - b[0]); };
  const DistanceFn dst = [](const Param& a, const Param& b) { return std::sqrt(std::abs(a[0] - b[0])); };
  auto s = sample_scale_pairs(ParamDomain::interval(0, 1), cfg);
  const auto full = distortion_report("sqrt", src, dst, s);
  // sqrt on [0,1] with 12 buckets: ratio sep^{-1/2} spans [1, 2^{6}].
  EXPECT_GT(full.L_lower, 32);
  EXPECT_LE(full.L_lower, 64 + 1e-9);
  PairSample sub = s;
  sub.pairs.resize(s.pairs.size() / 3);
  const auto part = summarize("sub", sub);
  EXPECT_LE(part.L_product, full.L_product);
  EXPECT_LE(part.L, full.L);
}

TEST(ReportIo, JsonDeterministicAndSchema) {
  SampleConfig cfg;
  cfg.quota = 10;
  const DistanceFn src = [](const Param& a, const Param& b) { return std::abs(a[0] - b[0]); };
  auto s = sample_scale_pairs(ParamDomain::interval(0, 1), cfg);
  const auto r = distortion_report("x", src, src, s, 0x1234);
  const std::string a = dump(to_json(r)), b = dump(to_json(r));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.back(), '\n');
  EXPECT_NE(svg_distortion_plot(r).find("<svg"), std::string::npos);
  EXPECT_EQ(hex64(0x1234), "0000000000001234");
  CsvWriter w({"a", "b"});
  w.row({1, 2.5});
  EXPECT_EQ(w.str(), "a,b\n1,2.5\n");
  EXPECT_THROW(w.row({1}), InvalidInput);
}
