#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "meshdn/bench.hpp"
#include "meshdn/icosphere.hpp"

using namespace meshdn;
using namespace meshdn::bench;

namespace {

DenoiseProblem sphere_problem(unsigned level, double rho, std::uint64_t seed) {
  const auto clean = icosphere(level);
  return DenoiseProblem(add_normal_noise(clean, {rho, seed}), clean.vertices());
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

SweepRecord record(Method m, double p, double p2, double snr_db, std::size_t idx) {
  SweepRecord r;
  r.method = m;
  r.param_name = "p";
  r.param_value = p;
  r.param2_value = p2;
  r.snr_db = snr_db;
  r.grid_index = idx;
  return r;
}

}  // namespace

TEST(Method, RoundTrip) {
  for (auto m : {Method::Filter, Method::Heat, Method::Sobolev}) EXPECT_EQ(parse_method(to_string(m)), m);
  EXPECT_THROW(parse_method("laplace"), std::invalid_argument);
}

TEST(SweepGrid, ExpandOrderAndValidation) {
  const auto heat = expand({Method::Heat, {1, 2, 3}, {0.25, 0.5}, {}});
  ASSERT_EQ(heat.size(), 6u);
  EXPECT_EQ(heat[0].tau, 0.25);
  EXPECT_EQ(heat[2].iterations, 3u);
  EXPECT_EQ(heat[3].tau, 0.5);
  EXPECT_EQ(heat[3].iterations, 1u);
  EXPECT_THROW(expand({Method::Filter, {}, {}, {}}), std::invalid_argument);
  EXPECT_THROW(expand({Method::Sobolev, {}, {}, {-1.0}}), std::invalid_argument);
}

TEST(TimeMethod, NoOpIsFast) {
  const auto t = time_method([] {}, 11);
  EXPECT_LT(t.median_ms, 1.0);
  EXPECT_LE(t.min_ms, t.median_ms);
  EXPECT_LE(t.median_ms, t.max_ms);
  EXPECT_EQ(t.repeats, 11u);
  EXPECT_THROW(time_method([] {}, 0), std::invalid_argument);
}

TEST(TimeMethod, WarmupRunsOnce) {
  int calls = 0;
  time_method([&] { ++calls; }, 4);
  EXPECT_EQ(calls, 5);
  const auto even = time_method([] {}, 4);
  EXPECT_GE(even.median_ms, even.min_ms);
}

// With the factorization cached, later solves skip the symbolic and numeric
// phases.
TEST(TimeMethod, CachedSobolevSolveIsFaster) {
  const auto p = sphere_problem(5, 0.01, 3);
  const auto factor_and_solve = time_method([&] { (void)sobolev_denoise(p.noisy.vertices(), p.laplacian, {2.0}); }, 3);
  const SobolevSolver solver(p.laplacian, {2.0});
  const auto solve_only = time_method([&] { (void)solver.solve(p.noisy.vertices()); }, 3);
  EXPECT_LT(solve_only.median_ms, factor_and_solve.median_ms);
  EXPECT_EQ(solver.factorizations(), 1u);
}

TEST(DenoiseProblem, RejectsMismatchedReference) {
  const auto m = icosphere(1);
  EXPECT_THROW(DenoiseProblem(m, SignalMatrix(3)), std::invalid_argument);
}

TEST(RunSweep, SingleConfiguration) {
  const auto p = sphere_problem(2, 0.02, 1);
  const auto report = run_sweep(p, {{Method::Filter, {5}, {}, {}}}, {3, true});
  ASSERT_EQ(report.records.size(), 1u);
  ASSERT_EQ(report.best.size(), 1u);
  EXPECT_EQ(report.best[0].param_value, 5.0);
  EXPECT_DOUBLE_EQ(report.records[0].snr_db, snr(filter_denoise(p.noisy.vertices(), p.w_normalized, {5}), p.reference));
  EXPECT_EQ(report.repeats, 3u);
  ASSERT_TRUE(report.noisy_snr_db.has_value());
  EXPECT_DOUBLE_EQ(*report.noisy_snr_db, p.noisy_snr());
}

TEST(RunSweep, FilterCurveHasInteriorMaximum) {
  const auto p = sphere_problem(3, 0.02, 2);
  SweepGrid g{Method::Filter, {}, {}, {}};
  for (std::size_t k = 0; k <= 60; ++k) g.iterations.push_back(k);
  const auto report = run_sweep(p, {g}, {1, false});
  const auto* best = report.best_for(Method::Filter);
  ASSERT_NE(best, nullptr);
  EXPECT_GT(best->param_value, 0.0);
  EXPECT_LT(best->param_value, 60.0);
  EXPECT_GT(best->snr_db, report.records.front().snr_db);
  EXPECT_GT(best->snr_db, report.records.back().snr_db);
}

TEST(RunSweep, HeatTauOneMatchesFilter) {
  const auto p = sphere_problem(3, 0.02, 5);
  const auto report =
      run_sweep(p, {{Method::Heat, {3, 10}, {1.0}, {}}, {Method::Filter, {3, 10}, {}, {}}}, {1, false});
  ASSERT_EQ(report.records.size(), 4u);
  EXPECT_EQ(report.records[0].method, Method::Filter);
  EXPECT_EQ(report.records[2].method, Method::Heat);
  EXPECT_EQ(report.records[0].snr_db, report.records[2].snr_db);
  EXPECT_EQ(report.records[1].snr_db, report.records[3].snr_db);
}

TEST(RunSweep, DeterministicApartFromTiming) {
  const auto p = sphere_problem(2, 0.05, 7);
  const std::vector<SweepGrid> grids{{Method::Sobolev, {}, {}, {0.5, 2.0}}, {Method::Heat, {2, 4}, {0.5}, {}}};
  const auto a = run_sweep(p, grids, {1, false});
  const auto b = run_sweep(p, grids, {1, false});
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].snr_db, b.records[i].snr_db);
    EXPECT_EQ(a.records[i].param_value, b.records[i].param_value);
  }
}

TEST(BestRecord, TieBreaking) {
  SweepReport r;
  r.records = {record(Method::Sobolev, 5.0, 0, 10.0, 0), record(Method::Sobolev, 2.0, 0, 10.0, 1),
               record(Method::Sobolev, 1.0, 0, 9.0, 2)};
  finalize(r);
  ASSERT_EQ(r.best.size(), 1u);
  EXPECT_EQ(r.best[0].param_value, 2.0);

  SweepReport h;
  h.records = {record(Method::Heat, 0.5, 8, 7.0, 0), record(Method::Heat, 0.5, 4, 7.0, 1)};
  finalize(h);
  EXPECT_EQ(h.best[0].param2_value, 4.0);

  SweepReport inf;
  inf.records = {record(Method::Filter, 3, 0, 12.0, 0),
                 record(Method::Filter, 0, 0, std::numeric_limits<double>::infinity(), 1)};
  finalize(inf);
  EXPECT_TRUE(std::isinf(inf.best[0].snr_db));
}

TEST(Csv, HeaderAndInfinity) {
  EXPECT_EQ(csv_header, "method,param_name,param_value,param2_name,param2_value,snr_db,time_ms");
  const auto clean = icosphere(1);
  const DenoiseProblem p(clean, clean.vertices());
  const auto report = run_sweep(p, {{Method::Filter, {0}, {}, {}}}, {1, false});
  std::ostringstream os;
  write_csv(os, report);
  const auto ls = lines(os.str());
  ASSERT_EQ(ls.size(), 2u);
  EXPECT_EQ(ls[0], csv_header);
  const auto fields = split(ls[1]);
  ASSERT_EQ(fields.size(), 7u);
  EXPECT_EQ(fields[0], "filter");
  EXPECT_EQ(fields[1], "iterations");
  EXPECT_EQ(fields[2], "0");
  EXPECT_EQ(fields[3], "");
  EXPECT_EQ(fields[4], "");
  EXPECT_EQ(fields[5], "inf");
}

TEST(Json, MirrorsCsvRecords) {
  const auto p = sphere_problem(2, 0.03, 11);
  const auto report = run_sweep(p, {{Method::Heat, {1, 5}, {0.5}, {}}, {Method::Sobolev, {}, {}, {1.0}}}, {1, false});
  std::ostringstream os;
  write_csv(os, report);
  const auto ls = lines(os.str());
  const auto j = to_json(report);
  ASSERT_EQ(j["records"].size() + 1, ls.size());
  EXPECT_TRUE(j.contains("snr_convention"));
  EXPECT_EQ(j["timing"]["aggregation"], "median");
  for (std::size_t i = 0; i < j["records"].size(); ++i) {
    const auto fields = split(ls[i + 1]);
    const auto& rec = j["records"][i];
    EXPECT_EQ(rec["method"].get<std::string>(), fields[0]);
    EXPECT_EQ(rec["param_name"].get<std::string>(), fields[1]);
    EXPECT_EQ(rec["param_value"].get<double>(), std::stod(fields[2]));
    EXPECT_EQ(rec["snr_db"].get<double>(), std::stod(fields[5]));
  }
  EXPECT_EQ(j["best"].size(), 2u);
}

TEST(Json, InfiniteSnrIsString) {
  SweepRecord r = record(Method::Filter, 0, 0, std::numeric_limits<double>::infinity(), 0);
  EXPECT_EQ(to_json(r)["snr_db"], "inf");
}

TEST(SinkhornDemo, MatchesExactOptimumAtSmallEpsilon) {
  ot::Matrix c(5, 5);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) c(i, j) = std::abs(static_cast<double>(i) - static_cast<double>(j) - 1.0);
  const auto mu = ot::Histogram::uniform(5);
  const auto rep = run_sinkhorn_demo(c, mu, mu, {1.0, 0.1, 1e-3});
  ASSERT_TRUE(rep.exact_cost.has_value());
  ASSERT_EQ(rep.runs.size(), 3u);
  EXPECT_DOUBLE_EQ(rep.runs[0].epsilon, c.max());
  for (const auto& run : rep.runs) {
    EXPECT_TRUE(run.converged);
    EXPECT_GE(run.plan_cost, *rep.exact_cost - 1e-9);
  }
  EXPECT_LE(rep.runs[2].plan_cost, *rep.exact_cost + 0.01 * std::max(*rep.exact_cost, c.max()));
  const auto j = to_json(rep);
  EXPECT_EQ(j["runs"].size(), 3u);
  std::ostringstream os;
  write_csv(os, rep);
  EXPECT_EQ(lines(os.str()).size(), 4u);
}
