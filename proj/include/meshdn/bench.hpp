#ifndef MESHDN_BENCH_HPP
#define MESHDN_BENCH_HPP

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "meshdn/denoise.hpp"
#include "meshdn/graph.hpp"
#include "meshdn/mesh.hpp"
#include "meshdn/noise.hpp"
#include "meshdn/transport.hpp"

namespace meshdn::bench {

enum class Method { Filter, Heat, Sobolev };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::Filter:
      return "filter";
    case Method::Heat:
      return "heat";
    case Method::Sobolev:
      return "sobolev";
  }
  return "?";
}

inline Method parse_method(std::string_view s) {
  if (s == "filter") return Method::Filter;
  if (s == "heat") return Method::Heat;
  if (s == "sobolev") return Method::Sobolev;
  throw std::invalid_argument("unknown method '" + std::string(s) + "' (expected filter, heat or sobolev)");
}

// Parameter grid for one method. Filter sweeps `iterations`; heat sweeps
// taus × iterations (tau-major); Sobolev sweeps `mus`.
struct SweepGrid {
  Method method = Method::Filter;
  std::vector<std::size_t> iterations;
  std::vector<double> taus;
  std::vector<double> mus;

  std::size_t size() const {
    switch (method) {
      case Method::Filter:
        return iterations.size();
      case Method::Heat:
        return taus.size() * iterations.size();
      case Method::Sobolev:
        return mus.size();
    }
    return 0;
  }

  void validate() const {
    if (size() == 0) throw std::invalid_argument("empty parameter grid for method " + std::string(to_string(method)));
    for (double t : taus)
      if (!std::isfinite(t)) throw std::invalid_argument("tau values must be finite");
    for (double m : mus)
      if (!(m >= 0.0) || !std::isfinite(m)) throw std::invalid_argument("mu values must be finite and >= 0");
  }
};

// One denoiser invocation.
struct MethodParams {
  Method method = Method::Filter;
  std::size_t iterations = 0;
  double tau = 1.0;
  double mu = 0.0;
};

inline std::vector<MethodParams> expand(const SweepGrid& grid) {
  grid.validate();
  std::vector<MethodParams> out;
  switch (grid.method) {
    case Method::Filter:
      for (auto k : grid.iterations) out.push_back({Method::Filter, k, 1.0, 0.0});
      break;
    case Method::Heat:
      for (double t : grid.taus)
        for (auto k : grid.iterations) out.push_back({Method::Heat, k, t, 0.0});
      break;
    case Method::Sobolev:
      for (double m : grid.mus) out.push_back({Method::Sobolev, 0, 1.0, m});
      break;
  }
  return out;
}

struct TimingStats {
  double median_ms = 0.0;
  double min_ms = 0.0;
  double max_ms = 0.0;
  std::size_t repeats = 0;
};

// One unmeasured warm-up call, then `repeats` timed calls; reports the median
// with the min–max spread.
inline TimingStats time_method(const std::function<void()>& action, std::size_t repeats) {
  if (repeats < 1) throw std::invalid_argument("time_method: repeats must be >= 1");
  using clock = std::chrono::steady_clock;
  action();
  std::vector<double> ms(repeats);
  for (auto& t : ms) {
    const auto start = clock::now();
    action();
    t = std::chrono::duration<double, std::milli>(clock::now() - start).count();
  }
  std::sort(ms.begin(), ms.end());
  const auto mid = repeats / 2;
  const double median = repeats % 2 == 1 ? ms[mid] : 0.5 * (ms[mid - 1] + ms[mid]);
  return {median, ms.front(), ms.back(), repeats};
}

// Noisy input plus the clean reference, with the graph operators of the
// noisy mesh's connectivity built once.
struct DenoiseProblem {
  Mesh noisy;
  SignalMatrix reference;
  SparseMatrix w_normalized;
  SparseMatrix laplacian;

  DenoiseProblem(Mesh noisy_mesh, SignalMatrix clean) : noisy(std::move(noisy_mesh)), reference(std::move(clean)) {
    if (reference.size() != noisy.vertex_count())
      throw std::invalid_argument("reference mesh has " + std::to_string(reference.size()) +
                                  " vertices, noisy mesh has " + std::to_string(noisy.vertex_count()));
    const auto w = adjacency(noisy);
    const auto d = degrees(w);
    w_normalized = normalized_adjacency(w, d);
    laplacian = meshdn::laplacian(w, d);
  }

  double noisy_snr() const { return snr(noisy.vertices(), reference); }
};

inline SignalMatrix run_method(const DenoiseProblem& problem, const MethodParams& p) {
  const auto& x = problem.noisy.vertices();
  switch (p.method) {
    case Method::Filter:
      return filter_denoise(x, problem.w_normalized, FilterParams{p.iterations});
    case Method::Heat:
      return heat_denoise(x, problem.w_normalized, HeatParams{p.tau, p.iterations});
    case Method::Sobolev:
      return sobolev_denoise(x, problem.laplacian, SobolevParams{p.mu});
  }
  throw std::logic_error("run_method: unhandled method");
}

struct SweepRecord {
  Method method = Method::Filter;
  std::string param_name;
  double param_value = 0.0;
  std::string param2_name;  // empty when the method has one parameter
  double param2_value = 0.0;
  double snr_db = 0.0;
  TimingStats time;
  std::size_t grid_index = 0;

  MethodParams params() const {
    switch (method) {
      case Method::Filter:
        return {method, static_cast<std::size_t>(param_value), 1.0, 0.0};
      case Method::Heat:
        return {method, static_cast<std::size_t>(param2_value), param_value, 0.0};
      case Method::Sobolev:
        return {method, 0, 1.0, param_value};
    }
    return {};
  }
};

inline SweepRecord describe(const MethodParams& p) {
  SweepRecord r;
  r.method = p.method;
  switch (p.method) {
    case Method::Filter:
      r.param_name = "iterations";
      r.param_value = static_cast<double>(p.iterations);
      break;
    case Method::Heat:
      r.param_name = "tau";
      r.param_value = p.tau;
      r.param2_name = "iterations";
      r.param2_value = static_cast<double>(p.iterations);
      break;
    case Method::Sobolev:
      r.param_name = "mu";
      r.param_value = p.mu;
      break;
  }
  return r;
}

struct SweepOptions {
  std::size_t repeats = 11;
  // When false each configuration runs once and time_ms is that single run.
  bool measure_time = true;
};

inline constexpr std::string_view snr_convention =
    "snr_db = -20*log10(||X - Y||_F / ||Y||_F) with X the denoised (or noisy) vertices and Y the clean "
    "reference vertices";

struct SweepReport {
  std::vector<SweepRecord> records;
  std::vector<SweepRecord> best;  // one per method present, in method order
  std::optional<double> noisy_snr_db;
  std::size_t repeats = 0;
  std::string aggregation = "median";

  const SweepRecord* best_for(Method m) const {
    for (const auto& r : best)
      if (r.method == m) return &r;
    return nullptr;
  }
};

// Highest SNR; ties go to the smaller parameter(s), then to grid order.
inline bool better_record(const SweepRecord& a, const SweepRecord& b) {
  if (a.snr_db != b.snr_db) return a.snr_db > b.snr_db;
  if (a.param_value != b.param_value) return a.param_value < b.param_value;
  if (a.param2_value != b.param2_value) return a.param2_value < b.param2_value;
  return a.grid_index < b.grid_index;
}

inline void finalize(SweepReport& report) {
  std::stable_sort(report.records.begin(), report.records.end(), [](const SweepRecord& a, const SweepRecord& b) {
    if (a.method != b.method) return a.method < b.method;
    return a.grid_index < b.grid_index;
  });
  report.best.clear();
  for (const auto& r : report.records) {
    if (report.best.empty() || report.best.back().method != r.method) {
      report.best.push_back(r);
    } else if (better_record(r, report.best.back())) {
      report.best.back() = r;
    }
  }
}

inline SweepReport run_sweep(const DenoiseProblem& problem, const std::vector<SweepGrid>& grids,
                             SweepOptions options = {}) {
  if (grids.empty()) throw std::invalid_argument("sweep: no grids");
  SweepReport report;
  report.noisy_snr_db = problem.noisy_snr();
  report.repeats = options.measure_time ? options.repeats : 1;
  for (const auto& grid : grids) {
    const auto configs = expand(grid);
    for (std::size_t g = 0; g < configs.size(); ++g) {
      SweepRecord rec = describe(configs[g]);
      rec.grid_index = g;
      SignalMatrix out;
      if (options.measure_time) {
        rec.time = time_method([&] { out = run_method(problem, configs[g]); }, options.repeats);
      } else {
        const auto start = std::chrono::steady_clock::now();
        out = run_method(problem, configs[g]);
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        rec.time = {ms, ms, ms, 1};
      }
      rec.snr_db = snr(out, problem.reference);
      report.records.push_back(std::move(rec));
    }
  }
  finalize(report);
  return report;
}

namespace detail {

inline std::string format_real(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline nlohmann::json real_json(double x) {
  if (std::isfinite(x)) return x;
  return format_real(x);
}

}  // namespace detail

inline constexpr std::string_view csv_header = "method,param_name,param_value,param2_name,param2_value,snr_db,time_ms";

inline void write_csv_record(std::ostream& os, const SweepRecord& r) {
  os << to_string(r.method) << ',' << r.param_name << ',' << detail::format_real(r.param_value) << ','
     << r.param2_name << ',' << (r.param2_name.empty() ? std::string() : detail::format_real(r.param2_value)) << ','
     << detail::format_real(r.snr_db) << ',' << detail::format_real(r.time.median_ms) << '\n';
}

inline void write_csv(std::ostream& os, const SweepReport& report) {
  os << csv_header << '\n';
  for (const auto& r : report.records) write_csv_record(os, r);
}

inline nlohmann::json to_json(const SweepRecord& r) {
  nlohmann::json j;
  j["method"] = to_string(r.method);
  j["param_name"] = r.param_name;
  j["param_value"] = detail::real_json(r.param_value);
  j["param2_name"] = r.param2_name;
  j["param2_value"] = r.param2_name.empty() ? nlohmann::json(nullptr) : detail::real_json(r.param2_value);
  j["snr_db"] = detail::real_json(r.snr_db);
  j["time_ms"] = detail::real_json(r.time.median_ms);
  j["time_min_ms"] = detail::real_json(r.time.min_ms);
  j["time_max_ms"] = detail::real_json(r.time.max_ms);
  return j;
}

inline nlohmann::json to_json(const SweepReport& report) {
  nlohmann::json j;
  j["snr_convention"] = snr_convention;
  j["timing"] = {{"repeats", report.repeats}, {"aggregation", report.aggregation}, {"warmup_runs", 1}};
  if (report.noisy_snr_db) j["noisy_snr_db"] = detail::real_json(*report.noisy_snr_db);
  j["records"] = nlohmann::json::array();
  for (const auto& r : report.records) j["records"].push_back(to_json(r));
  j["best"] = nlohmann::json::array();
  for (const auto& r : report.best) j["best"].push_back(to_json(r));
  return j;
}

// Entropic transport on one small problem at several ε, compared with the
// exact enumeration optimum when it applies.
struct SinkhornDemoRow {
  double epsilon = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  double plan_cost = 0.0;
  double row_residual = 0.0;
  double col_residual = 0.0;
  std::vector<std::pair<double, double>> residual_history;
};

struct SinkhornDemoReport {
  std::size_t rows = 0;
  std::size_t cols = 0;
  double cost_scale = 0.0;  // max(c)
  std::optional<double> exact_cost;
  std::vector<SinkhornDemoRow> runs;
};

inline SinkhornDemoReport run_sinkhorn_demo(const ot::CostMatrix& c, const ot::Histogram& mu, const ot::Histogram& nu,
                                            const std::vector<double>& epsilon_factors, ot::SinkhornOptions opt = {}) {
  if (epsilon_factors.empty()) throw std::invalid_argument("sinkhorn demo: no epsilon values");
  SinkhornDemoReport report;
  report.rows = c.rows();
  report.cols = c.cols();
  report.cost_scale = c.max();
  const double scale = report.cost_scale > 0.0 ? report.cost_scale : 1.0;
  if (c.rows() == c.cols() && c.rows() <= ot::monge_enumeration_limit && mu.is_uniform() && nu.is_uniform()) {
    report.exact_cost = ot::monge_bruteforce(c).cost / static_cast<double>(c.rows());
  }
  for (double f : epsilon_factors) {
    const double eps = f * scale;
    const auto res = ot::sinkhorn_log(mu, nu, c, eps, opt);
    SinkhornDemoRow row;
    row.epsilon = eps;
    row.iterations = res.state.iterations_run;
    row.converged = res.state.converged;
    row.plan_cost = ot::transport_cost(res.plan, c);
    row.row_residual = res.plan.row_marginal_error;
    row.col_residual = res.plan.col_marginal_error;
    row.residual_history = res.state.residual_history;
    report.runs.push_back(std::move(row));
  }
  return report;
}

inline nlohmann::json to_json(const SinkhornDemoReport& r) {
  nlohmann::json j;
  j["rows"] = r.rows;
  j["cols"] = r.cols;
  j["cost_scale"] = r.cost_scale;
  j["exact_cost"] = r.exact_cost ? nlohmann::json(*r.exact_cost) : nlohmann::json(nullptr);
  j["runs"] = nlohmann::json::array();
  for (const auto& run : r.runs) {
    nlohmann::json history = nlohmann::json::array();
    for (const auto& [a, b] : run.residual_history) history.push_back({a, b});
    j["runs"].push_back({{"epsilon", run.epsilon},
                         {"iterations", run.iterations},
                         {"converged", run.converged},
                         {"plan_cost", run.plan_cost},
                         {"row_residual", run.row_residual},
                         {"col_residual", run.col_residual},
                         {"residual_history", std::move(history)}});
  }
  return j;
}

inline void write_csv(std::ostream& os, const SinkhornDemoReport& r) {
  os << "epsilon,iterations,converged,plan_cost,exact_cost,row_residual,col_residual\n";
  for (const auto& run : r.runs) {
    os << detail::format_real(run.epsilon) << ',' << run.iterations << ',' << (run.converged ? "true" : "false") << ','
       << detail::format_real(run.plan_cost) << ',' << (r.exact_cost ? detail::format_real(*r.exact_cost) : "") << ','
       << detail::format_real(run.row_residual) << ',' << detail::format_real(run.col_residual) << '\n';
  }
}

}  // namespace meshdn::bench

#endif  // MESHDN_BENCH_HPP
