// meshdn command-line harness.
//
//   meshdn icosphere --subdivisions 4 --out sphere.off
//   meshdn noise --input sphere.off --rho 0.02 --seed 1 --out noisy.off
//   meshdn denoise --input noisy.off --reference sphere.off --method sobolev --mu 5 --out clean.off
//   meshdn sweep --input sphere.off --rho 0.02 --method filter --iters 0:60 --out sweep.csv
//   meshdn sinkhorn-demo --size 7 --seed 3
//
// Exit status: 0 success, 1 usage error, 2 data error.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "meshdn/meshdn.hpp"

namespace fs = std::filesystem;
using namespace meshdn;

namespace {

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Format { Csv, Json };

struct RunConfig {
  std::string input;
  std::string reference;
  double rho = 0.0;
  std::uint64_t seed = 0;
  std::vector<bench::Method> methods;
  bench::SweepGrid filter_grid{bench::Method::Filter, {}, {}, {}};
  bench::SweepGrid heat_grid{bench::Method::Heat, {}, {}, {}};
  bench::SweepGrid sobolev_grid{bench::Method::Sobolev, {}, {}, {}};
  std::string out;
  Format format = Format::Csv;
  std::size_t repeats = 11;
};

// Raw flag values as typed; turned into a RunConfig after parsing.
struct Flags {
  std::string input, reference, out, method, iters, tau, mu, format, eps, cost;
  double rho = 0.0;
  std::uint64_t seed = 0;
  std::size_t repeats = 11;
  unsigned subdivisions = 3;
  std::size_t frequency = 0;
  std::size_t size = 7;
};

template <class T>
T parse_number(std::string_view s, const std::string& flag) {
  T v{};
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw UsageError(flag + ": '" + std::string(s) + "' is not a number");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

// Comma-separated items, each a value or an inclusive range a:b[:step].
template <class T>
std::vector<T> parse_list(const std::string& text, const std::string& flag) {
  std::vector<T> out;
  if (text.empty()) throw UsageError(flag + ": empty list");
  for (auto item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() == 1) {
      out.push_back(parse_number<T>(parts[0], flag));
      continue;
    }
    if (parts.size() > 3) throw UsageError(flag + ": bad range '" + std::string(item) + "'");
    const T lo = parse_number<T>(parts[0], flag);
    const T hi = parse_number<T>(parts[1], flag);
    const T step = parts.size() == 3 ? parse_number<T>(parts[2], flag) : T{1};
    if (!(step > T{0}) || hi < lo) throw UsageError(flag + ": bad range '" + std::string(item) + "'");
    if constexpr (std::is_integral_v<T>) {
      for (T v = lo; v <= hi; v += step) out.push_back(v);
    } else {
      const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
      for (std::size_t k = 0; k <= count; ++k) out.push_back(lo + static_cast<T>(k) * step);
    }
  }
  return out;
}

Format parse_format(const std::string& flag_value, const std::string& out_path) {
  if (flag_value == "csv") return Format::Csv;
  if (flag_value == "json") return Format::Json;
  if (!flag_value.empty()) throw UsageError("--format must be csv or json");
  return fs::path(out_path).extension() == ".json" ? Format::Json : Format::Csv;
}

void require_mesh_path(const std::string& path, const std::string& flag) {
  try {
    (void)format_from_path(path);
  } catch (const MeshError&) {
    throw UsageError(flag + ": mesh path must end in .off or .obj: '" + path + "'");
  }
}

void require(bool condition, const std::string& message) {
  if (!condition) throw UsageError(message);
}

// Either an explicit reference (input is already noisy) or noise generated
// from the input with --rho/--seed.
bench::DenoiseProblem load_problem(const RunConfig& cfg) {
  const Mesh input = load_mesh(cfg.input);
  if (!cfg.reference.empty()) {
    const Mesh ref = load_mesh(cfg.reference);
    if (ref.vertex_count() != input.vertex_count())
      throw MeshError("reference " + cfg.reference + " has " + std::to_string(ref.vertex_count()) +
                      " vertices, input has " + std::to_string(input.vertex_count()));
    return bench::DenoiseProblem(input, ref.vertices());
  }
  return bench::DenoiseProblem(add_normal_noise(input, {cfg.rho, cfg.seed}), input.vertices());
}

// Writes `text` to cfg.out, or stdout when no path is given.
void emit(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw MeshError("cannot open " + out + " for writing");
  f << text;
  if (!f) throw MeshError("write failed: " + out);
}

std::string render(const bench::SweepReport& report, Format format) {
  std::ostringstream os;
  if (format == Format::Json)
    os << bench::to_json(report).dump(2) << '\n';
  else
    bench::write_csv(os, report);
  return os.str();
}

RunConfig make_config(const Flags& f, bool sweep) {
  RunConfig cfg;
  cfg.input = f.input;
  cfg.reference = f.reference;
  cfg.rho = f.rho;
  cfg.seed = f.seed;
  cfg.out = f.out;
  cfg.repeats = f.repeats;
  require(cfg.rho >= 0.0 && std::isfinite(cfg.rho), "--rho must be a finite value >= 0");
  require(cfg.repeats >= 1, "--repeats must be >= 1");
  require_mesh_path(cfg.input, "--input");
  if (!cfg.reference.empty()) require_mesh_path(cfg.reference, "--reference");

  if (f.method.empty() || f.method == "all") {
    require(sweep, "--method is required");
    cfg.methods = {bench::Method::Filter, bench::Method::Heat, bench::Method::Sobolev};
  } else {
    for (auto m : split(f.method, ',')) {
      try {
        cfg.methods.push_back(bench::parse_method(m));
      } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--method: ") + e.what());
      }
    }
    require(sweep || cfg.methods.size() == 1, "denoise takes exactly one --method");
  }

  const std::string iters = !f.iters.empty() ? f.iters : (sweep ? "0:60" : "");
  const std::string tau = !f.tau.empty() ? f.tau : (sweep ? "0.25,0.5,0.75,1" : "1");
  const std::string mu = !f.mu.empty() ? f.mu : (sweep ? "0.1,0.2,0.5,1,2,5,10,20,51,100" : "");
  for (auto m : cfg.methods) {
    if (m == bench::Method::Filter || m == bench::Method::Heat) {
      require(!iters.empty(), "--iters is required for " + std::string(bench::to_string(m)));
      cfg.filter_grid.iterations = cfg.heat_grid.iterations = parse_list<std::size_t>(iters, "--iters");
    }
    if (m == bench::Method::Heat) cfg.heat_grid.taus = parse_list<double>(tau, "--tau");
    if (m == bench::Method::Sobolev) {
      require(!mu.empty(), "--mu is required for sobolev");
      cfg.sobolev_grid.mus = parse_list<double>(mu, "--mu");
    }
  }
  for (auto m : cfg.methods) {
    const auto& g = m == bench::Method::Filter ? cfg.filter_grid
                    : m == bench::Method::Heat ? cfg.heat_grid
                                               : cfg.sobolev_grid;
    try {
      g.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    if (!sweep) require(g.size() == 1, "denoise takes a single parameter value per list");
  }
  return cfg;
}

std::vector<bench::SweepGrid> grids_for(const RunConfig& cfg) {
  std::vector<bench::SweepGrid> grids;
  for (auto m : cfg.methods) {
    if (m == bench::Method::Filter) grids.push_back(cfg.filter_grid);
    if (m == bench::Method::Heat) grids.push_back(cfg.heat_grid);
    if (m == bench::Method::Sobolev) grids.push_back(cfg.sobolev_grid);
  }
  return grids;
}

int cmd_icosphere(const Flags& f) {
  require(f.subdivisions <= 12, "--subdivisions must be <= 12");
  const Mesh m = f.frequency > 0 ? icosphere_with_frequency(f.frequency) : icosphere(f.subdivisions);
  if (f.out.empty()) {
    write_off(std::cout, m);
  } else {
    require_mesh_path(f.out, "--out");
    save_mesh(f.out, m);
    std::cout << "vertices=" << m.vertex_count() << " faces=" << m.face_count() << '\n';
  }
  return 0;
}

int cmd_noise(const Flags& f) {
  require(f.rho >= 0.0 && std::isfinite(f.rho), "--rho must be a finite value >= 0");
  require_mesh_path(f.input, "--input");
  require_mesh_path(f.out, "--out");
  const Mesh clean = load_mesh(f.input);
  const Mesh noisy = add_normal_noise(clean, {f.rho, f.seed});
  save_mesh(f.out, noisy);
  std::cout << "snr_db=" << bench::detail::format_real(snr(noisy.vertices(), clean.vertices())) << '\n';
  return 0;
}

int cmd_denoise(const Flags& f) {
  const RunConfig cfg = make_config(f, false);
  require_mesh_path(cfg.out, "--out");
  const auto problem = load_problem(cfg);
  const auto params = bench::expand(grids_for(cfg).front()).front();
  SignalMatrix out;
  bench::SweepReport report;
  report.noisy_snr_db = problem.noisy_snr();
  report.repeats = cfg.repeats;
  auto rec = bench::describe(params);
  rec.time = bench::time_method([&] { out = bench::run_method(problem, params); }, cfg.repeats);
  rec.snr_db = snr(out, problem.reference);
  report.records.push_back(rec);
  bench::finalize(report);
  save_mesh(cfg.out, problem.noisy.with_vertices(std::move(out)));
  std::cout << render(report, parse_format(f.format, ""));
  return 0;
}

int cmd_sweep(const Flags& f) {
  RunConfig cfg = make_config(f, true);
  cfg.format = parse_format(f.format, cfg.out);
  const auto problem = load_problem(cfg);
  const auto report = bench::run_sweep(problem, grids_for(cfg), {cfg.repeats, true});
  emit(cfg.out, render(report, cfg.format));
  if (!cfg.out.empty()) {
    for (const auto& b : report.best) {
      std::cout << "best " << bench::to_string(b.method) << ' ' << b.param_name << '='
                << bench::detail::format_real(b.param_value);
      if (!b.param2_name.empty()) std::cout << ' ' << b.param2_name << '=' << bench::detail::format_real(b.param2_value);
      std::cout << " snr_db=" << bench::detail::format_real(b.snr_db) << '\n';
    }
  }
  return 0;
}

// Cost matrix from a CSV file: one row per line, comma-separated values.
ot::CostMatrix read_cost_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open " + path);
  std::vector<double> data;
  std::size_t rows = 0, cols = 0;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    std::size_t n = 0;
    for (auto tok : split(line, ',')) {
      while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
      while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\r')) tok.remove_suffix(1);
      double v{};
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty())
        throw MeshError(path + ": line " + std::to_string(rows + 1) + ": bad number '" + std::string(tok) + "'");
      data.push_back(v);
      ++n;
    }
    if (rows == 0) cols = n;
    if (n != cols) throw MeshError(path + ": ragged row " + std::to_string(rows + 1));
    ++rows;
  }
  if (rows == 0) throw MeshError(path + ": empty cost matrix");
  return ot::CostMatrix(rows, cols, std::move(data));
}

int cmd_sinkhorn_demo(const Flags& f) {
  const auto factors = parse_list<double>(f.eps.empty() ? "1,0.1,0.01" : f.eps, "--eps");
  for (double e : factors) require(e > 0.0 && std::isfinite(e), "--eps values must be > 0");
  ot::CostMatrix c;
  if (!f.cost.empty()) {
    c = read_cost_csv(f.cost);
  } else {
    require(f.size >= 1 && f.size <= 64, "--size must be in 1..64");
    std::mt19937_64 rng(f.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    c = ot::CostMatrix(f.size, f.size);
    for (std::size_t i = 0; i < f.size; ++i)
      for (std::size_t j = 0; j < f.size; ++j) c(i, j) = u(rng);
  }
  const auto report = bench::run_sinkhorn_demo(c, ot::Histogram::uniform(c.rows()), ot::Histogram::uniform(c.cols()),
                                               factors);
  std::ostringstream os;
  if (parse_format(f.format, f.out) == Format::Json)
    os << bench::to_json(report).dump(2) << '\n';
  else
    bench::write_csv(os, report);
  emit(f.out, os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph-based mesh denoising and entropic transport toolkit"};
  app.require_subcommand(1);
  Flags f;

  auto* ico = app.add_subcommand("icosphere", "Write a unit icosphere");
  ico->add_option("--subdivisions", f.subdivisions, "Subdivision level (vertices = 10*4^L + 2)");
  ico->add_option("--frequency", f.frequency, "Edge subdivision frequency, overrides --subdivisions");
  ico->add_option("--out", f.out, "Output mesh (.off or .obj); stdout OFF when omitted");

  auto* noise = app.add_subcommand("noise", "Displace vertices along their normals by Gaussian noise");
  noise->add_option("--input", f.input, "Clean mesh")->required();
  noise->add_option("--rho", f.rho, "Noise level")->required();
  noise->add_option("--seed", f.seed, "Random seed");
  noise->add_option("--out", f.out, "Noisy mesh output")->required();

  auto add_run_flags = [&f](CLI::App* sub) {
    sub->add_option("--input", f.input, "Input mesh")->required();
    sub->add_option("--reference", f.reference, "Clean reference; when omitted the input is noised with --rho");
    sub->add_option("--rho", f.rho, "Noise level used when no reference is given");
    sub->add_option("--seed", f.seed, "Noise seed");
    sub->add_option("--method", f.method, "filter, heat or sobolev");
    sub->add_option("--iters", f.iters, "Iteration counts, e.g. 0:60 or 1,5,40");
    sub->add_option("--tau", f.tau, "Heat step sizes");
    sub->add_option("--mu", f.mu, "Sobolev weights");
    sub->add_option("--repeats", f.repeats, "Timed repetitions after one warm-up");
    sub->add_option("--format", f.format, "csv or json");
  };

  auto* denoise = app.add_subcommand("denoise", "Run one denoiser and report SNR and timing");
  add_run_flags(denoise);
  denoise->add_option("--out", f.out, "Denoised mesh output")->required();

  auto* sweep = app.add_subcommand("sweep", "Sweep denoiser parameters and report SNR and timing");
  add_run_flags(sweep);
  sweep->add_option("--out", f.out, "Report path; stdout when omitted");

  auto* demo = app.add_subcommand("sinkhorn-demo", "Entropic transport on a small problem at several epsilons");
  demo->add_option("--size", f.size, "Side of the random uniform-marginal problem");
  demo->add_option("--seed", f.seed, "Seed for the random cost matrix");
  demo->add_option("--input", f.cost, "Cost matrix CSV instead of a random one");
  demo->add_option("--eps", f.eps, "Epsilon factors relative to max(c)");
  demo->add_option("--out", f.out, "Report path; stdout when omitted");
  demo->add_option("--format", f.format, "csv or json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*ico) return cmd_icosphere(f);
    if (*noise) return cmd_noise(f);
    if (*denoise) return cmd_denoise(f);
    if (*sweep) return cmd_sweep(f);
    if (*demo) return cmd_sinkhorn_demo(f);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsageError;
}
