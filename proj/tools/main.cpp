// hib: command-line front end for the HIB prior, two-groups testing,
// simulation experiments and cohort screening.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "hib/hib.hpp"
#include "hib/io.hpp"
#include "hib/posterior.hpp"
#include "hib/screening.hpp"
#include "hib/simulation.hpp"
#include "hib/twogroups.hpp"

namespace {

using namespace hib;

constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

// Output sink: a file when a path is given, stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw InputError("cannot open '" + path + "' for writing");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void close() {
    if (!file_) return;
    file_->close();
    if (!*file_) throw InputError("write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::vector<double> parse_grid(const std::string& spec) {
  // start:stop:step, inclusive of stop up to rounding.
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw InputError("grid '" + spec + "' must be start:stop:step");
  double v[3];
  for (int i = 0; i < 3; ++i) {
    std::size_t used = 0;
    try {
      v[i] = std::stod(parts[i], &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != parts[i].size() || parts[i].empty()) throw InputError("grid '" + spec + "': bad number '" + parts[i] + "'");
  }
  if (!(v[2] > 0) || v[1] < v[0]) throw InputError("grid '" + spec + "' needs step > 0 and stop >= start");
  const long n = static_cast<long>(std::floor((v[1] - v[0]) / v[2] + 1e-9)) + 1;
  if (n > 10000000) throw InputError("grid '" + spec + "' has too many points");
  std::vector<double> out(n);
  for (long i = 0; i < n; ++i) out[i] = v[0] + i * v[2];
  return out;
}

std::vector<double> read_values(const std::string& path, const std::string& column) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::vector<double> out;
  std::string line;
  long line_no = 0;
  int col = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[0] == '#') continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (col < 0) {
      // A header row names the column; a bare number starts the data.
      char* end = nullptr;
      std::strtod(f[0].c_str(), &end);
      if (f.size() == 1 && end && *end == '\0' && !f[0].empty()) {
        col = 0;
      } else {
        for (std::size_t i = 0; i < f.size(); ++i) {
          if (f[i] == column) col = static_cast<int>(i);
        }
        if (col < 0) throw InputError(path + ":" + std::to_string(line_no) + ": no column named '" + column + "'");
        continue;
      }
    }
    if (static_cast<int>(f.size()) <= col) throw InputError(path + ":" + std::to_string(line_no) + ": missing field");
    char* end = nullptr;
    const double v = std::strtod(f[col].c_str(), &end);
    if (f[col].empty() || *end != '\0' || !std::isfinite(v)) {
      throw InputError(path + ":" + std::to_string(line_no) + ": '" + f[col] + "' is not a finite number");
    }
    out.push_back(v);
  }
  if (out.empty()) throw InputError("'" + path + "' contains no values");
  return out;
}

void write_table(std::ostream& os, const std::string& format, const std::string& x_name,
                 const std::string& y_name, const std::vector<double>& x, const std::vector<double>& y) {
  if (format == "json") {
    JsonWriter json(os);
    json.begin_array();
    for (std::size_t i = 0; i < x.size(); ++i) json.begin_object().field(x_name, x[i]).field(y_name, y[i]).end_object();
    json.end_array();
    json.finish();
  } else {
    os << x_name << ',' << y_name << '\n';
    for (std::size_t i = 0; i < x.size(); ++i) {
      os << format_number(x[i], kCsvDigits) << ',' << format_number(y[i], kCsvDigits) << '\n';
    }
  }
}

struct ModelOptions {
  double a = 0.5;
  double b = 1.0;
  double tau = 1.0;
  double s = 0.0;
  double sigma = 1.0;

  void add(CLI::App* app) {
    app->add_option("--a", a, "HIB shape a (tail behavior)")->capture_default_str();
    app->add_option("--b", b, "HIB shape b (behavior near zero)")->capture_default_str();
    app->add_option("--tau", tau, "global scale, tau^2 in [1e-3, 1e3]")->capture_default_str();
    app->add_option("--s", s, "sum-of-squares shift")->capture_default_str();
    app->add_option("--sigma", sigma, "noise standard deviation")->capture_default_str();
  }
  HIBParams params() const {
    HIBParams p;
    p.a = a;
    p.b = b;
    p.tau = tau;
    p.s = s;
    p.sigma = sigma;
    p.validate();
    return p;
  }
};

struct FitOptions {
  long n_draws = 5000;
  double min_ess = 50;
  double tau_min = std::sqrt(kMinTau2);
  double tau_max = std::sqrt(kMaxTau2);
  std::string proposal = "laplace";

  void add(CLI::App* app) {
    app->add_option("--n-draws", n_draws, "importance-sampling draws of (w, tau)")->capture_default_str();
    app->add_option("--min-ess", min_ess, "smallest acceptable importance-sampling ESS")->capture_default_str();
    app->add_option("--tau-min", tau_min, "lower truncation of the half-Cauchy tau prior")->capture_default_str();
    app->add_option("--tau-max", tau_max, "upper truncation of the half-Cauchy tau prior")->capture_default_str();
    app->add_option("--proposal", proposal, "importance proposal: laplace (t around the mode) or prior")
        ->check(CLI::IsMember({"laplace", "prior"}))
        ->capture_default_str();
  }
  void apply(FitConfig& f) const {
    f.n_draws = n_draws;
    f.min_ess = min_ess;
    f.tau_min = tau_min;
    f.tau_max = tau_max;
    f.proposal = proposal == "prior" ? Proposal::prior : Proposal::laplace;
  }
};

// Flat "key = value" config: each key names a long flag of the subcommand.
// Entries fill only options not given on the command line.
void apply_config(CLI::App* app, const std::string& path) {
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path + "'");
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::size_t eq = line.find('=');
    auto trim = [](std::string t) {
      const std::size_t b = t.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      return t.substr(b, t.find_last_not_of(" \t\r") - b + 1);
    };
    if (trim(line).empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) throw InputError(where + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    CLI::Option* opt = key == "config" ? nullptr : app->get_option_no_throw("--" + key);
    if (opt == nullptr) throw InputError(where + "unknown key '" + key + "'");
    if (opt->count() > 0) continue;
    try {
      if (opt->get_type_size() == 0) {
        opt->add_result(value == "true" || value == "on" || value == "1" ? "true" : "false");
      } else {
        opt->add_result(value);
      }
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw InputError(where + key + ": " + e.what());
    }
  }
}

// The seed defaults to HIB_SEED when neither a flag nor the config sets it.
void apply_seed_env(CLI::App* app) {
  CLI::Option* opt = app->get_option("--seed");
  if (opt->count() > 0) return;
  const char* env = std::getenv("HIB_SEED");
  if (env == nullptr || *env == '\0') return;
  try {
    opt->add_result(env);
    opt->run_callback();
  } catch (const CLI::Error& e) {
    throw InputError(std::string("HIB_SEED: ") + e.what());
  }
}

// eval ---------------------------------------------------------------------

struct EvalCommand {
  ModelOptions model;
  std::string quantity;
  std::string grid;
  int grid_size = 99;
  unsigned order = 1;
  double w = 0.1;
  std::string side = "upper";
  std::string format = "csv";
  std::string output;

  void add(CLI::App& root) {
    CLI::App* app = root.add_subcommand("eval", "Tabulate prior, posterior and testing quantities on a grid");
    model.add(app);
    app->add_option("--quantity", quantity, "quantity to tabulate")
        ->required()
        ->check(CLI::IsMember({"kappa-density", "lambda2-density", "shrinkage-profile", "moment", "mgf",
                               "posterior-mean", "posterior-var", "posterior-kappa", "marginal", "score",
                               "prob-positive", "local-fdr", "tail-fdr"}));
    app->add_option("--grid,--x-grid,--y-grid", grid, "evaluation points as start:stop:step");
    app->add_option("--grid-size", grid_size, "points for shrinkage-profile")->capture_default_str();
    app->add_option("--order", order, "moment order for --quantity moment")->capture_default_str();
    app->add_option("--w", w, "prior inclusion probability for local-fdr and tail-fdr")->capture_default_str();
    app->add_option("--side", side, "tail for tail-fdr")
        ->check(CLI::IsMember({"lower", "upper", "two_sided"}))
        ->capture_default_str();
    app->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app->add_option("--output,-o", output, "output file (default stdout)");
    app->callback([this] { run(); });
  }

  std::vector<double> points(double lo, double hi, double step) const {
    if (!grid.empty()) return parse_grid(grid);
    std::ostringstream os;
    os << lo << ':' << hi << ':' << step;
    return parse_grid(os.str());
  }

  void run() {
    const HIBParams p = model.params();
    std::vector<double> x, y;
    std::string x_name = "y", y_name = quantity;
    if (quantity == "shrinkage-profile") {
      if (grid_size < 1) throw InputError("--grid-size must be >= 1");
      for (const ShrinkageProfilePoint& pt : shrinkage_profile(p, grid_size)) {
        x.push_back(pt.kappa);
        y.push_back(pt.density);
      }
      x_name = "kappa";
      y_name = "density";
    } else if (quantity == "kappa-density") {
      x = points(0.01, 0.99, 0.01);
      for (double k : x) {
        if (!(k > 0 && k < 1)) throw InputError("kappa grid must lie inside (0, 1)");
        y.push_back(hb_density_kappa(k, p));
      }
      x_name = "kappa";
      y_name = "density";
    } else if (quantity == "lambda2-density") {
      x = points(0.05, 10, 0.05);
      for (double l : x) {
        if (!(l > 0)) throw InputError("lambda2 grid must be positive");
        y.push_back(hib_density_lambda2(l, p));
      }
      x_name = "lambda2";
      y_name = "density";
    } else if (quantity == "moment") {
      x = {static_cast<double>(order)};
      y = {hb_moment(order, p)};
      x_name = "order";
    } else if (quantity == "mgf") {
      x = points(-5, 5, 0.5);
      for (double t : x) y.push_back(hb_mgf(t, p).value());
      x_name = "t";
    } else {
      x = points(-10, 10, 0.5);
      TwoGroupsModel m;
      m.w = w;
      m.hib = p;
      const TailSide tail = side == "lower" ? TailSide::lower : side == "upper" ? TailSide::upper : TailSide::two_sided;
      for (double v : x) {
        if (quantity == "posterior-mean") y.push_back(posterior_mean_beta(v, p));
        else if (quantity == "posterior-var") y.push_back(posterior_var_beta(v, p));
        else if (quantity == "posterior-kappa") y.push_back(posterior_kappa_moment(1, v, p));
        else if (quantity == "marginal") y.push_back(marginal_m1(v, p).value());
        else if (quantity == "score") y.push_back(score_m1(v, p));
        else if (quantity == "prob-positive") y.push_back(prob_positive(v, p));
        else if (quantity == "local-fdr") y.push_back(local_fdr(v, m));
        else y.push_back(tail_fdr(v, m, tail));
      }
    }
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (!std::isfinite(y[i])) {
        std::ostringstream os;
        os << quantity << " at " << x_name << " = " << x[i] << " is not representable as a double";
        throw NumericError(os.str());
      }
    }
    Sink sink(output);
    write_table(sink.stream(), format, x_name, y_name, x, y);
    sink.close();
  }
};

// simulate -----------------------------------------------------------------

struct SimulateCommand {
  FitOptions fit;
  long p = 1000;
  std::string signal = "fixed";
  std::vector<long> k = {5};
  std::vector<double> value = {7};
  std::vector<double> scale = {1};
  int t_dof = 3;
  long replicates = 100;
  std::vector<std::string> estimators = {"hib", "laplace"};
  double a = 0.5;
  double b = 1.0;
  double flag_threshold = 0.5;
  std::string laplace_scale = "estimate";
  std::uint64_t seed = 1;
  std::string format = "csv";
  std::string output;
  std::string json_output;
  std::string config;
  int* workers = nullptr;

  void add(CLI::App& root, int& worker_count) {
    workers = &worker_count;
    CLI::App* app = root.add_subcommand("simulate", "Run the sparse-means simulation experiments");
    app->add_option("--config", config, "flat key = value file of long flag names; flags override its entries");
    fit.add(app);
    app->add_option("--p", p, "dimension of the mean vector")->capture_default_str();
    app->add_option("--signal", signal, "fixed (k entries equal to value) or random (scale * t)")
        ->check(CLI::IsMember({"fixed", "random"}))
        ->capture_default_str();
    app->add_option("--k", k, "number of nonzero means; a list runs each")->delimiter(',')->capture_default_str();
    app->add_option("--value", value, "fixed signal value(s)")->delimiter(',')->capture_default_str();
    app->add_option("--scale", scale, "random signal scale(s) c")->delimiter(',')->capture_default_str();
    app->add_option("--t-dof", t_dof, "degrees of freedom of random signals")->capture_default_str();
    app->add_option("--replicates", replicates, "data sets per configuration")->capture_default_str();
    app->add_option("--estimators", estimators, "hib and/or laplace")
        ->delimiter(',')
        ->check(CLI::IsMember({"hib", "laplace"}))
        ->capture_default_str();
    app->add_option("--a", a, "HIB shape a")->capture_default_str();
    app->add_option("--b", b, "HIB shape b")->capture_default_str();
    app->add_option("--flag-threshold", flag_threshold, "HIB flags incl_prob above this")->capture_default_str();
    app->add_option("--laplace-scale", laplace_scale,
                    "Laplace slab rate a in (a/2)exp(-a|u|): a number, or 'estimate' for marginal ML")
        ->capture_default_str();
    app->add_option("--seed", seed, "master seed (default from HIB_SEED, else 1)")->capture_default_str();
    app->add_option("--format", format, "csv or json for --output")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app->add_option("--output,-o", output, "summary output file (default stdout)");
    app->add_option("--json", json_output, "also write JSON with per-replicate rows here");
    app->callback([this, app] {
      apply_config(app, config);
      apply_seed_env(app);
      run();
    });
  }

  void run() {
    std::vector<ExperimentResult> results;
    const std::vector<double>& sizes = signal == "fixed" ? value : scale;
    for (long kk : k) {
      for (double v : sizes) {
        ExperimentConfig c;
        c.p = p;
        c.signal = signal == "fixed" ? SignalKind::fixed : SignalKind::random;
        c.k = kk;
        (signal == "fixed" ? c.value : c.scale) = v;
        c.t_dof = t_dof;
        c.replicates = replicates;
        c.estimators.clear();
        for (const std::string& e : estimators) c.estimators.push_back(e == "hib" ? Estimator::hib : Estimator::laplace);
        c.seed = seed;
        c.a = a;
        c.b = b;
        c.flag_threshold = flag_threshold;
        if (laplace_scale == "estimate") {
          c.laplace.estimate_scale = true;
        } else {
          c.laplace.estimate_scale = false;
          try {
            c.laplace.scale = std::stod(laplace_scale);
          } catch (const std::exception&) {
            throw InputError("--laplace-scale must be a number or 'estimate'");
          }
        }
        fit.apply(c.fit);
        c.workers = *workers;
        std::cerr << "simulate: " << to_string(c.signal) << " k=" << kk << " " << (signal == "fixed" ? "value=" : "scale=")
                  << v << ", " << replicates << " replicates\n";
        results.push_back(run_experiment(c));
      }
    }
    Sink sink(output);
    if (format == "json") {
      write_experiment_json(sink.stream(), results);
    } else {
      write_experiment_csv(sink.stream(), results);
    }
    sink.close();
    if (!json_output.empty()) {
      Sink js(json_output);
      write_experiment_json(js.stream(), results);
      js.close();
    }
  }
};

// screen -------------------------------------------------------------------

struct ScreenCommand {
  FitOptions fit;
  std::string input;
  long min_years = 5;
  std::string ess_correction = "on";
  double high = 0.9;
  double mid = 0.5;
  double a = 0.5;
  double b = 1.0;
  std::uint64_t seed = 1;
  std::string json_output;
  std::string csv_output;
  bool emit_draws = false;
  std::string config;
  int* workers = nullptr;

  void add(CLI::App& root, int& worker_count) {
    workers = &worker_count;
    CLI::App* app = root.add_subcommand("screen", "Screen a cohort of performance trajectories");
    app->add_option("--config", config, "flat key = value file of long flag names; flags override its entries");
    fit.add(app);
    app->add_option("--input,-i", input, "CSV with firm_id,year,z or firm_id,year,raw_value,benchmark_mean,benchmark_sd");
    app->add_option("--min-years", min_years, "drop firms with fewer records")->capture_default_str();
    app->add_option("--ess-correction", ess_correction, "on: z from the autocorrelation-corrected sample size")
        ->check(CLI::IsMember({"on", "off"}))
        ->capture_default_str();
    app->add_option("--high-threshold", high, "incl_prob above this is flagged high")->capture_default_str();
    app->add_option("--mid-threshold", mid, "incl_prob above this (and not high) is flagged mid")->capture_default_str();
    app->add_option("--a", a, "HIB shape a")->capture_default_str();
    app->add_option("--b", b, "HIB shape b")->capture_default_str();
    app->add_option("--seed", seed, "importance-sampling seed (default from HIB_SEED, else 1)")
        
        ->capture_default_str();
    app->add_option("--output-json,--json", json_output, "report JSON (default stdout)");
    app->add_option("--output-csv,--csv", csv_output, "per-firm CSV");
    app->add_flag("--emit-draws", emit_draws, "include the importance-sampling draws in the JSON");
    app->callback([this, app] {
      apply_config(app, config);
      apply_seed_env(app);
      if (input.empty()) throw InputError("screen: --input is required");
      run();
    });
  }

  void run() {
    std::ifstream in(input, std::ios::binary);
    if (!in) throw InputError("cannot open '" + input + "'");
    const auto firms = standardize(read_trajectory_csv(in, input));
    ScreenConfig cfg;
    cfg.min_years = min_years;
    cfg.ess_correction = ess_correction == "on";
    cfg.high_threshold = high;
    cfg.mid_threshold = mid;
    fit.apply(cfg.fit);
    cfg.fit.a = a;
    cfg.fit.b = b;
    cfg.fit.seed = seed;
    cfg.fit.workers = *workers;
    const ScreenReport rep = screen(firms, cfg);
    std::cerr << "screen: " << rep.input_firms << " firms read, " << rep.excluded_short << " with fewer than "
              << min_years << " years excluded, cohort " << rep.cohort_size << "\n";
    if (rep.degenerate_series > 0) {
      std::cerr << "screen: warning: " << rep.degenerate_series
                << " firms have constant series; their autocorrelation is set to 0\n";
    }
    std::cerr << "screen: flagged high " << rep.flagged_high.firm_ids.size() << " (expected fdr "
              << rep.flagged_high.expected_fdr << "), mid " << rep.flagged_mid.firm_ids.size() << " (expected fdr "
              << rep.flagged_mid.expected_fdr << ")\n";
    Sink sink(json_output);
    write_screen_json(sink.stream(), rep, emit_draws);
    sink.close();
    if (!csv_output.empty()) {
      Sink csv(csv_output);
      write_screen_csv(csv.stream(), rep);
      csv.close();
    }
  }
};

// shrink -------------------------------------------------------------------

struct ShrinkCommand {
  ModelOptions model;
  std::string input;
  std::string column = "y";
  std::vector<double> y;
  std::string format = "csv";
  std::string output;

  void add(CLI::App& root) {
    CLI::App* app = root.add_subcommand(
        "shrink", "Shrink a vector toward zero by (1 - g(||y||^2 / sigma^2)) with one shared kappa");
    model.add(app);
    app->add_option("--input,-i", input, "file of y values: one per line, or CSV with a header");
    app->add_option("--column", column, "CSV column holding y")->capture_default_str();
    app->add_option("--y", y, "y values inline, comma separated")->delimiter(',');
    app->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app->add_option("--output,-o", output, "output file (default stdout)");
    app->callback([this] { run(); });
  }

  void run() {
    if (input.empty() == y.empty()) throw InputError("give exactly one of --input and --y");
    const std::vector<double> values = input.empty() ? y : read_values(input, column);
    const HIBParams p = model.params();
    double z = 0;
    for (double v : values) z += (v / p.sigma) * (v / p.sigma);
    const double g = g_shrink(z, static_cast<int>(values.size()), p);
    Sink sink(output);
    std::ostream& os = sink.stream();
    if (format == "json") {
      JsonWriter json(os);
      json.begin_object().field("dimension", static_cast<long>(values.size())).field("Z", z).field("g", g);
      json.key("beta_hat").begin_array();
      for (double v : values) json.value((1 - g) * v);
      json.end_array().end_object();
      json.finish();
    } else {
      os << "index,y,beta_hat\n";
      for (std::size_t i = 0; i < values.size(); ++i) {
        os << i << ',' << format_number(values[i], kCsvDigits) << ',' << format_number((1 - g) * values[i], kCsvDigits)
           << '\n';
      }
    }
    sink.close();
  }
};

// cohort -------------------------------------------------------------------

struct CohortCommand {
  SyntheticCohort spec;
  std::string output;

  void add(CLI::App& root) {
    CLI::App* app = root.add_subcommand("cohort", "Write a simulated z-score cohort CSV for screen");
    app->add_option("--null-firms", spec.null_firms, "firms with zero mean")->capture_default_str();
    app->add_option("--signal-firms", spec.signal_firms, "firms with mean --signal-mean")->capture_default_str();
    app->add_option("--signal-mean", spec.signal_mean, "yearly mean z of signal firms")->capture_default_str();
    app->add_option("--years", spec.years, "records per firm")->capture_default_str();
    app->add_option("--phi", spec.phi, "AR(1) coefficient of the yearly noise")->capture_default_str();
    app->add_option("--seed", spec.seed, "seed (default from HIB_SEED, else 1)")->capture_default_str();
    app->add_option("--output,-o", output, "output file (default stdout)");
    app->callback([this, app] {
      apply_seed_env(app);
      run();
    });
  }

  void run() {
    const auto records = synthetic_cohort(spec);
    Sink sink(output);
    std::ostream& os = sink.stream();
    os << "firm_id,year,z\n";
    for (const TrajectoryRecord& r : records) os << r.firm_id << ',' << r.year << ',' << format_number(*r.z, 17) << '\n';
    sink.close();
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hypergeometric inverted-beta shrinkage, two-groups testing and screening.\n"
               "Exit codes: 0 success, 2 input or validation error, 3 numerical failure."};
  app.require_subcommand(1);
  int workers = 1;
  app.add_option("--workers,-j", workers, "worker threads; results do not depend on it")
      ->check(CLI::Range(1, 256))
      ->capture_default_str();

  EvalCommand eval;
  SimulateCommand simulate;
  ScreenCommand screen_cmd;
  ShrinkCommand shrink;
  CohortCommand cohort;
  eval.add(app);
  simulate.add(app, workers);
  screen_cmd.add(app, workers);
  shrink.add(app);
  cohort.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const SeriesError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const NumericError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return 0;
}
