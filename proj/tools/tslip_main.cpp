#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "experiment.hpp"
#include "tune.hpp"
#include "tslip/config.hpp"
#include "tslip/svg.hpp"

namespace fs = std::filesystem;
using namespace tslip;
using namespace tslip::cli;

namespace {

// Relative output paths land under $TSLIP_OUT_ROOT when it is set, so runs
// can be redirected without touching configs or scripts.
std::string out_path(const std::string& p) {
  if (p.empty() || fs::path(p).is_absolute()) return p;
  const char* root = std::getenv("TSLIP_OUT_ROOT");
  if (!root || !*root) return p;
  return (fs::path(root) / p).string();
}

// The gain table referenced by a config file resolves relative to the config.
std::string resolve_gains(const std::string& flag, const std::string& config) {
  if (!flag.empty()) return flag;
  const std::string from_cfg = config_gain_table(config);
  if (from_cfg.empty()) return {};
  const fs::path p(from_cfg);
  if (p.is_absolute()) return from_cfg;
  return (fs::path(config).parent_path() / p).string();
}

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;  // non-numeric cells become NaN
};

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  CsvTable t;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (header) {
      t.columns = cells;
      header = false;
      continue;
    }
    std::vector<double> row(t.columns.size(),
                            std::numeric_limits<double>::quiet_NaN());
    for (size_t i = 0; i < cells.size() && i < row.size(); ++i) {
      try {
        size_t used = 0;
        const double v = std::stod(cells[i], &used);
        if (used == cells[i].size()) row[i] = v;
      } catch (const std::exception&) {
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

int column_index(const CsvTable& t, const std::string& name) {
  for (size_t i = 0; i < t.columns.size(); ++i) {
    if (t.columns[i] == name) return static_cast<int>(i);
  }
  std::string have;
  for (const auto& c : t.columns) have += (have.empty() ? "" : ", ") + c;
  throw std::runtime_error("no column '" + name + "' (have: " + have + ")");
}

int cmd_simulate(const std::string& config, const std::string& name,
                 std::string out_dir, const std::string& gains, bool quiet) {
  const auto experiments = load_experiments(config);
  const ExperimentConfig* picked = nullptr;
  if (name.empty()) {
    if (experiments.size() != 1) {
      std::fprintf(stderr,
                   "simulate: config has %zu experiments, pick one with "
                   "--name:\n",
                   experiments.size());
      for (const auto& e : experiments) {
        std::fprintf(stderr, "  %s\n", e.name.c_str());
      }
      return 1;
    }
    picked = &experiments.front();
  } else {
    for (const auto& e : experiments) {
      if (e.name == name) picked = &e;
    }
    if (!picked) {
      std::fprintf(stderr, "simulate: no experiment named '%s'\n",
                   name.c_str());
      return 1;
    }
  }
  const ResolvedExperiment exp = resolve(*picked, resolve_gains(gains, config));
  if (out_dir.empty()) out_dir = (fs::path("out") / exp.name).string();
  const ExperimentOutcome out = run_experiment(exp, out_path(out_dir), quiet);
  return out.exit_code;
}

int cmd_sweep(const std::string& config, std::string out_dir,
              const std::string& gains, int jobs, bool quiet) {
  const auto experiments = load_experiments(config);
  if (experiments.empty()) {
    std::fprintf(stderr, "sweep: config lists no experiments\n");
    return 1;
  }
  const std::string gains_path = resolve_gains(gains, config);
  std::vector<ResolvedExperiment> resolved;
  resolved.reserve(experiments.size());
  for (const auto& e : experiments) resolved.push_back(resolve(e, gains_path));

  if (out_dir.empty()) out_dir = "out";
  const std::string root = out_path(out_dir);
  fs::create_directories(root);

  std::vector<ExperimentOutcome> outcomes(resolved.size());
  std::atomic<size_t> next{0};
  std::mutex io;
  if (jobs <= 0) {
    jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs <= 0) jobs = 4;
  }
  jobs = std::min<int>(jobs, static_cast<int>(resolved.size()));
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next.fetch_add(1); i < resolved.size();
           i = next.fetch_add(1)) {
        const auto dir = (fs::path(root) / resolved[i].name).string();
        ExperimentOutcome out = run_experiment(resolved[i], dir, true);
        if (!quiet) {
          std::lock_guard<std::mutex> lock(io);
          std::printf("[%zu/%zu] %-24s %s\n", i + 1, resolved.size(),
                      out.name.c_str(),
                      out.converged ? "converged" : "NOT CONVERGED");
        }
        outcomes[i] = std::move(out);
      }
    });
  }
  for (auto& th : pool) th.join();

  std::ofstream agg(fs::path(root) / "sweep_summary.csv");
  agg << aggregate_header() << "\n";
  int exit_code = 0;
  for (size_t i = 0; i < resolved.size(); ++i) {
    agg << aggregate_row(resolved[i], outcomes[i]) << "\n";
    exit_code = std::max(exit_code, outcomes[i].exit_code);
  }
  if (!quiet) {
    std::printf("sweep: %zu experiments, summary in %s\n", resolved.size(),
                (fs::path(root) / "sweep_summary.csv").string().c_str());
  }
  return exit_code;
}

int cmd_plot(const std::string& csv, const std::string& xcol,
             const std::vector<std::string>& ycols, std::string out_file,
             const std::string& title) {
  const CsvTable t = read_csv(csv);
  const int xi = column_index(t, xcol);
  if (out_file.empty()) out_file = "plot.svg";
  SvgPlot plot(title.empty() ? fs::path(csv).stem().string() : title, xcol,
               ycols.size() == 1 ? ycols.front() : "value");
  const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                           "#9467bd", "#ff7f0e", "#8c564b"};
  for (size_t k = 0; k < ycols.size(); ++k) {
    const int yi = column_index(t, ycols[k]);
    std::vector<Vec2> pts;
    pts.reserve(t.rows.size());
    for (const auto& row : t.rows) {
      if (std::isnan(row[xi]) || std::isnan(row[yi])) continue;
      pts.push_back({row[xi], row[yi]});
    }
    plot.add_series(ycols[k], std::move(pts), palette[k % 6]);
  }
  plot.save(out_path(out_file));
  std::printf("wrote %s\n", out_path(out_file).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trunk spring-loaded inverted pendulum running experiments"};
  app.require_subcommand(1);

  std::string config, name, out_dir, gains;
  bool quiet = false;
  int jobs = 0;

  auto* sim = app.add_subcommand("simulate", "run one experiment config");
  sim->add_option("--config", config, "experiment config (json)")
      ->required()
      ->check(CLI::ExistingFile);
  sim->add_option("--name", name, "experiment name when the config has many");
  sim->add_option("--out", out_dir, "output directory (default out/<name>)");
  sim->add_option("--gains", gains, "gain table path (overrides config)");
  sim->add_flag("--quiet", quiet, "suppress the status line");

  auto* sweep = app.add_subcommand("sweep", "run every experiment in a config");
  sweep->add_option("--config", config, "experiment config (json)")
      ->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--out", out_dir, "output root (default out/)");
  sweep->add_option("--gains", gains, "gain table path (overrides config)");
  sweep->add_option("--jobs", jobs, "parallel experiments (default: cores)");
  sweep->add_flag("--quiet", quiet, "suppress progress lines");

  TuneOptions topt;
  auto* tune = app.add_subcommand("tune", "regenerate the controller gain table");
  tune->add_option("--out", topt.out_path, "output table path");
  tune->add_option("--filter", topt.filter, "only cells whose name contains this");
  tune->add_flag("--quick", topt.quick, "single cell, reduced search (smoke test)");
  tune->add_flag("--quiet", quiet, "suppress per-cell detail");

  std::string csv, xcol, plot_out, title;
  std::vector<std::string> ycols;
  auto* plot = app.add_subcommand("plot", "line plot from a result csv");
  plot->add_option("--csv", csv, "input csv")->required()->check(CLI::ExistingFile);
  plot->add_option("--x", xcol, "x column name")->required();
  plot->add_option("--y", ycols, "y column name(s)")->required();
  plot->add_option("--out", plot_out, "output svg (default plot.svg)");
  plot->add_option("--title", title, "plot title");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(config, name, out_dir, gains, quiet);
    if (sweep->parsed()) return cmd_sweep(config, out_dir, gains, jobs, quiet);
    if (tune->parsed()) {
      topt.verbose = !quiet;
      return run_tune(topt);
    }
    if (plot->parsed()) return cmd_plot(csv, xcol, ycols, plot_out, title);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "tslip: %s\n", e.what());
    return 1;
  }
  return 1;
}
