// rgfi: experiment runner, one-shot denoising and station forecasting.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rgfi/config_file.hpp"
#include "rgfi/efficient.hpp"
#include "rgfi/experiments.hpp"
#include "rgfi/forecast.hpp"
#include "rgfi/io.hpp"
#include "rgfi/stations.hpp"

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

int cmd_run(const std::string& config_path, bool fast, const std::string& out_override,
            std::optional<unsigned long long> seed) {
  rgfi::ExperimentConfig cfg = rgfi::load_experiment_config(config_path);
  if (fast) cfg.realizations = std::min(cfg.realizations, 32);
  if (seed) cfg.seed = *seed;
  const fs::path dir = out_override.empty() ? fs::path(cfg.out_dir) : fs::path(out_override);
  fs::create_directories(dir);

  const rgfi::ExperimentOutput out = rgfi::run_experiment(cfg);
  const std::string stem = rgfi::to_string(cfg.id);
  {
    auto os = open_out(dir / (stem + "_results.csv"));
    rgfi::write_results_csv(os, out.results);
  }
  {
    auto os = open_out(dir / (stem + "_summary.csv"));
    rgfi::write_summary_csv(os, rgfi::summarize(out.results));
  }
  {
    auto os = open_out(dir / (stem + "_timings.csv"));
    rgfi::write_results_csv(os, out.timings);
  }
  std::cout << stem << ": " << out.results.size() << " rows written to " << dir.string() << '\n';
  return 0;
}

int cmd_denoise(const std::string& graph, const std::string& xpath, const std::string& ypath,
                const std::string& config_path, const std::string& out_dir, bool efficient, bool stationary) {
  rgfi::config::KeyValues kv;
  if (!config_path.empty()) kv = rgfi::config::KeyValues::parse_file(config_path);
  rgfi::EfficientConfig cfg = rgfi::config::read_efficient_config(kv);
  kv.require_all_used();

  const rgfi::Gso sbar = rgfi::io::read_graph_file(graph);
  cfg.base.symmetric = sbar.symmetric();
  const rgfi::Matrix x = rgfi::io::read_matrix_file(xpath);
  const rgfi::Matrix y = rgfi::io::read_matrix_file(ypath);

  const rgfi::RfiResult res = efficient    ? rgfi::efficient_rfi(x, y, sbar, cfg)
                              : stationary ? rgfi::rfi_alternating_stationary(x, y, sbar, cfg.base)
                                           : rgfi::rfi_alternating(x, y, sbar, cfg.base);
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  rgfi::io::write_matrix_file((dir / "h_hat.csv").string(), res.h_hat);
  rgfi::io::write_edge_list_file((dir / "s_hat.csv").string(), res.s_hat);
  if (res.h_coeffs) rgfi::io::write_matrix_file((dir / "h_coeffs.csv").string(), *res.h_coeffs);
  auto os = open_out(dir / "report.csv");
  os << rgfi::run_report_csv(res);
  std::cout << "denoise: " << res.trace.size() << " iterations, final objective "
            << (res.trace.empty() ? 0.0 : res.trace.back().objective) << '\n';
  return 0;
}

struct ForecastArgs {
  std::string data, graph, config, out, value_column = "value";
  long long k = 3, knn = 5, gf_order = 3, min_measurements = 1;
  double tts = 0.5;
  int horizon = 1;
  bool normalize = false;
  std::vector<std::string> methods;
};

int cmd_forecast(const ForecastArgs& a) {
  rgfi::IngestOptions io;
  io.value_column = a.value_column;
  io.normalize = a.normalize;
  io.min_measurements = a.min_measurements;
  const rgfi::StationDataset ds = rgfi::ingest_station_csv(a.data, io);

  std::optional<rgfi::Gso> sbar;
  if (!a.graph.empty())
    sbar = rgfi::io::read_graph_file(a.graph);
  else if (ds.has_coordinates)
    sbar = rgfi::knn_graph(ds, a.knn);
  else
    throw std::invalid_argument("forecast needs --graph or latitude/longitude columns in the data");

  rgfi::ForecastOptions fo;
  fo.order = a.k;
  fo.tts = a.tts;
  fo.horizon = a.horizon;
  fo.gf_order = a.gf_order;
  if (!a.methods.empty()) fo.methods = a.methods;
  rgfi::config::KeyValues kv;
  if (!a.config.empty()) kv = rgfi::config::KeyValues::parse_file(a.config);
  fo.solver = rgfi::config::read_solver_config(kv);
  kv.require_all_used();
  fo.solver.symmetric = sbar->symmetric();

  const auto rows = rgfi::forecast_experiment(ds.values, ds.exogenous, *sbar, fo);
  if (a.out.empty()) {
    rgfi::write_forecast_csv(std::cout, rows);
  } else {
    auto os = open_out(a.out);
    rgfi::write_forecast_csv(os, rows);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust graph filter identification with graph denoising"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  bool fast = false;
  std::optional<unsigned long long> seed;
  auto* run = app.add_subcommand("run", "run a configured experiment and write its CSV files");
  run->add_option("--config", config_path, "experiment config file")->required()->check(CLI::ExistingFile);
  run->add_flag("--fast", fast, "use at most 32 realizations");
  run->add_option("--out", out_dir, "output directory (overrides out_dir)");
  run->add_option("--seed", seed, "base seed (overrides seed)");

  std::string graph, xpath, ypath, dconfig, dout = ".";
  bool efficient = false, stationary = false;
  auto* den = app.add_subcommand("denoise", "identify a filter and denoise an observed graph");
  den->add_option("--graph", graph, "edge list or dense matrix CSV")->required()->check(CLI::ExistingFile);
  den->add_option("--x", xpath, "input signals CSV")->required()->check(CLI::ExistingFile);
  den->add_option("--y", ypath, "output signals CSV")->required()->check(CLI::ExistingFile);
  den->add_option("--config", dconfig, "solver config file")->check(CLI::ExistingFile);
  den->add_option("--out", dout, "output directory");
  den->add_flag("--efficient", efficient, "use the gradient / coordinate-descent solver");
  den->add_flag("--stationary", stationary, "add the sample-covariance commutation penalties");

  ForecastArgs fa;
  auto* fc = app.add_subcommand("forecast", "AR forecasting on long-format station data");
  fc->add_option("--data", fa.data, "timestamp,node_id,value[,exogenous][,latitude,longitude] CSV")
      ->required()
      ->check(CLI::ExistingFile);
  fc->add_option("--k", fa.k, "AR memory");
  fc->add_option("--tts", fa.tts, "train fraction");
  fc->add_option("--horizon", fa.horizon, "prediction horizon");
  fc->add_option("--graph", fa.graph, "graph file (default: k-NN graph from coordinates)");
  fc->add_option("--knn", fa.knn, "neighbours of the k-NN graph");
  fc->add_option("--config", fa.config, "solver config file")->check(CLI::ExistingFile);
  fc->add_option("--value-column", fa.value_column, "column holding the measurements");
  fc->add_flag("--normalize", fa.normalize, "scale every station series to unit norm");
  fc->add_option("--min-measurements", fa.min_measurements, "drop stations with fewer raw measurements");
  fc->add_option("--gf-order", fa.gf_order, "polynomial order of LS-GF");
  fc->add_option("--methods", fa.methods, "LS, LS-GF, LS-Eval, Copy-Prev-Day, RFI, AR(K)-RFI")->delimiter(',');
  fc->add_option("--out", fa.out, "output CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(config_path, fast, out_dir, seed);
    if (*den) return cmd_denoise(graph, xpath, ypath, dconfig, dout, efficient, stationary);
    if (*fc) return cmd_forecast(fa);
  } catch (const std::exception& e) {
    nlohmann::json err = {{"error", e.what()}, {"command", app.get_subcommands().front()->get_name()}};
    std::cerr << err.dump() << '\n';
    return 1;
  }
  return 0;
}
