#include "rgfi/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <map>
#include <ostream>
#include <random>
#include <stdexcept>
#include <tuple>

#include "rgfi/forecast.hpp"
#include "rgfi/joint.hpp"
#include "rgfi/kernels.hpp"
#include "rgfi/linalg.hpp"

namespace rgfi {

ExperimentId parse_experiment_id(const std::string& name) {
  static const std::map<std::string, ExperimentId> ids = {
      {"filter_order", ExperimentId::FilterOrder},   {"perturbation_type", ExperimentId::PerturbationType},
      {"baseline_compare", ExperimentId::BaselineCompare}, {"efficiency", ExperimentId::Efficiency},
      {"joint_k", ExperimentId::JointK},             {"ar_forecast", ExperimentId::ArForecast}};
  const auto it = ids.find(name);
  if (it == ids.end()) throw std::invalid_argument("unknown experiment id " + name);
  return it->second;
}

std::string to_string(ExperimentId id) {
  switch (id) {
    case ExperimentId::FilterOrder: return "filter_order";
    case ExperimentId::PerturbationType: return "perturbation_type";
    case ExperimentId::BaselineCompare: return "baseline_compare";
    case ExperimentId::Efficiency: return "efficiency";
    case ExperimentId::JointK: return "joint_k";
    case ExperimentId::ArForecast: return "ar_forecast";
  }
  return "unknown";
}

PerturbationKind parse_perturbation_kind(const std::string& name) {
  if (name == "create" || name == "C") return PerturbationKind::Create;
  if (name == "destroy" || name == "D") return PerturbationKind::Destroy;
  if (name == "create_destroy" || name == "CD") return PerturbationKind::CreateDestroy;
  if (name == "weight_noise" || name == "W") return PerturbationKind::WeightNoise;
  if (name == "mixed" || name == "M") return PerturbationKind::Mixed;
  throw std::invalid_argument("unknown perturbation kind " + name);
}

std::string short_name(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::Create: return "C";
    case PerturbationKind::Destroy: return "D";
    case PerturbationKind::CreateDestroy: return "CD";
    case PerturbationKind::WeightNoise: return "W";
    case PerturbationKind::Mixed: return "M";
  }
  return "?";
}

namespace {

std::vector<std::string> default_methods(ExperimentId id) {
  switch (id) {
    case ExperimentId::FilterOrder: return {"FI", "RFI", "RFI-l1", "RFI-st"};
    case ExperimentId::PerturbationType: return {"Sbar", "FI", "RFI"};
    case ExperimentId::BaselineCompare: return {"Sbar", "FI", "LS", "LS-GF", "RFI", "RFI-l1", "RFI-st"};
    case ExperimentId::Efficiency: return {"RFI", "Eff-RFI"};
    case ExperimentId::JointK: return {"RFI-J", "RFI"};
    case ExperimentId::ArForecast: return {"LS", "LS-GF", "Copy-Prev-Day", "RFI", "AR(K)-RFI"};
  }
  return {};
}

std::vector<double> default_grid(ExperimentId id) {
  switch (id) {
    case ExperimentId::FilterOrder: return {2, 3, 4, 5, 6};
    case ExperimentId::PerturbationType:
    case ExperimentId::BaselineCompare: return {0.05, 0.1, 0.15, 0.2, 0.25};
    case ExperimentId::Efficiency: return {10, 20, 30, 40};
    case ExperimentId::JointK: return {1, 2, 3, 4, 5};
    case ExperimentId::ArForecast: return {1, 2, 3, 4, 5};
  }
  return {};
}

}  // namespace

void ExperimentConfig::validate() const {
  if (realizations < 1) throw std::invalid_argument("realizations must be at least 1");
  if (grid.empty()) throw std::invalid_argument("experiment grid is empty");
  if (methods.empty()) throw std::invalid_argument("experiment has no methods");
  if (graph_model != "er" && graph_model != "small_world")
    throw std::invalid_argument("graph_model must be er or small_world");
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  if (m < 1 || m_k < 1) throw std::invalid_argument("signal counts must be positive");
  if (noise < 0) throw std::invalid_argument("noise must be non-negative");
  if (!(l1_scale > 0)) throw std::invalid_argument("l1_scale must be positive");
  if (!(tts > 0 && tts < 1)) throw std::invalid_argument("tts must lie in (0, 1)");
  solver.validate();
  for (double g : grid) {
    const bool integral = g == std::floor(g);
    switch (id) {
      case ExperimentId::FilterOrder:
        if (!integral || g < 1 || g > static_cast<double>(n))
          throw std::invalid_argument("filter_order grid values must be integers in [1, n]");
        break;
      case ExperimentId::PerturbationType:
      case ExperimentId::BaselineCompare:
        if (g < 0 || g > 1) throw std::invalid_argument("perturbation ratios must lie in [0, 1]");
        break;
      case ExperimentId::Efficiency:
        if (!integral || g < 2) throw std::invalid_argument("efficiency grid values must be node counts >= 2");
        break;
      case ExperimentId::JointK:
      case ExperimentId::ArForecast:
        if (!integral || g < 1) throw std::invalid_argument("grid values must be positive integers");
        break;
    }
  }
}

ExperimentConfig read_experiment_config(config::KeyValues& kv) {
  ExperimentConfig c;
  const std::string id = kv.get_string("experiment", "");
  if (id.empty()) throw std::invalid_argument("config key experiment is required");
  c.id = parse_experiment_id(id);
  c.grid = kv.get_doubles("grid", default_grid(c.id));
  c.realizations = static_cast<int>(kv.get_int("realizations", c.realizations));
  c.seed = static_cast<std::uint64_t>(kv.get_int("seed", static_cast<long long>(c.seed)));
  c.methods = kv.get_list("methods", default_methods(c.id));
  c.graph_model = kv.get_string("graph_model", c.graph_model);
  c.n = kv.get_int("n", c.n);
  c.p = kv.get_double("p", c.p);
  c.sw_k = kv.get_int("sw_k", c.sw_k);
  c.sw_rewire = kv.get_double("sw_rewire", c.sw_rewire);
  c.symmetric = kv.get_bool("symmetric", c.symmetric);
  c.perturbation = parse_perturbation_kind(kv.get_string("perturbation", "create_destroy"));
  c.perturbation_ratio = kv.get_double("perturbation_ratio", c.perturbation_ratio);
  c.weight_sigma = kv.get_double("weight_sigma", c.weight_sigma);
  if (kv.has("perturbation_kinds")) {
    c.perturbation_kinds.clear();
    for (const auto& k : kv.get_list("perturbation_kinds", {})) c.perturbation_kinds.push_back(parse_perturbation_kind(k));
  }
  c.m = kv.get_int("m", c.m);
  c.noise = kv.get_double("noise", c.noise);
  c.filter_order = kv.get_int("filter_order", c.filter_order);
  c.spectral_scaling = kv.get_bool("spectral_scaling", c.spectral_scaling);
  c.normalize_filter = kv.get_bool("normalize_filter", c.normalize_filter);
  c.m_k = kv.get_int("m_k", c.m_k);
  c.true_covariance = kv.get_bool("true_covariance", c.true_covariance);
  c.ar_order = kv.get_int("ar_order", c.ar_order);
  c.series_length = kv.get_int("series_length", c.series_length);
  c.tts = kv.get_double("tts", c.tts);
  c.gf_order = kv.get_int("gf_order", c.gf_order);
  c.l1_scale = kv.get_double("l1_scale", c.l1_scale);
  c.out_dir = kv.get_string("out_dir", c.out_dir);

  c.solver = config::read_efficient_config(kv, c.solver);
  c.solver.base.symmetric = c.symmetric;
  c.solver.base.filter_order = kv.get_int("recover_order", c.filter_order);
  kv.require_all_used();
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  config::KeyValues kv = config::KeyValues::parse_file(path);
  return read_experiment_config(kv);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined key
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + stream * 0xD1B54A32D192ED03ULL + 0x2545F4914F6CDD1DULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Vector draw_filter_coeffs(const Matrix& s, Index order, std::uint64_t seed, bool spectral_scaling) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const Eigen::JacobiSVD<Matrix> svd(s);
  const double rho =
      spectral_scaling && svd.singularValues().size() > 0 ? std::max(svd.singularValues()(0), 1e-12) : 1.0;
  Vector h(order);
  for (Index r = 0; r < order; ++r) h(r) = unif(rng) / std::pow(rho, static_cast<double>(r));
  return h;
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of an empty set");
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

// ---------------------------------------------------------------------------

namespace {

SolverConfig l1_solver(SolverConfig s, double scale) {
  s.reweight = false;
  s.lambda *= scale;
  s.beta *= scale;
  return s;
}

enum Stream : std::uint64_t { kGraph = 1, kPerturb = 2, kSignals = 3, kCoeffs = 4, kSeries = 5 };

using Clock = std::chrono::steady_clock;

struct Recorder {
  double grid;
  std::uint64_t seed;
  std::vector<ResultRow> rows;
  std::vector<ResultRow> timings;

  void add(const std::string& method, const std::string& metric, double value) {
    rows.push_back({method, grid, seed, metric, value});
  }
  void time(const std::string& method, Clock::time_point since) {
    timings.push_back({method, grid, seed, "time_ms",
                       std::chrono::duration<double, std::milli>(Clock::now() - since).count()});
  }
};

Gso make_graph(const ExperimentConfig& c, Index n, std::uint64_t seed) {
  if (c.graph_model == "small_world") return generate_small_world(n, c.sw_k, c.sw_rewire, seed);
  return generate_er(n, c.p, c.symmetric, seed);
}

double nerr_vec(const Vector& est, const Vector& truth) {
  const Index len = std::max(est.size(), truth.size());
  Vector a = Vector::Zero(len), b = Vector::Zero(len);
  a.head(est.size()) = est;
  b.head(truth.size()) = truth;
  return nerr(a, b);
}

/// Least-squares coefficients of Y ~ sum_l h_l S^l X.
Vector ls_graph_filter(const Matrix& x, const Matrix& y, const Matrix& s, Index order) {
  Matrix design(x.size(), order);
  Matrix px = x;
  for (Index l = 0; l < order; ++l) {
    design.col(l) = vec(px);
    if (l + 1 < order) px = s * px;
  }
  return pinv_solve(design, vec(y)).x;
}

struct FilterProblem {
  const Gso* s;
  const Gso* sbar;
  Vector h;
  Matrix hm;
  Matrix x, y;
};

void record_robust(Recorder& rec, const std::string& label, const RfiResult& res, const FilterProblem& p) {
  rec.add(label, "nerr_H", nerr(res.h_hat, p.hm));
  rec.add(label, "nerr_S", nerr(res.s_hat.matrix(), p.s->matrix()));
  if (res.h_coeffs) rec.add(label, "nerr_h", nerr_vec(*res.h_coeffs, p.h));
}

void run_filter_methods(const ExperimentConfig& c, const SolverConfig& solver, const FilterProblem& p,
                        const std::string& suffix, Recorder& rec) {
  const Index order = p.h.size();
  for (const auto& method : c.methods) {
    const std::string label = method + suffix;
    const auto t0 = Clock::now();
    if (method == "Sbar") {
      rec.add(label, "nerr_S", nerr(p.sbar->matrix(), p.s->matrix()));
      continue;
    } else if (method == "FI") {
      const FiResult fr = fi_closed_form(p.x, p.y, *p.sbar, order);
      rec.add(label, "nerr_H", nerr(*build_filter(*p.sbar, fr.h).matrix, p.hm));
      rec.add(label, "nerr_h", nerr_vec(fr.h, p.h));
    } else if (method == "LS") {
      const Matrix gram = p.x * p.x.transpose();
      Eigen::CompleteOrthogonalDecomposition<Matrix> cod(gram);
      cod.setThreshold(kPinvRcond);
      const Matrix hh = cod.solve(p.x * p.y.transpose()).transpose();
      rec.add(label, "nerr_H", nerr(hh, p.hm));
    } else if (method == "LS-GF") {
      const Vector hh = ls_graph_filter(p.x, p.y, p.sbar->matrix(), order);
      rec.add(label, "nerr_H", nerr(*build_filter(*p.sbar, hh).matrix, p.hm));
      rec.add(label, "nerr_h", nerr_vec(hh, p.h));
    } else if (method == "RFI") {
      record_robust(rec, label, rfi_alternating(p.x, p.y, *p.sbar, solver), p);
    } else if (method == "RFI-l1") {
      record_robust(rec, label, rfi_alternating(p.x, p.y, *p.sbar, l1_solver(solver, c.l1_scale)), p);
    } else if (method == "RFI-st") {
      const RfiResult res =
          c.true_covariance
              ? rfi_alternating_stationary(p.x, p.y, *p.sbar, solver, Matrix::Identity(p.hm.rows(), p.hm.rows()),
                                           p.hm * p.hm.transpose())
              : rfi_alternating_stationary(p.x, p.y, *p.sbar, solver);
      record_robust(rec, label, res, p);
    } else if (method == "Eff-RFI") {
      EfficientConfig ec = c.solver;
      ec.base = solver;
      record_robust(rec, label, efficient_rfi(p.x, p.y, *p.sbar, ec), p);
    } else {
      throw std::invalid_argument("method " + method + " is not available in experiment " + to_string(c.id));
    }
    rec.time(label, t0);
  }
}

FilterProblem make_filter_problem(const ExperimentConfig& c, const Gso& s, const Gso& sbar, Index order, Index m,
                                  std::uint64_t seed) {
  FilterProblem p{&s, &sbar, draw_filter_coeffs(s.matrix(), order, derive_seed(seed, kCoeffs), c.spectral_scaling),
                  {}, {}, {}};
  if (c.normalize_filter) {
    const double norm = build_filter(s, p.h).matrix->norm();
    if (norm > 0) p.h *= std::sqrt(static_cast<double>(s.n())) / norm;
  }
  const GraphFilter f = build_filter(s, p.h);
  p.hm = *f.matrix;
  SignalSet sig = synthesize_signals(f, m, c.noise, InputDistribution::GaussianWhite, derive_seed(seed, kSignals));
  p.x = std::move(sig.x);
  p.y = std::move(sig.y);
  return p;
}

PerturbationSpec perturbation_for(const ExperimentConfig& c, PerturbationKind kind, double ratio, std::uint64_t seed) {
  PerturbationSpec spec;
  spec.kind = kind;
  spec.ratio = ratio;
  spec.weight_sigma = c.weight_sigma;
  spec.seed = derive_seed(seed, kPerturb);
  return spec;
}

void run_realization(const ExperimentConfig& c, Recorder& rec) {
  const double g = rec.grid;
  const std::uint64_t seed = rec.seed;
  SolverConfig solver = c.solver.base;

  switch (c.id) {
    case ExperimentId::FilterOrder: {
      const Index order = static_cast<Index>(g);
      solver.filter_order = order;
      const Gso s = make_graph(c, c.n, derive_seed(seed, kGraph));
      const Gso sbar = perturb(s, perturbation_for(c, c.perturbation, c.perturbation_ratio, seed));
      run_filter_methods(c, solver, make_filter_problem(c, s, sbar, order, c.m, seed), "", rec);
      break;
    }
    case ExperimentId::BaselineCompare: {
      const Gso s = make_graph(c, c.n, derive_seed(seed, kGraph));
      const Gso sbar = perturb(s, perturbation_for(c, c.perturbation, g, seed));
      run_filter_methods(c, solver, make_filter_problem(c, s, sbar, c.filter_order, c.m, seed), "", rec);
      break;
    }
    case ExperimentId::PerturbationType: {
      const Gso s = make_graph(c, c.n, derive_seed(seed, kGraph));
      for (const PerturbationKind kind : c.perturbation_kinds) {
        const Gso sbar = perturb(s, perturbation_for(c, kind, g, seed));
        run_filter_methods(c, solver, make_filter_problem(c, s, sbar, c.filter_order, c.m, seed),
                           "-" + short_name(kind), rec);
      }
      break;
    }
    case ExperimentId::Efficiency: {
      const Index n = static_cast<Index>(g);
      const Gso s = make_graph(c, n, derive_seed(seed, kGraph));
      const Gso sbar = perturb(s, perturbation_for(c, c.perturbation, c.perturbation_ratio, seed));
      run_filter_methods(c, solver, make_filter_problem(c, s, sbar, std::min(c.filter_order, n), c.m, seed), "", rec);
      break;
    }
    case ExperimentId::JointK: {
      const std::size_t kk = static_cast<std::size_t>(g);
      const Gso s = make_graph(c, c.n, derive_seed(seed, kGraph));
      const Gso sbar = perturb(s, perturbation_for(c, c.perturbation, c.perturbation_ratio, seed));
      std::vector<FilterProblem> probs;
      MultiSignalSet data;
      for (std::size_t k = 0; k < kk; ++k) {
        probs.push_back(make_filter_problem(c, s, sbar, c.filter_order, c.m_k, derive_seed(seed, 1000 + k)));
        data.xs.push_back(probs.back().x);
        data.ys.push_back(probs.back().y);
      }
      for (const auto& method : c.methods) {
        const auto t0 = Clock::now();
        double err_h = 0.0, err_s = 0.0;
        if (method == "RFI-J" || method == "RFI-l1-J") {
          const SolverConfig sc = method == "RFI-J" ? solver : l1_solver(solver, c.l1_scale);
          const JointResult res = joint_rfi(data, sbar, sc);
          for (std::size_t k = 0; k < kk; ++k) err_h += nerr(res.filters[k], probs[k].hm);
          err_s = nerr(res.s_hat.matrix(), s.matrix()) * static_cast<double>(kk);
        } else if (method == "RFI" || method == "RFI-l1" || method == "RFI-st") {
          const SolverConfig sc = method == "RFI-l1" ? l1_solver(solver, c.l1_scale) : solver;
          for (std::size_t k = 0; k < kk; ++k) {
            const FilterProblem& p = probs[k];
            const RfiResult res =
                method == "RFI-st"
                    ? (c.true_covariance ? rfi_alternating_stationary(p.x, p.y, sbar, sc,
                                                                      Matrix::Identity(c.n, c.n),
                                                                      p.hm * p.hm.transpose())
                                         : rfi_alternating_stationary(p.x, p.y, sbar, sc))
                    : rfi_alternating(p.x, p.y, sbar, sc);
            err_h += nerr(res.h_hat, p.hm);
            err_s += nerr(res.s_hat.matrix(), s.matrix());
          }
        } else {
          throw std::invalid_argument("method " + method + " is not available in experiment joint_k");
        }
        rec.add(method, "nerr_H", err_h / static_cast<double>(kk));
        rec.add(method, "nerr_S", err_s / static_cast<double>(kk));
        rec.time(method, t0);
      }
      break;
    }
    case ExperimentId::ArForecast: {
      const Gso s = make_graph(c, c.n, derive_seed(seed, kGraph));
      const Gso sbar = perturb(s, perturbation_for(c, c.perturbation, c.perturbation_ratio, seed));
      const ArSynthesis syn =
          synthesize_ar(s.matrix(), c.ar_order, c.filter_order, c.series_length, 1, false, derive_seed(seed, kSeries));
      Matrix series(c.n, c.series_length);
      for (Index t = 0; t < c.series_length; ++t) series.col(t) = syn.series.ys[t].col(0);
      ForecastOptions fo;
      fo.order = c.ar_order;
      fo.tts = c.tts;
      fo.horizon = static_cast<int>(g);
      fo.gf_order = c.gf_order;
      fo.solver = solver;
      for (const auto& method : c.methods) {
        fo.methods = {method};
        const auto t0 = Clock::now();
        const auto rows = forecast_experiment(series, std::nullopt, sbar, fo);
        rec.add(rows.front().method, "pred_err", rows.front().error);
        rec.time(rows.front().method, t0);
      }
      break;
    }
  }
}

void write_number(std::ostream& os, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  os.write(buf, res.ptr - buf);
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::size_t per_grid = static_cast<std::size_t>(config.realizations);
  const std::size_t tasks = config.grid.size() * per_grid;
  std::vector<Recorder> recs(tasks);
  for (std::size_t i = 0; i < tasks; ++i) {
    recs[i].grid = config.grid[i / per_grid];
    recs[i].seed = config.seed + static_cast<std::uint64_t>(i % per_grid);
  }
  kernels::parallel_for(tasks, [&](std::size_t i) { run_realization(config, recs[i]); });

  ExperimentOutput out;
  for (auto& r : recs) {
    out.results.insert(out.results.end(), r.rows.begin(), r.rows.end());
    out.timings.insert(out.timings.end(), r.timings.begin(), r.timings.end());
  }
  return out;
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  // keyed by first appearance of (method, metric) and then by grid value
  std::vector<std::pair<std::string, std::string>> order;
  std::map<std::tuple<std::string, std::string, double>, std::vector<double>> groups;
  for (const auto& r : rows) {
    const auto mm = std::make_pair(r.method, r.metric);
    if (std::find(order.begin(), order.end(), mm) == order.end()) order.push_back(mm);
    groups[{r.method, r.metric, r.grid_value}].push_back(r.value);
  }
  std::vector<SummaryRow> out;
  for (const auto& [method, metric] : order)
    for (const auto& [key, values] : groups)
      if (std::get<0>(key) == method && std::get<1>(key) == metric)
        out.push_back({method, std::get<2>(key), metric, median(values), values.size()});
  return out;
}

void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << "method,grid_value,seed,metric,value\n";
  for (const auto& r : rows) {
    os << r.method << ',';
    write_number(os, r.grid_value);
    os << ',' << r.seed << ',' << r.metric << ',';
    write_number(os, r.value);
    os << '\n';
  }
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << "method,grid_value,metric,median,count\n";
  for (const auto& r : rows) {
    os << r.method << ',';
    write_number(os, r.grid_value);
    os << ',' << r.metric << ',';
    write_number(os, r.median);
    os << ',' << r.count << '\n';
  }
}

}  // namespace rgfi
