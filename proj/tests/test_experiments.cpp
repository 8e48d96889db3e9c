#include <doctest.h>

#include <set>
#include <sstream>

#include "rgfi/experiments.hpp"

using namespace rgfi;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::stringstream ss(text);
  config::KeyValues kv = config::KeyValues::parse(ss);
  return read_experiment_config(kv);
}

std::string run_csv(const ExperimentConfig& c) {
  const ExperimentOutput out = run_experiment(c);
  std::stringstream ss;
  write_results_csv(ss, out.results);
  write_summary_csv(ss, summarize(out.results));
  return ss.str();
}

}  // namespace

TEST_CASE("experiment ids and perturbation names") {
  for (auto id : {ExperimentId::FilterOrder, ExperimentId::PerturbationType, ExperimentId::BaselineCompare,
                  ExperimentId::Efficiency, ExperimentId::JointK, ExperimentId::ArForecast})
    CHECK(parse_experiment_id(to_string(id)) == id);
  CHECK_THROWS(parse_experiment_id("nope"));
  CHECK(short_name(parse_perturbation_kind("create_destroy")) == "CD");
  CHECK(short_name(parse_perturbation_kind("destroy")) == "D");
}

TEST_CASE("experiment config parsing") {
  const ExperimentConfig c = parse("experiment = filter_order\ngrid = 2,3\nrealizations = 3\nlambda = 0.2\n");
  CHECK(c.id == ExperimentId::FilterOrder);
  CHECK(c.grid == std::vector<double>{2, 3});
  CHECK(c.solver.base.lambda == 0.2);
  CHECK(c.solver.base.filter_order == c.filter_order);
  CHECK(parse("experiment = joint_k\nrecover_order = 2\n").solver.base.filter_order == 2);
  CHECK_THROWS(parse("grid = 1\n"));
  CHECK_THROWS(parse("experiment = filter_order\nunknown_key = 1\n"));
  CHECK_THROWS(parse("experiment = filter_order\ngrid = 2.5\n"));
  CHECK_THROWS(parse("experiment = baseline_compare\ngrid = 1.5\n"));
  CHECK_THROWS(parse("experiment = baseline_compare\nrealizations = 0\n"));
  CHECK_THROWS(parse("experiment = baseline_compare\nl1_scale = 0\n"));
}

TEST_CASE("derived seeds are distinct and stable") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 50; ++s)
    for (std::uint64_t k = 0; k < 6; ++k) seen.insert(derive_seed(s, k));
  CHECK(seen.size() == 300);
  CHECK(derive_seed(3, 4) == derive_seed(3, 4));
}

TEST_CASE("median and summary") {
  CHECK(median({3, 1, 2}) == 2.0);
  CHECK(median({4, 1, 2, 3}) == 2.5);
  CHECK_THROWS(median({}));
  std::vector<ResultRow> rows{{"A", 1, 1, "m", 1.0}, {"A", 1, 2, "m", 3.0}, {"A", 2, 1, "m", 5.0}};
  const auto sum = summarize(rows);
  REQUIRE(sum.size() == 2);
  CHECK(sum[0].median == 2.0);
  CHECK(sum[0].count == 2);
  std::stringstream ss;
  write_summary_csv(ss, sum);
  CHECK(ss.str().rfind("method,grid_value,metric,median,count\n", 0) == 0);
}

TEST_CASE("filter coefficients") {
  Matrix s = Matrix::Zero(3, 3);
  s(0, 1) = s(1, 0) = s(1, 2) = s(2, 1) = 2.0;
  const Vector a = draw_filter_coeffs(s, 3, 5, false);
  const Vector b = draw_filter_coeffs(s, 3, 5, true);
  CHECK((a.array().abs() <= 1.0).all());
  const double rho = 2.0 * std::sqrt(2.0);
  CHECK(b(2) == doctest::Approx(a(2) / (rho * rho)));
}

TEST_CASE("every experiment runs and is deterministic") {
  const std::vector<std::string> configs{
      "experiment = filter_order\ngrid = 2,3\nn = 10\nm = 30\n",
      "experiment = perturbation_type\ngrid = 0.1\nn = 10\nmethods = Sbar,FI,RFI,RFI-l1\n",
      "experiment = baseline_compare\ngrid = 0.1\nn = 10\nmethods = Sbar,FI,LS,LS-GF,RFI,RFI-l1,RFI-st,Eff-RFI\n",
      "experiment = efficiency\ngrid = 6,8\nmethods = RFI,Eff-RFI\n",
      "experiment = joint_k\ngrid = 1,2\nn = 10\nmethods = RFI-J,RFI-l1-J,RFI,RFI-l1,RFI-st\n",
      "experiment = ar_forecast\ngrid = 1,2\nn = 8\nseries_length = 60\n"};
  for (const auto& text : configs) {
    ExperimentConfig c = parse(text + "realizations = 2\nt_max = 3\n");
    const std::string a = run_csv(c);
    const std::string b = run_csv(c);
    CHECK(a == b);
    CHECK(a.rfind("method,grid_value,seed,metric,value\n", 0) == 0);
    CHECK(a.find("nan") == std::string::npos);
    c.seed += 100;
    CHECK(run_csv(c) != a);
  }
}

TEST_CASE("realizations are independent of the grid") {
  // common random numbers: the Sbar error at one ratio does not depend on the other grid values
  const ExperimentConfig one = parse("experiment = baseline_compare\ngrid = 0.1\nmethods = Sbar\nrealizations = 4\n");
  const ExperimentConfig two = parse("experiment = baseline_compare\ngrid = 0.05,0.1\nmethods = Sbar\nrealizations = 4\n");
  const auto a = run_experiment(one).results;
  auto b = run_experiment(two).results;
  std::erase_if(b, [](const ResultRow& r) { return r.grid_value != 0.1; });
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].value == b[i].value);
}
