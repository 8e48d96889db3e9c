// Wall-clock comparison of the OpenMP kernels against their serial
// references, and of the two robust solvers.
//
//   rgfi_bench [--sizes 10,20,40] [--reps 3] [--solvers]

#include <chrono>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <omp.h>

#include "rgfi/efficient.hpp"
#include "rgfi/experiments.hpp"
#include "rgfi/kernels.hpp"

namespace {

using Clock = std::chrono::steady_clock;

template <class F>
double best_ms(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    f();
    best = std::min(best, std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rgfi kernel and solver benchmark"};
  std::vector<long> sizes{10, 20, 30};
  int reps = 3;
  bool solvers = false;
  app.add_option("--sizes", sizes, "node counts")->delimiter(',');
  app.add_option("--reps", reps, "repetitions (best time is reported)");
  app.add_flag("--solvers", solvers, "also time the standard and efficient solvers");
  CLI11_PARSE(app, argc, argv);

  std::cout << "# threads " << omp_get_max_threads() << '\n';
  std::cout << "benchmark,n,variant,ms,max_abs_diff\n" << std::setprecision(6);
  for (const long n : sizes) {
    const rgfi::Gso s = rgfi::generate_er(n, 0.2, true, 7);
    const rgfi::Matrix x = rgfi::Matrix::Random(n, 2 * n);
    const rgfi::Matrix gram = x * x.transpose();
    const rgfi::kernels::CommuteTerm term{&s.matrix(), 1.0};
    const std::span<const rgfi::kernels::CommuteTerm> terms(&term, 1);

    rgfi::Matrix par, ser;
    const double t_par = best_ms(reps, [&] { par = rgfi::kernels::assemble_step1_system(gram, terms); });
    const double t_ser = best_ms(reps, [&] { ser = rgfi::reference::assemble_step1_system(gram, terms); });
    const double diff = (par - ser).cwiseAbs().maxCoeff();
    std::cout << "assemble_step1," << n << ",openmp," << t_par << ',' << diff << '\n';
    std::cout << "assemble_step1," << n << ",serial_kron," << t_ser << ',' << diff << '\n';

    std::vector<double> out_par(64), out_ser(64);
    auto body = [&](std::vector<double>& out) {
      return [&](std::size_t i) {
        const rgfi::Vector h = rgfi::draw_filter_coeffs(s.matrix(), 4, i);
        out[i] = rgfi::build_filter(s, h).matrix->norm();
      };
    };
    const double f_par = best_ms(reps, [&] { rgfi::kernels::parallel_for(out_par.size(), body(out_par)); });
    const double f_ser = best_ms(reps, [&] { rgfi::reference::serial_for(out_ser.size(), body(out_ser)); });
    double fdiff = 0.0;
    for (std::size_t i = 0; i < out_par.size(); ++i) fdiff = std::max(fdiff, std::abs(out_par[i] - out_ser[i]));
    std::cout << "filter_batch," << n << ",openmp," << f_par << ',' << fdiff << '\n';
    std::cout << "filter_batch," << n << ",serial," << f_ser << ',' << fdiff << '\n';

    if (solvers) {
      const rgfi::Vector h = rgfi::draw_filter_coeffs(s.matrix(), 4, 11);
      const auto sig = rgfi::synthesize_signals(rgfi::build_filter(s, h), 50, 0.05,
                                                rgfi::InputDistribution::GaussianWhite, 12);
      rgfi::PerturbationSpec ps;
      ps.ratio = 0.1;
      ps.seed = 13;
      const rgfi::Gso sbar = rgfi::perturb(s, ps);
      rgfi::EfficientConfig cfg;
      cfg.base.t_max = 5;
      rgfi::Matrix ha, hb;
      const double t_std = best_ms(1, [&] { ha = rgfi::rfi_alternating(sig.x, sig.y, sbar, cfg.base).h_hat; });
      const double t_eff = best_ms(1, [&] { hb = rgfi::efficient_rfi(sig.x, sig.y, sbar, cfg).h_hat; });
      const rgfi::Matrix htrue = *rgfi::build_filter(s, h).matrix;
      // last column: nerr of the identified filter
      std::cout << "solver," << n << ",standard," << t_std << ',' << rgfi::nerr(ha, htrue) << '\n';
      std::cout << "solver," << n << ",efficient," << t_eff << ',' << rgfi::nerr(hb, htrue) << '\n';
    }
  }
  return 0;
}
