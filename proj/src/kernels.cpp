#include "rgfi/kernels.hpp"

#include <algorithm>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rgfi::kernels {

int threads_for(std::size_t work) {
#ifdef _OPENMP
  const auto procs = static_cast<std::size_t>(omp_get_max_threads());
  return static_cast<int>(std::max<std::size_t>(1, std::min(procs, work)));
#else
  (void)work;
  return 1;
#endif
}

Matrix assemble_step1_system(const Matrix& gram, std::span<const CommuteTerm> terms) {
  const Index n = gram.rows();
  const Index nn = n * n;
  std::vector<Matrix> bbt, btb;
  for (const auto& t : terms) {
    bbt.push_back(*t.b * t.b->transpose());
    btb.push_back(t.b->transpose() * *t.b);
  }
  Matrix a(nn, nn);
  // column (p', q') of the system, row (p, q); vec index p + q n
#pragma omp parallel for schedule(static) num_threads(threads_for(static_cast<std::size_t>(n)))
  for (Index qc = 0; qc < n; ++qc) {
    for (Index pc = 0; pc < n; ++pc) {
      const Index col = pc + qc * n;
      for (Index q = 0; q < n; ++q) {
        for (Index p = 0; p < n; ++p) {
          double v = (p == pc) ? gram(q, qc) : 0.0;
          for (std::size_t k = 0; k < terms.size(); ++k) {
            const Matrix& b = *terms[k].b;
            double t = -b(qc, q) * b(pc, p) - b(q, qc) * b(p, pc);
            if (p == pc) t += bbt[k](q, qc);
            if (q == qc) t += btb[k](p, pc);
            v += terms[k].weight * t;
          }
          a(p + q * n, col) = v;
        }
      }
    }
  }
  return a;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  std::exception_ptr first;
  std::mutex guard;
  const auto total = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads_for(count))
  for (long long i = 0; i < total; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(guard);
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
}

}  // namespace rgfi::kernels
