#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "rgfi/graph.hpp"

namespace rgfi {

void PerturbationSpec::validate() const {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw std::invalid_argument("perturbation ratio must lie in [0,1]");
  if (!(weight_sigma >= 0.0)) throw std::invalid_argument("weight_sigma must be non-negative");
}

namespace {

// Candidate slots: off-diagonal entries, upper triangle only when symmetric.
std::vector<Link> slots(const Matrix& s, bool symmetric, bool present) {
  std::vector<Link> out;
  const Index n = s.rows();
  for (Index i = 0; i < n; ++i)
    for (Index j = symmetric ? i + 1 : 0; j < n; ++j)
      if (i != j && ((s(i, j) != 0.0) == present)) out.emplace_back(i, j);
  return out;
}

std::vector<Link> sample(std::vector<Link> pool, Index count, std::mt19937_64& rng, const char* what) {
  if (count > static_cast<Index>(pool.size()))
    throw std::invalid_argument(std::string("perturbation asks for more ") + what + " than available");
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(static_cast<std::size_t>(count));
  std::sort(pool.begin(), pool.end());
  return pool;
}

void set_link(Matrix& s, const Link& l, double w, bool symmetric) {
  s(l.first, l.second) = w;
  if (symmetric) s(l.second, l.first) = w;
}

}  // namespace

PerturbationResult perturb_detailed(const Gso& gso, const PerturbationSpec& spec) {
  spec.validate();
  if (gso.family() != GsoFamily::Adjacency)
    throw std::invalid_argument("perturbations are defined on adjacency-family operators");
  const bool sym = gso.symmetric();
  const Matrix& s = gso.matrix();
  Matrix out = s;
  std::mt19937_64 rng(spec.seed);

  const std::vector<Link> existing = slots(s, sym, true);
  const Index budget = static_cast<Index>(std::llround(spec.ratio * static_cast<double>(existing.size())));

  std::vector<double> weights;
  for (const auto& l : existing) weights.push_back(s(l.first, l.second));

  Index n_create = 0, n_destroy = 0, n_noise = 0;
  switch (spec.kind) {
    case PerturbationKind::Create: n_create = budget; break;
    case PerturbationKind::Destroy: n_destroy = budget; break;
    case PerturbationKind::CreateDestroy:
    case PerturbationKind::Mixed:
      n_create = budget / 2;
      n_destroy = budget - n_create;
      break;
    case PerturbationKind::WeightNoise: n_noise = budget; break;
  }

  PerturbationResult res{gso, {}, {}};
  if (n_create > 0) {
    if (weights.empty()) throw std::invalid_argument("cannot draw creation weights from an empty graph");
    res.created = sample(slots(s, sym, false), n_create, rng, "link creations");
    std::uniform_int_distribution<std::size_t> pick(0, weights.size() - 1);
    for (const auto& l : res.created) set_link(out, l, weights[pick(rng)], sym);
  }
  if (n_destroy > 0) {
    res.destroyed = sample(existing, n_destroy, rng, "link destructions");
    for (const auto& l : res.destroyed) set_link(out, l, 0.0, sym);
  }

  std::vector<Link> noisy;
  if (spec.kind == PerturbationKind::WeightNoise) {
    noisy = sample(existing, n_noise, rng, "noisy links");
  } else if (spec.kind == PerturbationKind::Mixed) {
    for (const auto& l : existing)
      if (!std::binary_search(res.destroyed.begin(), res.destroyed.end(), l)) noisy.push_back(l);
  }
  if (!noisy.empty() && spec.weight_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, spec.weight_sigma);
    // reflected at zero
    for (const auto& l : noisy) set_link(out, l, std::abs(out(l.first, l.second) + noise(rng)), sym);
  }

  res.perturbed = Gso(std::move(out), GsoFamily::Adjacency, sym);
  return res;
}

Gso destroy_links(const Gso& gso, const std::vector<Link>& links) {
  Matrix out = gso.matrix();
  for (const auto& l : links) set_link(out, l, 0.0, gso.symmetric());
  return Gso(std::move(out), gso.family(), gso.symmetric());
}

}  // namespace rgfi
