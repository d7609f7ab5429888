#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "ggk/kernel.hpp"
#include "ggk/parallel.hpp"
#include "ggk/rng.hpp"

namespace ggk {

// One sampled trajectory: arrows h_1..h_n composed onto the start unit's
// identity; the walk returns when the product is that identity again.
struct WalkSample {
  UnitId start = 0;
  std::vector<ArrowId> path;
  ArrowId product = kInvalidArrow;
  bool returned = false;
};

struct WalkEstimate {
  double p_hat = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
  std::size_t returns = 0;
  unsigned steps = 0;
  std::uint64_t seed = 0;
};

namespace detail {

template <Scalar S>
struct WalkPlan {
  const FiniteGroupoid* g = nullptr;
  std::vector<std::vector<std::pair<ArrowId, S>>> by_tgt;
  std::vector<UnitId> start_units;
  std::vector<Rat> start_cum; // cumulative mu(x) / mu(E), exact
};

template <Scalar S>
WalkPlan<S> make_walk_plan(const Kernel<S>& k, const UnitSet& set) {
  if (!k.is_probability_field()) {
    raise(ErrorCode::NotProbabilityMeasure, "walks need a probability field");
  }
  const auto& g = *k.groupoid();
  const Rat mass = unit_set_mass(g, set);
  if (set.empty() || mass.is_zero()) raise(ErrorCode::NullSet, "start set has measure zero");
  WalkPlan<S> plan;
  plan.g = &g;
  plan.by_tgt.resize(g.n_units());
  for (const auto& [h, v] : k.values().entries()) plan.by_tgt[g.tgt(h)].emplace_back(h, v);
  Rat cum(0);
  for (UnitId x : set) {
    cum += g.weight(x) / mass;
    plan.start_units.push_back(x);
    plan.start_cum.push_back(cum);
  }
  return plan;
}

inline Rat u53_to_rat(std::uint64_t bits) {
  return Rat(BigInt(bits), BigInt(1) << 53);
}

template <Scalar S>
WalkSample run_walk(const WalkPlan<S>& plan, unsigned steps, SplitMix64& rng, bool keep_path) {
  using T = ScalarTraits<S>;
  WalkSample out;
  const Rat u0 = u53_to_rat(rng.next_u53());
  std::size_t lo = 0;
  while (lo + 1 < plan.start_cum.size() && !(u0 < plan.start_cum[lo])) ++lo;
  out.start = plan.start_units[lo];

  ArrowId prod = plan.g->unit_arrow(out.start);
  if (keep_path) out.path.reserve(steps);
  for (unsigned s = 0; s < steps; ++s) {
    const auto& support = plan.by_tgt[plan.g->src(prod)];
    const std::uint64_t bits = rng.next_u53();
    ArrowId pick = support.back().first;
    if constexpr (T::exact) {
      const Rat u = u53_to_rat(bits);
      Rat cum(0);
      for (const auto& [h, v] : support) {
        cum += T::real_part(v);
        if (u < cum) {
          pick = h;
          break;
        }
      }
    } else {
      const double u = static_cast<double>(bits) * 0x1.0p-53;
      double cum = 0.0;
      for (const auto& [h, v] : support) {
        cum += T::real_part(v);
        if (u < cum) {
          pick = h;
          break;
        }
      }
    }
    if (keep_path) out.path.push_back(pick);
    prod = plan.g->compose(prod, pick);
  }
  out.product = prod;
  out.returned = prod == plan.g->unit_arrow(out.start);
  return out;
}

} // namespace detail

// The sample with the given index, drawn from its own counter stream; the
// result is a pure function of (kernel, set, steps, seed, index).
template <Scalar S>
WalkSample sample_walk(const Kernel<S>& k, const UnitSet& set, unsigned steps, std::uint64_t seed,
                       std::uint64_t index) {
  const auto plan = detail::make_walk_plan(k, set);
  auto rng = counter_stream(seed, index);
  return detail::run_walk(plan, steps, rng, true);
}

// Monte Carlo estimate of the n-step return probability from the set. Every
// sample uses the stream of its own index, so the estimate is bitwise
// independent of the worker count.
template <Scalar S>
WalkEstimate estimate_return(const Kernel<S>& k, const UnitSet& set, unsigned steps,
                             std::size_t samples, std::uint64_t seed, int threads = 0) {
  const auto plan = detail::make_walk_plan(k, set);
  constexpr std::size_t kChunk = 8192;
  const std::size_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<std::size_t> hits(chunks, 0);
  parallel_for(chunks, threads, [&](std::size_t c) {
    const std::size_t begin = c * kChunk;
    const std::size_t end = std::min(samples, begin + kChunk);
    std::size_t count = 0;
    for (std::size_t i = begin; i < end; ++i) {
      auto rng = counter_stream(seed, i);
      if (detail::run_walk(plan, steps, rng, false).returned) ++count;
    }
    hits[c] = count;
  });
  WalkEstimate est;
  est.samples = samples;
  est.steps = steps;
  est.seed = seed;
  for (std::size_t c = 0; c < chunks; ++c) est.returns += hits[c];
  est.p_hat = samples ? double(est.returns) / double(samples) : 0.0;
  est.std_error = samples ? std::sqrt(est.p_hat * (1.0 - est.p_hat) / double(samples)) : 0.0;
  return est;
}

} // namespace ggk
