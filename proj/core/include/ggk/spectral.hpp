#pragma once

#include <vector>

#include "ggk/markov.hpp"

namespace ggk {

// P(n-step product starting in E is a unit arrow) via the operator:
// mu(E)^{-1} <P^n chi_E, chi_E>.
template <Scalar S>
S return_probability_operator(const MarkovOperator<S>& op, const UnitSet& set, unsigned n) {
  const auto& g = *op.groupoid();
  const Rat mass = unit_set_mass(g, set);
  if (set.empty() || mass.is_zero()) raise(ErrorCode::NullSet, "return set has measure zero");
  const auto chi = L2Vector<S>::chi(op.groupoid(), set);
  auto v = chi;
  for (unsigned k = 0; k < n; ++k) v = op.apply(v);
  return inner_product(v, chi) * ScalarTraits<S>::from_rat(Rat(1) / mass);
}

// The same number through the convolution algebra:
// mu(E)^{-1} sum_{x in E} mu(x) k^{*n}(id_x).
template <Scalar S>
S return_probability_convolution(const Kernel<S>& k, const UnitSet& set, unsigned n) {
  const auto& g = *k.groupoid();
  const Rat mass = unit_set_mass(g, set);
  if (set.empty() || mass.is_zero()) raise(ErrorCode::NullSet, "return set has measure zero");
  const auto p = convolution_power(k, n);
  S sum{};
  for (UnitId x : set) {
    sum += ScalarTraits<S>::from_rat(g.weight(x)) * p.value(g.unit_arrow(x));
  }
  return sum * ScalarTraits<S>::from_rat(Rat(1) / mass);
}

// Atom of the spectral measure of chi_E: total squared eigenvector overlap
// at eigenvalue lambda, weighted by mu(x)/mu(E) per block.
struct SpectralAtom {
  double lambda = 0.0;
  double mass = 0.0;
};

// Eigenvalues within merge_tol are clustered (mass-weighted); sorted ascending.
std::vector<SpectralAtom> spectral_measure_atoms(const MarkovOperator<double>& op,
                                                 const UnitSet& set, double merge_tol = 1e-9);

// Limit of a nondecreasing sequence r_n -> rho, estimated by Aitken
// acceleration on the dyadic subsequence (r_{ceil(L/4)}, r_{ceil(L/2)}, r_L);
// adjacent-term acceleration is ill-conditioned for the exp(c/n)-type decay
// these sequences show. Monotone input floors the estimate at the last term,
// and sequences that never exceed 1 + 1e-12 are capped at 1 + 1e-9.
double extrapolate_growth(const std::vector<double>& r);

struct SpectralOptions {
  unsigned n_max = 64;          // length of the return sequence
  double atom_threshold = 1e-12; // spectral-measure mass below this is noise
  double merge_tol = 1e-9;
  NormOptions norm;
};

struct SpectralReport {
  std::vector<double> r_seq;   // r_n = (mu(E)^{-1} <P^{2n} chi_E, chi_E>)^{1/2n}
  double rho_extrapolated = 0.0;
  double rho_exact = 0.0;      // largest |lambda| carrying spectral-measure mass
  double spectral_gap = 0.0;   // rho_exact minus the next |lambda| with mass
  NormResult op_norm;
  std::vector<SpectralAtom> atoms;
  Rat set_mass;
  bool invariant = false;
  bool monotone_ok = false;
  bool slow_convergence = false; // extrapolation missed rho_exact by > 5e-3
};

// Requires a symmetric probability field on a p.m.p. groupoid and a set of
// positive measure. The return sequence is computed with normalized iterates
// and log-scale accumulation, so it survives n_max steps without underflow.
SpectralReport e_spectral_radius(const Kernel<double>& k, const UnitSet& set,
                                 const SpectralOptions& opts = {});

inline SpectralReport e_spectral_radius(const Kernel<Rat>& k, const UnitSet& set,
                                        const SpectralOptions& opts = {}) {
  return e_spectral_radius(kernel_to_double(k), set, opts);
}

// ---- Kesten-style dichotomy check ----

struct KestenEntry {
  UnitSet set;
  Rat mass;
  double norm = 0.0;
  double certificate_defect = 0.0; // max over units of |fiber mass - 1|
  bool pass = false;
};

struct KestenReport {
  std::vector<KestenEntry> entries;
  std::size_t orbit_count = 0;
  bool exhaustive = false; // every orbit union was enumerated
  bool pass = false;
  double worst_deviation = 0.0; // max |norm - 1|
};

// For a symmetric probability field every restriction to an invariant set of
// positive measure has operator norm exactly 1; this checks that against tol
// over all orbit unions (or orbit-by-orbit plus the full set when there are
// too many orbits to enumerate).
template <Scalar S>
KestenReport kesten_check(const Kernel<S>& k, double tol = 1e-9, const NormOptions& nopts = {}) {
  using T = ScalarTraits<S>;
  const auto& gp = k.groupoid();
  const auto& g = *gp;
  if (!g.is_pmp()) raise(ErrorCode::NotProbabilityMeasure, "groupoid is not p.m.p.");
  if (!k.is_probability_field()) {
    raise(ErrorCode::NotProbabilityMeasure, "kernel is not a probability field");
  }
  if (!k.is_symmetric()) raise(ErrorCode::NonSymmetric, "kernel is not symmetric");

  const auto orb = orbits(g);
  KestenReport rep;
  rep.orbit_count = orb.size();
  rep.exhaustive = orb.size() <= 16;

  std::vector<UnitSet> sets;
  if (rep.exhaustive) {
    for (std::size_t bits = 1; bits < (std::size_t(1) << orb.size()); ++bits) {
      std::vector<UnitId> ids;
      for (std::size_t o = 0; o < orb.size(); ++o) {
        if (bits & (std::size_t(1) << o)) ids.insert(ids.end(), orb[o].begin(), orb[o].end());
      }
      sets.push_back(make_unit_set(std::move(ids)));
    }
  } else {
    sets = orb;
    sets.push_back(full_unit_set(g));
  }

  rep.pass = true;
  for (auto& set : sets) {
    KestenEntry e;
    e.mass = unit_set_mass(g, set);
    if (e.mass.is_zero()) continue;
    auto sub = restrict_groupoid(gp, set);
    auto field = restrict_field(sub, k);
    double defect = 0.0;
    for (UnitId x = 0; x < sub->n_units(); ++x) {
      defect = std::max(defect, std::abs(T::to_dbl(field.target_fiber_sum(x)) - 1.0));
    }
    e.certificate_defect = defect;
    e.norm = operator_norm(MarkovOperator<S>(field), nopts).value;
    e.pass = std::abs(e.norm - 1.0) <= tol;
    rep.worst_deviation = std::max(rep.worst_deviation, std::abs(e.norm - 1.0));
    rep.pass = rep.pass && e.pass;
    e.set = std::move(set);
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

} // namespace ggk
