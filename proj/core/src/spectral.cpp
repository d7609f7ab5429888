#include "ggk/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace ggk {

std::vector<SpectralAtom> spectral_measure_atoms(const MarkovOperator<double>& op,
                                                 const UnitSet& set, double merge_tol) {
  const auto& g = *op.groupoid();
  const Rat mass = unit_set_mass(g, set);
  if (set.empty() || mass.is_zero()) raise(ErrorCode::NullSet, "spectral measure of a null set");

  std::vector<SpectralAtom> raw;
  for (UnitId x : set) {
    const auto m = block_dense(op, x);
    const std::size_t n = m.size();
    Eigen::MatrixXd b(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) b(i, j) = m[i][j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
    const double w = to_double(g.weight(x) / mass);
    const std::size_t pos = op.pos_in_fiber(g.unit_arrow(x));
    for (std::size_t k = 0; k < n; ++k) {
      const double overlap = es.eigenvectors()(pos, k);
      const double atom = w * overlap * overlap;
      if (atom > 0.0) raw.push_back({es.eigenvalues()(k), atom});
    }
  }
  std::sort(raw.begin(), raw.end(),
            [](const SpectralAtom& a, const SpectralAtom& b) { return a.lambda < b.lambda; });

  std::vector<SpectralAtom> merged;
  for (const auto& a : raw) {
    if (!merged.empty() && a.lambda - merged.back().lambda <= merge_tol) {
      auto& m = merged.back();
      m.lambda = (m.lambda * m.mass + a.lambda * a.mass) / (m.mass + a.mass);
      m.mass += a.mass;
    } else {
      merged.push_back(a);
    }
  }
  return merged;
}

double extrapolate_growth(const std::vector<double>& r) {
  if (r.size() < 3) {
    raise(ErrorCode::TooShort, "growth extrapolation needs at least three terms");
  }
  const std::size_t len = r.size();
  const double x0 = r[(len + 3) / 4 - 1];
  const double x1 = r[(len + 1) / 2 - 1];
  const double x2 = r[len - 1];
  const double d1 = x1 - x0;
  const double d2 = x2 - x1;
  const double denom = d2 - d1;
  double value = std::abs(denom) < 1e-15 ? x2 : x2 - d2 * d2 / denom;

  bool monotone = true;
  for (std::size_t i = 1; i < len; ++i) {
    if (r[i] < r[i - 1] - 1e-12) {
      monotone = false;
      break;
    }
  }
  if (monotone) value = std::max(value, x2);
  if (*std::max_element(r.begin(), r.end()) <= 1.0 + 1e-12) {
    value = std::min(value, 1.0 + 1e-9);
  }
  return value;
}

SpectralReport e_spectral_radius(const Kernel<double>& k, const UnitSet& set,
                                 const SpectralOptions& opts) {
  const auto& gp = k.groupoid();
  const auto& g = *gp;
  if (!g.is_pmp()) raise(ErrorCode::NotProbabilityMeasure, "groupoid is not p.m.p.");
  if (!k.is_probability_field()) {
    raise(ErrorCode::NotProbabilityMeasure, "kernel is not a probability field");
  }
  if (!k.is_symmetric()) raise(ErrorCode::NonSymmetric, "kernel is not symmetric");
  SpectralReport rep;
  rep.set_mass = unit_set_mass(g, set);
  if (set.empty() || rep.set_mass.is_zero()) raise(ErrorCode::NullSet, "set has measure zero");
  rep.invariant = is_invariant(g, set);

  MarkovOperator<double> op(k);

  // r_n via normalized iterates: P^n chi_E = (prod c_k) v_n with |v_n| = 1,
  // so r_n = exp((sum log c_k - log mu(E) / 2) / n) never underflows.
  std::vector<double> v(g.n_arrows(), 0.0);
  for (UnitId x : set) v[g.unit_arrow(x)] = 1.0;
  std::vector<double> w;
  const double log_mass = std::log(to_double(rep.set_mass));
  double log_acc = 0.0;
  rep.r_seq.reserve(opts.n_max);
  for (unsigned n = 1; n <= opts.n_max; ++n) {
    op.apply_dense(v, w);
    double c2 = 0.0;
    for (ArrowId a = 0; a < g.n_arrows(); ++a) {
      if (w[a] != 0.0) c2 += to_double(g.weight(g.tgt(a))) * w[a] * w[a];
    }
    if (c2 <= 0.0) {
      rep.r_seq.resize(opts.n_max, 0.0);
      break;
    }
    const double c = std::sqrt(c2);
    log_acc += std::log(c);
    rep.r_seq.push_back(std::exp((log_acc - 0.5 * log_mass) / n));
    for (ArrowId a = 0; a < g.n_arrows(); ++a) v[a] = w[a] / c;
  }

  rep.monotone_ok = true;
  for (std::size_t i = 1; i < rep.r_seq.size(); ++i) {
    if (rep.r_seq[i] < rep.r_seq[i - 1] - 1e-12) {
      rep.monotone_ok = false;
      break;
    }
  }
  rep.rho_extrapolated = extrapolate_growth(rep.r_seq);

  rep.atoms = spectral_measure_atoms(op, set, opts.merge_tol);
  std::vector<double> mags;
  for (const auto& a : rep.atoms) {
    if (a.mass > opts.atom_threshold) mags.push_back(std::abs(a.lambda));
  }
  std::sort(mags.begin(), mags.end(), std::greater<>());
  mags.erase(std::unique(mags.begin(), mags.end(),
                         [&](double a, double b) { return a - b <= opts.merge_tol; }),
             mags.end());
  rep.rho_exact = mags.empty() ? 0.0 : mags[0];
  rep.spectral_gap = mags.size() >= 2 ? mags[0] - mags[1] : rep.rho_exact;
  rep.op_norm = operator_norm(op, opts.norm);
  rep.slow_convergence = std::abs(rep.rho_extrapolated - rep.rho_exact) > 5e-3;
  return rep;
}

} // namespace ggk
