#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "ggk/kernel.hpp"

namespace ggk {

// Sparse vector on the arrow space with the weighted inner product
// <xi, eta> = sum_g mu(tgt g) xi(g) conj(eta(g)).
template <Scalar S>
class L2Vector {
public:
  L2Vector(GroupoidPtr g, SparseArrowMap<S> values)
      : g_(std::move(g)), values_(std::move(values)) {}

  static L2Vector chi(const GroupoidPtr& g, const UnitSet& set) {
    std::vector<std::pair<ArrowId, S>> vals;
    vals.reserve(set.size());
    for (UnitId x : set) vals.emplace_back(g->unit_arrow(x), ScalarTraits<S>::from_rat(Rat(1)));
    return L2Vector(g, SparseArrowMap<S>::from_unsorted(std::move(vals)));
  }

  const GroupoidPtr& groupoid() const { return g_; }
  const SparseArrowMap<S>& values() const { return values_; }

private:
  GroupoidPtr g_;
  SparseArrowMap<S> values_;
};

template <Scalar S>
S inner_product(const L2Vector<S>& a, const L2Vector<S>& b) {
  detail::require_same(a.groupoid(), b.groupoid());
  using T = ScalarTraits<S>;
  const auto& g = *a.groupoid();
  S total{};
  const auto& ea = a.values().entries();
  const auto& eb = b.values().entries();
  std::size_t i = 0, j = 0;
  while (i < ea.size() && j < eb.size()) {
    if (ea[i].first < eb[j].first) {
      ++i;
    } else if (eb[j].first < ea[i].first) {
      ++j;
    } else {
      total += ea[i].second * T::conj(eb[j].second) * T::from_rat(g.weight(g.tgt(ea[i].first)));
      ++i;
      ++j;
    }
  }
  return total;
}

template <Scalar S>
typename ScalarTraits<S>::AbsSq norm_squared(const L2Vector<S>& v) {
  using T = ScalarTraits<S>;
  using Q = typename T::AbsSq;
  const auto& g = *v.groupoid();
  Q total{};
  for (const auto& [id, val] : v.values().entries()) {
    if constexpr (std::is_same_v<Q, Rat>) {
      total += g.weight(g.tgt(id)) * T::abs_sq(val);
    } else {
      total += to_double(g.weight(g.tgt(id))) * T::abs_sq(val);
    }
  }
  return total;
}

// The operator of a kernel k acts fiberwise: (P xi)(g) = sum over h with
// tgt(h) = src(g) of k(h) xi(gh). On the target fiber of each unit it is the
// matrix B[i][j] = k(g_i^{-1} g_j) (fiber arrows in ascending id order), so
// the operator is block diagonal and Hermitian exactly when k is symmetric.
template <Scalar S>
class MarkovOperator {
public:
  struct Block {
    std::vector<std::size_t> col_ptr; // fiber-indexed CSC
    std::vector<std::uint32_t> row_idx;
    std::vector<S> vals;
  };

  explicit MarkovOperator(const Kernel<S>& k) : g_(k.groupoid()), hermitian_(k.is_symmetric()) {
    const auto& g = *g_;
    pos_in_fiber_.resize(g.n_arrows());
    for (UnitId x = 0; x < g.n_units(); ++x) {
      const auto& fiber = g.target_fiber(x);
      for (std::uint32_t i = 0; i < fiber.size(); ++i) pos_in_fiber_[fiber[i]] = i;
    }
    std::vector<std::vector<std::pair<ArrowId, S>>> by_tgt(g.n_units());
    for (const auto& [h, v] : k.values().entries()) by_tgt[g.tgt(h)].emplace_back(h, v);

    blocks_.resize(g.n_units());
    std::vector<std::uint64_t> keys; // (col << 32) | row, sorted per block
    std::vector<S> tvals;
    for (UnitId x = 0; x < g.n_units(); ++x) {
      const auto& fiber = g.target_fiber(x);
      keys.clear();
      tvals.clear();
      for (std::uint32_t i = 0; i < fiber.size(); ++i) {
        for (const auto& [h, v] : by_tgt[g.src(fiber[i])]) {
          const std::uint32_t j = pos_in_fiber_[g.compose(fiber[i], h)];
          keys.push_back((std::uint64_t(j) << 32) | i);
          tvals.push_back(v);
        }
      }
      std::vector<std::size_t> order(keys.size());
      for (std::size_t t = 0; t < order.size(); ++t) order[t] = t;
      std::sort(order.begin(), order.end(),
                [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
      Block& blk = blocks_[x];
      blk.col_ptr.assign(fiber.size() + 1, 0);
      blk.row_idx.reserve(keys.size());
      blk.vals.reserve(keys.size());
      for (std::size_t t : order) {
        blk.row_idx.push_back(static_cast<std::uint32_t>(keys[t] & 0xffffffffu));
        blk.vals.push_back(tvals[t]);
        ++blk.col_ptr[(keys[t] >> 32) + 1];
      }
      for (std::size_t c = 0; c + 1 < blk.col_ptr.size(); ++c) blk.col_ptr[c + 1] += blk.col_ptr[c];
    }
  }

  const GroupoidPtr& groupoid() const { return g_; }
  bool hermitian() const { return hermitian_; }
  const Block& block(UnitId x) const { return blocks_[x]; }
  std::size_t n_blocks() const { return blocks_.size(); }
  std::uint32_t pos_in_fiber(ArrowId a) const { return pos_in_fiber_[a]; }

  // Blocks up to equality: on a pair-relation groupoid every block of a class
  // is the same matrix, so norm work only needs one per class.
  std::vector<UnitId> representative_blocks() const {
    if (const auto* pb = std::get_if<backend::PairBlocks>(&g_->compose_backend())) {
      std::vector<UnitId> reps;
      reps.reserve(pb->members.size());
      for (const auto& cls : pb->members) reps.push_back(cls.front());
      return reps;
    }
    std::vector<UnitId> reps(g_->n_units());
    for (UnitId x = 0; x < reps.size(); ++x) reps[x] = x;
    return reps;
  }

  L2Vector<S> apply(const L2Vector<S>& v) const {
    detail::require_same(g_, v.groupoid());
    std::vector<std::pair<ArrowId, S>> out;
    for (const auto& [a, val] : v.values().entries()) {
      const auto& fiber = g_->target_fiber(g_->tgt(a));
      const Block& blk = blocks_[g_->tgt(a)];
      const std::uint32_t j = pos_in_fiber_[a];
      for (std::size_t t = blk.col_ptr[j]; t < blk.col_ptr[j + 1]; ++t) {
        out.emplace_back(fiber[blk.row_idx[t]], blk.vals[t] * val);
      }
    }
    return L2Vector<S>(g_, SparseArrowMap<S>::from_unsorted(std::move(out)));
  }

  // in/out are indexed by arrow id; out is overwritten.
  void apply_dense(const std::vector<S>& in, std::vector<S>& out) const {
    out.assign(g_->n_arrows(), S{});
    for (UnitId x = 0; x < g_->n_units(); ++x) {
      const auto& fiber = g_->target_fiber(x);
      const Block& blk = blocks_[x];
      for (std::size_t j = 0; j < fiber.size(); ++j) {
        const S v = in[fiber[j]];
        if (ScalarTraits<S>::is_zero(v)) continue;
        for (std::size_t t = blk.col_ptr[j]; t < blk.col_ptr[j + 1]; ++t) {
          out[fiber[blk.row_idx[t]]] += blk.vals[t] * v;
        }
      }
    }
  }

private:
  GroupoidPtr g_;
  std::vector<Block> blocks_;
  std::vector<std::uint32_t> pos_in_fiber_;
  bool hermitian_ = false;
};

template <Scalar S>
std::vector<std::vector<S>> block_dense(const MarkovOperator<S>& op, UnitId x) {
  const auto& fiber = op.groupoid()->target_fiber(x);
  const auto& blk = op.block(x);
  std::vector<std::vector<S>> m(fiber.size(), std::vector<S>(fiber.size(), S{}));
  for (std::size_t j = 0; j < fiber.size(); ++j) {
    for (std::size_t t = blk.col_ptr[j]; t < blk.col_ptr[j + 1]; ++t) {
      m[blk.row_idx[t]][j] = blk.vals[t];
    }
  }
  return m;
}

// max |B[i][j] - conj(B[j][i])| over all blocks, as a double.
template <Scalar S>
double self_adjointness_defect(const MarkovOperator<S>& op) {
  using T = ScalarTraits<S>;
  double worst = 0.0;
  for (UnitId x : op.representative_blocks()) {
    const auto m = block_dense(op, x);
    for (std::size_t i = 0; i < m.size(); ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        const double d = magnitude_as_double<S>(T::abs(m[i][j] - T::conj(m[j][i])));
        if (d > worst) worst = d;
      }
    }
  }
  return worst;
}

template <Scalar S>
bool operator_equal(const MarkovOperator<S>& a, const MarkovOperator<S>& b, double tol = 0.0) {
  using T = ScalarTraits<S>;
  if (a.groupoid().get() != b.groupoid().get()) return false;
  for (UnitId x = 0; x < a.n_blocks(); ++x) {
    const auto ma = block_dense(a, x);
    const auto mb = block_dense(b, x);
    for (std::size_t i = 0; i < ma.size(); ++i) {
      for (std::size_t j = 0; j < ma.size(); ++j) {
        const S d = ma[i][j] - mb[i][j];
        if constexpr (T::exact) {
          if (!T::is_zero(d)) return false;
        } else {
          if (magnitude_as_double<S>(T::abs(d)) > tol) return false;
        }
      }
    }
  }
  return true;
}

// Whether A * B = C blockwise (dense product per block).
template <Scalar S>
bool product_matches(const MarkovOperator<S>& a, const MarkovOperator<S>& b,
                     const MarkovOperator<S>& c, double tol = 0.0) {
  using T = ScalarTraits<S>;
  if (a.groupoid().get() != b.groupoid().get() || a.groupoid().get() != c.groupoid().get()) {
    return false;
  }
  for (UnitId x = 0; x < a.n_blocks(); ++x) {
    const auto ma = block_dense(a, x);
    const auto mb = block_dense(b, x);
    const auto mc = block_dense(c, x);
    const std::size_t n = ma.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        S sum{};
        for (std::size_t k = 0; k < n; ++k) sum += ma[i][k] * mb[k][j];
        const S d = sum - mc[i][j];
        if constexpr (T::exact) {
          if (!T::is_zero(d)) return false;
        } else {
          if (magnitude_as_double<S>(T::abs(d)) > tol) return false;
        }
      }
    }
  }
  return true;
}

struct NormOptions {
  std::size_t dense_cap = 2048; // largest fiber handled by the dense solver
  double tol = 1e-10;           // stabilization target for the iterative path
  std::size_t max_iter = 6000;
  bool throw_on_failure = true; // NoConvergence instead of converged=false
};

struct NormResult {
  double value = 0.0;
  double residual = 0.0; // 0 for the dense path
  std::size_t iterations = 0;
  bool converged = true;
  std::string method; // "dense-eig", "dense-svd", "lanczos", "power-ata"
};

namespace detail {
NormResult dense_norm_real(const std::vector<double>& flat, std::size_t n, bool hermitian);
NormResult dense_norm_cplx(const std::vector<std::complex<double>>& flat, std::size_t n,
                           bool hermitian);
} // namespace detail

// ---- raw sparse matrices (shared by the free-group ball) ----

struct CsrMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr;
  std::vector<std::uint32_t> col_idx;
  std::vector<double> vals;
};

std::vector<double> csr_apply(const CsrMatrix& m, const std::vector<double>& x);

NormResult csr_norm_dense(const CsrMatrix& m, bool hermitian);
// Lanczos for Hermitian input, power iteration on A^T A otherwise.
NormResult csr_norm_iterative(const CsrMatrix& m, bool hermitian, const NormOptions& opts = {});
NormResult csr_norm(const CsrMatrix& m, bool hermitian, const NormOptions& opts = {});

// Operator norm on the weighted l2 space = max over blocks of the block's
// matrix 2-norm (weights are constant within a block and cancel).
template <Scalar S>
NormResult operator_norm(const MarkovOperator<S>& op, const NormOptions& opts = {}) {
  using T = ScalarTraits<S>;
  NormResult best;
  best.method = "dense-eig";
  for (UnitId x : op.representative_blocks()) {
    const auto& fiber = op.groupoid()->target_fiber(x);
    const auto& blk = op.block(x);
    const std::size_t n = fiber.size();
    NormResult r;
    if (n <= opts.dense_cap) {
      if constexpr (T::complex_valued) {
        std::vector<std::complex<double>> flat(n * n, std::complex<double>{});
        for (std::size_t j = 0; j < n; ++j) {
          for (std::size_t t = blk.col_ptr[j]; t < blk.col_ptr[j + 1]; ++t) {
            flat[blk.row_idx[t] * n + j] = T::to_cdbl(blk.vals[t]);
          }
        }
        r = detail::dense_norm_cplx(flat, n, op.hermitian());
      } else {
        std::vector<double> flat(n * n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
          for (std::size_t t = blk.col_ptr[j]; t < blk.col_ptr[j + 1]; ++t) {
            flat[blk.row_idx[t] * n + j] = T::to_dbl(blk.vals[t]);
          }
        }
        r = detail::dense_norm_real(flat, n, op.hermitian());
      }
    } else if constexpr (!T::complex_valued) {
      // CSC of B is the CSR of B^T, and norms of B and B^T agree.
      CsrMatrix t;
      t.rows = t.cols = n;
      t.row_ptr = blk.col_ptr;
      t.col_idx = blk.row_idx;
      t.vals.reserve(blk.vals.size());
      for (const S& v : blk.vals) t.vals.push_back(T::to_dbl(v));
      NormOptions local = opts;
      local.throw_on_failure = false;
      r = csr_norm_iterative(t, op.hermitian(), local);
    } else {
      raise(ErrorCode::Unsupported, "complex fiber larger than the dense solver cap");
    }
    if (r.value > best.value) {
      best.value = r.value;
      best.method = r.method;
      best.residual = r.residual;
    }
    best.iterations += r.iterations;
    best.converged = best.converged && r.converged;
  }
  if (!best.converged && opts.throw_on_failure) {
    throw NoConvergence("operator norm did not stabilize", best.value,
                        static_cast<long>(best.iterations));
  }
  return best;
}

struct SandwichReport {
  double l2_norm = 0.0; // sqrt of the weighted l2 mass of the kernel
  NormResult op_norm;
  double i_norm = 0.0;

  bool ordered(double tol) const {
    return l2_norm <= op_norm.value + tol && op_norm.value <= i_norm + tol;
  }
};

template <Scalar S>
SandwichReport norm_sandwich_report(const Kernel<S>& k, const NormOptions& opts = {}) {
  SandwichReport rep;
  rep.l2_norm = std::sqrt(static_cast<double>([&] {
    if constexpr (std::is_same_v<typename ScalarTraits<S>::AbsSq, Rat>) {
      return to_double(l2_norm_squared(k));
    } else {
      return l2_norm_squared(k);
    }
  }()));
  rep.op_norm = operator_norm(MarkovOperator<S>(k), opts);
  rep.i_norm = magnitude_as_double<S>(i_norm(k));
  return rep;
}

} // namespace ggk
