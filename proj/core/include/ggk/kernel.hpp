#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "ggk/groupoid.hpp"
#include "ggk/scalar.hpp"

namespace ggk {

inline constexpr double kFieldTol = 1e-12;

// Sorted, zero-free sparse map arrow -> value.
template <Scalar S>
class SparseArrowMap {
public:
  SparseArrowMap() = default;

  static SparseArrowMap from_unsorted(std::vector<std::pair<ArrowId, S>> raw) {
    std::sort(raw.begin(), raw.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    SparseArrowMap out;
    out.entries_.reserve(raw.size());
    for (auto& [id, v] : raw) {
      if (!out.entries_.empty() && out.entries_.back().first == id) {
        out.entries_.back().second += v;
      } else {
        out.entries_.emplace_back(id, std::move(v));
      }
    }
    out.drop_zeros();
    return out;
  }

  const std::vector<std::pair<ArrowId, S>>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  S at(ArrowId id) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                               [](const auto& e, ArrowId key) { return e.first < key; });
    if (it != entries_.end() && it->first == id) return it->second;
    return S{};
  }

private:
  void drop_zeros() {
    entries_.erase(std::remove_if(entries_.begin(), entries_.end(),
                                  [](const auto& e) { return ScalarTraits<S>::is_zero(e.second); }),
                   entries_.end());
  }
  std::vector<std::pair<ArrowId, S>> entries_;
};

// A finitely supported kernel on the arrow space. Probability fields are the
// kernels with nonnegative real values whose target-fiber masses all equal 1;
// symmetric means k(g^{-1}) = conj(k(g)).
template <Scalar S>
class Kernel {
public:
  Kernel(GroupoidPtr g, SparseArrowMap<S> values, double tol = kFieldTol)
      : g_(std::move(g)), values_(std::move(values)) {
    if (!g_) raise(ErrorCode::BadParameters, "kernel needs a groupoid");
    for (const auto& [id, v] : values_.entries()) {
      if (id >= g_->n_arrows()) raise(ErrorCode::BadParameters, "kernel entry out of range");
    }
    classify(tol);
  }

  const GroupoidPtr& groupoid() const { return g_; }
  const SparseArrowMap<S>& values() const { return values_; }
  S value(ArrowId id) const { return values_.at(id); }
  std::size_t support_size() const { return values_.size(); }

  bool is_probability_field() const { return probability_field_; }
  bool is_symmetric() const { return symmetric_; }

  // Sum of values over the target fiber of x.
  S target_fiber_sum(UnitId x) const {
    S sum{};
    for (ArrowId a : g_->target_fiber(x)) sum += values_.at(a);
    return sum;
  }
  S source_fiber_sum(UnitId x) const {
    S sum{};
    for (ArrowId a : g_->source_fiber(x)) sum += values_.at(a);
    return sum;
  }

private:
  void classify(double tol) {
    using T = ScalarTraits<S>;
    symmetric_ = true;
    for (const auto& [id, v] : values_.entries()) {
      const S other = values_.at(g_->inv(id));
      const S diff = other - T::conj(v);
      if constexpr (T::exact) {
        if (!T::is_zero(diff)) {
          symmetric_ = false;
          break;
        }
      } else {
        if (T::abs(diff) > tol) {
          symmetric_ = false;
          break;
        }
      }
    }
    probability_field_ = true;
    for (const auto& [id, v] : values_.entries()) {
      if (!T::is_real(v)) {
        probability_field_ = false;
        break;
      }
      if constexpr (T::exact) {
        if (T::real_part(v) < 0) {
          probability_field_ = false;
          break;
        }
      } else {
        if (T::real_part(v) < 0.0) {
          probability_field_ = false;
          break;
        }
      }
    }
    if (probability_field_) {
      for (UnitId x = 0; x < g_->n_units() && probability_field_; ++x) {
        const S sum = target_fiber_sum(x);
        if constexpr (T::exact) {
          probability_field_ = T::is_real(sum) && T::real_part(sum) == 1;
        } else {
          probability_field_ = std::abs(T::to_dbl(sum) - 1.0) <= tol;
        }
      }
    }
  }

  GroupoidPtr g_;
  SparseArrowMap<S> values_;
  bool probability_field_ = false;
  bool symmetric_ = false;
};

namespace detail {

inline void require_same(const GroupoidPtr& a, const GroupoidPtr& b) {
  if (a.get() != b.get()) {
    raise(ErrorCode::GroupoidMismatch, "kernels live on different groupoids");
  }
}

} // namespace detail

// chi restricted to unit arrows: the convolution identity.
template <Scalar S>
Kernel<S> identity_kernel(const GroupoidPtr& g) {
  std::vector<std::pair<ArrowId, S>> vals;
  vals.reserve(g->n_units());
  for (UnitId x = 0; x < g->n_units(); ++x) {
    vals.emplace_back(g->unit_arrow(x), ScalarTraits<S>::from_rat(Rat(1)));
  }
  return Kernel<S>(g, SparseArrowMap<S>::from_unsorted(std::move(vals)));
}

// k(g) = 1 / |target fiber of tgt(g)|.
template <Scalar S>
Kernel<S> uniform_field(const GroupoidPtr& g) {
  std::vector<std::pair<ArrowId, S>> vals;
  vals.reserve(g->n_arrows());
  for (ArrowId a = 0; a < g->n_arrows(); ++a) {
    const auto sz = g->target_fiber(g->tgt(a)).size();
    vals.emplace_back(a, ScalarTraits<S>::from_rat(Rat(1, static_cast<long long>(sz))));
  }
  return Kernel<S>(g, SparseArrowMap<S>::from_unsorted(std::move(vals)));
}

enum class MatrixOrientation { Auto, AsIs, Transpose };

template <Scalar S>
struct MatrixFieldResult {
  Kernel<S> kernel;
  MatrixOrientation used; // AsIs or Transpose after auto-resolution
};

// Interprets an n-by-n matrix as a kernel on the full pair relation of n
// points: entry A[i][j] sits on the arrow (x_i, x_j) (tgt = x_i, src = x_j).
// The field condition normalizes target fibers, i.e. row sums for AsIs and
// column sums for Transpose; Auto picks whichever family sums to one.
template <Scalar S>
MatrixFieldResult<S> field_from_matrix(const GroupoidPtr& g,
                                       const std::vector<std::vector<S>>& matrix,
                                       MatrixOrientation orientation = MatrixOrientation::Auto,
                                       double tol = kFieldTol) {
  using T = ScalarTraits<S>;
  const auto* pb = std::get_if<backend::PairBlocks>(&g->compose_backend());
  if (!pb || pb->members.size() != 1 || pb->members[0].size() != g->n_units()) {
    raise(ErrorCode::BadParameters, "matrix fields need a single-class pair groupoid");
  }
  const std::size_t n = g->n_units();
  if (matrix.size() != n) raise(ErrorCode::BadParameters, "matrix size does not match units");
  for (const auto& row : matrix) {
    if (row.size() != n) raise(ErrorCode::BadParameters, "matrix is not square");
    for (const auto& v : row) {
      if (!T::is_real(v)) raise(ErrorCode::NotAField, "matrix entries must be real");
      if constexpr (T::exact) {
        if (T::real_part(v) < 0) raise(ErrorCode::NotAField, "matrix entries must be nonnegative");
      } else {
        if (T::real_part(v) < 0.0) raise(ErrorCode::NotAField, "matrix entries must be nonnegative");
      }
    }
  }
  auto sums_to_one = [&](bool rows) {
    for (std::size_t i = 0; i < n; ++i) {
      S sum{};
      for (std::size_t j = 0; j < n; ++j) sum += rows ? matrix[i][j] : matrix[j][i];
      if constexpr (T::exact) {
        if (!(T::is_real(sum) && T::real_part(sum) == 1)) return false;
      } else {
        if (std::abs(T::to_dbl(sum) - 1.0) > tol) return false;
      }
    }
    return true;
  };
  MatrixOrientation used = orientation;
  if (orientation == MatrixOrientation::Auto) {
    if (sums_to_one(true)) {
      used = MatrixOrientation::AsIs;
    } else if (sums_to_one(false)) {
      used = MatrixOrientation::Transpose;
    } else {
      raise(ErrorCode::NotAField, "neither row nor column sums equal one");
    }
  }
  std::vector<std::pair<ArrowId, S>> vals;
  vals.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const ArrowId arrow = static_cast<ArrowId>(pb->arrow_base[0] + i * n + j);
      const S v = used == MatrixOrientation::AsIs ? matrix[i][j] : matrix[j][i];
      if (!T::is_zero(v)) vals.emplace_back(arrow, v);
    }
  }
  return MatrixFieldResult<S>{Kernel<S>(g, SparseArrowMap<S>::from_unsorted(std::move(vals)), tol),
                              used};
}

// Probability measure on the full bisections; the induced field is
// k(g) = sum of the weights of the bisections containing g.
struct BisectionMeasure {
  std::vector<std::pair<Bisection, Rat>> atoms;
};

template <Scalar S>
Kernel<S> field_from_bisections(const GroupoidPtr& g, const BisectionMeasure& measure) {
  Rat total(0);
  std::vector<std::pair<ArrowId, S>> vals;
  for (const auto& [bis, w] : measure.atoms) {
    if (!is_full_bisection(*g, bis)) {
      raise(ErrorCode::NotFull, "bisection measure supported outside the full bisections");
    }
    if (w < 0) raise(ErrorCode::BadParameters, "bisection weights must be nonnegative");
    total += w;
    for (ArrowId a : bis) vals.emplace_back(a, ScalarTraits<S>::from_rat(w));
  }
  if (total != 1) {
    raise(ErrorCode::NotProbabilityMeasure,
          "bisection measure has mass " + format_rational(total));
  }
  return Kernel<S>(g, SparseArrowMap<S>::from_unsorted(std::move(vals)));
}

// k*(g) = conj(k(g^{-1})).
template <Scalar S>
Kernel<S> involution(const Kernel<S>& k) {
  const auto& g = *k.groupoid();
  std::vector<std::pair<ArrowId, S>> vals;
  vals.reserve(k.support_size());
  for (const auto& [id, v] : k.values().entries()) {
    vals.emplace_back(g.inv(id), ScalarTraits<S>::conj(v));
  }
  return Kernel<S>(k.groupoid(), SparseArrowMap<S>::from_unsorted(std::move(vals)));
}

// (k1 * k2)(g) = sum over h in the target fiber of tgt(g) of k1(h) k2(h^{-1} g);
// equivalently the sum of k1(h) k2(j) over factorizations g = h j.
template <Scalar S>
Kernel<S> convolve(const Kernel<S>& k1, const Kernel<S>& k2) {
  detail::require_same(k1.groupoid(), k2.groupoid());
  const auto& g = *k1.groupoid();
  std::vector<std::vector<std::size_t>> by_tgt(g.n_units());
  const auto& e2 = k2.values().entries();
  for (std::size_t i = 0; i < e2.size(); ++i) by_tgt[g.tgt(e2[i].first)].push_back(i);

  std::vector<std::pair<ArrowId, S>> vals;
  for (const auto& [h, vh] : k1.values().entries()) {
    for (std::size_t idx : by_tgt[g.src(h)]) {
      const auto& [j, vj] = e2[idx];
      vals.emplace_back(g.compose(h, j), vh * vj);
    }
  }
  return Kernel<S>(k1.groupoid(), SparseArrowMap<S>::from_unsorted(std::move(vals)));
}

template <Scalar S>
Kernel<S> convolution_power(const Kernel<S>& k, unsigned n) {
  if (n == 0) return identity_kernel<S>(k.groupoid());
  Kernel<S> acc = k;
  for (unsigned i = 1; i < n; ++i) acc = convolve(acc, k);
  return acc;
}

// Largest fiber mass: max over units of the larger of the absolute source-
// and target-fiber sums. For symmetric probability fields this is exactly 1.
template <Scalar S>
typename ScalarTraits<S>::Magnitude i_norm(const Kernel<S>& k) {
  using T = ScalarTraits<S>;
  using M = typename T::Magnitude;
  const auto& g = *k.groupoid();
  std::vector<M> src_sum(g.n_units(), M{});
  std::vector<M> tgt_sum(g.n_units(), M{});
  for (const auto& [id, v] : k.values().entries()) {
    const M a = T::abs(v);
    src_sum[g.src(id)] += a;
    tgt_sum[g.tgt(id)] += a;
  }
  M best{};
  for (UnitId x = 0; x < g.n_units(); ++x) {
    if (src_sum[x] > best) best = src_sum[x];
    if (tgt_sum[x] > best) best = tgt_sum[x];
  }
  return best;
}

// Weighted l2 mass of the kernel viewed as a vector: sum mu(tgt g) |k(g)|^2.
template <Scalar S>
typename ScalarTraits<S>::AbsSq l2_norm_squared(const Kernel<S>& k) {
  using T = ScalarTraits<S>;
  using Q = typename T::AbsSq;
  const auto& g = *k.groupoid();
  Q total{};
  for (const auto& [id, v] : k.values().entries()) {
    if constexpr (std::is_same_v<Q, Rat>) {
      total += g.weight(g.tgt(id)) * T::abs_sq(v);
    } else {
      total += to_double(g.weight(g.tgt(id))) * T::abs_sq(v);
    }
  }
  return total;
}

// Componentwise field on a product groupoid built by product_groupoid.
template <Scalar S>
Kernel<S> product_field(const GroupoidPtr& prod, const Kernel<S>& ka, const Kernel<S>& kb) {
  const auto* pr = std::get_if<backend::ProductOf>(&prod->compose_backend());
  if (!pr || pr->a.get() != ka.groupoid().get() || pr->b.get() != kb.groupoid().get()) {
    raise(ErrorCode::GroupoidMismatch, "product field needs the factors' product groupoid");
  }
  const std::size_t nb = pr->b->n_arrows();
  std::vector<std::pair<ArrowId, S>> vals;
  vals.reserve(ka.support_size() * kb.support_size());
  for (const auto& [ia, va] : ka.values().entries()) {
    for (const auto& [ib, vb] : kb.values().entries()) {
      vals.emplace_back(static_cast<ArrowId>(ia * nb + ib), va * vb);
    }
  }
  return Kernel<S>(prod, SparseArrowMap<S>::from_unsorted(std::move(vals)));
}

// Per-part kernels assembled on a disjoint union built by disjoint_union.
template <Scalar S>
Kernel<S> union_field(const GroupoidPtr& uni, const std::vector<Kernel<S>>& parts) {
  const auto* un = std::get_if<backend::UnionOf>(&uni->compose_backend());
  if (!un || un->parts.size() != parts.size()) {
    raise(ErrorCode::GroupoidMismatch, "union field needs one kernel per union part");
  }
  std::vector<std::pair<ArrowId, S>> vals;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    if (un->parts[p].get() != parts[p].groupoid().get()) {
      raise(ErrorCode::GroupoidMismatch, "union part kernel on the wrong groupoid");
    }
    for (const auto& [id, v] : parts[p].values().entries()) {
      vals.emplace_back(static_cast<ArrowId>(un->arrow_base[p] + id), v);
    }
  }
  return Kernel<S>(uni, SparseArrowMap<S>::from_unsorted(std::move(vals)));
}

// Pullback of a kernel to a restriction built by restrict_groupoid.
template <Scalar S>
Kernel<S> restrict_field(const GroupoidPtr& restricted, const Kernel<S>& k) {
  const auto* re = std::get_if<backend::RestrictOf>(&restricted->compose_backend());
  if (!re || re->parent.get() != k.groupoid().get()) {
    raise(ErrorCode::GroupoidMismatch, "restriction field needs the parent's restriction");
  }
  std::vector<std::pair<ArrowId, S>> vals;
  for (ArrowId child = 0; child < restricted->n_arrows(); ++child) {
    const S v = k.value(re->to_parent[child]);
    if (!ScalarTraits<S>::is_zero(v)) vals.emplace_back(child, v);
  }
  return Kernel<S>(restricted, SparseArrowMap<S>::from_unsorted(std::move(vals)));
}

inline Kernel<double> kernel_to_double(const Kernel<Rat>& k) {
  std::vector<std::pair<ArrowId, double>> vals;
  vals.reserve(k.support_size());
  for (const auto& [id, v] : k.values().entries()) vals.emplace_back(id, to_double(v));
  return Kernel<double>(k.groupoid(), SparseArrowMap<double>::from_unsorted(std::move(vals)));
}

} // namespace ggk
