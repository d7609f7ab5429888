#include "ggk/markov.hpp"

#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

using namespace ggk;

namespace {

Kernel<Rat> make_kernel(const GroupoidPtr& g, std::vector<std::pair<ArrowId, Rat>> vals) {
  return Kernel<Rat>(g, SparseArrowMap<Rat>::from_unsorted(std::move(vals)));
}

} // namespace

TEST_CASE("operator blocks are the fiberwise matrices k(g_i^{-1} g_j)") {
  auto g = pair_full(2);
  const std::vector<std::vector<Rat>> m = {{rat(1, 3), rat(2, 3)},
                                           {rat(2, 3), rat(1, 3)}};
  auto k = field_from_matrix<Rat>(g, m, MatrixOrientation::AsIs).kernel;
  MarkovOperator<Rat> op(k);
  CHECK(op.hermitian());
  CHECK(op.n_blocks() == 2);
  for (UnitId x = 0; x < 2; ++x) {
    const auto blk = block_dense(op, x);
    // Fiber of x is {(x,0), (x,1)}; (x,i)^{-1}(x,j) = (i,j).
    CHECK(blk[0][0] == rat(1, 3));
    CHECK(blk[0][1] == rat(2, 3));
    CHECK(blk[1][0] == rat(2, 3));
    CHECK(blk[1][1] == rat(1, 3));
  }
  // The two blocks of the single pair class coincide; only one representative.
  CHECK(op.representative_blocks().size() == 1);
}

TEST_CASE("sparse and dense application agree") {
  auto g = disjoint_union({pair_full(3), build_group_groupoid(GroupTable::cyclic(4))},
                          {rat(2, 3), rat(1, 3)});
  auto k = uniform_field<Rat>(g);
  MarkovOperator<Rat> op(k);

  std::vector<Rat> in(g->n_arrows(), Rat(0));
  std::vector<std::pair<ArrowId, Rat>> sparse_in;
  for (ArrowId a = 0; a < g->n_arrows(); a += 2) {
    in[a] = rat(int(a) + 1, 7);
    sparse_in.emplace_back(a, in[a]);
  }
  std::vector<Rat> out;
  op.apply_dense(in, out);
  auto sparse_out = op.apply(L2Vector<Rat>(g, SparseArrowMap<Rat>::from_unsorted(sparse_in)));
  for (ArrowId a = 0; a < g->n_arrows(); ++a) {
    CHECK(sparse_out.values().at(a) == out[a]);
  }
}

TEST_CASE("convolution turns into operator composition") {
  auto g = pair_full(3);
  auto k1 = field_from_matrix<Rat>(g, {{rat(1, 2), rat(1, 2), Rat(0)},
                                       {rat(1, 4), rat(1, 4), rat(1, 2)},
                                       {Rat(0), rat(1, 2), rat(1, 2)}},
                                   MatrixOrientation::AsIs)
                .kernel;
  auto k2 = uniform_field<Rat>(g);
  MarkovOperator<Rat> p1(k1), p2(k2), p12(convolve(k1, k2));
  CHECK(product_matches(p1, p2, p12));
  CHECK_FALSE(product_matches(p2, p1, MarkovOperator<Rat>(convolve(k1, k1))));
  CHECK(operator_equal(p12, p12));
  CHECK_FALSE(operator_equal(p1, p2));
}

TEST_CASE("inner products and norms use the unit weights") {
  auto g = build_pair_groupoid({{{"a0", "a1"}, rat(1, 3)}, {{"b0"}, rat(1, 3)}});
  auto chi = L2Vector<Rat>::chi(g, UnitSet{0, 1, 2});
  CHECK(norm_squared(chi) == Rat(1));
  auto part = L2Vector<Rat>::chi(g, UnitSet{0});
  CHECK(inner_product(chi, part) == rat(1, 3));
  CHECK(inner_product(part, chi) == rat(1, 3));
}

TEST_CASE("self-adjointness defect vanishes exactly for symmetric kernels") {
  auto g = pair_full(3);
  auto sym = uniform_field<Rat>(g);
  CHECK(self_adjointness_defect(MarkovOperator<Rat>(sym)) == 0.0);

  auto skew = field_from_matrix<Rat>(g, {{rat(1, 2), rat(1, 2), Rat(0)},
                                         {Rat(0), rat(1, 2), rat(1, 2)},
                                         {rat(1, 2), Rat(0), rat(1, 2)}},
                                     MatrixOrientation::AsIs)
                  .kernel;
  CHECK_FALSE(skew.is_symmetric());
  CHECK(self_adjointness_defect(MarkovOperator<Rat>(skew)) > 0.1);
}

TEST_CASE("dense norm handles hermitian and general matrices") {
  // [[0, 2], [0, 0]] has norm 2 but spectral radius 0.
  auto shift = detail::dense_norm_real({0.0, 2.0, 0.0, 0.0}, 2, false);
  CHECK(shift.value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(shift.method == "dense-svd");

  auto diag = detail::dense_norm_real({-3.0, 0.0, 0.0, 1.0}, 2, true);
  CHECK(diag.value == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(diag.method == "dense-eig");

  using C = std::complex<double>;
  auto rot = detail::dense_norm_cplx({C{0, 0}, C{0, 1}, C{0, -1}, C{0, 0}}, 2, true);
  CHECK(rot.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("iterative and dense norms agree on a moderate symmetric matrix") {
  // Path graph adjacency / 2: top eigenvalue cos(pi / (n+1)).
  const std::size_t n = 60;
  CsrMatrix m;
  m.rows = m.cols = n;
  m.row_ptr.push_back(0);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      m.col_idx.push_back(std::uint32_t(i - 1));
      m.vals.push_back(0.5);
    }
    if (i + 1 < n) {
      m.col_idx.push_back(std::uint32_t(i + 1));
      m.vals.push_back(0.5);
    }
    m.row_ptr.push_back(m.col_idx.size());
  }
  const double oracle = std::cos(3.14159265358979323846 / double(n + 1));
  auto dense = csr_norm_dense(m, true);
  auto iter = csr_norm_iterative(m, true, {});
  CHECK(dense.value == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(iter.value == doctest::Approx(oracle).epsilon(1e-9));
  CHECK(iter.method == "lanczos");
  CHECK(iter.converged);

  // Small dense_cap pushes csr_norm onto the iterative path.
  NormOptions opts;
  opts.dense_cap = 4;
  CHECK(csr_norm(m, true, opts).method == "lanczos");
}

TEST_CASE("operator norm of a uniform field is exactly one") {
  for (int n : {2, 3, 5}) {
    auto k = uniform_field<Rat>(pair_full(n));
    auto res = operator_norm(MarkovOperator<Rat>(k));
    CHECK(res.value == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("operator norm in rational and double arithmetic coincide") {
  auto g = pair_full(4);
  auto k = field_from_matrix<Rat>(g, {{rat(1, 2), rat(1, 6), rat(1, 6), rat(1, 6)},
                                      {rat(1, 6), rat(1, 2), rat(1, 6), rat(1, 6)},
                                      {rat(1, 6), rat(1, 6), rat(1, 2), rat(1, 6)},
                                      {rat(1, 6), rat(1, 6), rat(1, 6), rat(1, 2)}},
                                  MatrixOrientation::AsIs)
                .kernel;
  auto exact = operator_norm(MarkovOperator<Rat>(k));
  auto dbl = operator_norm(MarkovOperator<double>(kernel_to_double(k)));
  CHECK(exact.value == doctest::Approx(dbl.value).epsilon(1e-13));
  CHECK(exact.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("norm sandwich holds with both ends attainable") {
  auto g = pair_full(2);
  auto uniform = norm_sandwich_report(uniform_field<Rat>(g));
  CHECK(uniform.ordered(1e-12));
  CHECK(uniform.op_norm.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(uniform.i_norm == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(uniform.l2_norm == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));

  // A point mass on one bisection has l2 = op = i = 1.
  auto swap = make_kernel(g, {{1, Rat(1)}, {2, Rat(1)}});
  auto rep = norm_sandwich_report(swap);
  CHECK(rep.ordered(1e-12));
  CHECK(rep.l2_norm == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.i_norm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("complex hermitian kernels get the eigenvalue path") {
  using C = std::complex<double>;
  auto g = pair_full(2);
  auto k = Kernel<C>(g, SparseArrowMap<C>::from_unsorted({{0, C{0.5, 0.0}},
                                                          {1, C{0.25, 0.25}},
                                                          {2, C{0.25, -0.25}},
                                                          {3, C{0.5, 0.0}}}));
  REQUIRE(k.is_symmetric());
  MarkovOperator<C> op(k);
  CHECK(op.hermitian());
  CHECK(self_adjointness_defect(op) == 0.0);
  // Block [[1/2, (1+i)/4], [(1-i)/4, 1/2]]: eigenvalues 1/2 +- sqrt(2)/4.
  auto res = operator_norm(op);
  CHECK(res.value == doctest::Approx(0.5 + std::sqrt(2.0) / 4.0).epsilon(1e-12));
}
