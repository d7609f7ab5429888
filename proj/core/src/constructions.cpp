#include "ggk/constructions.hpp"

#include <algorithm>
#include <cmath>

namespace ggk {

ADeltaResult a_delta_matrix(int n, double delta) {
  if (n < 2) raise(ErrorCode::BadParameters, "matrix family needs n >= 2");
  ADeltaResult out;
  out.n = n;
  out.eps0 = rat_from_double(delta / (2.0 * std::sqrt(double(n))));
  if (out.eps0 <= 0 || out.eps0 >= 1) {
    raise(ErrorCode::BadParameters, "delta outside (0, 2 sqrt(n))");
  }
  const Rat head = Rat(1) - out.eps0;
  const Rat tail = out.eps0 / Rat(n - 1);
  out.matrix.assign(n, std::vector<Rat>(n, tail));
  out.matrix[0].assign(n, head);
  out.f_eps = head * head + out.eps0 * out.eps0 / Rat(n - 1);
  out.exact_norm = std::sqrt(double(n) * to_double(out.f_eps));
  out.target = std::sqrt(double(n)) - delta;
  return out;
}

ADeltaField a_delta_field(int n, double delta) {
  auto data = a_delta_matrix(n, delta);
  auto g = pair_full(n);
  auto res = field_from_matrix<Rat>(g, data.matrix, MatrixOrientation::Transpose);
  return ADeltaField{std::move(data), g, std::move(res.kernel), res.used};
}

UnionExample unbounded_union_example(int parts, double delta, BaseSpace base) {
  if (parts < 1) raise(ErrorCode::BadParameters, "need at least one part");
  std::vector<GroupoidPtr> part_groupoids;
  std::vector<Kernel<Rat>> part_fields;
  std::vector<double> predicted;
  for (int n = 1; n <= parts; ++n) {
    GroupoidPtr pg = pair_full(n);
    Kernel<Rat> pf = uniform_field<Rat>(pg);
    double factor_norm = 1.0;
    if (n >= 2) {
      const auto d = a_delta_matrix(n, delta);
      factor_norm = d.exact_norm;
      pf = field_from_matrix<Rat>(pg, d.matrix, MatrixOrientation::Transpose).kernel;
    }
    if (base == BaseSpace::Pair2) {
      auto b = pair_full(2);
      auto prod = product_groupoid(b, pg);
      pf = product_field(prod, uniform_field<Rat>(b), pf);
      pg = prod;
    }
    predicted.push_back(factor_norm);
    part_groupoids.push_back(std::move(pg));
    part_fields.push_back(std::move(pf));
  }
  auto uni = disjoint_union(part_groupoids, std::vector<Rat>(parts, Rat(1, parts)));
  auto field = union_field(uni, part_fields);

  const auto& un = std::get<backend::UnionOf>(uni->compose_backend());
  std::vector<double> block_norms, prefixes;
  double prefix = 0.0;
  for (int p = 0; p < parts; ++p) {
    std::vector<UnitId> ids;
    for (std::size_t u = 0; u < part_groupoids[p]->n_units(); ++u) {
      ids.push_back(static_cast<UnitId>(un.unit_base[p] + u));
    }
    auto sub = restrict_groupoid(uni, make_unit_set(std::move(ids)));
    auto sub_field = restrict_field(sub, field);
    block_norms.push_back(operator_norm(MarkovOperator<Rat>(sub_field)).value);
    prefix = std::max(prefix, to_double(i_norm(part_fields[p])));
    prefixes.push_back(prefix);
  }
  return UnionExample{std::move(uni), std::move(field), std::move(block_norms),
                      std::move(predicted), std::move(prefixes)};
}

UnitSet interval_units(int k) {
  UnitSet set;
  const std::size_t lo = std::size_t(k) * (k + 1) / 2;
  const std::size_t hi = std::size_t(k + 1) * (k + 2) / 2;
  for (std::size_t u = lo; u < hi; ++u) set.push_back(static_cast<UnitId>(u));
  return set;
}

IntervalExample interval_example(int max_index) {
  if (max_index < 0) raise(ErrorCode::BadParameters, "window index must be nonnegative");
  const std::size_t window = std::size_t(max_index + 1) * (max_index + 2) / 2;

  std::vector<std::string> names(window);
  for (std::size_t u = 0; u < window; ++u) names[u] = std::to_string(u);
  auto g = build_pair_groupoid({PairClass{std::move(names), Rat(1)}});

  const auto& pb = std::get<backend::PairBlocks>(g->compose_backend());
  std::vector<std::pair<ArrowId, Rat>> vals;
  for (int m = 0; m <= max_index; ++m) {
    for (UnitId n : interval_units(m)) {
      vals.emplace_back(static_cast<ArrowId>(pb.arrow_base[0] + std::size_t(m) * window + n),
                        Rat(1));
    }
  }
  Kernel<Rat> kernel(g, SparseArrowMap<Rat>::from_unsorted(std::move(vals)));
  return IntervalExample{std::move(g), std::move(kernel), max_index, window};
}

L2Vector<Rat> interval_vector(const IntervalExample& ex, int k) {
  if (k < 0 || k > ex.max_index) raise(ErrorCode::BadParameters, "interval index out of window");
  const auto& pb = std::get<backend::PairBlocks>(ex.groupoid->compose_backend());
  std::vector<std::pair<ArrowId, Rat>> vals;
  for (UnitId n : interval_units(k)) {
    vals.emplace_back(static_cast<ArrowId>(pb.arrow_base[0] + std::size_t(k) * ex.window + n),
                      Rat(1));
  }
  return L2Vector<Rat>(ex.groupoid, SparseArrowMap<Rat>::from_unsorted(std::move(vals)));
}

FreeBall free_group_ball(int rank, int radius, std::size_t vertex_cap, const NormOptions& opts) {
  if (rank < 1 || radius < 0) raise(ErrorCode::BadParameters, "rank >= 1 and radius >= 0");
  const std::size_t letters = 2 * std::size_t(rank);

  FreeBall out;
  out.rank = rank;
  out.radius = radius;
  out.classical_limit = std::sqrt(double(2 * rank - 1)) / double(rank);

  // Count before allocating: |S_0| = 1, |S_r| = 2m (2m-1)^(r-1).
  out.sphere_sizes.push_back(1);
  std::size_t total = 1;
  for (int r = 1; r <= radius; ++r) {
    const std::size_t prev = out.sphere_sizes.back();
    const std::size_t next = r == 1 ? letters : prev * (letters - 1);
    if (next > vertex_cap || total + next > vertex_cap) {
      raise(ErrorCode::BallTooLarge, "ball exceeds the vertex cap");
    }
    out.sphere_sizes.push_back(next);
    total += next;
  }
  out.n_vertices = total;

  // Breadth-first vertex order: parent links suffice, since children of a
  // reduced word are one letter longer and exclude the inverse of its last
  // letter (letter 2k+1 is the inverse of letter 2k).
  std::vector<std::uint32_t> parent(total, 0);
  std::vector<std::uint8_t> last(total, 0);
  std::size_t level_begin = 0, level_end = 1, next_id = 1;
  for (int r = 1; r <= radius; ++r) {
    for (std::size_t v = level_begin; v < level_end; ++v) {
      for (std::size_t l = 0; l < letters; ++l) {
        if (v != 0 && l == (last[v] ^ 1u)) continue;
        parent[next_id] = static_cast<std::uint32_t>(v);
        last[next_id] = static_cast<std::uint8_t>(l);
        ++next_id;
      }
    }
    level_begin = level_end;
    level_end = next_id;
  }

  // Rows in vertex order: parent entry first (ids only decrease), children
  // after; children of v are a contiguous id range, recovered per level.
  const double step = 1.0 / double(letters);
  out.op.rows = out.op.cols = total;
  out.op.row_ptr.assign(total + 1, 0);
  for (std::size_t v = 1; v < total; ++v) {
    ++out.op.row_ptr[v + 1];          // edge to parent
    ++out.op.row_ptr[parent[v] + 1];  // edge from parent
  }
  for (std::size_t v = 0; v < total; ++v) out.op.row_ptr[v + 1] += out.op.row_ptr[v];
  std::vector<std::size_t> cursor(out.op.row_ptr.begin(), out.op.row_ptr.end() - 1);
  out.op.col_idx.resize(out.op.row_ptr.back());
  out.op.vals.assign(out.op.row_ptr.back(), step);
  for (std::size_t v = 1; v < total; ++v) {
    out.op.col_idx[cursor[v]++] = parent[v];
    out.op.col_idx[cursor[parent[v]]++] = static_cast<std::uint32_t>(v);
  }

  out.norm = csr_norm(out.op, true, opts);
  return out;
}

namespace {

SuiteMember make_member(std::string name, GroupTable table, std::vector<int> generators) {
  auto g = build_group_bundle({{"e", Rat(1), std::move(table)}});
  std::vector<std::pair<ArrowId, Rat>> vals;
  const Rat w(1, static_cast<int>(generators.size()));
  for (int e : generators) vals.emplace_back(static_cast<ArrowId>(e), w);
  Kernel<Rat> k(g, SparseArrowMap<Rat>::from_unsorted(std::move(vals)));
  return SuiteMember{std::move(name), std::move(g), std::move(k)};
}

} // namespace

std::vector<SuiteMember> finite_group_suite() {
  std::vector<SuiteMember> suite;
  for (int n : {2, 3, 4, 6, 8, 12}) {
    std::vector<int> gens = n == 2 ? std::vector<int>{0, 1} : std::vector<int>{0, 1, n - 1};
    suite.push_back(make_member("cyclic-" + std::to_string(n), GroupTable::cyclic(n), gens));
  }
  for (int n : {3, 4}) {
    const auto zn = GroupTable::cyclic(n);
    // (a, b) at index a*n + b
    suite.push_back(make_member("cyclic-" + std::to_string(n) + "-squared",
                                GroupTable::direct_product(zn, zn),
                                {0, 1 * n, (n - 1) * n, 1, n - 1}));
  }
  for (int n : {4, 8}) {
    // r^i s^j at index i + n*j; generators {e, r, r^-1, s}
    suite.push_back(make_member("dihedral-" + std::to_string(2 * n), GroupTable::dihedral(n),
                                {0, 1, n - 1, n}));
  }
  return suite;
}

} // namespace ggk
