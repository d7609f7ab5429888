#include "ggk/groupoid.hpp"

#include "doctest.h"

#include <algorithm>
#include <set>

using namespace ggk;

namespace {

// Arrow (x, y) of a single-class pair groupoid on n points.
ArrowId pair_arrow(const GroupoidPtr& g, int n, int x, int y) {
  const auto* pb = std::get_if<backend::PairBlocks>(&g->compose_backend());
  REQUIRE(pb != nullptr);
  return static_cast<ArrowId>(pb->arrow_base[0] + std::size_t(x) * n + y);
}

} // namespace

TEST_CASE("full pair relation has the (x,y)(y,z) = (x,z) convention") {
  auto g = pair_full(3);
  CHECK(g->n_units() == 3);
  CHECK(g->n_arrows() == 9);
  CHECK(g->is_pmp());
  for (UnitId x = 0; x < 3; ++x) CHECK(g->weight(x) == rat(1, 3));

  const ArrowId a01 = pair_arrow(g, 3, 0, 1);
  const ArrowId a12 = pair_arrow(g, 3, 1, 2);
  CHECK(g->tgt(a01) == 0);
  CHECK(g->src(a01) == 1);
  CHECK(g->inv(a01) == pair_arrow(g, 3, 1, 0));
  CHECK(g->composable(a01, a12));
  CHECK(g->compose(a01, a12) == pair_arrow(g, 3, 0, 2));
  CHECK_FALSE(g->composable(a12, a01));
  CHECK_FALSE(g->try_compose(a12, a01).has_value());
  CHECK(g->unit_arrow(1) == pair_arrow(g, 3, 1, 1));
  CHECK(g->is_unit_arrow(g->unit_arrow(2)));
  CHECK_FALSE(g->is_unit_arrow(a01));

  CHECK(validate(*g).empty());
}

TEST_CASE("pair groupoid classes keep their own weights and stay disconnected") {
  auto g = build_pair_groupoid({{{"a0", "a1", "a2"}, rat(1, 6)},
                                {{"b0", "b1"}, rat(1, 4)}});
  CHECK(g->n_units() == 5);
  CHECK(g->n_arrows() == 9 + 4);
  CHECK(g->total_mass() == Rat(1));
  CHECK(g->is_pmp());
  CHECK(g->unit_index("b1").value() == 4);
  CHECK_FALSE(g->unit_index("missing").has_value());

  const auto orb = orbits(*g);
  REQUIRE(orb.size() == 2);
  CHECK(orb[0] == UnitSet{0, 1, 2});
  CHECK(orb[1] == UnitSet{3, 4});
  CHECK(is_invariant(*g, orb[1]));
  CHECK_FALSE(is_invariant(*g, UnitSet{0, 3}));
  CHECK(unit_set_mass(*g, orb[0]) == rat(1, 2));
}

TEST_CASE("group groupoid composes by the multiplication table") {
  auto g = build_group_groupoid(GroupTable::cyclic(4));
  CHECK(g->n_units() == 1);
  CHECK(g->n_arrows() == 4);
  CHECK(g->unit_arrow(0) == 0);
  CHECK(g->compose(1, 1) == 2);
  CHECK(g->compose(3, 2) == 1);
  CHECK(g->inv(1) == 3);
  CHECK(g->inv(2) == 2);
  CHECK(g->is_pmp());
  CHECK(validate(*g).empty());
}

TEST_CASE("dihedral and product tables satisfy the group axioms") {
  CHECK(GroupTable::dihedral(4).order() == 8);
  auto z2z2 = GroupTable::direct_product(GroupTable::cyclic(2), GroupTable::cyclic(2));
  CHECK(z2z2.order() == 4);
  // Klein four-group: every element is its own inverse.
  for (std::size_t i = 0; i < 4; ++i) CHECK(z2z2.inv[i] == i);
  CHECK(validate(*build_group_groupoid(GroupTable::dihedral(3))).empty());
}

TEST_CASE("from_mul rejects tables that are not groups") {
  // Not associative: 1*(1*1) = 1, (1*1)*1 = 2 under this table.
  CHECK_THROWS_AS(GroupTable::from_mul({{0, 1, 2}, {1, 0, 2}, {2, 2, 1}}), Error);
  // Row 1 is not a permutation.
  CHECK_THROWS_AS(GroupTable::from_mul({{0, 1}, {1, 1}}), Error);
  // Identity not at index 0.
  CHECK_THROWS_AS(GroupTable::from_mul({{1, 0}, {0, 1}}), Error);
  CHECK(GroupTable::from_mul({{0, 1}, {1, 0}}).order() == 2);
}

TEST_CASE("group bundle keeps one isotropy group per unit") {
  auto g = build_group_bundle({{"u", rat(1, 2), GroupTable::cyclic(2)},
                               {"v", rat(1, 2), GroupTable::cyclic(3)}});
  CHECK(g->n_units() == 2);
  CHECK(g->n_arrows() == 5);
  CHECK(g->is_pmp());
  for (ArrowId a = 0; a < g->n_arrows(); ++a) CHECK(g->src(a) == g->tgt(a));
  CHECK(orbits(*g).size() == 2);
  CHECK(validate(*g).empty());
}

TEST_CASE("product groupoid multiplies componentwise") {
  auto a = pair_full(2);
  auto b = build_group_groupoid(GroupTable::cyclic(3));
  auto p = product_groupoid(a, b);
  CHECK(p->n_units() == 2);
  CHECK(p->n_arrows() == 12);
  CHECK(p->total_mass() == Rat(1));
  CHECK(p->is_pmp());
  CHECK(validate(*p).empty());
  CHECK(orbits(*p).size() == 1);
}

TEST_CASE("disjoint union scales part measures and prefixes unit names") {
  auto u = disjoint_union({pair_full(2), pair_full(3)}, {rat(1, 2), rat(1, 2)});
  CHECK(u->n_units() == 5);
  CHECK(u->n_arrows() == 13);
  CHECK(u->total_mass() == Rat(1));
  CHECK(u->weight(0) == rat(1, 4));
  CHECK(u->weight(2) == rat(1, 6));
  CHECK(u->unit_name(0) == "p0:0");
  CHECK(u->unit_name(4) == "p1:2");
  CHECK(orbits(*u).size() == 2);
  CHECK(validate(*u).empty());

  CHECK_THROWS_AS(disjoint_union({}, {}), Error);
  CHECK_THROWS_AS(disjoint_union({pair_full(2)}, {rat(1, 2), rat(1, 2)}), Error);
}

TEST_CASE("restriction renormalizes to the conditional measure") {
  auto u = disjoint_union({pair_full(2), pair_full(3)}, {rat(1, 3), rat(2, 3)});
  auto r = restrict_groupoid(u, UnitSet{0, 1});
  CHECK(r->n_units() == 2);
  CHECK(r->n_arrows() == 4);
  CHECK(r->weight(0) == rat(1, 2));
  CHECK(r->total_mass() == Rat(1));
  CHECK(r->is_pmp());
  CHECK(validate(*r).empty());

  // Restricting to a non-invariant set keeps only internal arrows.
  auto s = restrict_groupoid(pair_full(3), UnitSet{0, 1});
  CHECK(s->n_units() == 2);
  CHECK(s->n_arrows() == 4);
  CHECK(s->is_pmp());

  CHECK_THROWS_AS(restrict_groupoid(u, UnitSet{}), Error);
}

TEST_CASE("validate reports a measure that is not preserved") {
  auto g = build_from_parts(
      {"x", "y"}, {rat(1, 3), rat(2, 3)},
      {{"a", "y", "x", "ainv"},
       {"ainv", "x", "y", "a"},
       {"id_x", "x", "x", "id_x"},
       {"id_y", "y", "y", "id_y"}},
      {{"a", "ainv", "id_x"}, {"ainv", "a", "id_y"},
       {"id_x", "a", "a"}, {"a", "id_y", "a"},
       {"id_y", "ainv", "ainv"}, {"ainv", "id_x", "ainv"},
       {"id_x", "id_x", "id_x"}, {"id_y", "id_y", "id_y"}});
  CHECK_FALSE(g->measure_preserving());
  const auto diags = validate(*g);
  REQUIRE_FALSE(diags.empty());
  bool found = false;
  for (const auto& d : diags) {
    if (d.code == "measure.not_preserving") found = true;
  }
  CHECK(found);
}

TEST_CASE("a hole in the composition table surfaces on compose") {
  auto g = build_from_parts(
      {"x"}, {Rat(1)},
      {{"g", "x", "x", "g"}, {"id_x", "x", "x", "id_x"}},
      {{"id_x", "id_x", "id_x"}, {"id_x", "g", "g"}, {"g", "id_x", "g"}});
  CHECK(g->composable(0, 0));
  CHECK_THROWS_WITH_AS(g->compose(0, 0), doctest::Contains("no entry"), Error);
}

TEST_CASE("full bisections of the pair relation are the permutations") {
  auto g = pair_full(3);
  const auto bis = full_bisections(*g);
  CHECK(bis.size() == 6);
  std::set<Bisection> seen(bis.begin(), bis.end());
  CHECK(seen.size() == 6);
  for (const auto& b : bis) {
    CHECK(is_bisection(*g, b));
    CHECK(is_full_bisection(*g, b));
  }

  // The units form the identity of the composition group.
  Bisection id;
  for (UnitId x = 0; x < 3; ++x) id.push_back(g->unit_arrow(x));
  std::sort(id.begin(), id.end());
  for (const auto& b : bis) {
    CHECK(compose_bisections(*g, b, inverse_bisection(*g, b)) == id);
    CHECK(compose_bisections(*g, b, id) == b);
  }

  // A partial bisection is fine, a fiber collision is not.
  const auto* pb = std::get_if<backend::PairBlocks>(&g->compose_backend());
  const ArrowId a01 = static_cast<ArrowId>(pb->arrow_base[0] + 0 * 3 + 1);
  const ArrowId a21 = static_cast<ArrowId>(pb->arrow_base[0] + 2 * 3 + 1);
  CHECK(is_bisection(*g, {a01}));
  CHECK_FALSE(is_full_bisection(*g, {a01}));
  CHECK_FALSE(is_bisection(*g, {a01, a21}));

  CHECK_THROWS_AS(full_bisections(*pair_full(8), 100), Error);
}
