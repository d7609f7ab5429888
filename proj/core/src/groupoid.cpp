#include "ggk/groupoid.hpp"

#include <algorithm>
#include <numeric>

namespace ggk {

// ---- GroupTable ----

namespace {

void check_group_axioms(const GroupTable& t) {
  const std::size_t n = t.order();
  if (n == 0) raise(ErrorCode::NotAGroup, "empty multiplication table");
  for (const auto& row : t.mul) {
    if (row.size() != n) raise(ErrorCode::NotAGroup, "multiplication table is not square");
    for (auto v : row) {
      if (v >= n) raise(ErrorCode::NotAGroup, "table entry out of range");
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    if (t.mul[0][a] != a || t.mul[a][0] != a) {
      raise(ErrorCode::NotAGroup, "element 0 is not an identity");
    }
  }
  if (t.inv.size() != n) raise(ErrorCode::NotAGroup, "missing inverse table");
  for (std::size_t a = 0; a < n; ++a) {
    if (t.mul[a][t.inv[a]] != 0 || t.mul[t.inv[a]][a] != 0) {
      raise(ErrorCode::NotAGroup, "inverse law fails");
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t c = 0; c < n; ++c) {
        if (t.mul[t.mul[a][b]][c] != t.mul[a][t.mul[b][c]]) {
          raise(ErrorCode::NotAGroup, "associativity fails");
        }
      }
    }
  }
}

} // namespace

GroupTable GroupTable::cyclic(int n) {
  if (n < 1) raise(ErrorCode::BadParameters, "cyclic group needs n >= 1");
  GroupTable t;
  t.mul.assign(n, std::vector<std::uint16_t>(n));
  t.inv.resize(n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) t.mul[a][b] = static_cast<std::uint16_t>((a + b) % n);
    t.inv[a] = static_cast<std::uint16_t>((n - a) % n);
  }
  return t;
}

GroupTable GroupTable::dihedral(int n) {
  if (n < 1) raise(ErrorCode::BadParameters, "dihedral group needs n >= 1");
  const int order = 2 * n;
  // element r^i s^j at index i + n*j
  auto idx = [n](int i, int j) { return i + n * j; };
  GroupTable t;
  t.mul.assign(order, std::vector<std::uint16_t>(order));
  t.inv.resize(order);
  for (int i1 = 0; i1 < n; ++i1) {
    for (int j1 = 0; j1 < 2; ++j1) {
      for (int i2 = 0; i2 < n; ++i2) {
        for (int j2 = 0; j2 < 2; ++j2) {
          const int i = j1 == 0 ? (i1 + i2) % n : (i1 - i2 + n) % n;
          const int j = j1 ^ j2;
          t.mul[idx(i1, j1)][idx(i2, j2)] = static_cast<std::uint16_t>(idx(i, j));
        }
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    t.inv[idx(i, 0)] = static_cast<std::uint16_t>(idx((n - i) % n, 0));
    t.inv[idx(i, 1)] = static_cast<std::uint16_t>(idx(i, 1));
  }
  return t;
}

GroupTable GroupTable::direct_product(const GroupTable& a, const GroupTable& b) {
  const std::size_t na = a.order(), nb = b.order();
  GroupTable t;
  t.mul.assign(na * nb, std::vector<std::uint16_t>(na * nb));
  t.inv.resize(na * nb);
  for (std::size_t a1 = 0; a1 < na; ++a1) {
    for (std::size_t b1 = 0; b1 < nb; ++b1) {
      const std::size_t e1 = a1 * nb + b1;
      t.inv[e1] = static_cast<std::uint16_t>(a.inv[a1] * nb + b.inv[b1]);
      for (std::size_t a2 = 0; a2 < na; ++a2) {
        for (std::size_t b2 = 0; b2 < nb; ++b2) {
          t.mul[e1][a2 * nb + b2] =
              static_cast<std::uint16_t>(a.mul[a1][a2] * nb + b.mul[b1][b2]);
        }
      }
    }
  }
  return t;
}

GroupTable GroupTable::from_mul(const std::vector<std::vector<int>>& mul) {
  const std::size_t n = mul.size();
  GroupTable t;
  t.mul.assign(n, std::vector<std::uint16_t>(n));
  for (std::size_t a = 0; a < n; ++a) {
    if (mul[a].size() != n) raise(ErrorCode::NotAGroup, "multiplication table is not square");
    for (std::size_t b = 0; b < n; ++b) {
      if (mul[a][b] < 0 || static_cast<std::size_t>(mul[a][b]) >= n) {
        raise(ErrorCode::NotAGroup, "table entry out of range");
      }
      t.mul[a][b] = static_cast<std::uint16_t>(mul[a][b]);
    }
  }
  t.inv.assign(n, 0);
  for (std::size_t a = 0; a < n; ++a) {
    bool found = false;
    for (std::size_t b = 0; b < n; ++b) {
      if (t.mul[a][b] == 0 && t.mul[b][a] == 0) {
        t.inv[a] = static_cast<std::uint16_t>(b);
        found = true;
        break;
      }
    }
    if (!found) raise(ErrorCode::NotAGroup, "element without inverse");
  }
  check_group_axioms(t);
  return t;
}

// ---- FiniteGroupoid ----

FiniteGroupoid::FiniteGroupoid(Core core)
    : unit_names_(std::move(core.unit_names)),
      weights_(std::move(core.weights)),
      arrows_(std::move(core.arrows)),
      unit_arrow_(std::move(core.unit_arrow)),
      compose_(std::move(core.compose)),
      meta_(std::move(core.meta)) {
  const std::size_t nu = weights_.size();
  const std::size_t na = arrows_.size();
  if (unit_names_.size() != nu || unit_arrow_.size() != nu) {
    raise(ErrorCode::BadParameters, "inconsistent unit arrays");
  }
  if (nu == 0) raise(ErrorCode::BadParameters, "groupoid needs at least one unit");
  for (const auto& w : weights_) {
    if (w <= 0) raise(ErrorCode::BadParameters, "unit weights must be positive");
  }
  for (std::size_t i = 0; i < na; ++i) {
    const Arrow& a = arrows_[i];
    if (a.src >= nu || a.tgt >= nu || a.inv >= na) {
      raise(ErrorCode::BadParameters, "arrow index out of range");
    }
  }
  for (UnitId x = 0; x < nu; ++x) {
    const ArrowId e = unit_arrow_[x];
    if (e >= na || arrows_[e].src != x || arrows_[e].tgt != x) {
      raise(ErrorCode::BadParameters, "unit arrow missing or mislabeled");
    }
  }
  source_fiber_.resize(nu);
  target_fiber_.resize(nu);
  for (ArrowId g = 0; g < na; ++g) {
    source_fiber_[arrows_[g].src].push_back(g);
    target_fiber_[arrows_[g].tgt].push_back(g);
  }
  name_index_.reserve(nu);
  for (UnitId x = 0; x < nu; ++x) {
    if (!name_index_.emplace(unit_names_[x], x).second) {
      raise(ErrorCode::DuplicateUnit, "duplicate unit name: " + unit_names_[x]);
    }
  }
  total_mass_ = Rat(0);
  for (const auto& w : weights_) total_mass_ += w;
  normalized_ = (total_mass_ == 1);
  measure_preserving_ = true;
  for (const Arrow& a : arrows_) {
    if (weights_[a.src] != weights_[a.tgt]) {
      measure_preserving_ = false;
      break;
    }
  }
}

std::optional<UnitId> FiniteGroupoid::unit_index(const std::string& name) const {
  auto it = name_index_.find(name);
  if (it == name_index_.end()) return std::nullopt;
  return it->second;
}

ArrowId FiniteGroupoid::compose(ArrowId g, ArrowId h) const {
  if (!composable(g, h)) {
    raise(ErrorCode::BadParameters, "arrows are not composable");
  }
  if (const auto* t = std::get_if<backend::Table>(&compose_)) {
    auto it = t->map.find((std::uint64_t(g) << 32) | h);
    if (it == t->map.end()) {
      raise(ErrorCode::BadParameters, "composition table has no entry for a composable pair");
    }
    return it->second;
  }
  if (const auto* p = std::get_if<backend::PairBlocks>(&compose_)) {
    const UnitId x = arrows_[g].tgt;
    const std::uint32_t c = p->class_of_unit[x];
    const std::size_t k = p->members[c].size();
    return static_cast<ArrowId>(p->arrow_base[c] + p->pos_in_class[x] * k +
                                p->pos_in_class[arrows_[h].src]);
  }
  if (const auto* b = std::get_if<backend::Bundle>(&compose_)) {
    const UnitId u = arrows_[g].tgt;
    const std::size_t base = b->arrow_base[u];
    return static_cast<ArrowId>(base + b->tables[u].mul[g - base][h - base]);
  }
  if (const auto* pr = std::get_if<backend::ProductOf>(&compose_)) {
    const std::size_t nb = pr->b->n_arrows();
    const ArrowId ca = pr->a->compose(static_cast<ArrowId>(g / nb), static_cast<ArrowId>(h / nb));
    const ArrowId cb = pr->b->compose(static_cast<ArrowId>(g % nb), static_cast<ArrowId>(h % nb));
    return static_cast<ArrowId>(ca * nb + cb);
  }
  if (const auto* un = std::get_if<backend::UnionOf>(&compose_)) {
    auto it = std::upper_bound(un->arrow_base.begin(), un->arrow_base.end(), g);
    const std::size_t part = static_cast<std::size_t>(it - un->arrow_base.begin()) - 1;
    const std::size_t base = un->arrow_base[part];
    return static_cast<ArrowId>(base + un->parts[part]->compose(static_cast<ArrowId>(g - base),
                                                                static_cast<ArrowId>(h - base)));
  }
  const auto& re = std::get<backend::RestrictOf>(compose_);
  const ArrowId parent = re.parent->compose(re.to_parent[g], re.to_parent[h]);
  return re.from_parent.at(parent);
}

std::optional<ArrowId> FiniteGroupoid::try_compose(ArrowId g, ArrowId h) const {
  if (!composable(g, h)) return std::nullopt;
  return compose(g, h);
}

std::string FiniteGroupoid::arrow_label(ArrowId g) const {
  if (const auto* t = std::get_if<backend::Table>(&compose_)) {
    if (g < t->arrow_names.size() && !t->arrow_names[g].empty()) return t->arrow_names[g];
    return "a" + std::to_string(g);
  }
  if (std::get_if<backend::PairBlocks>(&compose_)) {
    return "(" + unit_names_[arrows_[g].tgt] + "," + unit_names_[arrows_[g].src] + ")";
  }
  if (const auto* b = std::get_if<backend::Bundle>(&compose_)) {
    const UnitId u = arrows_[g].tgt;
    return unit_names_[u] + ":g" + std::to_string(g - b->arrow_base[u]);
  }
  if (const auto* pr = std::get_if<backend::ProductOf>(&compose_)) {
    const std::size_t nb = pr->b->n_arrows();
    return "(" + pr->a->arrow_label(static_cast<ArrowId>(g / nb)) + "|" +
           pr->b->arrow_label(static_cast<ArrowId>(g % nb)) + ")";
  }
  if (const auto* un = std::get_if<backend::UnionOf>(&compose_)) {
    auto it = std::upper_bound(un->arrow_base.begin(), un->arrow_base.end(), g);
    const std::size_t part = static_cast<std::size_t>(it - un->arrow_base.begin()) - 1;
    return "p" + std::to_string(part) + ":" +
           un->parts[part]->arrow_label(static_cast<ArrowId>(g - un->arrow_base[part]));
  }
  const auto& re = std::get<backend::RestrictOf>(compose_);
  return re.parent->arrow_label(re.to_parent[g]);
}

// ---- builders ----

GroupoidPtr build_pair_groupoid(const std::vector<PairClass>& classes) {
  if (classes.empty()) raise(ErrorCode::BadParameters, "pair groupoid needs at least one class");
  FiniteGroupoid::Core core;
  backend::PairBlocks pb;
  std::size_t arrow_count = 0;
  for (const auto& cls : classes) {
    if (cls.units.empty()) raise(ErrorCode::BadParameters, "empty pair class");
    if (cls.member_weight <= 0) {
      raise(ErrorCode::UnequalClassWeights, "class weight must be positive");
    }
    arrow_count += cls.units.size() * cls.units.size();
  }
  core.arrows.reserve(arrow_count);
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const auto& cls = classes[c];
    const std::size_t k = cls.units.size();
    const UnitId first = static_cast<UnitId>(core.unit_names.size());
    std::vector<UnitId> members(k);
    for (std::size_t i = 0; i < k; ++i) {
      members[i] = static_cast<UnitId>(first + i);
      core.unit_names.push_back(cls.units[i]);
      core.weights.push_back(cls.member_weight);
      pb.class_of_unit.push_back(static_cast<std::uint32_t>(c));
      pb.pos_in_class.push_back(static_cast<std::uint32_t>(i));
    }
    const std::size_t base = core.arrows.size();
    pb.arrow_base.push_back(base);
    pb.members.push_back(members);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        core.arrows.push_back(Arrow{members[j], members[i],
                                    static_cast<ArrowId>(base + j * k + i)});
      }
    }
    for (std::size_t i = 0; i < k; ++i) {
      core.unit_arrow.push_back(static_cast<ArrowId>(base + i * k + i));
    }
  }
  core.compose = std::move(pb);
  core.meta["construction"] = "pair";
  return std::make_shared<FiniteGroupoid>(std::move(core));
}

GroupoidPtr pair_full(int n) {
  if (n < 1) raise(ErrorCode::BadParameters, "pair_full needs n >= 1");
  PairClass cls;
  cls.member_weight = Rat(1, n);
  cls.units.reserve(n);
  for (int i = 0; i < n; ++i) cls.units.push_back(std::to_string(i));
  return build_pair_groupoid({cls});
}

GroupoidPtr build_group_groupoid(const GroupTable& table, const std::string& unit_name,
                                 const Rat& weight) {
  return build_group_bundle({BundleUnit{unit_name, weight, table}});
}

GroupoidPtr build_group_bundle(const std::vector<BundleUnit>& units) {
  if (units.empty()) raise(ErrorCode::BadParameters, "bundle needs at least one unit");
  FiniteGroupoid::Core core;
  backend::Bundle bk;
  for (const auto& u : units) {
    check_group_axioms(u.group);
    const UnitId x = static_cast<UnitId>(core.unit_names.size());
    const std::size_t base = core.arrows.size();
    core.unit_names.push_back(u.name);
    core.weights.push_back(u.weight);
    bk.tables.push_back(u.group);
    bk.arrow_base.push_back(base);
    for (std::size_t e = 0; e < u.group.order(); ++e) {
      core.arrows.push_back(Arrow{x, x, static_cast<ArrowId>(base + u.group.inv[e])});
    }
    core.unit_arrow.push_back(static_cast<ArrowId>(base));
  }
  core.compose = std::move(bk);
  core.meta["construction"] = "bundle";
  return std::make_shared<FiniteGroupoid>(std::move(core));
}

GroupoidPtr product_groupoid(const GroupoidPtr& a, const GroupoidPtr& b) {
  if (!a || !b) raise(ErrorCode::BadParameters, "product of null groupoids");
  FiniteGroupoid::Core core;
  const std::size_t nua = a->n_units(), nub = b->n_units();
  const std::size_t naa = a->n_arrows(), nab = b->n_arrows();
  core.unit_names.reserve(nua * nub);
  core.weights.reserve(nua * nub);
  for (std::size_t ua = 0; ua < nua; ++ua) {
    for (std::size_t ub = 0; ub < nub; ++ub) {
      core.unit_names.push_back("(" + a->unit_name(static_cast<UnitId>(ua)) + "|" +
                                b->unit_name(static_cast<UnitId>(ub)) + ")");
      core.weights.push_back(a->weight(static_cast<UnitId>(ua)) * b->weight(static_cast<UnitId>(ub)));
    }
  }
  core.arrows.reserve(naa * nab);
  for (std::size_t ia = 0; ia < naa; ++ia) {
    for (std::size_t ib = 0; ib < nab; ++ib) {
      const Arrow aa{a->src(static_cast<ArrowId>(ia)), a->tgt(static_cast<ArrowId>(ia)),
                     a->inv(static_cast<ArrowId>(ia))};
      const Arrow bb{b->src(static_cast<ArrowId>(ib)), b->tgt(static_cast<ArrowId>(ib)),
                     b->inv(static_cast<ArrowId>(ib))};
      core.arrows.push_back(Arrow{static_cast<UnitId>(aa.src * nub + bb.src),
                                  static_cast<UnitId>(aa.tgt * nub + bb.tgt),
                                  static_cast<ArrowId>(aa.inv * nab + bb.inv)});
    }
  }
  core.unit_arrow.reserve(nua * nub);
  for (std::size_t ua = 0; ua < nua; ++ua) {
    for (std::size_t ub = 0; ub < nub; ++ub) {
      core.unit_arrow.push_back(static_cast<ArrowId>(
          a->unit_arrow(static_cast<UnitId>(ua)) * nab + b->unit_arrow(static_cast<UnitId>(ub))));
    }
  }
  core.compose = backend::ProductOf{a, b};
  core.meta["construction"] = "product";
  return std::make_shared<FiniteGroupoid>(std::move(core));
}

GroupoidPtr disjoint_union(const std::vector<GroupoidPtr>& parts, const std::vector<Rat>& scales) {
  if (parts.empty()) raise(ErrorCode::EmptyUnion, "disjoint union of no parts");
  if (parts.size() != scales.size()) {
    raise(ErrorCode::BadParameters, "one scale per union part required");
  }
  FiniteGroupoid::Core core;
  backend::UnionOf un;
  un.parts = parts;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    if (!parts[p]) raise(ErrorCode::BadParameters, "null union part");
    if (scales[p] <= 0) raise(ErrorCode::BadParameters, "union scales must be positive");
    const auto& g = *parts[p];
    const std::size_t unit_base = core.unit_names.size();
    const std::size_t arrow_base = core.arrows.size();
    un.unit_base.push_back(unit_base);
    un.arrow_base.push_back(arrow_base);
    for (UnitId x = 0; x < g.n_units(); ++x) {
      core.unit_names.push_back("p" + std::to_string(p) + ":" + g.unit_name(x));
      core.weights.push_back(scales[p] * g.weight(x));
    }
    for (ArrowId a = 0; a < g.n_arrows(); ++a) {
      core.arrows.push_back(Arrow{static_cast<UnitId>(unit_base + g.src(a)),
                                  static_cast<UnitId>(unit_base + g.tgt(a)),
                                  static_cast<ArrowId>(arrow_base + g.inv(a))});
    }
    for (UnitId x = 0; x < g.n_units(); ++x) {
      core.unit_arrow.push_back(static_cast<ArrowId>(arrow_base + g.unit_arrow(x)));
    }
  }
  core.compose = std::move(un);
  core.meta["construction"] = "union";
  return std::make_shared<FiniteGroupoid>(std::move(core));
}

GroupoidPtr restrict_groupoid(const GroupoidPtr& g, const UnitSet& set) {
  if (!g) raise(ErrorCode::BadParameters, "restrict of null groupoid");
  if (set.empty()) raise(ErrorCode::NullSet, "restriction to an empty unit set");
  for (UnitId x : set) {
    if (x >= g->n_units()) raise(ErrorCode::BadParameters, "unit index out of range");
  }
  const Rat mass = unit_set_mass(*g, set);
  if (mass == 0) raise(ErrorCode::NullSet, "restriction to a null set");

  std::vector<UnitId> new_of_old(g->n_units(), static_cast<UnitId>(-1));
  for (std::size_t i = 0; i < set.size(); ++i) new_of_old[set[i]] = static_cast<UnitId>(i);

  FiniteGroupoid::Core core;
  backend::RestrictOf re;
  re.parent = g;
  for (UnitId x : set) {
    core.unit_names.push_back(g->unit_name(x));
    core.weights.push_back(g->weight(x) / mass);
  }
  std::vector<ArrowId> arrow_of_parent(g->n_arrows(), kInvalidArrow);
  for (ArrowId a = 0; a < g->n_arrows(); ++a) {
    if (new_of_old[g->src(a)] != static_cast<UnitId>(-1) &&
        new_of_old[g->tgt(a)] != static_cast<UnitId>(-1)) {
      const ArrowId child = static_cast<ArrowId>(re.to_parent.size());
      arrow_of_parent[a] = child;
      re.to_parent.push_back(a);
      re.from_parent.emplace(a, child);
      core.arrows.push_back(Arrow{new_of_old[g->src(a)], new_of_old[g->tgt(a)], kInvalidArrow});
    }
  }
  for (std::size_t i = 0; i < core.arrows.size(); ++i) {
    core.arrows[i].inv = arrow_of_parent[g->inv(re.to_parent[i])];
  }
  for (UnitId x : set) {
    core.unit_arrow.push_back(arrow_of_parent[g->unit_arrow(x)]);
  }
  core.compose = std::move(re);
  core.meta["construction"] = "restriction";
  return std::make_shared<FiniteGroupoid>(std::move(core));
}

GroupoidPtr build_from_parts(const std::vector<std::string>& unit_names,
                             const std::vector<Rat>& weights,
                             const std::vector<ExplicitArrow>& arrows,
                             const std::vector<std::array<std::string, 3>>& compose) {
  if (unit_names.size() != weights.size()) {
    raise(ErrorCode::BadParameters, "unit/weight count mismatch");
  }
  std::unordered_map<std::string, UnitId> unit_of;
  for (std::size_t i = 0; i < unit_names.size(); ++i) {
    if (!unit_of.emplace(unit_names[i], static_cast<UnitId>(i)).second) {
      raise(ErrorCode::DuplicateUnit, "duplicate unit name: " + unit_names[i]);
    }
  }
  std::unordered_map<std::string, ArrowId> arrow_of;
  for (std::size_t i = 0; i < arrows.size(); ++i) {
    if (!arrow_of.emplace(arrows[i].name, static_cast<ArrowId>(i)).second) {
      raise(ErrorCode::BadParameters, "duplicate arrow name: " + arrows[i].name);
    }
  }
  auto need_unit = [&](const std::string& n) {
    auto it = unit_of.find(n);
    if (it == unit_of.end()) raise(ErrorCode::ParseError, "unknown unit: " + n);
    return it->second;
  };
  auto need_arrow = [&](const std::string& n) {
    auto it = arrow_of.find(n);
    if (it == arrow_of.end()) raise(ErrorCode::ParseError, "unknown arrow: " + n);
    return it->second;
  };

  FiniteGroupoid::Core core;
  core.unit_names = unit_names;
  core.weights = weights;
  backend::Table table;
  for (const auto& a : arrows) {
    core.arrows.push_back(Arrow{need_unit(a.src), need_unit(a.tgt), need_arrow(a.inv)});
    table.arrow_names.push_back(a.name);
  }
  for (const auto& triple : compose) {
    const ArrowId g = need_arrow(triple[0]);
    const ArrowId h = need_arrow(triple[1]);
    const ArrowId gh = need_arrow(triple[2]);
    const std::uint64_t key = (std::uint64_t(g) << 32) | h;
    auto [it, fresh] = table.map.emplace(key, gh);
    if (!fresh && it->second != gh) {
      raise(ErrorCode::ParseError, "conflicting composition entries");
    }
  }
  // Unit arrows are determined structurally: e is the unique arrow with
  // src = tgt = x and e.e = e.
  core.unit_arrow.assign(unit_names.size(), kInvalidArrow);
  for (ArrowId g = 0; g < core.arrows.size(); ++g) {
    const Arrow& a = core.arrows[g];
    if (a.src != a.tgt) continue;
    auto it = table.map.find((std::uint64_t(g) << 32) | g);
    if (it != table.map.end() && it->second == g) {
      if (core.unit_arrow[a.src] != kInvalidArrow) {
        raise(ErrorCode::ParseError, "two idempotent loops at unit " + unit_names[a.src]);
      }
      core.unit_arrow[a.src] = g;
    }
  }
  for (std::size_t x = 0; x < unit_names.size(); ++x) {
    if (core.unit_arrow[x] == kInvalidArrow) {
      raise(ErrorCode::ParseError, "no identity arrow at unit " + unit_names[x]);
    }
  }
  core.compose = std::move(table);
  core.meta["construction"] = "explicit";
  return std::make_shared<FiniteGroupoid>(std::move(core));
}

// ---- unit sets, orbits, invariance ----

UnitSet full_unit_set(const FiniteGroupoid& g) {
  UnitSet all(g.n_units());
  std::iota(all.begin(), all.end(), 0);
  return all;
}

UnitSet make_unit_set(std::vector<UnitId> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

Rat unit_set_mass(const FiniteGroupoid& g, const UnitSet& set) {
  Rat m(0);
  for (UnitId x : set) m += g.weight(x);
  return m;
}

namespace {

struct UnionFind {
  std::vector<UnitId> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  UnitId find(UnitId x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(UnitId a, UnitId b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

} // namespace

std::vector<UnitSet> orbits(const FiniteGroupoid& g) {
  UnionFind uf(g.n_units());
  for (ArrowId a = 0; a < g.n_arrows(); ++a) uf.unite(g.src(a), g.tgt(a));
  std::map<UnitId, UnitSet> buckets;
  for (UnitId x = 0; x < g.n_units(); ++x) buckets[uf.find(x)].push_back(x);
  std::vector<UnitSet> out;
  out.reserve(buckets.size());
  for (auto& [root, members] : buckets) out.push_back(std::move(members));
  return out;
}

bool is_invariant(const FiniteGroupoid& g, const UnitSet& set) {
  std::vector<char> in(g.n_units(), 0);
  for (UnitId x : set) in[x] = 1;
  for (ArrowId a = 0; a < g.n_arrows(); ++a) {
    if (in[g.src(a)] != in[g.tgt(a)]) return false;
  }
  return true;
}

// ---- validation ----

std::vector<Diagnostic> validate(const FiniteGroupoid& g, const ValidateOptions& opts) {
  std::vector<Diagnostic> out;
  auto report = [&out](const char* code, std::string msg) {
    if (out.size() < 64) out.push_back(Diagnostic{code, std::move(msg)});
  };

  for (UnitId x = 0; x < g.n_units(); ++x) {
    if (g.weight(x) <= 0) report("measure.nonpositive", "unit " + g.unit_name(x));
  }

  for (ArrowId a = 0; a < g.n_arrows(); ++a) {
    const ArrowId ia = g.inv(a);
    if (g.inv(ia) != a) report("inverse.not_involutive", g.arrow_label(a));
    if (g.src(ia) != g.tgt(a) || g.tgt(ia) != g.src(a)) {
      report("inverse.endpoints", g.arrow_label(a));
    }
  }

  for (ArrowId a = 0; a < g.n_arrows(); ++a) {
    const ArrowId er = g.unit_arrow(g.src(a));
    const ArrowId el = g.unit_arrow(g.tgt(a));
    const auto right = g.try_compose(a, er);
    const auto left = g.try_compose(el, a);
    if (!right || *right != a) report("identity.right", g.arrow_label(a));
    if (!left || *left != a) report("identity.left", g.arrow_label(a));
    const auto gi = g.try_compose(a, g.inv(a));
    const auto ig = g.try_compose(g.inv(a), a);
    if (!gi || *gi != g.unit_arrow(g.tgt(a))) report("inverse.right", g.arrow_label(a));
    if (!ig || *ig != g.unit_arrow(g.src(a))) report("inverse.left", g.arrow_label(a));
  }

  // Composability domain and endpoint bookkeeping.
  std::size_t pair_budget = opts.max_assoc_checks;
  for (ArrowId a = 0; a < g.n_arrows() && pair_budget > 0; ++a) {
    for (ArrowId h : g.target_fiber(g.src(a))) {
      if (pair_budget-- == 0) break;
      const auto c = g.try_compose(a, h);
      if (!c) {
        report("compose.missing", g.arrow_label(a) + " . " + g.arrow_label(h));
        continue;
      }
      if (g.src(*c) != g.src(h) || g.tgt(*c) != g.tgt(a)) {
        report("compose.endpoints", g.arrow_label(a) + " . " + g.arrow_label(h));
      }
    }
  }
  if (const auto* t = std::get_if<backend::Table>(&g.compose_backend())) {
    for (const auto& [key, val] : t->map) {
      const ArrowId a = static_cast<ArrowId>(key >> 32);
      const ArrowId h = static_cast<ArrowId>(key & 0xFFFFFFFFu);
      if (a >= g.n_arrows() || h >= g.n_arrows() || val >= g.n_arrows()) {
        report("compose.bad_index", "table entry out of range");
        continue;
      }
      if (!g.composable(a, h)) {
        report("compose.spurious", g.arrow_label(a) + " . " + g.arrow_label(h));
      }
    }
  }

  std::size_t assoc_budget = opts.max_assoc_checks;
  for (ArrowId a = 0; a < g.n_arrows() && assoc_budget > 0; ++a) {
    for (ArrowId h : g.target_fiber(g.src(a))) {
      if (assoc_budget == 0) break;
      for (ArrowId k : g.target_fiber(g.src(h))) {
        if (assoc_budget-- == 0) break;
        const ArrowId ah = g.compose(a, h);
        const ArrowId hk = g.compose(h, k);
        if (g.compose(ah, k) != g.compose(a, hk)) {
          report("compose.not_associative",
                 g.arrow_label(a) + " . " + g.arrow_label(h) + " . " + g.arrow_label(k));
        }
      }
    }
  }

  for (ArrowId a = 0; a < g.n_arrows(); ++a) {
    if (g.weight(g.src(a)) != g.weight(g.tgt(a))) {
      report("measure.not_preserving",
             g.arrow_label(a) + ": mu(src) = " + format_rational(g.weight(g.src(a))) +
                 ", mu(tgt) = " + format_rational(g.weight(g.tgt(a))));
      break;
    }
  }
  if (!g.is_probability()) {
    report("measure.not_probability", "total mass = " + format_rational(g.total_mass()));
  }
  return out;
}

// ---- bisections ----

bool is_bisection(const FiniteGroupoid& g, const Bisection& b) {
  std::vector<char> src_seen(g.n_units(), 0), tgt_seen(g.n_units(), 0);
  for (ArrowId a : b) {
    if (a >= g.n_arrows()) return false;
    if (src_seen[g.src(a)]++ || tgt_seen[g.tgt(a)]++) return false;
  }
  return true;
}

bool is_full_bisection(const FiniteGroupoid& g, const Bisection& b) {
  return b.size() == g.n_units() && is_bisection(g, b);
}

std::vector<Bisection> full_bisections(const FiniteGroupoid& g, std::size_t limit) {
  std::vector<Bisection> out;
  std::vector<char> src_used(g.n_units(), 0);
  Bisection current;
  current.reserve(g.n_units());

  auto rec = [&](auto&& self, UnitId x) -> void {
    if (x == g.n_units()) {
      Bisection sorted = current;
      std::sort(sorted.begin(), sorted.end());
      out.push_back(std::move(sorted));
      if (out.size() > limit) {
        raise(ErrorCode::TooManyBisections,
              "more than " + std::to_string(limit) + " full bisections");
      }
      return;
    }
    for (ArrowId a : g.target_fiber(x)) {
      if (src_used[g.src(a)]) continue;
      src_used[g.src(a)] = 1;
      current.push_back(a);
      self(self, x + 1);
      current.pop_back();
      src_used[g.src(a)] = 0;
    }
  };
  rec(rec, 0);
  std::sort(out.begin(), out.end());
  return out;
}

Bisection compose_bisections(const FiniteGroupoid& g, const Bisection& a, const Bisection& b) {
  Bisection out;
  for (ArrowId x : a) {
    for (ArrowId y : b) {
      if (g.composable(x, y)) out.push_back(g.compose(x, y));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (!is_bisection(g, out)) {
    raise(ErrorCode::NotABisection, "composition of bisections is not a bisection");
  }
  return out;
}

Bisection inverse_bisection(const FiniteGroupoid& g, const Bisection& b) {
  Bisection out;
  out.reserve(b.size());
  for (ArrowId a : b) out.push_back(g.inv(a));
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace ggk
