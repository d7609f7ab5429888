#include "ggk/suite.hpp"

#include <algorithm>
#include <cmath>

#include "ggk/rng.hpp"
#include "ggk/spectral.hpp"

namespace ggk {

namespace {

constexpr int kFields = 3;

std::uint64_t draw(SplitMix64& rng, std::uint64_t n) { return rng.next() % n; }

long numer(SplitMix64& rng, long hi = 8) { return 1 + static_cast<long>(draw(rng, hi)); }

std::vector<std::uint32_t> permutation(SplitMix64& rng, std::size_t n) {
  std::vector<std::uint32_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<std::uint32_t>(i);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(p[i - 1], p[draw(rng, i)]);
  }
  return p;
}

struct Node {
  GroupoidPtr g;
  std::vector<Kernel<Rat>> fields;
  std::string name;
};

// Symmetrized mixture of permutation matrices: each permutation enters
// together with its inverse, so the field is symmetric, and every fiber sum
// is exactly one.
void pair_class_field(SplitMix64& rng, std::size_t k, std::size_t base,
                      std::vector<std::pair<ArrowId, Rat>>& out) {
  const int m = 1 + static_cast<int>(draw(rng, 3));
  std::vector<std::pair<ArrowId, long>> acc;
  long total = 0;
  for (int s = 0; s < m; ++s) {
    const long u = numer(rng);
    total += 2 * u;
    const auto p = permutation(rng, k);
    for (std::size_t i = 0; i < k; ++i) {
      acc.emplace_back(static_cast<ArrowId>(base + i * k + p[i]), u);
      acc.emplace_back(static_cast<ArrowId>(base + std::size_t(p[i]) * k + i), u);
    }
  }
  for (const auto& [a, u] : acc) out.emplace_back(a, rat(u, total));
}

Node leaf_pair(SplitMix64& rng, std::size_t budget) {
  const std::size_t kmax = std::min<std::size_t>(8, static_cast<std::size_t>(std::sqrt(double(budget))));
  std::vector<std::size_t> sizes;
  std::size_t k1 = 2 + draw(rng, kmax - 1);
  sizes.push_back(k1);
  if (draw(rng, 4) == 0 && budget >= k1 * k1 + 1) {
    const std::size_t room = static_cast<std::size_t>(std::sqrt(double(budget - k1 * k1)));
    if (room >= 1) sizes.push_back(1 + draw(rng, room));
  }
  std::vector<PairClass> classes;
  std::vector<long> numers;
  long denom = 0;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    PairClass pc;
    const char tag = static_cast<char>('a' + c);
    for (std::size_t i = 0; i < sizes[c]; ++i) pc.units.push_back(tag + std::to_string(i));
    classes.push_back(std::move(pc));
    const long a = numer(rng);
    numers.push_back(a);
    denom += a * static_cast<long>(sizes[c]);
  }
  for (std::size_t c = 0; c < sizes.size(); ++c) classes[c].member_weight = rat(numers[c], denom);
  GroupoidPtr g = build_pair_groupoid(classes);

  const auto* pb = std::get_if<backend::PairBlocks>(&g->compose_backend());
  std::vector<Kernel<Rat>> fields;
  for (int f = 0; f < kFields; ++f) {
    std::vector<std::pair<ArrowId, Rat>> vals;
    for (std::size_t c = 0; c < sizes.size(); ++c) {
      pair_class_field(rng, sizes[c], pb->arrow_base[c], vals);
    }
    fields.emplace_back(g, SparseArrowMap<Rat>::from_unsorted(std::move(vals)));
  }
  std::string name = "pair(" + std::to_string(sizes[0]);
  if (sizes.size() > 1) name += "+" + std::to_string(sizes[1]);
  name += ")";
  return {g, std::move(fields), std::move(name)};
}

struct TablePick {
  GroupTable table;
  std::string name;
};

TablePick pick_table(SplitMix64& rng, std::size_t budget) {
  std::vector<TablePick> pool;
  for (int n = 2; n <= 12; ++n) {
    if (std::size_t(n) <= budget) pool.push_back({GroupTable::cyclic(n), "Z" + std::to_string(n)});
  }
  for (int m = 2; m <= 4; ++m) {
    if (std::size_t(2 * m) <= budget) {
      pool.push_back({GroupTable::dihedral(m), "D" + std::to_string(m)});
    }
  }
  const int sq[][2] = {{2, 2}, {2, 4}, {3, 3}, {2, 6}};
  for (const auto& s : sq) {
    if (std::size_t(s[0] * s[1]) <= budget) {
      pool.push_back({GroupTable::direct_product(GroupTable::cyclic(s[0]), GroupTable::cyclic(s[1])),
                      "Z" + std::to_string(s[0]) + "xZ" + std::to_string(s[1])});
    }
  }
  return pool[draw(rng, pool.size())];
}

// Weighted loops on each unit: pick a few inverse-closed arrow pairs per
// fiber and give the pair a common weight.
void loop_fiber_field(SplitMix64& rng, const FiniteGroupoid& g, UnitId x,
                      std::vector<std::pair<ArrowId, Rat>>& out) {
  const auto& fiber = g.target_fiber(x);
  const int t = 1 + static_cast<int>(draw(rng, 3));
  std::vector<std::pair<ArrowId, long>> acc;
  long total = 0;
  for (int s = 0; s < t; ++s) {
    const ArrowId a = fiber[draw(rng, fiber.size())];
    const long u = numer(rng);
    acc.emplace_back(a, u);
    acc.emplace_back(g.inv(a), u);
    total += 2 * u;
  }
  for (const auto& [a, u] : acc) out.emplace_back(a, rat(u, total));
}

Node leaf_loops(SplitMix64& rng, std::size_t budget) {
  std::size_t n_units = 1 + draw(rng, 3);
  while (budget / n_units < 2) --n_units;
  std::vector<BundleUnit> units;
  std::vector<long> numers;
  long denom = 0;
  std::string name = n_units == 1 ? "" : "bundle(";
  std::size_t left = budget;
  for (std::size_t u = 0; u < n_units; ++u) {
    auto pick = pick_table(rng, left / (n_units - u));
    left -= pick.table.order();
    if (u > 0) name += "|";
    name += pick.name;
    const long a = numer(rng);
    numers.push_back(a);
    denom += a;
    units.push_back({"u" + std::to_string(u), Rat(), std::move(pick.table)});
  }
  if (n_units > 1) name += ")";
  for (std::size_t u = 0; u < n_units; ++u) units[u].weight = rat(numers[u], denom);
  GroupoidPtr g = build_group_bundle(units);

  std::vector<Kernel<Rat>> fields;
  for (int f = 0; f < kFields; ++f) {
    std::vector<std::pair<ArrowId, Rat>> vals;
    for (UnitId x = 0; x < g->n_units(); ++x) loop_fiber_field(rng, *g, x, vals);
    fields.emplace_back(g, SparseArrowMap<Rat>::from_unsorted(std::move(vals)));
  }
  return {g, std::move(fields), std::move(name)};
}

Node make_leaf(SplitMix64& rng, std::size_t budget) {
  if (budget >= 4 && draw(rng, 2) == 0) return leaf_pair(rng, budget);
  return leaf_loops(rng, budget);
}

Node make_node(SplitMix64& rng, std::size_t budget, int depth);

Node make_product(SplitMix64& rng, std::size_t budget, int depth) {
  const std::size_t b1 = 4 + draw(rng, 5); // 4..8
  Node a = make_node(rng, b1, depth + 1);
  const std::size_t n1 = a.g->n_arrows();
  const std::size_t b2 = budget / n1;
  if (b2 < 2) return a;
  Node b = make_node(rng, b2, depth + 1);
  GroupoidPtr g = product_groupoid(a.g, b.g);
  std::vector<Kernel<Rat>> fields;
  for (int f = 0; f < kFields; ++f) fields.push_back(product_field(g, a.fields[f], b.fields[f]));
  return {g, std::move(fields), "prod(" + a.name + "," + b.name + ")"};
}

Node make_union(SplitMix64& rng, std::size_t budget, int depth) {
  const std::size_t k = 2 + draw(rng, 2);
  std::vector<Node> parts;
  std::size_t left = budget;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t alloc = std::max<std::size_t>(2, left / (k - i));
    Node p = make_node(rng, alloc, depth + 1);
    left -= std::min(left, p.g->n_arrows());
    parts.push_back(std::move(p));
    if (left < 2 && i + 1 < k) break;
  }
  std::vector<GroupoidPtr> gs;
  std::vector<Rat> scales;
  long denom = 0;
  std::vector<long> numers;
  for (auto& p : parts) {
    gs.push_back(p.g);
    const long a = numer(rng);
    numers.push_back(a);
    denom += a;
  }
  for (long a : numers) scales.push_back(rat(a, denom));
  GroupoidPtr g = disjoint_union(gs, scales);
  std::vector<Kernel<Rat>> fields;
  std::string name = "union(";
  for (std::size_t i = 0; i < parts.size(); ++i) name += (i ? "," : "") + parts[i].name;
  name += ")";
  for (int f = 0; f < kFields; ++f) {
    std::vector<Kernel<Rat>> pieces;
    for (auto& p : parts) pieces.push_back(p.fields[f]);
    fields.push_back(union_field(g, pieces));
  }
  return {g, std::move(fields), std::move(name)};
}

Node make_restrict(SplitMix64& rng, std::size_t budget, int depth) {
  Node child = make_node(rng, budget, depth + 1);
  const auto orb = orbits(*child.g);
  if (orb.size() < 2 || orb.size() > 16) return child;
  const std::uint64_t mask = 1 + draw(rng, (std::uint64_t(1) << orb.size()) - 2);
  std::vector<UnitId> ids;
  for (std::size_t i = 0; i < orb.size(); ++i) {
    if (mask & (std::uint64_t(1) << i)) ids.insert(ids.end(), orb[i].begin(), orb[i].end());
  }
  // restriction renormalizes to the conditional measure, so the result is
  // again a probability space
  GroupoidPtr sub = restrict_groupoid(child.g, make_unit_set(std::move(ids)));
  std::vector<Kernel<Rat>> sub_fields;
  for (int f = 0; f < kFields; ++f) sub_fields.push_back(restrict_field(sub, child.fields[f]));
  return {sub, std::move(sub_fields), "sub(" + child.name + ")"};
}

Node make_node(SplitMix64& rng, std::size_t budget, int depth) {
  if (depth >= 2 || budget < 6) return make_leaf(rng, budget);
  const std::uint64_t roll = draw(rng, 100);
  if (roll < 45) return make_leaf(rng, budget);
  if (roll < 60 && budget >= 8) return make_product(rng, budget, depth);
  if (roll < 85) return make_union(rng, budget, depth);
  return make_restrict(rng, budget, depth);
}

void add_fail(std::vector<CheckResult>& out, const std::string& inst, const std::string& check,
              std::string detail) {
  out.push_back({inst, check, std::move(detail)});
}

bool kernels_equal(const Kernel<Rat>& a, const Kernel<Rat>& b) {
  return a.values().entries() == b.values().entries();
}

} // namespace

SuiteInstance random_instance(std::uint64_t seed, std::size_t index, std::size_t max_arrows) {
  for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
    SplitMix64 rng = counter_stream(seed, index * 64 + attempt);
    Node n = make_node(rng, max_arrows, 0);
    if (n.g->n_arrows() > max_arrows) continue;
    if (!n.g->is_pmp()) continue;
    if (orbits(*n.g).size() > 10) continue;
    char tag[16];
    std::snprintf(tag, sizeof tag, "i%03zu:", index);
    return {{tag + n.name, n.g, std::move(n.fields[0])},
            std::move(n.fields[1]),
            std::move(n.fields[2])};
  }
  raise(ErrorCode::BadParameters, "random instance generation ran out of attempts");
}

std::vector<SuiteInstance> random_suite(const SuiteOptions& opts) {
  std::vector<SuiteInstance> out;
  out.reserve(opts.count);
  for (std::size_t i = 0; i < opts.count; ++i) {
    out.push_back(random_instance(opts.seed, i, opts.max_arrows));
  }
  return out;
}

std::vector<CheckResult> check_field_algebra(const std::vector<SuiteInstance>& suite) {
  std::vector<CheckResult> fails;
  for (const auto& inst : suite) {
    const auto& g = inst.member.groupoid;
    const auto& name = inst.member.name;
    if (!g->is_pmp()) {
      add_fail(fails, name, "pmp", "groupoid is not a normalized p.m.p. space");
      continue;
    }
    for (ArrowId a = 0; a < g->n_arrows(); ++a) {
      if (g->weight(g->src(a)) != g->weight(g->tgt(a))) {
        add_fail(fails, name, "measure-preserving", "arrow " + g->arrow_label(a));
        break;
      }
    }
    const Kernel<Rat>* fs[] = {&inst.member.field, &inst.second, &inst.third};
    for (int i = 0; i < kFields; ++i) {
      const auto& f = *fs[i];
      const std::string which = "field" + std::to_string(i + 1);
      if (!f.is_symmetric()) add_fail(fails, name, which + ".symmetric", "");
      if (!f.is_probability_field()) add_fail(fails, name, which + ".probability", "");
      for (const auto& [a, v] : f.values().entries()) {
        if (v < 0) {
          add_fail(fails, name, which + ".nonnegative", g->arrow_label(a));
          break;
        }
      }
      for (UnitId x = 0; x < g->n_units(); ++x) {
        if (f.target_fiber_sum(x) != 1) {
          add_fail(fails, name, which + ".fiber-sum", g->unit_name(x));
          break;
        }
      }
    }
    const auto& f1 = inst.member.field;
    const auto& f2 = inst.second;
    const auto& f3 = inst.third;
    const auto c12 = convolve(f1, f2);
    const auto c23 = convolve(f2, f3);
    if (!kernels_equal(convolve(c12, f3), convolve(f1, c23))) {
      add_fail(fails, name, "convolution.associative", "");
    }
    const auto eps = identity_kernel<Rat>(g);
    if (!kernels_equal(convolve(f1, eps), f1) || !kernels_equal(convolve(eps, f1), f1)) {
      add_fail(fails, name, "convolution.identity", "");
    }
    if (!kernels_equal(involution(f1), f1)) {
      add_fail(fails, name, "involution.fixes-symmetric", "");
    }
    if (!kernels_equal(involution(c12), convolve(involution(f2), involution(f1)))) {
      add_fail(fails, name, "involution.anti-homomorphism", "");
    }
    const MarkovOperator<Rat> p1(f1);
    const MarkovOperator<Rat> p2(f2);
    const MarkovOperator<Rat> p12(c12);
    bool hom = true;
    for (ArrowId a = 0; a < g->n_arrows() && hom; ++a) {
      L2Vector<Rat> d(g, SparseArrowMap<Rat>::from_unsorted({{a, Rat(1)}}));
      hom = p12.apply(d).values().entries() == p1.apply(p2.apply(d)).values().entries();
    }
    if (!hom) add_fail(fails, name, "operator.homomorphism", "");
  }
  return fails;
}

std::vector<CheckResult> check_norm_bounds(const std::vector<SuiteInstance>& suite) {
  std::vector<CheckResult> fails;
  for (const auto& inst : suite) {
    const auto& name = inst.member.name;
    const Kernel<Rat>* fs[] = {&inst.member.field, &inst.second, &inst.third};
    for (int i = 0; i < kFields; ++i) {
      const auto& f = *fs[i];
      const std::string which = "field" + std::to_string(i + 1);
      if (i_norm(f) != 1) {
        add_fail(fails, name, which + ".i-norm-one", format_rational(i_norm(f)));
      }
      const auto kd = kernel_to_double(f);
      const MarkovOperator<double> op(kd);
      const double l2 = std::sqrt(to_double(l2_norm_squared(f)));
      const double in = to_double(i_norm(f));
      const double nv = operator_norm(op).value;
      if (l2 > nv + 1e-10) {
        add_fail(fails, name, which + ".lower-bound",
                 "|pi|_2=" + std::to_string(l2) + " > |P|=" + std::to_string(nv));
      }
      if (nv > in + 1e-10) {
        add_fail(fails, name, which + ".upper-bound",
                 "|P|=" + std::to_string(nv) + " > |pi|_I=" + std::to_string(in));
      }
      const double defect = self_adjointness_defect(op);
      if (defect > 1e-12) {
        add_fail(fails, name, which + ".self-adjoint", std::to_string(defect));
      }
    }
  }
  return fails;
}

std::vector<CheckResult> check_invariant_norms(const std::vector<SuiteMember>& members,
                                               double tol) {
  std::vector<CheckResult> fails;
  for (const auto& m : members) {
    try {
      const auto rep = kesten_check(kernel_to_double(m.field), tol);
      if (!rep.pass) {
        add_fail(fails, m.name, "kesten", "worst deviation " + std::to_string(rep.worst_deviation));
      }
    } catch (const Error& e) {
      add_fail(fails, m.name, "kesten", e.what());
    }
  }
  return fails;
}

std::vector<CheckResult> check_invariant_norms(const std::vector<SuiteInstance>& suite,
                                               double tol) {
  std::vector<SuiteMember> members;
  members.reserve(suite.size());
  for (const auto& inst : suite) members.push_back(inst.member);
  return check_invariant_norms(members, tol);
}

std::vector<CheckResult> check_return_growth(const std::vector<SuiteInstance>& suite) {
  std::vector<CheckResult> fails;
  for (const auto& inst : suite) {
    const auto& name = inst.member.name;
    const auto& g = inst.member.groupoid;
    const UnitSet full = full_unit_set(*g);
    const auto kd = kernel_to_double(inst.member.field);
    SpectralReport rep = e_spectral_radius(kd, full, {});
    if (!rep.monotone_ok) add_fail(fails, name, "growth.monotone", "");
    for (double r : rep.r_seq) {
      if (r > rep.op_norm.value + 1e-12) {
        add_fail(fails, name, "growth.bounded", std::to_string(r - rep.op_norm.value));
        break;
      }
    }
    if (std::abs(rep.rho_exact - rep.op_norm.value) > 1e-10) {
      add_fail(fails, name, "growth.radius-equals-norm",
               std::to_string(rep.rho_exact) + " vs " + std::to_string(rep.op_norm.value));
    }
    if (rep.spectral_gap > 0.05 && std::abs(rep.rho_extrapolated - rep.op_norm.value) > 5e-3) {
      add_fail(fails, name, "growth.extrapolation",
               std::to_string(rep.rho_extrapolated) + " vs " + std::to_string(rep.op_norm.value));
    }
    const MarkovOperator<Rat> op(inst.member.field);
    for (std::size_t n : {1, 2, 5}) {
      if (return_probability_operator(op, full, n) !=
          return_probability_convolution(inst.member.field, full, n)) {
        add_fail(fails, name, "growth.route-mismatch", "n=" + std::to_string(n));
        break;
      }
    }
  }
  return fails;
}

SelftestReport run_selftest(const SuiteOptions& opts) {
  SelftestReport rep;
  const auto suite = random_suite(opts);
  rep.instances = suite.size();
  for (auto& f : check_field_algebra(suite)) rep.failures.push_back(std::move(f));
  for (auto& f : check_norm_bounds(suite)) rep.failures.push_back(std::move(f));
  for (auto& f : check_invariant_norms(suite)) rep.failures.push_back(std::move(f));
  for (auto& f : check_return_growth(suite)) rep.failures.push_back(std::move(f));
  for (auto& f : check_invariant_norms(finite_group_suite())) rep.failures.push_back(std::move(f));
  rep.sections = 5;
  return rep;
}

} // namespace ggk
