#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "ggk/errors.hpp"
#include "ggk/rational.hpp"

namespace ggk {

using UnitId = std::uint32_t;
using ArrowId = std::uint32_t;
inline constexpr ArrowId kInvalidArrow = static_cast<ArrowId>(-1);

// An arrow g: src(g) -> tgt(g). Pair-relation arrows (x, y) follow the
// convention tgt(x,y) = x, src(x,y) = y, with (x,y)(y,z) = (x,z).
struct Arrow {
  UnitId src;
  UnitId tgt;
  ArrowId inv;
};

// Sorted, duplicate-free unit indices.
using UnitSet = std::vector<UnitId>;

// Finite group as a multiplication table; element 0 is the identity.
struct GroupTable {
  std::vector<std::vector<std::uint16_t>> mul;
  std::vector<std::uint16_t> inv;

  std::size_t order() const { return mul.size(); }

  static GroupTable cyclic(int n);
  static GroupTable dihedral(int n); // order 2n
  static GroupTable direct_product(const GroupTable& a, const GroupTable& b);
  // Validates closure, identity at index 0, inverses, associativity.
  static GroupTable from_mul(const std::vector<std::vector<int>>& mul);
};

class FiniteGroupoid;
using GroupoidPtr = std::shared_ptr<const FiniteGroupoid>;

namespace backend {

struct Table {
  // key = (g << 32) | h for composable (g, h)
  std::unordered_map<std::uint64_t, ArrowId> map;
  std::vector<std::string> arrow_names;
};

// Disjoint pair relations: class c has members m_0..m_{k-1}; the arrow
// (x, y) = (members[i], members[j]) sits at arrow_base[c] + i*k + j.
struct PairBlocks {
  std::vector<std::uint32_t> class_of_unit;
  std::vector<std::uint32_t> pos_in_class;
  std::vector<std::vector<UnitId>> members;
  std::vector<std::size_t> arrow_base;
};

// One group per unit; arrows of unit u occupy a contiguous block.
struct Bundle {
  std::vector<GroupTable> tables;
  std::vector<std::size_t> arrow_base;
};

struct ProductOf {
  GroupoidPtr a;
  GroupoidPtr b;
};

struct UnionOf {
  std::vector<GroupoidPtr> parts;
  std::vector<std::size_t> unit_base;
  std::vector<std::size_t> arrow_base;
};

struct RestrictOf {
  GroupoidPtr parent;
  std::vector<ArrowId> to_parent;
  std::unordered_map<ArrowId, ArrowId> from_parent;
};

using Any = std::variant<Table, PairBlocks, Bundle, ProductOf, UnionOf, RestrictOf>;

} // namespace backend

// Immutable finite discrete groupoid with a weighted unit space.
// Thread-safe for concurrent reads after construction.
class FiniteGroupoid {
public:
  struct Core {
    std::vector<std::string> unit_names;
    std::vector<Rat> weights;
    std::vector<Arrow> arrows;
    std::vector<ArrowId> unit_arrow;
    backend::Any compose;
    std::map<std::string, std::string> meta;
  };

  explicit FiniteGroupoid(Core core);

  std::size_t n_units() const { return weights_.size(); }
  std::size_t n_arrows() const { return arrows_.size(); }

  UnitId src(ArrowId g) const { return arrows_[g].src; }
  UnitId tgt(ArrowId g) const { return arrows_[g].tgt; }
  ArrowId inv(ArrowId g) const { return arrows_[g].inv; }
  ArrowId unit_arrow(UnitId x) const { return unit_arrow_[x]; }
  bool is_unit_arrow(ArrowId g) const { return unit_arrow_[arrows_[g].src] == g && arrows_[g].src == arrows_[g].tgt; }

  bool composable(ArrowId g, ArrowId h) const { return arrows_[g].src == arrows_[h].tgt; }
  // gh, defined when src(g) = tgt(h); src(gh) = src(h), tgt(gh) = tgt(g).
  ArrowId compose(ArrowId g, ArrowId h) const;
  std::optional<ArrowId> try_compose(ArrowId g, ArrowId h) const;

  const Rat& weight(UnitId x) const { return weights_[x]; }
  const Rat& total_mass() const { return total_mass_; }
  // mu(src g) = mu(tgt g) for every arrow.
  bool measure_preserving() const { return measure_preserving_; }
  // total mass exactly one.
  bool is_probability() const { return normalized_; }
  bool is_pmp() const { return measure_preserving_ && normalized_; }

  const std::vector<ArrowId>& source_fiber(UnitId x) const { return source_fiber_[x]; }
  const std::vector<ArrowId>& target_fiber(UnitId x) const { return target_fiber_[x]; }

  const std::string& unit_name(UnitId x) const { return unit_names_[x]; }
  std::optional<UnitId> unit_index(const std::string& name) const;
  std::string arrow_label(ArrowId g) const;

  const std::map<std::string, std::string>& meta() const { return meta_; }
  const backend::Any& compose_backend() const { return compose_; }

private:
  std::vector<std::string> unit_names_;
  std::vector<Rat> weights_;
  std::vector<Arrow> arrows_;
  std::vector<ArrowId> unit_arrow_;
  backend::Any compose_;
  std::map<std::string, std::string> meta_;

  std::vector<std::vector<ArrowId>> source_fiber_;
  std::vector<std::vector<ArrowId>> target_fiber_;
  std::unordered_map<std::string, UnitId> name_index_;
  Rat total_mass_;
  bool measure_preserving_ = false;
  bool normalized_ = false;
};

// ---- builders ----

struct PairClass {
  std::vector<std::string> units;
  Rat member_weight; // equal within a class, else not measure-preserving
};

GroupoidPtr build_pair_groupoid(const std::vector<PairClass>& classes);
// Full pair relation on n points with normalized counting measure.
GroupoidPtr pair_full(int n);

GroupoidPtr build_group_groupoid(const GroupTable& table, const std::string& unit_name = "e",
                                 const Rat& weight = Rat(1));

struct BundleUnit {
  std::string name;
  Rat weight;
  GroupTable group;
};
GroupoidPtr build_group_bundle(const std::vector<BundleUnit>& units);

GroupoidPtr product_groupoid(const GroupoidPtr& a, const GroupoidPtr& b);
GroupoidPtr disjoint_union(const std::vector<GroupoidPtr>& parts, const std::vector<Rat>& scales);
// Units restricted to E (any nonempty unit set; arrows with both endpoints in
// E survive); weights renormalized by 1/mu(E).
GroupoidPtr restrict_groupoid(const GroupoidPtr& g, const UnitSet& set);

struct ExplicitArrow {
  std::string name;
  std::string src;
  std::string tgt;
  std::string inv;
};
// Explicit-table groupoid; compose lists every composable pair (g, h, gh) by
// arrow name. Structural indices are checked here; run validate() for axioms.
GroupoidPtr build_from_parts(const std::vector<std::string>& unit_names,
                             const std::vector<Rat>& weights,
                             const std::vector<ExplicitArrow>& arrows,
                             const std::vector<std::array<std::string, 3>>& compose);

// ---- unit sets, orbits, invariance ----

UnitSet full_unit_set(const FiniteGroupoid& g);
UnitSet make_unit_set(std::vector<UnitId> ids); // sorts, dedups
Rat unit_set_mass(const FiniteGroupoid& g, const UnitSet& set);
std::vector<UnitSet> orbits(const FiniteGroupoid& g);
// Exact invariance: E is a union of orbits, equivalently t(src^{-1}(E)) = E.
bool is_invariant(const FiniteGroupoid& g, const UnitSet& set);

// ---- validation ----

struct Diagnostic {
  std::string code;
  std::string message;
};

struct ValidateOptions {
  std::size_t max_assoc_checks = std::size_t(1) << 22;
};

// Structural axioms, identity/inverse laws, composability domain,
// associativity (exhaustive up to the cap), weight positivity, and the
// measure-preserving property. Empty result means valid.
std::vector<Diagnostic> validate(const FiniteGroupoid& g, const ValidateOptions& opts = {});

// ---- bisections ----

using Bisection = std::vector<ArrowId>; // sorted

bool is_bisection(const FiniteGroupoid& g, const Bisection& b);
bool is_full_bisection(const FiniteGroupoid& g, const Bisection& b);
// Every full bisection, lexicographically ordered; TooManyBisections beyond the limit.
std::vector<Bisection> full_bisections(const FiniteGroupoid& g, std::size_t limit = 20000);
Bisection compose_bisections(const FiniteGroupoid& g, const Bisection& a, const Bisection& b);
Bisection inverse_bisection(const FiniteGroupoid& g, const Bisection& b);

} // namespace ggk
