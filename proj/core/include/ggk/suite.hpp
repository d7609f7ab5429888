#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ggk/constructions.hpp"

namespace ggk {

// One deterministic random test instance: a normalized measure-preserving
// groupoid carrying three independent symmetric probability fields.
struct SuiteInstance {
  SuiteMember member; // name, groupoid, primary field
  Kernel<Rat> second;
  Kernel<Rat> third;
};

struct SuiteOptions {
  std::uint64_t seed = 1729;
  std::size_t count = 500;
  std::size_t max_arrows = 64;
};

// Same (seed, index) always yields the same instance, bit for bit.
SuiteInstance random_instance(std::uint64_t seed, std::size_t index, std::size_t max_arrows = 64);
std::vector<SuiteInstance> random_suite(const SuiteOptions& opts = {});

struct CheckResult {
  std::string instance;
  std::string check;
  std::string detail;
};

// Exact identities: measure preservation, fiber sums, the convolution algebra
// (associativity, identity, involution anti-homomorphism), and the operator
// homomorphism. Rational arithmetic throughout; any failure is returned.
std::vector<CheckResult> check_field_algebra(const std::vector<SuiteInstance>& suite);

// The two-sided bound |pi|_2 <= |P| <= |pi|_I and self-adjointness of the
// operator of a symmetric field.
std::vector<CheckResult> check_norm_bounds(const std::vector<SuiteInstance>& suite);

// Restriction to every invariant unit set keeps operator norm 1.
std::vector<CheckResult> check_invariant_norms(const std::vector<SuiteMember>& members,
                                               double tol = 1e-9);
std::vector<CheckResult> check_invariant_norms(const std::vector<SuiteInstance>& suite,
                                               double tol = 1e-9);

// Return-probability growth on the full unit set: monotone, bounded by the
// operator norm, both counting routes equal, and the spectral-measure radius
// equal to the norm.
std::vector<CheckResult> check_return_growth(const std::vector<SuiteInstance>& suite);

struct SelftestReport {
  std::size_t instances = 0;
  std::size_t sections = 0;
  std::vector<CheckResult> failures;
  bool pass() const { return failures.empty(); }
};

// The whole battery over a fresh random suite plus the fixed group suite.
SelftestReport run_selftest(const SuiteOptions& opts = {});

} // namespace ggk
