#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ggk/markov.hpp"

namespace ggk {

// ---- norm-unbounded one-parameter family on the full pair relation ----
//
// Every column of the n-by-n matrix equals x_eps = (1-eps, eps/(n-1), ...,
// eps/(n-1)); the matrix is rank one with exact column sums 1 and 2-norm
// sqrt(n * F(eps)), F(eps) = (1-eps)^2 + eps^2/(n-1). Picking eps0 as the
// dyadic rational closest to delta / (2 sqrt(n)) puts the norm strictly above
// sqrt(n) - delta, so the family witnesses unbounded operator norm while each
// member stays a probability field.
struct ADeltaResult {
  int n = 0;
  Rat eps0;
  std::vector<std::vector<Rat>> matrix; // row-major; column j is x_eps
  Rat f_eps;
  double exact_norm = 0.0; // sqrt(n * F(eps0))
  double target = 0.0;     // sqrt(n) - delta
};

ADeltaResult a_delta_matrix(int n, double delta);

struct ADeltaField {
  ADeltaResult data;
  GroupoidPtr groupoid; // full pair relation on n points
  Kernel<Rat> field;
  MatrixOrientation used;
};

ADeltaField a_delta_field(int n, double delta);

// ---- disjoint union with divergent truncated norms ----

enum class BaseSpace { Point, Pair2 };

struct UnionExample {
  GroupoidPtr groupoid; // disjoint union of parts 1..N, each scaled 1/N
  Kernel<Rat> field;
  std::vector<double> block_norms;   // computed on the union's restrictions
  std::vector<double> predicted;     // closed form per part
  std::vector<double> i_norm_prefix; // I-norm of the field truncated to parts 1..m
};

// Part n carries the a_delta field on the pair relation of n points (part 1
// is a single point), optionally crossed with the two-point pair relation.
// Block norms grow like sqrt(n) while each part stays a probability field,
// and the truncated I-norms n(1 - eps0(n)) diverge.
UnionExample unbounded_union_example(int parts, double delta, BaseSpace base = BaseSpace::Point);

// ---- source-normalized interval kernel ----
//
// On the full pair relation over the window [0, (K+1)(K+2)/2) with counting
// weights, the kernel puts 1 on (m, n) exactly when n lies in the interval
// I_m = [m(m+1)/2, (m+1)(m+2)/2). Source-fiber sums are 1 across the whole
// window while the target-fiber sum of m is m+1, so the associated operator
// is unbounded along K: || P xi_k || / || xi_k || = sqrt(k+1) for
// xi_k = chi{(k, n) : n in I_k}. The counting weights keep the groupoid
// measure-preserving but not a probability space.
struct IntervalExample {
  GroupoidPtr groupoid;
  Kernel<Rat> kernel;
  int max_index = 0;      // K
  std::size_t window = 0; // number of units
};

IntervalExample interval_example(int max_index);
UnitSet interval_units(int k);
L2Vector<Rat> interval_vector(const IntervalExample& ex, int k);

// ---- truncated free-group ball ----

struct FreeBall {
  int rank = 0;
  int radius = 0;
  std::size_t n_vertices = 0;
  std::vector<std::size_t> sphere_sizes; // |S_r| for r = 0..R
  CsrMatrix op;                          // 1/(2m) along tree edges, symmetric
  NormResult norm;
  double classical_limit = 0.0; // sqrt(2m-1)/m
};

// Vertices are the reduced words of length <= R in the free group of the
// given rank, built breadth first; the operator is the simple random walk
// truncated to the ball. Raises BallTooLarge above vertex_cap.
FreeBall free_group_ball(int rank, int radius, std::size_t vertex_cap = 2000000,
                         const NormOptions& opts = {});

// ---- fixed finite-group anchors ----

struct SuiteMember {
  std::string name;
  GroupoidPtr groupoid; // one-unit group bundle
  Kernel<Rat> field;    // uniform on a symmetric generating set with identity
};

// Cyclic groups of order 2, 3, 4, 6, 8, 12, the squares Z_3^2 and Z_4^2, and
// the dihedral groups of order 8 and 16. Generating sets include the identity
// so the walks are lazy and free of parity artifacts.
std::vector<SuiteMember> finite_group_suite();

} // namespace ggk
