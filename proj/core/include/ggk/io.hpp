#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "ggk/markov.hpp"

namespace ggk {

// A groupoid file either describes a finite groupoid or asks for the
// free-group ball, which is a raw operator rather than a groupoid.
struct FreeBallParams {
  int rank = 2;
  int radius = 3;
};

using GroupoidSpec = std::variant<GroupoidPtr, FreeBallParams>;

// Parses the JSON grammar: the explicit {units, arrows, compose} form or the
// generator forms {type: pair | group | product | union | restrict} plus
// {type: "group", preset: "free_ball"}. With check = true the result is
// refused (BadParameters) unless validate() comes back clean.
GroupoidSpec parse_groupoid_spec(const std::string& text, bool check = true);
GroupoidSpec load_groupoid_spec(const std::string& path, bool check = true);

// Kernel grammar: {"type":"uniform"} | {"type":"matrix","data":[[...]],
// "orientation":"auto|as-is|transpose"} | {"type":"bisections","items":
// [{"arrows":[...],"weight":"p/q"}]} | {"type":"explicit","values":{id:value}}.
// Rational entries are given as "p/q" / "0.25" strings or JSON numbers
// (numbers enter at their exact binary64 value).
Kernel<Rat> parse_kernel_spec(const GroupoidPtr& g, const std::string& text);
Kernel<Rat> load_kernel_spec(const GroupoidPtr& g, const std::string& path);

std::string read_text_file(const std::string& path);

// ---- output plumbing ----

// %.17g: shortest round-trip form used for every floating-point cell.
std::string format_double(double v);

struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> params; // pre-formatted, ordered
  std::vector<std::string> inputs;
  std::string precision = "binary64"; // or "rational"
};

// One '#'-prefixed JSON line; key order is fixed so reruns are comparable.
std::string manifest_line(const RunManifest& m);

std::string error_json(const Error& e);

// Sparse coordinate dump, one "row_arrow_id,col_arrow_id,value" line per
// entry, ordered by (block, column, position).
template <Scalar S>
void write_operator_coo(std::ostream& out, const MarkovOperator<S>& op,
                        const std::function<std::string(const S&)>& fmt) {
  const auto& g = *op.groupoid();
  for (UnitId x = 0; x < g.n_units(); ++x) {
    const auto& fiber = g.target_fiber(x);
    const auto& blk = op.block(x);
    for (std::size_t j = 0; j < fiber.size(); ++j) {
      for (std::size_t t = blk.col_ptr[j]; t < blk.col_ptr[j + 1]; ++t) {
        out << fiber[blk.row_idx[t]] << ',' << fiber[j] << ',' << fmt(blk.vals[t]) << '\n';
      }
    }
  }
}

} // namespace ggk
