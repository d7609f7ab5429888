#include "ggk/io.hpp"

#include "doctest.h"

#include <cstdlib>
#include <sstream>
#include <string>

using namespace ggk;

namespace {

GroupoidPtr parse_g(const std::string& text, bool check = true) {
  auto spec = parse_groupoid_spec(text, check);
  REQUIRE(std::holds_alternative<GroupoidPtr>(spec));
  return std::get<GroupoidPtr>(spec);
}

} // namespace

TEST_CASE("pair specs: shorthand n and explicit classes") {
  auto g = parse_g(R"({"type":"pair","n":4})");
  CHECK(g->n_units() == 4);
  CHECK(g->n_arrows() == 16);
  CHECK(g->is_pmp());

  auto h = parse_g(R"({"type":"pair","classes":[
      {"units":["a","b"],"weight":"1/4"},
      {"units":["c"],"weight":"1/2"}]})");
  CHECK(h->n_units() == 3);
  CHECK(h->weight(2) == rat(1, 2));
  CHECK(h->unit_index("b").value() == 1);
}

TEST_CASE("group specs: presets, tables, weights") {
  auto z6 = parse_g(R"({"type":"group","preset":"Z_6"})");
  CHECK(z6->n_arrows() == 6);
  CHECK(z6->is_pmp());

  auto d4 = parse_g(R"({"type":"group","preset":"D_4","unit":"base"})");
  CHECK(d4->n_arrows() == 8);
  CHECK(d4->unit_name(0) == "base");

  auto manual = parse_g(R"({"type":"group","table":[[0,1],[1,0]]})");
  CHECK(manual->n_arrows() == 2);

  // A scaled unit weight is not a probability space but still loads; the
  // probability-only entry points do their own checking.
  auto half = parse_g(R"({"type":"group","preset":"Z_6","weight":"1/2"})");
  CHECK(half->total_mass() == rat(1, 2));
  CHECK(half->measure_preserving());
  CHECK_FALSE(half->is_probability());

  CHECK_THROWS_AS(parse_g(R"({"type":"group","preset":"Q_8"})"), Error);
  CHECK_THROWS_AS(parse_g(R"({"type":"group","table":[[0,1],[1,1]]})"), Error);
}

TEST_CASE("composite specs nest arbitrarily") {
  auto p = parse_g(R"({"type":"product","parts":[
      {"type":"pair","n":2}, {"type":"group","preset":"Z_3"}]})");
  CHECK(p->n_units() == 2);
  CHECK(p->n_arrows() == 12);

  auto u = parse_g(R"({"type":"union","parts":[
      {"type":"pair","n":2}, {"type":"pair","n":3}],
      "scales":["1/3","2/3"]})");
  CHECK(u->n_units() == 5);
  CHECK(u->weight(0) == rat(1, 6));

  auto r = parse_g(R"({"type":"restrict",
      "parent":{"type":"union","parts":[{"type":"pair","n":2},{"type":"pair","n":3}]},
      "set":["p0:0","p0:1"]})");
  CHECK(r->n_units() == 2);
  CHECK(r->total_mass() == Rat(1));

  CHECK_THROWS_AS(parse_g(R"({"type":"product","parts":[{"type":"pair","n":2}]})"), Error);
  CHECK_THROWS_AS(
      parse_g(R"({"type":"restrict","parent":{"type":"pair","n":2},"set":["nope"]})"), Error);
}

TEST_CASE("explicit specs go through the full validator") {
  const std::string good = R"({
    "units":[{"id":"x","weight":"1/2"},{"id":"y","weight":"1/2"}],
    "arrows":[{"id":"a","src":"y","tgt":"x","inv":"b"},
              {"id":"b","src":"x","tgt":"y","inv":"a"},
              {"id":"ex","src":"x","tgt":"x","inv":"ex"},
              {"id":"ey","src":"y","tgt":"y","inv":"ey"}],
    "compose":[["a","b","ex"],["b","a","ey"],
               ["ex","a","a"],["a","ey","a"],
               ["ey","b","b"],["b","ex","b"],
               ["ex","ex","ex"],["ey","ey","ey"]]})";
  auto g = parse_g(good);
  CHECK(g->n_units() == 2);
  CHECK(g->is_pmp());

  // Same shape with unequal endpoint weights: loading checks and refuses.
  std::string bad = good;
  const auto pos = bad.find("\"1/2\"");
  bad.replace(pos, 5, "\"1/3\"");
  const auto pos2 = bad.find("\"1/2\"");
  bad.replace(pos2, 5, "\"2/3\"");
  CHECK_THROWS_WITH_AS(parse_g(bad), doctest::Contains("measure.not_preserving"), Error);
  // Unless the caller asks for the unchecked parse.
  CHECK_FALSE(parse_g(bad, false)->measure_preserving());
}

TEST_CASE("the ball request is its own top-level spec") {
  auto spec = parse_groupoid_spec(R"({"type":"group","preset":"free_ball","gens":3,"radius":5})");
  REQUIRE(std::holds_alternative<FreeBallParams>(spec));
  CHECK(std::get<FreeBallParams>(spec).rank == 3);
  CHECK(std::get<FreeBallParams>(spec).radius == 5);

  auto dflt = parse_groupoid_spec(R"({"type":"group","preset":"free_ball"})");
  CHECK(std::get<FreeBallParams>(dflt).rank == 2);
  CHECK(std::get<FreeBallParams>(dflt).radius == 3);

  CHECK_THROWS_WITH_AS(parse_g(R"({"type":"union","parts":[
      {"type":"group","preset":"free_ball"}]})"),
                       doctest::Contains("top level"), Error);
}

TEST_CASE("malformed groupoid text is a parse error") {
  CHECK_THROWS_AS(parse_groupoid_spec("{oops"), Error);
  CHECK_THROWS_AS(parse_groupoid_spec("[1,2]"), Error);
  CHECK_THROWS_AS(parse_groupoid_spec(R"({"type":"banana"})"), Error);
  CHECK_THROWS_AS(load_groupoid_spec("/nonexistent/file.json"), Error);
}

TEST_CASE("kernel specs cover the four forms") {
  auto g = parse_g(R"({"type":"pair","n":2})");

  auto uni = parse_kernel_spec(g, R"({"type":"uniform"})");
  CHECK(uni.is_probability_field());
  CHECK(uni.value(0) == rat(1, 2));

  auto mat = parse_kernel_spec(g, R"({"type":"matrix",
      "data":[["1/2","1/2"],[0.25,"3/4"]], "orientation":"as-is"})");
  CHECK(mat.is_probability_field());
  CHECK(mat.value(2) == rat(1, 4));

  auto z6 = parse_g(R"({"type":"group","preset":"Z_6"})");
  auto lazy = parse_kernel_spec(z6, R"({"type":"explicit",
      "values":{"0":"1/3","1":"1/3","5":"1/3"}})");
  CHECK(lazy.is_probability_field());
  CHECK(lazy.is_symmetric());
  CHECK(lazy.support_size() == 3);

  // The swap and the identity, half weight each: field 1/2 everywhere it can be.
  auto bis = parse_kernel_spec(g, R"({"type":"bisections","items":[
      {"arrows":[0,3],"weight":"1/2"},{"arrows":[1,2],"weight":"1/2"}]})");
  CHECK(bis.is_probability_field());
  CHECK(bis.value(1) == rat(1, 2));

  CHECK_THROWS_AS(parse_kernel_spec(g, R"({"type":"nope"})"), Error);
  CHECK_THROWS_AS(parse_kernel_spec(g, R"({"type":"explicit","values":{"zz":"1"}})"), Error);
  CHECK_THROWS_AS(parse_kernel_spec(g, R"({"type":"matrix","data":[[1,0]]})"), Error);
}

TEST_CASE("numeric kernel entries enter at their exact binary64 value") {
  auto g = parse_g(R"({"type":"pair","n":2})");
  auto k = parse_kernel_spec(g, R"({"type":"explicit","values":{"0":0.5,"1":0.5}})");
  CHECK(k.value(0) == rat(1, 2));
  auto s = parse_kernel_spec(g, R"({"type":"explicit","values":{"0":"0.2"}})");
  CHECK(s.value(0) == rat(1, 5)); // string decimals are exact decimals
}

TEST_CASE("format_double round-trips and trims") {
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.5) == "0.5");
  const double samples[] = {0.1, 1.0 / 3.0, 1e-17, 12345.6789, 0.8468939};
  for (double x : samples) {
    CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
  }
}

TEST_CASE("manifest lines are single ordered-JSON comments") {
  RunManifest m;
  m.command = "norm";
  m.params = {{"tol", "1e-10"}, {"method", "auto"}};
  m.inputs = {"g.json", "k.json"};
  const std::string line = manifest_line(m);
  CHECK(line.rfind("#{\"command\":\"norm\"", 0) == 0);
  CHECK(line.find("\"tol\":\"1e-10\"") != std::string::npos);
  CHECK(line.find("\"rng\":\"splitmix64-counter-v1\"") != std::string::npos);
  CHECK(line.find("\"precision\":\"binary64\"") != std::string::npos);
  CHECK(line.find('\n') == std::string::npos);
  // Parameter order is the insertion order, so reruns compare bytewise.
  CHECK(line.find("\"tol\"") < line.find("\"method\""));
}

TEST_CASE("errors serialize with their code name") {
  const Error e(ErrorCode::NullSet, "empty start set");
  const std::string j = error_json(e);
  CHECK(j == R"({"error":"NullSet","message":"empty start set"})");
}

TEST_CASE("coordinate dump walks blocks in fiber order") {
  auto g = parse_g(R"({"type":"pair","n":2})");
  MarkovOperator<Rat> op(parse_kernel_spec(g, R"({"type":"uniform"})"));
  std::ostringstream out;
  write_operator_coo<Rat>(out, op, [](const Rat& v) { return format_rational(v); });
  CHECK(out.str() ==
        "0,0,1/2\n1,0,1/2\n0,1,1/2\n1,1,1/2\n"
        "2,2,1/2\n3,2,1/2\n2,3,1/2\n3,3,1/2\n");
}
