#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

// End-to-end checks of the installed command-line surface: exit codes, the
// leading manifest line, CSV shapes, error JSON, and rerun determinism.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code;
  std::string out;
  std::string err;
};

const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "ggk_cli_contract";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void put(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

RunResult run_cli(const std::string& args) {
  const fs::path out = work_dir() / "stdout.txt";
  const fs::path err = work_dir() / "stderr.txt";
  const std::string cmd = std::string(GGK_CLI_PATH) + " " + args + " > " + out.string() +
                          " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, slurp(out), slurp(err)};
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> fields_of(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream in(line);
  std::string f;
  while (std::getline(in, f, ',')) fields.push_back(f);
  return fields;
}

// fixture files, written once
struct Fixtures {
  fs::path pair4, pair2, z6, bad, uniform, lazy6;
  Fixtures() {
    pair4 = work_dir() / "pair4.json";
    put(pair4, R"({"type":"pair","n":4})");
    pair2 = work_dir() / "pair2.json";
    put(pair2, R"({"type":"pair","n":2})");
    z6 = work_dir() / "z6.json";
    put(z6, R"({"type":"group","preset":"Z_6"})");
    bad = work_dir() / "bad_measure.json";
    put(bad, R"({
      "units":[{"id":"x","weight":"1/3"},{"id":"y","weight":"2/3"}],
      "arrows":[{"id":"a","src":"y","tgt":"x","inv":"b"},
                {"id":"b","src":"x","tgt":"y","inv":"a"},
                {"id":"ex","src":"x","tgt":"x","inv":"ex"},
                {"id":"ey","src":"y","tgt":"y","inv":"ey"}],
      "compose":[["a","b","ex"],["b","a","ey"],
                 ["ex","a","a"],["a","ey","a"],
                 ["ey","b","b"],["b","ex","b"],
                 ["ex","ex","ex"],["ey","ey","ey"]]})");
    uniform = work_dir() / "uniform.json";
    put(uniform, R"({"type":"uniform"})");
    lazy6 = work_dir() / "lazy6.json";
    put(lazy6, R"({"type":"explicit","values":{"0":"1/3","1":"1/3","5":"1/3"}})");
  }
};

const Fixtures& fx() {
  static const Fixtures f;
  return f;
}

} // namespace

TEST_CASE("validate accepts a clean file and reports its shape") {
  const auto r = run_cli("validate " + fx().pair4.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("\"valid\":true") != std::string::npos);
  CHECK(r.out.find("\"pmp\":true") != std::string::npos);
  CHECK(r.out.find("\"units\":4") != std::string::npos);
  CHECK(r.err.empty());
}

TEST_CASE("validate points at the arrow whose endpoint masses disagree") {
  const auto r = run_cli("validate " + fx().bad.string());
  CHECK(r.exit_code == 2);
  CHECK(r.out.find("\"valid\":false") != std::string::npos);
  CHECK(r.out.find("measure.not_preserving") != std::string::npos);
  CHECK(r.out.find("mu(src)") != std::string::npos);
}

TEST_CASE("kesten on a single orbit reports exactly the full set at norm one") {
  const auto r = run_cli("kesten " + fx().pair4.string() + " " + fx().uniform.string());
  CHECK(r.exit_code == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 4); // manifest, header, one set, summary
  CHECK(lines[1] == "set,mass,norm,defect,pass");
  const auto row = fields_of(lines[2]);
  REQUIRE(row.size() == 5);
  CHECK(row[0] == "0;1;2;3");
  CHECK(row[1] == "1");
  CHECK(std::abs(std::stod(row[2]) - 1.0) <= 1e-9);
  CHECK(row[4] == "1");
  CHECK(lines[3].find("\"pass\":true") != std::string::npos);
}

TEST_CASE("norm leads with its manifest and the declared columns") {
  const auto r = run_cli("norm " + fx().pair4.string() + " " + fx().uniform.string());
  CHECK(r.exit_code == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0].rfind("#{\"command\":\"norm\"", 0) == 0);
  CHECK(lines[0].find("\"tool\":\"ggk\"") != std::string::npos);
  CHECK(lines[1] ==
        "l2_norm,op_norm,i_norm,method,residual,iterations,hermitian,self_adjoint_defect");
  const auto row = fields_of(lines[2]);
  REQUIRE(row.size() == 8);
  // uniform symmetric field: operator norm one (dense-eig, float), I-norm exact
  CHECK(std::abs(std::stod(row[1]) - 1.0) <= 1e-12);
  CHECK(row[2] == "1");
  CHECK(row[6] == "1");
}

TEST_CASE("norm --coo dumps the operator entries in rational form") {
  const fs::path coo = work_dir() / "coo.csv";
  const auto r = run_cli("norm --exact " + fx().pair2.string() + " " + fx().uniform.string() +
                         " --coo " + coo.string());
  CHECK(r.exit_code == 0);
  const auto lines = lines_of(slurp(coo));
  REQUIRE(lines.size() == 10); // manifest, header, 8 entries
  CHECK(lines[1] == "row_arrow_id,col_arrow_id,value");
  CHECK(lines[2] == "0,0,1/2");
  CHECK(lines[9] == "3,3,1/2");
}

TEST_CASE("radius rows are exact in rational mode and end with a summary") {
  const std::string args =
      "radius --exact --nmax 8 " + fx().z6.string() + " " + fx().lazy6.string();
  const auto r = run_cli(args);
  CHECK(r.exit_code == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 11); // manifest, header, 8 rows, summary
  CHECK(lines[1] == "n,return_probability_2n,r_n");
  CHECK(lines[2].rfind("1,1/3,", 0) == 0); // two-step return mass is exactly 1/3
  CHECK(lines[10].rfind("#{", 0) == 0);
  CHECK(lines[10].find("\"invariant\":true") != std::string::npos);
  CHECK(lines[10].find("\"set_mass\":\"1\"") != std::string::npos);

  // --out writes the very same bytes to a file
  const fs::path out_file = work_dir() / "radius.csv";
  const auto r2 = run_cli(args + " --out " + out_file.string());
  CHECK(r2.exit_code == 0);
  CHECK(slurp(out_file) == r.out);
}

TEST_CASE("walk reruns are byte-identical and thread count changes nothing") {
  const std::string args = "walk " + fx().pair4.string() + " " + fx().uniform.string() +
                           " --steps 2 --samples 20000 --seed 777";
  const auto a = run_cli(args);
  const auto b = run_cli(args);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);

  const auto c = run_cli(args + " --threads 3");
  const auto row_a = lines_of(a.out).back();
  const auto row_c = lines_of(c.out).back();
  CHECK(row_a == row_c); // manifests differ (threads param), data may not
}

TEST_CASE("the interval reproduction lands exactly on the predicted ratios") {
  const auto r = run_cli("reproduce appendix-b --kmax 24");
  CHECK(r.exit_code == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 27); // manifest, header, k = 0..24
  CHECK(lines[1] == "k,predicted,computed,gap");
  CHECK(lines.back() == "24,5,5,0");
}

TEST_CASE("usage and domain errors speak one-line JSON on stderr") {
  const auto bad_cmd = run_cli("frobnicate");
  CHECK(bad_cmd.exit_code == 2);
  CHECK(bad_cmd.err.rfind("{\"error\":\"usage\"", 0) == 0);
  CHECK(lines_of(bad_cmd.err).size() == 1);

  const auto bad_set = run_cli("radius " + fx().z6.string() + " " + fx().lazy6.string() +
                               " --set nonsense");
  CHECK(bad_set.exit_code == 2);
  CHECK(bad_set.err.rfind("{\"error\":\"BadParameters\"", 0) == 0);

  const auto gone = run_cli("validate /nonexistent/file.json");
  CHECK(gone.exit_code == 2);
  CHECK_FALSE(gone.err.empty());
}
