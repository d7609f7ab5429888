// Acceptance battery: one verdict line per criterion, exit code = failures.
// Tolerances and budgets are pinned here on purpose; loosening them is a
// contract change, not a tweak.

#include "ggk/constructions.hpp"
#include "ggk/io.hpp"
#include "ggk/spectral.hpp"
#include "ggk/suite.hpp"
#include "ggk/walk.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace ggk;

namespace {

int g_failures = 0;

void verdict(int idx, const char* label, bool ok, const std::string& detail) {
  std::printf("%s  criterion %2d  %-28s %s\n", ok ? "PASS" : "FAIL", idx, label, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fail_text(const std::vector<CheckResult>& bad) {
  if (bad.empty()) return "";
  std::ostringstream os;
  os << bad.size() << " failures; first: " << bad.front().instance << " " << bad.front().check
     << " (" << bad.front().detail << ")";
  return os.str();
}

// ---- criterion 9 fixture ----

struct WalkCell {
  std::string name;
  Kernel<Rat> kernel;
  unsigned steps;
  std::uint64_t seed;
};

std::vector<WalkCell> walk_cells() {
  auto z2 = build_group_groupoid(GroupTable::cyclic(2));
  auto s4 = pair_full(4);
  auto z6 = build_group_groupoid(GroupTable::cyclic(6));
  Kernel<Rat> lazy6(z6, SparseArrowMap<Rat>::from_unsorted(
                            {{0, rat(1, 3)}, {1, rat(1, 3)}, {5, rat(1, 3)}}));
  return {
      {"Z2 uniform n=4", uniform_field<Rat>(z2), 4, 12345},
      {"pair4 uniform n=2", uniform_field<Rat>(s4), 2, 777},
      {"Z6 lazy n=6", lazy6, 6, 31337},
  };
}

// ---- criterion 10 plumbing ----

int run_cli(const std::string& args, const std::string& out_path) {
  const std::string cmd =
      std::string(GGK_CLI_PATH) + " " + args + " > " + out_path + " 2> " + out_path + ".err";
  const int rc = std::system(cmd.c_str());
  return rc;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

} // namespace

int main() {
  const auto wall0 = std::chrono::steady_clock::now();

  // Shared randomized suite: 500 deterministic instances, at most 64 arrows.
  SuiteOptions opts;
  opts.seed = 1729;
  opts.count = 500;
  opts.max_arrows = 64;

  auto t0 = std::chrono::steady_clock::now();
  const auto suite = random_suite(opts);

  {
    const auto bad = check_field_algebra(suite);
    const double secs = seconds_since(t0);
    const bool ok = bad.empty() && suite.size() >= 500 && secs <= 60.0;
    std::ostringstream d;
    d << suite.size() << " instances, " << secs << "s (budget 60s)";
    verdict(1, "structural exactness", ok, bad.empty() ? d.str() : fail_text(bad));
  }

  {
    const auto bad = check_norm_bounds(suite);
    verdict(2, "norm sandwich", bad.empty(),
            bad.empty() ? "l2 <= op <= I within 1e-10, defect <= 1e-12" : fail_text(bad));
  }

  {
    auto bad = check_invariant_norms(suite, 1e-9);
    const auto anchors = check_invariant_norms(finite_group_suite(), 1e-9);
    bad.insert(bad.end(), anchors.begin(), anchors.end());
    verdict(3, "restricted norms at one", bad.empty(),
            bad.empty() ? "all invariant sets, suite + fixed anchors" : fail_text(bad));
  }

  {
    const auto bad = check_return_growth(suite);
    verdict(4, "return growth", bad.empty(),
            bad.empty() ? "monotone, radius = norm, both routes equal" : fail_text(bad));
  }

  {
    t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string why;
    for (int n = 2; n <= 50 && ok; ++n) {
      for (double delta : {0.4, 0.1, 0.01}) {
        const auto fam = a_delta_field(n, delta);
        const auto& m = fam.data.matrix;
        for (int j = 0; j < n && ok; ++j) {
          Rat sum(0);
          for (int i = 0; i < n; ++i) {
            sum += m[i][j];
            if (!(m[i][j] > 0)) {
              ok = false;
              why = "nonpositive entry";
            }
          }
          if (sum != Rat(1)) {
            ok = false;
            why = "column sum off";
          }
        }
        const auto res = operator_norm(MarkovOperator<Rat>(fam.field));
        if (std::abs(res.value - fam.data.exact_norm) > 1e-12) {
          ok = false;
          why = "dense norm vs closed form";
        }
        if (!(res.value > std::sqrt(double(n)) - delta)) {
          ok = false;
          why = "norm below sqrt(n) - delta";
        }
        if (!ok) why += " at n=" + std::to_string(n) + " delta=" + std::to_string(delta);
      }
    }
    const double secs = seconds_since(t0);
    if (ok && secs > 10.0) {
      ok = false;
      why = "over 10s budget";
    }
    std::ostringstream d;
    d << "n=2..50 x {0.4,0.1,0.01}, " << secs << "s (budget 10s)";
    verdict(5, "column family exactness", ok, ok ? d.str() : why);
  }

  {
    const auto ex = unbounded_union_example(25, 0.1, BaseSpace::Point);
    bool ok = ex.block_norms.size() == 25 && ex.i_norm_prefix.size() == 25;
    std::string why;
    for (std::size_t i = 0; ok && i < 25; ++i) {
      if (std::abs(ex.block_norms[i] - ex.predicted[i]) > 1e-10) {
        ok = false;
        why = "block norm off prediction at part " + std::to_string(i + 1);
      }
      if (i > 0 && !(ex.block_norms[i] > ex.block_norms[i - 1])) {
        ok = false;
        why = "block norms not strictly increasing at part " + std::to_string(i + 1);
      }
      if (i > 0 && !(ex.i_norm_prefix[i] > ex.i_norm_prefix[i - 1])) {
        ok = false;
        why = "truncated I-norm not increasing at part " + std::to_string(i + 1);
      }
    }
    if (ok && !(ex.block_norms.back() > 4.9)) {
      ok = false;
      why = "25th block norm not above 4.9";
    }
    std::ostringstream d;
    d << "25th block norm " << ex.block_norms.back() << " > 4.9, truncated I-norm up to "
      << ex.i_norm_prefix.back();
    verdict(6, "union norm divergence", ok, ok ? d.str() : why);
  }

  {
    t0 = std::chrono::steady_clock::now();
    const auto ex = interval_example(40);
    MarkovOperator<Rat> op(ex.kernel);
    bool ok = true;
    std::string why;
    for (int k = 0; k <= 40 && ok; ++k) {
      const auto xi = interval_vector(ex, k);
      if (norm_squared(xi) != Rat(k + 1) ||
          norm_squared(op.apply(xi)) != Rat(k + 1) * Rat(k + 1)) {
        ok = false;
        why = "identity broke at k=" + std::to_string(k);
      }
    }
    const double secs = seconds_since(t0);
    if (ok && secs > 30.0) {
      ok = false;
      why = "over 30s budget";
    }
    std::ostringstream d;
    d << "all k <= 40 exact, " << secs << "s (budget 30s)";
    verdict(7, "interval ratios exact", ok, ok ? d.str() : why);
  }

  {
    bool ok = true;
    std::string why;
    double prev = 0.0;
    double last = 0.0;
    for (int R = 1; R <= 12 && ok; ++R) {
      const auto ball = free_group_ball(2, R);
      last = ball.norm.value;
      if (!(last > prev)) {
        ok = false;
        why = "norms not strictly increasing at R=" + std::to_string(R);
      }
      if (last > 0.8660 + 1e-9) {
        ok = false;
        why = "norm above the infinite-tree value at R=" + std::to_string(R);
      }
      prev = last;
    }
    if (ok && std::abs(last - 0.8660) > 0.05) {
      ok = false;
      why = "R=12 norm not within 0.05 of 0.8660";
    }
    double line_norm = 0.0;
    if (ok) {
      const auto line = free_group_ball(1, 200);
      line_norm = line.norm.value;
      const double oracle = std::cos(3.14159265358979323846 / 402.0);
      if (!(line_norm >= 0.999) || std::abs(line_norm - oracle) > 1e-9) {
        ok = false;
        why = "rank-one ball off the cosine oracle";
      }
    }
    std::ostringstream d;
    d << "R=12 norm " << last << " (limit 0.8660), line R=200 norm " << line_norm;
    verdict(8, "tree ceiling contrast", ok, ok ? d.str() : why);
  }

  {
    bool ok = true;
    std::string why;
    std::ostringstream d;
    for (const auto& cell : walk_cells()) {
      const auto full = full_unit_set(*cell.kernel.groupoid());
      const double exact =
          to_double(return_probability_convolution(cell.kernel, full, cell.steps));
      const auto fk = kernel_to_double(cell.kernel);
      const auto est = estimate_return(fk, full, cell.steps, 100000, cell.seed, 1);
      const auto est4 = estimate_return(fk, full, cell.steps, 100000, cell.seed, 4);
      if (est.p_hat != est4.p_hat) {
        ok = false;
        why = cell.name + ": thread counts disagree";
        break;
      }
      if (std::abs(est.p_hat - exact) > 4.0 * est.std_error) {
        ok = false;
        why = cell.name + ": |p_hat - exact| beyond 4 standard errors";
        break;
      }
      d << cell.name << " z=" << (est.std_error > 0
                                      ? (est.p_hat - exact) / est.std_error
                                      : 0.0)
        << "; ";
    }
    verdict(9, "sampled returns", ok, ok ? d.str() : why);
  }

  {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "ggk_acceptance";
    fs::create_directories(dir);
    bool ok = true;
    std::string why;

    const int self_rc = run_cli("selftest --count 500 --seed 1729", (dir / "selftest.json").string());
    if (self_rc != 0) {
      ok = false;
      why = "selftest exited nonzero";
    }

    const std::vector<std::pair<std::string, std::string>> targets = {
        {"appendix-a", "reproduce appendix-a --nmax 25 --delta 0.1"},
        {"appendix-b", "reproduce appendix-b --kmax 40"},
        {"free-group", "reproduce free-group --gens 2 --radius 12"},
        {"finite-suite", "reproduce finite-suite"},
    };
    for (const auto& [name, args] : targets) {
      if (!ok) break;
      const std::string a = (dir / (name + ".1.csv")).string();
      const std::string b = (dir / (name + ".2.csv")).string();
      if (run_cli("--exact " + args, a) != 0 || run_cli("--exact " + args, b) != 0) {
        ok = false;
        why = name + " exited nonzero";
        break;
      }
      const std::string ca = slurp(a);
      if (ca.empty() || ca[0] != '#') {
        ok = false;
        why = name + " output missing its manifest line";
        break;
      }
      if (ca != slurp(b)) {
        ok = false;
        why = name + " reruns differ";
        break;
      }
    }
    verdict(10, "command-line contract", ok,
            ok ? "selftest clean; all reproduce targets bit-identical on rerun" : why);
  }

  std::printf("%s: %d of 10 criteria\n", g_failures == 0 ? "ACCEPTED" : "REJECTED",
              10 - g_failures);
  std::printf("total wall time %.1fs\n", seconds_since(wall0));
  return g_failures == 0 ? 0 : 1;
}
