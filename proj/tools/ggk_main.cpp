#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "ggk/constructions.hpp"
#include "ggk/io.hpp"
#include "ggk/spectral.hpp"
#include "ggk/suite.hpp"
#include "ggk/version.hpp"
#include "ggk/walk.hpp"

using nlohmann::ordered_json;

namespace {

struct GlobalOpts {
  bool exact = false;
  int threads = 0;
  std::string out; // empty = stdout
};

// stdout unless --out was given
class Output {
public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) ggk::raise(ggk::ErrorCode::BadParameters, "cannot open output \"" + path + "\"");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
  std::ofstream file_;
};

std::string fmt(double v) { return ggk::format_double(v); }

ggk::RunManifest make_manifest(const GlobalOpts& g, std::string command,
                               std::vector<std::pair<std::string, std::string>> params,
                               std::vector<std::string> inputs) {
  ggk::RunManifest m;
  m.command = std::move(command);
  m.params = std::move(params);
  m.inputs = std::move(inputs);
  m.precision = g.exact ? "rational" : "binary64";
  return m;
}

ggk::GroupoidPtr load_concrete(const std::string& path) {
  auto spec = ggk::load_groupoid_spec(path);
  if (std::holds_alternative<ggk::FreeBallParams>(spec)) {
    ggk::raise(ggk::ErrorCode::Unsupported,
               "this command needs a finite groupoid, not a free-group ball");
  }
  return std::get<ggk::GroupoidPtr>(spec);
}

ggk::UnitSet parse_unit_set(const ggk::FiniteGroupoid& g, const std::string& text) {
  if (text.empty() || text == "full") return ggk::full_unit_set(g);
  std::vector<ggk::UnitId> ids;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t next = text.find(',', pos);
    const std::string tok = text.substr(pos, next == std::string::npos ? next : next - pos);
    if (!tok.empty()) {
      if (auto idx = g.unit_index(tok)) {
        ids.push_back(*idx);
      } else {
        try {
          const unsigned long v = std::stoul(tok);
          if (v >= g.n_units()) throw std::out_of_range("unit");
          ids.push_back(static_cast<ggk::UnitId>(v));
        } catch (...) {
          ggk::raise(ggk::ErrorCode::BadParameters, "unknown unit \"" + tok + "\" in --set");
        }
      }
    }
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return ggk::make_unit_set(std::move(ids));
}

std::string join_ids(const ggk::UnitSet& set) {
  std::string out;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(set[i]);
  }
  return out;
}

// ---- subcommands ----

int run_validate(const GlobalOpts& g, const std::string& path) {
  auto spec = ggk::parse_groupoid_spec(ggk::read_text_file(path), /*check=*/false);
  ordered_json out;
  out["manifest"] =
      ordered_json::parse(ggk::manifest_line(make_manifest(g, "validate", {}, {path})).substr(1));
  if (const auto* fb = std::get_if<ggk::FreeBallParams>(&spec)) {
    out["kind"] = "free_ball";
    out["gens"] = fb->rank;
    out["radius"] = fb->radius;
    out["valid"] = true;
    std::cout << out.dump() << "\n";
    return 0;
  }
  const auto& grp = std::get<ggk::GroupoidPtr>(spec);
  const auto diags = ggk::validate(*grp);
  out["kind"] = "groupoid";
  out["units"] = grp->n_units();
  out["arrows"] = grp->n_arrows();
  out["total_mass"] = ggk::format_rational(grp->total_mass());
  out["measure_preserving"] = grp->measure_preserving();
  out["probability"] = grp->is_probability();
  out["pmp"] = grp->is_pmp();
  ordered_json dj = ordered_json::array();
  for (const auto& d : diags) dj.push_back({{"code", d.code}, {"message", d.message}});
  out["diagnostics"] = dj;
  out["valid"] = diags.empty();
  std::cout << out.dump() << "\n";
  return diags.empty() ? 0 : 2;
}

ggk::NormOptions norm_options(const std::string& method, double tol) {
  ggk::NormOptions o;
  o.tol = tol;
  if (method == "exact") o.dense_cap = std::size_t(1) << 20;
  if (method == "power") o.dense_cap = 0;
  return o;
}

int run_norm(const GlobalOpts& g, const std::string& gpath, const std::string& kpath,
             const std::string& method, double tol, const std::string& coo_path) {
  auto spec = ggk::load_groupoid_spec(gpath);
  Output out(g.out);

  if (const auto* fb = std::get_if<ggk::FreeBallParams>(&spec)) {
    if (!kpath.empty()) {
      ggk::raise(ggk::ErrorCode::BadParameters, "free-group ball takes no kernel file");
    }
    auto ball = ggk::free_group_ball(fb->rank, fb->radius, 2000000, norm_options(method, tol));
    auto m = make_manifest(g, "norm",
                           {{"method", method}, {"tol", fmt(tol)}},
                           {gpath});
    out.stream() << ggk::manifest_line(m) << "\n"
                 << "op_norm,residual,iterations,method,n_vertices,classical_limit\n"
                 << fmt(ball.norm.value) << ',' << fmt(ball.norm.residual) << ','
                 << ball.norm.iterations << ',' << ball.norm.method << ',' << ball.n_vertices
                 << ',' << fmt(ball.classical_limit) << "\n";
    return 0;
  }

  const auto& grp = std::get<ggk::GroupoidPtr>(spec);
  if (kpath.empty()) ggk::raise(ggk::ErrorCode::BadParameters, "norm needs a kernel file");
  const auto field = ggk::load_kernel_spec(grp, kpath);
  const auto kd = ggk::kernel_to_double(field);
  const ggk::MarkovOperator<double> op(kd);
  const auto nr = ggk::operator_norm(op, norm_options(method, tol));
  const double l2 = std::sqrt(ggk::to_double(ggk::l2_norm_squared(field)));
  const double in = ggk::to_double(ggk::i_norm(field));

  if (!coo_path.empty()) {
    Output coo(coo_path);
    coo.stream() << ggk::manifest_line(make_manifest(g, "norm --coo", {{"method", method}},
                                                     {gpath, kpath}))
                 << "\nrow_arrow_id,col_arrow_id,value\n";
    if (g.exact) {
      const ggk::MarkovOperator<ggk::Rat> opr(field);
      ggk::write_operator_coo<ggk::Rat>(coo.stream(), opr, ggk::format_rational);
    } else {
      ggk::write_operator_coo<double>(coo.stream(), op, ggk::format_double);
    }
  }

  auto m = make_manifest(g, "norm", {{"method", method}, {"tol", fmt(tol)}}, {gpath, kpath});
  out.stream() << ggk::manifest_line(m) << "\n"
               << "l2_norm,op_norm,i_norm,method,residual,iterations,hermitian,self_adjoint_defect\n"
               << fmt(l2) << ',' << fmt(nr.value) << ',' << fmt(in) << ',' << nr.method << ','
               << fmt(nr.residual) << ',' << nr.iterations << ',' << (op.hermitian() ? 1 : 0)
               << ',' << fmt(ggk::self_adjointness_defect(op)) << "\n";
  return 0;
}

int run_radius(const GlobalOpts& g, const std::string& gpath, const std::string& kpath,
               const std::string& set_text, unsigned nmax) {
  const auto grp = load_concrete(gpath);
  const auto field = ggk::load_kernel_spec(grp, kpath);
  const auto set = parse_unit_set(*grp, set_text);
  ggk::SpectralOptions opts;
  opts.n_max = nmax;
  const auto rep = ggk::e_spectral_radius(ggk::kernel_to_double(field), set, opts);

  Output out(g.out);
  auto m = make_manifest(g, "radius", {{"set", set_text.empty() ? "full" : set_text},
                                       {"nmax", std::to_string(nmax)}},
                         {gpath, kpath});
  out.stream() << ggk::manifest_line(m) << "\nn,return_probability_2n,r_n\n";

  if (g.exact) {
    // exact return probabilities by convolution powers of pi * pi
    const auto p2 = ggk::convolve(field, field);
    auto cur = p2;
    const ggk::Rat mass = ggk::unit_set_mass(*grp, set);
    for (unsigned n = 1; n <= nmax; ++n) {
      ggk::Rat p = 0;
      for (ggk::UnitId x : set) p += grp->weight(x) * cur.value(grp->unit_arrow(x));
      p /= mass;
      const double rn = std::pow(ggk::to_double(p), 1.0 / (2.0 * n));
      out.stream() << n << ',' << ggk::format_rational(p) << ',' << fmt(rn) << "\n";
      if (n < nmax) cur = ggk::convolve(cur, p2);
    }
  } else {
    for (unsigned n = 1; n <= nmax; ++n) {
      const double rn = rep.r_seq[n - 1];
      out.stream() << n << ',' << fmt(std::pow(rn, 2.0 * n)) << ',' << fmt(rn) << "\n";
    }
  }

  ordered_json s;
  s["rho_extrapolated"] = rep.rho_extrapolated;
  s["rho_exact"] = rep.rho_exact;
  s["spectral_gap"] = rep.spectral_gap;
  s["op_norm"] = rep.op_norm.value;
  s["set_mass"] = ggk::format_rational(rep.set_mass);
  s["invariant"] = rep.invariant;
  s["monotone"] = rep.monotone_ok;
  s["slow_convergence"] = rep.slow_convergence;
  ordered_json atoms = ordered_json::array();
  for (const auto& a : rep.atoms) atoms.push_back({{"lambda", a.lambda}, {"mass", a.mass}});
  s["atoms"] = atoms;
  out.stream() << "#" << s.dump() << "\n";
  return 0;
}

int run_kesten(const GlobalOpts& g, const std::string& gpath, const std::string& kpath,
               double tol) {
  const auto grp = load_concrete(gpath);
  const auto field = ggk::load_kernel_spec(grp, kpath);
  const auto rep = g.exact ? ggk::kesten_check(field, tol) // Rat assembly, double norms
                           : ggk::kesten_check(ggk::kernel_to_double(field), tol);
  Output out(g.out);
  auto m = make_manifest(g, "kesten", {{"tol", fmt(tol)}}, {gpath, kpath});
  out.stream() << ggk::manifest_line(m) << "\nset,mass,norm,defect,pass\n";
  for (const auto& e : rep.entries) {
    out.stream() << join_ids(e.set) << ',' << ggk::format_rational(e.mass) << ','
                 << fmt(e.norm) << ',' << fmt(e.certificate_defect) << ',' << (e.pass ? 1 : 0)
                 << "\n";
  }
  ordered_json s;
  s["orbit_count"] = rep.orbit_count;
  s["exhaustive"] = rep.exhaustive;
  s["worst_deviation"] = rep.worst_deviation;
  s["pass"] = rep.pass;
  out.stream() << "#" << s.dump() << "\n";
  return rep.pass ? 0 : 1;
}

int run_walk(const GlobalOpts& g, const std::string& gpath, const std::string& kpath,
             unsigned steps, std::size_t samples, std::uint64_t seed,
             const std::string& set_text) {
  const auto grp = load_concrete(gpath);
  const auto field = ggk::load_kernel_spec(grp, kpath);
  const auto set = parse_unit_set(*grp, set_text);
  const ggk::WalkEstimate est =
      g.exact ? ggk::estimate_return(field, set, steps, samples, seed, g.threads)
              : ggk::estimate_return(ggk::kernel_to_double(field), set, steps, samples, seed,
                                     g.threads);
  const double exact = ggk::to_double(ggk::return_probability_convolution(field, set, steps));
  const double z = est.std_error > 0 ? (est.p_hat - exact) / est.std_error
                                     : (est.p_hat == exact ? 0.0 : INFINITY);
  Output out(g.out);
  auto m = make_manifest(g, "walk",
                         {{"steps", std::to_string(steps)},
                          {"samples", std::to_string(samples)},
                          {"seed", std::to_string(seed)},
                          {"set", set_text.empty() ? "full" : set_text},
                          {"threads", std::to_string(g.threads)}},
                         {gpath, kpath});
  out.stream() << ggk::manifest_line(m) << "\nn,N,p_hat,std_error,exact,z_score\n"
               << steps << ',' << samples << ',' << fmt(est.p_hat) << ',' << fmt(est.std_error)
               << ',' << fmt(exact) << ',' << fmt(z) << "\n";
  return 0;
}

int run_reproduce_a(const GlobalOpts& g, int nmax, double delta, const std::string& base) {
  const auto space = base == "pair2" ? ggk::BaseSpace::Pair2 : ggk::BaseSpace::Point;
  const auto ex = ggk::unbounded_union_example(nmax, delta, space);
  Output out(g.out);
  auto m = make_manifest(g, "reproduce appendix-a",
                         {{"nmax", std::to_string(nmax)}, {"delta", fmt(delta)},
                          {"base", base}},
                         {});
  out.stream() << ggk::manifest_line(m) << "\nn,predicted,computed,gap\n";
  for (int n = 1; n <= nmax; ++n) {
    const double p = ex.predicted[n - 1];
    const double c = ex.block_norms[n - 1];
    out.stream() << n << ',' << fmt(p) << ',' << fmt(c) << ',' << fmt(c - p) << "\n";
  }
  ordered_json s;
  ordered_json prefix = ordered_json::array();
  for (double v : ex.i_norm_prefix) prefix.push_back(v);
  s["i_norm_prefix"] = prefix;
  s["i_norm_diverges"] =
      ex.i_norm_prefix.size() >= 2 && ex.i_norm_prefix.back() > ex.i_norm_prefix.front();
  s["base"] = base;
  out.stream() << "#" << s.dump() << "\n";
  return 0;
}

int run_reproduce_b(const GlobalOpts& g, int kmax) {
  const auto ex = ggk::interval_example(kmax);
  const ggk::MarkovOperator<ggk::Rat> op(ex.kernel);
  Output out(g.out);
  auto m = make_manifest(g, "reproduce appendix-b", {{"kmax", std::to_string(kmax)}}, {});
  out.stream() << ggk::manifest_line(m) << "\nk,predicted,computed,gap\n";
  for (int k = 0; k <= kmax; ++k) {
    const auto xi = ggk::interval_vector(ex, k);
    const ggk::Rat n2 = ggk::norm_squared(xi);
    const ggk::Rat pn2 = ggk::norm_squared(op.apply(xi));
    const double computed = std::sqrt(ggk::to_double(pn2 / n2));
    const double predicted = std::sqrt(double(k + 1));
    out.stream() << k << ',' << fmt(predicted) << ',' << fmt(computed) << ','
                 << fmt(computed - predicted) << "\n";
  }
  return 0;
}

int run_reproduce_free(const GlobalOpts& g, int gens, int radius) {
  Output out(g.out);
  auto m = make_manifest(g, "reproduce free-group",
                         {{"gens", std::to_string(gens)}, {"radius", std::to_string(radius)}},
                         {});
  out.stream() << ggk::manifest_line(m) << "\nR,predicted,computed,gap\n";
  for (int r = 1; r <= radius; ++r) {
    const auto ball = ggk::free_group_ball(gens, r);
    out.stream() << r << ',' << fmt(ball.classical_limit) << ',' << fmt(ball.norm.value) << ','
                 << fmt(ball.norm.value - ball.classical_limit) << "\n";
  }
  return 0;
}

int run_reproduce_suite(const GlobalOpts& g) {
  const auto suite = ggk::finite_group_suite();
  Output out(g.out);
  auto m = make_manifest(g, "reproduce finite-suite", {}, {});
  out.stream() << ggk::manifest_line(m) << "\nk,predicted,computed,gap\n";
  ordered_json names = ordered_json::array();
  for (std::size_t k = 0; k < suite.size(); ++k) {
    const auto& member = suite[k];
    const ggk::MarkovOperator<double> op(ggk::kernel_to_double(member.field));
    const double nv = ggk::operator_norm(op).value;
    out.stream() << k << ',' << fmt(1.0) << ',' << fmt(nv) << ',' << fmt(nv - 1.0) << "\n";
    names.push_back(member.name);
  }
  ordered_json s;
  s["members"] = names;
  out.stream() << "#" << s.dump() << "\n";
  return 0;
}

int run_selftest(const GlobalOpts& g, std::size_t count, std::uint64_t seed) {
  ggk::SuiteOptions opts;
  opts.count = count;
  opts.seed = seed;
  const auto rep = ggk::run_selftest(opts);
  ordered_json out;
  out["manifest"] = ordered_json::parse(
      ggk::manifest_line(make_manifest(g, "selftest",
                                       {{"count", std::to_string(count)},
                                        {"seed", std::to_string(seed)}},
                                       {}))
          .substr(1));
  out["instances"] = rep.instances;
  out["sections"] = rep.sections;
  ordered_json fails = ordered_json::array();
  for (const auto& f : rep.failures) {
    fails.push_back({{"instance", f.instance}, {"check", f.check}, {"detail", f.detail}});
  }
  out["failures"] = fails;
  out["pass"] = rep.pass();
  std::cout << out.dump() << "\n";
  return rep.pass() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite measured-groupoid walks: norms, spectral radii, Kesten checks"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_flag("--exact", g.exact, "rational arithmetic where applicable");
  app.add_option("--threads", g.threads, "worker threads (0 = GGK_THREADS or 1)");
  app.add_option("--out", g.out, "write the result to a file instead of stdout");

  std::string gpath, kpath, set_text, method = "auto", coo_path, base = "point";
  double tol = 1e-10, ktol = 1e-9, delta = 0.1;
  unsigned nmax = 64, steps = 1;
  std::size_t samples = 100000, count = 500;
  std::uint64_t seed = 1, st_seed = 1729;
  int a_nmax = 25, kmax = 40, gens = 2, radius = 8;

  auto* validate = app.add_subcommand("validate", "check a groupoid file");
  validate->add_option("groupoid", gpath, "groupoid JSON file")->required();

  auto* norm = app.add_subcommand("norm", "Markov operator norm and the I-norm bounds");
  norm->add_option("groupoid", gpath, "groupoid JSON file")->required();
  norm->add_option("kernel", kpath, "kernel JSON file");
  norm->add_option("--method", method, "auto | exact | power")
      ->check(CLI::IsMember({"auto", "exact", "power"}));
  norm->add_option("--tol", tol, "iterative tolerance");
  norm->add_option("--coo", coo_path, "also dump the operator in coordinate form");

  auto* radius_cmd = app.add_subcommand("radius", "return probabilities and the spectral radius");
  radius_cmd->add_option("groupoid", gpath)->required();
  radius_cmd->add_option("kernel", kpath)->required();
  radius_cmd->add_option("--set", set_text, "unit subset (names or indices, comma-separated)");
  radius_cmd->add_option("--nmax", nmax, "sequence length");

  auto* kesten = app.add_subcommand("kesten", "restricted norms on every invariant set");
  kesten->add_option("groupoid", gpath)->required();
  kesten->add_option("kernel", kpath)->required();
  kesten->add_option("--tol", ktol, "norm deviation tolerance");

  auto* walk = app.add_subcommand("walk", "Monte Carlo return-probability estimate");
  walk->add_option("groupoid", gpath)->required();
  walk->add_option("kernel", kpath)->required();
  walk->add_option("--steps", steps, "walk length")->required();
  walk->add_option("--samples", samples, "sample count")->required();
  walk->add_option("--seed", seed, "rng seed")->required();
  walk->add_option("--set", set_text, "start set (names or indices, comma-separated)");

  auto* repro = app.add_subcommand("reproduce", "regenerate the worked constructions");
  repro->require_subcommand(1);
  auto* ra = repro->add_subcommand("appendix-a", "union of near-maximal-norm blocks");
  ra->add_option("--nmax", a_nmax, "number of parts");
  ra->add_option("--delta", delta, "norm margin");
  ra->add_option("--base", base, "point | pair2")->check(CLI::IsMember({"point", "pair2"}));
  auto* rb = repro->add_subcommand("appendix-b", "interval kernel with unbounded ratios");
  rb->add_option("--kmax", kmax, "largest interval index");
  auto* rf = repro->add_subcommand("free-group", "free-group ball truncations");
  rf->add_option("--gens", gens, "free rank");
  rf->add_option("--radius", radius, "largest ball radius");
  auto* rs = repro->add_subcommand("finite-suite", "fixed finite-group suite norms");
  (void)rs;

  auto* selftest = app.add_subcommand("selftest", "run the full invariant battery");
  selftest->add_option("--count", count, "random instances");
  selftest->add_option("--seed", st_seed, "suite seed");

  // let --exact / --threads / --out appear after the subcommand too
  for (auto* sc : app.get_subcommands(nullptr)) {
    sc->fallthrough();
    for (auto* nested : sc->get_subcommands(nullptr)) nested->fallthrough();
  }

  try {
    app.parse(argc, argv);
    if (*validate) return run_validate(g, gpath);
    if (*norm) return run_norm(g, gpath, kpath, method, tol, coo_path);
    if (*radius_cmd) return run_radius(g, gpath, kpath, set_text, nmax);
    if (*kesten) return run_kesten(g, gpath, kpath, ktol);
    if (*walk) return run_walk(g, gpath, kpath, steps, samples, seed, set_text);
    if (*repro) {
      if (*ra) return run_reproduce_a(g, a_nmax, delta, base);
      if (*rb) return run_reproduce_b(g, kmax);
      if (*rf) return run_reproduce_free(g, gens, radius);
      return run_reproduce_suite(g);
    }
    if (*selftest) return run_selftest(g, count, st_seed);
    return 2;
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
        e.get_name() == "CallForVersion") {
      return app.exit(e);
    }
    ordered_json j;
    j["error"] = "usage";
    j["message"] = e.what();
    std::cerr << j.dump() << "\n";
    return 2;
  } catch (const ggk::Error& e) {
    std::cerr << ggk::error_json(e) << "\n";
    return 2;
  } catch (const std::exception& e) {
    ordered_json j;
    j["error"] = "internal";
    j["message"] = e.what();
    std::cerr << j.dump() << "\n";
    return 2;
  }
}
