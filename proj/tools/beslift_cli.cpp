// Command-line harness: generators, norm estimators, liftings, winding and
// Jacobian pairings, row scans, and the acceptance suite. All randomness is
// counter-based from --seed, so identical invocations produce byte-identical
// outputs. Exit codes: 0 success, 2 detected obstruction or modulus collapse,
// 3 validation error, 4 internal invariant violation.

#include <array>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "beslift/beslift.hpp"

namespace {

using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitObstruction = 2;
constexpr int kExitValidation = 3;
constexpr int kExitInternal = 4;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    std::ofstream os(out_path, std::ios::binary);
    if (!os) throw beslift::Error("cannot open " + out_path + " for writing");
    os << text;
  }
}

struct Options {
  double s = 0.5, p = 2.0, q = 2.0;
  std::string q_text = "2";
  int dim = 1, level = 8, order = 1;
  double delta = 0.25;
  std::string domain = "torus";
  std::string method;
  std::string format = "json";
  std::string in_path, out_path, zeta_path;
  std::uint64_t seed = 1;
  int alpha = -1;
  std::string kind;
  int j0 = 4, top_level = 8, desc_level = 4, piece_level = 4;
  double center_x = 0.0, center_y = 0.0;
  bool center_set = false;
  std::string rows_text;
  std::string suite = "all";
  int max_level = 0;

  beslift::BesovParams besov() const {
    if (q_text == "inf") return beslift::BesovParams::make_qinf(s, p, dim);
    return beslift::BesovParams::make(s, p, std::stod(q_text), dim);
  }
  beslift::Domain dom() const {
    if (domain == "torus") return beslift::Domain::Torus;
    if (domain == "cube") return beslift::Domain::Cube;
    throw beslift::InvalidArgument("domain must be torus or cube");
  }
};

ordered_json report_header(const Options& opt) {
  ordered_json j;
  j["schema_version"] = 1;
  j["seed"] = opt.seed;
  return j;
}

void add_common_flags(CLI::App* cmd, Options& opt) {
  cmd->add_option("--s", opt.s, "smoothness s");
  cmd->add_option("--p", opt.p, "integrability exponent p");
  cmd->add_option("--q", opt.q_text, "summability exponent q, or 'inf'");
  cmd->add_option("--seed", opt.seed, "seed for counter-based randomness");
  cmd->add_option("--format", opt.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", opt.out_path, "output file (default stdout)");
}

int cmd_gen(const Options& opt) {
  using namespace beslift;
  ordered_json rep = report_header(opt);
  rep["command"] = "gen";
  rep["kind"] = opt.kind;

  if (opt.kind == "vortex") {
    const DyadicGrid g = make_grid(2, opt.level, opt.dom());
    const auto center =
        opt.center_set ? std::array<double, 2>{opt.center_x, opt.center_y}
                       : default_vortex_center(g);
    const CircleMap u = vortex(g, center);
    if (opt.out_path.empty()) throw InvalidArgument("gen needs --out");
    write_bsvg(opt.out_path, u.field, true);
    rep["center"] = {center[0], center[1]};
    rep["cells"] = g.cell_count();
  } else if (opt.kind == "nonrestriction" || opt.kind == "contrast") {
    const auto bp = opt.besov();
    const auto spec = opt.kind == "nonrestriction"
                          ? make_nonrestriction_spec(bp, opt.j0, opt.top_level)
                          : make_contrast_spec(bp, opt.j0, opt.top_level);
    const DyadicGrid g = make_grid(2, opt.level, Domain::Cube);
    const GridFunction f = nonrestriction(spec, g);
    if (opt.out_path.empty()) throw InvalidArgument("gen needs --out");
    write_bsvg(opt.out_path, f);
    rep["spec"] = nonrestriction_spec_json(spec);
    rep["cells"] = g.cell_count();
  } else if (opt.kind == "step") {
    const DyadicGrid g = make_grid(opt.dim, opt.level, opt.dom());
    const CounterRng rng{opt.seed};
    const DyadicGrid dg{g.dim, opt.desc_level, g.domain};
    std::vector<long long> vals(dg.cell_count());
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = rng.uniform_int(i, -5, 5);
    const GridFunction f = step_function(g, opt.desc_level, vals);
    if (opt.out_path.empty()) throw InvalidArgument("gen needs --out");
    write_bsvg(opt.out_path, f);
    rep["desc_level"] = opt.desc_level;
  } else if (opt.kind == "phase") {
    const DyadicGrid g = make_grid(opt.dim, opt.level, opt.dom());
    const CounterRng rng{opt.seed};
    GridFunction phi = GridFunction::zeros(g);
    for (std::size_t i = 0; i < phi.values.size(); ++i) {
      const auto c = g.coords(i);
      std::size_t pi = 0;
      const int pl = std::min(opt.piece_level, g.level);
      for (int k = 0; k < g.dim; ++k)
        pi = (pi << pl) | (static_cast<std::size_t>(c[k]) >> (g.level - pl));
      phi.values[i] = rng.uniform(pi, -2.0, 2.0);
    }
    const CircleMap u = to_circle(phi);
    if (opt.out_path.empty()) throw InvalidArgument("gen needs --out");
    write_bsvg(opt.out_path, u.field, true);
    rep["piece_level"] = opt.piece_level;
  } else {
    throw InvalidArgument("unknown gen kind: " + opt.kind);
  }
  std::cout << rep.dump() << '\n';
  return kExitOk;
}

int cmd_norm(const Options& opt) {
  using namespace beslift;
  const GridFunction f = read_bsvg(opt.in_path);
  auto bp = opt.besov();
  bp.dim = f.grid.dim;
  NormReport rep;
  if (opt.method == "diff")
    rep = diff_seminorm(f, bp, opt.order, opt.delta);
  else if (opt.method == "haar-avg")
    rep = haar_average_norm(f, bp);
  else if (opt.method == "haar-coeff")
    rep = haar_coeff_norm(haar_coeff_decompose(f, bp), bp);
  else
    throw InvalidArgument("unknown norm method: " + opt.method);

  if (opt.format == "csv") {
    emit(norm_report_csv(rep), opt.out_path);
  } else {
    ordered_json j = report_header(opt);
    j.update(norm_report_json(rep));
    emit(j.dump(), opt.out_path);
  }
  return kExitOk;
}

int cmd_lift(const Options& opt) {
  using namespace beslift;
  const GridFunction f = read_bsvg(opt.in_path);
  auto bp = opt.besov();
  bp.dim = f.grid.dim;
  const CircleMap u{f};
  LiftResult res;
  if (opt.method == "dyadic")
    res = lift_dyadic(u, bp);
  else if (opt.method == "mollifier")
    res = lift_mollifier(u, bp);
  else if (opt.method == "continuous")
    res = lift_continuous(u);
  else
    throw InvalidArgument("unknown lift method: " + opt.method);

  ordered_json j = report_header(opt);
  j.update(lift_result_json(res, opt.method.c_str()));
  std::cout << j.dump() << '\n';
  if (!opt.out_path.empty()) write_bsvg(opt.out_path, res.phase);
  return kExitOk;
}

int cmd_winding(const Options& opt) {
  using namespace beslift;
  const CircleMap u{read_bsvg(opt.in_path)};
  const WindingField wf = plaquette_winding(u);
  if (opt.format == "csv") {
    emit(winding_field_csv(wf), opt.out_path);
  } else {
    ordered_json j = report_header(opt);
    j["total"] = wf.total();
    auto pairs = ordered_json::array();
    for (std::size_t pi = 0; pi < wf.pairs.size(); ++pi) {
      long long t = 0;
      for (const auto w : wf.windings[pi]) t += w;
      pairs.push_back({{"pair", {wf.pairs[pi].first, wf.pairs[pi].second}}, {"total", t}});
    }
    j["pairs"] = std::move(pairs);
    emit(j.dump(), opt.out_path);
  }
  return kExitOk;
}

beslift::TestForm load_test_form(const Options& opt, const beslift::GridFunction& u) {
  using namespace beslift;
  const GridFunction z = read_bsvg(opt.zeta_path);
  if (u.grid.dim == 2) return TestForm::scalar(z);
  if (opt.alpha < 0) throw InvalidArgument("3-d pairings need --alpha");
  return TestForm::pure(opt.alpha, z);
}

int cmd_pair(const Options& opt) {
  using namespace beslift;
  const GridFunction f = read_bsvg(opt.in_path);
  const CircleMap u{f};
  const auto pr = pair_jacobian(u, load_test_form(opt, f));
  ordered_json j = report_header(opt);
  j.update(pairing_json(pr));
  emit(j.dump(), opt.out_path);
  return kExitOk;
}

int cmd_disintegrate(const Options& opt) {
  using namespace beslift;
  const GridFunction f = read_bsvg(opt.in_path);
  const CircleMap u{f};
  const auto [lhs, rhs] = disintegrate_check(u, load_test_form(opt, f), opt.alpha);
  ordered_json j = report_header(opt);
  j["alpha"] = opt.alpha;
  j["lhs"] = lhs;
  j["rhs"] = rhs;
  j["gap"] = lhs - rhs;
  emit(j.dump(), opt.out_path);
  return kExitOk;
}

int cmd_scan(const Options& opt) {
  using namespace beslift;
  const GridFunction f = read_bsvg(opt.in_path);
  auto bp = opt.besov();
  bp.dim = 2;
  std::vector<int> rows;
  if (opt.rows_text.empty() || opt.rows_text == "auto") {
    const int N = f.grid.cells_per_axis();
    for (int i = 0; i < std::min(N, 16); ++i) rows.push_back(i * (N / std::min(N, 16)));
  } else {
    std::string tok;
    for (std::istringstream ss(opt.rows_text); std::getline(ss, tok, ',');)
      rows.push_back(std::stoi(tok));
  }
  const auto entries = restriction_scan(f, bp, rows);
  emit(scan_csv(entries), opt.out_path);
  return kExitOk;
}

int cmd_verify(const Options& opt, bool seed_given) {
  using namespace beslift;
  VerifyOptions vo;  // reference seed unless one was passed explicitly
  if (seed_given) vo.seed = opt.seed;
  vo.max_level = opt.max_level;
  std::vector<int> wanted;
  if (opt.suite != "all") {
    std::string tok;
    for (std::istringstream ss(opt.suite); std::getline(ss, tok, ',');) {
      const int id = std::stoi(tok);
      if (id < 1 || id > static_cast<int>(acceptance_criteria().size()))
        throw InvalidArgument("no criterion " + tok);
      wanted.push_back(id);
    }
  }
  std::printf("# seed %llu, max-level %d\n",
              static_cast<unsigned long long>(vo.seed), vo.max_level);
  const auto results = run_acceptance(vo, nullptr, wanted);
  bool all_pass = true;
  for (const auto& r : results) {
    std::printf("%s  %2d  %-28s (%s)\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.detail.c_str());
    all_pass = all_pass && r.pass;
  }
  return all_pass ? kExitOk : kExitInternal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dyadic-grid toolkit for circle-valued map lifting"};
  app.require_subcommand(1);
  Options opt;

  auto* gen = app.add_subcommand("gen", "generate a field and write it as BSVG");
  gen->add_option("--kind", opt.kind, "vortex | nonrestriction | contrast | step | phase")
      ->required();
  gen->add_option("--dim", opt.dim, "grid dimension");
  gen->add_option("--level", opt.level, "grid level J");
  gen->add_option("--domain", opt.domain, "torus or cube")
      ->check(CLI::IsMember({"torus", "cube"}));
  gen->add_option("--j0", opt.j0, "first construction level");
  gen->add_option("--top", opt.top_level, "last construction level");
  gen->add_option("--desc-level", opt.desc_level, "step description level");
  gen->add_option("--piece-level", opt.piece_level, "phase piece level");
  gen->add_option("--center-x", opt.center_x, "vortex center x")->each([&](std::string) {
    opt.center_set = true;
  });
  gen->add_option("--center-y", opt.center_y, "vortex center y")->each([&](std::string) {
    opt.center_set = true;
  });
  add_common_flags(gen, opt);

  auto* norm = app.add_subcommand("norm", "norm estimators on a BSVG field");
  norm->add_option("--in", opt.in_path, "input BSVG")->required();
  norm->add_option("--method", opt.method, "diff | haar-avg | haar-coeff")->required();
  norm->add_option("--order", opt.order, "difference order M");
  norm->add_option("--delta", opt.delta, "offset cutoff delta");
  add_common_flags(norm, opt);

  auto* lift = app.add_subcommand("lift", "lift a circle-valued BSVG field");
  lift->add_option("--in", opt.in_path, "input BSVG")->required();
  lift->add_option("--method", opt.method, "dyadic | mollifier | continuous")->required();
  add_common_flags(lift, opt);

  auto* winding = app.add_subcommand("winding", "plaquette winding field");
  winding->add_option("--in", opt.in_path, "input BSVG")->required();
  add_common_flags(winding, opt);

  auto* pair = app.add_subcommand("pair", "Jacobian pairing with a test form");
  pair->add_option("--in", opt.in_path, "input BSVG (circle map)")->required();
  pair->add_option("--zeta", opt.zeta_path, "test form BSVG")->required();
  pair->add_option("--alpha", opt.alpha, "omitted axis (3-d pure forms)");
  add_common_flags(pair, opt);

  auto* dis = app.add_subcommand("disintegrate", "two-plane disintegration check");
  dis->add_option("--in", opt.in_path, "input BSVG (3-d circle map)")->required();
  dis->add_option("--zeta", opt.zeta_path, "test form BSVG")->required();
  dis->add_option("--alpha", opt.alpha, "omitted axis")->required();
  add_common_flags(dis, opt);

  auto* scan = app.add_subcommand("scan-restriction", "per-row running sup statistics");
  scan->add_option("--in", opt.in_path, "input BSVG (2-d field)")->required();
  scan->add_option("--rows", opt.rows_text, "comma-separated x cells, or 'auto'");
  add_common_flags(scan, opt);

  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  verify->add_option("--suite", opt.suite, "all, or comma-separated criterion ids");
  verify->add_option("--max-level", opt.max_level, "clamp level ranges (0 = full)");
  auto* verify_seed = verify->add_option("--seed", opt.seed, "seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    nlohmann::ordered_json err{{"error", "BadArguments"}, {"message", e.what()}};
    std::cerr << err.dump() << '\n';
    return kExitValidation;
  }

  try {
    if (gen->parsed()) return cmd_gen(opt);
    if (norm->parsed()) return cmd_norm(opt);
    if (lift->parsed()) return cmd_lift(opt);
    if (winding->parsed()) return cmd_winding(opt);
    if (pair->parsed()) return cmd_pair(opt);
    if (dis->parsed()) return cmd_disintegrate(opt);
    if (scan->parsed()) return cmd_scan(opt);
    if (verify->parsed()) return cmd_verify(opt, verify_seed->count() > 0);
  } catch (const beslift::ObstructionDetected& e) {
    nlohmann::ordered_json err{{"error", "ObstructionDetected"}, {"message", e.what()}};
    std::cerr << err.dump() << '\n';
    nlohmann::ordered_json j{{"schema_version", 1}, {"seed", opt.seed}};
    j["witness"] = beslift::obstruction_json(e.witness);
    std::cout << j.dump() << '\n';
    return kExitObstruction;
  } catch (const beslift::ModulusCollapse& e) {
    nlohmann::ordered_json err{{"error", "ModulusCollapse"},
                               {"message", e.what()},
                               {"eps", e.eps},
                               {"cell", e.cell}};
    std::cerr << err.dump() << '\n';
    return kExitObstruction;
  } catch (const beslift::InternalError& e) {
    nlohmann::ordered_json err{{"error", "InternalError"}, {"message", e.what()}};
    std::cerr << err.dump() << '\n';
    return kExitInternal;
  } catch (const beslift::Error& e) {
    nlohmann::ordered_json err{{"error", "ValidationError"}, {"message", e.what()}};
    std::cerr << err.dump() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    nlohmann::ordered_json err{{"error", "Unexpected"}, {"message", e.what()}};
    std::cerr << err.dump() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}
