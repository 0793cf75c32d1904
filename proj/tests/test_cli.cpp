#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "beslift/io.hpp"
#include "beslift/lifting.hpp"

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(BESLIFT_CLI_PATH) + " " + args + " 2>/dev/null";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("beslift_cli_test_" + name);
}

}  // namespace

namespace {

std::string file_bytes(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, GenNormDeterminism) {
  const auto path = temp_file("det.bsvg");
  const auto path2 = temp_file("det2.bsvg");
  const std::string gen = "gen --kind phase --dim 1 --level 7 --seed 42 --out ";
  ASSERT_EQ(run_cli(gen + path.string()).exit_code, 0);
  ASSERT_EQ(run_cli(gen + path2.string()).exit_code, 0);
  EXPECT_EQ(file_bytes(path), file_bytes(path2));  // identical seed, identical bytes

  const std::string norm =
      "norm --in " + path.string() + " --method haar-avg --s 0.3 --p 2 --q 2";
  const auto a = run_cli(norm);
  const auto b = run_cli(norm);
  EXPECT_EQ(a.exit_code, 0);
  EXPECT_EQ(a.out, b.out);
  std::filesystem::remove(path);
  std::filesystem::remove(path2);
}

TEST(Cli, ConstantFieldNormIsModulus) {
  const auto g = beslift::make_grid(1, 4, beslift::Domain::Torus);
  const auto path = temp_file("const.bsvg");
  beslift::write_bsvg(path.string(),
                      beslift::GridFunction::constant(g, beslift::complexd{-2.0, 0.0}));
  const auto r =
      run_cli("norm --in " + path.string() + " --method haar-avg --s 0.3 --p 2 --q 2");
  ASSERT_EQ(r.exit_code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j.at("total").get<double>(), 2.0, 1e-12);
  EXPECT_EQ(j.at("schema_version").get<int>(), 1);
  std::filesystem::remove(path);
}

TEST(Cli, VortexContinuousLiftExitsTwoWithWitness) {
  const auto path = temp_file("vortex.bsvg");
  ASSERT_EQ(run_cli("gen --kind vortex --level 5 --domain cube --out " + path.string())
                .exit_code,
            0);
  const auto r = run_cli("lift --in " + path.string() + " --method continuous");
  EXPECT_EQ(r.exit_code, 2);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("witness").at("winding").get<int>(), 1);
  std::filesystem::remove(path);
}

TEST(Cli, FilePipelineMatchesInMemory) {
  const auto in_path = temp_file("phase_in.bsvg");
  const auto out_path = temp_file("phase_out.bsvg");
  ASSERT_EQ(run_cli("gen --kind phase --dim 1 --level 6 --seed 9 --out " + in_path.string())
                .exit_code,
            0);
  const auto r = run_cli("lift --in " + in_path.string() +
                         " --method dyadic --s 0.3 --p 2 --q 2 --out " + out_path.string());
  ASSERT_EQ(r.exit_code, 0);

  const beslift::CircleMap u{beslift::read_bsvg(in_path.string())};
  const auto lift = beslift::lift_dyadic(u, beslift::BesovParams::make(0.3, 2, 2, 1));
  const auto phase_from_file = beslift::read_bsvg(out_path.string());
  ASSERT_EQ(phase_from_file.values.size(), lift.phase.values.size());
  for (std::size_t i = 0; i < lift.phase.values.size(); ++i)
    EXPECT_EQ(phase_from_file.values[i], lift.phase.values[i]);

  const auto j = nlohmann::json::parse(r.out);
  EXPECT_LE(j.at("residual").get<double>(), 1e-9);
  std::filesystem::remove(in_path);
  std::filesystem::remove(out_path);
}

TEST(Cli, WindingCsvOnVortex) {
  const auto path = temp_file("w.bsvg");
  ASSERT_EQ(run_cli("gen --kind vortex --level 4 --domain cube --out " + path.string())
                .exit_code,
            0);
  const auto r = run_cli("winding --in " + path.string() + " --format csv");
  ASSERT_EQ(r.exit_code, 0);
  const std::string header = "pair,i0,i1,winding\n";
  EXPECT_EQ(r.out.substr(0, header.size()), header);
  // exactly one charged plaquette
  std::size_t ones = 0;
  for (std::size_t pos = header.size(); pos < r.out.size();) {
    const auto eol = r.out.find('\n', pos);
    if (r.out.substr(pos, eol - pos).ends_with(",1")) ++ones;
    pos = eol + 1;
  }
  EXPECT_EQ(ones, 1u);
  std::filesystem::remove(path);
}

TEST(Cli, ScanRestrictionEmitsCsv) {
  const auto path = temp_file("nr.bsvg");
  ASSERT_EQ(run_cli("gen --kind nonrestriction --s 0.4 --p 2 --q 6 --j0 4 --top 6 "
                    "--level 8 --out " +
                    path.string())
                .exit_code,
            0);
  const auto r = run_cli("scan-restriction --in " + path.string() +
                         " --s 0.4 --p 2 --q 6 --rows 64,128");
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out.substr(0, 18), "row,J,running_sup\n");
  std::filesystem::remove(path);
}

TEST(Cli, PairAndDisintegrate) {
  using namespace beslift;
  const auto upath = temp_file("pair_u.bsvg");
  const auto zpath = temp_file("pair_z.bsvg");
  const auto g = make_grid(2, 5, Domain::Cube);
  write_bsvg(upath.string(), vortex(g).field, true);
  GridFunction z = GridFunction::zeros(g);
  const int N = g.cells_per_axis();
  for (std::size_t i = 0; i < z.values.size(); ++i) {
    const auto c = g.coords(i);
    if (c[0] > 0 && c[0] < N - 1 && c[1] > 0 && c[1] < N - 1) z.values[i] = 1.0;
  }
  // interior indicator is 1 on the four cells around the core
  write_bsvg(zpath.string(), z);
  const auto r = run_cli("pair --in " + upath.string() + " --zeta " + zpath.string());
  ASSERT_EQ(r.exit_code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j.at("singular").get<double>(), 3.14159265358979, 1e-9);

  const auto u3path = temp_file("dis_u.bsvg");
  const auto z3path = temp_file("dis_z.bsvg");
  const auto g3 = make_grid(3, 3, Domain::Cube);
  write_bsvg(u3path.string(), GridFunction::constant(g3, complexd{0, 1}), true);
  write_bsvg(z3path.string(), GridFunction::zeros(g3));
  const auto d = run_cli("disintegrate --in " + u3path.string() + " --zeta " +
                         z3path.string() + " --alpha 2");
  ASSERT_EQ(d.exit_code, 0);
  const auto dj = nlohmann::json::parse(d.out);
  EXPECT_EQ(dj.at("lhs").get<double>(), 0.0);
  EXPECT_EQ(dj.at("rhs").get<double>(), 0.0);
  for (const auto& p : {upath, zpath, u3path, z3path}) std::filesystem::remove(p);
}

TEST(Cli, ValidationErrorsExitThree) {
  EXPECT_EQ(run_cli("norm --in /nonexistent.bsvg --method haar-avg").exit_code, 3);
  EXPECT_EQ(run_cli("gen --kind vortex --level 99 --out /tmp/x.bsvg").exit_code, 3);
  EXPECT_EQ(run_cli("gen --kind bogus --out /tmp/x.bsvg").exit_code, 3);
  EXPECT_EQ(run_cli("frobnicate").exit_code, 3);
}

TEST(Cli, MollifierCollapseExitsTwo) {
  const auto path = temp_file("vt.bsvg");
  ASSERT_EQ(run_cli("gen --kind vortex --level 6 --domain torus --out " + path.string())
                .exit_code,
            0);
  const auto r = run_cli("lift --in " + path.string() + " --method mollifier --s 0.3 --p 2 --q 2");
  EXPECT_EQ(r.exit_code, 2);
  std::filesystem::remove(path);
}

TEST(Cli, VerifySubsetRunsClamped) {
  const auto r = run_cli("verify --suite 2 --max-level 5");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
  EXPECT_NE(r.out.find("obstruction-dichotomy"), std::string::npos);
}
