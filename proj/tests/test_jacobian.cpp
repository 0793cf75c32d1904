#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "beslift/counterexamples.hpp"
#include "beslift/jacobian.hpp"
#include "beslift/lifting.hpp"
#include "beslift/rng.hpp"

using namespace beslift;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

GridFunction smooth_phase(const DyadicGrid& g, double amp, std::uint64_t seed) {
  const CounterRng rng{seed};
  const double a = rng.uniform(0, -1, 1), b = rng.uniform(1, -1, 1);
  GridFunction f = GridFunction::zeros(g);
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const auto x = g.cell_center(i);
    double v = a * std::sin(two_pi * x[0]);
    if (g.dim >= 2) v += b * std::cos(two_pi * x[1]);
    if (g.dim >= 3) v += 0.5 * std::sin(two_pi * x[2]);
    f.values[i] = amp * v;
  }
  return f;
}

GridFunction compact_bump(const DyadicGrid& g, std::uint64_t seed) {
  const CounterRng rng{seed};
  const double c = rng.uniform(0, 0.5, 1.5);
  GridFunction z = GridFunction::zeros(g);
  const int N = g.cells_per_axis();
  for (std::size_t i = 0; i < z.values.size(); ++i) {
    const auto x = g.cell_center(i);
    double v = c;
    for (int k = 0; k < g.dim; ++k) v *= std::sin(std::numbers::pi * x[k]);
    z.values[i] = v;
  }
  // compact support: zero on boundary cells
  for (std::size_t i = 0; i < z.values.size(); ++i) {
    const auto cc = g.coords(i);
    for (int k = 0; k < g.dim; ++k)
      if (cc[k] == 0 || cc[k] == N - 1) z.values[i] = 0.0;
  }
  return z;
}

}  // namespace

TEST(UwedgeGrad, ConstantAndLinear) {
  const auto g = make_grid(2, 5, Domain::Torus);
  const auto zero = uwedge_grad(CircleMap{GridFunction::constant(g, complexd{0, 1})});
  for (const auto& comp : zero)
    for (const auto& v : comp.values) EXPECT_EQ(v, complexd(0));

  GridFunction phi = GridFunction::zeros(g);
  for (std::size_t i = 0; i < phi.values.size(); ++i)
    phi.values[i] = two_pi * g.cell_center(i)[0];
  const auto field = uwedge_grad(to_circle(phi));
  for (const auto& v : field[0].values) EXPECT_NEAR(v.real(), two_pi, 1e-9);
  for (const auto& v : field[1].values) EXPECT_NEAR(v.real(), 0.0, 1e-9);
}

TEST(UwedgeGrad, VortexDecaysLikeOneOverR) {
  const auto g = make_grid(2, 8, Domain::Cube);
  const auto center = default_vortex_center(g);
  const auto field = uwedge_grad(vortex(g));
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    const auto x = g.cell_center(i);
    const double r = std::hypot(x[0] - center[0], x[1] - center[1]);
    if (r < 0.1 || r > 0.3) continue;  // away from core and boundary
    const double mag = std::hypot(field[0].values[i].real(), field[1].values[i].real());
    EXPECT_NEAR(mag * r, 1.0, 0.2);
  }
}

TEST(UwedgeGrad, AntipodalNeighborsRejected) {
  const auto g = make_grid(1, 2, Domain::Torus);
  GridFunction f = GridFunction::zeros(g);
  f.values = {complexd{1, 0}, complexd{-1, 0}, complexd{1, 0}, complexd{-1, 0}};
  EXPECT_THROW(uwedge_grad(CircleMap{f}), DegenerateEdge);
}

TEST(PlaquetteWinding, VortexChargeAndLocation) {
  const auto g = make_grid(2, 5, Domain::Cube);
  const auto wf = plaquette_winding(vortex(g));
  EXPECT_EQ(wf.total(), 1);
  // the only charged plaquette is the one whose four cell centers surround
  // the core
  const auto center = default_vortex_center(g);
  int charged = 0;
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    if (wf.windings[0][i] == 0) continue;
    ++charged;
    const auto x = g.cell_center(i);
    EXPECT_LT(std::abs(x[0] + 0.5 * g.mesh() - center[0]), g.mesh());
    EXPECT_LT(std::abs(x[1] + 0.5 * g.mesh() - center[1]), g.mesh());
  }
  EXPECT_EQ(charged, 1);
}

TEST(PlaquetteWinding, LiftableMapsAreChargeFree) {
  for (int trial = 0; trial < 5; ++trial) {
    const auto g = make_grid(2, 5, Domain::Torus);
    const auto wf = plaquette_winding(to_circle(smooth_phase(g, 1.0, 40 + trial)));
    for (const auto v : wf.windings[0]) EXPECT_EQ(v, 0);
  }
}

TEST(PlaquetteWinding, TorusTelescoping) {
  // the total over a closed 2-torus vanishes even with axis windings present
  const auto g = make_grid(2, 5, Domain::Torus);
  GridFunction phi = smooth_phase(g, 1.0, 99);
  for (std::size_t i = 0; i < phi.values.size(); ++i)
    phi.values[i] += two_pi * g.cell_center(i)[0];
  EXPECT_EQ(plaquette_winding(to_circle(phi)).total(), 0);
}

TEST(PlaquetteWinding, TorusTelescopingPerSliceIn3d) {
  // for each axis pair and each transverse index, the closed 2-torus of
  // plaquettes carries total charge zero
  const auto g = make_grid(3, 3, Domain::Torus);
  GridFunction phi = smooth_phase(g, 0.9, 55);
  for (std::size_t i = 0; i < phi.values.size(); ++i)
    phi.values[i] += two_pi * g.cell_center(i)[1];
  const auto wf = plaquette_winding(to_circle(phi));
  const int N = g.cells_per_axis();
  for (std::size_t pi = 0; pi < wf.pairs.size(); ++pi) {
    const auto [a, b] = wf.pairs[pi];
    const int t = 3 - a - b;  // transverse axis
    for (int slice_idx = 0; slice_idx < N; ++slice_idx) {
      long long total = 0;
      for (std::size_t i = 0; i < g.cell_count(); ++i)
        if (g.coords(i)[t] == slice_idx) total += wf.windings[pi][i];
      EXPECT_EQ(total, 0);
    }
  }
}

TEST(PlaquetteWinding, ThreeDimensionalPairs) {
  const auto g = make_grid(3, 3, Domain::Cube);
  const auto wf = plaquette_winding(CircleMap{GridFunction::constant(g, complexd{1, 0})});
  ASSERT_EQ(wf.pairs.size(), 3u);
  EXPECT_EQ(wf.pairs[0], (std::pair<int, int>{0, 1}));
  EXPECT_EQ(wf.pairs[1], (std::pair<int, int>{0, 2}));
  EXPECT_EQ(wf.pairs[2], (std::pair<int, int>{1, 2}));
  EXPECT_EQ(wf.total(), 0);
}

TEST(PairJacobian, VortexPlateauGivesPi) {
  const auto g = make_grid(2, 6, Domain::Cube);
  const CircleMap u = vortex(g);
  // zeta = 1 on the middle quarter, tapering to 0 well inside the boundary
  const GridFunction z = sample(
      g,
      std::function<double(std::array<double, 3>)>([](std::array<double, 3> x) {
        auto ramp = [](double t) {
          t = std::clamp((t - 0.125) / 0.25, 0.0, 1.0);
          return t * t * (3 - 2 * t);
        };
        return ramp(x[0]) * ramp(1.0 - x[0]) * ramp(x[1]) * ramp(1.0 - x[1]);
      }),
      4);
  const auto pr = pair_jacobian(u, TestForm::scalar(z));
  EXPECT_NEAR(pr.singular, std::numbers::pi, 1e-12);
  EXPECT_NEAR(pr.direct, std::numbers::pi, 0.05);
}

TEST(PairJacobian, LiftableMapsPairToZero) {
  const auto g = make_grid(2, 6, Domain::Cube);
  for (int trial = 0; trial < 5; ++trial) {
    const CircleMap u = to_circle(smooth_phase(g, 0.8, 60 + trial));
    const auto pr = pair_jacobian(u, TestForm::scalar(compact_bump(g, 160 + trial)));
    EXPECT_EQ(pr.singular, 0.0);
    EXPECT_LE(std::abs(pr.direct), 5e-3);
  }
}

TEST(PairJacobian, LinearInTestForm) {
  const auto g = make_grid(2, 5, Domain::Cube);
  const CircleMap u = vortex(g);
  const GridFunction z1 = compact_bump(g, 71);
  const GridFunction z2 = compact_bump(g, 72);
  GridFunction combo = GridFunction::zeros(g);
  const double a = 1.7, b = -0.4;
  for (std::size_t i = 0; i < combo.values.size(); ++i)
    combo.values[i] = a * z1.values[i] + b * z2.values[i];
  const auto p1 = pair_jacobian(u, TestForm::scalar(z1));
  const auto p2 = pair_jacobian(u, TestForm::scalar(z2));
  const auto pc = pair_jacobian(u, TestForm::scalar(combo));
  EXPECT_NEAR(pc.singular, a * p1.singular + b * p2.singular, 1e-12);
  EXPECT_NEAR(pc.direct, a * p1.direct + b * p2.direct, 1e-12);
}

TEST(PairJacobian, SupportViolationDetected) {
  const auto g = make_grid(2, 4, Domain::Cube);
  const CircleMap u{GridFunction::constant(g, complexd{1, 0})};
  EXPECT_THROW(pair_jacobian(u, TestForm::scalar(GridFunction::constant(g, 1.0))),
               SupportViolation);
}

TEST(Disintegrate, ConstantMapGivesZeros) {
  const auto g = make_grid(3, 3, Domain::Cube);
  const CircleMap u{GridFunction::constant(g, complexd{0, 1})};
  const auto [lhs, rhs] = disintegrate_check(u, TestForm::pure(2, compact_bump(g, 81)), 2);
  EXPECT_EQ(lhs, 0.0);
  EXPECT_EQ(rhs, 0.0);
}

TEST(Disintegrate, ExtrudedVortexSlicesExactly) {
  const auto g3 = make_grid(3, 4, Domain::Cube);
  const auto g2 = make_grid(2, 4, Domain::Cube);
  const auto v2 = vortex(g2).field;
  GridFunction u3 = GridFunction::zeros(g3);
  for (std::size_t i = 0; i < u3.values.size(); ++i) {
    const auto c = g3.coords(i);
    u3.values[i] = v2.values[(static_cast<std::size_t>(c[0]) << 4) | c[1]];
  }
  const TestForm zeta = TestForm::pure(2, compact_bump(g3, 91));
  const auto [lhs, rhs] = disintegrate_check(CircleMap{u3}, zeta, 2);
  EXPECT_NEAR(lhs, rhs, 1e-12);
  EXPECT_NE(lhs, 0.0);  // the form wraps the core line
}

TEST(Disintegrate, ValidatesInputs) {
  const auto g2 = make_grid(2, 3, Domain::Cube);
  const CircleMap u2{GridFunction::constant(g2, complexd{1, 0})};
  EXPECT_THROW(disintegrate_check(u2, TestForm::scalar(compact_bump(g2, 3)), 0), BadAxisSet);
}
