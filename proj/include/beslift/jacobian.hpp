#pragma once

// Discrete distributional Jacobian of a circle-valued grid map. Edge phase
// increments use principal values, so the plaquette winding field is
// integer-quantized: the Jacobian is pi times a sum of integer point charges
// rather than an approximate smooth curl. Pairings with test forms come in
// two flavours, a direct discretization of the defining integral and the
// singular (charge-counting) form, cross-validated downstream.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include "beslift/grid.hpp"

namespace beslift {

struct WindingField {
  DyadicGrid grid;
  std::vector<std::pair<int, int>> pairs;            // axis pairs (a,b), a < b
  std::vector<std::vector<std::int32_t>> windings;   // per pair, base-cell lattice

  long long total() const {
    long long t = 0;
    for (const auto& w : windings)
      for (const auto v : w) t += v;
    return t;
  }
};

// Coefficients of an (n-2)-form test object: a single scalar zeta for n = 2,
// or components zeta^alpha (alpha = the omitted axis) for n = 3. Compactly
// supported inside the open cube when the domain is Cube.
struct TestForm {
  DyadicGrid grid;
  std::vector<std::pair<int, GridFunction>> components;  // (alpha, zeta^alpha)

  static TestForm scalar(GridFunction z) {
    if (z.grid.dim != 2) throw BadAxisSet("scalar test forms are for 2-d grids");
    TestForm t{z.grid, {}};
    t.components.emplace_back(-1, std::move(z));
    return t;
  }
  static TestForm pure(int alpha, GridFunction z) {
    if (z.grid.dim != 3) throw BadAxisSet("pure dx^alpha test forms are for 3-d grids");
    if (alpha < 0 || alpha > 2) throw BadAxisSet("alpha must be an axis index");
    TestForm t{z.grid, {}};
    t.components.emplace_back(alpha, std::move(z));
    return t;
  }

  bool is_pure() const { return components.size() == 1; }

  void validate_support() const {
    if (grid.domain != Domain::Cube) return;
    const int N = grid.cells_per_axis();
    for (const auto& [alpha, z] : components)
      for (std::size_t i = 0; i < z.values.size(); ++i) {
        const auto c = grid.coords(i);
        bool boundary = false;
        for (int k = 0; k < grid.dim; ++k)
          boundary = boundary || c[k] == 0 || c[k] == N - 1;
        if (boundary && z.values[i] != complexd{0.0, 0.0})
          throw SupportViolation("test form is nonzero on a boundary cell");
      }
  }
};

namespace detail {

// Levi-Civita sign of (alpha, a, b) where {a,b} is the ordered complement.
inline int orientation_sign(int alpha) { return alpha == 1 ? -1 : 1; }

inline std::pair<int, int> complement_pair(int alpha) {
  switch (alpha) {
    case 0: return {1, 2};
    case 1: return {0, 2};
    default: return {0, 1};
  }
}

}  // namespace detail

// Edge-based tangent field: component a at cell x is the principal-value
// increment Arg(u(x+e_a) conj(u(x))) times 2^J, i.e. the difference quotient
// of the local phase. Zero where the forward edge leaves the cube.
inline std::vector<GridFunction> uwedge_grad(const CircleMap& u) {
  const DyadicGrid& g = u.grid();
  const double scale = std::exp2(g.level);
  std::vector<GridFunction> comp;
  for (int axis = 0; axis < g.dim; ++axis) {
    GridFunction f = GridFunction::zeros(g);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      auto c = g.coords(i);
      if (!g.shift(c, axis, 1)) continue;
      f.values[i] =
          scale * detail::principal_increment(u.values()[i], u.values()[g.flat(c)], i, axis);
    }
    comp.push_back(std::move(f));
  }
  return comp;
}

// Winding per 2-plaquette: (1/2 pi) times the counterclockwise sum of the
// four principal-value increments; exact integer by construction.
inline WindingField plaquette_winding(const CircleMap& u) {
  const DyadicGrid& g = u.grid();
  constexpr double two_pi = 2.0 * std::numbers::pi;
  WindingField wf{g, {}, {}};
  for (int a = 0; a < g.dim; ++a)
    for (int b = a + 1; b < g.dim; ++b) wf.pairs.emplace_back(a, b);
  wf.windings.assign(wf.pairs.size(), std::vector<std::int32_t>(g.cell_count(), 0));

  for (std::size_t pi_ = 0; pi_ < wf.pairs.size(); ++pi_) {
    const auto [a, b] = wf.pairs[pi_];
    for (std::size_t i = 0; i < g.cell_count(); ++i) {
      const auto c00 = g.coords(i);
      auto c10 = c00, c01 = c00, c11 = c00;
      if (!g.shift(c10, a, 1) || !g.shift(c01, b, 1)) continue;  // cube border
      c11 = c10;
      g.shift(c11, b, 1);
      const complexd v00 = u.values()[i];
      const complexd v10 = u.values()[g.flat(c10)];
      const complexd v11 = u.values()[g.flat(c11)];
      const complexd v01 = u.values()[g.flat(c01)];
      const double acc = detail::principal_increment(v00, v10, i, a) +
                         detail::principal_increment(v10, v11, g.flat(c10), b) +
                         detail::principal_increment(v11, v01, g.flat(c11), a) +
                         detail::principal_increment(v01, v00, g.flat(c01), b);
      const double turns = acc / two_pi;
      const long k = std::lround(turns);
      if (std::abs(turns - k) > 1e-9)
        throw InternalError("plaquette sum is not a multiple of 2 pi");
      wf.windings[pi_][i] = static_cast<std::int32_t>(k);
    }
  }
  return wf;
}

struct JacobianPairing {
  double direct = 0.0;    // discretized integral against the tangent field
  double singular = 0.0;  // pi * sum of winding * zeta at plaquette centers
};

namespace detail {

// zeta averaged over the four corner cells of the plaquette with base `c`.
inline double plaquette_mean(const GridFunction& z, std::array<int, 3> c, int a, int b) {
  const DyadicGrid& g = z.grid;
  auto c10 = c, c01 = c, c11 = c;
  g.shift(c10, a, 1);
  g.shift(c01, b, 1);
  c11 = c10;
  g.shift(c11, b, 1);
  return 0.25 * (z.values[g.flat(c)] + z.values[g.flat(c10)] + z.values[g.flat(c01)] +
                 z.values[g.flat(c11)])
                    .real();
}

// centered difference of zeta along `axis` at cell i (zero outside the cube)
inline double centered_diff(const GridFunction& z, std::size_t i, int axis) {
  const DyadicGrid& g = z.grid;
  const auto c = g.coords(i);
  auto cp = c, cm = c;
  const double fwd = g.shift(cp, axis, 1) ? z.values[g.flat(cp)].real() : 0.0;
  const double bwd = g.shift(cm, axis, -1) ? z.values[g.flat(cm)].real() : 0.0;
  return 0.5 * (fwd - bwd) * std::exp2(g.level);
}

inline double singular_pairing_component(const WindingField& wf, const GridFunction& zeta,
                                         int a, int b, int alpha) {
  const DyadicGrid& g = wf.grid;
  std::size_t pair_idx = 0;
  while (wf.pairs[pair_idx] != std::pair<int, int>{a, b}) ++pair_idx;
  const double slice_measure = (g.dim == 3) ? g.mesh() : 1.0;
  const double sgn = (g.dim == 3) ? detail::orientation_sign(alpha) : 1.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    const int w = wf.windings[pair_idx][i];
    if (w == 0) continue;
    acc += w * plaquette_mean(zeta, g.coords(i), a, b);
  }
  return sgn * std::numbers::pi * slice_measure * acc;
}

}  // namespace detail

// Both evaluators of <Ju, zeta>. The direct one discretizes
// -(1/2) int grad(zeta) ^ (u ^ grad u) with centered differences of zeta
// against the edge-sampled tangent field; the singular one counts plaquette
// charges. The two routes are independent discretizations whose gap is
// O(2^-J) |grad zeta| (winding mass).
inline JacobianPairing pair_jacobian(const CircleMap& u, const TestForm& zeta) {
  const DyadicGrid& g = u.grid();
  if (zeta.grid != g) throw DomainMismatch("test form lives on a different grid");
  zeta.validate_support();

  const auto field = uwedge_grad(u);
  const auto wf = plaquette_winding(u);
  const double vol = std::exp2(-static_cast<double>(g.dim) * g.level);

  JacobianPairing out;
  for (const auto& [alpha, z] : zeta.components) {
    const auto [a, b] = (g.dim == 2) ? std::pair<int, int>{0, 1}
                                     : detail::complement_pair(alpha);
    const double sgn = (g.dim == 3) ? detail::orientation_sign(alpha) : 1.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < g.cell_count(); ++i) {
      const double dzb = detail::centered_diff(z, i, b);
      const double dza = detail::centered_diff(z, i, a);
      acc += dzb * field[a].values[i].real() - dza * field[b].values[i].real();
    }
    out.direct += sgn * 0.5 * vol * acc;
    out.singular += detail::singular_pairing_component(wf, z, a, b, alpha);
  }
  return out;
}

// Two routes to <Ju, zeta^alpha dx^alpha> on a 3-d grid: lhs sums the charges
// of the plaquettes transverse to alpha directly; rhs slices u along alpha
// and accumulates the 2-d singular pairings of the slices. The two are the
// same weighted integer sums by construction.
inline std::pair<double, double> disintegrate_check(const CircleMap& u, const TestForm& zeta,
                                                    int alpha) {
  const DyadicGrid& g = u.grid();
  if (g.dim != 3) throw BadAxisSet("disintegration is a 3-d check");
  if (!zeta.is_pure() || zeta.components[0].first != alpha)
    throw BadAxisSet("test form must be pure of type zeta^alpha dx^alpha");
  zeta.validate_support();

  const auto wf = plaquette_winding(u);
  const auto [a, b] = detail::complement_pair(alpha);
  const double lhs =
      detail::singular_pairing_component(wf, zeta.components[0].second, a, b, alpha);

  const double sgn = detail::orientation_sign(alpha);
  const int N = g.cells_per_axis();
  double rhs = 0.0;
  for (int i = 0; i < N; ++i) {
    const GridFunction us = slice(u.field, {alpha}, {i});
    const GridFunction zs = slice(zeta.components[0].second, {alpha}, {i});
    const auto wf2 = plaquette_winding(CircleMap(us));
    double acc = 0.0;
    for (std::size_t c = 0; c < wf2.grid.cell_count(); ++c) {
      const int w = wf2.windings[0][c];
      if (w == 0) continue;
      acc += w * detail::plaquette_mean(zs, wf2.grid.coords(c), 0, 1);
    }
    rhs += std::numbers::pi * acc;
  }
  rhs *= sgn * g.mesh();
  return {lhs, rhs};
}

}  // namespace beslift
