#pragma once

// Three constructive liftings of a circle-valued grid map u = e^{i phi}:
//
//   lift_dyadic     - normalizes the dyadic averages U_j = E_j(u)/|E_j(u)|
//                     and tracks the phase across levels via nearest_phase;
//                     never fails, and |phi_j - phi_{j-1}| <= pi |U_j - U_{j-1}|
//                     holds pointwise at every level by construction.
//   lift_mollifier  - tracks the phase of w_eps = F_eps/|F_eps| down a ladder
//                     of mollifications F_eps = u * rho_eps, valid while
//                     |F_eps| > 1/2 everywhere; torus maps of nonzero degree
//                     are de-periodized by removing the exact linear phase
//                     first and re-adding it at the end.
//   lift_continuous - BFS phase propagation over the cell adjacency graph
//                     with loop-consistency checks; fails with an explicit
//                     winding witness when a topological obstruction exists.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "beslift/besov.hpp"
#include "beslift/grid.hpp"

namespace beslift {

struct LiftResult {
  GridFunction phase;                   // real-valued
  std::array<int, 3> axis_windings{0, 0, 0};
  double residual = 0.0;                // max |e^{i phi} conj(u) - 1|
  std::vector<double> level_increments; // per level/ladder step, max |phi - prev|
  std::optional<double> norm_ratio;     // haar_average_norm(phi) / haar_average_norm(u)
  std::vector<double> min_modulus;      // mollifier ladder: min |F_eps| per step
};

struct ObstructionWitness {
  std::vector<std::size_t> loop;  // closed: first cell repeated at the end
  int winding = 0;
};

struct ObstructionDetected : Error {
  ObstructionWitness witness;
  explicit ObstructionDetected(ObstructionWitness w)
      : Error("topological obstruction: loop winding " + std::to_string(w.winding)),
        witness(std::move(w)) {}
};

struct ModulusCollapse : Error {
  double eps;
  std::size_t cell;
  ModulusCollapse(double eps_, std::size_t cell_)
      : Error("mollified modulus <= 1/2 at eps = " + std::to_string(eps_) + ", cell " +
              std::to_string(cell_)),
        eps(eps_),
        cell(cell_) {}
};

// The unique theta with e^{i theta} = z and theta in (prev - pi, prev + pi];
// a tie at distance exactly pi resolves upward.
inline double nearest_phase(complexd z, double prev) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double d = std::arg(z) - prev;
  d -= two_pi * std::floor(d / two_pi);  // [0, 2 pi)
  if (d > std::numbers::pi) d -= two_pi; // (-pi, pi], tie stays at +pi
  return prev + d;
}

inline CircleMap to_circle(const GridFunction& phase) {
  GridFunction u = GridFunction::zeros(phase.grid);
  for (std::size_t i = 0; i < u.values.size(); ++i)
    u.values[i] = std::polar(1.0, phase.values[i].real());
  return CircleMap(std::move(u));
}

// Degree of u along the coordinate-a loop through cell 0 (torus only):
// (1/2 pi) sum of principal-value increments, an exact integer.
inline std::array<int, 3> axis_windings(const CircleMap& u) {
  const DyadicGrid& g = u.grid();
  if (g.domain != Domain::Torus) throw DomainMismatch("axis windings need a torus grid");
  const int N = g.cells_per_axis();
  std::array<int, 3> w{0, 0, 0};
  for (int axis = 0; axis < g.dim; ++axis) {
    double acc = 0.0;
    std::array<int, 3> c{0, 0, 0};
    for (int k = 0; k < N; ++k) {
      c[axis] = k;
      auto cn = c;
      g.shift(cn, axis, 1);
      acc += detail::principal_increment(u.values()[g.flat(c)], u.values()[g.flat(cn)],
                                         g.flat(c), axis);
    }
    const double turns = acc / (2.0 * std::numbers::pi);
    const int t = static_cast<int>(std::lround(turns));
    if (std::abs(turns - t) > 1e-9)
      throw InternalError("axis loop sum is not a multiple of 2 pi");
    w[axis] = t;
  }
  return w;
}

namespace detail {

struct DyadicLiftTrace {
  std::vector<std::vector<complexd>> U;   // per level, normalized averages
  std::vector<std::vector<double>> phi;   // per level, phases
};

inline DyadicLiftTrace dyadic_lift_trace(const CircleMap& u) {
  const DyadicGrid& g = u.grid();
  const int J = g.level;
  const int n = g.dim;
  auto pyramid = mean_pyramid(u.field);

  DyadicLiftTrace tr;
  tr.U.resize(static_cast<std::size_t>(J) + 1);
  tr.phi.resize(static_cast<std::size_t>(J) + 1);
  for (int j = 0; j <= J; ++j) {
    auto& Uj = tr.U[j];
    Uj = std::move(pyramid[j]);
    for (auto& z : Uj) {
      const double m = std::abs(z);
      z = (m == 0.0) ? complexd{1.0, 0.0} : z / m;
    }
  }
  tr.phi[0].resize(tr.U[0].size());
  for (std::size_t m = 0; m < tr.U[0].size(); ++m)
    tr.phi[0][m] = std::arg(tr.U[0][m]);  // principal branch (-pi, pi]
  for (int j = 1; j <= J; ++j) {
    const auto& prev = tr.phi[j - 1];
    auto& cur = tr.phi[j];
    cur.resize(tr.U[j].size());
    for (std::size_t m = 0; m < cur.size(); ++m) {
      // parent at level j-1: drop the low bit of each coordinate
      std::size_t pidx = 0;
      std::size_t tmp = m;
      std::array<int, 3> c{0, 0, 0};
      for (int k = n - 1; k >= 0; --k) {
        c[k] = static_cast<int>(tmp & ((std::size_t{1} << j) - 1));
        tmp >>= j;
      }
      for (int k = 0; k < n; ++k)
        pidx = (pidx << (j - 1)) | (static_cast<std::size_t>(c[k]) >> 1);
      cur[m] = nearest_phase(tr.U[j][m], prev[pidx]);
    }
  }
  return tr;
}

inline double max_residual(const GridFunction& phase, const CircleMap& u) {
  double r = 0.0;
  for (std::size_t i = 0; i < u.values().size(); ++i)
    r = std::max(r, std::abs(std::polar(1.0, phase.values[i].real()) *
                                 std::conj(u.values()[i]) -
                             complexd{1.0, 0.0}));
  return r;
}

}  // namespace detail

inline LiftResult lift_dyadic(const CircleMap& u, const BesovParams& bp) {
  const DyadicGrid& g = u.grid();
  const int J = g.level;
  const auto tr = detail::dyadic_lift_trace(u);

  LiftResult res;
  res.phase = GridFunction::zeros(g);
  for (std::size_t i = 0; i < res.phase.values.size(); ++i)
    res.phase.values[i] = tr.phi[J][i];

  res.level_increments.assign(static_cast<std::size_t>(J) + 1, 0.0);
  for (int j = 1; j <= J; ++j) {
    const int n = g.dim;
    double worst = 0.0;
    for (std::size_t m = 0; m < tr.phi[j].size(); ++m) {
      std::size_t pidx = 0;
      std::size_t tmp = m;
      std::array<int, 3> c{0, 0, 0};
      for (int k = n - 1; k >= 0; --k) {
        c[k] = static_cast<int>(tmp & ((std::size_t{1} << j) - 1));
        tmp >>= j;
      }
      for (int k = 0; k < n; ++k)
        pidx = (pidx << (j - 1)) | (static_cast<std::size_t>(c[k]) >> 1);
      worst = std::max(worst, std::abs(tr.phi[j][m] - tr.phi[j - 1][pidx]));
    }
    res.level_increments[j] = worst;
  }

  res.residual = detail::max_residual(res.phase, u);
  if (g.domain == Domain::Torus) res.axis_windings = axis_windings(u);
  const double denom = haar_average_norm(u.field, bp).total;
  if (denom > 0.0)
    res.norm_ratio = haar_average_norm(res.phase, bp).total / denom;
  return res;
}

inline std::vector<double> default_mollifier_ladder(int level) {
  std::vector<double> eps;
  for (int m = 2; m <= level - 1; ++m) eps.push_back(std::exp2(-m));
  if (eps.empty()) eps.push_back(0.25);
  return eps;
}

inline LiftResult lift_mollifier(const CircleMap& u, const BesovParams& bp,
                                 std::vector<double> eps_ladder = {}) {
  const DyadicGrid& g = u.grid();
  if (g.domain != Domain::Torus) throw DomainMismatch("mollifier lifting needs a torus grid");
  if (eps_ladder.empty()) eps_ladder = default_mollifier_ladder(g.level);
  for (std::size_t i = 0; i < eps_ladder.size(); ++i) {
    if (!(eps_ladder[i] >= g.mesh() && eps_ladder[i] <= 0.25))
      throw EpsOutOfRange("ladder eps must lie in [2^-J, 1/4]");
    if (i > 0 && !(eps_ladder[i] < eps_ladder[i - 1]))
      throw EpsOutOfRange("ladder must be strictly decreasing");
  }

  // De-periodize: remove the exact linear phase 2 pi w.x so the remainder has
  // zero degree along every axis.
  const auto w = axis_windings(u);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  GridFunction rem = GridFunction::zeros(g);
  std::vector<double> linear(g.cell_count());
  for (std::size_t i = 0; i < rem.values.size(); ++i) {
    const auto x = g.cell_center(i);
    double lin = 0.0;
    for (int k = 0; k < g.dim; ++k) lin += w[k] * x[k];
    linear[i] = two_pi * lin;
    rem.values[i] = u.values()[i] * std::polar(1.0, -linear[i]);
  }
  const CircleMap remainder{std::move(rem)};

  // Mollify down the ladder and find the coarsest eps from which |F| > 1/2
  // holds at every cell for all smaller ladder values.
  const std::size_t steps = eps_ladder.size();
  std::vector<GridFunction> F;
  F.reserve(steps);
  std::vector<double> min_mod(steps);
  std::vector<std::size_t> argmin(steps, 0);
  for (std::size_t i = 0; i < steps; ++i) {
    F.push_back(mollify(remainder.field, eps_ladder[i]));
    double mn = 2.0;
    for (std::size_t c = 0; c < F[i].values.size(); ++c) {
      const double m = std::abs(F[i].values[c]);
      if (m < mn) {
        mn = m;
        argmin[i] = c;
      }
    }
    min_mod[i] = mn;
  }
  if (min_mod[steps - 1] <= 0.5)
    throw ModulusCollapse(eps_ladder[steps - 1], argmin[steps - 1]);
  std::size_t start = steps - 1;
  while (start > 0 && min_mod[start - 1] > 0.5) --start;

  // Seed at the coarsest valid eps, then track the phase down the ladder and
  // finally snap to the unmollified remainder.
  auto normalized = [](const GridFunction& f) {
    GridFunction out = GridFunction::zeros(f.grid);
    for (std::size_t i = 0; i < f.values.size(); ++i)
      out.values[i] = f.values[i] / std::abs(f.values[i]);
    return CircleMap(std::move(out));
  };
  LiftResult res;
  res.phase = lift_dyadic(normalized(F[start]), bp).phase;
  res.level_increments.clear();
  for (std::size_t i = start + 1; i < steps; ++i) {
    double worst = 0.0;
    for (std::size_t c = 0; c < res.phase.values.size(); ++c) {
      const double prev = res.phase.values[c].real();
      const double cur = nearest_phase(F[i].values[c] / std::abs(F[i].values[c]), prev);
      worst = std::max(worst, std::abs(cur - prev));
      res.phase.values[c] = cur;
    }
    res.level_increments.push_back(worst);
  }
  {
    double worst = 0.0;
    for (std::size_t c = 0; c < res.phase.values.size(); ++c) {
      const double prev = res.phase.values[c].real();
      const double cur = nearest_phase(remainder.values()[c], prev);
      worst = std::max(worst, std::abs(cur - prev));
      res.phase.values[c] = cur + linear[c];
    }
    res.level_increments.push_back(worst);
  }

  res.axis_windings = w;
  res.min_modulus.assign(min_mod.begin() + static_cast<std::ptrdiff_t>(start), min_mod.end());
  res.residual = detail::max_residual(res.phase, u);
  const double denom = haar_average_norm(u.field, bp).total;
  if (denom > 0.0)
    res.norm_ratio = haar_average_norm(res.phase, bp).total / denom;
  return res;
}

// Breadth-first phase propagation from cell 0; every non-tree edge must close
// a loop of zero winding, otherwise the witness loop is reported.
inline LiftResult lift_continuous(const CircleMap& u) {
  const DyadicGrid& g = u.grid();
  const std::size_t N = g.cell_count();
  constexpr double two_pi = 2.0 * std::numbers::pi;

  std::vector<double> phi(N, 0.0);
  std::vector<std::size_t> parent(N, SIZE_MAX);
  std::vector<char> seen(N, 0);
  std::vector<std::size_t> queue;
  queue.reserve(N);
  queue.push_back(0);
  seen[0] = 1;
  parent[0] = 0;
  phi[0] = std::arg(u.values()[0]);
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const std::size_t cur = queue[qi];
    const auto c = g.coords(cur);
    for (int axis = 0; axis < g.dim; ++axis) {
      for (int step = -1; step <= 1; step += 2) {
        auto cn = c;
        if (!g.shift(cn, axis, step)) continue;
        const std::size_t nb = g.flat(cn);
        if (seen[nb]) continue;
        seen[nb] = 1;
        parent[nb] = cur;
        phi[nb] = phi[cur] + detail::principal_increment(u.values()[cur], u.values()[nb],
                                                         cur, axis);
        queue.push_back(nb);
      }
    }
  }

  // Consistency scan over every edge (deterministic order).
  for (std::size_t a = 0; a < N; ++a) {
    const auto c = g.coords(a);
    for (int axis = 0; axis < g.dim; ++axis) {
      auto cn = c;
      if (!g.shift(cn, axis, 1)) continue;
      const std::size_t b = g.flat(cn);
      const double inc = detail::principal_increment(u.values()[a], u.values()[b], a, axis);
      if (parent[b] == a || parent[a] == b) continue;  // tree edge, consistent by construction
      const double gap = phi[b] - phi[a] - inc;
      const double turns = gap / two_pi;
      const long k = std::lround(turns);
      if (std::abs(turns - k) > 1e-9)
        throw InternalError("non-tree edge gap is not a multiple of 2 pi");
      if (k != 0) {
        // Witness: tree path b -> a plus the direct edge a -> b.
        auto path_to_root = [&](std::size_t v) {
          std::vector<std::size_t> p{v};
          while (parent[v] != v) {
            v = parent[v];
            p.push_back(v);
          }
          return p;
        };
        auto pa = path_to_root(a), pb = path_to_root(b);
        while (pa.size() > 1 && pb.size() > 1 && pa[pa.size() - 2] == pb[pb.size() - 2]) {
          pa.pop_back();
          pb.pop_back();
        }
        ObstructionWitness wit;
        wit.loop.assign(pb.begin(), pb.end());                  // b ... lca
        wit.loop.insert(wit.loop.end(), pa.rbegin() + 1, pa.rend());  // ... a
        wit.loop.push_back(b);                                  // close with edge a->b... b
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < wit.loop.size(); ++i)
          acc += detail::principal_increment(u.values()[wit.loop[i]],
                                             u.values()[wit.loop[i + 1]], wit.loop[i], -1);
        const double wturns = acc / two_pi;
        wit.winding = static_cast<int>(std::lround(wturns));
        if (std::abs(wturns - wit.winding) > 1e-9 || wit.winding == 0)
          throw InternalError("witness loop winding is not a nonzero integer");
        if (wit.winding < 0) {  // report the positively oriented loop
          std::reverse(wit.loop.begin(), wit.loop.end());
          wit.winding = -wit.winding;
        }
        throw ObstructionDetected(std::move(wit));
      }
    }
  }

  LiftResult res;
  res.phase = GridFunction::zeros(g);
  for (std::size_t i = 0; i < N; ++i) res.phase.values[i] = phi[i];
  res.residual = detail::max_residual(res.phase, u);
  if (g.domain == Domain::Torus) res.axis_windings = axis_windings(u);
  return res;
}

}  // namespace beslift
