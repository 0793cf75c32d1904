#pragma once

// Explicit constructions: the vortex obstruction map, a greedy dyadic
// interval covering, diagonal Haar-block functions whose 2-d norm is finite
// while almost every 1-d row restriction diverges (and a bounded contrast
// variant), integer step functions, and the parity inequality
// |Delta^2_h g| >= |Delta_{2h} gbar| for integer-valued g.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "beslift/besov.hpp"
#include "beslift/grid.hpp"

namespace beslift {

// --------------------------------------------------------------------------
// vortex

inline std::array<double, 2> default_vortex_center(const DyadicGrid& grid) {
  const double off = std::exp2(-grid.level - 2);
  return {0.5 + off, 0.5 + off};
}

// Point samples of (x - center)/|x - center| at cell centers. Point sampling,
// not cell averaging: the integrand is singular at the center. The center
// must keep a distance >= 2^-(J+2) to every grid node in each coordinate so
// the singularity cannot land on a sample.
inline CircleMap vortex(const DyadicGrid& grid, std::array<double, 2> center) {
  if (grid.dim != 2) throw DimensionUnsupported("vortex fields are 2-d");
  const double h = grid.mesh();
  const bool inside = center[0] > 0.0 && center[0] < 1.0 && center[1] > 0.0 && center[1] < 1.0;
  if (inside) {
    for (int k = 0; k < 2; ++k) {
      const double frac = center[k] / h;
      const double d = std::abs(frac - std::round(frac)) * h;
      if (d < 0.25 * h * (1.0 - 1e-12))
        throw CenterOnNode("center coordinate " + std::to_string(k) +
                           " is closer than 2^-(J+2) to a grid node");
    }
  }
  GridFunction u = GridFunction::zeros(grid);
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    const auto x = grid.cell_center(i);
    const complexd d{x[0] - center[0], x[1] - center[1]};
    u.values[i] = d / std::abs(d);
  }
  return CircleMap(std::move(u));
}

inline CircleMap vortex(const DyadicGrid& grid) {
  return vortex(grid, default_vortex_center(grid));
}

// --------------------------------------------------------------------------
// greedy dyadic interval covering

struct DyadicInterval {
  int j = 0;
  long long s = 0, t = 0;  // [s/2^j, t/2^j]; t may exceed 2^j before a restart
  bool degenerate = false; // even a single cell exceeded the budget

  double lo() const { return static_cast<double>(s) * std::exp2(-j); }
  double hi() const { return static_cast<double>(t) * std::exp2(-j); }
  double length() const { return static_cast<double>(t - s) * std::exp2(-j); }
  long long count() const { return t - s + 1; }  // integer positions s..t
};

// Greedy covering: L_{j0} is the largest [0, t/2^{j0}] of length <= v u;
// afterwards each interval either continues from the previous right endpoint
// (refined one level) or restarts at 0 once the endpoint has passed 1.
inline std::vector<DyadicInterval> tempseq(const std::vector<double>& u_seq,
                                           const std::vector<double>& v_seq, int j0,
                                           int j_last) {
  if (j_last < j0) throw InvalidArgument("last level must be >= first level");
  if (u_seq.size() < static_cast<std::size_t>(j_last - j0 + 1) ||
      v_seq.size() < static_cast<std::size_t>(j_last - j0 + 1))
    throw InvalidArgument("need one budget factor per level");
  std::vector<DyadicInterval> out;
  long long prev_t = 0;
  bool prev_full = true;  // first interval starts at 0
  for (int j = j0; j <= j_last; ++j) {
    const double u = u_seq[static_cast<std::size_t>(j - j0)];
    const double v = v_seq[static_cast<std::size_t>(j - j0)];
    if (!(u > 0.0) || !(v > 0.0)) throw InvalidArgument("budgets must be positive");
    DyadicInterval L;
    L.j = j;
    L.s = prev_full ? 0 : 2 * prev_t;
    const double budget = v * u;
    const long long len = static_cast<long long>(std::floor(budget * std::exp2(j)));
    L.t = L.s + std::max<long long>(len, 0);
    L.degenerate = (len <= 0);
    out.push_back(L);
    prev_t = L.t;
    prev_full = L.t >= (1ll << j);
  }
  return out;
}

// --------------------------------------------------------------------------
// non-restriction construction

// A sum of diagonal Haar blocks: at each level j in [j0, J] the block row
// indices come from a greedy covering interval I_j = [s_j, t_j] and the
// coefficient weight is mu_j = (#I_j j^(1/t) ln j)^(-1/p) with t = q/p, so
// the 2-d coefficient series sum_j (#I_j mu_j^p)^(q/p) = sum_j 1/(j ln^t j)
// converges while the per-row coefficient size 2^(j/p) mu_j sweeps every row
// with slowly growing records. The bounded contrast variant uses full-width
// blocks with summable weights instead.
struct NonrestrictionSpec {
  BesovParams params;
  int j0 = 4;
  int level_last = 10;     // last construction level
  bool divergent = true;   // false: bounded contrast instance
  std::vector<DyadicInterval> intervals;
  std::vector<double> mu;

  int wavelet_level(int j) const { return j + 1; }  // in-square placement halves scales
  int min_grid_level() const { return level_last + 2; }

  double series_term(int j) const {
    const std::size_t i = static_cast<std::size_t>(j - j0);
    const double ip = static_cast<double>(intervals[i].count()) * std::pow(mu[i], params.p);
    return params.q_inf ? ip : std::pow(ip, params.q / params.p);
  }
};

inline NonrestrictionSpec make_nonrestriction_spec(const BesovParams& params, int j0,
                                                   int level_last) {
  params.validate();
  if (params.q_inf || !(params.p < params.q))
    throw SpecInvalid("divergent instances need p < q < inf");
  if (!(params.s * params.p < 1.0)) throw SpecInvalid("divergent instances need s p < 1");
  if (j0 < 3) throw SpecInvalid("first level must be >= 3");
  if (level_last < j0) throw SpecInvalid("last level must be >= first level");

  NonrestrictionSpec spec{params, j0, level_last, true, {}, {}};
  const double t = params.q / params.p;
  std::vector<double> u_seq, v_seq;
  for (int j = j0; j <= level_last; ++j) {
    u_seq.push_back(1.0 / (std::pow(j, 1.0 / t) * std::log(j)));
    v_seq.push_back(1.0 / std::log(std::log(j + 16.0)));
  }
  spec.intervals = tempseq(u_seq, v_seq, j0, level_last);
  for (int j = j0; j <= level_last; ++j) {
    const auto& L = spec.intervals[static_cast<std::size_t>(j - j0)];
    spec.mu.push_back(std::pow(static_cast<double>(L.count()) * std::pow(j, 1.0 / t) *
                                   std::log(j),
                               -1.0 / params.p));
  }
  return spec;
}

inline NonrestrictionSpec make_contrast_spec(const BesovParams& params, int j0,
                                             int level_last) {
  params.validate();
  if (params.q_inf || !(params.q <= params.p))
    throw SpecInvalid("contrast instances need q <= p");
  if (j0 < 3) throw SpecInvalid("first level must be >= 3");
  NonrestrictionSpec spec{params, j0, level_last, false, {}, {}};
  for (int j = j0; j <= level_last; ++j) {
    DyadicInterval L;
    L.j = j;
    L.s = 0;
    L.t = 1ll << j;
    spec.intervals.push_back(L);
    const double lnj = std::log(j);
    spec.mu.push_back(
        std::pow(static_cast<double>(L.count()) * j * lnj * lnj, -1.0 / params.p));
  }
  return spec;
}

namespace detail {

struct HaarBlock {
  int wavelet_level;   // scale 2^-level
  long long x_pos;     // psi_M(2^level x - x_pos)
  long long y_pos;
  double amplitude;
  int phase_label;     // strip index l in {-1, 0, 1}
};

// In-square placement: the construction is shrunk one dyadic level and
// translated by (1/8, (l+2)/16) per phase label l in {-1, 0, 1}, which keeps
// every piece a standard grid-aligned Haar wavelet and the three diagonal
// strips pairwise disjoint. The per-strip amplitude splits mu_j evenly in
// l^p so the coefficient family of the sum carries exactly the per-level
// budget #I_j mu_j^p.
inline std::vector<HaarBlock> nonrestriction_blocks(const NonrestrictionSpec& spec) {
  std::vector<HaarBlock> blocks;
  const double p = spec.params.p;
  const double s = spec.params.s;
  for (int j = spec.j0; j <= spec.level_last; ++j) {
    const std::size_t i = static_cast<std::size_t>(j - spec.j0);
    const auto& L = spec.intervals[i];
    if (L.degenerate) continue;
    const int jp = spec.wavelet_level(j);
    const double amp =
        spec.mu[i] * std::pow(3.0, -1.0 / p) * std::exp2(-jp * (s - 2.0 / p));
    for (int l = -1; l <= 1; ++l) {
      for (long long m = L.s; m <= L.t; ++m) {
        HaarBlock b;
        b.wavelet_level = jp;
        b.x_pos = m + l + (1ll << (jp - 3));
        b.y_pos = m + l + static_cast<long long>(l + 2) * (1ll << (jp - 4));
        b.amplitude = amp;
        b.phase_label = l;
        if (b.x_pos < 0 || b.x_pos + 1 > (1ll << jp) || b.y_pos < 0 ||
            b.y_pos + 1 > (1ll << jp))
          throw SpecInvalid("construction leaves the unit square; lower the budgets");
        blocks.push_back(b);
      }
    }
  }
  return blocks;
}

}  // namespace detail

inline GridFunction nonrestriction(const NonrestrictionSpec& spec, const DyadicGrid& grid) {
  if (grid.dim != 2 || grid.domain != Domain::Cube)
    throw DomainMismatch("non-restriction instances live on a 2-d cube grid");
  if (grid.level < spec.min_grid_level())
    throw LevelOutOfRange("grid level must be >= construction level + 2");

  GridFunction f = GridFunction::zeros(grid);
  const int Jg = grid.level;
  const int N = grid.cells_per_axis();
  for (const auto& b : detail::nonrestriction_blocks(spec)) {
    const int span = 1 << (Jg - b.wavelet_level);  // cells per wavelet support
    const int half = span >> 1;
    const long long x0 = b.x_pos * span;
    const long long y0 = b.y_pos * span;
    for (int dx = 0; dx < span; ++dx) {
      const double vx = (dx < half) ? b.amplitude : -b.amplitude;
      const std::size_t row = static_cast<std::size_t>(x0 + dx) * N;
      for (int dy = 0; dy < span; ++dy) {
        const double v = (dy < half) ? vx : -vx;
        f.values[row + static_cast<std::size_t>(y0 + dy)] += v;
      }
    }
  }
  return f;
}

// The 1-d restriction f(x, .) for the row of cells with x-index `x_cell` at
// grid level `grid_level`, evaluated directly from the block list. Identical
// to slicing the dense field, but usable when the 2-d grid would not fit.
inline GridFunction nonrestriction_row(const NonrestrictionSpec& spec, int grid_level,
                                       int x_cell) {
  if (grid_level < spec.min_grid_level())
    throw LevelOutOfRange("grid level must be >= construction level + 2");
  if (x_cell < 0 || x_cell >= (1 << grid_level))
    throw BadAxisSet("row out of range");
  DyadicGrid g1{1, grid_level, Domain::Cube};
  GridFunction row = GridFunction::zeros(g1);
  for (const auto& b : detail::nonrestriction_blocks(spec)) {
    const int span = 1 << (grid_level - b.wavelet_level);
    const int half = span >> 1;
    const long long x0 = b.x_pos * span;
    if (x_cell < x0 || x_cell >= x0 + span) continue;
    const double vx = (x_cell - x0 < half) ? b.amplitude : -b.amplitude;
    const long long y0 = b.y_pos * span;
    for (int dy = 0; dy < span; ++dy)
      row.values[static_cast<std::size_t>(y0 + dy)] += (dy < half) ? vx : -vx;
  }
  return row;
}

// --------------------------------------------------------------------------
// row scan

struct ScanEntry {
  int row = 0;
  int level = 0;
  double running_sup = 0.0;
};

// For each requested row, the per-level terms 2^(js) ||E_j - E_{j-1}||_p of
// the 1-d restriction and their running sup over j <= J.
inline std::vector<ScanEntry> restriction_scan(const GridFunction& f,
                                               const BesovParams& params,
                                               const std::vector<int>& rows) {
  if (f.grid.dim != 2) throw DimensionUnsupported("row scans need a 2-d field");
  BesovParams p1 = params;
  p1.dim = 1;
  std::vector<ScanEntry> out;
  for (const int r : rows) {
    if (r < 0 || r >= f.grid.cells_per_axis()) throw BadAxisSet("row out of range");
    const auto rep = haar_average_norm(slice(f, {0}, {r}), p1);
    double sup = 0.0;
    for (const auto& [j, term] : rep.levels) {
      sup = std::max(sup, term);
      out.push_back({r, j, sup});
    }
  }
  return out;
}

// Same statistic computed from the block list (rows at `grid_level`).
inline std::vector<ScanEntry> restriction_scan_sparse(const NonrestrictionSpec& spec,
                                                      int grid_level,
                                                      const std::vector<int>& rows) {
  BesovParams p1 = spec.params;
  p1.dim = 1;
  std::vector<ScanEntry> out;
  for (const int r : rows) {
    const auto rep = haar_average_norm(nonrestriction_row(spec, grid_level, r), p1);
    double sup = 0.0;
    for (const auto& [j, term] : rep.levels) {
      sup = std::max(sup, term);
      out.push_back({r, j, sup});
    }
  }
  return out;
}

// --------------------------------------------------------------------------
// integer step functions

inline GridFunction step_function(const DyadicGrid& grid, int desc_level,
                                  const std::vector<long long>& cell_values) {
  if (grid.dim > 2) throw DimensionUnsupported("step functions are 1-d or 2-d");
  if (desc_level < 0 || desc_level > grid.level)
    throw LevelOutOfRange("description level must be in [0, J]");
  const DyadicGrid dg{grid.dim, desc_level, grid.domain};
  if (cell_values.size() != dg.cell_count())
    throw InvalidArgument("need one integer per description cell");
  GridFunction f = GridFunction::zeros(grid);
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const auto c = grid.coords(i);
    std::size_t di = 0;
    for (int k = 0; k < grid.dim; ++k)
      di = (di << desc_level) |
           (static_cast<std::size_t>(c[k]) >> (grid.level - desc_level));
    f.values[i] = static_cast<double>(cell_values[di]);
  }
  return f;
}

struct DominationResult {
  bool pass = true;
  std::optional<std::size_t> witness;  // first violating cell
  double lhs = 0.0, rhs = 0.0;         // values at the witness
};

// Parity inequality for integer-valued g: |Delta^2_h g| >= |Delta_{2h} gbar|
// pointwise, where gbar is the indicator of {g even}. Whenever gbar jumps
// across x -> x+2h, the second difference at x is odd and hence >= 1.
inline DominationResult second_diff_domination_check(const GridFunction& g, int offset) {
  if (g.grid.dim != 1) throw DimensionUnsupported("domination check is 1-d");
  if (offset == 0) throw InvalidArgument("offset must be nonzero");
  GridFunction parity = GridFunction::zeros(g.grid);
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    const double v = g.values[i].real();
    const long long iv = std::llround(v);
    if (std::abs(v - iv) > 1e-9 || std::abs(g.values[i].imag()) > 1e-9)
      throw InvalidArgument("input must be integer-valued");
    parity.values[i] = (iv % 2 == 0) ? 1.0 : 0.0;
  }
  const GridFunction d2 = diff(g, 2, {offset, 0, 0});
  const GridFunction d1 = diff(parity, 1, {2 * offset, 0, 0});
  DominationResult res;
  for (std::size_t i = 0; i < d2.values.size(); ++i) {
    const double lhs = std::abs(d2.values[i]);
    const double rhs = std::abs(d1.values[i]);
    if (lhs < rhs - 1e-9) {
      res.pass = false;
      res.witness = i;
      res.lhs = lhs;
      res.rhs = rhs;
      return res;
    }
  }
  return res;
}

}  // namespace beslift
