#pragma once

// Tensor Haar analysis on a dyadic grid. The mother/father pair is
//   psi_M = +1 on [0,1/2), -1 on [1/2,1],   psi_F = |psi_M|,
// and the level-j basis functions are 2^(nj/2) prod_r psi_{G_r}(2^j x_r - m_r)
// with label G in {F,M}^n (all-F only at j = 0) and position m in [0,2^j)^n.
// Because grid samples are cell averages, every basis integral is an exact
// finite sum: analysis at levels j <= J-1 followed by synthesis reproduces
// the samples exactly.

#include <cmath>
#include <vector>

#include "beslift/grid.hpp"

namespace beslift {

struct BesovParams {
  double s = 0.5;
  double p = 2.0;
  double q = 2.0;  // ignored when q_inf is set
  bool q_inf = false;
  int dim = 1;

  static BesovParams make(double s, double p, double q, int dim) {
    BesovParams b{s, p, q, false, dim};
    b.validate();
    return b;
  }
  static BesovParams make_qinf(double s, double p, int dim) {
    BesovParams b{s, p, 0.0, true, dim};
    b.validate();
    return b;
  }

  void validate() const {
    if (!(s > 0)) throw InvalidArgument("smoothness s must be positive");
    if (!(p >= 1)) throw InvalidArgument("integrability p must be >= 1");
    if (!q_inf && !(q >= 1)) throw InvalidArgument("summability q must be >= 1 or infinite");
  }

  bool in_haar_range() const { return s * p < 1.0; }
};

// Coefficient family mu^{j,G}_m = 2^{j(s - n/p + n/2)} int f Psi^{j,G}_m.
// Labels are bitmasks over axes (bit r set = M on axis r); mask 0 (all-F) is
// present only at level 0. Positions are flat lexicographic indices at level j.
struct HaarCoefficients {
  DyadicGrid source_grid;
  BesovParams params;
  int level_max = 0;  // finest analysed level, = grid level - 1

  // data[j][slot][m]; slot = mask at j = 0, mask - 1 at j >= 1
  std::vector<std::vector<std::vector<complexd>>> data;

  int labels_at(int j) const {
    const int full = 1 << source_grid.dim;
    return j == 0 ? full : full - 1;
  }
  int mask_of_slot(int j, int slot) const { return j == 0 ? slot : slot + 1; }

  complexd& at(int j, int mask, std::size_t m) {
    return data[j][j == 0 ? mask : mask - 1][m];
  }
  complexd at(int j, int mask, std::size_t m) const {
    return data[j][j == 0 ? mask : mask - 1][m];
  }
};

namespace detail {

inline double haar_weight(const BesovParams& bp, int n, int j) {
  return std::exp2(j * (bp.s - n / bp.p + n / 2.0));
}

// sign of Psi^G on child eps (one step finer): psi_F is +1 on both halves,
// psi_M is +1 on the first half and -1 on the second.
inline int haar_sign(int mask, int eps, int n) {
  int s = 1;
  for (int r = 0; r < n; ++r)
    if ((mask >> r & 1) && (eps >> r & 1)) s = -s;
  return s;
}

}  // namespace detail

inline HaarCoefficients haar_coeff_decompose(const GridFunction& f, const BesovParams& bp) {
  const DyadicGrid& g = f.grid;
  const int n = g.dim;
  const int J = g.level;
  if (J < 1) throw LevelOutOfRange("Haar analysis needs grid level >= 1");

  const auto pyramid = detail::mean_pyramid(f);
  HaarCoefficients hc{g, bp, J - 1, {}};
  hc.data.resize(static_cast<std::size_t>(J));
  const int children = 1 << n;

  for (int j = 0; j <= J - 1; ++j) {
    const auto& fine = pyramid[j + 1];
    const std::size_t cells = std::size_t{1} << (static_cast<std::size_t>(n) * j);
    hc.data[j].assign(static_cast<std::size_t>(hc.labels_at(j)),
                      std::vector<complexd>(cells));
    // int over child cell = child mean * 2^(-n(j+1)); Psi value there is
    // 2^(nj/2) * sign
    const double scale = std::exp2(n * j / 2.0) * std::exp2(-n * (j + 1.0));
    const double weight = detail::haar_weight(bp, n, j);
    for (std::size_t m = 0; m < cells; ++m) {
      const auto mc = DyadicGrid{n, j, g.domain}.coords(m);
      std::array<complexd, 8> child{};
      for (int eps = 0; eps < children; ++eps) {
        std::size_t cidx = 0;
        for (int k = 0; k < n; ++k)
          cidx = (cidx << (j + 1)) |
                 static_cast<std::size_t>((mc[k] << 1) | (eps >> k & 1));
        child[eps] = fine[cidx];
      }
      for (int slot = 0; slot < hc.labels_at(j); ++slot) {
        const int mask = hc.mask_of_slot(j, slot);
        complexd acc = 0;
        for (int eps = 0; eps < children; ++eps)
          acc += static_cast<double>(detail::haar_sign(mask, eps, n)) * child[eps];
        hc.data[j][slot][m] = weight * scale * acc;
      }
    }
  }
  return hc;
}

// Inverse of the analysis: rebuilds the cell averages from the coefficient
// family (exact up to rounding).
inline GridFunction haar_synthesize(const HaarCoefficients& hc) {
  const DyadicGrid& g = hc.source_grid;
  const int n = g.dim;
  const int J = g.level;
  const int children = 1 << n;

  // level-0 mean is the all-F coefficient (its weight is 2^0 = 1)
  std::vector<complexd> cur{hc.at(0, 0, 0)};
  for (int j = 0; j <= J - 1; ++j) {
    const std::size_t cells = cur.size();
    std::vector<complexd> next(cells << n);
    const double scale = std::exp2(n * j / 2.0);
    const double unweight = 1.0 / detail::haar_weight(hc.params, n, j);
    for (std::size_t m = 0; m < cells; ++m) {
      const auto mc = DyadicGrid{n, j, g.domain}.coords(m);
      for (int eps = 0; eps < children; ++eps) {
        complexd v = cur[m];
        for (int slot = 0; slot < hc.labels_at(j); ++slot) {
          const int mask = hc.mask_of_slot(j, slot);
          if (mask == 0) continue;  // the j = 0 scaling part is already in cur
          v += scale * unweight * hc.data[j][slot][m] *
               static_cast<double>(detail::haar_sign(mask, eps, n));
        }
        std::size_t cidx = 0;
        for (int k = 0; k < n; ++k)
          cidx = (cidx << (j + 1)) |
                 static_cast<std::size_t>((mc[k] << 1) | (eps >> k & 1));
        next[cidx] = v;
      }
    }
    cur = std::move(next);
  }
  return GridFunction{g, std::move(cur)};
}

}  // namespace beslift
