#pragma once

// Discrete Besov seminorm and norm estimators through three routes:
//   Diff      - axis-aligned finite differences against the dh/|h| measure,
//   HaarAvg   - dyadic-average increments 2^(sj) ||E_j f - E_{j-1} f||_p,
//   HaarCoeff - the l^q(l^p) size of the weighted Haar coefficient family,
// plus a VMO modulus and a Poincare ratio diagnostic. The Haar-based routes
// are norm equivalents only when s p < 1; outside that range results are
// still computed and flagged.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "beslift/grid.hpp"
#include "beslift/haar.hpp"

namespace beslift {

enum class NormMethod { Diff, HaarAvg, HaarCoeff };

inline const char* to_string(NormMethod m) {
  switch (m) {
    case NormMethod::Diff: return "diff";
    case NormMethod::HaarAvg: return "haar-avg";
    case NormMethod::HaarCoeff: return "haar-coeff";
  }
  return "?";
}

struct NormReport {
  BesovParams params;
  NormMethod method = NormMethod::Diff;
  std::vector<std::pair<int, double>> levels;  // (j, level term)
  double total = 0.0;
  bool in_validity_range = true;

  // l^q aggregation of the level terms (sup when q = inf)
  static double aggregate(const std::vector<std::pair<int, double>>& terms,
                          const BesovParams& bp) {
    if (bp.q_inf) {
      double m = 0.0;
      for (const auto& [j, t] : terms) m = std::max(m, t);
      return m;
    }
    double acc = 0.0;
    for (const auto& [j, t] : terms) acc += std::pow(t, bp.q);
    return std::pow(acc, 1.0 / bp.q);
  }
};

namespace detail {

inline double abs_pow(complexd z, double p) {
  if (p == 2.0) return z.real() * z.real() + z.imag() * z.imag();
  if (p == 1.0) return std::abs(z);
  return std::pow(std::abs(z), p);
}

inline double lp_norm(const std::vector<complexd>& v, double p, int dim, int level) {
  double acc = 0.0;
  for (const auto& z : v) acc += abs_pow(z, p);
  return std::pow(acc * std::exp2(-static_cast<double>(dim) * level), 1.0 / p);
}

// ||Delta^M_{k e_axis} f||_p with the cube zero-outside rule.
inline double diff_axis_lp(const GridFunction& f, int order, int axis, int k, double p) {
  const DyadicGrid& g = f.grid;
  const int n = g.dim;
  const int J = g.level;
  const int N = 1 << J;
  const int shift_bits = (n - 1 - axis) * J;
  const std::size_t stride = std::size_t{1} << shift_bits;
  const std::size_t mask = static_cast<std::size_t>(N - 1);

  std::array<double, 9> coeff{};
  for (int l = 0; l <= order; ++l)
    coeff[l] = ((order - l) % 2 == 0 ? 1.0 : -1.0) * binomial(order, l);

  double acc = 0.0;
  const bool torus = g.domain == Domain::Torus;
  for (std::size_t idx = 0; idx < f.values.size(); ++idx) {
    const int xa = static_cast<int>((idx >> shift_bits) & mask);
    complexd d = 0;
    bool inside = true;
    for (int l = 0; l <= order; ++l) {
      int v = xa + l * k;
      if (torus) {
        v %= N;
        if (v < 0) v += N;
      } else if (v < 0 || v >= N) {
        inside = false;
        break;
      }
      d += coeff[l] * f.values[idx + (static_cast<std::size_t>(v) - xa) * stride];
    }
    if (inside) acc += abs_pow(d, p);
  }
  return std::pow(acc * std::exp2(-static_cast<double>(n) * J), 1.0 / p);
}

}  // namespace detail

// Discretization of sum_axes (int_{|h|<=delta} |h|^{-sq} ||Delta^M_{h e_a} f||_p^q
// dh/|h|)^(1/q): offsets h = +-k 2^-J for 1 <= k <= delta 2^J, the dh/|h|
// measure enters as the weight 1/k, and offsets are grouped into dyadic bands
// (level j collects |h| in (2^-(j+1), 2^-j]).
inline NormReport diff_seminorm(const GridFunction& f, const BesovParams& bp, int order,
                                double delta) {
  bp.validate();
  if (order <= bp.s) throw MTooSmall("difference order must exceed s");
  if (order > 8) throw InvalidArgument("difference order must be <= 8");
  const int J = f.grid.level;
  if (!(delta > 0.0 && delta <= 1.0) || delta < f.grid.mesh())
    throw DeltaOutOfRange("delta must lie in [2^-J, 1]");

  const int K = static_cast<int>(std::floor(delta * std::exp2(J) + 1e-9));
  std::vector<double> band(static_cast<std::size_t>(J) + 1, 0.0);
  const double h0 = f.grid.mesh();
  for (int axis = 0; axis < f.grid.dim; ++axis) {
    for (int k = 1; k <= K; ++k) {
      int j = J;
      while ((1 << (J - j)) < k) --j;  // dyadic band: 2^(J-j-1) < k <= 2^(J-j)
      const double h = k * h0;
      for (int sign = -1; sign <= 1; sign += 2) {
        const double w = detail::diff_axis_lp(f, order, axis, sign * k, bp.p);
        if (bp.q_inf)
          band[j] = std::max(band[j], std::pow(h, -bp.s) * w);
        else
          band[j] += std::pow(h, -bp.s * bp.q) * std::pow(w, bp.q) / k;
      }
    }
  }

  int j_low = J;
  while ((1 << (J - j_low)) < K) --j_low;  // band holding the largest offset
  NormReport rep;
  rep.params = bp;
  rep.method = NormMethod::Diff;
  for (int j = j_low; j <= J; ++j) {
    const double t = bp.q_inf ? band[j] : std::pow(band[j], 1.0 / bp.q);
    rep.levels.emplace_back(j, t);
  }
  rep.total = NormReport::aggregate(rep.levels, bp);
  return rep;
}

// (sum_{j=0}^{J} 2^(sjq) ||E_j f - E_{j-1} f||_p^q)^(1/q) with E_{-1} := 0;
// exact cell sums. Equivalent to the Besov norm only when s p < 1 (flagged).
inline NormReport haar_average_norm(const GridFunction& f, const BesovParams& bp) {
  bp.validate();
  const int J = f.grid.level;
  const int n = f.grid.dim;
  const auto pyramid = detail::mean_pyramid(f);

  NormReport rep;
  rep.params = bp;
  rep.method = NormMethod::HaarAvg;
  rep.in_validity_range = bp.in_haar_range();
  for (int j = 0; j <= J; ++j) {
    double acc = 0.0;
    if (j == 0) {
      acc = detail::abs_pow(pyramid[0][0], bp.p);
    } else {
      const auto& ej = pyramid[j];
      const auto& ejm = pyramid[j - 1];
      for (std::size_t m = 0; m < ej.size(); ++m) {
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
        acc += detail::abs_pow(ej[m] - ejm[pidx], bp.p);
      }
      acc *= std::exp2(-static_cast<double>(n) * j);
    }
    rep.levels.emplace_back(j, std::exp2(bp.s * j) * std::pow(acc, 1.0 / bp.p));
  }
  rep.total = NormReport::aggregate(rep.levels, bp);
  return rep;
}

// Triple aggregation (sum_j sum_G (sum_m |mu|^p)^(q/p))^(1/q), sup replacing
// the sum over j,G when q = inf.
inline NormReport haar_coeff_norm(const HaarCoefficients& hc, const BesovParams& bp) {
  bp.validate();
  NormReport rep;
  rep.params = bp;
  rep.method = NormMethod::HaarCoeff;
  rep.in_validity_range = bp.in_haar_range();
  for (int j = 0; j <= hc.level_max; ++j) {
    double term;
    if (bp.q_inf) {
      term = 0.0;
      for (const auto& slot : hc.data[j]) {
        double sp = 0.0;
        for (const auto& mu : slot) sp += detail::abs_pow(mu, bp.p);
        term = std::max(term, std::pow(sp, 1.0 / bp.p));
      }
    } else {
      double acc = 0.0;
      for (const auto& slot : hc.data[j]) {
        double sp = 0.0;
        for (const auto& mu : slot) sp += detail::abs_pow(mu, bp.p);
        acc += std::pow(sp, bp.q / bp.p);
      }
      term = std::pow(acc, 1.0 / bp.q);
    }
    rep.levels.emplace_back(j, term);
  }
  rep.total = NormReport::aggregate(rep.levels, bp);
  return rep;
}

// Max over all dyadic cubes of side <= eps of the mean oscillation
// (1/|Q|) int_Q |f - mean_Q f|.
inline double vmo_modulus(const GridFunction& f, double eps) {
  const int J = f.grid.level;
  const int n = f.grid.dim;
  if (eps < f.grid.mesh()) throw EpsOutOfRange("eps must be >= the mesh");
  int jmin = 0;
  while (jmin < J && std::exp2(-jmin) > eps + 1e-15) ++jmin;

  const auto pyramid = detail::mean_pyramid(f);
  double worst = 0.0;
  for (int j = jmin; j <= J; ++j) {
    const auto& means = pyramid[j];
    std::vector<double> mad(means.size(), 0.0);
    for (std::size_t idx = 0; idx < f.values.size(); ++idx) {
      std::size_t pidx = 0;
      std::size_t tmp = idx;
      std::array<int, 3> c{0, 0, 0};
      for (int k = n - 1; k >= 0; --k) {
        c[k] = static_cast<int>(tmp & ((std::size_t{1} << J) - 1));
        tmp >>= J;
      }
      for (int k = 0; k < n; ++k)
        pidx = (pidx << j) | (static_cast<std::size_t>(c[k]) >> (J - j));
      mad[pidx] += std::abs(f.values[idx] - means[pidx]);
    }
    const double cells_per_cube = std::exp2(static_cast<double>(n) * (J - j));
    for (const double m : mad) worst = std::max(worst, m / cells_per_cube);
  }
  return worst;
}

// ||f - mean f||_p divided by the finite-difference seminorm total.
inline double poincare_ratio(const GridFunction& f, const BesovParams& bp, int order,
                             double delta) {
  const auto sem = diff_seminorm(f, bp, order, delta);
  if (sem.total == 0.0)
    throw DivisionByZeroSeminorm("seminorm vanishes (constant input)");
  const complexd mu = f.mean();
  double acc = 0.0;
  for (const auto& v : f.values) acc += detail::abs_pow(v - mu, bp.p);
  const double num =
      std::pow(acc * std::exp2(-static_cast<double>(f.grid.dim) * f.grid.level), 1.0 / bp.p);
  return num / sem.total;
}

}  // namespace beslift
