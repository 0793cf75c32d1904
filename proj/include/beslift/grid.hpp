#pragma once

// Dyadic grids on the torus T^n and the unit cube (0,1)^n, n <= 3, with
// cell-average sampling, finite-order differences, dyadic averaging,
// mollification and axis slicing. Samples are cell averages, so averaging to
// a coarser dyadic level is exact and the Haar analysis downstream is a
// finite exact transform.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

#include "beslift/errors.hpp"

namespace beslift {

using complexd = std::complex<double>;

enum class Domain : std::uint8_t { Torus = 0, Cube = 1 };

inline constexpr int kMaxLevel = 16;
inline constexpr int kMaxSampleLog2 = 24;  // grids above 2^24 cells are rejected

struct DyadicGrid {
  int dim = 1;
  int level = 0;
  Domain domain = Domain::Torus;

  int cells_per_axis() const { return 1 << level; }
  std::size_t cell_count() const {
    return std::size_t{1} << (static_cast<std::size_t>(dim) * level);
  }
  double mesh() const { return std::ldexp(1.0, -level); }

  // lexicographic, last coordinate fastest
  std::size_t flat(const std::array<int, 3>& c) const {
    std::size_t idx = 0;
    for (int k = 0; k < dim; ++k) idx = (idx << level) | static_cast<std::size_t>(c[k]);
    return idx;
  }

  std::array<int, 3> coords(std::size_t idx) const {
    std::array<int, 3> c{0, 0, 0};
    const std::size_t mask = (std::size_t{1} << level) - 1;
    for (int k = dim - 1; k >= 0; --k) {
      c[k] = static_cast<int>(idx & mask);
      idx >>= level;
    }
    return c;
  }

  std::array<double, 3> cell_center(std::size_t idx) const {
    const auto c = coords(idx);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int k = 0; k < dim; ++k) x[k] = (c[k] + 0.5) * mesh();
    return x;
  }

  // Shift coordinate `axis` by `step` cells. Returns false when the step
  // leaves the cube; wraps on the torus.
  bool shift(std::array<int, 3>& c, int axis, int step) const {
    const int n = cells_per_axis();
    int v = c[axis] + step;
    if (domain == Domain::Torus) {
      v %= n;
      if (v < 0) v += n;
    } else if (v < 0 || v >= n) {
      return false;
    }
    c[axis] = v;
    return true;
  }

  bool operator==(const DyadicGrid&) const = default;
};

inline DyadicGrid make_grid(int dim, int level, Domain domain) {
  if (dim < 1 || dim > 3)
    throw DimensionUnsupported("dimension must be 1, 2 or 3, got " + std::to_string(dim));
  if (level < 0 || level > kMaxLevel)
    throw LevelOutOfRange("level must be in [0, " + std::to_string(kMaxLevel) + "], got " +
                          std::to_string(level));
  if (dim * level > kMaxSampleLog2)
    throw GridTooLarge("2^" + std::to_string(dim * level) + " cells exceed the 2^" +
                       std::to_string(kMaxSampleLog2) + " cap");
  return DyadicGrid{dim, level, domain};
}

struct GridFunction {
  DyadicGrid grid;
  std::vector<complexd> values;

  static GridFunction zeros(const DyadicGrid& g) {
    return GridFunction{g, std::vector<complexd>(g.cell_count())};
  }
  static GridFunction constant(const DyadicGrid& g, complexd c) {
    return GridFunction{g, std::vector<complexd>(g.cell_count(), c)};
  }

  bool is_real(double tol = 0.0) const {
    for (const auto& v : values)
      if (std::abs(v.imag()) > tol) return false;
    return true;
  }

  complexd mean() const {
    complexd s = 0;
    for (const auto& v : values) s += v;
    return s / static_cast<double>(values.size());
  }

  void validate() const {
    if (values.size() != grid.cell_count())
      throw InvalidArgument("grid function has " + std::to_string(values.size()) +
                            " values, expected " + std::to_string(grid.cell_count()));
    for (const auto& v : values)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw NonFiniteSample("grid function contains a non-finite value");
  }
};

// Circle-valued samples: |value| == 1 up to 1e-12 at every cell.
struct CircleMap {
  GridFunction field;

  explicit CircleMap(GridFunction f) : field(std::move(f)) {
    for (std::size_t i = 0; i < field.values.size(); ++i)
      if (std::abs(std::abs(field.values[i]) - 1.0) > 1e-12)
        throw NotUnimodular("sample at cell " + std::to_string(i) +
                            " is not on the unit circle");
  }

  const DyadicGrid& grid() const { return field.grid; }
  const std::vector<complexd>& values() const { return field.values; }
};

namespace detail {

// Principal-value phase increment Arg(to * conj(from)) in (-pi, pi]; throws
// when the pair is within 1e-6 of antipodal.
inline double principal_increment(complexd from, complexd to, std::size_t cell, int axis) {
  const double a = std::arg(to * std::conj(from));
  if (std::abs(a) >= std::numbers::pi - 1e-6) throw DegenerateEdge(cell, axis);
  return a;
}

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Gauss-Legendre nodes/weights on [0,1].
inline void gauss_legendre_01(int order, std::vector<double>& nodes,
                              std::vector<double>& weights) {
  nodes.assign(order, 0.0);
  weights.assign(order, 0.0);
  for (int i = 0; i < order; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      if (order == 1) p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = (order == 1) ? x : p1;
      const double pm = (order == 1) ? 1.0 : p0;
      dp = order * (x * pn - pm) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = 0.5 * (x + 1.0);
    weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

}  // namespace detail

// Cell averages of a pointwise closure, approximated by tensor Gauss-Legendre
// quadrature with `quadrature_order` nodes per axis per cell. Exact for
// closures constant on each cell.
inline GridFunction sample(const DyadicGrid& grid,
                           const std::function<complexd(std::array<double, 3>)>& f,
                           int quadrature_order = 4) {
  if (quadrature_order < 1 || quadrature_order > 64)
    throw InvalidArgument("quadrature order must be in [1, 64]");
  std::vector<double> nodes, weights;
  detail::gauss_legendre_01(quadrature_order, nodes, weights);

  GridFunction out = GridFunction::zeros(grid);
  const double h = grid.mesh();
  const int q = quadrature_order;
  std::array<int, 3> qi{0, 0, 0};
  for (std::size_t idx = 0; idx < out.values.size(); ++idx) {
    const auto c = grid.coords(idx);
    complexd acc = 0;
    qi = {0, 0, 0};
    while (true) {
      std::array<double, 3> x{0.0, 0.0, 0.0};
      double w = 1.0;
      for (int k = 0; k < grid.dim; ++k) {
        x[k] = (c[k] + nodes[qi[k]]) * h;
        w *= weights[qi[k]];
      }
      const complexd v = f(x);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw NonFiniteSample("closure returned a non-finite value");
      acc += w * v;
      int k = grid.dim - 1;
      while (k >= 0 && ++qi[k] == q) qi[k--] = 0;
      if (k < 0) break;
    }
    out.values[idx] = acc;
  }
  return out;
}

inline GridFunction sample(const DyadicGrid& grid,
                           const std::function<double(std::array<double, 3>)>& f,
                           int quadrature_order = 4) {
  return sample(
      grid, std::function<complexd(std::array<double, 3>)>(
                [&f](std::array<double, 3> x) { return complexd(f(x), 0.0); }),
      quadrature_order);
}

// Finite difference of order M with integer cell offset h: the binomial sum
// sum_l (-1)^(M-l) C(M,l) f(x + l h). On the cube the value is 0 wherever the
// stencil leaves the domain; on the torus indices wrap.
inline GridFunction diff(const GridFunction& f, int order, std::array<int, 3> offset_cells) {
  if (order < 1 || order > 8) throw InvalidArgument("difference order must be in [1, 8]");
  bool nonzero = false;
  for (int k = 0; k < f.grid.dim; ++k) nonzero = nonzero || offset_cells[k] != 0;
  if (!nonzero) throw InvalidArgument("difference offset must be nonzero");

  std::array<double, 9> coeff{};
  for (int l = 0; l <= order; ++l)
    coeff[l] = ((order - l) % 2 == 0 ? 1.0 : -1.0) * detail::binomial(order, l);

  const DyadicGrid& g = f.grid;
  GridFunction out = GridFunction::zeros(g);
  for (std::size_t idx = 0; idx < out.values.size(); ++idx) {
    const auto c = g.coords(idx);
    complexd acc = 0;
    bool inside = true;
    for (int l = 0; l <= order && inside; ++l) {
      auto cs = c;
      for (int k = 0; k < g.dim && inside; ++k)
        inside = g.shift(cs, k, l * offset_cells[k]);
      if (inside) acc += coeff[l] * f.values[g.flat(cs)];
    }
    out.values[idx] = inside ? acc : complexd{0.0, 0.0};
  }
  return out;
}

namespace detail {

// Per-level pyramid of cell means: result[j] has 2^(n j) entries, result[J]
// is a copy of the samples. Exact arithmetic means of the fine cells.
inline std::vector<std::vector<complexd>> mean_pyramid(const GridFunction& f) {
  const int J = f.grid.level;
  const int n = f.grid.dim;
  std::vector<std::vector<complexd>> levels(static_cast<std::size_t>(J) + 1);
  levels[J] = f.values;
  for (int j = J - 1; j >= 0; --j) {
    const auto& fine = levels[j + 1];
    auto& coarse = levels[j];
    coarse.assign(std::size_t{1} << (static_cast<std::size_t>(n) * j), complexd{0, 0});
    const std::size_t fine_mask = (std::size_t{1} << (j + 1)) - 1;
    for (std::size_t idx = 0; idx < fine.size(); ++idx) {
      // parent index: drop the low bit of each coordinate
      std::size_t pidx = 0;
      std::size_t tmp = idx;
      std::array<int, 3> c{0, 0, 0};
      for (int k = n - 1; k >= 0; --k) {
        c[k] = static_cast<int>(tmp & fine_mask);
        tmp >>= (j + 1);
      }
      for (int k = 0; k < n; ++k)
        pidx = (pidx << j) | static_cast<std::size_t>(c[k] >> 1);
      coarse[pidx] += fine[idx];
    }
    const double scale = 1.0 / (1 << n);
    for (auto& v : coarse) v *= scale;
  }
  return levels;
}

}  // namespace detail

// E_j(f): on each dyadic cell of side 2^-j, the exact mean of the fine cells
// inside it; returned as a piecewise-constant function at the original level.
inline GridFunction dyadic_average(const GridFunction& f, int j) {
  const int J = f.grid.level;
  if (j < 0 || j > J) throw LevelOutOfRange("average level must be in [0, J]");
  if (j == J) return f;
  const auto pyramid = detail::mean_pyramid(f);
  const auto& coarse = pyramid[j];
  GridFunction out = GridFunction::zeros(f.grid);
  const int n = f.grid.dim;
  for (std::size_t idx = 0; idx < out.values.size(); ++idx) {
    const auto c = f.grid.coords(idx);
    std::size_t pidx = 0;
    for (int k = 0; k < n; ++k)
      pidx = (pidx << j) | (static_cast<std::size_t>(c[k]) >> (J - j));
    out.values[idx] = coarse[pidx];
  }
  return out;
}

// Discrete periodic convolution with the sup-norm bump
// rho(x) = c exp(-1/(1-|x|_inf^2)) on {|x|_inf < 1}, scaled to width eps and
// normalized so the discrete kernel sums to exactly 1.
inline GridFunction mollify(const GridFunction& f, double eps) {
  const DyadicGrid& g = f.grid;
  if (g.domain != Domain::Torus) throw DomainMismatch("mollify requires a torus grid");
  const double h = g.mesh();
  if (!(eps >= h && eps <= 0.25))
    throw EpsOutOfRange("eps must lie in [2^-J, 1/4]");

  const int n = g.dim;
  const int N = g.cells_per_axis();
  // cell-center offsets k h with |k| h < eps
  const int R = static_cast<int>(std::ceil(eps / h)) - 1;
  const int W = 2 * R + 1;

  std::vector<double> kernel(static_cast<std::size_t>(std::pow(W, n)));
  double total = 0.0;
  for (std::size_t ki = 0; ki < kernel.size(); ++ki) {
    std::size_t t = ki;
    double m = 0.0;
    for (int a = n - 1; a >= 0; --a) {
      const int off = static_cast<int>(t % W) - R;
      t /= W;
      m = std::max(m, std::abs(off * h) / eps);
    }
    const double w = (m < 1.0) ? std::exp(-1.0 / (1.0 - m * m)) : 0.0;
    kernel[ki] = w;
    total += w;
  }
  for (auto& w : kernel) w /= total;

  // wrap[i] = (i - R) mod N: source index for output coordinate c, tap o is
  // wrap[c + o] (the kernel is even, so the correlation equals the convolution)
  std::vector<std::size_t> wrap(static_cast<std::size_t>(N + W - 1));
  for (int i = 0; i < N + W - 1; ++i)
    wrap[i] = static_cast<std::size_t>(((i - R) % N + N) % N);

  GridFunction out = GridFunction::zeros(g);
  const auto* src = f.values.data();
  if (n == 1) {
    for (int c0 = 0; c0 < N; ++c0) {
      complexd acc = 0;
      for (int o0 = 0; o0 < W; ++o0) acc += kernel[o0] * src[wrap[c0 + o0]];
      out.values[c0] = acc;
    }
  } else if (n == 2) {
    for (int c0 = 0; c0 < N; ++c0)
      for (int c1 = 0; c1 < N; ++c1) {
        complexd acc = 0;
        const double* kr = kernel.data();
        for (int o0 = 0; o0 < W; ++o0) {
          const std::size_t row = wrap[c0 + o0] << g.level;
          for (int o1 = 0; o1 < W; ++o1) acc += kr[o1] * src[row | wrap[c1 + o1]];
          kr += W;
        }
        out.values[(static_cast<std::size_t>(c0) << g.level) | c1] = acc;
      }
  } else {
    for (int c0 = 0; c0 < N; ++c0)
      for (int c1 = 0; c1 < N; ++c1)
        for (int c2 = 0; c2 < N; ++c2) {
          complexd acc = 0;
          const double* kr = kernel.data();
          for (int o0 = 0; o0 < W; ++o0) {
            const std::size_t p0 = wrap[c0 + o0] << (2 * g.level);
            for (int o1 = 0; o1 < W; ++o1) {
              const std::size_t p1 = p0 | (wrap[c1 + o1] << g.level);
              for (int o2 = 0; o2 < W; ++o2) acc += kr[o2] * src[p1 | wrap[c2 + o2]];
              kr += W;
            }
          }
          out.values[(((static_cast<std::size_t>(c0) << g.level) | c1) << g.level) | c2] =
              acc;
        }
  }
  return out;
}

// Partial map obtained by freezing the axes in `fixed_axes` at the given cell
// indices. Copy semantics; the result lives on an (n - |alpha|)-dimensional
// grid at the same level.
inline GridFunction slice(const GridFunction& f, const std::vector<int>& fixed_axes,
                          const std::vector<int>& cell_index) {
  const DyadicGrid& g = f.grid;
  const int n = g.dim;
  if (fixed_axes.empty() || static_cast<int>(fixed_axes.size()) >= n)
    throw BadAxisSet("fixed axes must be a proper nonempty subset of the axes");
  if (fixed_axes.size() != cell_index.size())
    throw BadAxisSet("one cell index per fixed axis required");
  std::array<bool, 3> fixed{false, false, false};
  std::array<int, 3> at{0, 0, 0};
  for (std::size_t i = 0; i < fixed_axes.size(); ++i) {
    const int a = fixed_axes[i];
    if (a < 0 || a >= n || fixed[a]) throw BadAxisSet("bad axis " + std::to_string(a));
    if (cell_index[i] < 0 || cell_index[i] >= g.cells_per_axis())
      throw BadAxisSet("cell index out of range on axis " + std::to_string(a));
    fixed[a] = true;
    at[a] = cell_index[i];
  }

  DyadicGrid sg{n - static_cast<int>(fixed_axes.size()), g.level, g.domain};
  GridFunction out = GridFunction::zeros(sg);
  for (std::size_t idx = 0; idx < out.values.size(); ++idx) {
    const auto sc = sg.coords(idx);
    std::array<int, 3> c{0, 0, 0};
    int si = 0;
    for (int a = 0; a < n; ++a) c[a] = fixed[a] ? at[a] : sc[si++];
    out.values[idx] = f.values[g.flat(c)];
  }
  return out;
}

}  // namespace beslift
