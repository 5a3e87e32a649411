#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "sbe/error.hpp"
#include "sbe/parallel.hpp"
#include "sbe/state.hpp"
#include "sbe/velocity_grid.hpp"

namespace sbe {

enum class KernelKind { constant, gaussian_bump, custom_table };

inline std::string to_string(KernelKind k) {
  switch (k) {
    case KernelKind::constant: return "constant";
    case KernelKind::gaussian_bump: return "gaussian_bump";
    case KernelKind::custom_table: return "custom_table";
  }
  return "?";
}

struct KernelSpec {
  KernelKind kind = KernelKind::constant;
  double sigma0 = 1.0;
  /// Multiplies every entry; a tiny scale approximates the collisionless limit.
  double scale = 1.0;
  /// Row-major n x n table, only read for custom_table.
  std::vector<double> table;
};

/// Dense symmetric scattering table sigma(v_i, v_j) with its exact bounds.
struct CollisionKernel {
  std::size_t n = 0;
  std::vector<double> matrix;
  double sigma_minus = 0.0;
  double sigma_plus = 0.0;
  KernelKind kind = KernelKind::constant;

  double operator()(std::size_t i, std::size_t j) const { return matrix[i * n + j]; }
};

inline CollisionKernel build_kernel(const KernelSpec& spec, const VelocityGrid& grid) {
  if (!(spec.scale > 0.0) || !std::isfinite(spec.scale)) throw InvalidArgument("kernel scale must be positive");
  CollisionKernel k;
  k.n = grid.size();
  k.kind = spec.kind;
  k.matrix.resize(k.n * k.n);

  switch (spec.kind) {
    case KernelKind::constant:
      if (!(spec.sigma0 > 0.0) || !std::isfinite(spec.sigma0))
        throw InvalidArgument("constant kernel needs sigma0 > 0");
      std::fill(k.matrix.begin(), k.matrix.end(), spec.sigma0 * spec.scale);
      break;
    case KernelKind::gaussian_bump:
      for (std::size_t i = 0; i < k.n; ++i)
        for (std::size_t j = 0; j < k.n; ++j) {
          const double d0 = grid.nodes[i][0] - grid.nodes[j][0];
          const double d1 = grid.nodes[i][1] - grid.nodes[j][1];
          k.matrix[i * k.n + j] = (1.0 + 0.5 * std::exp(-0.5 * (d0 * d0 + d1 * d1))) * spec.scale;
        }
      break;
    case KernelKind::custom_table: {
      if (spec.table.size() != k.n * k.n)
        throw InvalidArgument("custom kernel table has " + std::to_string(spec.table.size()) + " entries, expected " +
                              std::to_string(k.n * k.n));
      for (std::size_t i = 0; i < k.n; ++i)
        for (std::size_t j = i; j < k.n; ++j) {
          const double a = spec.table[i * k.n + j];
          const double b = spec.table[j * k.n + i];
          if (!std::isfinite(a) || !(a > 0.0) || !(b > 0.0))
            throw InvalidArgument("custom kernel entries must be finite and positive");
          if (std::abs(a - b) > 1e-14 * std::max(std::abs(a), std::abs(b)))
            throw InvalidArgument("custom kernel table is not symmetric at (" + std::to_string(i) + ", " +
                                  std::to_string(j) + ")");
          k.matrix[i * k.n + j] = k.matrix[j * k.n + i] = a * spec.scale;
        }
      break;
    }
  }
  const auto [lo, hi] = std::minmax_element(k.matrix.begin(), k.matrix.end());
  k.sigma_minus = *lo;
  k.sigma_plus = *hi;
  if (!(k.sigma_minus > 0.0)) throw InvalidArgument("kernel lower bound must be positive");
  return k;
}

/// Reads a plain-text table: first line N, then N*N whitespace-separated values, row-major.
inline std::vector<double> read_kernel_table(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw FormatError("kernel table: missing header line");
  std::istringstream hs(header);
  long long n = 0;
  if (!(hs >> n) || n <= 0) throw FormatError("kernel table: header must be a positive integer N");
  std::vector<double> table;
  table.reserve(static_cast<std::size_t>(n * n));
  double x = 0.0;
  while (in >> x) table.push_back(x);
  if (!in.eof()) throw FormatError("kernel table: non-numeric entry");
  if (table.size() != static_cast<std::size_t>(n * n))
    throw FormatError("kernel table: expected " + std::to_string(n * n) + " values, found " +
                      std::to_string(table.size()));
  return table;
}

inline std::vector<double> load_kernel_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open kernel table " + path);
  return read_kernel_table(in);
}

inline void write_kernel_table(std::ostream& out, const CollisionKernel& k) {
  out << k.n << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < k.n; ++i) {
    for (std::size_t j = 0; j < k.n; ++j) out << (j ? " " : "") << k(i, j);
    out << '\n';
  }
}

/// Collision operator on one cell:
///   Q_i = sum_j w_j sigma_ij [M_i (1 - f_i) f_j - M_j (1 - f_j) f_i].
/// Each unordered pair is evaluated once and added with opposite signs, so
/// sum_i w_i Q_i cancels up to rounding.
inline void apply_Q(std::span<const double> f, const CollisionKernel& kernel, const VelocityGrid& grid,
                    std::span<double> out) {
  const std::size_t n = grid.size();
  if (f.size() != n || out.size() != n || kernel.n != n) throw InvalidArgument("apply_Q: size mismatch");
  for (double v : f)
    if (!(v >= 0.0 && v <= 1.0)) throw InvariantViolation("apply_Q: f outside [0, 1]");

  // a_i = M_i (1 - f_i)
  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = grid.maxwellian[i] * (1.0 - f[i]);
  std::fill(out.begin(), out.end(), 0.0);

  const double* w = grid.weights.data();
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = kernel.matrix.data() + i * n;
    const double ai = a[i], fi = f[i], wi = w[i];
    double acc = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double g = row[j] * (ai * f[j] - a[j] * fi);
      acc += w[j] * g;
      out[j] -= wi * g;
    }
    out[i] += acc;
  }
}

inline std::vector<double> apply_Q(std::span<const double> f, const CollisionKernel& kernel, const VelocityGrid& grid) {
  std::vector<double> out(f.size());
  apply_Q(f, kernel, grid, out);
  return out;
}

/// Q applied cell by cell to a whole state; returns a field with the same layout.
inline std::vector<double> apply_Q(const PhaseState& s, const CollisionKernel& kernel) {
  std::vector<double> out(s.f.size());
  const std::size_t nv = s.velocities();
  parallel_for(s.cells(), [&](std::size_t x) {
    apply_Q(s.cell(x), kernel, *s.vgrid, std::span<double>(out.data() + x * nv, nv));
  });
  return out;
}

}  // namespace sbe
