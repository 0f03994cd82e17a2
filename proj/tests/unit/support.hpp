#pragma once

// Hand-rolled generators for property tests, and small from-scratch oracles
// that share no code with the library.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "action_rdc/probcore.hpp"
#include "action_rdc/rng.hpp"

namespace testsupport {

using namespace action_rdc;

inline constexpr std::size_t kPropertyCases = 60;

/// Positive weights, optionally with some exact zeros.
inline std::vector<double> random_simplex(Rng& rng, std::size_t n, bool allow_zeros = false) {
  std::vector<double> p(n);
  double total = 0.0;
  for (auto& v : p) {
    v = uniform01(rng);
    if (allow_zeros && uniform01(rng) < 0.2) v = 0.0;
    total += v;
  }
  if (total == 0.0) {
    p[0] = 1.0;
    total = 1.0;
  }
  for (auto& v : p) v /= total;
  return p;
}

inline Pmf random_pmf(Rng& rng, std::size_t n, bool allow_zeros = false) {
  return Pmf(Alphabet::range(n), random_simplex(rng, n, allow_zeros));
}

inline JointPmf random_joint(Rng& rng, std::size_t nx, std::size_t ny, bool allow_zeros = false) {
  return JointPmf({Alphabet::range(nx), Alphabet::range(ny)}, random_simplex(rng, nx * ny, allow_zeros));
}

inline ConditionalTable random_table(Rng& rng, std::size_t rows, std::size_t cols) {
  std::vector<double> d;
  for (std::size_t r = 0; r < rows; ++r) {
    const auto row = random_simplex(rng, cols);
    d.insert(d.end(), row.begin(), row.end());
  }
  return ConditionalTable(rows, cols, d);
}

inline std::size_t random_size(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(hi - lo + 1)) % (hi - lo + 1);
}

// --- oracles -----------------------------------------------------------------

inline double h(const std::vector<double>& p) {
  double s = 0.0;
  for (double v : p) {
    if (v > 0.0) s -= v * std::log(v) / std::log(2.0);
  }
  return s;
}

inline double h2(double q) { return h({q, 1.0 - q}); }

/// H(X | Z) from a table p[x][z].
inline double cond_h(const std::vector<std::vector<double>>& pxz) {
  const std::size_t nz = pxz.front().size();
  double s = 0.0;
  for (std::size_t z = 0; z < nz; ++z) {
    double pz = 0.0;
    for (const auto& row : pxz) pz += row[z];
    for (const auto& row : pxz) {
      if (row[z] > 0.0) s -= row[z] * std::log2(row[z] / pz);
    }
  }
  return s;
}

/// Two-decoder switching with binary X: I(X;A) + max_j H(X | A, Y_j) where
/// A=1 shows Y to decoder 1 only and A=2 to decoder 2 only. w[x][y] = p(y|x).
inline double switching_rate_oracle(const std::vector<double>& px, const std::vector<std::vector<double>>& w,
                                    const std::vector<std::vector<double>>& pa_x) {
  const std::size_t nx = px.size();
  const std::size_t ny = w.front().size();
  std::vector<double> pa(2, 0.0);
  std::vector<std::vector<double>> pxa(nx, std::vector<double>(2, 0.0));
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t a = 0; a < 2; ++a) {
      pxa[x][a] = px[x] * pa_x[x][a];
      pa[a] += pxa[x][a];
    }
  }
  double ixa = h(px);
  ixa -= cond_h(pxa);
  double worst = 0.0;
  for (std::size_t j = 0; j < 2; ++j) {
    // Conditioning variable z = (a, y_j) where y_j is "e" unless a == j.
    std::vector<std::vector<double>> pxz(nx, std::vector<double>(2 * (ny + 1), 0.0));
    for (std::size_t x = 0; x < nx; ++x) {
      for (std::size_t a = 0; a < 2; ++a) {
        if (a == j) {
          for (std::size_t y = 0; y < ny; ++y) pxz[x][a * (ny + 1) + y] += pxa[x][a] * w[x][y];
        } else {
          pxz[x][a * (ny + 1) + ny] += pxa[x][a];
        }
      }
    }
    worst = std::max(worst, cond_h(pxz));
  }
  return ixa + worst;
}

}  // namespace testsupport
