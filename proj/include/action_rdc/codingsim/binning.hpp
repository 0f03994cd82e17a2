#pragma once

// Random linear binning over GF(2): bin(x) = H x for a seeded binary matrix H.
// Bins are cosets of the kernel, so in-bin search enumerates an affine space
// instead of all 2^n sequences.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "action_rdc/error.hpp"
#include "action_rdc/rng.hpp"

namespace action_rdc {

/// Coset dimensions above this are refused rather than scanned.
inline constexpr std::size_t kMaxScanDimension = 24;

/// Score given to log(0) so impossible sequences still compare as numbers.
inline constexpr double kImpossibleLog = -1e6;

/// Bits needed to carry `rate` bits per symbol over n symbols: ceil(n R),
/// clamped at zero.
inline std::size_t rate_bits(std::size_t n, double rate) {
  const double b = std::ceil(static_cast<double>(n) * rate - 1e-9);
  return b <= 0.0 ? 0 : static_cast<std::size_t>(b);
}

class BinningCode {
 public:
  /// Length-n binary sequences (n <= 64) into 2^bits bins, bits <= 63.
  static BinningCode with_bits(std::size_t n, std::size_t bits, std::uint64_t seed) {
    return BinningCode(BitsTag{}, n, bits, seed);
  }
  BinningCode(std::size_t n, double rate, std::uint64_t seed) : BinningCode(BitsTag{}, n, rate_bits(n, rate), seed) {}

  std::size_t n() const noexcept { return n_; }
  std::size_t bits() const noexcept { return bits_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t bins() const noexcept { return std::uint64_t{1} << bits_; }
  double rate() const noexcept { return n_ ? static_cast<double>(bits_) / static_cast<double>(n_) : 0.0; }

  /// Bin index in [0, 2^bits).
  std::uint64_t bin_of(std::uint64_t x) const noexcept {
    std::uint64_t s = 0;
    while (x) {
      s ^= cols_[static_cast<std::size_t>(std::countr_zero(x))];
      x &= x - 1;
    }
    return s;
  }

  /// The code formed by the first `bits` rows of H. Its bin index is the low
  /// `bits` bits of this code's index.
  BinningCode truncated(std::size_t bits) const {
    if (bits > bits_) throw DomainError("binning: cannot truncate to more bits");
    const std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
    std::vector<std::uint64_t> cols(cols_);
    for (auto& c : cols) c &= mask;
    return BinningCode(BitsTag{}, n_, bits, seed_, std::move(cols));
  }

  /// Dimension of each nonempty bin as an affine space.
  std::size_t coset_dimension() const noexcept { return null_basis_.size(); }

  /// Some sequence in the bin, or nullopt when the bin is empty.
  std::optional<std::uint64_t> representative(std::uint64_t bin) const noexcept {
    for (std::size_t r = rank_; r < bits_; ++r) {
      if (std::popcount(transform_[r] & bin) & 1) return std::nullopt;
    }
    std::uint64_t x = 0;
    for (std::size_t r = 0; r < rank_; ++r) {
      if (std::popcount(transform_[r] & bin) & 1) x |= std::uint64_t{1} << pivots_[r];
    }
    return x;
  }

  /// Calls f(x) for every x with bin_of(x) == bin, in Gray-code order.
  template <class F>
  void for_each_in_bin(std::uint64_t bin, F&& f) const {
    if (coset_dimension() > kMaxScanDimension) {
      throw BudgetExhausted("bin scan of dimension " + std::to_string(coset_dimension()) + " exceeds the limit " +
                            std::to_string(kMaxScanDimension));
    }
    auto x = representative(bin);
    if (!x) return;
    const std::uint64_t count = std::uint64_t{1} << coset_dimension();
    f(*x);
    for (std::uint64_t g = 1; g < count; ++g) {
      *x ^= null_basis_[static_cast<std::size_t>(std::countr_zero(g))];
      f(*x);
    }
  }

 private:
  struct BitsTag {};
  BinningCode(BitsTag, std::size_t n, std::size_t bits, std::uint64_t seed) : n_(n), bits_(bits), seed_(seed) {
    if (n > 64) throw DomainError("binning: blocklength above 64");
    if (bits > 63) throw DomainError("binning: more than 63 bin bits");
    Rng rng(seed);
    const std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
    const std::size_t full = std::min(n, bits);
    // Redraw until H has full rank, so a code with bits >= n is lossless.
    do {
      cols_.assign(n, 0);
      for (auto& c : cols_) c = rng() & mask;
      eliminate();
    } while (rank_ < full);
  }

  BinningCode(BitsTag, std::size_t n, std::size_t bits, std::uint64_t seed, std::vector<std::uint64_t> cols)
      : n_(n), bits_(bits), seed_(seed), cols_(std::move(cols)) {
    eliminate();
  }

  // Row-reduce H, tracking the row operations so syndromes can be reduced too.
  void eliminate() {
    pivots_.clear();
    null_basis_.clear();
    std::vector<std::uint64_t> rows(bits_, 0);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t r = 0; r < bits_; ++r) {
        if ((cols_[i] >> r) & 1) rows[r] |= std::uint64_t{1} << i;
      }
    }
    transform_.assign(bits_, 0);
    for (std::size_t r = 0; r < bits_; ++r) transform_[r] = std::uint64_t{1} << r;
    rank_ = 0;
    std::vector<bool> is_pivot(n_, false);
    for (std::size_t c = 0; c < n_ && rank_ < bits_; ++c) {
      std::size_t p = rank_;
      while (p < bits_ && !((rows[p] >> c) & 1)) ++p;
      if (p == bits_) continue;
      std::swap(rows[p], rows[rank_]);
      std::swap(transform_[p], transform_[rank_]);
      for (std::size_t r = 0; r < bits_; ++r) {
        if (r != rank_ && ((rows[r] >> c) & 1)) {
          rows[r] ^= rows[rank_];
          transform_[r] ^= transform_[rank_];
        }
      }
      pivots_.push_back(c);
      is_pivot[c] = true;
      ++rank_;
    }
    for (std::size_t f = 0; f < n_; ++f) {
      if (is_pivot[f]) continue;
      std::uint64_t v = std::uint64_t{1} << f;
      for (std::size_t r = 0; r < rank_; ++r) {
        if ((rows[r] >> f) & 1) v |= std::uint64_t{1} << pivots_[r];
      }
      null_basis_.push_back(v);
    }
  }

  std::size_t n_;
  std::size_t bits_;
  std::uint64_t seed_;
  std::vector<std::uint64_t> cols_;  // column i of H as a bits-wide mask
  std::vector<std::uint64_t> transform_;
  std::vector<std::size_t> pivots_;
  std::vector<std::uint64_t> null_basis_;
  std::size_t rank_ = 0;
};

/// Per-position log-likelihoods of a binary sequence, scored as
/// base + sum of delta[i] over the positions set to 1.
struct BitScores {
  double base = 0.0;
  std::vector<double> delta;

  void push(double log_p0, double log_p1) {
    base += log_p0;
    delta.push_back(log_p1 - log_p0);
  }
  double score(std::uint64_t x) const noexcept {
    double s = base;
    while (x) {
      s += delta[static_cast<std::size_t>(std::countr_zero(x))];
      x &= x - 1;
    }
    return s;
  }
};

inline double safe_log(double p) { return p > 0.0 ? std::log(p) : kImpossibleLog; }

/// Most likely sequence in the bin; nullopt on an empty bin or a tie.
inline std::optional<std::uint64_t> map_decode(const BinningCode& code, std::uint64_t bin, const BitScores& s,
                                               double tie_tol = 1e-9) {
  double best = -std::numeric_limits<double>::infinity();
  std::uint64_t arg = 0;
  bool tie = false;
  bool any = false;
  code.for_each_in_bin(bin, [&](std::uint64_t x) {
    const double v = s.score(x);
    if (!any || v > best + tie_tol) {
      best = v;
      arg = x;
      tie = false;
      any = true;
    } else if (v >= best - tie_tol) {
      tie = true;
    }
  });
  if (!any || tie) return std::nullopt;
  return arg;
}

}  // namespace action_rdc
