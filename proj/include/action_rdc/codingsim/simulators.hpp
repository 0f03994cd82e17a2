#pragma once

// Small-blocklength runs of the coding schemes: binning with in-bin MAP
// decoding, XOR of refinement indices, typical action codewords, and a
// random point-to-point code for the XOR of a doubly symmetric pair.

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "action_rdc/codingsim/binning.hpp"
#include "action_rdc/error.hpp"
#include "action_rdc/parallel.hpp"
#include "action_rdc/probcore.hpp"
#include "action_rdc/regions/model.hpp"
#include "action_rdc/rng.hpp"

namespace action_rdc {

struct SimReport {
  std::string scheme;
  std::size_t n = 0;
  std::size_t trials = 0;
  double rate = 0.0;  // bits per symbol as transmitted
  std::size_t block_errors = 0;
  double error_rate = 0.0;
  std::vector<double> distortion;                      // mean per decoder (lossy schemes)
  std::vector<std::vector<double>> trial_distortions;  // [decoder][trial]
  double cost = 0.0;                                   // mean empirical E Λ(A)
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  std::map<std::string, double> details;
};

/// i.i.d. codewords drawn from a generator pmf.
struct Codebook {
  std::size_t n = 0;
  std::vector<double> generator;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::uint8_t>> words;

  std::size_t size() const noexcept { return words.size(); }

  static Codebook generate(std::size_t n, std::size_t size, std::span<const double> pmf, std::uint64_t seed);
};

inline std::size_t sample_index(Rng& rng, std::span<const double> p) {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return i;
  }
  // Rounding left u above the total; return the last letter with mass.
  for (std::size_t i = p.size(); i-- > 0;) {
    if (p[i] > 0.0) return i;
  }
  return 0;
}

inline Codebook Codebook::generate(std::size_t n, std::size_t size, std::span<const double> pmf, std::uint64_t seed) {
  if (size == 0) throw DomainError("codebook: size must be positive");
  if (pmf.size() > 256) throw DomainError("codebook: alphabet too large");
  Codebook c;
  c.n = n;
  c.generator.assign(pmf.begin(), pmf.end());
  c.seed = seed;
  Rng rng(seed);
  c.words.resize(size);
  for (auto& w : c.words) {
    w.resize(n);
    for (auto& s : w) s = static_cast<std::uint8_t>(sample_index(rng, pmf));
  }
  return c;
}

namespace detail {

inline constexpr std::size_t kMaxCodebookBits = 20;

using Clock = std::chrono::steady_clock;

inline void require_trials(std::size_t trials, std::string_view op) {
  if (trials == 0) throw DomainError(std::string(op) + ": trials must be positive");
}

inline void require_binary_source(const Alphabet& x, std::string_view op) {
  if (x.size() != 2) throw DomainError(std::string(op) + ": binning needs a binary source alphabet");
}

inline std::uint64_t pack_bits(std::span<const std::uint8_t> bits) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) v |= std::uint64_t{1} << i;
  }
  return v;
}

// Total-variation distance between the joint type of (x, a) and p(x, a).
inline double joint_type_distance(std::span<const std::uint8_t> x, std::span<const std::uint8_t> a,
                                  std::span<const double> pxa, std::size_t na) {
  std::vector<double> counts(pxa.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) counts[x[i] * na + a[i]] += 1.0;
  double tv = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t k = 0; k < pxa.size(); ++k) tv += std::abs(counts[k] / n - pxa[k]);
  return 0.5 * tv;
}

// First codeword within `radius` of p(x,a) in type distance, else the closest.
inline std::size_t select_action_word(const Codebook& book, std::span<const std::uint8_t> x,
                                      std::span<const double> pxa, std::size_t na, double radius) {
  std::size_t best = 0;
  double best_tv = std::numeric_limits<double>::infinity();
  for (std::size_t w = 0; w < book.size(); ++w) {
    const double tv = joint_type_distance(x, book.words[w], pxa, na);
    if (tv <= radius) return w;
    if (tv < best_tv) {
      best_tv = tv;
      best = w;
    }
  }
  return best;
}

struct TrialOutcome {
  bool error = false;
  std::vector<double> distortion;
  double cost = 0.0;
};

inline SimReport assemble(std::string scheme, std::size_t n, double rate, std::uint64_t seed,
                          const std::vector<TrialOutcome>& out, Clock::time_point t0) {
  SimReport r;
  r.scheme = std::move(scheme);
  r.n = n;
  r.trials = out.size();
  r.rate = rate;
  r.seed = seed;
  const std::size_t k = out.empty() ? 0 : out.front().distortion.size();
  r.trial_distortions.assign(k, std::vector<double>(out.size(), 0.0));
  r.distortion.assign(k, 0.0);
  for (std::size_t t = 0; t < out.size(); ++t) {
    r.block_errors += out[t].error ? 1 : 0;
    r.cost += out[t].cost;
    for (std::size_t j = 0; j < k; ++j) {
      r.trial_distortions[j][t] = out[t].distortion[j];
      r.distortion[j] += out[t].distortion[j];
    }
  }
  const double tr = static_cast<double>(out.size());
  r.error_rate = static_cast<double>(r.block_errors) / tr;
  r.cost /= tr;
  for (auto& d : r.distortion) d /= tr;
  r.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return r;
}

// Posterior p(x | y, a) over binary x as log-likelihood pairs, from p(x) p(a|x) p(y|x,a).
inline std::array<double, 2> log_posterior(double w0, double w1) {
  const double s = w0 + w1;
  if (s <= 0.0) return {std::log(0.5), std::log(0.5)};
  return {safe_log(w0 / s), safe_log(w1 / s)};
}

}  // namespace detail

// --- identity side information, deterministic XOR scheme -------------------

/// Y = X, uniform binary source, K decoders. Positions are split into K
/// segments; decoder j sees segment j and the encoder sends segment 1 XOR
/// segment j for j = 2..K. Every decoder recovers the whole block.
inline SimReport simulate_identity_switch(std::size_t n, std::size_t K, const Pmf& source, std::size_t trials,
                                          std::uint64_t seed) {
  const auto t0 = detail::Clock::now();
  detail::require_trials(trials, "simulate_identity_switch");
  if (source.size() != 2 || std::abs(source[0] - 0.5) > 1e-12) {
    throw DomainError("simulate_identity_switch: source must be uniform binary");
  }
  if (K == 0 || n == 0 || n % K != 0) throw DomainError("simulate_identity_switch: K must divide n");
  const std::size_t seg = n / K;
  const auto out = parallel_map(trials, [&](std::size_t t) {
    Rng rng(derive_seed(seed, "identity_switch", t));
    std::vector<std::uint8_t> x(n);
    for (auto& b : x) b = uniform01(rng) < 0.5 ? 0 : 1;
    // Parity slots: segment 0 XOR segment k, k = 1..K-1.
    std::vector<std::uint8_t> parity((K - 1) * seg);
    for (std::size_t k = 1; k < K; ++k) {
      for (std::size_t i = 0; i < seg; ++i) parity[(k - 1) * seg + i] = x[i] ^ x[k * seg + i];
    }
    detail::TrialOutcome o;
    for (std::size_t j = 0; j < K; ++j) {
      std::vector<std::uint8_t> first(seg);
      for (std::size_t i = 0; i < seg; ++i) {
        const std::uint8_t seen = x[j * seg + i];  // side information on segment j
        first[i] = j == 0 ? seen : static_cast<std::uint8_t>(seen ^ parity[(j - 1) * seg + i]);
      }
      std::vector<std::uint8_t> xh(n);
      for (std::size_t i = 0; i < seg; ++i) xh[i] = first[i];
      for (std::size_t k = 1; k < K; ++k) {
        for (std::size_t i = 0; i < seg; ++i) xh[k * seg + i] = first[i] ^ parity[(k - 1) * seg + i];
      }
      o.error = o.error || xh != x;
    }
    return o;
  });
  const double rate = static_cast<double>((K - 1) * seg) / static_cast<double>(n);
  auto r = detail::assemble("identity_switch", n, rate, seed, out, t0);
  r.details["K"] = static_cast<double>(K);
  return r;
}

// --- two-halves binning with XOR of in-bin indices -------------------------

struct SwModuloOptions {
  double margin = 0.0;              // added to each component rate (bits per symbol of the block)
  std::optional<double> total_rate;  // if set, components are scaled to this total instead
};

/// Two decoders; decoder 1 sees Y on the first half, decoder 2 on the second.
/// Each half is binned at H(X|Y)/2 (+margin); an in-bin index at I(X;Y)/2
/// (+margin) is computed per half and only their XOR is sent.
inline SimReport simulate_sw_modulo(const JointPmf& joint, std::size_t n, SwModuloOptions opt, std::size_t trials,
                                    std::uint64_t seed) {
  const auto t0 = detail::Clock::now();
  require_xy(joint, "simulate_sw_modulo");
  detail::require_binary_source(joint.axis(0), "simulate_sw_modulo");
  detail::require_trials(trials, "simulate_sw_modulo");
  if (n < 2 || n % 2 != 0 || n / 2 > 63) throw DomainError("simulate_sw_modulo: n must be even with n/2 <= 63");
  const std::size_t m = n / 2;
  const std::size_t ny = joint.dims()[1];
  const double hxy = conditional_entropy(joint, {0}, {1});
  const double ixy = mutual_information(joint, {0}, {1});
  std::size_t b_bin = 0;
  std::size_t b_idx = 0;
  if (opt.total_rate) {
    const double theory = hxy + ixy / 2.0;
    const double scale = theory > 0.0 ? *opt.total_rate / theory : 0.0;
    b_bin = rate_bits(n, scale * hxy / 2.0);
    b_idx = rate_bits(n, scale * ixy / 2.0);
  } else {
    b_bin = rate_bits(n, hxy / 2.0 + opt.margin);
    b_idx = rate_bits(n, ixy / 2.0 + opt.margin);
  }
  // A half never needs more than m bits in total.
  b_bin = std::min(b_bin, m);
  b_idx = std::min(b_idx, m - b_bin);
  const auto pxy = joint.probs();
  const auto px = joint.marginal_values({0});

  const auto out = parallel_map(trials, [&](std::size_t t) {
    Rng rng(derive_seed(seed, "sw_modulo", t));
    std::vector<std::uint8_t> x(n);
    std::vector<std::size_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = sample_index(rng, pxy);
      x[i] = static_cast<std::uint8_t>(k / ny);
      y[i] = k % ny;
    }
    std::array<BinningCode, 2> full{BinningCode::with_bits(m, b_bin + b_idx, derive_seed(seed, "sw_modulo.h1", t)),
                                    BinningCode::with_bits(m, b_bin + b_idx, derive_seed(seed, "sw_modulo.h2", t))};
    std::array<BinningCode, 2> bin{full[0].truncated(b_bin), full[1].truncated(b_bin)};
    std::array<std::uint64_t, 2> half{detail::pack_bits({x.data(), m}), detail::pack_bits({x.data() + m, m})};
    const std::uint64_t low = (std::uint64_t{1} << b_bin) - 1;
    std::array<std::uint64_t, 2> f{full[0].bin_of(half[0]), full[1].bin_of(half[1])};
    const std::array<std::uint64_t, 2> msg{f[0] & low, f[1] & low};
    const std::uint64_t xored = (f[0] >> b_bin) ^ (f[1] >> b_bin);

    BitScores prior;
    for (std::size_t i = 0; i < m; ++i) prior.push(safe_log(px[0]), safe_log(px[1]));
    detail::TrialOutcome o;
    for (std::size_t j = 0; j < 2; ++j) {
      const std::size_t other = 1 - j;
      BitScores side;
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t yi = y[j * m + i];
        const auto lp = detail::log_posterior(pxy[0 * ny + yi], pxy[1 * ny + yi]);
        side.push(lp[0], lp[1]);
      }
      const auto own = map_decode(bin[j], msg[j], side);
      if (!own || *own != half[j]) {
        o.error = true;
        continue;
      }
      const std::uint64_t idx_other = xored ^ (full[j].bin_of(*own) >> b_bin);
      const auto rest = map_decode(full[other], msg[other] | (idx_other << b_bin), prior);
      if (!rest || *rest != half[other]) o.error = true;
    }
    return o;
  });
  const double rate = static_cast<double>(2 * b_bin + b_idx) / static_cast<double>(n);
  auto r = detail::assemble("sw_modulo", n, rate, seed, out, t0);
  r.details["bin_bits_per_half"] = static_cast<double>(b_bin);
  r.details["xor_index_bits"] = static_cast<double>(b_idx);
  r.details["theory_rate"] = hxy + ixy / 2.0;
  return r;
}

// --- partition by action value (four-state switch) -------------------------

/// Four-state switch (A=0 nobody sees Y, 1 decoder 1, 2 decoder 2, 3 both).
/// The block is split by the selected action codeword; each part is binned,
/// parts 1 and 2 also carry in-bin indices whose XOR is sent.
inline SimReport simulate_cor2_partition(const JointPmf& joint, const ConditionalTable& pa_x,
                                         std::array<double, 4> costs, std::size_t n, double margin,
                                         std::size_t trials, std::uint64_t seed) {
  const auto t0 = detail::Clock::now();
  require_xy(joint, "simulate_cor2_partition");
  detail::require_binary_source(joint.axis(0), "simulate_cor2_partition");
  detail::require_trials(trials, "simulate_cor2_partition");
  if (n == 0 || n > 63) throw DomainError("simulate_cor2_partition: n must lie in [1, 63]");
  if (pa_x.rows() != 2 || pa_x.cols() != 4) throw DomainError("simulate_cor2_partition: p(a|x) must be 2 x 4");
  const std::size_t ny = joint.dims()[1];
  const auto pxy = joint.probs();
  const auto px = joint.marginal_values({0});
  // p(x, a, y) and its pieces.
  std::vector<double> pxa(8, 0.0);
  std::array<double, 4> pa{};
  for (std::size_t x = 0; x < 2; ++x) {
    for (std::size_t a = 0; a < 4; ++a) {
      pxa[x * 4 + a] = px[x] * pa_x(x, a);
      pa[a] += pxa[x * 4 + a];
    }
  }
  for (std::size_t a = 0; a < 4; ++a) {
    if (pa[a] > 0.0 && !std::isfinite(costs[a])) {
      throw DomainError("simulate_cor2_partition: p(a|x) uses a forbidden action");
    }
  }
  const std::array<std::size_t, 2> dxa{2, 4};
  const double ixa = std::max(0.0, entropy_bits(px) + entropy_of(pxa, dxa, {1}) - entropy_bits(pxa));
  // p_a H(X|A=a), p_a H(X|Y,A=a), p_a I(X;Y|A=a) from unnormalized weights.
  std::array<double, 4> h_x{};
  std::array<double, 4> h_xy{};
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t x = 0; x < 2; ++x) {
      if (pxa[x * 4 + a] > 0.0) h_x[a] -= pxa[x * 4 + a] * std::log2(pxa[x * 4 + a] / pa[a]);
    }
    for (std::size_t y = 0; y < ny; ++y) {
      const double w0 = pxy[0 * ny + y] * pa_x(0, a);
      const double w1 = pxy[1 * ny + y] * pa_x(1, a);
      for (double w : {w0, w1}) {
        if (w > 0.0) h_xy[a] -= w * std::log2(w / (w0 + w1));
      }
    }
  }
  const std::size_t a_bits = rate_bits(n, ixa + margin);
  if (a_bits > detail::kMaxCodebookBits) throw BudgetExhausted("simulate_cor2_partition: action codebook too large");
  std::array<std::size_t, 4> b{};
  b[0] = rate_bits(n, h_x[0] + margin);
  for (std::size_t a = 1; a < 4; ++a) b[a] = rate_bits(n, h_xy[a] + margin);
  const std::size_t w = std::max(rate_bits(n, std::max(0.0, h_x[1] - h_xy[1]) + margin),
                                 rate_bits(n, std::max(0.0, h_x[2] - h_xy[2]) + margin));
  if (b[0] > 63 || b[3] > 63 || b[1] + w > 63 || b[2] + w > 63) {
    throw DomainError("simulate_cor2_partition: bin indices wider than 63 bits");
  }
  const double radius = margin / 2.0;

  const auto out = parallel_map(trials, [&](std::size_t t) {
    Rng rng(derive_seed(seed, "cor2.source", t));
    std::vector<std::uint8_t> x(n);
    std::vector<std::size_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = sample_index(rng, pxy);
      x[i] = static_cast<std::uint8_t>(k / ny);
      y[i] = k % ny;
    }
    const auto book = Codebook::generate(n, std::size_t{1} << a_bits, pa, derive_seed(seed, "cor2.actions", t));
    const auto& a = book.words[detail::select_action_word(book, x, pxa, 4, radius)];

    // Split by action value.
    std::array<std::vector<std::size_t>, 4> pos;
    for (std::size_t i = 0; i < n; ++i) pos[a[i]].push_back(i);
    std::array<std::uint64_t, 4> part{};
    for (std::size_t v = 0; v < 4; ++v) {
      for (std::size_t k = 0; k < pos[v].size(); ++k) {
        if (x[pos[v][k]]) part[v] |= std::uint64_t{1} << k;
      }
    }
    std::array<std::size_t, 4> width = b;
    width[1] += w;
    width[2] += w;
    std::vector<BinningCode> full;
    for (std::size_t v = 0; v < 4; ++v) {
      full.push_back(
          BinningCode::with_bits(pos[v].size(), width[v], derive_seed(seed, "cor2.bin" + std::to_string(v), t)));
    }
    std::array<std::uint64_t, 4> msg{};
    std::array<std::uint64_t, 4> f{};
    for (std::size_t v = 0; v < 4; ++v) {
      f[v] = full[v].bin_of(part[v]);
      msg[v] = f[v] & ((std::uint64_t{1} << b[v]) - 1);
    }
    const std::uint64_t xored = (f[1] >> b[1]) ^ (f[2] >> b[2]);

    // Scores for part v, with or without Y.
    auto scores = [&](std::size_t v, bool sees) {
      BitScores s;
      for (std::size_t i : pos[v]) {
        if (sees) {
          const auto lp = detail::log_posterior(pxy[0 * ny + y[i]] * pa_x(0, v), pxy[1 * ny + y[i]] * pa_x(1, v));
          s.push(lp[0], lp[1]);
        } else {
          const auto lp = detail::log_posterior(pxa[0 * 4 + v], pxa[1 * 4 + v]);
          s.push(lp[0], lp[1]);
        }
      }
      return s;
    };
    detail::TrialOutcome o;
    for (std::size_t v = 0; v < n; ++v) o.cost += costs[a[v]];
    o.cost /= static_cast<double>(n);
    for (std::size_t j = 1; j <= 2; ++j) {
      const std::size_t other = 3 - j;
      bool ok = true;
      std::uint64_t own = 0;
      for (std::size_t v : {std::size_t{0}, j, std::size_t{3}}) {
        const auto got = map_decode(full[v].truncated(b[v]), msg[v], scores(v, v != 0));
        ok = ok && got && *got == part[v];
        if (got && v == j) own = *got;
      }
      if (ok) {
        const std::uint64_t idx_other = xored ^ (full[j].bin_of(own) >> b[j]);
        const auto got = map_decode(full[other], msg[other] | (idx_other << b[other]), scores(other, false));
        ok = got && *got == part[other];
      }
      o.error = o.error || !ok;
    }
    return o;
  });
  const double rate = static_cast<double>(a_bits + b[0] + b[1] + b[2] + b[3] + w) / static_cast<double>(n);
  auto r = detail::assemble("cor2_partition", n, rate, seed, out, t0);
  r.details["action_bits"] = static_cast<double>(a_bits);
  r.details["xor_index_bits"] = static_cast<double>(w);
  r.details["I(X;A)"] = ixa;
  return r;
}

// --- complementary delivery of a doubly symmetric binary pair ---------------

/// X uniform, Y = X xor Z with Z ~ Bern(p). Z is described with a random
/// codebook of floor(2^{nR}) words drawn i.i.d. Bern(r), r chosen so the
/// backward test channel of the rate-distortion solution is matched.
/// Decoder 1 outputs Y xor Ẑ, decoder 2 outputs X xor Ẑ.
inline SimReport simulate_dsbs_compdel(double p, double rate, std::size_t n, std::size_t trials,
                                       std::uint64_t seed) {
  const auto t0 = detail::Clock::now();
  detail::require_trials(trials, "simulate_dsbs_compdel");
  if (!(p > 0.0 && p <= 0.5)) throw DomainError("simulate_dsbs_compdel: p must lie in (0, 1/2]");
  if (!(rate >= 0.0)) throw DomainError("simulate_dsbs_compdel: rate must be >= 0");
  if (n == 0 || n > 64) throw DomainError("simulate_dsbs_compdel: n must lie in [1, 64]");
  const double nr = static_cast<double>(n) * rate;
  if (nr > static_cast<double>(detail::kMaxCodebookBits)) {
    throw BudgetExhausted("simulate_dsbs_compdel: codebook of 2^" + std::to_string(nr) + " words is too large");
  }
  const auto size = static_cast<std::size_t>(std::floor(std::exp2(nr) + 1e-9));
  const double hp = binary_entropy(p);
  const double d_target = rate >= hp ? 0.0 : binary_entropy_inv(hp - rate);
  const double r_gen = d_target >= 0.5 ? 0.0 : std::clamp((p - d_target) / (1.0 - 2.0 * d_target), 0.0, 1.0);
  const std::array<double, 2> gen{1.0 - r_gen, r_gen};

  const auto out = parallel_map(trials, [&](std::size_t t) {
    Rng rng(derive_seed(seed, "dsbs.source", t));
    std::uint64_t x = 0;
    std::uint64_t z = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (uniform01(rng) < 0.5) x |= std::uint64_t{1} << i;
      if (uniform01(rng) < p) z |= std::uint64_t{1} << i;
    }
    const std::uint64_t y = x ^ z;
    const auto book = Codebook::generate(n, size, gen, derive_seed(seed, "dsbs.codebook", t));
    std::uint64_t zh = 0;
    int best = std::numeric_limits<int>::max();
    for (const auto& word : book.words) {
      const std::uint64_t c = detail::pack_bits(word);
      const int dist = std::popcount(c ^ z);
      if (dist < best) {
        best = dist;
        zh = c;
      }
    }
    const std::uint64_t x_hat = y ^ zh;  // decoder 1 holds Y
    const std::uint64_t y_hat = x ^ zh;  // decoder 2 holds X
    detail::TrialOutcome o;
    const double nn = static_cast<double>(n);
    o.distortion = {std::popcount(x_hat ^ x) / nn, std::popcount(y_hat ^ y) / nn};
    return o;
  });
  auto r = detail::assemble("dsbs_compdel", n, std::log2(static_cast<double>(size)) / static_cast<double>(n), seed,
                            out, t0);
  r.details["codebook_size"] = static_cast<double>(size);
  r.details["generator_p1"] = r_gen;
  r.details["distortion_floor"] = d_target;
  return r;
}

// --- generic decoder-action scheme -------------------------------------------

/// Action codeword chosen by joint-type distance at rate I(X;A)+margin, then
/// one bin index at max_j H(X|Y_j,A)+margin; each decoder MAP-decodes the bin
/// from its side information and the action sequence. Binary X only.
inline SimReport simulate_thm1_generic(const Pmf& source, const ActionModel& model, const ConditionalTable& pa_x,
                                       double margin, std::size_t n, std::size_t trials, std::uint64_t seed) {
  const auto t0 = detail::Clock::now();
  detail::require_source_matches(source, model, "simulate_thm1_generic");
  detail::require_binary_source(source.alphabet(), "simulate_thm1_generic");
  detail::require_trials(trials, "simulate_thm1_generic");
  if (n == 0 || n > 63) throw DomainError("simulate_thm1_generic: n must lie in [1, 63]");
  const std::size_t na = model.actions().size();
  if (pa_x.rows() != 2 || pa_x.cols() != na) throw DomainError("simulate_thm1_generic: p(a|x) must be 2 x |A|");
  const auto px = source.probs();
  const auto pxa = detail::joint_xa(px, detail::view_of(pa_x));
  std::vector<double> pa(na, 0.0);
  for (std::size_t x = 0; x < 2; ++x) {
    for (std::size_t a = 0; a < na; ++a) pa[a] += pxa[x * na + a];
  }
  for (std::size_t a = 0; a < na; ++a) {
    if (pa[a] > 0.0 && model.cost().forbidden(a)) {
      throw DomainError("simulate_thm1_generic: p(a|x) uses a forbidden action");
    }
  }
  const double ixa = detail::info_xa(pxa, 2, na);
  double worst = 0.0;
  for (std::size_t j = 0; j < model.decoders(); ++j) worst = std::max(worst, detail::cond_entropy_x_given_ya(model, j, pxa));
  const std::size_t a_bits = rate_bits(n, ixa + margin);
  if (a_bits > detail::kMaxCodebookBits) throw BudgetExhausted("simulate_thm1_generic: action codebook too large");
  const std::size_t b = std::min<std::size_t>(rate_bits(n, worst + margin), 63);
  const auto& ch = model.channel();
  const auto& odims = ch.output_dims();
  const std::size_t k = model.decoders();
  const double radius = margin / 2.0;

  const auto out = parallel_map(trials, [&](std::size_t t) {
    Rng rng(derive_seed(seed, "thm1.source", t));
    std::vector<std::uint8_t> x(n);
    for (auto& v : x) v = static_cast<std::uint8_t>(sample_index(rng, px));
    const auto book = Codebook::generate(n, std::size_t{1} << a_bits, pa, derive_seed(seed, "thm1.actions", t));
    const auto& a = book.words[detail::select_action_word(book, x, pxa, na, radius)];
    // Side information through the action channel.
    std::vector<std::vector<std::size_t>> y(k, std::vector<std::size_t>(n));
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t col = sample_index(rng, ch.row(x[i] * na + a[i]));
      for (std::size_t j = k; j-- > 0;) {
        y[j][i] = col % odims[j];
        col /= odims[j];
      }
    }
    const auto code = BinningCode::with_bits(n, b, derive_seed(seed, "thm1.bin", t));
    const std::uint64_t xs = detail::pack_bits(x);
    const std::uint64_t msg = code.bin_of(xs);
    detail::TrialOutcome o;
    for (std::size_t i = 0; i < n; ++i) o.cost += model.cost()(a[i]);
    o.cost /= static_cast<double>(n);
    for (std::size_t j = 0; j < k; ++j) {
      BitScores s;
      for (std::size_t i = 0; i < n; ++i) {
        const double w0 = pxa[0 * na + a[i]] * model.w(j, 0, a[i], y[j][i]);
        const double w1 = pxa[1 * na + a[i]] * model.w(j, 1, a[i], y[j][i]);
        const auto lp = detail::log_posterior(w0, w1);
        s.push(lp[0], lp[1]);
      }
      const auto got = map_decode(code, msg, s);
      o.error = o.error || !got || *got != xs;
    }
    return o;
  });
  const double rate = static_cast<double>(a_bits + b) / static_cast<double>(n);
  auto r = detail::assemble("thm1_generic", n, rate, seed, out, t0);
  r.details["action_bits"] = static_cast<double>(a_bits);
  r.details["bin_bits"] = static_cast<double>(b);
  r.details["theory_rate"] = ixa + worst;
  return r;
}

}  // namespace action_rdc
