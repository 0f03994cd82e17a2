#pragma once

// Complementary delivery: each decoder already holds the other half of a
// correlated pair, so the rate is the larger of two single-decoder terms.

#include <algorithm>
#include <cmath>
#include <string>

#include "action_rdc/error.hpp"
#include "action_rdc/probcore.hpp"
#include "action_rdc/regions/model.hpp"

namespace action_rdc {

/// Gaussian pair with power P and noise N: max{½log(N/D1), ½log(P'/D2)},
/// P' = PN/(P+N). Requires 0 < D1 <= N and 0 < D2 <= P'.
inline RatePoint gaussian_compdel(double P, double N, double D1, double D2) {
  if (!(P > 0.0 && N > 0.0)) throw DomainError("gaussian_compdel_rate: P and N must be positive");
  const double p_eff = P * N / (P + N);
  if (!(D1 > 0.0 && D1 <= N)) {
    throw DomainError("gaussian_compdel_rate: need 0 < D1 <= N (D1=" + std::to_string(D1) + ", N=" +
                      std::to_string(N) + ")");
  }
  if (!(D2 > 0.0 && D2 <= p_eff)) {
    throw DomainError("gaussian_compdel_rate: need 0 < D2 <= PN/(P+N) (D2=" + std::to_string(D2) +
                      ", PN/(P+N)=" + std::to_string(p_eff) + ")");
  }
  RatePoint r;
  const double t1 = 0.5 * std::log2(N / D1);
  const double t2 = 0.5 * std::log2(p_eff / D2);
  r.rate = std::max(t1, t2);
  r.distortions = {D1, D2};
  r.details["decoder1_term"] = t1;
  r.details["decoder2_term"] = t2;
  r.details["P_eff"] = p_eff;
  return r;
}

inline double gaussian_compdel_rate(double P, double N, double D1, double D2) {
  return gaussian_compdel(P, N, D1, D2).rate;
}

/// Doubly symmetric binary pair with crossover p, Hamming distortion:
/// max{H(p) - H(D1), H(p) - H(D2)} for D1, D2 <= p.
inline RatePoint dsbs_compdel(double p, double D1, double D2) {
  if (!(p >= 0.0 && p <= 0.5)) throw DomainError("dsbs_compdel_rate: crossover must lie in [0, 1/2]");
  if (!(D1 >= 0.0 && D1 <= p)) throw DomainError("dsbs_compdel_rate: need 0 <= D1 <= p");
  if (!(D2 >= 0.0 && D2 <= p)) throw DomainError("dsbs_compdel_rate: need 0 <= D2 <= p");
  RatePoint r;
  const double hp = binary_entropy(p);
  const double t1 = hp - binary_entropy(D1);
  const double t2 = hp - binary_entropy(D2);
  r.rate = std::max(t1, t2);
  r.distortions = {D1, D2};
  r.details["decoder1_term"] = t1;
  r.details["decoder2_term"] = t2;
  return r;
}

inline double dsbs_compdel_rate(double p, double D1, double D2) { return dsbs_compdel(p, D1, D2).rate; }

}  // namespace action_rdc
