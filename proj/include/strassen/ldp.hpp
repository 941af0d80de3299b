#pragma once

#include <span>
#include <vector>

#include "strassen/measures.hpp"
#include "strassen/parallel.hpp"
#include "strassen/transport.hpp"

namespace strassen {

struct RateQuery {
  Dist p_x;
  Dist p_y;
  CostMatrix c;
  double alpha = 0.0;
};

struct RateOptions {
  int directions = 360;  ///< angular samples per 2-d tangent circle (rate_g)
  int scan = 64;         ///< coarse points per ray before bisection (rate_g)
  Exec exec = Exec::parallel;
};

struct RateResult {
  double value = 0.0;
  bool stalled = false;  ///< some inner convex solve missed its tolerance
};

inline constexpr std::size_t kMaxRateFAlphabet = 4;
inline constexpr std::size_t kMaxRateGAlphabet = 3;

/// Bernoulli divergence D(Bern(p) ‖ Bern(q)).
double kl_bernoulli(double p, double q);

/// min ⟨π, c⟩ over joint π whose marginals lie in the KL balls of radius r
/// around p_x and p_y.
RateResult min_cost_in_kl_balls(const Dist& p_x, const Dist& p_y, const CostMatrix& c, double r);

/// min E(q, Q_Y) over Q_Y with D(Q_Y ‖ p_y) ≤ r.
RateResult min_cost_given_row(std::span<const double> q, const Dist& p_y, const CostMatrix& c, double r);

/// Lower-tail rate: inf max{D(Q_X‖P_X), D(Q_Y‖P_Y)} over E(Q_X,Q_Y) ≤ α.
RateResult rate_f_result(const RateQuery& q, const RateOptions& opt = {});
double rate_f(const RateQuery& q, const RateOptions& opt = {});

/// Binary Hamming lower-tail rate, Bern(a) vs Bern(b), a ≤ b.
double rate_f_binary(double a, double b, double alpha);

/// One orientation of the upper-tail rate: inf D(Q_X‖P_X) over Q_X with
/// h(Q_X) > α, h(Q_X) = min{E(Q_X,Q_Y) : D(Q_Y‖P_Y) ≤ D(Q_X‖P_X)}.
RateResult rate_g_oriented(const Dist& p_x, const Dist& p_y, const CostMatrix& c, double alpha,
                           const RateOptions& opt = {});

/// Upper-tail rate: min of both orientations.
RateResult rate_g_result(const RateQuery& q, const RateOptions& opt = {});
double rate_g(const RateQuery& q, const RateOptions& opt = {});

/// Binary Hamming upper-tail rate, min{D(a*‖a), D(b*‖b)}.
double rate_g_binary(double a, double b, double alpha);

}  // namespace strassen
