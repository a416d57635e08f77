#pragma once

#include <optional>
#include <vector>

#include "oqp/arrival.hpp"
#include "oqp/channel.hpp"
#include "oqp/delay_exponent.hpp"

namespace oqp {

// Joint choice of multiplexing gain and coding duration that balances the
// channel-error and delay-violation exponents, plus the closed-form
// integer-relaxed approximations.

// Outcome of the balance bisection on h(r) = gamma*I(r,T) - d_ch(r,T) over
// (lambda, r_max). The bracket [lo, hi] retains opposite signs of h so the
// caller can audit the crossing.
struct CrossingResult {
    double r;
    double lo, hi;
    double h_lo, h_hi;
};

CrossingResult solve_balance(const ArrivalModel& model, const ChannelModel& channel,
                             double gamma, int T, int D, bool use_relaxed_I);

// Smallest r in (lambda, r_max) where gamma*I(r,T) meets d_ch(r,T).
// Raises NoCrossing when the endpoints do not straddle zero.
double r_star_of_T(const ArrivalModel& model, const ChannelModel& channel,
                   double gamma, int T, int D, bool use_relaxed_I);

struct PerTRow {
    int T;
    double r_star;   // balance point at this duration
    double gamma_I;  // gamma * I(r_star, T)
    double d_ch;     // channel exponent at (r_star, T)
};

// Unrounded approximations from the closed forms (or from the relaxed-I
// integer optimizer when no closed form applies). For the cooperative
// channel v_ir carries the fractional relay count and t_ir = 2*(v_ir+1).
struct RelaxedSummary {
    double d_ir;
    double r_ir;
    double t_ir;
    std::optional<double> v_ir;
};

struct OptimizationResult {
    ScalingRegime regime;
    double d_star = std::numeric_limits<double>::quiet_NaN();
    double r_star = std::numeric_limits<double>::quiet_NaN();
    int t_star = 0;
    std::optional<int> v_star;  // cooperative channels only
    std::vector<PerTRow> per_t_table;
    std::optional<RelaxedSummary> relaxed;
    std::optional<double> case_bound;  // sub/superlinear upper bounds
};

// Balanced-regime optimum: runs the balance bisection at every admissible
// coding duration, keeps the duration maximizing I(r_star(T), T) (ties to
// the smallest T), and reports d_star = d_ch at that point. Cooperative
// channels sweep the relay count 1..v with T = 2*(v'+1) filtered by the
// delay bound. `restrict_T` narrows the duration set (e.g. a fixed T).
OptimizationResult optimize_case1(const ArrivalModel& model, const ChannelModel& channel,
                                  double gamma, int D, bool use_relaxed_I,
                                  std::optional<int> restrict_T = std::nullopt);

// SISO closed forms:
//   t_ir = clamp((1/(1+1/sqrt(2mu))) * (D+1)/2, 1, floor(D/2))
//   r_ir = clamp(lambda + (1-lambda)/(1+sqrt(2mu)), r*(1), r*(floor(D/2)))
//   d_ir = t_ir * (1 - r_ir)
RelaxedSummary siso_closed_forms(double lambda, double mu, int D);

// Balance point for fixed T at the SISO tradeoff:
//   lambda + (1-lambda) / (1 + mu*(D+1-2T)/T).
double siso_r_ir_of_T(double lambda, double mu, int T, int D);

// Cooperative closed forms: v_ir = clamp((D+1)/(4*(1+1/sqrt(2mu))) - 1, 1, v),
// r_ir = 1/2 - (1/2-lambda)/(1+1/sqrt(2mu)), d_ir = (v_ir+1)*(1-2*r_ir).
RelaxedSummary coop_closed_forms(double lambda, double mu, int D, int v_available);

// 2x2 MIMO with T = 2: solution of d_ch(r) = mu*(r-lambda)*(D-3) on the
// piecewise tradeoff through (0,4), (1,1), (2,0):
//   lambda + (2-lambda)/(1+mu*(D-3))   for lambda >= 1 - 1/(mu*(D-3)),
//   lambda + (4-3*lambda)/(3+mu*(D-3)) otherwise.
double mimo22_r_ir(double lambda, double mu, int D);

// Upper bounds for the unbalanced regimes: Sublinear takes the delay-side
// bound max_T I(r_max, T); Superlinear the channel-side bound
// d_ch(lambda, floor(D/2)). The bound lands in case_bound; it is an upper
// bound, not an achieved optimum.
OptimizationResult classify_and_bound(const ArrivalModel& model, const ChannelModel& channel,
                                      const ScalingRegime& regime, int D);

// Decay exponent of the total bit-error probability at a specific operating
// point: min(gamma * I_exact(r,T), d_ch(r,T)).
double p_tot_exponent(const ArrivalModel& model, const ChannelModel& channel,
                      double gamma, double r, int T, int D);

}  // namespace oqp
