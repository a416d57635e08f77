#pragma once

#include <cstdint>
#include <vector>

#include "oqp/arrival.hpp"

namespace oqp {

// Discrete-time Monte Carlo simulator of the batch-service queue, plus an
// exact Markov-chain oracle for integer-valued arrival instances.
//
// Queue recursion per slot t (service at multiples of T):
//   Q_t = max(Q_{t-1} + A_t - R*T, 0)  when t mod T == 0,
//   Q_t = Q_{t-1} + A_t                otherwise.
// The last bit arriving at phase i violates the delay bound D iff
//   T - i + ceil(Q_i / (R*T)) * T > D.

struct SimConfig {
    ArrivalModel model;       // CPE only for the Monte Carlo path
    double N;                 // capacity scale (log SNR)
    double g_of_N;            // source scaling evaluated at N
    double r;                 // multiplexing gain (> lambda)
    int T;                    // coding duration, in {1, ..., floor(D/2)}
    int D;                    // delay bound
    std::int64_t warmup_slots;
    std::int64_t measure_slots;  // multiple of T
    std::uint64_t seed;
    int replications;            // replication j runs on seed ^ j
};

struct SimReport {
    double p_delay_hat;
    double ci95_half_width;
    double empirical_exponent;                // -log(p_delay_hat) / g_of_N
    double predicted_exponent;                // I(r, T) from the exact exponent
    std::vector<double> per_phase_violation;  // last-bit violation frequency per phase
    std::int64_t slots_observed;
};

// Workload left after one slot of queue evolution.
double queue_step(double workload, double arrivals, double service_batch, bool service_slot);

// Last-bit delay-violation test at the given phase.
bool last_bit_violates(double workload, int phase, int T, int D, double service_batch);

// Monte Carlo estimate of the delay-violation probability. Per slot the CPE
// source draws a Poisson(mu*lambda*g_of_N) packet count with Exponential
// (mean N/(mu*g_of_N)) packet sizes; the workload is real-valued. Violations
// are recorded on slots with at least one arrival via the last-bit test, and
// p_delay_hat averages the per-phase violation frequencies. The 95% interval
// comes from the normal approximation over replication means. Byte-identical
// output for identical configs: replication j uses SplitMix64(seed ^ j) and
// aggregation is ordered by replication index.
SimReport simulate(const SimConfig& config);

// Integer arrival distribution: probs[a] = P(A = a), finite support.
struct DiscretePmf {
    std::vector<double> probs;

    double mean() const;
    double p_positive() const;
};

struct DiscreteSimConfig {
    DiscretePmf pmf;
    std::int64_t R;  // service bits per slot (batch R*T every T slots)
    int T;
    int D;
    std::int64_t warmup_slots;
    std::int64_t measure_slots;
    std::uint64_t seed;
    int replications;
};

// Monte Carlo with integer arrivals from a pmf; same estimator as simulate().
// empirical/predicted exponents are not meaningful here and are reported NaN.
SimReport simulate_discrete(const DiscreteSimConfig& config);

// Exact stationary delay-violation probability for integer arrivals: iterates
// the distribution of Q over the T-periodic recursion on {0, ..., q_cap}
// until the total-variation change per period drops below 1e-12, then
// evaluates the arrival-conditioned last-bit violation per phase. Raises
// CapTooSmall when more than 1e-12 probability mass leaks past q_cap in a
// period.
double exact_discrete_oracle(const DiscretePmf& pmf, std::int64_t R, int T, int D,
                             std::int64_t q_cap);

// Empirical check of the reduction from delay violation to the queue-length
// tail at phase T-1-k. Collected on the same sample paths as simulate():
//   sum_side      = sum over phases of the unconditional violation frequency,
//   overflow_side = frequency of Q_{T-1-k} > (D-T-k)*R,
// whose ratio lands in [1, T] up to sampling noise. Also reports a
// random-bit violation estimate alongside the last-bit one.
struct Lemma3Report {
    int k;
    std::vector<double> thresholds;        // per-phase queue-length thresholds
    std::vector<double> phase_exceedance;  // unconditional exceedance frequency per phase
    double sum_side;
    double overflow_side;
    double ratio;
    double p_delay_hat;      // last-bit, arrival-weighted (same as simulate)
    double p_random_bit;     // random-bit variant, for comparison only
};

Lemma3Report lemma3_check(const SimConfig& config);

}  // namespace oqp
