#pragma once

#include <cstdint>

#include "oqp/arrival.hpp"

namespace oqp {

// Decay exponent of the delay-violation probability for a queue drained by
// batches of r*N*T bits every T slots under delay bound D.

struct ExponentQuery {
    double r;  // multiplexing gain, must exceed the model's mean rate
    int T;     // coding duration in slots, within {1, ..., floor(D/2)}
    int D;     // delay bound in slots
};

struct ExponentResult {
    double i_exact;         // minimum over integer batch counts (may be +inf)
    std::int64_t t_argmin;  // minimizing batch index
    double i_relaxed;       // integer-relaxed lower bound delta_r * r * (D+1-2T)
    int k;                  // residue D mod T
};

// Exact exponent
//   min over integer t >= 0 with t*T+T-1-k > 0 of
//     (t*T+T-1-k) * conjugate(r + (D+1-2T)*r / (t*T+T-1-k)),
// k = D mod T. Terms whose conjugate is +inf are skipped. The continuous
// relaxation of the objective is convex in t, so its integer restriction is
// unimodal; the scan walks forward with a 3-consecutive-increase stop and a
// hard cap of 10*(D+1)*max(1, 1/(r - lambda)) steps, escalating to geometric
// bracketing plus integer ternary search when the minimizer is far out.
// Raises Unstable for r <= lambda, DomainError for T outside the admissible
// set, ScanCapExceeded if the cap binds while still descending.
ExponentResult exponent_exact(const ArrivalModel& model, const ExponentQuery& q);

// Integer-relaxed lower bound delta_r * r * (D+1-2T). Accepts any T with
// D+1-2T >= 0 (the half-bound endpoint yields exactly zero).
double exponent_relaxed(const ArrivalModel& model, double r, int T, int D);

}  // namespace oqp
