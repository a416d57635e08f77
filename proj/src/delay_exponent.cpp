#include "oqp/delay_exponent.hpp"

#include <algorithm>
#include <cmath>

namespace oqp {

namespace {

struct ScanBest {
    double val = kInf;
    std::int64_t t = 0;
};

}  // namespace

ExponentResult exponent_exact(const ArrivalModel& model, const ExponentQuery& q) {
    double lambda = model.mean_rate();
    if (q.T < 1 || q.D < 2 || q.T > q.D / 2)
        throw Error(ErrorKind::DomainError, "coding duration outside {1, ..., floor(D/2)}");
    if (!(q.r > lambda))
        throw Error(ErrorKind::Unstable, "exponent requires r > lambda");

    const int k = q.D % q.T;
    const double base = static_cast<double>(q.T - 1 - k);  // m(t) = t*T + base
    const double c = (q.D + 1 - 2 * q.T) * q.r;            // > 0 within the admissible set

    auto f = [&](std::int64_t t) -> double {
        double m = static_cast<double>(t) * q.T + base;
        double v = conjugate(model, q.r + c / m);
        if (std::isinf(v)) return kInf;
        return m * v;
    };

    const std::int64_t t0 = base > 0.0 ? 0 : 1;
    const double cap_raw = 10.0 * (q.D + 1) * std::max(1.0, 1.0 / (q.r - lambda));
    const std::int64_t cap = t0 + static_cast<std::int64_t>(std::min(cap_raw, 4.0e18));

    ScanBest best;
    auto consider = [&](std::int64_t t, double v) {
        if (v < best.val) {
            best.val = v;
            best.t = t;
        }
    };

    // Unit scan with the 3-consecutive-increase stop. The continuous
    // relaxation of the objective is convex in t, so the integer sequence is
    // unimodal; the hysteresis only guards rounding noise around the minimum.
    const int kUnitBudget = 256;
    std::int64_t t = t0;
    int consecutive_up = 0;
    bool any_increase = false;
    bool done = false;
    double prev = kInf;
    for (int step = 0; step < kUnitBudget && t <= cap; ++step, ++t) {
        double v = f(t);
        consider(t, v);
        if (step > 0 && v > prev) {
            any_increase = true;
            if (++consecutive_up >= 3) {
                done = true;
                ++t;
                break;
            }
        } else {
            consecutive_up = 0;
        }
        prev = v;
    }

    if (!done && t > cap) {
        if (!any_increase)
            throw Error(ErrorKind::ScanCapExceeded,
                        "exponent scan still descending at its iteration cap");
        done = true;
    }

    if (!done) {
        // Far-out minimizer: bracket it by doubling, then shrink the bracket
        // with integer ternary search. Unimodality makes both steps exact up
        // to the final unit sweep.
        std::int64_t lo = best.t;
        std::int64_t hi = t - 1;
        for (;;) {
            std::int64_t next = hi <= cap / 2 ? hi * 2 : cap;
            if (next <= hi) {
                if (!any_increase)
                    throw Error(ErrorKind::ScanCapExceeded,
                                "exponent scan still descending at its iteration cap");
                break;
            }
            double v = f(next);
            if (v < best.val) {
                consider(next, v);
                lo = hi;
                hi = next;
                if (next == cap)
                    throw Error(ErrorKind::ScanCapExceeded,
                                "exponent scan still descending at its iteration cap");
            } else {
                any_increase = any_increase || v > best.val;
                hi = next;
                break;
            }
        }
        std::int64_t a = lo, b = hi;
        while (b - a > 8) {
            std::int64_t m1 = a + (b - a) / 3;
            std::int64_t m2 = b - (b - a) / 3;
            if (f(m1) <= f(m2)) {
                b = m2;
            } else {
                a = m1;
            }
        }
        for (std::int64_t tt = a; tt <= b; ++tt) consider(tt, f(tt));
    }

    ExponentResult result;
    result.i_exact = best.val;
    result.t_argmin = best.t;
    result.i_relaxed = exponent_relaxed(model, q.r, q.T, q.D);
    result.k = k;
    return result;
}

double exponent_relaxed(const ArrivalModel& model, double r, int T, int D) {
    if (T < 1 || D < 1 || D + 1 - 2 * T < 0)
        throw Error(ErrorKind::DomainError, "relaxed exponent requires 1 <= T <= (D+1)/2");
    if (!(r > model.mean_rate()))
        throw Error(ErrorKind::Unstable, "exponent requires r > lambda");
    int slack = D + 1 - 2 * T;
    if (slack == 0) return 0.0;  // avoids 0 * inf for unbounded delta_r
    return delta_r(model, r) * r * static_cast<double>(slack);
}

}  // namespace oqp
