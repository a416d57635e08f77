#include "oqp/arrival.hpp"

#include <algorithm>
#include <cmath>

namespace oqp {

namespace {

// theta*x - logmgf(theta), the concave objective of the conjugate. A +inf
// log-MGF value maps to -inf so the maximizer never lands there.
double conjugate_objective(const CustomLogMgf& m, double theta, double x) {
    double v = m.logmgf(theta);
    if (std::isinf(v) && v > 0) return -kInf;
    return theta * x - v;
}

struct ExpandResult {
    double edge;
    bool diverged;
};

// Doubles `edge` away from the origin while the objective keeps improving.
// Concavity means the first non-improving step brackets the maximizer.
// Gains that keep growing under doubling signal at-least-linear growth, so
// the sup is +inf; gains that shrink geometrically approach a finite limit
// and eventually underflow, which brackets the edge.
template <class F>
ExpandResult expand_edge(F&& phi, double start, double* best) {
    double edge = start;
    double prev_val = phi(edge);
    *best = std::max(*best, prev_val);
    double prev_gain = -1.0;
    double ratio = 0.0;
    for (int i = 0; i < 140; ++i) {
        double cand = edge * 2.0;
        double v = phi(cand);
        *best = std::max(*best, v);
        if (v <= prev_val) return {cand, false};
        double gain = v - prev_val;
        if (prev_gain > 0.0) {
            ratio = gain / prev_gain;
            if (i > 30 && ratio > 1.6) return {cand, true};
        }
        prev_gain = gain;
        prev_val = v;
        edge = cand;
    }
    return {edge, ratio >= 0.75};  // exhausted: near-linear growth means divergence
}

// Numeric sup over theta of theta*x - logmgf(theta), golden section after
// bracketing, 1e-10 absolute tolerance in theta. Tracks the best value seen
// at every evaluation, which also covers suprema attained in the limit at a
// bracket edge.
double conjugate_numeric(const CustomLogMgf& m, double x) {
    const double tol = 1e-10;
    auto phi = [&](double th) { return conjugate_objective(m, th, x); };

    double best = phi(0.0);  // logmgf(0) == 0, so best >= 0

    double right;
    if (std::isfinite(m.theta_sup)) {
        right = m.theta_sup;
        best = std::max(best, phi(right));
    } else {
        ExpandResult er = expand_edge(phi, 1.0, &best);
        if (er.diverged) return kInf;
        right = er.edge;
    }

    ExpandResult el = expand_edge(phi, -1.0, &best);
    if (el.diverged) return kInf;
    double left = el.edge;

    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = left, b = right;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = phi(c), fd = phi(d);
    best = std::max({best, fc, fd});
    int guard = 0;
    while (b - a > tol && guard++ < 800) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = phi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = phi(d);
        }
        best = std::max({best, fc, fd});
    }
    return best;
}

// theta*r - logmgf(theta); positive between 0 and delta_r, negative beyond.
double stability_gap(const CustomLogMgf& m, double theta, double r) {
    double v = m.logmgf(theta);
    if (std::isinf(v) && v > 0) return -kInf;
    return theta * r - v;
}

double delta_r_numeric(const CustomLogMgf& m, double r) {
    const double tol = 1e-10;
    double hi = std::isfinite(m.theta_sup) ? std::min(1.0, m.theta_sup / 2.0) : 1.0;

    // Grow hi until the gap turns non-positive or the finiteness domain ends.
    int guard = 0;
    while (stability_gap(m, hi, r) > 0.0) {
        if (++guard > 400) return m.theta_sup;  // positive throughout
        if (std::isfinite(m.theta_sup)) {
            double next = std::min(hi * 2.0, 0.5 * (hi + m.theta_sup));
            if (m.theta_sup - next < 1e-14 * std::max(1.0, m.theta_sup)) return m.theta_sup;
            hi = next;
        } else {
            hi *= 2.0;
            if (hi > 1e100) return m.theta_sup;
        }
    }

    double lo = 1e-12;
    if (stability_gap(m, lo, r) <= 0.0) return lo;
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (stability_gap(m, mid, r) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

ArrivalModel ArrivalModel::cpe(double lambda, double mu) {
    if (!(lambda > 0.0)) throw Error(ErrorKind::DomainError, "CPE requires lambda > 0");
    if (!(mu > 0.0)) throw Error(ErrorKind::DomainError, "CPE requires mu > 0");
    return ArrivalModel(Cpe{lambda, mu});
}

ArrivalModel ArrivalModel::custom(double lambda, double theta_sup,
                                  std::function<double(double)> logmgf) {
    if (!(lambda > 0.0)) throw Error(ErrorKind::DomainError, "custom model requires lambda > 0");
    if (!(theta_sup > 0.0))
        throw Error(ErrorKind::DomainError, "custom model requires theta_sup > 0");
    if (!logmgf) throw Error(ErrorKind::DomainError, "custom model requires a log-MGF");

    double at0 = logmgf(0.0);
    if (!(std::fabs(at0) <= 1e-12))
        throw Error(ErrorKind::DomainError, "log-MGF must vanish at theta = 0");

    const double h = 1e-6;
    double up = logmgf(h), down = logmgf(-h);
    if (!std::isfinite(up) || !std::isfinite(down))
        throw Error(ErrorKind::DomainError, "log-MGF must be finite near the origin");
    double slope = (up - down) / (2.0 * h);
    if (!(std::fabs(slope - lambda) <= 1e-4 * std::fabs(lambda)))
        throw Error(ErrorKind::DomainError, "log-MGF derivative at 0 must equal lambda");
    if (up + down - 2.0 * at0 < -1e-12)
        throw Error(ErrorKind::DomainError, "log-MGF must be locally convex at 0");

    return ArrivalModel(CustomLogMgf{lambda, theta_sup, std::move(logmgf)});
}

double ArrivalModel::mean_rate() const {
    if (is_cpe()) return as_cpe().lambda;
    return as_custom().lambda;
}

double log_mgf(const ArrivalModel& model, double theta) {
    if (model.is_cpe()) {
        const Cpe& c = model.as_cpe();
        if (theta < c.mu) return c.mu * c.lambda * theta / (c.mu - theta);
        return kInf;
    }
    return model.as_custom().logmgf(theta);
}

double conjugate(const ArrivalModel& model, double x) {
    if (model.is_cpe()) {
        const Cpe& c = model.as_cpe();
        if (x < 0.0) throw Error(ErrorKind::DomainError, "CPE conjugate requires x >= 0");
        double d = std::sqrt(x) - std::sqrt(c.lambda);
        return c.mu * d * d;
    }
    return conjugate_numeric(model.as_custom(), x);
}

double delta_r(const ArrivalModel& model, double r) {
    double lambda = model.mean_rate();
    if (!(r > lambda))
        throw Error(ErrorKind::DomainError, "delta_r requires r > lambda (stable queue)");
    if (model.is_cpe()) {
        const Cpe& c = model.as_cpe();
        return c.mu * (1.0 - c.lambda / r);
    }
    return delta_r_numeric(model.as_custom(), r);
}

double burstiness(const ArrivalModel& model, double g_of_N) {
    if (!model.is_cpe())
        throw Error(ErrorKind::UnsupportedModel, "burstiness needs CPE second-moment data");
    if (!(g_of_N > 0.0)) throw Error(ErrorKind::DomainError, "burstiness requires g(N) > 0");
    const Cpe& c = model.as_cpe();
    return std::sqrt(2.0 / (c.lambda * c.mu * g_of_N));
}

}  // namespace oqp
