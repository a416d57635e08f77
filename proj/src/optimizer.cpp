#include "oqp/optimizer.hpp"

#include <algorithm>
#include <cmath>

namespace oqp {

namespace {

double clamp(double x, double lo, double hi) { return std::max(lo, std::min(hi, x)); }

double exponent_at(const ArrivalModel& model, double r, int T, int D, bool use_relaxed_I) {
    if (use_relaxed_I) return exponent_relaxed(model, r, T, D);
    return exponent_exact(model, ExponentQuery{r, T, D}).i_exact;
}

}  // namespace

CrossingResult solve_balance(const ArrivalModel& model, const ChannelModel& channel,
                             double gamma, int T, int D, bool use_relaxed_I) {
    const double lambda = model.mean_rate();
    const double rmax = r_max(channel);
    if (!(lambda < rmax))
        throw Error(ErrorKind::Unstable, "mean rate must stay below r_max");
    if (!(gamma > 0.0)) throw Error(ErrorKind::DomainError, "gamma must be positive");

    auto h = [&](double r) {
        return gamma * exponent_at(model, r, T, D, use_relaxed_I) - d_ch(channel, r, T);
    };

    // Hug the endpoints: the delay exponent vanishes at lambda+ and the
    // channel exponent at r_max-, so any crossing lives strictly inside.
    const double span = rmax - lambda;
    double lo = lambda + std::max(4e-16 * std::max(1.0, std::fabs(lambda)), 1e-18 * span);
    double hi = rmax - std::max(4e-16 * std::max(1.0, rmax), 1e-18 * span);
    if (!(lo < hi)) throw Error(ErrorKind::DomainError, "degenerate (lambda, r_max) interval");

    double h_lo = h(lo);
    double h_hi = h(hi);
    if (!(h_lo < 0.0) || !(h_hi > 0.0))
        throw Error(ErrorKind::NoCrossing,
                    "gamma*I - d_ch does not change sign over (lambda, r_max)");

    const double tol = 1e-13 * std::max(1.0, rmax);
    for (int iter = 0; iter < 200 && hi - lo > tol; ++iter) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        double hm = h(mid);
        if (hm < 0.0) {
            lo = mid;
            h_lo = hm;
        } else {
            hi = mid;
            h_hi = hm;
        }
    }
    return CrossingResult{hi, lo, hi, h_lo, h_hi};
}

double r_star_of_T(const ArrivalModel& model, const ChannelModel& channel, double gamma, int T,
                   int D, bool use_relaxed_I) {
    return solve_balance(model, channel, gamma, T, D, use_relaxed_I).r;
}

double siso_r_ir_of_T(double lambda, double mu, int T, int D) {
    return lambda + (1.0 - lambda) / (1.0 + mu * (D + 1 - 2 * T) / static_cast<double>(T));
}

RelaxedSummary siso_closed_forms(double lambda, double mu, int D) {
    if (!(lambda > 0.0 && lambda < 1.0) || !(mu > 0.0) || D < 2)
        throw Error(ErrorKind::DomainError, "SISO closed forms need 0 < lambda < 1, mu > 0, D >= 2");
    const int half = D / 2;
    const double s = std::sqrt(2.0 * mu);
    double t_ir = clamp((1.0 / (1.0 + 1.0 / s)) * (D + 1) / 2.0, 1.0, static_cast<double>(half));
    double r_lo = siso_r_ir_of_T(lambda, mu, 1, D);
    double r_hi = siso_r_ir_of_T(lambda, mu, half, D);
    double r_ir = clamp(lambda + (1.0 - lambda) / (1.0 + s), r_lo, r_hi);
    return RelaxedSummary{t_ir * (1.0 - r_ir), r_ir, t_ir, std::nullopt};
}

RelaxedSummary coop_closed_forms(double lambda, double mu, int D, int v_available) {
    if (!(lambda > 0.0 && lambda < 0.5) || !(mu > 0.0) || D < 2 || v_available < 1)
        throw Error(ErrorKind::DomainError,
                    "cooperative closed forms need 0 < lambda < 1/2, mu > 0, D >= 2, v >= 1");
    const double s = std::sqrt(2.0 * mu);
    double v_ir = clamp((D + 1) / (4.0 * (1.0 + 1.0 / s)) - 1.0, 1.0,
                        static_cast<double>(v_available));
    double r_ir = 0.5 - (0.5 - lambda) / (1.0 + 1.0 / s);
    double d_ir = (v_ir + 1.0) * (1.0 - 2.0 * r_ir);
    return RelaxedSummary{d_ir, r_ir, 2.0 * (v_ir + 1.0), v_ir};
}

double mimo22_r_ir(double lambda, double mu, int D) {
    if (!(lambda > 0.0 && lambda < 2.0) || !(mu > 0.0) || D <= 3)
        throw Error(ErrorKind::DomainError, "2x2 MIMO form needs 0 < lambda < 2, mu > 0, D > 3");
    const double c = mu * (D - 3);
    if (lambda >= 1.0 - 1.0 / c) return lambda + (2.0 - lambda) / (1.0 + c);
    return lambda + (4.0 - 3.0 * lambda) / (3.0 + c);
}

OptimizationResult optimize_case1(const ArrivalModel& model, const ChannelModel& channel,
                                  double gamma, int D, bool use_relaxed_I,
                                  std::optional<int> restrict_T) {
    OptimizationResult result;
    result.regime = LinearGamma{gamma};

    const bool coop = channel.is<CoopOAF>();
    const int half = D / 2;

    // Candidate durations; for the cooperative channel each candidate is a
    // cluster size v' with its pinned duration 2*(v'+1).
    struct Candidate {
        int T;
        int v;  // -1 outside the cooperative sweep
    };
    std::vector<Candidate> candidates;
    if (coop) {
        if (D < 2) throw Error(ErrorKind::DomainError, "delay bound must be at least 2 slots");
        int v_avail = channel.as<CoopOAF>().relays;
        for (int v = 1; v <= v_avail; ++v) {
            int T = 2 * (v + 1);
            if (T > half) break;
            if (restrict_T && *restrict_T != T) continue;
            candidates.push_back({T, v});
        }
    } else {
        for (int T : admissible_T(channel, D)) {
            if (restrict_T && *restrict_T != T) continue;
            candidates.push_back({T, -1});
        }
    }
    if (candidates.empty())
        throw Error(ErrorKind::EmptyAdmissibleSet, "no admissible coding duration to optimize");

    double best_I = -kInf;
    size_t best_idx = 0;
    std::vector<double> i_values;
    i_values.reserve(candidates.size());
    for (size_t idx = 0; idx < candidates.size(); ++idx) {
        const Candidate& cand = candidates[idx];
        ChannelModel ch = coop ? ChannelModel::coop_oaf(cand.v) : channel;
        CrossingResult cr = solve_balance(model, ch, gamma, cand.T, D, use_relaxed_I);
        double I_val = exponent_at(model, cr.r, cand.T, D, use_relaxed_I);
        double dch = d_ch(ch, cr.r, cand.T);
        result.per_t_table.push_back(PerTRow{cand.T, cr.r, gamma * I_val, dch});
        i_values.push_back(I_val);
        if (I_val > best_I) {  // ties keep the smallest duration
            best_I = I_val;
            best_idx = idx;
        }
    }

    const Candidate& star = candidates[best_idx];
    result.t_star = star.T;
    if (coop) result.v_star = star.v;
    result.r_star = result.per_t_table[best_idx].r_star;
    result.d_star = result.per_t_table[best_idx].d_ch;

    // Closed-form integer-relaxed companions where the model admits them;
    // otherwise fall back to the relaxed-I integer optimum.
    if (model.is_cpe()) {
        const Cpe& cp = model.as_cpe();
        if (channel.is<SisoFastFading>() && cp.lambda < 1.0) {
            result.relaxed = siso_closed_forms(cp.lambda, cp.mu, D);
        } else if (coop && cp.lambda < 0.5) {
            result.relaxed = coop_closed_forms(cp.lambda, cp.mu, D, channel.as<CoopOAF>().relays);
        } else if (channel.is<MimoQuasiStatic>() && star.T == 2 && D > 3 &&
                   channel.as<MimoQuasiStatic>().n_t == 2 &&
                   channel.as<MimoQuasiStatic>().n_r == 2 && cp.lambda < 2.0) {
            double r_ir = mimo22_r_ir(cp.lambda, cp.mu, D);
            result.relaxed = RelaxedSummary{d_ch(channel, r_ir, 2), r_ir, 2.0, std::nullopt};
        }
    }
    if (!result.relaxed) {
        if (use_relaxed_I) {
            result.relaxed = RelaxedSummary{result.d_star, result.r_star,
                                            static_cast<double>(result.t_star),
                                            result.v_star ? std::optional<double>(*result.v_star)
                                                          : std::nullopt};
        } else {
            OptimizationResult rel = optimize_case1(model, channel, gamma, D, true, restrict_T);
            result.relaxed = RelaxedSummary{rel.d_star, rel.r_star,
                                            static_cast<double>(rel.t_star),
                                            rel.v_star ? std::optional<double>(*rel.v_star)
                                                       : std::nullopt};
        }
    }
    return result;
}

OptimizationResult classify_and_bound(const ArrivalModel& model, const ChannelModel& channel,
                                      const ScalingRegime& regime, int D) {
    if (std::holds_alternative<LinearGamma>(regime))
        throw Error(ErrorKind::DomainError,
                    "linear-regime classification is the balanced optimization; call optimize_case1");

    OptimizationResult result;
    result.regime = regime;
    const double lambda = model.mean_rate();
    const double rmax = r_max(channel);
    if (!(lambda < rmax)) throw Error(ErrorKind::Unstable, "mean rate must stay below r_max");

    std::vector<int> Ts = admissible_T(channel, D);
    if (std::holds_alternative<Sublinear>(regime)) {
        // Delay violations dominate: the best any (r, T) can do is bounded by
        // the delay exponent at the highest usable rate.
        double bound = -kInf;
        for (int T : Ts)
            bound = std::max(bound, exponent_exact(model, ExponentQuery{rmax, T, D}).i_exact);
        result.case_bound = bound;
    } else {
        // Channel errors dominate: bounded by the channel exponent at the
        // lowest usable rate and the longest admissible code.
        result.case_bound = d_ch(channel, lambda, Ts.back());
    }
    return result;
}

double p_tot_exponent(const ArrivalModel& model, const ChannelModel& channel, double gamma,
                      double r, int T, int D) {
    const double lambda = model.mean_rate();
    const double rmax = r_max(channel);
    if (!(r > lambda && r < rmax))
        throw Error(ErrorKind::DomainError, "operating point needs lambda < r < r_max");
    std::vector<int> Ts = admissible_T(channel, D);
    if (std::find(Ts.begin(), Ts.end(), T) == Ts.end())
        throw Error(ErrorKind::DomainError, "coding duration not admissible for this channel/D");
    double I_val = exponent_exact(model, ExponentQuery{r, T, D}).i_exact;
    return std::min(gamma * I_val, d_ch(channel, r, T));
}

}  // namespace oqp
