#include "oqp/queue_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oqp/delay_exponent.hpp"
#include "oqp/rng.hpp"

namespace oqp {

double queue_step(double workload, double arrivals, double service_batch, bool service_slot) {
    workload += arrivals;
    if (service_slot) workload = std::max(workload - service_batch, 0.0);
    return workload;
}

bool last_bit_violates(double workload, int phase, int T, int D, double service_batch) {
    return T - phase + std::ceil(workload / service_batch) * T > static_cast<double>(D);
}

double DiscretePmf::mean() const {
    double m = 0.0;
    for (size_t a = 0; a < probs.size(); ++a) m += static_cast<double>(a) * probs[a];
    return m;
}

double DiscretePmf::p_positive() const {
    return probs.empty() ? 0.0 : 1.0 - probs.front();
}

namespace {

struct PathStats {
    std::vector<std::int64_t> slots;
    std::vector<std::int64_t> arrival_slots;
    std::vector<std::int64_t> last_bit_viol;
    std::vector<std::int64_t> exceed;
    std::vector<std::int64_t> random_bit_viol;

    explicit PathStats(int T)
        : slots(T, 0), arrival_slots(T, 0), last_bit_viol(T, 0), exceed(T, 0),
          random_bit_viol(T, 0) {}

    void accumulate(const PathStats& other) {
        for (size_t i = 0; i < slots.size(); ++i) {
            slots[i] += other.slots[i];
            arrival_slots[i] += other.arrival_slots[i];
            last_bit_viol[i] += other.last_bit_viol[i];
            exceed[i] += other.exceed[i];
            random_bit_viol[i] += other.random_bit_viol[i];
        }
    }
};

std::vector<double> phase_thresholds(double R, int T, int D) {
    const int k = D % T;
    std::vector<double> th(T);
    for (int i = 0; i < T; ++i)
        th[i] = (i <= T - 1 - k) ? (D - T - k) * R : (D - k) * R;
    return th;
}

// One replication of the queue recursion; `extras` additionally collects the
// unconditional threshold-exceedance table and a random-bit violation count
// (one extra variate per arrival slot, so extras change the RNG stream).
template <class Draw>
void run_path(Draw&& draw, SplitMix64& rng, double R, int T, int D, std::int64_t warmup,
              std::int64_t measure, bool extras, PathStats& st) {
    const double batch = R * static_cast<double>(T);
    const std::vector<double> threshold = phase_thresholds(R, T, D);
    double q = 0.0;
    const std::int64_t total = warmup + measure;
    for (std::int64_t t = 0; t < total; ++t) {
        int phase = static_cast<int>(t % T);
        double a = draw(rng);
        double q_prev = q;
        q = queue_step(q, a, batch, phase == 0);
        if (t < warmup) continue;
        st.slots[phase]++;
        if (extras && q > threshold[phase]) st.exceed[phase]++;
        if (a > 0.0) {
            st.arrival_slots[phase]++;
            if (last_bit_violates(q, phase, T, D, batch)) st.last_bit_viol[phase]++;
            if (extras) {
                double u = 1.0 - rng.uniform01();  // bit position within the slot's batch
                double pos = q_prev + u * a - (phase == 0 ? batch : 0.0);
                if (last_bit_violates(std::max(pos, 0.0), phase, T, D, batch))
                    st.random_bit_viol[phase]++;
            }
        }
    }
}

double phase_averaged_p(const PathStats& st, int T,
                        const std::vector<std::int64_t>& viol) {
    double p = 0.0;
    for (int i = 0; i < T; ++i) {
        if (st.arrival_slots[i] > 0)
            p += static_cast<double>(viol[i]) / static_cast<double>(st.arrival_slots[i]);
    }
    return p / static_cast<double>(T);
}

struct McOutcome {
    PathStats total;
    std::vector<double> rep_p;

    explicit McOutcome(int T) : total(T) {}
};

template <class MakeDraw>
McOutcome run_replications(MakeDraw&& make_draw, std::uint64_t seed, int reps, double R, int T,
                           int D, std::int64_t warmup, std::int64_t measure, bool extras) {
    McOutcome out(T);
    for (int j = 0; j < reps; ++j) {
        SplitMix64 rng(seed ^ static_cast<std::uint64_t>(j));
        auto draw = make_draw();
        PathStats st(T);
        run_path(draw, rng, R, T, D, warmup, measure, extras, st);
        out.rep_p.push_back(phase_averaged_p(st, T, st.last_bit_viol));
        out.total.accumulate(st);
    }
    return out;
}

SimReport report_from(const McOutcome& mc, int T, double g_of_N, double predicted,
                      std::int64_t measure, int reps) {
    SimReport rep;
    double mean = std::accumulate(mc.rep_p.begin(), mc.rep_p.end(), 0.0) /
                  static_cast<double>(reps);
    rep.p_delay_hat = mean;
    if (reps >= 2) {
        double ss = 0.0;
        for (double p : mc.rep_p) ss += (p - mean) * (p - mean);
        double sd = std::sqrt(ss / static_cast<double>(reps - 1));
        rep.ci95_half_width = std::min(1.0, 1.96 * sd / std::sqrt(static_cast<double>(reps)));
    } else {
        rep.ci95_half_width = 1.0;  // single replication carries no interval information
    }
    rep.empirical_exponent = std::isnan(g_of_N) ? std::numeric_limits<double>::quiet_NaN()
                                                : -std::log(mean) / g_of_N;
    rep.predicted_exponent = predicted;
    rep.per_phase_violation.assign(T, 0.0);
    for (int i = 0; i < T; ++i) {
        if (mc.total.arrival_slots[i] > 0)
            rep.per_phase_violation[i] = static_cast<double>(mc.total.last_bit_viol[i]) /
                                         static_cast<double>(mc.total.arrival_slots[i]);
    }
    rep.slots_observed = measure * reps;
    return rep;
}

void validate_common(int T, int D, std::int64_t warmup, std::int64_t measure, int reps) {
    if (T < 1 || D < 2 || T > D / 2)
        throw Error(ErrorKind::DomainError, "coding duration outside {1, ..., floor(D/2)}");
    if (warmup < 0) throw Error(ErrorKind::DomainError, "warmup must be non-negative");
    if (measure <= 0 || measure % T != 0)
        throw Error(ErrorKind::DomainError, "measured slots must be a positive multiple of T");
    if (reps < 1) throw Error(ErrorKind::DomainError, "at least one replication required");
}

struct CpeDraw {
    double packet_rate;
    double mean_packet_size;

    double operator()(SplitMix64& rng) {
        std::int64_t packets = draw_poisson(rng, packet_rate);
        double sum = 0.0;
        for (std::int64_t i = 0; i < packets; ++i)
            sum += draw_exponential(rng, mean_packet_size);
        return sum;
    }
};

CpeDraw make_cpe_draw(const SimConfig& config) {
    const Cpe& c = config.model.as_cpe();
    return CpeDraw{c.mu * c.lambda * config.g_of_N, config.N / (c.mu * config.g_of_N)};
}

void validate_sim_config(const SimConfig& config) {
    if (!config.model.is_cpe())
        throw Error(ErrorKind::UnsupportedModel, "Monte Carlo path supports CPE sources only");
    if (!(config.N > 0.0) || !(config.g_of_N > 0.0))
        throw Error(ErrorKind::DomainError, "N and g(N) must be positive");
    if (!(config.r > config.model.mean_rate()))
        throw Error(ErrorKind::Unstable, "simulation requires r > lambda");
    validate_common(config.T, config.D, config.warmup_slots, config.measure_slots,
                    config.replications);
    if (!(config.r * config.N * config.T > 0.0))
        throw Error(ErrorKind::NonPositiveService, "service batch r*N*T must be positive");
}

struct PmfDraw {
    std::vector<double> cdf;

    double operator()(SplitMix64& rng) {
        double u = rng.uniform01();
        for (size_t a = 0; a < cdf.size(); ++a)
            if (u < cdf[a]) return static_cast<double>(a);
        return static_cast<double>(cdf.size() - 1);
    }
};

DiscretePmf normalized(const DiscretePmf& pmf) {
    if (pmf.probs.empty()) throw Error(ErrorKind::DomainError, "empty arrival pmf");
    double sum = 0.0;
    for (double p : pmf.probs) {
        if (!(p >= 0.0)) throw Error(ErrorKind::DomainError, "pmf entries must be non-negative");
        sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        throw Error(ErrorKind::DomainError, "pmf must sum to 1");
    DiscretePmf out = pmf;
    for (double& p : out.probs) p /= sum;
    return out;
}

}  // namespace

SimReport simulate(const SimConfig& config) {
    validate_sim_config(config);
    const double R = config.r * config.N;
    double predicted =
        exponent_exact(config.model, ExponentQuery{config.r, config.T, config.D}).i_exact;
    McOutcome mc = run_replications([&] { return make_cpe_draw(config); }, config.seed,
                                    config.replications, R, config.T, config.D,
                                    config.warmup_slots, config.measure_slots, false);
    return report_from(mc, config.T, config.g_of_N, predicted, config.measure_slots,
                       config.replications);
}

SimReport simulate_discrete(const DiscreteSimConfig& config) {
    DiscretePmf pmf = normalized(config.pmf);
    if (config.R < 1) throw Error(ErrorKind::NonPositiveService, "service rate R must be >= 1");
    if (!(pmf.mean() < static_cast<double>(config.R)))
        throw Error(ErrorKind::Unstable, "pmf mean must stay below R");
    validate_common(config.T, config.D, config.warmup_slots, config.measure_slots,
                    config.replications);

    PmfDraw proto;
    proto.cdf.resize(pmf.probs.size());
    double acc = 0.0;
    for (size_t a = 0; a < pmf.probs.size(); ++a) {
        acc += pmf.probs[a];
        proto.cdf[a] = acc;
    }
    McOutcome mc = run_replications([&] { return proto; }, config.seed, config.replications,
                                    static_cast<double>(config.R), config.T, config.D,
                                    config.warmup_slots, config.measure_slots, false);
    return report_from(mc, config.T, std::numeric_limits<double>::quiet_NaN(),
                       std::numeric_limits<double>::quiet_NaN(), config.measure_slots,
                       config.replications);
}

double exact_discrete_oracle(const DiscretePmf& pmf_in, std::int64_t R, int T, int D,
                             std::int64_t q_cap) {
    DiscretePmf pmf = normalized(pmf_in);
    if (R < 1) throw Error(ErrorKind::NonPositiveService, "service rate R must be >= 1");
    if (T < 1 || D < 2 || T > D / 2)
        throw Error(ErrorKind::DomainError, "coding duration outside {1, ..., floor(D/2)}");
    if (!(pmf.mean() < static_cast<double>(R)))
        throw Error(ErrorKind::Unstable, "pmf mean must stay below R");
    const std::int64_t batch = R * T;
    if (q_cap < batch) throw Error(ErrorKind::CapTooSmall, "q_cap below one service batch");

    const double p_arrival = pmf.p_positive();
    if (p_arrival == 0.0) return 0.0;

    const size_t L = static_cast<size_t>(q_cap) + 1;
    const size_t amax = pmf.probs.size() - 1;
    std::vector<double> pi(L, 0.0), work(L, 0.0);
    pi[0] = 1.0;  // queue starts empty in the infinite past

    double lost = 0.0;
    auto convolve = [&](std::vector<double>& v) {
        std::fill(work.begin(), work.end(), 0.0);
        for (size_t q = 0; q < L; ++q) {
            if (v[q] == 0.0) continue;
            for (size_t a = 0; a <= amax; ++a) {
                if (pmf.probs[a] == 0.0) continue;
                size_t target = q + a;
                if (target < L)
                    work[target] += v[q] * pmf.probs[a];
                else
                    lost += v[q] * pmf.probs[a];
            }
        }
        v.swap(work);
    };
    auto serve = [&](std::vector<double>& v) {
        std::fill(work.begin(), work.end(), 0.0);
        for (size_t q = 0; q < L; ++q) {
            if (v[q] == 0.0) continue;
            size_t target = q >= static_cast<size_t>(batch) ? q - static_cast<size_t>(batch) : 0;
            work[target] += v[q];
        }
        v.swap(work);
    };

    std::vector<double> prev(pi);
    const int kMaxPeriods = 2000000;
    int period = 0;
    for (; period < kMaxPeriods; ++period) {
        lost = 0.0;
        for (int i = 0; i < T; ++i) {
            convolve(pi);
            if (i == 0) serve(pi);
        }
        if (lost > 1e-12)
            throw Error(ErrorKind::CapTooSmall, "stationary mass leaks past q_cap");
        double tv = 0.0;
        for (size_t q = 0; q < L; ++q) tv += std::fabs(pi[q] - prev[q]);
        tv *= 0.5;
        prev = pi;
        if (tv < 1e-12) break;
    }
    if (period == kMaxPeriods)
        throw Error(ErrorKind::DomainError, "oracle iteration failed to converge");

    // One more period, capturing the distribution entering each slot.
    std::vector<std::vector<double>> before(T);
    for (int i = 0; i < T; ++i) {
        before[i] = pi;
        convolve(pi);
        if (i == 0) serve(pi);
    }

    auto violates = [&](std::int64_t q_post, int phase) {
        std::int64_t ceil_div = (q_post + batch - 1) / batch;
        return static_cast<std::int64_t>(T - phase) + ceil_div * T > static_cast<std::int64_t>(D);
    };

    double p = 0.0;
    for (int i = 0; i < T; ++i) {
        double joint = 0.0;
        for (size_t q = 0; q < L; ++q) {
            if (before[i][q] == 0.0) continue;
            for (size_t a = 1; a <= amax; ++a) {
                if (pmf.probs[a] == 0.0) continue;
                std::int64_t q_post = static_cast<std::int64_t>(q + a);
                if (i == 0) q_post = std::max<std::int64_t>(q_post - batch, 0);
                if (violates(q_post, i)) joint += before[i][q] * pmf.probs[a];
            }
        }
        p += joint / p_arrival;
    }
    return p / static_cast<double>(T);
}

Lemma3Report lemma3_check(const SimConfig& config) {
    validate_sim_config(config);
    const double R = config.r * config.N;
    McOutcome mc = run_replications([&] { return make_cpe_draw(config); }, config.seed,
                                    config.replications, R, config.T, config.D,
                                    config.warmup_slots, config.measure_slots, true);

    Lemma3Report rep;
    rep.k = config.D % config.T;
    rep.thresholds = phase_thresholds(R, config.T, config.D);
    rep.phase_exceedance.assign(config.T, 0.0);
    for (int i = 0; i < config.T; ++i) {
        if (mc.total.slots[i] > 0)
            rep.phase_exceedance[i] = static_cast<double>(mc.total.exceed[i]) /
                                      static_cast<double>(mc.total.slots[i]);
    }
    rep.sum_side = std::accumulate(rep.phase_exceedance.begin(), rep.phase_exceedance.end(), 0.0);
    rep.overflow_side = rep.phase_exceedance[config.T - 1 - rep.k];
    rep.ratio = rep.overflow_side > 0.0 ? rep.sum_side / rep.overflow_side
                                        : std::numeric_limits<double>::quiet_NaN();

    double mean = std::accumulate(mc.rep_p.begin(), mc.rep_p.end(), 0.0) /
                  static_cast<double>(config.replications);
    rep.p_delay_hat = mean;
    rep.p_random_bit = phase_averaged_p(mc.total, config.T, mc.total.random_bit_viol);
    return rep;
}

}  // namespace oqp
