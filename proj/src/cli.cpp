#include "oqp/cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "oqp/arrival.hpp"
#include "oqp/channel.hpp"
#include "oqp/delay_exponent.hpp"
#include "oqp/optimizer.hpp"
#include "oqp/queue_sim.hpp"

namespace oqp {

namespace {

using nlohmann::json;

// All numeric text output uses 9 significant digits, '.' separator, no locale.
std::string fmt9(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::NoCrossing:
        case ErrorKind::EmptyAdmissibleSet:
            return 3;
        default:
            return 2;
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

double parse_double(const std::string& s, const std::string& what) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorKind::DomainError, "cannot parse " + what + " from '" + s + "'");
    }
}

ArrivalModel parse_cpe(const std::string& text) {
    auto parts = split(text, ',');
    if (parts.size() != 2)
        throw Error(ErrorKind::DomainError, "--cpe expects 'lambda,mu'");
    return ArrivalModel::cpe(parse_double(parts[0], "lambda"), parse_double(parts[1], "mu"));
}

DiscretePmf parse_pmf(const std::string& text) {
    DiscretePmf pmf;
    for (const std::string& entry : split(text, ',')) {
        auto kv = split(entry, ':');
        if (kv.size() != 2)
            throw Error(ErrorKind::DomainError, "--pmf expects 'value:prob,value:prob,...'");
        long a = static_cast<long>(parse_double(kv[0], "pmf value"));
        double p = parse_double(kv[1], "pmf probability");
        if (a < 0) throw Error(ErrorKind::DomainError, "pmf values must be non-negative");
        if (static_cast<size_t>(a) >= pmf.probs.size()) pmf.probs.resize(a + 1, 0.0);
        pmf.probs[a] += p;
    }
    return pmf;
}

struct ChannelFlags {
    bool siso = false;
    std::string mimo;
    int coop = 0;
    std::string json_path;

    ChannelModel build() const {
        int given = (siso ? 1 : 0) + (mimo.empty() ? 0 : 1) + (coop > 0 ? 1 : 0) +
                    (json_path.empty() ? 0 : 1);
        if (given != 1)
            throw Error(ErrorKind::DomainError,
                        "choose exactly one of --siso / --mimo / --coop / --channel-json");
        if (siso) return ChannelModel::siso();
        if (!mimo.empty()) {
            auto parts = split(mimo, ',');
            if (parts.size() != 2)
                throw Error(ErrorKind::DomainError, "--mimo expects 'n_t,n_r'");
            return ChannelModel::mimo(static_cast<int>(parse_double(parts[0], "n_t")),
                                      static_cast<int>(parse_double(parts[1], "n_r")));
        }
        if (coop > 0) return ChannelModel::coop_oaf(coop);
        std::ifstream in(json_path);
        if (!in) throw Error(ErrorKind::DomainError, "cannot open channel JSON " + json_path);
        std::stringstream buf;
        buf << in.rdbuf();
        return ChannelModel::from_json_text(buf.str());
    }
};

int default_jobs() {
    if (const char* env = std::getenv("OQP_JOBS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 1;
}

// Runs f(0..n-1) on up to `jobs` workers; the caller consumes slot-indexed
// results afterwards, so output order never depends on scheduling.
template <class F>
void parallel_for_ordered(size_t n, int jobs, F&& f) {
    jobs = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
    if (jobs == 1) {
        for (size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int w = 0; w < jobs; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    f(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (size_t i = 0; i < n; ++i)
        if (errors[i]) std::rethrow_exception(errors[i]);
}

std::string regime_name(const ScalingRegime& regime) {
    if (std::holds_alternative<LinearGamma>(regime)) return "linear";
    if (std::holds_alternative<Sublinear>(regime)) return "sublinear";
    return "superlinear";
}

json optimization_json(const OptimizationResult& r) {
    json j;
    j["regime"] = regime_name(r.regime);
    j["gamma"] = std::holds_alternative<LinearGamma>(r.regime)
                     ? json(std::get<LinearGamma>(r.regime).gamma)
                     : json(nullptr);
    j["d_star"] = r.d_star;
    j["r_star"] = r.r_star;
    j["t_star"] = r.t_star;
    j["v_star"] = r.v_star ? json(*r.v_star) : json(nullptr);
    json table = json::array();
    for (const PerTRow& row : r.per_t_table) {
        table.push_back({{"T", row.T},
                         {"r_star_of_T", row.r_star},
                         {"gamma_I", row.gamma_I},
                         {"d_ch", row.d_ch}});
    }
    j["per_t_table"] = table;
    if (r.relaxed) {
        j["relaxed"] = {{"d_ir", r.relaxed->d_ir},
                        {"r_ir", r.relaxed->r_ir},
                        {"t_ir", r.relaxed->t_ir},
                        {"v_ir", r.relaxed->v_ir ? json(*r.relaxed->v_ir) : json(nullptr)}};
    } else {
        j["relaxed"] = nullptr;
    }
    j["case_bound"] = r.case_bound ? json(*r.case_bound) : json(nullptr);
    return j;
}

json sim_report_json(const SimReport& r) {
    json j;
    j["p_delay_hat"] = r.p_delay_hat;
    j["ci95_half_width"] = r.ci95_half_width;
    j["empirical_exponent"] = r.empirical_exponent;
    j["predicted_exponent"] = r.predicted_exponent;
    j["per_phase_violation"] = r.per_phase_violation;
    j["slots_observed"] = r.slots_observed;
    return j;
}

const char* kSummaryHeader = "d_star,r_star,t_star,v_star,d_ir,r_ir,t_ir,v_ir";
const char* kPerTHeader = "T,r_star_of_T,gamma_I,d_ch";
const char* kSimHeader = "N,r,T,D,p_delay_hat,ci95,emp_exp,pred_exp,slots";

std::string summary_csv_row(const OptimizationResult& r) {
    std::ostringstream os;
    os << fmt9(r.d_star) << ',' << fmt9(r.r_star) << ',' << r.t_star << ','
       << (r.v_star ? std::to_string(*r.v_star) : "nan") << ',';
    if (r.relaxed) {
        os << fmt9(r.relaxed->d_ir) << ',' << fmt9(r.relaxed->r_ir) << ','
           << fmt9(r.relaxed->t_ir) << ','
           << (r.relaxed->v_ir ? fmt9(*r.relaxed->v_ir) : "nan");
    } else {
        os << "nan,nan,nan,nan";
    }
    return os.str();
}

std::string sim_csv(double N, double r, int T, int D, const SimReport& rep) {
    std::ostringstream os;
    os << kSimHeader << '\n'
       << fmt9(N) << ',' << fmt9(r) << ',' << T << ',' << D << ',' << fmt9(rep.p_delay_hat)
       << ',' << fmt9(rep.ci95_half_width) << ',' << fmt9(rep.empirical_exponent) << ','
       << fmt9(rep.predicted_exponent) << ',' << rep.slots_observed << '\n';
    return os.str();
}

struct OutputTarget {
    std::ostream* stream;
    std::ofstream file;

    OutputTarget(const std::string& path, std::ostream& fallback) {
        if (path.empty()) {
            stream = &fallback;
        } else {
            file.open(path);
            if (!file) throw Error(ErrorKind::DomainError, "cannot open output file " + path);
            stream = &file;
        }
    }
};

// ---- rate ---------------------------------------------------------------

struct RateArgs {
    std::string cpe;
    std::optional<double> theta;
    std::optional<double> x;
    std::optional<double> dr;
};

int cmd_rate(const RateArgs& a, std::ostream& out) {
    ArrivalModel model = parse_cpe(a.cpe);
    int given = (a.theta ? 1 : 0) + (a.x ? 1 : 0) + (a.dr ? 1 : 0);
    if (given != 1)
        throw Error(ErrorKind::DomainError, "choose exactly one of --theta / --x / --delta-r");
    double v;
    if (a.theta)
        v = log_mgf(model, *a.theta);
    else if (a.x)
        v = conjugate(model, *a.x);
    else
        v = delta_r(model, *a.dr);
    out << fmt9(v) << '\n';
    return 0;
}

// ---- optimize -----------------------------------------------------------

struct OptimizeArgs {
    ChannelFlags channel;
    std::string cpe;
    double gamma = 1.0;
    int D = 0;
    bool exact = false;
    int fixed_T = 0;
    std::string sweep;
    bool per_t = false;
    int jobs = 1;
    std::string format = "csv";
    std::string output;
};

struct SweepSpec {
    std::string parameter;
    std::vector<double> values;
};

SweepSpec parse_sweep(const std::string& text) {
    auto eq = text.find('=');
    if (eq == std::string::npos)
        throw Error(ErrorKind::DomainError, "--sweep expects 'param=v1,v2,...'");
    SweepSpec spec;
    spec.parameter = text.substr(0, eq);
    for (const std::string& v : split(text.substr(eq + 1), ','))
        spec.values.push_back(parse_double(v, "sweep value"));
    if (spec.values.empty()) throw Error(ErrorKind::DomainError, "sweep needs at least one value");
    const char* allowed[] = {"lambda", "mu", "D", "r", "T", "v"};
    for (const char* p : allowed)
        if (spec.parameter == p) return spec;
    throw Error(ErrorKind::DomainError, "sweep parameter must be lambda, mu, D, r, T or v");
}

OptimizationResult run_optimize_once(const OptimizeArgs& a, const ArrivalModel& model,
                                     const ChannelModel& channel, int D,
                                     std::optional<int> restrict_T) {
    return optimize_case1(model, channel, a.gamma, D, !a.exact, restrict_T);
}

int cmd_optimize(const OptimizeArgs& a, std::ostream& out_stream) {
    OutputTarget target(a.output, out_stream);
    std::ostream& out = *target.stream;
    ArrivalModel base_model = parse_cpe(a.cpe);
    ChannelModel base_channel = a.channel.build();
    std::optional<int> restrict_T =
        a.fixed_T > 0 ? std::optional<int>(a.fixed_T) : std::nullopt;
    if (a.D < 2) throw Error(ErrorKind::DomainError, "--D must be at least 2");

    if (a.sweep.empty()) {
        OptimizationResult res = run_optimize_once(a, base_model, base_channel, a.D, restrict_T);
        if (a.format == "json") {
            out << optimization_json(res).dump(2) << '\n';
        } else {
            if (a.per_t) {
                out << kPerTHeader << '\n';
                for (const PerTRow& row : res.per_t_table)
                    out << row.T << ',' << fmt9(row.r_star) << ',' << fmt9(row.gamma_I) << ','
                        << fmt9(row.d_ch) << '\n';
                out << '\n';
            }
            out << kSummaryHeader << '\n' << summary_csv_row(res) << '\n';
        }
        return 0;
    }

    SweepSpec spec = parse_sweep(a.sweep);
    const Cpe base_cpe = base_model.as_cpe();

    // r sweeps are operating-point diagnostics rather than optimizations.
    if (spec.parameter == "r") {
        struct Row {
            double gamma_I, dch, ptot;
        };
        std::vector<Row> rows(spec.values.size());
        parallel_for_ordered(spec.values.size(), a.jobs, [&](size_t i) {
            double r = spec.values[i];
            int T = restrict_T ? *restrict_T : admissible_T(base_channel, a.D).front();
            double I = a.exact
                           ? exponent_exact(base_model, ExponentQuery{r, T, a.D}).i_exact
                           : exponent_relaxed(base_model, r, T, a.D);
            double dch = d_ch(base_channel, r, T);
            rows[i] = Row{a.gamma * I, dch, std::min(a.gamma * I, dch)};
        });
        if (a.format == "json") {
            json arr = json::array();
            for (size_t i = 0; i < rows.size(); ++i)
                arr.push_back({{"parameter", "r"},
                               {"value", spec.values[i]},
                               {"gamma_I", rows[i].gamma_I},
                               {"d_ch", rows[i].dch},
                               {"p_tot_exponent", rows[i].ptot}});
            out << arr.dump(2) << '\n';
        } else {
            out << "param,value,gamma_I,d_ch,p_tot_exponent\n";
            for (size_t i = 0; i < rows.size(); ++i)
                out << "r," << fmt9(spec.values[i]) << ',' << fmt9(rows[i].gamma_I) << ','
                    << fmt9(rows[i].dch) << ',' << fmt9(rows[i].ptot) << '\n';
        }
        return 0;
    }

    std::vector<OptimizationResult> results(spec.values.size());
    parallel_for_ordered(spec.values.size(), a.jobs, [&](size_t i) {
        double v = spec.values[i];
        ArrivalModel model = base_model;
        ChannelModel channel = base_channel;
        int D = a.D;
        std::optional<int> rT = restrict_T;
        if (spec.parameter == "lambda") {
            model = ArrivalModel::cpe(v, base_cpe.mu);
        } else if (spec.parameter == "mu") {
            model = ArrivalModel::cpe(base_cpe.lambda, v);
        } else if (spec.parameter == "D") {
            D = static_cast<int>(v);
        } else if (spec.parameter == "T") {
            rT = static_cast<int>(v);
        } else if (spec.parameter == "v") {
            channel = ChannelModel::coop_oaf(static_cast<int>(v));
            rT = 2 * (static_cast<int>(v) + 1);
        }
        results[i] = run_optimize_once(a, model, channel, D, rT);
    });

    if (a.format == "json") {
        json arr = json::array();
        for (size_t i = 0; i < results.size(); ++i)
            arr.push_back({{"parameter", spec.parameter},
                           {"value", spec.values[i]},
                           {"result", optimization_json(results[i])}});
        out << arr.dump(2) << '\n';
    } else {
        out << "param,value," << kSummaryHeader << '\n';
        for (size_t i = 0; i < results.size(); ++i)
            out << spec.parameter << ',' << fmt9(spec.values[i]) << ','
                << summary_csv_row(results[i]) << '\n';
    }
    return 0;
}

// ---- simulate -----------------------------------------------------------

struct SimulateArgs {
    std::string cpe;
    double N = 0.0;
    std::string g = "linear";
    double r = 0.0;
    int T = 0;
    int D = 0;
    double slots = 1e6;
    std::uint64_t seed = 1;
    int reps = 1;
    std::int64_t warmup = -1;
    std::string pmf;
    std::int64_t R = 0;
    bool oracle = false;
    std::int64_t q_cap = 4096;
    std::string format = "json";
    std::string output;
};

std::int64_t round_up_to_multiple(double slots, int T) {
    auto n = static_cast<std::int64_t>(std::llround(slots));
    if (n <= 0) throw Error(ErrorKind::DomainError, "--slots must be positive");
    std::int64_t rem = n % T;
    return rem == 0 ? n : n + (T - rem);
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out_stream) {
    OutputTarget target(a.output, out_stream);
    std::ostream& out = *target.stream;

    if (a.oracle) {
        if (a.pmf.empty()) throw Error(ErrorKind::DomainError, "--oracle requires --pmf");
        double p = exact_discrete_oracle(parse_pmf(a.pmf), a.R, a.T, a.D, a.q_cap);
        out << fmt9(p) << '\n';
        return 0;
    }

    SimReport rep;
    double N_col;
    if (!a.pmf.empty()) {
        DiscreteSimConfig cfg;
        cfg.pmf = parse_pmf(a.pmf);
        cfg.R = a.R;
        cfg.T = a.T;
        cfg.D = a.D;
        cfg.measure_slots = round_up_to_multiple(a.slots, std::max(a.T, 1));
        double margin = static_cast<double>(a.R) - cfg.pmf.mean();
        cfg.warmup_slots = a.warmup >= 0
                               ? a.warmup
                               : 100ll * a.T * static_cast<std::int64_t>(
                                     std::ceil(1.0 / std::max(1e-6, margin)));
        cfg.seed = a.seed;
        cfg.replications = a.reps;
        rep = simulate_discrete(cfg);
        N_col = std::numeric_limits<double>::quiet_NaN();
    } else {
        if (a.cpe.empty())
            throw Error(ErrorKind::DomainError, "simulate needs --cpe or --pmf");
        SimConfig cfg{parse_cpe(a.cpe), a.N,  0.0,    a.r, a.T, a.D,
                      0,                0,    a.seed, a.reps};
        cfg.g_of_N = a.g == "linear" ? a.N : parse_double(a.g, "g(N)");
        cfg.measure_slots = round_up_to_multiple(a.slots, std::max(a.T, 1));
        double margin = a.r - cfg.model.mean_rate();
        cfg.warmup_slots = a.warmup >= 0
                               ? a.warmup
                               : 100ll * a.T * static_cast<std::int64_t>(
                                     std::ceil(1.0 / std::max(1e-6, margin)));
        rep = simulate(cfg);
        N_col = a.N;
    }

    if (a.format == "json") {
        out << sim_report_json(rep).dump(2) << '\n';
    } else {
        out << sim_csv(N_col, a.r, a.T, a.D, rep);
    }
    // Estimates below the resolvable floor are reported but flagged via the
    // exit code so batch drivers can tell them apart.
    return rep.p_delay_hat < 1e-8 ? 4 : 0;
}

// ---- classify -----------------------------------------------------------

struct ClassifyArgs {
    std::string regime;
    ChannelFlags channel;
    std::string cpe;
    int D = 0;
    bool exact = false;
    std::string format = "csv";
    std::string output;
};

int cmd_classify(const ClassifyArgs& a, std::ostream& out_stream) {
    OutputTarget target(a.output, out_stream);
    std::ostream& out = *target.stream;
    ArrivalModel model = parse_cpe(a.cpe);
    ChannelModel channel = a.channel.build();

    if (a.regime.rfind("linear", 0) == 0) {
        double gamma = 1.0;
        auto colon = a.regime.find(':');
        if (colon != std::string::npos)
            gamma = parse_double(a.regime.substr(colon + 1), "gamma");
        OptimizationResult res = optimize_case1(model, channel, gamma, a.D, !a.exact);
        if (a.format == "json") {
            out << optimization_json(res).dump(2) << '\n';
        } else {
            out << kSummaryHeader << '\n' << summary_csv_row(res) << '\n';
        }
        return 0;
    }

    ScalingRegime regime;
    if (a.regime == "sublinear") {
        regime = Sublinear{};
    } else if (a.regime == "superlinear") {
        regime = Superlinear{};
    } else {
        throw Error(ErrorKind::DomainError,
                    "--regime must be sublinear, superlinear or linear[:gamma]");
    }
    OptimizationResult res = classify_and_bound(model, channel, regime, a.D);
    if (a.format == "json") {
        out << optimization_json(res).dump(2) << '\n';
    } else {
        out << "regime,case_bound\n"
            << regime_name(regime) << ',' << fmt9(res.case_bound.value()) << '\n';
    }
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"End-to-end error-exponent calculator for delay-constrained "
                 "traffic over outage-limited fading channels"};
    app.require_subcommand(1);

    RateArgs rate;
    double rate_theta = 0, rate_x = 0, rate_dr = 0;
    CLI::App* rate_cmd = app.add_subcommand("rate", "Evaluate arrival-rate functions");
    rate_cmd->add_option("--cpe", rate.cpe, "lambda,mu")->required();
    auto* opt_theta = rate_cmd->add_option("--theta", rate_theta, "log-MGF argument");
    auto* opt_x = rate_cmd->add_option("--x", rate_x, "conjugate argument");
    auto* opt_dr = rate_cmd->add_option("--delta-r", rate_dr, "rate for delta_r");

    OptimizeArgs opt;
    opt.jobs = default_jobs();
    CLI::App* opt_cmd = app.add_subcommand("optimize", "Balance delay and channel exponents");
    opt_cmd->add_flag("--siso", opt.channel.siso, "SISO fast-fading tradeoff");
    opt_cmd->add_option("--mimo", opt.channel.mimo, "n_t,n_r quasi-static MIMO");
    opt_cmd->add_option("--coop", opt.channel.coop, "relay count for cooperative OAF");
    opt_cmd->add_option("--channel-json", opt.channel.json_path, "piecewise tradeoff JSON file");
    opt_cmd->add_option("--cpe", opt.cpe, "lambda,mu")->required();
    opt_cmd->add_option("--gamma", opt.gamma, "linear-regime scale factor");
    opt_cmd->add_option("--D", opt.D, "delay bound in slots")->required();
    opt_cmd->add_flag("--exact", opt.exact, "use the exact exponent (default relaxed)");
    bool relaxed_flag = false;
    opt_cmd->add_flag("--relaxed", relaxed_flag, "use the integer-relaxed exponent (default)");
    opt_cmd->add_option("--fixed-T", opt.fixed_T, "restrict to a single coding duration");
    opt_cmd->add_option("--sweep", opt.sweep, "param=v1,v2,... (lambda, mu, D, r, T, v)");
    opt_cmd->add_flag("--per-t", opt.per_t, "print the per-duration table");
    opt_cmd->add_option("--jobs", opt.jobs, "sweep workers (default OQP_JOBS or 1)");
    opt_cmd->add_option("--format", opt.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    opt_cmd->add_option("--output", opt.output, "write to file instead of stdout");

    SimulateArgs sim;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "Monte Carlo batch-service queue");
    sim_cmd->add_option("--cpe", sim.cpe, "lambda,mu");
    sim_cmd->add_option("--N", sim.N, "capacity scale (log SNR)");
    sim_cmd->add_option("--g", sim.g, "'linear' for g(N)=N, or a number");
    sim_cmd->add_option("--r", sim.r, "multiplexing gain");
    sim_cmd->add_option("--T", sim.T, "coding duration")->required();
    sim_cmd->add_option("--D", sim.D, "delay bound")->required();
    sim_cmd->add_option("--slots", sim.slots, "measured slots (rounded up to a multiple of T)");
    sim_cmd->add_option("--seed", sim.seed, "RNG seed");
    sim_cmd->add_option("--reps", sim.reps, "replications (stream j uses seed^j)");
    sim_cmd->add_option("--warmup", sim.warmup, "warmup slots (default 100*T*ceil(1/(r-lambda)))");
    sim_cmd->add_option("--pmf", sim.pmf, "integer arrival pmf 'value:prob,...'");
    sim_cmd->add_option("--R", sim.R, "service bits per slot (pmf mode)");
    sim_cmd->add_flag("--oracle", sim.oracle, "exact stationary probability (pmf mode)");
    sim_cmd->add_option("--q-cap", sim.q_cap, "oracle state-space cap");
    sim_cmd->add_option("--format", sim.format, "json or csv")
        ->check(CLI::IsMember({"csv", "json"}));
    sim_cmd->add_option("--output", sim.output, "write to file instead of stdout");

    ClassifyArgs cls;
    CLI::App* cls_cmd = app.add_subcommand("classify", "Regime bounds of the total error exponent");
    cls_cmd->add_option("--regime", cls.regime, "sublinear | superlinear | linear[:gamma]")
        ->required();
    cls_cmd->add_flag("--siso", cls.channel.siso, "SISO fast-fading tradeoff");
    cls_cmd->add_option("--mimo", cls.channel.mimo, "n_t,n_r quasi-static MIMO");
    cls_cmd->add_option("--coop", cls.channel.coop, "relay count for cooperative OAF");
    cls_cmd->add_option("--channel-json", cls.channel.json_path, "piecewise tradeoff JSON file");
    cls_cmd->add_option("--cpe", cls.cpe, "lambda,mu")->required();
    cls_cmd->add_option("--D", cls.D, "delay bound in slots")->required();
    cls_cmd->add_flag("--exact", cls.exact, "use the exact exponent in the linear regime");
    cls_cmd->add_option("--format", cls.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cls_cmd->add_option("--output", cls.output, "write to file instead of stdout");

    std::vector<const char*> argv;
    argv.push_back("oqp");
    for (const std::string& s : args) argv.push_back(s.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        if (rate_cmd->parsed()) {
            if (*opt_theta) rate.theta = rate_theta;
            if (*opt_x) rate.x = rate_x;
            if (*opt_dr) rate.dr = rate_dr;
            return cmd_rate(rate, out);
        }
        if (opt_cmd->parsed()) return cmd_optimize(opt, out);
        if (sim_cmd->parsed()) return cmd_simulate(sim, out);
        if (cls_cmd->parsed()) return cmd_classify(cls, out);
    } catch (const Error& e) {
        err << "error(" << to_string(e.kind()) << "): " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

bool validate_sim_report_json(const std::string& text, std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) return fail("not valid JSON");
    if (!j.is_object()) return fail("not an object");
    const char* keys[] = {"p_delay_hat",        "ci95_half_width",    "empirical_exponent",
                          "predicted_exponent", "per_phase_violation", "slots_observed"};
    if (j.size() != 6) return fail("unexpected key count");
    for (const char* k : keys)
        if (!j.contains(k)) return fail(std::string("missing key ") + k);
    if (!j["p_delay_hat"].is_number()) return fail("p_delay_hat must be a number");
    double p = j["p_delay_hat"].get<double>();
    if (!(p >= 0.0 && p <= 1.0)) return fail("p_delay_hat outside [0,1]");
    if (!j["ci95_half_width"].is_number()) return fail("ci95_half_width must be a number");
    double ci = j["ci95_half_width"].get<double>();
    if (!(ci >= 0.0 && ci <= 1.0)) return fail("ci95_half_width outside [0,1]");
    for (const char* k : {"empirical_exponent", "predicted_exponent"})
        if (!j[k].is_number() && !j[k].is_null())
            return fail(std::string(k) + " must be a number or null");
    if (!j["per_phase_violation"].is_array()) return fail("per_phase_violation must be an array");
    for (const auto& v : j["per_phase_violation"]) {
        if (!v.is_number() || v.get<double>() < 0.0)
            return fail("per_phase_violation entries must be non-negative numbers");
    }
    if (!j["slots_observed"].is_number_integer() || j["slots_observed"].get<std::int64_t>() < 0)
        return fail("slots_observed must be a non-negative integer");
    return true;
}

bool validate_optimization_json(const std::string& text, std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) return fail("not valid JSON");
    if (!j.is_object()) return fail("not an object");
    const char* keys[] = {"regime", "gamma",   "d_star",  "r_star",    "t_star",
                          "v_star", "per_t_table", "relaxed", "case_bound"};
    if (j.size() != 9) return fail("unexpected key count");
    for (const char* k : keys)
        if (!j.contains(k)) return fail(std::string("missing key ") + k);
    if (!j["regime"].is_string()) return fail("regime must be a string");
    std::string regime = j["regime"].get<std::string>();
    if (regime != "linear" && regime != "sublinear" && regime != "superlinear")
        return fail("unknown regime");
    if (!j["t_star"].is_number_integer()) return fail("t_star must be an integer");
    if (!j["per_t_table"].is_array()) return fail("per_t_table must be an array");
    for (const auto& row : j["per_t_table"]) {
        if (!row.is_object() || !row.contains("T") || !row.contains("r_star_of_T") ||
            !row.contains("gamma_I") || !row.contains("d_ch"))
            return fail("per_t_table rows need T, r_star_of_T, gamma_I, d_ch");
    }
    if (!j["relaxed"].is_null()) {
        const auto& rel = j["relaxed"];
        if (!rel.is_object() || !rel.contains("d_ir") || !rel.contains("r_ir") ||
            !rel.contains("t_ir") || !rel.contains("v_ir"))
            return fail("relaxed needs d_ir, r_ir, t_ir, v_ir");
    }
    return true;
}

}  // namespace oqp
