#pragma once

#include <functional>
#include <limits>
#include <variant>

#include "oqp/errors.hpp"

namespace oqp {

// Statistics of the bit-arrival process, expressed through its limiting
// scaled log moment generating function (log-MGF). Values are extended
// reals: +infinity is a legal result and propagates through comparisons.

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Compound Poisson arrivals with exponentially distributed packet sizes.
// lambda is the mean arrival rate as a fraction of the capacity scale,
// mu the inverse-mean-packet-size parameter.
struct Cpe {
    double lambda;
    double mu;
};

// Arrival model defined by a caller-supplied log-MGF. theta_sup marks the
// upper end of the finiteness domain (may be +infinity). Steepness and
// lower-semicontinuity cannot be verified from point evaluations and are
// taken on trust.
struct CustomLogMgf {
    double lambda;
    double theta_sup;
    std::function<double(double)> logmgf;
};

class ArrivalModel {
  public:
    static ArrivalModel cpe(double lambda, double mu);

    // Validates logmgf(0) == 0 (within 1e-12) and, by finite differences at
    // theta = +/-1e-6, that the derivative at 0 matches lambda (1e-4 relative)
    // and the local curvature is non-negative.
    static ArrivalModel custom(double lambda, double theta_sup,
                               std::function<double(double)> logmgf);

    bool is_cpe() const { return std::holds_alternative<Cpe>(kind_); }
    const Cpe& as_cpe() const { return std::get<Cpe>(kind_); }
    const CustomLogMgf& as_custom() const { return std::get<CustomLogMgf>(kind_); }

    double mean_rate() const;  // lambda

  private:
    explicit ArrivalModel(std::variant<Cpe, CustomLogMgf> kind) : kind_(std::move(kind)) {}
    std::variant<Cpe, CustomLogMgf> kind_;
};

// Limiting scaled log-MGF. CPE: mu*lambda*theta/(mu-theta) for theta < mu,
// +infinity otherwise. Custom models delegate to the supplied map.
double log_mgf(const ArrivalModel& model, double theta);

// Convex conjugate sup_theta {theta*x - logmgf(theta)}, the large-deviations
// rate function. CPE uses the closed form mu*(sqrt(x)-sqrt(lambda))^2 and
// rejects x < 0; custom models maximize numerically (golden section on the
// concave objective, absolute tolerance 1e-10 in theta).
double conjugate(const ArrivalModel& model, double x);

// Largest theta with logmgf(theta) < theta*r; governs the integer-relaxed
// delay exponent. CPE closed form mu*(1 - lambda/r). Custom models bisect
// theta*r - logmgf(theta) on (0, theta_sup] to tolerance 1e-10, returning
// theta_sup when the difference stays positive throughout.
double delta_r(const ArrivalModel& model, double r);

// Std-dev over mean of the per-slot arrival count: sqrt(2/(lambda*mu*g(N))).
// CPE only; custom models carry no second-moment data.
double burstiness(const ArrivalModel& model, double g_of_N);

// How the source scaling function g grows relative to N = log SNR. Declared
// by the caller; selects the case split of the optimizer.
struct LinearGamma {
    double gamma;  // > 0
};
struct Sublinear {};
struct Superlinear {};

using ScalingRegime = std::variant<LinearGamma, Sublinear, Superlinear>;

}  // namespace oqp
