#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "oqp/errors.hpp"

namespace oqp {

// Catalog of channel diversity-multiplexing tradeoff families d_ch(r, T),
// each with its admissible multiplexing range [0, r_max] and coding-duration
// constraint.

struct SisoFastFading {};

struct MimoQuasiStatic {
    int n_t;
    int n_r;
};

// Orthogonal amplify-and-forward cooperation with `relays` relay nodes.
// The coding duration is pinned to 2*(relays+1) slots.
struct CoopOAF {
    int relays;
};

enum class TDependence { MultiplyByT, Independent };

// User-defined tradeoff given as (r_k, d_k) vertices: r strictly increasing
// from 0, d strictly decreasing to 0 at the last vertex.
struct PiecewiseLinear {
    std::vector<std::pair<double, double>> points;
    TDependence t_dependence;
};

class ChannelModel {
  public:
    static ChannelModel siso();
    static ChannelModel mimo(int n_t, int n_r);
    static ChannelModel coop_oaf(int relays);
    static ChannelModel piecewise(std::vector<std::pair<double, double>> points,
                                  TDependence t_dependence);

    // Parses {"points":[[r,d],...],"t_dependence":"multiply_by_t"|"independent"}.
    static ChannelModel from_json_text(const std::string& text);

    template <class T>
    bool is() const { return std::holds_alternative<T>(kind_); }
    template <class T>
    const T& as() const { return std::get<T>(kind_); }

    std::string describe() const;

  private:
    explicit ChannelModel(std::variant<SisoFastFading, MimoQuasiStatic, CoopOAF, PiecewiseLinear> kind)
        : kind_(std::move(kind)) {}
    std::variant<SisoFastFading, MimoQuasiStatic, CoopOAF, PiecewiseLinear> kind_;
};

// Diversity at multiplexing gain r and coding duration T slots.
//   SISO fast fading: T*(1-r).
//   MIMO n_t x n_r:   piecewise-linear through (k, (n_t-k)*(n_r-k)),
//                     independent of T once T >= n_t.
//   Cooperative OAF:  (relays+1)*(1-2r), requiring T == 2*(relays+1).
//   PiecewiseLinear:  vertex interpolation, scaled by T when t-dependent.
// r outside [0, r_max] or an inadmissible T raise DomainError.
double d_ch(const ChannelModel& channel, double r, int T);

// Smallest r with d_ch(r, .) == 0.
double r_max(const ChannelModel& channel);

// Coding durations compatible with delay bound D: the intersection of
// {1, ..., floor(D/2)} with the model's structural constraint. Raises
// EmptyAdmissibleSet when nothing survives.
std::vector<int> admissible_T(const ChannelModel& channel, int D);

}  // namespace oqp
