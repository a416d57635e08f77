#include "oqp/channel.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

namespace oqp {

namespace {

void validate_piecewise(const PiecewiseLinear& p) {
    if (p.points.size() < 2)
        throw Error(ErrorKind::DomainError, "piecewise tradeoff needs at least two vertices");
    if (p.points.front().first != 0.0)
        throw Error(ErrorKind::DomainError, "piecewise tradeoff must start at r = 0");
    if (p.points.back().second != 0.0)
        throw Error(ErrorKind::DomainError, "piecewise tradeoff must end at d = 0");
    for (size_t i = 1; i < p.points.size(); ++i) {
        if (!(p.points[i].first > p.points[i - 1].first))
            throw Error(ErrorKind::DomainError, "piecewise r values must be strictly increasing");
        if (!(p.points[i].second < p.points[i - 1].second))
            throw Error(ErrorKind::DomainError, "piecewise d values must be strictly decreasing");
    }
    if (p.points.front().second <= 0.0)
        throw Error(ErrorKind::DomainError, "piecewise tradeoff must start with positive diversity");
}

double interpolate(const std::vector<std::pair<double, double>>& pts, double r) {
    for (size_t i = 1; i < pts.size(); ++i) {
        if (r <= pts[i].first) {
            double r0 = pts[i - 1].first, d0 = pts[i - 1].second;
            double r1 = pts[i].first, d1 = pts[i].second;
            if (r == r0) return d0;
            if (r == r1) return d1;
            return d0 + (r - r0) * (d1 - d0) / (r1 - r0);
        }
    }
    return pts.back().second;
}

}  // namespace

ChannelModel ChannelModel::siso() { return ChannelModel(SisoFastFading{}); }

ChannelModel ChannelModel::mimo(int n_t, int n_r) {
    if (n_t < 1 || n_r < 1)
        throw Error(ErrorKind::DomainError, "MIMO needs at least one antenna on each side");
    return ChannelModel(MimoQuasiStatic{n_t, n_r});
}

ChannelModel ChannelModel::coop_oaf(int relays) {
    if (relays < 1) throw Error(ErrorKind::DomainError, "cooperation needs at least one relay");
    return ChannelModel(CoopOAF{relays});
}

ChannelModel ChannelModel::piecewise(std::vector<std::pair<double, double>> points,
                                     TDependence t_dependence) {
    PiecewiseLinear p{std::move(points), t_dependence};
    validate_piecewise(p);
    return ChannelModel(std::move(p));
}

ChannelModel ChannelModel::from_json_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::DomainError, std::string("channel JSON parse failure: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("points") || !doc.contains("t_dependence"))
        throw Error(ErrorKind::DomainError, "channel JSON needs 'points' and 't_dependence'");

    std::vector<std::pair<double, double>> pts;
    for (const auto& entry : doc.at("points")) {
        if (!entry.is_array() || entry.size() != 2)
            throw Error(ErrorKind::DomainError, "channel JSON points must be [r, d] pairs");
        pts.emplace_back(entry.at(0).get<double>(), entry.at(1).get<double>());
    }
    std::string dep = doc.at("t_dependence").get<std::string>();
    TDependence td;
    if (dep == "multiply_by_t") {
        td = TDependence::MultiplyByT;
    } else if (dep == "independent") {
        td = TDependence::Independent;
    } else {
        throw Error(ErrorKind::DomainError,
                    "t_dependence must be 'multiply_by_t' or 'independent'");
    }
    return piecewise(std::move(pts), td);
}

std::string ChannelModel::describe() const {
    std::ostringstream os;
    if (is<SisoFastFading>()) {
        os << "siso";
    } else if (is<MimoQuasiStatic>()) {
        const auto& m = as<MimoQuasiStatic>();
        os << "mimo" << m.n_t << "x" << m.n_r;
    } else if (is<CoopOAF>()) {
        os << "coop_oaf_v" << as<CoopOAF>().relays;
    } else {
        os << "piecewise";
    }
    return os.str();
}

double d_ch(const ChannelModel& channel, double r, int T) {
    double rmax = r_max(channel);
    if (!(r >= 0.0 && r <= rmax))
        throw Error(ErrorKind::DomainError, "multiplexing gain outside [0, r_max]");

    if (channel.is<SisoFastFading>()) {
        if (T < 1) throw Error(ErrorKind::DomainError, "SISO needs T >= 1");
        return static_cast<double>(T) * (1.0 - r);
    }
    if (channel.is<MimoQuasiStatic>()) {
        const auto& m = channel.as<MimoQuasiStatic>();
        if (T < m.n_t)
            throw Error(ErrorKind::DomainError, "MIMO tradeoff needs T >= n_t");
        std::vector<std::pair<double, double>> pts;
        int kmax = std::min(m.n_t, m.n_r);
        pts.reserve(kmax + 1);
        for (int k = 0; k <= kmax; ++k)
            pts.emplace_back(static_cast<double>(k),
                             static_cast<double>((m.n_t - k) * (m.n_r - k)));
        return interpolate(pts, r);
    }
    if (channel.is<CoopOAF>()) {
        const auto& c = channel.as<CoopOAF>();
        if (T != 2 * (c.relays + 1))
            throw Error(ErrorKind::DomainError, "cooperative coding duration must be 2*(v+1)");
        return (c.relays + 1) * (1.0 - 2.0 * r);
    }
    const auto& p = channel.as<PiecewiseLinear>();
    if (T < 1) throw Error(ErrorKind::DomainError, "piecewise tradeoff needs T >= 1");
    double base = interpolate(p.points, r);
    return p.t_dependence == TDependence::MultiplyByT ? base * T : base;
}

double r_max(const ChannelModel& channel) {
    if (channel.is<SisoFastFading>()) return 1.0;
    if (channel.is<MimoQuasiStatic>()) {
        const auto& m = channel.as<MimoQuasiStatic>();
        return static_cast<double>(std::min(m.n_t, m.n_r));
    }
    if (channel.is<CoopOAF>()) return 0.5;
    return channel.as<PiecewiseLinear>().points.back().first;
}

std::vector<int> admissible_T(const ChannelModel& channel, int D) {
    if (D < 2) throw Error(ErrorKind::DomainError, "delay bound must be at least 2 slots");
    int half = D / 2;

    std::vector<int> out;
    if (channel.is<MimoQuasiStatic>()) {
        for (int t = channel.as<MimoQuasiStatic>().n_t; t <= half; ++t) out.push_back(t);
    } else if (channel.is<CoopOAF>()) {
        int t = 2 * (channel.as<CoopOAF>().relays + 1);
        if (t <= half) out.push_back(t);
    } else {
        for (int t = 1; t <= half; ++t) out.push_back(t);
    }
    if (out.empty())
        throw Error(ErrorKind::EmptyAdmissibleSet,
                    "no coding duration fits delay bound D = " + std::to_string(D));
    return out;
}

}  // namespace oqp
