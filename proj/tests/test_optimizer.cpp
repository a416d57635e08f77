#include <doctest.h>

#include <cmath>

#include "oqp/optimizer.hpp"

using namespace oqp;

TEST_CASE("balance bisection matches the SISO closed form") {
    ArrivalModel m1 = ArrivalModel::cpe(0.5, 1.0);
    ChannelModel siso = ChannelModel::siso();

    double r = r_star_of_T(m1, siso, 1.0, 5, 21, true);
    CHECK(r == doctest::Approx(0.5 + 0.5 / 3.4).epsilon(1e-8));
    CHECK(r == doctest::Approx(siso_r_ir_of_T(0.5, 1.0, 5, 21)).epsilon(1e-8));

    ArrivalModel m05 = ArrivalModel::cpe(0.5, 0.5);
    double r10 = r_star_of_T(m05, siso, 1.0, 10, 21, true);
    CHECK(r10 == doctest::Approx(0.954545454545).epsilon(1e-8));
    CHECK(r10 == doctest::Approx(siso_r_ir_of_T(0.5, 0.5, 10, 21)).epsilon(1e-8));
}

TEST_CASE("balance holds at the crossing") {
    ArrivalModel m = ArrivalModel::cpe(0.5, 1.0);
    ChannelModel siso = ChannelModel::siso();
    for (int T = 1; T <= 10; ++T) {
        double r = r_star_of_T(m, siso, 1.0, T, 21, true);
        double gap = exponent_relaxed(m, r, T, 21) - d_ch(siso, r, T);
        CHECK(std::fabs(gap) <= 1e-8);
    }
}

TEST_CASE("exact-path crossing keeps a signed bracket") {
    ArrivalModel m = ArrivalModel::cpe(0.5, 1.0);
    ChannelModel siso = ChannelModel::siso();
    CrossingResult cr = solve_balance(m, siso, 1.0, 5, 21, false);
    CHECK(cr.hi - cr.lo <= 1e-10);
    CHECK(cr.h_lo < 0.0);
    CHECK(cr.h_hi > 0.0);
    CHECK(cr.r >= cr.lo);
    CHECK(cr.r <= cr.hi);
}

TEST_CASE("nearly constant-rate traffic pushes the crossing to lambda") {
    ArrivalModel m = ArrivalModel::cpe(0.5, 1e9);
    ChannelModel siso = ChannelModel::siso();
    for (int T : {1, 5, 10}) {
        double r = r_star_of_T(m, siso, 1.0, T, 21, true);
        CHECK(std::fabs(r - 0.5) < 1e-3);
    }
}

TEST_CASE("SISO closed forms at the worked triple") {
    RelaxedSummary s = siso_closed_forms(0.5, 0.5, 21);
    CHECK(s.t_ir == doctest::Approx(5.5).epsilon(1e-14));
    CHECK(s.r_ir == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(s.d_ir == doctest::Approx(1.375).epsilon(1e-14));
}

TEST_CASE("SISO closed forms clamp in the constant-rate limit") {
    RelaxedSummary s = siso_closed_forms(0.5, 1e12, 21);
    CHECK(s.t_ir == doctest::Approx(10.0));
    CHECK(s.r_ir == doctest::Approx(siso_r_ir_of_T(0.5, 1e12, 10, 21)).epsilon(1e-12));
    CHECK(s.d_ir == doctest::Approx(10.0 * (1.0 - s.r_ir)).epsilon(1e-12));
}

TEST_CASE("SISO relaxed exponent scales linearly in 1-lambda") {
    RelaxedSummary s = siso_closed_forms(0.999, 0.5, 21);
    CHECK(s.d_ir == doctest::Approx(1.375 * (0.001 / 0.5)).epsilon(1e-9));
}

TEST_CASE("integer optimizer around the worked triple") {
    ArrivalModel m = ArrivalModel::cpe(0.5, 0.5);
    ChannelModel siso = ChannelModel::siso();

    OptimizationResult rel = optimize_case1(m, siso, 1.0, 21, true);
    CHECK((rel.t_star == 5 || rel.t_star == 6));
    CHECK(std::fabs(rel.d_star - 1.375) / 1.375 < 0.01);
    CHECK(rel.relaxed.has_value());
    CHECK(rel.relaxed->d_ir == doctest::Approx(1.375).epsilon(1e-14));
    CHECK(rel.per_t_table.size() == 10);

    OptimizationResult ex = optimize_case1(m, siso, 1.0, 21, false);
    CHECK((ex.t_star == 5 || ex.t_star == 6));
    CHECK(std::fabs(ex.d_star - 1.375) / 1.375 < 0.01);
}

TEST_CASE("constant-rate limit recovers the full-duration diversity") {
    ChannelModel siso = ChannelModel::siso();
    for (double lambda : {0.25, 0.5, 0.75}) {
        ArrivalModel m = ArrivalModel::cpe(lambda, 1e9);
        OptimizationResult res = optimize_case1(m, siso, 1.0, 21, true);
        double cbr = 10.0 * (1.0 - lambda);
        CHECK(std::fabs(res.d_star - cbr) / cbr < 0.01);
        CHECK(res.t_star == 10);
    }
}

TEST_CASE("cooperative sweep picks the cluster size near its relaxed value") {
    ArrivalModel m = ArrivalModel::cpe(0.25, 0.5);
    ChannelModel coop = ChannelModel::coop_oaf(10);
    OptimizationResult res = optimize_case1(m, coop, 1.0, 43, true);

    CHECK(res.v_star.has_value());
    CHECK((*res.v_star == 4 || *res.v_star == 5));
    CHECK(res.t_star == 2 * (*res.v_star + 1));
    CHECK(std::fabs(res.r_star - 0.375) < 0.03);

    CHECK(res.relaxed.has_value());
    CHECK(res.relaxed->v_ir.has_value());
    CHECK(*res.relaxed->v_ir == doctest::Approx(4.5).epsilon(1e-12));
    CHECK(res.relaxed->r_ir == doctest::Approx(0.375).epsilon(1e-12));
}

TEST_CASE("2x2 MIMO relaxed crossing formula") {
    CHECK(mimo22_r_ir(0.5, 1.0, 11) == doctest::Approx(0.5 + 2.5 / 11.0).epsilon(1e-12));
    CHECK(mimo22_r_ir(1.5, 1.0, 11) == doctest::Approx(1.5 + 0.5 / 9.0).epsilon(1e-12));

    // continuity across the branch boundary lambda = 1 - 1/(mu*(D-3))
    double lo = mimo22_r_ir(0.875 - 1e-9, 1.0, 11);
    double hi = mimo22_r_ir(0.875 + 1e-9, 1.0, 11);
    CHECK(std::fabs(lo - hi) < 1e-7);
    CHECK(mimo22_r_ir(0.875, 1.0, 11) == doctest::Approx(1.0).epsilon(1e-12));

    // bisection against the formula, both branches
    ChannelModel mimo = ChannelModel::mimo(2, 2);
    for (double lambda : {0.5, 1.5}) {
        ArrivalModel m = ArrivalModel::cpe(lambda, 1.0);
        double r = r_star_of_T(m, mimo, 1.0, 2, 11, true);
        CHECK(std::fabs(r - mimo22_r_ir(lambda, 1.0, 11)) < 1e-8);
    }
}

TEST_CASE("MIMO optimization with a pinned duration") {
    ArrivalModel m = ArrivalModel::cpe(0.5, 1.0);
    ChannelModel mimo = ChannelModel::mimo(2, 2);
    OptimizationResult res = optimize_case1(m, mimo, 1.0, 11, true, 2);
    CHECK(res.t_star == 2);
    CHECK(res.relaxed.has_value());
    CHECK(res.relaxed->r_ir == doctest::Approx(0.727272727273).epsilon(1e-9));
}

TEST_CASE("regime bounds") {
    ArrivalModel m = ArrivalModel::cpe(0.5, 1.0);
    ChannelModel siso = ChannelModel::siso();

    OptimizationResult sup = classify_and_bound(m, siso, Superlinear{}, 21);
    CHECK(sup.case_bound.has_value());
    CHECK(*sup.case_bound == doctest::Approx(5.0).epsilon(1e-12));

    OptimizationResult sub = classify_and_bound(m, siso, Sublinear{}, 21);
    double brute = 0.0;
    for (int T = 1; T <= 10; ++T)
        brute = std::max(brute, exponent_exact(m, ExponentQuery{1.0, T, 21}).i_exact);
    CHECK(sub.case_bound.has_value());
    CHECK(*sub.case_bound == doctest::Approx(brute).epsilon(1e-12));

    OptimizationResult mimo_sup =
        classify_and_bound(ArrivalModel::cpe(1.0, 1.0), ChannelModel::mimo(2, 2),
                           Superlinear{}, 21);
    CHECK(*mimo_sup.case_bound == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(classify_and_bound(m, siso, LinearGamma{1.0}, 21), Error);
}

TEST_CASE("total-error exponent takes the binding side") {
    ArrivalModel m = ArrivalModel::cpe(0.5, 1.0);
    ChannelModel siso = ChannelModel::siso();

    CHECK(p_tot_exponent(m, siso, 1.0, 0.75, 5, 21) == doctest::Approx(1.25).epsilon(1e-12));
    CHECK(p_tot_exponent(m, siso, 0.01, 0.75, 5, 21) ==
          doctest::Approx(0.01 * 3.000894).epsilon(1e-4));

    // the two sides agree at the relaxed crossing
    double r = r_star_of_T(m, siso, 1.0, 5, 21, true);
    double pt = p_tot_exponent(m, siso, 1.0, r, 5, 21);
    CHECK(pt <= d_ch(siso, r, 5) + 1e-12);
    CHECK(std::fabs(exponent_relaxed(m, r, 5, 21) - d_ch(siso, r, 5)) <= 1e-8);
}

TEST_CASE("relaxed duration does not depend on lambda") {
    double reference = siso_closed_forms(0.1, 0.5, 21).t_ir;
    for (double lambda : {0.2, 0.3, 0.5, 0.7, 0.9}) {
        CHECK(siso_closed_forms(lambda, 0.5, 21).t_ir == doctest::Approx(reference));
    }
}

TEST_CASE("burstiness penalty ratio for interior solutions") {
    for (double mu : {0.3, 0.5, 1.0}) {
        for (double lambda : {0.3, 0.5, 0.7}) {
            RelaxedSummary s = siso_closed_forms(lambda, mu, 21);
            double cbr = 10.0 * (1.0 - lambda);
            double s2mu = std::sqrt(2.0 * mu);
            double predicted = (11.0 / 10.0) / ((1.0 + 1.0 / s2mu) * (1.0 + 1.0 / s2mu));
            CHECK(s.d_ir / cbr == doctest::Approx(predicted).epsilon(1e-9));
        }
    }
}

TEST_CASE("burstier traffic drives the rate toward capacity") {
    ChannelModel siso = ChannelModel::siso();
    double prev = 0.0;
    for (double mu : {10.0, 1.0, 0.1, 0.01, 0.001}) {
        ArrivalModel m = ArrivalModel::cpe(0.5, mu);
        OptimizationResult res = optimize_case1(m, siso, 1.0, 21, true);
        CHECK(res.r_star > prev);
        prev = res.r_star;
        CHECK(siso_closed_forms(0.5, mu, 21).r_ir >= prev - 0.1);
    }
    CHECK(prev > 0.9);  // far into the top of the rate range for very bursty traffic
}

TEST_CASE("exact and relaxed optima agree for long delay bounds") {
    ChannelModel siso = ChannelModel::siso();
    for (double lambda : {0.25, 0.5, 0.75}) {
        for (double mu : {0.01, 1.0}) {
            ArrivalModel m = ArrivalModel::cpe(lambda, mu);
            double d_exact = optimize_case1(m, siso, 1.0, 101, false).d_star;
            double d_ir = siso_closed_forms(lambda, mu, 101).d_ir;
            CHECK(std::fabs(d_exact - d_ir) / d_exact < 0.05);
        }
    }
}

TEST_CASE("balance reports no crossing when gamma is negligible") {
    ArrivalModel m = ArrivalModel::cpe(0.5, 1.0);
    ChannelModel siso = ChannelModel::siso();
    CHECK_THROWS_AS(r_star_of_T(m, siso, 1e-30, 5, 21, true), Error);
}
