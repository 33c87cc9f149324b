#include "rhygarch/risk.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <tuple>
#include <vector>

using namespace rhygarch;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("Gaussian VaR and ES examples", "[risk]") {
    const InnovationDist g = InnovationDist::gaussian();
    CHECK_THAT(var_forecast(1.0, 0.05, g), WithinAbs(-1.6448536, 1e-6));
    CHECK_THAT(var_forecast(1.2714311, 0.05, g), WithinAbs(-1.8547, 5e-5));
    CHECK_THAT(es_forecast(1.2714311, 0.05, g, EsConvention::Paper), WithinAbs(0.12241, 5e-6));
    CHECK_THAT(es_forecast(1.0, 0.05, g, EsConvention::Standard), WithinAbs(-2.0627128, 1e-6));
    // At the median the paper convention reduces to phi(0) / 0.5.
    CHECK_THAT(es_forecast(1.0, 0.5, g, EsConvention::Paper), WithinAbs(0.7978846, 1e-7));
}

TEST_CASE("ES matched to reported VaR levels", "[risk]") {
    const InnovationDist g = InnovationDist::gaussian();
    for (auto [alpha, var, es] : {std::tuple{0.05, -1.8547, 0.1224}, std::tuple{0.01, -2.6834, 0.0310}}) {
        const double z = norm_quantile(alpha);
        const double h = (var / z) * (var / z);
        CHECK_THAT(var_forecast(h, alpha, g), WithinAbs(var, 1e-12));
        CHECK_THAT(es_forecast(h, alpha, g, EsConvention::Paper), WithinAbs(es, 5e-4));
    }
}

TEST_CASE("forecast_h", "[risk]") {
    RhygarchParams p = model1_params();
    p.delta = 0.0;
    const std::vector<double> hist{0.4, 2.2, 1.1, 0.7, 3.0};
    CHECK_THAT(forecast_h(p, hist, 50), WithinRel(std::exp(p.omega), 1e-15));

    p = model1_params();
    const double c = 0.6;
    const std::vector<double> constant(200, std::exp(c));
    const double S = p.psi(100).partial_sum;
    CHECK_THAT(forecast_h(p, constant, 100), WithinRel(std::exp(p.omega + c * S), 1e-12));

    const std::vector<double> ones(300, 1.0);
    CHECK_THAT(forecast_h(p, ones, 100), WithinAbs(1.1051709, 1e-7));

    CHECK_THROWS_AS(forecast_h(p, std::vector<double>{}, 10), DataError);
    CHECK_THROWS_AS(forecast_h(p, std::vector<double>{1.0, -2.0}, 10), DataError);
}

TEST_CASE("closed-form ES agrees with quadrature", "[risk][property]") {
    for (double alpha : {0.01, 0.05, 0.1}) {
        const InnovationDist g = InnovationDist::gaussian();
        CHECK_THAT(es_forecast(1.0, alpha, g, EsConvention::Standard), WithinAbs(es_quadrature_oracle(1.0, alpha, g), 1e-6));
        for (double nu : {3.0, 5.0, 10.0}) {
            const InnovationDist t = InnovationDist::student_t(nu);
            for (QuantileScale sc : {QuantileScale::Standardized, QuantileScale::Raw}) {
                const double closed = es_forecast(1.0, alpha, t, EsConvention::Standard, sc);
                CHECK_THAT(closed, WithinAbs(es_quadrature_oracle(1.0, alpha, t, sc), 1e-5));
            }
        }
    }
}

TEST_CASE("scaling and ordering", "[risk][property]") {
    for (const InnovationDist& dist : {InnovationDist::gaussian(), InnovationDist::student_t(4.0)}) {
        for (double alpha : {0.01, 0.025, 0.05, 0.1}) {
            const double v1 = var_forecast(1.0, alpha, dist);
            const double e1 = es_forecast(1.0, alpha, dist, EsConvention::Standard);
            const double p1 = es_forecast(1.0, alpha, dist, EsConvention::Paper);
            CHECK(e1 <= v1);
            CHECK(v1 < 0.0);
            CHECK(p1 > 0.0);
            for (double h : {0.25, 2.0, 9.0}) {
                CHECK_THAT(var_forecast(h, alpha, dist), WithinRel(std::sqrt(h) * v1, 1e-14));
                CHECK_THAT(es_forecast(h, alpha, dist, EsConvention::Standard), WithinRel(std::sqrt(h) * e1, 1e-14));
                CHECK_THAT(es_forecast(h, alpha, dist, EsConvention::Paper), WithinRel(std::sqrt(h) * p1, 1e-14));
            }
        }
    }
}

TEST_CASE("raw and standardized t quantiles", "[risk]") {
    const InnovationDist t = InnovationDist::student_t(5.0);
    const double raw = var_forecast(1.0, 0.05, t, QuantileScale::Raw);
    const double std_q = var_forecast(1.0, 0.05, t, QuantileScale::Standardized);
    CHECK_THAT(raw, WithinAbs(-2.0150484, 1e-6));
    CHECK_THAT(std_q, WithinRel(raw * std::sqrt(3.0 / 5.0), 1e-12));
    // The Gaussian ignores the scale choice.
    const InnovationDist g = InnovationDist::gaussian();
    CHECK(var_forecast(1.0, 0.05, g, QuantileScale::Raw) == var_forecast(1.0, 0.05, g));
}

TEST_CASE("risk argument errors and parsing", "[risk]") {
    const InnovationDist g = InnovationDist::gaussian();
    CHECK_THROWS_AS(var_forecast(0.0, 0.05, g), DomainError);
    CHECK_THROWS_AS(var_forecast(1.0, 0.0, g), DomainError);
    CHECK_THROWS_AS(var_forecast(1.0, 1.0, g), DomainError);
    CHECK_THROWS_AS(es_forecast(1.0, 0.05, InnovationDist::student_t(2.0), EsConvention::Paper), DomainError);
    CHECK(es_convention_from_string("paper") == EsConvention::Paper);
    CHECK(es_convention_from_string("standard") == EsConvention::Standard);
    CHECK_THROWS_AS(es_convention_from_string("upper"), DomainError);
    CHECK(quantile_scale_from_string("raw") == QuantileScale::Raw);
    CHECK_THROWS_AS(quantile_scale_from_string("x"), DomainError);
}

TEST_CASE("forecast JSON", "[risk]") {
    const nlohmann::json g = make_forecast(1.0, 0.05, InnovationDist::gaussian(), EsConvention::Standard);
    CHECK(g.at("convention") == "standard");
    CHECK(g.at("dist") == "gaussian");
    CHECK_FALSE(g.contains("nu"));
    CHECK(g.at("var").get<double>() == var_forecast(1.0, 0.05, InnovationDist::gaussian()));

    const nlohmann::json t = make_forecast(2.0, 0.01, InnovationDist::student_t(3.0), EsConvention::Paper, QuantileScale::Raw);
    CHECK(t.at("nu") == 3.0);
    CHECK(t.at("quantile") == "raw");
    CHECK(t.at("alpha") == 0.01);
}
