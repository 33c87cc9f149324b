#include "rhygarch/loglik.hpp"
#include "rhygarch/model.hpp"

#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

using namespace rhygarch;
using Catch::Matchers::WithinAbs;

TEST_CASE("validate", "[model]") {
    CHECK(validate(model1_params()).empty());
    CHECK(validate(model2_params()).empty());

    RhygarchParams p = model1_params();
    p.delta = 1.2;
    CHECK(validate(p) == std::vector<std::string>{"delta out of [0,1]"});

    p = model1_params();
    p.sigma_u = 0.0;
    CHECK(validate(p) == std::vector<std::string>{"sigma_u must be positive"});

    p = model1_params();
    p.beta = -1.0;
    p.d = -0.2;
    CHECK(validate(p).size() == 2);

    p = model2_params();
    p.innovation.nu = 2.0;
    CHECK(validate(p) == std::vector<std::string>{"nu must exceed 2"});

    p = model1_params();
    p.xi = NAN;
    CHECK(validate(p) == std::vector<std::string>{"xi must be finite"});
}

TEST_CASE("model presets", "[model]") {
    const RhygarchParams m1 = model1_params();
    CHECK(m1.omega == 0.1);
    CHECK(m1.xi == -0.1);
    CHECK(m1.sigma_u == 0.4);
    CHECK(m1.innovation.kind == DistKind::Gaussian);
    const RhygarchParams m2 = model2_params();
    CHECK(m2.innovation.kind == DistKind::StudentT);
    CHECK(m2.innovation.nu == 3.0);
}

TEST_CASE("check_stationarity", "[model]") {
    const StationarityReport r = check_stationarity(model1_params(), 1000);
    CHECK(r.truncation == 1000);
    CHECK_THAT(r.phi_sum_psi, WithinAbs(0.4, 0.03));
    CHECK_THAT(r.sum_psi + r.tail_estimate, WithinAbs(0.4, 1e-3));
    CHECK(r.phi_sum_psi < 0.4);
    CHECK(r.first_moment_ok);
    CHECK(r.strictly_stationary);
    CHECK_FALSE(r.second_moment_ok);
    CHECK(r.psi_min > 0.0);

    RhygarchParams flat = model1_params();
    flat.delta = 0.0;
    const StationarityReport f = check_stationarity(flat, 50);
    CHECK(f.sum_psi == 0.0);
    CHECK(f.first_moment_ok);

    RhygarchParams homog = model1_params();
    homog.omega = 0.0;
    CHECK(check_stationarity(homog, 1000).second_moment_ok);
    CHECK(check_stationarity(homog, 1000).weakly_stationary);

    RhygarchParams heavy = model2_params();
    heavy.omega = 0.0;
    CHECK_FALSE(check_stationarity(heavy, 1000).second_moment_ok);
    heavy.innovation.nu = 5.0;
    CHECK(check_stationarity(heavy, 1000).second_moment_ok);

    RhygarchParams loud = model1_params();
    loud.phi = 3.0;
    loud.delta = 1.0;
    const StationarityReport l = check_stationarity(loud, 1000);
    CHECK_FALSE(l.first_moment_ok);
    CHECK_FALSE(l.strictly_stationary);

    RhygarchParams negative = homog;
    negative.gamma = 0.8;
    negative.beta = 0.1;
    const StationarityReport n = check_stationarity(negative, 1000);
    CHECK(n.psi_min < 0.0);
    CHECK_FALSE(n.second_moment_ok);
}

TEST_CASE("first moment holds over a parameter grid", "[model][property]") {
    for (double phi : {0.5, 1.0, 1.5})
        for (double delta : {0.1, 0.4, 0.6})
            for (double d : {0.1, 0.4, 0.8})
                for (double beta : {0.2, 0.5, 0.8})
                    for (double gamma : {-0.2, 0.0, 0.1, beta}) {
                        if (phi * delta >= 1.0) continue;
                        RhygarchParams p = model1_params();
                        p.phi = phi;
                        p.delta = delta;
                        p.d = d;
                        p.beta = beta;
                        p.gamma = gamma;
                        CHECK(check_stationarity(p, 1000).first_moment_ok);
                    }
}

TEST_CASE("implied_means", "[model]") {
    const ImpliedMeans m = implied_means(model1_params(), 100000);
    CHECK_THAT(m.mean_log_h, WithinAbs(0.1, 1e-12));
    CHECK_THAT(m.mean_log_x, WithinAbs(0.0, 1e-12));

    RhygarchParams h = model1_params();
    h.omega = 0.0;
    h.xi = 0.0;
    const ImpliedMeans z = implied_means(h, 1000);
    CHECK(z.mean_log_h == 0.0);
    CHECK(z.mean_log_x == 0.0);

    RhygarchParams c = model1_params();
    c.delta = 0.0;
    c.omega = 0.3;
    c.xi = 7.0;
    c.phi = 1.3;
    const ImpliedMeans cm = implied_means(c, 1000);
    CHECK_THAT(cm.mean_log_h, WithinAbs(0.3, 1e-15));
    CHECK_THAT(cm.mean_log_x, WithinAbs(7.0 + 0.3 * 1.3, 1e-14));

    RhygarchParams bad = model1_params();
    bad.phi = 3.0;
    bad.delta = 1.0;
    CHECK_THROWS_AS(implied_means(bad, 1000), NonStationaryError);
}

TEST_CASE("implied_means under changing truncation", "[model][property]") {
    RhygarchParams c = model1_params();
    c.delta = 0.0;
    CHECK(implied_means(c, 10).mean_log_h == implied_means(c, 5000).mean_log_h);
    CHECK(implied_means(c, 10).mean_log_x == implied_means(c, 5000).mean_log_x);

    RhygarchParams p = model1_params();
    p.xi = 0.5;
    for (std::size_t K : {50u, 200u, 1000u}) {
        const ImpliedMeans a = implied_means(p, K), b = implied_means(p, 20 * K);
        const PsiWeights w = p.psi(K);
        const double bound = p.phi * w.tail_estimate * std::abs(b.mean_log_x) / (1.0 - p.phi * w.partial_sum);
        CHECK(std::abs(a.mean_log_x - b.mean_log_x) <= bound);
    }
}

TEST_CASE("nesting: delta = 1 is the FLoGARCH filter", "[model][property]") {
    std::mt19937_64 gen(31);
    std::uniform_real_distribution<double> ud(0.05, 0.95), ub(-0.9, 0.9);
    for (int rep = 0; rep < 50; ++rep) {
        const double d = ud(gen), gamma = ub(gen), beta = ub(gen);
        const PsiWeights p = psi_weights(1.0, d, gamma, beta, 300);
        const std::vector<double> ref = oracle::flogarch_weights(d, gamma, beta, 300);
        for (std::size_t k = 0; k < 300; ++k) CHECK_THAT(p.weights[k], WithinAbs(ref[k], 1e-12));
    }
}

TEST_CASE("nesting: d = 1 is the realized GARCH filter", "[model][property]") {
    std::mt19937_64 gen(32);
    std::uniform_real_distribution<double> ub(-0.95, 0.95);
    for (int rep = 0; rep < 100; ++rep) {
        const double gamma = ub(gen), beta = ub(gen);
        const PsiWeights p = psi_weights(1.0, 1.0, gamma, beta, 40);
        CHECK(p[1] == 1.0 + gamma - beta);
        const std::vector<double> ref = oracle::realized_garch_weights(gamma, beta, 40);
        for (std::size_t k = 0; k < 40; ++k) CHECK_THAT(p.weights[k], WithinAbs(ref[k], 1e-14));
    }
}

TEST_CASE("volterra_oracle closed-form cases", "[model]") {
    RhygarchParams p = model1_params();
    p.omega = 0.0;
    const std::vector<double> zeros(40, 0.0);
    CHECK(volterra_oracle(p, zeros, 3, 10) == 0.0);

    p = model1_params();
    const double c = 0.37;
    const std::vector<double> constant(40, c);
    const PsiWeights w = p.psi(10);
    const double expected = p.omega + w.partial_sum * (p.omega * p.phi + c);
    CHECK_THAT(volterra_oracle(p, constant, 1, 10), WithinAbs(expected, 1e-14));
    CHECK(volterra_oracle(p, constant, 0, 10) == p.omega);
}

TEST_CASE("volterra expansion matches the recursive filter", "[model]") {
    std::mt19937_64 gen(77);
    std::normal_distribution<double> noise(0.0, 0.5);
    constexpr std::size_t K = 8, L = 3, n = 30;
    RhygarchParams p = model1_params();
    const PsiWeights psi = p.psi(K);
    const double S = psi.abs_sum();
    REQUIRE(p.phi * S <= 0.4);

    for (int path = 0; path < 5; ++path) {
        std::vector<double> v(n);
        for (double& e : v) e = noise(gen);
        const std::vector<double> log_h = oracle::stationary_recursion(psi.weights, p.omega, p.phi, v);
        std::vector<double> log_x(n);
        for (std::size_t t = 0; t < n; ++t) log_x[t] = p.phi * log_h[t] + v[t];

        const double h_bar = p.omega / (1.0 - p.phi * psi.partial_sum);
        const double filtered = filter_log_h(psi, p.omega, log_x, p.phi * h_bar, n + 1).back();
        CHECK_THAT(filtered, WithinAbs(log_h.back(), 1e-12));

        std::vector<double> history(v.rbegin(), v.rend());
        double V = 0.0;
        for (double e : v) V = std::max(V, std::abs(e));
        const double bound = S * (std::abs(p.omega * p.phi) + V) * std::pow(p.phi * S, L) / (1.0 - p.phi * S);
        const double expanded = volterra_oracle(p, history, L, K);
        CHECK(std::abs(expanded - filtered) <= bound);
        CHECK(std::abs(expanded - filtered) > 0.0);
    }
}

TEST_CASE("parameter JSON round trip", "[model]") {
    for (const RhygarchParams& p : {model1_params(), model2_params()}) {
        const nlohmann::json j = p;
        CHECK(j.get<RhygarchParams>() == p);
        CHECK(j.at("sigma_u").get<double>() == 0.4);
    }
    const nlohmann::json g = model1_params();
    CHECK(g.at("innovation") == "gaussian");
    CHECK_FALSE(g.contains("nu"));

    nlohmann::json extra = model1_params();
    extra["theta_u"] = 1.0;
    CHECK_THROWS_AS(extra.get<RhygarchParams>(), DataError);

    nlohmann::json missing = model1_params();
    missing.erase("phi");
    CHECK_THROWS_AS(missing.get<RhygarchParams>(), DataError);

    nlohmann::json no_nu = model2_params();
    no_nu.erase("nu");
    CHECK_THROWS_AS(no_nu.get<RhygarchParams>(), DataError);

    const nlohmann::json report = check_stationarity(model1_params(), 100);
    CHECK(report.at("first_moment_ok") == true);
    CHECK(report.at("second_moment_ok") == false);
}
