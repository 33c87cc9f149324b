#include "rhygarch/fit.hpp"
#include "rhygarch/sim.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

using namespace rhygarch;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("unconstrained transform", "[fit]") {
    RhygarchParams p = model1_params();
    p.delta = 0.5;
    const std::vector<double> y = to_unconstrained(p);
    REQUIRE(y.size() == 10);
    CHECK(y[3] == 0.0);
    CHECK_THAT(y[9], WithinAbs(-0.916290731874155, 1e-14));

    for (const RhygarchParams& q : {model1_params(), model2_params()}) {
        const RhygarchParams back = from_unconstrained(to_unconstrained(q), q.innovation.kind);
        CHECK_THAT(back.omega, WithinAbs(q.omega, 1e-12));
        CHECK_THAT(back.gamma, WithinAbs(q.gamma, 1e-12));
        CHECK_THAT(back.beta, WithinAbs(q.beta, 1e-12));
        CHECK_THAT(back.delta, WithinAbs(q.delta, 1e-12));
        CHECK_THAT(back.d, WithinAbs(q.d, 1e-12));
        CHECK_THAT(back.xi, WithinAbs(q.xi, 1e-12));
        CHECK_THAT(back.phi, WithinAbs(q.phi, 1e-12));
        CHECK_THAT(back.tau1, WithinAbs(q.tau1, 1e-12));
        CHECK_THAT(back.tau2, WithinAbs(q.tau2, 1e-12));
        CHECK_THAT(back.sigma_u, WithinAbs(q.sigma_u, 1e-12));
        CHECK_THAT(back.innovation.nu, WithinAbs(q.innovation.nu, 1e-12));
        CHECK(back.innovation.kind == q.innovation.kind);
    }
    CHECK(to_unconstrained(model2_params()).size() == 11);
    CHECK(parameter_names(DistKind::StudentT).back() == "nu");
    CHECK_THROWS_AS(from_unconstrained(std::vector<double>(10, 0.0), DistKind::StudentT), DomainError);

    RhygarchParams edge = model1_params();
    edge.delta = 0.0;
    edge.d = 1.0;
    const std::vector<double> ye = to_unconstrained(edge);
    CHECK(std::isfinite(ye[3]));
    CHECK(ye[3] < -20.0);
    CHECK(ye[4] > 20.0);
}

TEST_CASE("numeric_gradient", "[fit][optim]") {
    const optim::Objective f = [](const optim::Vector& x) {
        double s = 0.0;
        for (double v : x) s -= v * v;
        return s;
    };
    const optim::Gradient g0 = optim::numeric_gradient(f, {0.0, 0.0, 0.0});
    for (double v : g0.value) CHECK_THAT(v, WithinAbs(0.0, 1e-8));
    const optim::Gradient g1 = optim::numeric_gradient(f, {1.0, 1.0, 1.0, 1.0});
    for (double v : g1.value) CHECK_THAT(v, WithinAbs(-2.0, 1e-6));
    CHECK(g1.one_sided == 0);

    const optim::Objective half = [](const optim::Vector& x) {
        return x[0] < 0.0 ? std::numeric_limits<double>::quiet_NaN() : x[0] * x[0] + x[0];
    };
    const optim::Gradient g2 = optim::numeric_gradient(half, {0.0});
    CHECK(g2.one_sided == 1);
    CHECK_THAT(g2.value[0], WithinAbs(1.0, 1e-4));
}

TEST_CASE("Nelder-Mead on the Rosenbrock function", "[fit][optim]") {
    const optim::Objective rosen = [](const optim::Vector& x) {
        return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    const optim::MinimizeResult r = optim::nelder_mead(rosen, {-1.2, 1.0}, {.f_tol = 1e-14, .x_tol = 1e-10});
    CHECK(r.converged);
    CHECK_THAT(r.x[0], WithinAbs(1.0, 1e-5));
    CHECK_THAT(r.x[1], WithinAbs(1.0, 1e-5));
    for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1]);

    const optim::Objective wall = [](const optim::Vector& x) {
        return x[0] < 0.5 ? std::numeric_limits<double>::quiet_NaN() : (x[0] - 1.0) * (x[0] - 1.0) + x[1] * x[1];
    };
    const optim::MinimizeResult w = optim::nelder_mead(wall, {0.6, 0.3});
    CHECK_THAT(w.x[0], WithinAbs(1.0, 1e-3));
}

TEST_CASE("BFGS on smooth problems", "[fit][optim]") {
    const optim::Objective quad = [](const optim::Vector& x) {
        return 3.0 * (x[0] - 1.0) * (x[0] - 1.0) + 0.5 * (x[1] + 2.0) * (x[1] + 2.0) + (x[0] - 1.0) * (x[1] + 2.0) +
               0.1 * std::pow(x[2], 2);
    };
    const optim::BfgsResult q = optim::bfgs(quad, {5.0, 5.0, 5.0});
    CHECK(q.converged);
    CHECK(q.grad_norm <= 1e-4);
    CHECK_THAT(q.x[0], WithinAbs(1.0, 1e-4));
    CHECK_THAT(q.x[1], WithinAbs(-2.0, 1e-4));
    CHECK_THAT(q.x[2], WithinAbs(0.0, 1e-3));
    for (std::size_t i = 1; i < q.trace.size(); ++i) CHECK(q.trace[i] <= q.trace[i - 1]);

    const optim::Objective rosen = [](const optim::Vector& x) {
        return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    const optim::BfgsResult r = optim::bfgs(rosen, {-1.2, 1.0}, {.max_iterations = 500});
    CHECK_THAT(r.x[0], WithinAbs(1.0, 1e-3));
}

TEST_CASE("default start", "[fit]") {
    const SeriesPair s = simulate(model1_params(), 1000, 6);
    const RhygarchParams p = default_start(s, DistKind::Gaussian, 1000);
    CHECK(p.omega == 0.05);
    CHECK(p.beta == 0.5);
    CHECK(p.delta == 0.5);
    CHECK(p.d == 0.3);
    CHECK(p.phi == 1.0);
    CHECK(p.sigma_u > 0.0);
    CHECK(std::isfinite(p.xi));
    CHECK(default_start(s, DistKind::StudentT, 1000).innovation.nu == 8.0);
    CHECK(std::isfinite(loglik_gg(p, s, 1000).total));
}

TEST_CASE("Model 1 GG fit at T = 3000", "[fit][slow]") {
    const SeriesPair s = simulate(model1_params(), 3000, derive_seed(2024, 1));
    const FitResult r = fit(s, DistKind::Gaussian);
    CHECK(r.converged);
    CHECK(r.grad_norm <= 1e-4);
    CHECK(validate(r.estimates).empty());
    CHECK(r.loglik.total >= loglik_gg(model1_params(), s).total);
    CHECK(r.loglik.total == r.loglik.returns_part + r.loglik.measure_part);
    CHECK(r.gradient.size() == 10);
    CHECK_THAT(r.estimates.d, WithinAbs(0.4, 0.35));
    CHECK_THAT(r.estimates.sigma_u, WithinAbs(0.4, 0.05));
    CHECK_THAT(r.estimates.tau1, WithinAbs(-0.08, 0.05));
    CHECK_THAT(r.estimates.tau2, WithinAbs(0.06, 0.05));

    const FitResult again = fit(s, DistKind::Gaussian);
    CHECK(again.estimates == r.estimates);
    CHECK(again.loglik.total == r.loglik.total);
    CHECK(again.grad_norm == r.grad_norm);

    const nlohmann::json j = r;
    CHECK(j.at("converged") == true);
    CHECK(j.at("gradient").contains("sigma_u"));
    CHECK(j.at("loglik").at("total").get<double>() == r.loglik.total);
}

TEST_CASE("Model 2 tG fit at T = 3000", "[fit][slow]") {
    const SeriesPair s = simulate(model2_params(), 3000, derive_seed(2024, 2));
    const FitResult r = fit(s, DistKind::StudentT);
    CHECK(r.converged);
    CHECK(r.estimates.innovation.kind == DistKind::StudentT);
    CHECK_THAT(r.estimates.innovation.nu, WithinAbs(3.17, 1.0));
    CHECK(r.gradient.size() == 11);
}

TEST_CASE("no volatility dynamics: fitted volatility stays flat", "[fit][slow]") {
    RhygarchParams p = model1_params();
    p.delta = 0.0;
    const SeriesPair s = simulate(p, 2000, derive_seed(2024, 3), {.burn_in = 500, .truncation = 300});
    FitOptions opt;
    opt.truncation = 300;
    const FitResult r = fit(s, DistKind::Gaussian, std::nullopt, opt);
    CHECK(r.converged);
    const std::vector<double>& lh = r.loglik.logh;
    const double m = std::accumulate(lh.begin(), lh.end(), 0.0) / static_cast<double>(lh.size());
    double ss = 0.0;
    for (double v : lh) ss += (v - m) * (v - m);
    CHECK(std::sqrt(ss / static_cast<double>(lh.size())) < 0.1);
    REQUIRE(r.gradient.size() == 10);
    CHECK(std::abs(r.gradient[4]) < 1e-3);

    // At the truth the likelihood does not depend on d at all.
    RhygarchParams moved = p;
    moved.d = 0.9;
    CHECK(loglik_gg(p, s, 300).total == loglik_gg(moved, s, 300).total);
}

TEST_CASE("fit rejects invalid data", "[fit]") {
    SeriesPair s = simulate(model1_params(), 50, 1, {.burn_in = 10, .truncation = 20});
    s.realized[3] = -1.0;
    CHECK_THROWS_AS(fit(s, DistKind::Gaussian), DataError);
}
