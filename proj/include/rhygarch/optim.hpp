#pragma once

// Derivative-free simplex search and a quasi-Newton polish with
// finite-difference gradients. Both minimize; callers negate likelihoods.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace rhygarch::optim {

using Vector = std::vector<double>;
using Objective = std::function<double(const Vector&)>;

struct Gradient {
    Vector value;
    std::size_t one_sided = 0;  // coordinates where a neighbour was non-finite
};

/// Central differences with step h_i = max(min_step, rel_step * |x_i|).
/// Falls back to a one-sided difference when one neighbour is non-finite.
inline Gradient numeric_gradient(const Objective& f, const Vector& x, double rel_step = 1e-5,
                                 double min_step = 1e-5, double fx = std::numeric_limits<double>::quiet_NaN()) {
    Gradient g;
    g.value.assign(x.size(), 0.0);
    Vector probe = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double h = std::max(min_step, rel_step * std::abs(x[i]));
        probe[i] = x[i] + h;
        const double up = f(probe);
        probe[i] = x[i] - h;
        const double down = f(probe);
        probe[i] = x[i];
        if (std::isfinite(up) && std::isfinite(down)) {
            g.value[i] = (up - down) / (2.0 * h);
            continue;
        }
        ++g.one_sided;
        if (std::isnan(fx)) fx = f(x);
        if (std::isfinite(up))
            g.value[i] = (up - fx) / h;
        else if (std::isfinite(down))
            g.value[i] = (fx - down) / h;
        else
            g.value[i] = std::numeric_limits<double>::quiet_NaN();
    }
    return g;
}

inline double norm2(const Vector& v) {
    return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

struct MinimizeResult {
    Vector x;
    double fx = std::numeric_limits<double>::infinity();
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    bool converged = false;
    std::vector<double> trace;  // best objective after each iteration
};

struct NelderMeadOptions {
    std::size_t max_evaluations = 20000;
    double f_tol = 1e-8;       // spread of objective values across the simplex
    double x_tol = 1e-7;       // simplex diameter
    double initial_step = 0.1;
};

/// Nelder-Mead with dimension-adaptive coefficients (Gao & Han). Non-finite
/// objective values are treated as +infinity.
inline MinimizeResult nelder_mead(const Objective& raw, Vector x0, const NelderMeadOptions& opt = {}) {
    const std::size_t n = x0.size();
    MinimizeResult res;
    auto f = [&](const Vector& x) {
        ++res.evaluations;
        const double v = raw(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    const double dn = static_cast<double>(n);
    const double reflect = 1.0;
    const double expand = 1.0 + 2.0 / dn;
    const double contract = 0.75 - 1.0 / (2.0 * dn);
    const double shrink = 1.0 - 1.0 / dn;

    std::vector<Vector> simplex(n + 1, x0);
    Vector fv(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double step = x0[i] != 0.0 ? opt.initial_step * std::max(1.0, std::abs(x0[i])) : opt.initial_step;
        simplex[i + 1][i] += step;
    }
    for (std::size_t i = 0; i <= n; ++i) fv[i] = f(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    Vector centroid(n), trial(n), trial2(n);
    while (res.evaluations < opt.max_evaluations) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];
        res.trace.push_back(fv[best]);
        ++res.iterations;

        double diameter = 0.0;
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t k = 0; k < n; ++k)
                diameter = std::max(diameter, std::abs(simplex[i][k] - simplex[best][k]));
        if (std::isfinite(fv[worst]) && fv[worst] - fv[best] <= opt.f_tol * (1.0 + std::abs(fv[best])) &&
            diameter <= opt.x_tol * (1.0 + norm2(simplex[best]))) {
            res.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i)
            if (i != worst)
                for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / dn;

        auto along = [&](double coef, Vector& out) {
            for (std::size_t k = 0; k < n; ++k) out[k] = centroid[k] + coef * (centroid[k] - simplex[worst][k]);
            return f(out);
        };

        const double fr = along(reflect, trial);
        if (fr < fv[best]) {
            const double fe = along(expand, trial2);
            if (fe < fr) {
                simplex[worst] = trial2;
                fv[worst] = fe;
            } else {
                simplex[worst] = trial;
                fv[worst] = fr;
            }
            continue;
        }
        if (fr < fv[second]) {
            simplex[worst] = trial;
            fv[worst] = fr;
            continue;
        }
        const bool outside = fr < fv[worst];
        const double fc = along(outside ? contract : -contract, trial2);
        if (fc < (outside ? fr : fv[worst])) {
            simplex[worst] = trial2;
            fv[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t k = 0; k < n; ++k) simplex[i][k] = simplex[best][k] + shrink * (simplex[i][k] - simplex[best][k]);
            fv[i] = f(simplex[i]);
        }
    }
    const auto it = std::min_element(fv.begin(), fv.end());
    res.x = simplex[static_cast<std::size_t>(it - fv.begin())];
    res.fx = *it;
    return res;
}

struct BfgsOptions {
    std::size_t max_iterations = 200;
    double grad_tol = 1e-4;
    double f_tol = 1e-12;  // relative objective change treated as stagnation
    double f_noise = 1e-13;  // relative rounding noise tolerated by the fallback line search
    double rel_step = 1e-5;
    double min_step = 1e-5;
};

struct BfgsResult : MinimizeResult {
    Vector gradient;
    double grad_norm = std::numeric_limits<double>::infinity();
    std::size_t noise_steps = 0;  // steps taken by the fallback line search
};

/// BFGS on the inverse Hessian with an Armijo backtracking line search and
/// finite-difference gradients. Converged means grad_norm <= grad_tol.
inline BfgsResult bfgs(const Objective& raw, Vector x, const BfgsOptions& opt = {}) {
    const std::size_t n = x.size();
    BfgsResult res;
    auto f = [&](const Vector& v) {
        ++res.evaluations;
        const double y = raw(v);
        return std::isfinite(y) ? y : std::numeric_limits<double>::infinity();
    };
    auto grad = [&](const Vector& v, double fv) {
        Gradient g = numeric_gradient(f, v, opt.rel_step, opt.min_step, fv);
        return g.value;
    };

    double fx = f(x);
    Vector g = grad(x, fx);
    std::vector<Vector> H(n, Vector(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) H[i][i] = 1.0 / std::max(1.0, std::abs(fx) * 1e-3);
    bool fresh = true;

    Vector p(n), xn(n), s(n), y(n), Hy(n);
    for (std::size_t iter = 0; iter < opt.max_iterations; ++iter) {
        res.grad_norm = norm2(g);
        res.trace.push_back(res.trace.empty() ? fx : std::min(fx, res.trace.back()));
        if (!(res.grad_norm > opt.grad_tol)) {
            res.converged = std::isfinite(res.grad_norm);
            break;
        }
        ++res.iterations;

        for (std::size_t i = 0; i < n; ++i) p[i] = -std::inner_product(H[i].begin(), H[i].end(), g.begin(), 0.0);
        double slope = std::inner_product(p.begin(), p.end(), g.begin(), 0.0);
        if (!(slope < 0.0)) {
            for (std::size_t i = 0; i < n; ++i) p[i] = -g[i];
            slope = -res.grad_norm * res.grad_norm;
            for (auto& row : H) std::fill(row.begin(), row.end(), 0.0);
            for (std::size_t i = 0; i < n; ++i) H[i][i] = 1.0;
            fresh = true;
        }

        double step = 1.0;
        double fn = std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] + step * p[i];
            fn = f(xn);
            if (fn <= fx + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        Vector gn;
        if (!accepted) {
            // Near the optimum the Armijo decrease can fall below the rounding
            // noise of the objective. Accept a step that keeps f within that
            // noise and shrinks the directional derivative instead.
            const double noise = opt.f_noise * (1.0 + std::abs(fx));
            step = 1.0;
            for (int ls = 0; ls < 30 && !accepted; ++ls, step *= 0.5) {
                for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] + step * p[i];
                fn = f(xn);
                if (!(fn <= fx + noise)) continue;
                gn = grad(xn, fn);
                const double slope_new = std::inner_product(p.begin(), p.end(), gn.begin(), 0.0);
                accepted = std::abs(slope_new) <= 0.9 * std::abs(slope) && norm2(gn) < res.grad_norm;
            }
            if (accepted) ++res.noise_steps;
        }
        if (!accepted) {
            if (fresh) break;  // even steepest descent makes no progress
            for (auto& row : H) std::fill(row.begin(), row.end(), 0.0);
            for (std::size_t i = 0; i < n; ++i) H[i][i] = 1.0 / std::max(1.0, res.grad_norm);
            fresh = true;
            continue;
        }

        if (gn.empty()) gn = grad(xn, fn);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = xn[i] - x[i];
            y[i] = gn[i] - g[i];
        }
        const double sy = std::inner_product(s.begin(), s.end(), y.begin(), 0.0);
        if (sy > 1e-12 * norm2(s) * norm2(y)) {
            if (fresh) {
                // Scale the initial inverse Hessian to the observed curvature.
                const double yy = std::inner_product(y.begin(), y.end(), y.begin(), 0.0);
                for (auto& row : H) std::fill(row.begin(), row.end(), 0.0);
                for (std::size_t i = 0; i < n; ++i) H[i][i] = sy / yy;
            }
            for (std::size_t i = 0; i < n; ++i) Hy[i] = std::inner_product(H[i].begin(), H[i].end(), y.begin(), 0.0);
            const double yHy = std::inner_product(y.begin(), y.end(), Hy.begin(), 0.0);
            const double rho = 1.0 / sy;
            const double c = (1.0 + rho * yHy) * rho;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t k = 0; k < n; ++k)
                    H[i][k] += c * s[i] * s[k] - rho * (Hy[i] * s[k] + s[i] * Hy[k]);
            fresh = false;
        }

        const double change = fx - fn;
        x = xn;
        fx = fn;
        g = gn;
        if (change <= opt.f_tol * (1.0 + std::abs(fx)) && fresh) break;
    }
    res.grad_norm = norm2(g);
    res.converged = res.converged || res.grad_norm <= opt.grad_tol;
    res.x = x;
    res.fx = fx;
    res.gradient = g;
    return res;
}

}  // namespace rhygarch::optim
