#include "truncfit/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "truncfit/error.hpp"

namespace truncfit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double grid_value(const Interval& b, int n, int i) {
    return b.lo + (b.hi - b.lo) * double(i) / double(n - 1);
}

// Evaluates f and maps NaN to +inf so comparisons stay total.
struct Counted {
    const Objective& f;
    std::size_t calls = 0;

    double operator()(std::span<const double> x) {
        ++calls;
        const double v = f(x);
        return std::isnan(v) ? kInf : v;
    }
};

MinimizeResult minimize_1d(Counted& f, const OptimizerConfig& cfg) {
    const Interval b = cfg.bounds[0];
    const int n = cfg.grid_points;
    int best = -1;
    double best_val = kInf;
    for (int i = 0; i < n; ++i) {
        const double x = grid_value(b, n, i);
        const double v = f(std::span(&x, 1));
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    if (best < 0) throw OptimizerError("objective is infeasible at every grid point");

    MinimizeResult r;
    double best_x = grid_value(b, n, best);
    double lo = grid_value(b, n, std::max(best - 1, 0));
    double hi = grid_value(b, n, std::min(best + 1, n - 1));

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = f(std::span(&x1, 1));
    double f2 = f(std::span(&x2, 1));
    while (r.iterations < cfg.max_refine_iters && hi - lo >= cfg.refine_tol) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(std::span(&x1, 1));
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(std::span(&x2, 1));
        }
        for (auto [x, v] : {std::pair{x1, f1}, std::pair{x2, f2}}) {
            if (v < best_val) {
                best_val = v;
                best_x = x;
            }
        }
        ++r.iterations;
        r.trace.push_back(best_val);
    }
    r.converged = hi - lo < cfg.refine_tol;
    r.x = {best_x};
    r.value = best_val;
    return r;
}

using Point2 = std::array<double, 2>;

struct NelderMeadRun {
    Point2 best;
    double value;
    int iterations;
    bool converged;
};

NelderMeadRun nelder_mead(Counted& f, const OptimizerConfig& cfg, Point2 start, double start_val, Point2 step,
                          int iter_budget, std::vector<double>& trace) {
    const auto& bounds = cfg.bounds;
    auto eval = [&](const Point2& p) {
        for (std::size_t d = 0; d < 2; ++d) {
            if (p[d] < bounds[d].lo || p[d] > bounds[d].hi) return kInf;
        }
        return f(std::span<const double>(p.data(), 2));
    };

    std::array<Point2, 3> s{start, start, start};
    std::array<double, 3> v{start_val, 0.0, 0.0};
    for (std::size_t d = 0; d < 2; ++d) {
        s[d + 1][d] += step[d];
        if (s[d + 1][d] > bounds[d].hi) s[d + 1][d] = start[d] - step[d];
        v[d + 1] = eval(s[d + 1]);
    }

    auto order = [&] {
        std::array<int, 3> idx{0, 1, 2};
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] < v[b]; });
        std::array<Point2, 3> s2;
        std::array<double, 3> v2;
        for (int k = 0; k < 3; ++k) {
            s2[k] = s[idx[k]];
            v2[k] = v[idx[k]];
        }
        s = s2;
        v = v2;
    };
    auto size = [&] {
        double m = 0.0;
        for (int k = 1; k < 3; ++k) {
            for (std::size_t d = 0; d < 2; ++d) m = std::max(m, std::abs(s[k][d] - s[0][d]));
        }
        return m;
    };
    auto lerp = [](const Point2& a, const Point2& b, double t) {
        return Point2{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
    };

    order();
    int it = 0;
    while (it < iter_budget && size() >= cfg.refine_tol) {
        ++it;
        const Point2 centroid{(s[0][0] + s[1][0]) / 2.0, (s[0][1] + s[1][1]) / 2.0};
        const Point2 xr = lerp(centroid, s[2], -1.0);
        const double fr = eval(xr);
        if (fr < v[0]) {
            const Point2 xe = lerp(centroid, s[2], -2.0);
            const double fe = eval(xe);
            if (fe < fr) {
                s[2] = xe;
                v[2] = fe;
            } else {
                s[2] = xr;
                v[2] = fr;
            }
        } else if (fr < v[1]) {
            s[2] = xr;
            v[2] = fr;
        } else {
            const bool outside = fr < v[2];
            const Point2 xc = outside ? lerp(centroid, s[2], -0.5) : lerp(centroid, s[2], 0.5);
            const double fc = eval(xc);
            if (fc < (outside ? fr : v[2])) {
                s[2] = xc;
                v[2] = fc;
            } else {
                for (int k = 1; k < 3; ++k) {
                    s[k] = lerp(s[0], s[k], 0.5);
                    v[k] = eval(s[k]);
                }
            }
        }
        order();
        trace.push_back(v[0]);
    }
    return {s[0], v[0], it, size() < cfg.refine_tol};
}

MinimizeResult minimize_2d(Counted& f, const OptimizerConfig& cfg) {
    const int n = cfg.grid_points;
    const auto& b = cfg.bounds;
    Point2 best{};
    double best_val = kInf;
    bool found = false;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Point2 p{grid_value(b[0], n, i), grid_value(b[1], n, j)};
            const double v = f(std::span<const double>(p.data(), 2));
            if (v < best_val) {
                best_val = v;
                best = p;
                found = true;
            }
        }
    }
    if (!found) throw OptimizerError("objective is infeasible at every grid point");

    MinimizeResult r;
    Point2 step{(b[0].hi - b[0].lo) / double(n - 1), (b[1].hi - b[1].lo) / double(n - 1)};
    bool converged = false;
    constexpr int kMaxRestarts = 8;
    for (int restart = 0; restart <= kMaxRestarts; ++restart) {
        auto run = nelder_mead(f, cfg, best, best_val, step, cfg.max_refine_iters, r.trace);
        r.iterations += run.iterations;
        converged = run.converged;
        const bool improved = run.value < best_val;
        if (run.value <= best_val) {
            best = run.best;
            best_val = run.value;
        }
        if (!improved && restart > 0) break;
        // Restart with a fresh simplex a tenth of the previous size.
        step = {step[0] / 10.0, step[1] / 10.0};
        step[0] = std::max(step[0], cfg.refine_tol);
        step[1] = std::max(step[1], cfg.refine_tol);
    }
    r.converged = converged;
    r.x = {best[0], best[1]};
    r.value = best_val;
    return r;
}

}  // namespace

void OptimizerConfig::validate(std::size_t dims) const {
    if (bounds.size() != dims) throw InvalidArgument("optimizer bounds must match the number of free parameters");
    for (const auto& b : bounds) {
        if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || !(b.hi > b.lo)) {
            throw InvalidArgument("optimizer bounds must be finite and nonempty");
        }
    }
    if (grid_points < 10) throw InvalidArgument("grid_points must be at least 10");
    if (!(refine_tol > 0.0)) throw InvalidArgument("refine_tol must be positive");
    if (max_refine_iters < 1) throw InvalidArgument("max_refine_iters must be positive");
}

MinimizeResult minimize(const Objective& f, const OptimizerConfig& config) {
    const std::size_t dims = config.bounds.size();
    if (dims != 1 && dims != 2) throw InvalidArgument("minimize supports one or two parameters");
    config.validate(dims);
    Counted counted{f};
    auto r = dims == 1 ? minimize_1d(counted, config) : minimize_2d(counted, config);
    r.evaluations = counted.calls;
    return r;
}

RootResult find_root(const std::function<double(double)>& f, Interval bounds, int grid_points) {
    RootResult r;
    auto eval = [&](double x) {
        ++r.evaluations;
        return f(x);
    };
    double lo = bounds.lo, hi = bounds.hi;
    double flo = eval(lo), fhi = eval(hi);
    auto opposite = [](double a, double b) { return (a <= 0.0 && b >= 0.0) || (a >= 0.0 && b <= 0.0); };
    if (!(std::isfinite(flo) && std::isfinite(fhi) && opposite(flo, fhi))) {
        bool bracketed = false;
        double prev_x = lo, prev_f = flo;
        for (int i = 1; i < grid_points && !bracketed; ++i) {
            const double x = grid_value(bounds, grid_points, i);
            const double fx = eval(x);
            if (std::isfinite(prev_f) && std::isfinite(fx) && opposite(prev_f, fx)) {
                lo = prev_x;
                flo = prev_f;
                hi = x;
                fhi = fx;
                bracketed = true;
            }
            prev_x = x;
            prev_f = fx;
        }
        if (!bracketed) throw NoRootError("no sign change of the estimating equation within the bounds");
    }
    if (flo == 0.0) return {lo, r.evaluations, 0.0};
    if (fhi == 0.0) return {hi, r.evaluations, 0.0};
    for (;;) {
        const double mid = lo + (hi - lo) / 2.0;
        if (mid <= lo || mid >= hi) break;
        const double fm = eval(mid);
        if (fm == 0.0) return {mid, r.evaluations, 0.0};
        if (opposite(flo, fm)) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    r.x = std::abs(flo) <= std::abs(fhi) ? lo : hi;
    r.bracket_width = hi - lo;
    return r;
}

}  // namespace truncfit
