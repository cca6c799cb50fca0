#include "ncsim/numerics.hpp"

#include <algorithm>
#include <cmath>

#include "ncsim/errors.hpp"

namespace ncsim {

root_result bisect(const std::function<double(double)>& f,
                   double lo, double hi, double x_tol, int max_iter) {
    double flo = f(lo);
    double fhi = f(hi);
    root_result out;
    if (flo == 0.0) { out = {lo, 0.0, 0, true}; return out; }
    if (fhi == 0.0) { out = {hi, 0.0, 0, true}; return out; }
    require(std::signbit(flo) != std::signbit(fhi), error_kind::not_bracketed,
            "bisect: no sign change on interval");
    for (int it = 0; it < max_iter; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        ++out.iterations;
        if (fm == 0.0 || hi - lo < x_tol) {
            out.x = mid;
            out.f = fm;
            out.converged = true;
            return out;
        }
        if (std::signbit(fm) == std::signbit(flo)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    out.x = 0.5 * (lo + hi);
    out.f = f(out.x);
    out.converged = hi - lo < x_tol;
    return out;
}

root_result newton_1d(const std::function<double(double)>& f,
                      const std::function<double(double)>& df,
                      double x0, double f_tol, double x_tol,
                      int max_iter, int max_halvings) {
    root_result out;
    double x = x0;
    double fx = f(x);
    for (int it = 0; it < max_iter; ++it) {
        out.iterations = it + 1;
        if (std::abs(fx) < f_tol) {
            out = {x, fx, it + 1, true};
            return out;
        }
        double d = df(x);
        if (d == 0.0 || !std::isfinite(d)) break;
        double step = -fx / d;
        // Halve until the residual stops growing.
        double damp = 1.0;
        double xn = x + step;
        double fn = f(xn);
        for (int h = 0; h < max_halvings && std::abs(fn) > std::abs(fx); ++h) {
            damp *= 0.5;
            xn = x + damp * step;
            fn = f(xn);
        }
        if (std::abs(xn - x) < x_tol) {
            out = {xn, fn, it + 1, std::abs(fn) < f_tol || std::abs(fn) <= std::abs(fx)};
            return out;
        }
        x = xn;
        fx = fn;
    }
    out.x = x;
    out.f = fx;
    out.converged = std::abs(fx) < f_tol;
    return out;
}

double brent_minimize(const std::function<double(double)>& f,
                      double lo, double hi, double x_tol, int max_iter) {
    const double golden = 0.3819660112501051;
    double a = lo, b = hi;
    double x = a + golden * (b - a);
    double w = x, v = x;
    double fx = f(x), fw = fx, fv = fx;
    double d = 0.0, e = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        double xm = 0.5 * (a + b);
        double tol1 = x_tol * std::abs(x) + 1e-300;
        double tol2 = 2.0 * tol1;
        if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) return x;
        bool parabolic = false;
        if (std::abs(e) > tol1) {
            // Trial parabolic fit through x, w, v.
            double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::abs(q);
            double e_old = e;
            e = d;
            if (std::abs(p) < std::abs(0.5 * q * e_old) &&
                p > q * (a - x) && p < q * (b - x)) {
                d = p / q;
                double u = x + d;
                if (u - a < tol2 || b - u < tol2)
                    d = (xm > x) ? tol1 : -tol1;
                parabolic = true;
            }
        }
        if (!parabolic) {
            e = (x >= xm) ? a - x : b - x;
            d = golden * e;
        }
        double u = (std::abs(d) >= tol1) ? x + d : x + ((d > 0) ? tol1 : -tol1);
        double fu = f(u);
        if (fu <= fx) {
            if (u >= x) a = x; else b = x;
            v = w; fv = fw;
            w = x; fw = fx;
            x = u; fx = fu;
        } else {
            if (u < x) a = u; else b = u;
            if (fu <= fw || w == x) {
                v = w; fv = fw;
                w = u; fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u; fv = fu;
            }
        }
    }
    return x;
}

double interp_linear(const std::vector<double>& xs,
                     const std::vector<double>& ys, double x) {
    require(xs.size() == ys.size() && xs.size() >= 2, error_kind::invalid_input,
            "interp_linear: need two samples");
    bool ascending = xs.front() < xs.back();
    auto inside = [&](double a, double b) {
        return ascending ? (x >= a && x <= b) : (x <= a && x >= b);
    };
    require(inside(xs.front(), xs.back()), error_kind::out_of_range,
            "interp_linear: query outside table");
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (inside(xs[i - 1], xs[i])) {
            double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
            return ys[i - 1] + t * (ys[i] - ys[i - 1]);
        }
    }
    return ys.back();
}

} // namespace ncsim
