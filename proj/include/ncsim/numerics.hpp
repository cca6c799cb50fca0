#ifndef NCSIM_NUMERICS_HPP
#define NCSIM_NUMERICS_HPP

#include <functional>
#include <vector>

namespace ncsim {

// Scalar root finding and minimization kernels shared by the model solvers.
// All routines are deterministic; none allocate once called.

struct root_result {
    double x = 0.0;
    double f = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Bisection on [lo, hi]; f(lo) and f(hi) must differ in sign.
root_result bisect(const std::function<double(double)>& f,
                   double lo, double hi, double x_tol, int max_iter = 200);

// Newton iteration with step halving, safeguarded by an optional bracket.
// Converges on |f| < f_tol or |step| < x_tol.
root_result newton_1d(const std::function<double(double)>& f,
                      const std::function<double(double)>& df,
                      double x0, double f_tol, double x_tol,
                      int max_iter = 60, int max_halvings = 6);

// Brent minimization on [lo, hi] (golden section with parabolic steps).
// Returns the abscissa of the minimum to within x_tol.
double brent_minimize(const std::function<double(double)>& f,
                      double lo, double hi, double x_tol, int max_iter = 200);

// Piecewise-linear interpolation of y(x); xs strictly monotone.
double interp_linear(const std::vector<double>& xs,
                     const std::vector<double>& ys, double x);

} // namespace ncsim

#endif
