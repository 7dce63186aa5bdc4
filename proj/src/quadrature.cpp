#include "tiltkde/quadrature.hpp"

#include <cmath>
#include <cstdint>

#include "tiltkde/errors.hpp"

namespace tiltkde::quadrature {

namespace {

// Accepting an interval before this many forced splits risks missing
// structure between the five seed points entirely (narrow integrands on wide
// intervals produce a deceptively small error estimate).
constexpr int kMinForcedDepth = 10;

// Hard cap on integrand evaluations per call. Tolerances below the roundoff
// floor of the integrand would otherwise expand the refinement tree without
// bound; exhausting the budget is the non-convergence signal.
constexpr std::uint64_t kEvalBudget = 2'000'000;

struct Workspace {
    const std::function<double(double)>& f;
    std::uint64_t evals_left = kEvalBudget;

    double eval(double x) {
        if (evals_left == 0)
            throw QuadratureFailure(
                "adaptive Simpson exhausted its evaluation budget before converging");
        --evals_left;
        const double value = f(x);
        if (!std::isfinite(value))
            throw QuadratureFailure("integrand is not finite at an evaluation point");
        return value;
    }
};

double simpson(double fa, double fm, double fb, double width) {
    return (fa + 4.0 * fm + fb) * (width / 6.0);
}

double refine(Workspace& ws, double a, double b, double fa, double fm, double fb,
              double whole, double tol, int depth, int force) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = ws.eval(lm);
    const double frm = ws.eval(rm);

    const double left = simpson(fa, flm, fm, m - a);
    const double right = simpson(fm, frm, fb, b - m);
    const double err = (left + right - whole) / 15.0;
    const bool interval_collapsed = (b - a) < 1e-14 * (1.0 + std::abs(a) + std::abs(b));
    if ((force <= 0 && std::abs(err) <= tol) || interval_collapsed)
        return left + right + err;
    if (depth <= 0)
        throw QuadratureFailure("adaptive Simpson did not converge to the requested tolerance");
    return refine(ws, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, force - 1) +
           refine(ws, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, force - 1);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth) {
    if (!(a < b)) {
        if (a == b) return 0.0;
        throw InvalidInput("integration interval is reversed");
    }
    Workspace ws{f};
    const double m = 0.5 * (a + b);
    const double fa = ws.eval(a);
    const double fm = ws.eval(m);
    const double fb = ws.eval(b);
    const double whole = simpson(fa, fm, fb, b - a);
    return refine(ws, a, b, fa, fm, fb, whole, abs_tol, max_depth, kMinForcedDepth);
}

double adaptive_simpson_real_line(const std::function<double(double)>& f, double abs_tol,
                                  double initial_halfwidth, double max_halfwidth) {
    double halfwidth = initial_halfwidth;
    double previous = adaptive_simpson(f, -halfwidth, halfwidth, abs_tol);
    while (halfwidth < max_halfwidth) {
        halfwidth *= 2.0;
        const double widened = adaptive_simpson(f, -halfwidth, halfwidth, abs_tol);
        if (std::abs(widened - previous) <= abs_tol) return widened;
        previous = widened;
    }
    throw QuadratureFailure("real-line quadrature windows failed to agree; integrand tail too heavy");
}

} // namespace tiltkde::quadrature
