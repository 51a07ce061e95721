#include "sde/cutoff.hpp"

#include <cmath>
#include <limits>

namespace ptn {

namespace {
double bump(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }
} // namespace

double CutoffFunction::operator()(double x) const {
    if (!(R < std::numeric_limits<double>::infinity())) return 1.0;
    double t = x / R;
    if (t <= 1.0) return 1.0;
    if (t >= 2.0) return 0.0;
    double up = bump(2.0 - t);
    return up / (up + bump(t - 1.0));
}

} // namespace ptn
