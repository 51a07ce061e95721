#pragma once

namespace ptn {

// Smooth non-increasing cutoff: f_R = 1 on [0,R], 0 on [2R, inf), C-infinity
// bridge on [R,2R] built from exp(-1/x) bumps.  The source description ("1 on
// [0,R], 0 on [R,inf)") is not smoothable; the [R,2R] bridge keeps "1 on
// [0,R]" exact.  R = infinity disables the cutoff (f == 1).
struct CutoffFunction {
    double R;
    double operator()(double x) const;
};

} // namespace ptn
