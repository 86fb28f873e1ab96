#pragma once

// Classical Mathieu characteristic value a0(q) for y'' + (a - 2q cos 2z) y = 0
// from the even pi-periodic recurrence, written as a continued fraction and
// bisected. Independent of the Fourier-matrix path used by the library.

#include <cmath>
#include <stdexcept>

namespace oracle {

// a * T(a) + 2 q^2 with T(a) = 4 - a - q^2/(16 - a - q^2/(36 - a - ...)).
inline long double mathieu_a0_residual(long double a, long double q, int depth = 400) {
    const long double q2 = q * q;
    long double tail = 0.0L;
    for (int n = depth; n >= 2; --n) {
        const long double k = 2.0L * n;
        tail = q2 / (k * k - a - tail);
    }
    const long double t = 4.0L - a - tail;
    return a * t + 2.0L * q2;
}

inline double mathieu_a0(double q) {
    q = std::fabs(q);
    if (q == 0.0) return 0.0;
    long double lo = -2.0L * q - 2.0L, hi = 0.0L;
    long double flo = mathieu_a0_residual(lo, q), fhi = mathieu_a0_residual(hi, q);
    if ((flo > 0) == (fhi > 0)) throw std::runtime_error("mathieu_a0: no sign change");
    for (int it = 0; it < 200; ++it) {
        const long double mid = 0.5L * (lo + hi);
        const long double fm = mathieu_a0_residual(mid, q);
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return static_cast<double>(0.5L * (lo + hi));
}

}  // namespace oracle
