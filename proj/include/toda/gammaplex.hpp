#pragma once

#include <complex>
#include <vector>

#include "toda/errors.hpp"

namespace toda {

using cplx = std::complex<double>;

// Complex value stored as (log-modulus, phase).  Keeps products of many
// Gamma factors representable where the plain value would over/underflow.
// phase is normalized to (-pi, pi].  An exact zero (e.g. 1/Gamma at a pole)
// is the marker log_mod = -inf.
struct LogComplex {
    double log_mod = 0.0;
    double phase = 0.0;

    static LogComplex zero();
    static LogComplex from_complex(cplx z);
    cplx to_complex() const;
    bool is_zero() const;

    LogComplex& normalize(); // wrap phase into (-pi, pi]

    LogComplex operator*(const LogComplex& o) const;
    LogComplex operator/(const LogComplex& o) const;
    LogComplex conj() const;
};

// Product of Gammas over `numerators` divided by the product over
// `denominators`.  Evaluation is permutation-invariant within each list
// up to floating-point roundoff.
struct GammaProductSpec {
    std::vector<cplx> numerators;
    std::vector<cplx> denominators;
};

// Absolute tolerance inside which an argument counts as sitting on a pole
// of Gamma (the nonpositive integers).
inline constexpr double kGammaPoleTol = 1e-12;

bool near_gamma_pole(cplx z, double tol = kGammaPoleTol);

// log Gamma(z) as a LogComplex: log_mod = log|Gamma(z)|, phase = arg Gamma(z)
// in (-pi, pi].  Phase is principal per call; contour-continuous unwrapping
// is the caller's job.  Throws PoleError within kGammaPoleTol of 0, -1, -2, ...
LogComplex log_gamma(cplx z);

// Pi Gamma(num_i) / Pi Gamma(den_j).  Denominator poles are allowed and give
// the exact-zero marker; numerator poles throw PoleError.
LogComplex eval_product(const GammaProductSpec& spec);

} // namespace toda
