// SPDX-License-Identifier: Apache-2.0

#ifndef SUBWAVE_SPECIAL_HPP
#define SUBWAVE_SPECIAL_HPP

#include <complex>
#include <vector>

namespace subwave::special
{

using cplx = std::complex<double>;

// Integer-order Bessel and Hankel functions of complex argument.
//
// J_n is entire. Y_n and H_n^(1) use the logarithm with its branch cut on the
// negative imaginary axis, arg z in (-pi/2, 3pi/2]. On Re z > 0 this coincides
// with the principal branch and it is the continuation of H_n^(1) from the
// upper half plane into the lower half plane (the resonance sheet).
//
// Hankel and Y evaluation throws std::range_error when Im z > 8 (H^(1) is
// then obtained through cancellation), when Im z < -15 (the forward sweep
// amplifies rounding by roughly exp(2|Im z|) at orders above |z|) or when the
// recurrence overflows. J_n throws only for |Im z| > 600 or non-finite z.
// J_0(z), ..., J_nmax(z).
std::vector<cplx> BesselJSequence(int nmax, cplx z);

// H_0^(1)(z), ..., H_nmax^(1)(z).
std::vector<cplx> Hankel1Sequence(int nmax, cplx z);

cplx BesselJ(int n, cplx z);
cplx BesselY(int n, cplx z);
cplx Hankel1(int n, cplx z);

// Derivatives with respect to the argument.
cplx BesselJPrime(int n, cplx z);
cplx Hankel1Prime(int n, cplx z);

// z H_n'(z) / H_n(z) for n = 0..nmax, computed from one forward sweep.
std::vector<cplx> Hankel1LogDerivativeSequence(int nmax, cplx z);

// Logarithm with the cut on the negative imaginary axis.
cplx LogResonanceSheet(cplx z);

// Square root on the same sheet: sqrt(z) = exp(log(z)/2).
cplx SqrtResonanceSheet(cplx z);

}  // namespace subwave::special

#endif  // SUBWAVE_SPECIAL_HPP
