#pragma once

namespace hetspec {

// exp(-|x|) I0(x): exponentially scaled modified Bessel function of order
// zero. Stable for arbitrarily large |x|, where I0 itself overflows.
double bessel_i0_scaled(double x);

// I0(x); overflows for |x| > ~709.
double bessel_i0(double x);

}  // namespace hetspec
