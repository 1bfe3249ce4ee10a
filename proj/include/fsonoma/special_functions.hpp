#pragma once

namespace fsonoma {

/// Natural logarithm of the modified Bessel function of the second kind,
/// log K_nu(x), for real order nu and x > 0.
///
/// Evaluated without forming K_nu itself, so it stays finite where K_nu
/// underflows (x in the thousands) or overflows (large order, tiny x).
/// Temme's series is used for x < 2 and Steed's continued fraction above,
/// followed by a log-domain forward recurrence in the order. Relative
/// accuracy of K_nu is better than 1e-12 for |nu| <= 40, x in [1e-8, 1e4].
double log_bessel_k(double nu, double x);

/// K_nu(x); underflows to 0 for large x.
double bessel_k(double nu, double x);

}  // namespace fsonoma
