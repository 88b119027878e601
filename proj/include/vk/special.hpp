#pragma once

// Orthogonal-polynomial kernels shared by the basis evaluators. Everything is
// computed by upward recurrences; normalisations go through lgamma so nothing
// overflows for the quantum numbers used here (N up to ~30).

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace vk {

// Normalised Hermite functions without the Gaussian envelope:
// out[n] = psi_n(x) * exp(x^2/2), psi_n the unit-norm 1D oscillator state.
template <typename Scalar>
void hermite_polynomial_part(int nmax, Scalar x, Scalar* out)
{
    out[0] = Scalar(1) / std::sqrt(std::sqrt(std::numbers::pi_v<Scalar>));
    if (nmax == 0) return;
    out[1] = std::sqrt(Scalar(2)) * x * out[0];
    for (int n = 1; n < nmax; ++n)
        out[n + 1] = std::sqrt(Scalar(2) / Scalar(n + 1)) * x * out[n]
                     - std::sqrt(Scalar(n) / Scalar(n + 1)) * out[n - 1];
}

// Gegenbauer C_n^{(alpha)}(x), n >= 0.
template <typename Scalar>
Scalar gegenbauer(int n, Scalar alpha, Scalar x)
{
    if (n == 0) return Scalar(1);
    Scalar c0 = 1, c1 = 2 * alpha * x;
    for (int k = 2; k <= n; ++k) {
        Scalar c2 = (2 * x * (k + alpha - 1) * c1 - (k + 2 * alpha - 2) * c0) / Scalar(k);
        c0 = c1;
        c1 = c2;
    }
    return c1;
}

// Regular solid harmonics r^l Y_l^m(x,y,z) for 0 <= m <= l <= lmax, Condon-Shortley
// phase, orthonormal on the unit 2-sphere. Stored at index l*(l+1)/2 + m.
template <typename Scalar>
void solid_harmonics(int lmax, Scalar x, Scalar y, Scalar z, std::complex<Scalar>* out)
{
    using C = std::complex<Scalar>;
    const Scalar r2 = x * x + y * y + z * z;
    const C xy(x, y);
    auto at = [&](int l, int m) -> C& { return out[l * (l + 1) / 2 + m]; };
    at(0, 0) = C(Scalar(0.5) / std::sqrt(std::numbers::pi_v<Scalar>));
    for (int m = 0; m <= lmax; ++m) {
        if (m > 0) at(m, m) = -std::sqrt(Scalar(2 * m + 1) / Scalar(2 * m)) * xy * at(m - 1, m - 1);
        if (m + 1 <= lmax) at(m + 1, m) = std::sqrt(Scalar(2 * m + 3)) * z * at(m, m);
        for (int l = m + 2; l <= lmax; ++l) {
            const Scalar a = std::sqrt(Scalar(4 * l * l - 1) / Scalar(l * l - m * m));
            const Scalar b = std::sqrt(Scalar((l - 1) * (l - 1) - m * m) / Scalar(4 * (l - 1) * (l - 1) - 1));
            at(l, m) = a * (z * at(l - 1, m) - b * r2 * at(l - 2, m));
        }
    }
}

// Normalisation N_{N l} * l! of the hyperspherical harmonic written as
// N_{Nl} sin^l(chi) C_{N-l}^{(l+1)}(cos chi) Y_lm; the l! is folded in because
// the sin^l factor is carried by the solid harmonic.
inline double hyperspherical_norm(int N, int l)
{
    const double lg = 0.5 * ((2 * l + 1) * std::log(2.0) + std::lgamma(N - l + 1.0) + std::log(N + 1.0)
                             - std::log(std::numbers::pi) - std::lgamma(N + l + 2.0))
                      + std::lgamma(l + 1.0);
    return std::exp(lg);
}

} // namespace vk
