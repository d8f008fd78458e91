#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "symcool/bessel.hpp"
#include "symcool/error.hpp"

namespace symcool {

namespace detail {

// Coefficients of Weideman's rational approximation (N = 32) of the Faddeeva
// function, computed once with a direct DFT.
struct WeidemanTable {
    static constexpr int N = 32;
    std::array<double, N> a{};  // highest power first
    double L = 0.0;

    WeidemanTable() {
        const int M = 2 * N;
        const int M2 = 2 * M;
        L = std::sqrt(N / std::sqrt(2.0));
        std::vector<double> f(M2, 0.0);
        for (int k = -M + 1; k <= M - 1; ++k) {
            const double t = L * std::tan(k * std::numbers::pi / M / 2.0);
            f[static_cast<std::size_t>(k + M)] = std::exp(-t * t) * (L * L + t * t);
        }
        // fftshift, then take the real part of the DFT at frequencies 1..N
        std::vector<double> g(M2);
        for (int i = 0; i < M2; ++i) g[static_cast<std::size_t>(i)] = f[static_cast<std::size_t>((i + M) % M2)];
        for (int j = 1; j <= N; ++j) {
            double re = 0.0;
            for (int i = 0; i < M2; ++i) re += g[static_cast<std::size_t>(i)] * std::cos(2.0 * std::numbers::pi * j * i / M2);
            a[static_cast<std::size_t>(N - j)] = re / M2;
        }
    }
};

inline const WeidemanTable& weideman_table() {
    static const WeidemanTable table;
    return table;
}

}  // namespace detail

// Faddeeva function w(z) = exp(-z^2) erfc(-i z) for Im z >= 0. Rational
// approximation inside |z| < 15, Laplace continued fraction outside.
inline std::complex<double> faddeeva(std::complex<double> z) {
    using C = std::complex<double>;
    const C i(0.0, 1.0);
    if (std::abs(z) >= 15.0) {
        C s = 0.0;
        for (int n = 12; n >= 1; --n) s = (n / 2.0) / (z - s);
        return i / std::sqrt(std::numbers::pi) / (z - s);
    }
    const auto& tab = detail::weideman_table();
    const C lz = tab.L - i * z;
    const C Z = (tab.L + i * z) / lz;
    C p = 0.0;
    for (double c : tab.a) p = p * Z + c;
    return 2.0 * p / (lz * lz) + (1.0 / std::sqrt(std::numbers::pi)) / lz;
}

inline constexpr double fwhm_to_sigma = 0.42466090014400953;  // 1 / (2 sqrt(2 ln 2))

// Unit-peak Lorentzian of full width fwhm.
inline double lorentzian(double x, double fwhm) {
    const double h = 0.5 * fwhm;
    return h * h / (x * x + h * h);
}

// Unit-peak Gaussian of full width fwhm.
inline double gaussian(double x, double fwhm) {
    const double s = fwhm * fwhm_to_sigma;
    return std::exp(-0.5 * x * x / (s * s));
}

// Unit-peak Voigt profile (Lorentzian of fwhm_l convolved with Gaussian of
// fwhm_g). Exactly even in x.
inline double voigt_profile(double x, double fwhm_l, double fwhm_g) {
    if (fwhm_l < 0.0 || fwhm_g < 0.0) throw ArgumentError("Voigt widths must be >= 0");
    if (fwhm_g == 0.0) {
        if (fwhm_l == 0.0) return x == 0.0 ? 1.0 : 0.0;
        return lorentzian(x, fwhm_l);
    }
    if (fwhm_l == 0.0) return gaussian(x, fwhm_g);
    const double scale = 1.0 / (std::sqrt(2.0) * fwhm_g * fwhm_to_sigma);
    const double y = 0.5 * fwhm_l * scale;
    const double peak = faddeeva({0.0, y}).real();
    return faddeeva({std::abs(x) * scale, y}).real() / peak;
}

// Olivero-Longbothum estimate of the Voigt FWHM.
inline double voigt_fwhm_estimate(double fwhm_l, double fwhm_g) {
    return 0.5346 * fwhm_l + std::sqrt(0.2166 * fwhm_l * fwhm_l + fwhm_g * fwhm_g);
}

enum class LineshapeKind { lorentzian, voigt, micromotion_sidebands };

struct LineshapeParams {
    double fwhm_lorentz = 0.0;
    double fwhm_gauss = 0.0;
    double beta = 0.0;      // micromotion modulation index
    double rf_omega = 0.0;  // sideband spacing (same units as the grid)
};

// Lineshape sampled on `grid`, scaled to unit maximum over the grid.
inline std::vector<double> analytic_lineshape(LineshapeKind kind, const LineshapeParams& p,
                                              const std::vector<double>& grid) {
    std::vector<double> out(grid.size());
    switch (kind) {
        case LineshapeKind::lorentzian:
            if (!(p.fwhm_lorentz > 0.0)) throw ArgumentError("lorentzian requires fwhm_lorentz > 0");
            for (std::size_t i = 0; i < grid.size(); ++i) out[i] = lorentzian(grid[i], p.fwhm_lorentz);
            break;
        case LineshapeKind::voigt:
            if (!(p.fwhm_lorentz > 0.0) && !(p.fwhm_gauss > 0.0)) throw ArgumentError("voigt requires a positive width");
            if (p.fwhm_lorentz < 0.0 || p.fwhm_gauss < 0.0) throw ArgumentError("voigt widths must be >= 0");
            for (std::size_t i = 0; i < grid.size(); ++i) out[i] = voigt_profile(grid[i], p.fwhm_lorentz, p.fwhm_gauss);
            break;
        case LineshapeKind::micromotion_sidebands: {
            if (!(p.fwhm_lorentz > 0.0)) throw ArgumentError("sidebands require fwhm_lorentz > 0");
            if (!(p.beta >= 0.0)) throw ArgumentError("sidebands require beta >= 0");
            if (!(p.rf_omega > 0.0)) throw ArgumentError("sidebands require rf_omega > 0");
            const SidebandWeights w = sideband_weights(p.beta);
            for (std::size_t i = 0; i < grid.size(); ++i) {
                double v = w.weight[0] * lorentzian(grid[i], p.fwhm_lorentz);
                for (int n = 1; n <= w.order(); ++n) {
                    v += w.weight[static_cast<std::size_t>(n)] *
                         (lorentzian(grid[i] - n * p.rf_omega, p.fwhm_lorentz) +
                          lorentzian(grid[i] + n * p.rf_omega, p.fwhm_lorentz));
                }
                out[i] = v;
            }
            break;
        }
    }
    double peak = 0.0;
    for (double v : out) peak = std::max(peak, v);
    if (peak > 0.0) {
        for (double& v : out) v /= peak;
    }
    return out;
}

}  // namespace symcool
