#include <cmath>

#include <gtest/gtest.h>

#include "symcool/bessel.hpp"
#include "symcool/lineshape.hpp"
#include "symcool/spectrum.hpp"
#include "symcool/units.hpp"

using namespace symcool;

namespace {

const double gamma_cd = 2.0 * M_PI * 47e6;

Spectrum synthetic(const std::function<double(double)>& f, double lo, double hi, int n) {
    Spectrum s;
    for (int i = 0; i < n; ++i) {
        SpectrumPoint p;
        p.detuning = lo + (hi - lo) * i / (n - 1);
        p.rate = f(p.detuning);
        s.points.push_back(p);
    }
    return s;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    double a = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) a += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    return a;
}

}  // namespace

TEST(Asymmetry, EvenLorentzianIsZero) {
    const auto s = synthetic([](double x) { return 1e4 * lorentzian(x, gamma_cd); }, -2 * gamma_cd, 2 * gamma_cd, 41);
    EXPECT_NEAR(asymmetry_metric(s, 0.0), 0.0, 1e-12);
}

TEST(Asymmetry, HalfLorentzianIsOne) {
    // centre value also zero, so the blue side carries no area at all
    const auto s = synthetic([](double x) { return x >= 0 ? 0.0 : 1e4 * lorentzian(x, gamma_cd); }, -2 * gamma_cd,
                             2 * gamma_cd, 41);
    EXPECT_NEAR(asymmetry_metric(s, 0.0), 1.0, 1e-12);
}

TEST(Asymmetry, TiltedLorentzianMatchesTrapezoid) {
    // grid symmetric about 0 with a point on the centre, so both sides share abscissae
    auto f = [](double x) { return 1e4 * lorentzian(x, gamma_cd) * (1.0 + 0.1 * x / gamma_cd); };
    const auto s = synthetic(f, -2 * gamma_cd, 2 * gamma_cd, 41);
    std::vector<double> xb, yb, xr, yr;
    for (const auto& p : s.points) {
        if (p.detuning >= 0) { xb.push_back(p.detuning); yb.push_back(p.rate); }
        if (p.detuning <= 0) { xr.push_back(-p.detuning); yr.push_back(p.rate); }
    }
    std::reverse(xr.begin(), xr.end());
    std::reverse(yr.begin(), yr.end());
    const double ib = trapezoid(xb, yb), ir = trapezoid(xr, yr);
    EXPECT_NEAR(asymmetry_metric(s, 0.0), std::abs(ib - ir) / (ib + ir), 1e-12);
}

TEST(Asymmetry, NeedsPointsOnBothSides) {
    const auto s = synthetic([](double) { return 1.0; }, -gamma_cd, -0.1 * gamma_cd, 10);
    EXPECT_THROW(asymmetry_metric(s, 0.0), ArgumentError);
}

TEST(BlueToRed, CollapsedAndSymmetric) {
    auto sym = synthetic([](double x) { return 1e4 * lorentzian(x, gamma_cd); }, -2 * gamma_cd, 2 * gamma_cd, 33);
    EXPECT_NEAR(blue_to_red_ratio(sym, 0.0, 0.5 * gamma_cd, 2 * gamma_cd), 1.0, 1e-12);
    auto cut = synthetic([](double x) { return x > 0 ? 100.0 : 1e4 * lorentzian(x, gamma_cd); }, -2 * gamma_cd,
                         2 * gamma_cd, 33);
    EXPECT_LT(blue_to_red_ratio(cut, 0.0, 0.5 * gamma_cd, 2 * gamma_cd), 0.2);
}

TEST(Lineshape, LorentzianHalfMaxAt23p5MHz) {
    const double w = units::mhz_to_angular(47.0);
    const std::vector<double> grid{-units::mhz_to_angular(23.5), 0.0, units::mhz_to_angular(23.5)};
    const auto y = analytic_lineshape(LineshapeKind::lorentzian, {w, 0, 0, 0}, grid);
    EXPECT_NEAR(y[0], 0.5, 1e-12);
    EXPECT_NEAR(y[1], 1.0, 1e-12);
    EXPECT_NEAR(y[2], 0.5, 1e-12);
}

TEST(Lineshape, VoigtWithoutGaussIsLorentzian) {
    std::vector<double> grid;
    for (int i = -50; i <= 50; ++i) grid.push_back(i * 0.1 * gamma_cd);
    const auto l = analytic_lineshape(LineshapeKind::lorentzian, {gamma_cd, 0, 0, 0}, grid);
    const auto v = analytic_lineshape(LineshapeKind::voigt, {gamma_cd, 0, 0, 0}, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_NEAR(v[i], l[i], 1e-6);
}

TEST(Lineshape, VoigtNearlyLorentzianForTinyGauss) {
    std::vector<double> grid;
    for (int i = -50; i <= 50; ++i) grid.push_back(i * 0.1 * gamma_cd);
    const auto l = analytic_lineshape(LineshapeKind::lorentzian, {gamma_cd, 0, 0, 0}, grid);
    const auto v = analytic_lineshape(LineshapeKind::voigt, {gamma_cd, 1e-7 * gamma_cd, 0, 0}, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_NEAR(v[i], l[i], 1e-6);
}

TEST(Lineshape, MicromotionCarrierRatio) {
    const double rf = units::mhz_to_angular(38.8);
    const double w = units::mhz_to_angular(1.0);  // narrow line: sidebands resolved
    std::vector<double> grid;
    for (int n = -12; n <= 12; ++n) grid.push_back(n * rf);
    const auto y = analytic_lineshape(LineshapeKind::micromotion_sidebands, {w, 0, 6.0, rf}, grid);
    double jmax = 0.0;
    for (int n = 0; n <= 12; ++n) jmax = std::max(jmax, std::pow(std::cyl_bessel_j(double(n), 6.0), 2));
    const double expected = std::pow(std::cyl_bessel_j(0.0, 6.0), 2) / jmax;
    EXPECT_NEAR(y[12], expected, 1e-3);
}

TEST(Lineshape, BadParameters) {
    const std::vector<double> grid{0.0};
    EXPECT_THROW(analytic_lineshape(LineshapeKind::lorentzian, {0, 0, 0, 0}, grid), ArgumentError);
    EXPECT_THROW(analytic_lineshape(LineshapeKind::micromotion_sidebands, {1, 0, -1, 1}, grid), ArgumentError);
}

TEST(Lineshape, FaddeevaAgainstKnownValues) {
    // w(i y) = exp(y^2) erfc(y)
    for (double y : {0.1, 0.5, 1.0, 3.0}) {
        EXPECT_NEAR(faddeeva({0.0, y}).real(), std::exp(y * y) * std::erfc(y), 1e-10);
    }
}

TEST(Grid, LinearGridInclusive) {
    const auto g = linear_grid(-150, 100, 5);
    ASSERT_EQ(g.size(), 51u);
    EXPECT_DOUBLE_EQ(g.front(), -150.0);
    EXPECT_DOUBLE_EQ(g.back(), 100.0);
    EXPECT_THROW(linear_grid(0, 1, 0), ConfigError);
}
