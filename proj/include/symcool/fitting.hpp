#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "symcool/error.hpp"
#include "symcool/lineshape.hpp"
#include "symcool/spectrum.hpp"
#include "symcool/units.hpp"

namespace symcool {

struct VoigtParams {
    double amplitude = 1.0;     // counts/s
    double center = 0.0;        // rad/s
    double fwhm_lorentz = 0.0;  // rad/s
    double fwhm_gauss = 0.0;    // rad/s
    double baseline = 0.0;      // counts/s

    void validate() const {
        if (!(amplitude > 0.0)) throw ArgumentError("Voigt amplitude must be > 0");
        if (!(fwhm_lorentz >= 0.0) || !(fwhm_gauss >= 0.0)) throw ArgumentError("Voigt widths must be >= 0");
        if (!std::isfinite(center) || !std::isfinite(baseline)) throw ArgumentError("Voigt center/baseline must be finite");
    }
};

inline double voigt_eval(double x, const VoigtParams& p) {
    return p.baseline + p.amplitude * voigt_profile(x - p.center, p.fwhm_lorentz, p.fwhm_gauss);
}

// rate = intercept + slope * detuning
struct LineParams {
    double slope = 0.0;      // counts/s per rad/s
    double intercept = 0.0;  // counts/s
    double operator()(double x) const { return intercept + slope * x; }
};

struct FitResult {
    VoigtParams params;
    std::optional<LineParams> line;
    std::optional<double> split;  // rad/s, piecewise fits only
    double residual_rms = 0.0;    // counts/s
    // order: amplitude, center, fwhm_lorentz, fwhm_gauss, baseline[, slope, intercept]
    Eigen::MatrixXd covariance;
    bool converged = false;
    int iterations = 0;
    std::vector<double> objective_history;  // chi^2 after each accepted step, first entry = start
};

struct FitData {
    std::vector<double> x;      // rad/s
    std::vector<double> y;      // counts/s
    std::vector<double> sigma;  // counts/s
};

inline constexpr int fit_max_iterations = 200;
inline constexpr double fit_edm_tolerance = 1e-6;

namespace detail {

inline FitData fit_data(const Spectrum& s, double sigma_floor_fraction = 0.01) {
    FitData d;
    double peak = 0.0;
    for (const auto& p : s.points) peak = std::max(peak, std::abs(p.rate));
    const double floor = std::max(sigma_floor_fraction * peak, 1e-300);
    for (const auto& p : s.points) {
        d.x.push_back(p.detuning);
        d.y.push_back(p.rate);
        d.sigma.push_back(std::max(p.stderr_rate, floor));
    }
    return d;
}

inline FitData subset(const FitData& d, double split, bool below) {
    FitData out;
    for (std::size_t i = 0; i < d.x.size(); ++i) {
        if ((d.x[i] <= split) == below) {
            out.x.push_back(d.x[i]);
            out.y.push_back(d.y[i]);
            out.sigma.push_back(d.sigma[i]);
        }
    }
    return out;
}

// Linear interpolation of the abscissa where the data crosses `level`,
// walking outward from index `from` in direction `dir`.
inline std::optional<double> crossing(const FitData& d, std::size_t from, int dir, double level) {
    for (long i = static_cast<long>(from); i + dir >= 0 && i + dir < static_cast<long>(d.x.size()); i += dir) {
        const auto a = static_cast<std::size_t>(i);
        const auto b = static_cast<std::size_t>(i + dir);
        if (d.y[b] <= level) {
            const double t = (d.y[a] - level) / (d.y[a] - d.y[b]);
            return d.x[a] + t * (d.x[b] - d.x[a]);
        }
    }
    return std::nullopt;
}

inline VoigtParams initial_guess(const FitData& d) {
    const auto imax = static_cast<std::size_t>(std::max_element(d.y.begin(), d.y.end()) - d.y.begin());
    const double ymax = d.y[imax];
    const double ymin = *std::min_element(d.y.begin(), d.y.end());
    VoigtParams p;
    p.center = d.x[imax];
    p.amplitude = ymax - ymin;
    p.baseline = ymin;
    const double half = ymin + 0.5 * p.amplitude;
    const auto lo = crossing(d, imax, -1, half);
    const auto hi = crossing(d, imax, +1, half);
    double width;
    if (lo && hi) width = *hi - *lo;
    else if (lo) width = 2.0 * (p.center - *lo);
    else if (hi) width = 2.0 * (*hi - p.center);
    else width = 0.25 * (d.x.back() - d.x.front());
    p.fwhm_lorentz = 0.7 * width;
    p.fwhm_gauss = 0.3 * width;
    return p;
}

// Internal parameter vector: amplitude and baseline in units of the data
// scale, center and Lorentz width in MHz, and the squared Gaussian width in
// MHz^2. The model is smooth in w_G^2 down to zero, where it is held by a
// bound; in w_G itself the curvature vanishes at zero and Gauss-Newton stalls.
struct VoigtScaling {
    double y_scale = 1.0;
    double x_scale = units::mhz_to_angular(1.0);

    Eigen::Matrix<double, 5, 1> pack(const VoigtParams& p) const {
        Eigen::Matrix<double, 5, 1> v;
        const double g = p.fwhm_gauss / x_scale;
        v << p.amplitude / y_scale, p.center / x_scale, p.fwhm_lorentz / x_scale, g * g, p.baseline / y_scale;
        return v;
    }
    VoigtParams unpack(const Eigen::Matrix<double, 5, 1>& v) const {
        VoigtParams p;
        p.amplitude = v[0] * y_scale;
        p.center = v[1] * x_scale;
        p.fwhm_lorentz = std::abs(v[2]) * x_scale;
        p.fwhm_gauss = std::sqrt(std::max(v[3], 0.0)) * x_scale;
        p.baseline = v[4] * y_scale;
        return p;
    }
    Eigen::Matrix<double, 5, 1> units_of() const {
        Eigen::Matrix<double, 5, 1> u;
        u << y_scale, x_scale, x_scale, x_scale, y_scale;
        return u;
    }
};

inline double scaled_model(double xs, const Eigen::Matrix<double, 5, 1>& v) {
    return v[4] + v[0] * voigt_profile(xs - v[1], std::abs(v[2]), std::sqrt(std::max(v[3], 0.0)));
}

struct VoigtFitCore {
    VoigtParams params;
    Eigen::Matrix<double, 5, 5> covariance;
    bool converged = false;
    int iterations = 0;
    std::vector<double> history;
};

inline Eigen::MatrixXd inverse_psd(const Eigen::MatrixXd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    const auto& ev = es.eigenvalues();
    const double top = ev.cwiseAbs().maxCoeff();
    Eigen::VectorXd inv(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        inv[i] = ev[i] > 1e-15 * top ? 1.0 / ev[i] : 0.0;
    }
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

// Levenberg-Marquardt on the weighted residuals (model - y) / sigma, with
// w_G^2 >= 0 enforced as an active-set bound.
inline VoigtFitCore levenberg_marquardt(const FitData& d, const VoigtParams& start) {
    using Vec5 = Eigen::Matrix<double, 5, 1>;
    using Mat5 = Eigen::Matrix<double, 5, 5>;
    constexpr int kg = 3;
    const std::size_t n = d.x.size();
    VoigtScaling sc;
    sc.y_scale = std::max(std::abs(start.amplitude), 1e-300);
    std::vector<double> xs(n), ys(n), ws(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = d.x[i] / sc.x_scale;
        ys[i] = d.y[i] / sc.y_scale;
        ws[i] = sc.y_scale / d.sigma[i];
    }
    auto residuals = [&](const Vec5& v, Eigen::VectorXd& r) {
        r.resize(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) r[static_cast<Eigen::Index>(i)] = (scaled_model(xs[i], v) - ys[i]) * ws[i];
    };
    auto jacobian = [&](const Vec5& v, Eigen::MatrixXd& jac) {
        jac.resize(static_cast<Eigen::Index>(n), 5);
        Eigen::VectorXd rp, rm;
        for (int k = 0; k < 5; ++k) {
            const double h = 1e-6 * std::max(1.0, std::abs(v[k]));
            Vec5 vp = v, vm = v;
            vp[k] += h;
            vm[k] -= h;
            if (k == kg) vm[k] = std::max(vm[k], 0.0);  // one-sided at the bound
            residuals(vp, rp);
            residuals(vm, rm);
            jac.col(k) = (rp - rm) / (vp[k] - vm[k]);
        }
    };

    Vec5 v = sc.pack(start);
    Eigen::VectorXd r;
    residuals(v, r);
    double chi2 = r.squaredNorm();
    VoigtFitCore out;
    out.history.push_back(chi2);
    double lambda = 1e-3;
    Eigen::MatrixXd jac;
    jacobian(v, jac);
    bool fresh = true;
    Mat5 a;
    Vec5 g;
    Vec5 damping = Vec5::Zero();
    for (int iter = 0; iter < fit_max_iterations; ++iter) {
        out.iterations = iter + 1;
        if (fresh) {
            a = jac.transpose() * jac;
            g = jac.transpose() * r;
            fresh = false;
        }
        // a Gaussian width at zero that would have to go negative is held there
        const bool held = v[kg] <= 0.0 && g[kg] >= 0.0;
        Mat5 af = a;
        Vec5 gf = g;
        if (held) {
            af.row(kg).setZero();
            af.col(kg).setZero();
            af(kg, kg) = 1.0;
            gf[kg] = 0.0;
        }
        // estimated distance to the minimum over the free parameters, in chi^2 units
        const double edm = 0.5 * gf.dot(inverse_psd(af) * gf);
        if (gf.norm() < 1e-10 || edm < fit_edm_tolerance) {
            out.converged = true;
            break;
        }
        // damp with the largest curvature seen so far, so a parameter whose
        // curvature collapses cannot take huge steps
        damping = damping.cwiseMax(a.diagonal());
        Mat5 damped = af;
        const double dmax = damping.maxCoeff();
        for (int k = 0; k < 5; ++k) {
            if (held && k == kg) continue;
            damped(k, k) += lambda * std::max(damping[k], 1e-12 * dmax);
        }
        const Vec5 step = damped.ldlt().solve(-gf);
        Vec5 trial = v + step;
        trial[kg] = std::max(trial[kg], 0.0);
        Eigen::VectorXd rt;
        residuals(trial, rt);
        const double chi2_trial = rt.squaredNorm();
        const bool small = (trial - v).norm() < 1e-8 * (v.norm() + 1e-8);
        if (std::isfinite(chi2_trial) && chi2_trial <= chi2) {
            v = trial;
            r = rt;
            chi2 = chi2_trial;
            out.history.push_back(chi2);
            lambda = std::max(lambda * 0.1, 1e-12);
            jacobian(v, jac);
            fresh = true;
        } else {
            lambda *= 10.0;
        }
        if (small || lambda > 1e16) {
            out.converged = small;
            break;
        }
    }
    if (!fresh) jacobian(v, jac);
    // Covariance in w_G^2; its 1-sigma interval is mapped back through the
    // square root to give the w_G entries.
    Mat5 cov_scaled = inverse_psd(jac.transpose() * jac);
    const double var_s = cov_scaled(kg, kg);
    if (var_s > 0.0) {
        const double s0 = std::max(v[kg], 0.0), sd = std::sqrt(var_s);
        const double sigma_w = 0.5 * (std::sqrt(s0 + sd) - std::sqrt(std::max(s0 - sd, 0.0)));
        const double f = sigma_w / sd;
        cov_scaled.row(kg) *= f;
        cov_scaled.col(kg) *= f;
    }
    const Vec5 u = sc.units_of();
    out.covariance = u.asDiagonal() * cov_scaled * u.asDiagonal();
    out.params = sc.unpack(v);
    return out;
}

inline double rms(const FitData& d, const std::vector<double>& model) {
    double s = 0.0;
    for (std::size_t i = 0; i < d.y.size(); ++i) s += (model[i] - d.y[i]) * (model[i] - d.y[i]);
    return std::sqrt(s / static_cast<double>(d.y.size()));
}

}  // namespace detail

inline FitResult fit_voigt(const FitData& d) {
    if (d.x.size() < 8) throw ArgumentError("Voigt fit needs at least 8 points");
    const double ymax = *std::max_element(d.y.begin(), d.y.end());
    const double ymin = *std::min_element(d.y.begin(), d.y.end());
    if (!(ymax > ymin)) throw ArgumentError("spectrum has no dynamic range");
    const auto core = detail::levenberg_marquardt(d, detail::initial_guess(d));
    FitResult res;
    res.params = core.params;
    res.covariance = core.covariance;
    res.converged = core.converged;
    res.iterations = core.iterations;
    res.objective_history = core.history;
    std::vector<double> model;
    for (double x : d.x) model.push_back(voigt_eval(x, res.params));
    res.residual_rms = detail::rms(d, model);
    return res;
}

inline FitResult fit_voigt(const Spectrum& s) { return fit_voigt(detail::fit_data(s)); }

inline LineParams fit_line(const FitData& d, Eigen::Matrix2d* covariance = nullptr) {
    Eigen::MatrixXd a(static_cast<Eigen::Index>(d.x.size()), 2);
    Eigen::VectorXd b(static_cast<Eigen::Index>(d.x.size()));
    // abscissa in MHz keeps the normal equations well conditioned
    const double xs = units::mhz_to_angular(1.0);
    for (std::size_t i = 0; i < d.x.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        a(k, 0) = d.x[i] / xs / d.sigma[i];
        a(k, 1) = 1.0 / d.sigma[i];
        b[k] = d.y[i] / d.sigma[i];
    }
    const Eigen::Matrix2d ata = a.transpose() * a;
    const Eigen::Vector2d sol = ata.ldlt().solve(a.transpose() * b);
    if (covariance) {
        Eigen::Matrix2d c = ata.inverse();
        c.row(0) /= xs;
        c.col(0) /= xs;
        *covariance = c;
    }
    return LineParams{sol[0] / xs, sol[1]};
}

// Voigt below-or-at `split`, independent straight line above.
inline FitResult fit_piecewise(const Spectrum& s, double split) {
    const FitData all = detail::fit_data(s);
    const FitData below = detail::subset(all, split, true);
    const FitData above = detail::subset(all, split, false);
    if (below.x.size() < 4 || above.x.size() < 4) {
        throw ArgumentError("piecewise fit needs at least 4 points on each side of the split");
    }
    const double ymax = *std::max_element(below.y.begin(), below.y.end());
    const double ymin = *std::min_element(below.y.begin(), below.y.end());
    if (!(ymax > ymin)) throw ArgumentError("below-split data has no dynamic range");
    const auto core = detail::levenberg_marquardt(below, detail::initial_guess(below));
    Eigen::Matrix2d line_cov;
    const LineParams line = fit_line(above, &line_cov);

    FitResult res;
    res.params = core.params;
    res.line = line;
    res.split = split;
    res.converged = core.converged;
    res.iterations = core.iterations;
    res.objective_history = core.history;
    res.covariance = Eigen::MatrixXd::Zero(7, 7);
    res.covariance.topLeftCorner(5, 5) = core.covariance;
    res.covariance.bottomRightCorner(2, 2) = line_cov;
    std::vector<double> model;
    for (double x : all.x) model.push_back(x <= split ? voigt_eval(x, res.params) : line(x));
    res.residual_rms = detail::rms(all, model);
    return res;
}

}  // namespace symcool
