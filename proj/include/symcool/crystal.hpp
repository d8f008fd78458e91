#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "symcool/constants.hpp"
#include "symcool/error.hpp"
#include "symcool/species.hpp"
#include "symcool/trap.hpp"
#include "symcool/vec.hpp"

namespace symcool {

struct Ion {
    IonSpecies species;
    Vec3 position = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();
};

// One- or two-ion crystal; positions pairwise distinct.
struct IonCrystal {
    std::vector<Ion> ions;

    std::size_t size() const { return ions.size(); }

    void validate() const {
        if (ions.empty() || ions.size() > 2) {
            throw ConfigError("crystal must hold 1 or 2 ions, got " + std::to_string(ions.size()));
        }
        for (const auto& ion : ions) {
            if (!ion.species.valid()) throw ConfigError("invalid species " + ion.species.label);
            if (!ion.position.allFinite() || !ion.velocity.allFinite()) {
                throw ConfigError("non-finite ion state");
            }
        }
        if (ions.size() == 2 && (ions[0].position - ions[1].position).norm() == 0.0) {
            throw ConfigError("ion positions coincide");
        }
    }
};

struct Equilibrium {
    std::vector<Vec3> positions;
    Vec3 static_field = Vec3::Zero();  // resolved field (solved for when an ion is pinned)
    double residual = 0.0;             // max |F| / characteristic force
    int iterations = 0;
};

namespace detail {

// d(k e^2 r/|r|^3)/dr
inline Eigen::Matrix3d coulomb_force_jacobian(const Vec3& r) {
    const double n = r.norm();
    const double n3 = n * n * n;
    return PhysicalConstants::coulomb_coupling *
           (Eigen::Matrix3d::Identity() / n3 - 3.0 * r * r.transpose() / (n3 * n * n));
}

inline Vec3 coulomb_force(const Vec3& r) {
    const double n = r.norm();
    return PhysicalConstants::coulomb_coupling * r / (n * n * n);
}

inline Vec3 spring_constants(const IonSpecies& s, const SecularSpectrum& sec) {
    const Vec3& w = sec.at(s.label);
    return s.mass * w.cwiseProduct(w);
}

}  // namespace detail

// Equal-mass closed form for the two-ion axial separation: d^3 = e^2/(2 pi eps0 m w^2).
inline double equal_mass_separation(double mass, double omega_axial) {
    return std::cbrt(2.0 * PhysicalConstants::coulomb_coupling / (mass * omega_axial * omega_axial));
}

// Static equilibrium of the pseudopotential + Coulomb energy by damped Newton
// iteration. With pinned_ion set, that ion is held on the rf null and the
// uniform static field required to keep it there is solved for as well.
inline Equilibrium equilibrium_positions(const std::vector<IonSpecies>& species,
                                         const TrapConfig& trap, const SecularSpectrum& secular,
                                         std::optional<std::size_t> pinned_ion = std::nullopt,
                                         int max_iterations = 100) {
    const std::size_t n = species.size();
    if (n == 0 || n > 2) throw ArgumentError("equilibrium_positions supports 1 or 2 ions");
    if (pinned_ion && *pinned_ion >= n) throw ArgumentError("pinned ion index out of range");

    const double e = PhysicalConstants::elem_charge;
    std::vector<Vec3> k(n);
    for (std::size_t i = 0; i < n; ++i) k[i] = detail::spring_constants(species[i], secular);

    const double k_axial = k[0][0];
    const double d0 = equal_mass_separation(species[0].mass, std::sqrt(k_axial / species[0].mass));
    const double f_scale = PhysicalConstants::coulomb_coupling / (d0 * d0);
    const double length_scale = d0;

    // Unknowns: 3n positions in units of length_scale, plus 3 field components
    // in units of f_scale/e when pinned.
    const int dim = static_cast<int>(3 * n + (pinned_ion ? 3 : 0));
    Eigen::VectorXd y = Eigen::VectorXd::Zero(dim);

    Vec3 field = trap.static_field;
    for (std::size_t i = 0; i < n; ++i) {
        Vec3 centre = trap.rf_null + (e * field).cwiseQuotient(k[i]);
        Vec3 p = centre;
        if (n == 2) p[0] += (i == 0 ? -0.5 : 0.5) * d0;
        if (pinned_ion) {
            p = trap.rf_null;
            if (n == 2 && i != *pinned_ion) p[0] += (i == 0 ? -1.0 : 1.0) * d0;
        }
        y.segment<3>(3 * i) = p / length_scale;
    }
    if (pinned_ion) y.tail<3>() = field * e / f_scale;

    auto unpack_field = [&](const Eigen::VectorXd& v) {
        return pinned_ion ? Vec3(v.tail<3>() * f_scale / e) : trap.static_field;
    };

    auto residual = [&](const Eigen::VectorXd& v, Eigen::MatrixXd* jac) {
        Eigen::VectorXd r(dim);
        if (jac) jac->setZero(dim, dim);
        const Vec3 fld = unpack_field(v);
        for (std::size_t i = 0; i < n; ++i) {
            const Vec3 xi = v.segment<3>(3 * i) * length_scale;
            Vec3 f = -k[i].cwiseProduct(xi - trap.rf_null) + e * fld;
            Eigen::Matrix3d dfi = Eigen::Matrix3d(k[i].asDiagonal()) * -1.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const Vec3 rij = xi - Vec3(v.segment<3>(3 * j) * length_scale);
                f += detail::coulomb_force(rij);
                const Eigen::Matrix3d c = detail::coulomb_force_jacobian(rij);
                dfi += c;
                if (jac) jac->block<3, 3>(3 * i, 3 * j) = -c * length_scale / f_scale;
            }
            r.segment<3>(3 * i) = f / f_scale;
            if (jac) {
                jac->block<3, 3>(3 * i, 3 * i) = dfi * length_scale / f_scale;
                if (pinned_ion) jac->block<3, 3>(3 * i, 3 * n) = Eigen::Matrix3d::Identity();
            }
        }
        if (pinned_ion) {
            const std::size_t p = *pinned_ion;
            r.tail<3>() = v.segment<3>(3 * p) - trap.rf_null / length_scale;
            if (jac) jac->block<3, 3>(3 * n, 3 * p) = Eigen::Matrix3d::Identity();
        }
        return r;
    };

    Eigen::MatrixXd jac;
    Eigen::VectorXd r = residual(y, &jac);
    int it = 0;
    for (; it < max_iterations && r.lpNorm<Eigen::Infinity>() >= 1e-13; ++it) {
        const Eigen::VectorXd step = jac.fullPivLu().solve(-r);
        double lambda = 1.0;
        Eigen::VectorXd trial;
        Eigen::VectorXd r_trial;
        for (int half = 0; half < 40; ++half, lambda *= 0.5) {
            trial = y + lambda * step;
            // keep the ordering ion0 < ion1 along x
            if (n == 2 && trial[0] >= trial[3]) continue;
            r_trial = residual(trial, nullptr);
            if (r_trial.norm() < r.norm() || half == 39) break;
        }
        y = trial;
        r = residual(y, &jac);
    }

    const double res = r.lpNorm<Eigen::Infinity>();
    if (!(res < 1e-12)) {
        throw NumericError("equilibrium solver did not converge after " + std::to_string(it) +
                           " iterations; residual " + std::to_string(res) + " of characteristic force");
    }

    Equilibrium out;
    out.positions.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.positions[i] = y.segment<3>(3 * i) * length_scale;
    if (pinned_ion) out.positions[*pinned_ion] = trap.rf_null;
    out.static_field = unpack_field(y);
    out.residual = res;
    out.iterations = it;
    return out;
}

struct NormalModes {
    std::vector<double> frequencies;  // rad/s, ascending
    Eigen::MatrixXd mode_vectors;     // columns; mass-weighted, orthonormal
    std::vector<Axis> axis;           // dominant axis per mode
    Eigen::MatrixXd participation;    // (ion, mode) -> weight in [0,1]
};

inline const char* axis_name(Axis a) {
    switch (a) {
        case Axis::x: return "x";
        case Axis::y: return "y";
        case Axis::z: return "z";
    }
    return "?";
}

// Hessian of the total potential at the given positions. Each species carries
// its own secular spring constant; in an RF trap they differ because q ~ 1/m.
inline Eigen::MatrixXd potential_hessian(const std::vector<IonSpecies>& species,
                                         const std::vector<Vec3>& positions,
                                         const SecularSpectrum& secular) {
    const std::size_t n = species.size();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(3 * n, 3 * n);
    for (std::size_t i = 0; i < n; ++i) {
        h.block<3, 3>(3 * i, 3 * i) += Eigen::Matrix3d(detail::spring_constants(species[i], secular).asDiagonal());
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const Eigen::Matrix3d c = detail::coulomb_force_jacobian(positions[i] - positions[j]);
            h.block<3, 3>(3 * i, 3 * i) -= c;
            h.block<3, 3>(3 * i, 3 * j) += c;
        }
    }
    return h;
}

inline NormalModes normal_modes(const std::vector<IonSpecies>& species,
                                const std::vector<Vec3>& positions, const SecularSpectrum& secular) {
    const std::size_t n = species.size();
    if (positions.size() != n) throw ArgumentError("species/positions size mismatch");
    Eigen::MatrixXd h = potential_hessian(species, positions, secular);
    Eigen::VectorXd inv_sqrt_m(3 * n);
    for (std::size_t i = 0; i < n; ++i) inv_sqrt_m.segment<3>(3 * i).setConstant(1.0 / std::sqrt(species[i].mass));
    const Eigen::MatrixXd hw = inv_sqrt_m.asDiagonal() * h * inv_sqrt_m.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (hw + hw.transpose()));
    if (solver.info() != Eigen::Success) throw NumericError("normal-mode eigensolver failed");

    NormalModes out;
    out.mode_vectors = solver.eigenvectors();
    out.participation = Eigen::MatrixXd::Zero(n, 3 * n);
    for (int m = 0; m < static_cast<int>(3 * n); ++m) {
        const Eigen::VectorXd v = out.mode_vectors.col(m);
        Vec3 per_axis = Vec3::Zero();
        for (std::size_t i = 0; i < n; ++i) {
            per_axis += v.segment<3>(3 * i).cwiseAbs2();
            out.participation(i, m) = v.segment<3>(3 * i).squaredNorm();
        }
        Eigen::Index best;
        per_axis.maxCoeff(&best);
        const Axis ax = static_cast<Axis>(best);
        const double lambda = solver.eigenvalues()[m];
        if (!(lambda > 0.0)) {
            throw StabilityError(std::string("crystal Hessian is not positive definite; soft axis ") +
                                 axis_name(ax));
        }
        out.frequencies.push_back(std::sqrt(lambda));
        out.axis.push_back(ax);
    }
    return out;
}

}  // namespace symcool
