#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "symcool/error.hpp"

namespace symcool {

// Integer-order Bessel functions J_0..J_nmax at x >= 0 by Miller's backward
// recurrence, normalized with J_0 + 2 sum J_2k = 1.
// Orders whose bound (x/2)^n/n! falls below 1e-10 are not computed; the
// returned sequence stops there (and is never longer than nmax + 1).
inline void bessel_j_sequence(double x, int nmax, std::vector<double>& out) {
    if (x == 0.0) {
        out.assign(1, 1.0);
        return;
    }
    int significant = nmax;
    bool truncated = false;
    double bound = 1.0;
    for (int n = 1; n <= nmax; ++n) {
        bound *= 0.5 * x / n;
        if (bound < 1e-10 && n > x) {
            significant = n;
            truncated = true;
            break;
        }
    }
    out.resize(static_cast<std::size_t>(significant) + 1);
    int top = std::max(significant, static_cast<int>(x) + 1);
    // J_nmax still significant: start far enough past it for the recurrence to settle
    if (!truncated) top += static_cast<int>(std::sqrt(160.0 * top));
    // even start so that the loop below consumes (odd, even) index pairs
    const int start = 2 * ((top + 7) / 2);
    const double two_over_x = 2.0 / x;
    double jp1 = 0.0;
    double j = 1e-300;  // J_start, arbitrary scale
    double norm = 0.0;
    for (int k = start; k >= 2; k -= 2) {
        // j holds J_k; step to J_{k-1} (odd) then J_{k-2} (even)
        const double jodd = k * two_over_x * j - jp1;
        const double jeven = (k - 1) * two_over_x * jodd - j;
        jp1 = jodd;
        j = jeven;
        const int n_odd = k - 1;
        const int n_even = k - 2;
        if (n_odd <= significant) out[static_cast<std::size_t>(n_odd)] = jodd;
        if (n_even <= significant) out[static_cast<std::size_t>(n_even)] = jeven;
        if (n_even > 0) norm += 2.0 * jeven;
        if (std::abs(j) > 1e250) {
            j *= 1e-250;
            jp1 *= 1e-250;
            norm *= 1e-250;
            for (int i = n_even; i <= significant; ++i) out[static_cast<std::size_t>(i)] *= 1e-250;
        }
    }
    norm += j;  // J_0
    const double inv = 1.0 / norm;
    for (auto& v : out) v *= inv;
}

// Micromotion sideband weights J_n(beta)^2 for n = 0..N; the n < 0 weights are
// identical. N starts at max(10, ceil(beta) + 8) and is raised until the
// truncated sum is within 1e-6 of one. The weights are not renormalized.
struct SidebandWeights {
    std::vector<double> weight;  // index n >= 0
    double total = 0.0;          // w_0 + 2 sum_{n>0} w_n

    int order() const { return static_cast<int>(weight.size()) - 1; }
};

inline void sideband_weights(double beta, SidebandWeights& w, std::vector<double>& scratch) {
    if (beta < 0.0 || !std::isfinite(beta)) throw ArgumentError("modulation index must be finite and >= 0");
    int nmax = std::max(10, static_cast<int>(std::ceil(beta)) + 8);
    for (;;) {
        bessel_j_sequence(beta, nmax, scratch);
        w.weight.resize(scratch.size());
        double total = 0.0;
        for (std::size_t n = 0; n < scratch.size(); ++n) {
            w.weight[n] = scratch[n] * scratch[n];
            total += n == 0 ? w.weight[n] : 2.0 * w.weight[n];
        }
        w.total = total;
        if (std::abs(1.0 - total) <= 1e-6) return;
        nmax += 8;
        if (nmax > 100000) throw NumericError("sideband truncation failed to converge");
    }
}

inline SidebandWeights sideband_weights(double beta) {
    SidebandWeights w;
    std::vector<double> scratch;
    sideband_weights(beta, w, scratch);
    return w;
}

}  // namespace symcool
