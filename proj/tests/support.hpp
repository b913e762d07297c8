#pragma once

// Shared helpers for the test binaries: frozen high-precision values and random parameter tuples.

#include <algorithm>
#include <random>

#include "invis/construction.hpp"

namespace invis::testing {

// c = 1, kappa = 1.5, k1 = 0.7, k2 = 0.9, evaluated with 30-digit arithmetic
namespace ref {
inline constexpr double kMin = 0.553283335172488126;
inline constexpr double kMax = 1.11803398874989485;
inline constexpr double t = 0.315222230819100422;
inline constexpr double A07x = 0.504241945993653264, A07y = 1.05296936219555728, F1A07 = 1.83616129732910218;
inline constexpr double B07x = 1.98317495786553760, B07y = 2.08822247050587632, F1B07 = 3.64142910346497307;
inline constexpr double A08x = 0.357312858378185226, A08y = 1.08585028670254818, F1A08 = 1.73820857225212348;
inline constexpr double B08x = 2.79866782443520456, B08y = 3.03893425954816365, F1B08 = 4.86466840331947351;
}  // namespace ref

inline ConstructionParams default_params() { return derive_params(1.0, 1.5, 0.7, 0.9); }

/// c in [0.5, 2], kappa in (1.05, 1.95), k_min < k1 < k2 < k_max with a small relative margin.
inline ConstructionParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uc(0.5, 2.0), uk(1.05, 1.95), u01(0.0, 1.0);
    const double c = uc(rng);
    double kappa = uk(rng);
    while (kappa <= 1.05) kappa = uk(rng);
    const auto [lo, hi] = k_bounds(kappa);
    const double margin = 1e-3 * (hi - lo);
    double x = u01(rng), y = u01(rng);
    if (x > y) std::swap(x, y);
    if (y - x < 1e-2) y = std::min(1.0, x + 1e-2), x = y - 1e-2;
    const double k1 = lo + margin + (hi - lo - 2 * margin) * x;
    const double k2 = lo + margin + (hi - lo - 2 * margin) * y;
    return derive_params(c, kappa, k1, k2);
}

}  // namespace invis::testing
