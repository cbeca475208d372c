#pragma once

#include <cmath>
#include <cstdlib>
#include <string>

#include "dirac_hardy/error.hpp"

namespace dirac_hardy {

/// Closed-form Dirac-Coulomb level for V = -nu/r in units m = c = 1:
/// E = [1 + nu^2 / (n + s)^2]^{-1/2}, s = sqrt(kappa^2 - nu^2), with radial
/// quantum number n = k - 1 for kappa < 0 and n = k for kappa > 0.
inline double analytic_oracle(double nu, int kappa, int k)
{
    if (kappa == 0)
        throw Error(Errc::zero_kappa, "spin-orbit number must be nonzero");
    if (k < 1)
        throw Error(Errc::precondition, "level index must be >= 1");
    const double ak = std::abs(static_cast<double>(kappa));
    if (!(nu > 0.0))
        throw Error(Errc::precondition, "coupling must be positive");
    if (nu > ak)
        throw Error(Errc::supercritical_channel,
                    "coupling " + std::to_string(nu) + " exceeds |kappa| = " + std::to_string(std::abs(kappa)));
    const double s = std::sqrt(ak * ak - nu * nu);
    const double n = kappa < 0 ? k - 1 : k;
    const double m = n + s;
    if (m == 0.0)
        return 0.0;
    return 1.0 / std::sqrt(1.0 + nu * nu / (m * m));
}

} // namespace dirac_hardy
