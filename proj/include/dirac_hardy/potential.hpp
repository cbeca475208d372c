#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "dirac_hardy/error.hpp"

namespace dirac_hardy {

/// A spherically symmetric electrostatic potential with the metadata the
/// form constructions need.
///
/// `nu` is the Coulomb coefficient of the lower bound -nu/r - c1 <= V, which
/// is also the coupling seen at the origin (r V(r) -> -nu). `Gamma` is sup V.
/// `cV_hint`, when present, is a shift c for which the Hardy-Dirac form is
/// known to be nonnegative.
struct RadialPotential
{
    std::function<double(double)> eval;
    double Gamma = 0.0;
    double nu = 0.0;
    double c1 = 0.0;
    std::optional<double> cV_hint;
    /// Kind tag used in reports: "coulomb", "perturbed-coulomb" or "free".
    std::string kind;
    /// Human-readable identifier carried into FormMatrix and manifests.
    std::string id;
    /// True when the parameters satisfy c1 + Gamma - 1 < sqrt(1 - nu^2).
    bool theorem_admissible = false;

    double operator()(double r) const { return eval(r); }

    /// Pure Coulomb with this coupling (no c1 and no cap).
    bool is_pure_coulomb() const noexcept { return kind == "coulomb"; }
};

/// V(r) = -nu/r with 0 < nu <= 1.
inline RadialPotential make_coulomb(double nu)
{
    if (!(nu > 0.0) || !(nu <= 1.0))
        throw Error(Errc::coupling_out_of_range, "Coulomb coupling must lie in (0, 1], got " + std::to_string(nu));
    RadialPotential v;
    v.eval = [nu](double r) { return -nu / r; };
    v.Gamma = 0.0;
    v.nu = nu;
    v.c1 = 0.0;
    v.cV_hint = nu < 1.0 ? std::sqrt(1.0 - nu * nu) : 0.0;
    v.kind = "coulomb";
    v.id = "coulomb(nu=" + std::to_string(nu) + ")";
    v.theorem_admissible = nu < 1.0;
    return v;
}

/// V(r) = min(Gamma_cap, max(-nu/r - c1 e^{-r}, -nu/r - c1)).
///
/// Requires the admissibility condition c1 + Gamma_cap - 1 < sqrt(1 - nu^2).
inline RadialPotential make_bounded_perturbed_coulomb(double nu, double c1, double gamma_cap)
{
    if (!(nu > 0.0) || !(nu < 1.0))
        throw Error(Errc::coupling_out_of_range, "perturbed Coulomb needs nu in (0, 1), got " + std::to_string(nu));
    if (!(c1 >= 0.0) || !(gamma_cap >= 0.0))
        throw Error(Errc::precondition, "c1 and Gamma_cap must be nonnegative");
    const double bound = std::sqrt(1.0 - nu * nu);
    if (!(c1 + gamma_cap - 1.0 < bound))
        throw Error(Errc::theorem_hypothesis_violated,
                    "c1 + Gamma - 1 = " + std::to_string(c1 + gamma_cap - 1.0) +
                        " is not below sqrt(1 - nu^2) = " + std::to_string(bound));

    if (c1 == 0.0 && gamma_cap == 0.0) {
        RadialPotential v = make_coulomb(nu);
        v.theorem_admissible = true;
        return v;
    }

    RadialPotential v;
    v.eval = [nu, c1, gamma_cap](double r) {
        const double smooth = -nu / r - c1 * std::exp(-r);
        const double floor = -nu / r - c1;
        return std::min(gamma_cap, std::max(smooth, floor));
    };
    // V < 0 everywhere and V -> 0 at infinity, so the cap never binds.
    v.Gamma = std::min(gamma_cap, 0.0);
    v.nu = nu;
    v.c1 = c1;
    v.kind = "perturbed-coulomb";
    v.id = "perturbed-coulomb(nu=" + std::to_string(nu) + ",c1=" + std::to_string(c1) +
           ",Gamma_cap=" + std::to_string(gamma_cap) + ")";
    v.theorem_admissible = true;
    return v;
}

/// V = 0.
inline RadialPotential make_free()
{
    RadialPotential v;
    v.eval = [](double) { return 0.0; };
    v.kind = "free";
    v.id = "free";
    return v;
}

} // namespace dirac_hardy
