#pragma once

#include <stdexcept>
#include <string>

namespace dirac_hardy {

/// Failure categories raised by the toolkit. The CLI maps them to exit codes.
enum class Errc {
    invalid_range,
    too_few_nodes,
    coupling_out_of_range,
    theorem_hypothesis_violated,
    zero_kappa,
    gamma_below_sup,
    precondition,
    eigensolver_no_convergence,
    no_valid_c,
    range_violation,
    solver_singular,
    no_eigenvalue,
    window_invalid,
    supercritical_channel,
    insufficient_nodes,
    config_parse_error,
    precondition_violation,
};

inline const char* to_string(Errc code) noexcept
{
    switch (code) {
        case Errc::invalid_range: return "invalid-range";
        case Errc::too_few_nodes: return "too-few-nodes";
        case Errc::coupling_out_of_range: return "coupling-out-of-range";
        case Errc::theorem_hypothesis_violated: return "theorem-hypothesis-violated";
        case Errc::zero_kappa: return "zero-kappa";
        case Errc::gamma_below_sup: return "gamma-below-sup";
        case Errc::precondition: return "precondition";
        case Errc::eigensolver_no_convergence: return "eigensolver-no-convergence";
        case Errc::no_valid_c: return "no-valid-c";
        case Errc::range_violation: return "range-violation";
        case Errc::solver_singular: return "solver-singular";
        case Errc::no_eigenvalue: return "no-eigenvalue";
        case Errc::window_invalid: return "window-invalid";
        case Errc::supercritical_channel: return "supercritical-channel";
        case Errc::insufficient_nodes: return "insufficient-nodes";
        case Errc::config_parse_error: return "config-parse-error";
        case Errc::precondition_violation: return "precondition-violation";
    }
    return "unknown";
}

class Error : public std::runtime_error
{
  public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what)
        , code_(code)
    {
    }

    Errc code() const noexcept { return code_; }

  private:
    Errc code_;
};

} // namespace dirac_hardy
