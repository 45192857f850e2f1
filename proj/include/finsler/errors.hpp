#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace finsler {

enum class ErrorCode {
    invalid_argument,
    jet_domain,          // sqrt/log/division outside the function's domain
    chart,               // point outside the chart domain
    inadmissible,        // vector outside the conic set A
    degenerate_tensor,   // |det g_v| below the degeneracy threshold
    break_ambiguity,     // evaluation at a break without a side
    domain_exit,         // integration left the chart or A
    step_failure,        // integrator could not make progress
    not_in_exp_domain,
    not_a_geodesic,
    degenerate_flag,
    degenerate_restriction,
    orthogonality_violation,
    endpoint_off_submanifold,
    mismatched_geodesic,
    null_geodesic,
    no_normal_section,
    schema,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::optional<double> at_t = std::nullopt)
        : std::runtime_error(message), code_(code), at_t_(at_t)
    {}

    ErrorCode code() const noexcept { return code_; }
    // Instant at which the failure happened, when it is tied to a curve.
    std::optional<double> at_t() const noexcept { return at_t_; }

private:
    ErrorCode code_;
    std::optional<double> at_t_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message,
                              std::optional<double> at_t = std::nullopt)
{
    throw Error(code, message, at_t);
}

} // namespace finsler
