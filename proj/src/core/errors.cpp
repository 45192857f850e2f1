#include "finsler/errors.hpp"

namespace finsler {

const char* error_code_name(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::jet_domain: return "jet_domain";
    case ErrorCode::chart: return "chart";
    case ErrorCode::inadmissible: return "inadmissible";
    case ErrorCode::degenerate_tensor: return "degenerate_tensor";
    case ErrorCode::break_ambiguity: return "break_ambiguity";
    case ErrorCode::domain_exit: return "domain_exit";
    case ErrorCode::step_failure: return "step_failure";
    case ErrorCode::not_in_exp_domain: return "not_in_exp_domain";
    case ErrorCode::not_a_geodesic: return "not_a_geodesic";
    case ErrorCode::degenerate_flag: return "degenerate_flag";
    case ErrorCode::degenerate_restriction: return "degenerate_restriction";
    case ErrorCode::orthogonality_violation: return "orthogonality_violation";
    case ErrorCode::endpoint_off_submanifold: return "endpoint_off_submanifold";
    case ErrorCode::mismatched_geodesic: return "mismatched_geodesic";
    case ErrorCode::null_geodesic: return "null_geodesic";
    case ErrorCode::no_normal_section: return "no_normal_section";
    case ErrorCode::schema: return "schema";
    }
    return "unknown";
}

} // namespace finsler
