#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "finsler/metric.hpp"

namespace finsler {

struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::optional<std::string> format;
    // forces the task; a differing "task" field is a schema error
    std::optional<std::string> task;
};

// exit_code 0 on success, 1 on schema errors, 2 on domain errors; `error`
// holds a JSON error object whenever exit_code is nonzero.
struct ScenarioOutcome {
    int exit_code = 0;
    std::string output;
    std::string error;
};

// Malformed scenario documents; codes look like "schema.unknown_field".
class SchemaError : public std::runtime_error {
public:
    SchemaError(std::string code, const std::string& message);
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

ScenarioOutcome run_scenario(const std::string& document, const RunOverrides& overrides = {});

// Metric from a bare catalog id or {"id": ..., "params": {...}}.
MetricPtr metric_from_json_text(const std::string& text);

} // namespace finsler
