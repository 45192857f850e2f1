#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "finsler/metric.hpp"

namespace finsler {

struct CheckResult {
    std::string name;
    double residual = 0.0; // worst over the metrics the check applies to
    double tolerance = 0.0;
    bool pass = true;
    bool applicable = true;
    int samples = 0;
    std::string worst_metric;
    std::string note;
};

struct ValidationOptions {
    std::uint64_t seed = 1;
    int samples = 100; // pointwise samples for the metric identities
    int threads = 0;   // 0: FINSLER_LAB_THREADS, else hardware concurrency
    std::vector<std::string> only; // subset of check names; empty runs all
};

struct ValidationReport {
    std::vector<std::string> metrics;
    std::vector<CheckResult> checks;
    bool pass = true;
};

const std::vector<std::string>& validation_check_names();

ValidationReport validate(const std::vector<MetricPtr>& metrics, const ValidationOptions& opts = {});
ValidationReport validate(const std::vector<std::string>& metric_ids, const ValidationOptions& opts = {});

// Worker count honouring FINSLER_LAB_THREADS.
int worker_threads(int requested, int tasks);

} // namespace finsler
