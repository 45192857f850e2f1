#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "finsler/jets.hpp"
#include "finsler/linalg.hpp"
#include "finsler/random.hpp"

namespace finsler {

struct MetricDefinition {
    std::string id;
    int dim = 0;
    std::function<bool(const Vec& x)> chart_domain;
    // User predicate for the conic set A (nondegeneracy is checked separately).
    std::function<bool(const Vec& x, const Vec& v)> admissible;
    TangentFunction lagrangian;

    // Optional reference data used by tests and validation.
    bool quadratic = false;
    std::function<Tensor3(const Vec& x)> levi_civita;
    std::optional<double> flag_curvature;
    bool legendre_injective = true;

    std::function<Vec(Rng&)> sample_point;
    std::function<Vec(Rng&, const Vec& x)> sample_velocity;
};

using MetricPtr = std::shared_ptr<const MetricDefinition>;

// L without any admissibility checks.
double lagrangian_value(const MetricDefinition& m, const Vec& x, const Vec& v);

void require_chart(const MetricDefinition& m, const Vec& x);
// Chart, user predicate and nondegeneracy; throws the matching error.
void require_admissible(const MetricDefinition& m, const Vec& x, const Vec& v);

double evaluate_L(const MetricDefinition& m, const Vec& x, const Vec& v);
Mat fundamental_tensor(const MetricDefinition& m, const Vec& x, const Vec& v);
Tensor3 cartan_tensor(const MetricDefinition& m, const Vec& x, const Vec& v);
bool is_admissible(const MetricDefinition& m, const Vec& x, const Vec& v);

// |det g| < 1e-10 * (max absolute row sum)^n
bool is_degenerate(const Mat& g);
// Raw v-Hessian / 2 without checks.
Mat fundamental_tensor_unchecked(const MetricDefinition& m, const Vec& x, const Vec& v);

struct AuditReport {
    std::map<std::string, double> max_violation;
    int samples = 0;
    double worst() const;
};

AuditReport audit_metric(const MetricDefinition& m, int samples, std::uint64_t seed);

// Draws an admissible (x, v) pair using the metric's sampling hooks.
std::pair<Vec, Vec> sample_tangent(const MetricDefinition& m, Rng& rng);

namespace catalog {

MetricPtr euclidean(int n = 2);
MetricPtr pseudo_euclidean(const std::vector<int>& signature = {-1, 1});
MetricPtr sphere();
MetricPtr hyperbolic();
enum class RandersBase { euclidean, hyperbolic };
MetricPtr randers(RandersBase base = RandersBase::euclidean, const Vec& beta = Vec(),
                  const Mat& beta_grad = Mat());
MetricPtr funk();
MetricPtr quartic(int n = 2);
// Not 2-homogeneous; exists only as a negative control.
MetricPtr broken();

const std::vector<std::string>& ids();
MetricPtr by_id(const std::string& id);

} // namespace catalog

} // namespace finsler
