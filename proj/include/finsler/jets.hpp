#pragma once

// Truncated multivariate Taylor arithmetic ("jets").
//
// A Jet over d perturbation directions with order K stores the Taylor
// coefficients c_alpha = (1/alpha!) d^alpha f for every multi-index alpha with
// |alpha| <= K. Storage is dense over the declared directions; d <= 4, K <= 4.

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "finsler/errors.hpp"

namespace finsler {

using MultiIndex = std::array<std::uint8_t, 4>;

// Monomial layout for a given (directions, order) pair.
class JetLayout {
public:
    static constexpr int kMaxDirections = 4;
    static constexpr int kMaxOrder = 4;
    static constexpr int kMaxTerms = 70; // C(4+4, 4)

    static const JetLayout& get(int directions, int order);

    int directions() const noexcept { return directions_; }
    int order() const noexcept { return order_; }
    int size() const noexcept { return static_cast<int>(indices_.size()); }
    const MultiIndex& index(int k) const { return indices_[k]; }
    int degree(int k) const noexcept { return degrees_[k]; }
    // -1 if |alpha| > order or alpha uses an undeclared direction.
    int find(const MultiIndex& alpha) const noexcept;

    struct ProductTerm {
        std::uint8_t lhs, rhs, out;
    };
    const std::vector<ProductTerm>& products() const noexcept { return products_; }

private:
    JetLayout(int directions, int order);

    int directions_;
    int order_;
    std::vector<MultiIndex> indices_;
    std::vector<int> degrees_;
    std::vector<ProductTerm> products_;
};

class Jet {
public:
    Jet() noexcept;
    Jet(double constant) noexcept; // NOLINT: implicit broadcast of scalars
    Jet(double constant, int directions, int order);

    // value + epsilon_direction
    static Jet variable(double value, int direction, int directions, int order);

    const JetLayout& layout() const noexcept { return *layout_; }
    int directions() const noexcept { return layout_->directions(); }
    int order() const noexcept { return layout_->order(); }

    double value() const noexcept { return c_[0]; }
    double coeff(const MultiIndex& alpha) const;
    // alpha! * coeff(alpha), i.e. the partial derivative itself.
    double derivative(const MultiIndex& alpha) const;
    double first(int direction) const;
    double mixed(int d1, int d2) const; // second partial d1 d2

    double& raw(int k) noexcept { return c_[k]; }
    double raw(int k) const noexcept { return c_[k]; }

    // d/d(eps_direction); result has order K-1 over the same directions.
    Jet partial(int direction) const;
    // Sets eps_direction = 0 and removes that direction.
    Jet drop_direction(int direction) const;
    // Re-express over a layout with at least as many directions / any order.
    Jet embed(int directions, int order) const;

    Jet& operator+=(const Jet& rhs);
    Jet& operator-=(const Jet& rhs);
    Jet& operator*=(const Jet& rhs);
    Jet& operator/=(const Jet& rhs);

    friend Jet operator+(Jet lhs, const Jet& rhs) { return lhs += rhs; }
    friend Jet operator-(Jet lhs, const Jet& rhs) { return lhs -= rhs; }
    friend Jet operator*(const Jet& lhs, const Jet& rhs);
    friend Jet operator/(const Jet& lhs, const Jet& rhs);
    friend Jet operator+(Jet lhs, double rhs) { lhs.c_[0] += rhs; return lhs; }
    friend Jet operator+(double lhs, Jet rhs) { rhs.c_[0] += lhs; return rhs; }
    friend Jet operator-(Jet lhs, double rhs) { lhs.c_[0] -= rhs; return lhs; }
    friend Jet operator-(double lhs, const Jet& rhs) { return Jet(lhs) - rhs; }
    friend Jet operator*(Jet lhs, double rhs);
    friend Jet operator*(double lhs, Jet rhs) { return std::move(rhs) * lhs; }
    friend Jet operator/(Jet lhs, double rhs);
    friend Jet operator/(double lhs, const Jet& rhs);
    Jet operator-() const;

    // f(a + h) = sum_k f_k h^k for the nilpotent part h; f_k = f^(k)(a)/k!.
    Jet compose(const std::array<double, JetLayout::kMaxOrder + 1>& taylor) const;

private:
    // Brings two operands onto a common layout (constants broadcast).
    static const JetLayout& common(const Jet& a, const Jet& b);
    Jet promoted(const JetLayout& target) const;

    const JetLayout* layout_;
    std::array<double, JetLayout::kMaxTerms> c_;
};

Jet sqrt(const Jet& x);
Jet exp(const Jet& x);
Jet log(const Jet& x);
Jet pow(const Jet& x, double p);
Jet pow(const Jet& x, int p);
Jet sin(const Jet& x);
Jet cos(const Jet& x);
Jet tan(const Jet& x);
Jet sinh(const Jet& x);
Jet cosh(const Jet& x);
Jet atan(const Jet& x);
inline Jet square(const Jet& x) { return x * x; }

enum class Space : std::uint8_t { x, v };

struct Direction {
    Space space;
    int index;
};

// Lagrangian-like scalar field on the tangent bundle, evaluable on jets.
using TangentFunction = std::function<Jet(std::span<const Jet> x, std::span<const Jet> v)>;

// Taylor jet of f at (x, v) along the given coordinate directions.
Jet lift(const TangentFunction& f, std::span<const double> x, std::span<const double> v,
         std::span<const Direction> directions, int order);

// Same, with arbitrary seed vectors in (x, v) space: seeds[d] has length 2n.
Jet lift_along(const TangentFunction& f, std::span<const double> x, std::span<const double> v,
               std::span<const std::vector<double>> seeds, int order);

// All partial derivatives of f up to `order` with respect to z = (x, v),
// assembled from lifts over at most four coordinate directions at a time.
class DerivativeTable {
public:
    DerivativeTable() = default;
    DerivativeTable(const TangentFunction& f, std::span<const double> x,
                    std::span<const double> v, int order);

    int dim() const noexcept { return n_; }
    int vars() const noexcept { return 2 * n_; }
    int order() const noexcept { return order_; }

    static int xi(int i) noexcept { return i; }
    int vi(int i) const noexcept { return n_ + i; }

    double value() const noexcept { return value_; }
    double d(int a) const { return d1_[a]; }
    double d(int a, int b) const { return d2_[a * m_ + b]; }
    double d(int a, int b, int c) const { return d3_[(a * m_ + b) * m_ + c]; }
    double d(int a, int b, int c, int e) const { return d4_[((a * m_ + b) * m_ + c) * m_ + e]; }
    // Derivative for an arbitrary index list of length 0..4.
    double at(std::span<const int> idx) const;

    // Jet (in eps) of d^alpha f at z + sum_d eps_d seeds[d].
    // Requires |alpha| + order <= this->order().
    Jet shifted(std::span<const int> alpha, std::span<const std::vector<double>> seeds,
                int order) const;

private:
    void store(std::span<const int> idx, double value);

    int n_ = 0;
    int m_ = 0;
    int order_ = 0;
    double value_ = 0.0;
    std::vector<double> d1_, d2_, d3_, d4_;
};

} // namespace finsler
