#include "finsler/jets.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

namespace finsler {

namespace {

double factorial(int k) noexcept
{
    static constexpr std::array<double, 9> table{1, 1, 2, 6, 24, 120, 720, 5040, 40320};
    return table[k];
}

double multi_factorial(const MultiIndex& alpha) noexcept
{
    return factorial(alpha[0]) * factorial(alpha[1]) * factorial(alpha[2]) * factorial(alpha[3]);
}

} // namespace

// ---------------------------------------------------------------------------
// JetLayout
// ---------------------------------------------------------------------------

JetLayout::JetLayout(int directions, int order) : directions_(directions), order_(order)
{
    for (int deg = 0; deg <= order; ++deg) {
        MultiIndex alpha{};
        // enumerate all alpha over `directions` slots with |alpha| == deg
        std::function<void(int, int)> rec = [&](int slot, int remaining) {
            if (slot == directions - 1 || directions == 0) {
                if (directions == 0) {
                    if (remaining == 0) {
                        indices_.push_back(alpha);
                        degrees_.push_back(deg);
                    }
                    return;
                }
                alpha[slot] = static_cast<std::uint8_t>(remaining);
                indices_.push_back(alpha);
                degrees_.push_back(deg);
                alpha[slot] = 0;
                return;
            }
            for (int k = remaining; k >= 0; --k) {
                alpha[slot] = static_cast<std::uint8_t>(k);
                rec(slot + 1, remaining - k);
            }
            alpha[slot] = 0;
        };
        rec(0, deg);
    }
    for (int i = 0; i < size(); ++i) {
        for (int j = 0; j < size(); ++j) {
            if (degrees_[i] + degrees_[j] > order_) {
                continue;
            }
            MultiIndex sum{};
            for (int d = 0; d < 4; ++d) {
                sum[d] = static_cast<std::uint8_t>(indices_[i][d] + indices_[j][d]);
            }
            products_.push_back({static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(j),
                                 static_cast<std::uint8_t>(find(sum))});
        }
    }
}

int JetLayout::find(const MultiIndex& alpha) const noexcept
{
    int deg = 0;
    for (int d = 0; d < 4; ++d) {
        if (d >= directions_ && alpha[d] != 0) {
            return -1;
        }
        deg += alpha[d];
    }
    if (deg > order_) {
        return -1;
    }
    // indices are few; a linear scan within the degree block is cheap
    for (int k = 0; k < size(); ++k) {
        if (degrees_[k] == deg && indices_[k] == alpha) {
            return k;
        }
    }
    return -1;
}

const JetLayout& JetLayout::get(int directions, int order)
{
    if (directions < 0 || directions > kMaxDirections || order < 0 || order > kMaxOrder) {
        fail(ErrorCode::invalid_argument, "jet layout out of range: directions=" +
                                              std::to_string(directions) +
                                              " order=" + std::to_string(order));
    }
    static const auto layouts = [] {
        std::array<std::unique_ptr<JetLayout>, (kMaxDirections + 1) * (kMaxOrder + 1)> all;
        for (int d = 0; d <= kMaxDirections; ++d) {
            for (int k = 0; k <= kMaxOrder; ++k) {
                all[d * (kMaxOrder + 1) + k] = std::unique_ptr<JetLayout>(new JetLayout(d, k));
            }
        }
        return all;
    }();
    return *layouts[directions * (kMaxOrder + 1) + order];
}

// ---------------------------------------------------------------------------
// Jet
// ---------------------------------------------------------------------------

Jet::Jet() noexcept : layout_(&JetLayout::get(0, 0)) { c_[0] = 0.0; }

Jet::Jet(double constant) noexcept : layout_(&JetLayout::get(0, 0)) { c_[0] = constant; }

Jet::Jet(double constant, int directions, int order) : layout_(&JetLayout::get(directions, order))
{
    std::fill_n(c_.begin(), layout_->size(), 0.0);
    c_[0] = constant;
}

Jet Jet::variable(double value, int direction, int directions, int order)
{
    Jet j(value, directions, order);
    if (direction < 0 || direction >= directions) {
        fail(ErrorCode::invalid_argument, "jet direction out of range");
    }
    if (order >= 1) {
        MultiIndex e{};
        e[direction] = 1;
        j.c_[j.layout_->find(e)] = 1.0;
    }
    return j;
}

double Jet::coeff(const MultiIndex& alpha) const
{
    const int k = layout_->find(alpha);
    return k < 0 ? 0.0 : c_[k];
}

double Jet::derivative(const MultiIndex& alpha) const { return coeff(alpha) * multi_factorial(alpha); }

double Jet::first(int direction) const
{
    MultiIndex e{};
    e[direction] = 1;
    return coeff(e);
}

double Jet::mixed(int d1, int d2) const
{
    MultiIndex e{};
    e[d1] += 1;
    e[d2] += 1;
    return derivative(e);
}

Jet Jet::partial(int direction) const
{
    const int d = directions();
    const int k = order();
    if (direction < 0 || direction >= d) {
        fail(ErrorCode::invalid_argument, "partial: direction out of range");
    }
    Jet out(0.0, d, std::max(k - 1, 0));
    if (k == 0) {
        return out;
    }
    for (int i = 0; i < out.layout_->size(); ++i) {
        MultiIndex alpha = out.layout_->index(i);
        const int weight = alpha[direction] + 1;
        alpha[direction] = static_cast<std::uint8_t>(weight);
        out.c_[i] = weight * c_[layout_->find(alpha)];
    }
    return out;
}

Jet Jet::drop_direction(int direction) const
{
    const int d = directions();
    if (direction < 0 || direction >= d) {
        fail(ErrorCode::invalid_argument, "drop_direction: direction out of range");
    }
    Jet out(0.0, d - 1, order());
    for (int i = 0; i < out.layout_->size(); ++i) {
        const MultiIndex& beta = out.layout_->index(i);
        MultiIndex alpha{};
        for (int s = 0, t = 0; s < d; ++s) {
            alpha[s] = (s == direction) ? 0 : beta[t++];
        }
        out.c_[i] = c_[layout_->find(alpha)];
    }
    return out;
}

Jet Jet::embed(int dirs, int ord) const
{
    if (dirs < directions()) {
        fail(ErrorCode::invalid_argument, "embed: cannot reduce the direction count");
    }
    Jet out(0.0, dirs, ord);
    for (int i = 0; i < layout_->size(); ++i) {
        const int k = out.layout_->find(layout_->index(i));
        if (k >= 0) {
            out.c_[k] = c_[i];
        }
    }
    return out;
}

const JetLayout& Jet::common(const Jet& a, const Jet& b)
{
    if (a.layout_ == b.layout_) {
        return *a.layout_;
    }
    if (a.directions() == 0) {
        return *b.layout_;
    }
    if (b.directions() == 0) {
        return *a.layout_;
    }
    if (a.directions() != b.directions()) {
        fail(ErrorCode::invalid_argument, "jet operands have different direction sets");
    }
    return JetLayout::get(a.directions(), std::min(a.order(), b.order()));
}

Jet Jet::promoted(const JetLayout& target) const
{
    if (layout_ == &target) {
        return *this;
    }
    Jet out(0.0, target.directions(), target.order());
    if (directions() == 0) {
        out.c_[0] = c_[0];
        return out;
    }
    // same directions, lower target order: truncate
    for (int k = 0; k < target.size(); ++k) {
        out.c_[k] = c_[k]; // layouts share the degree-ordered prefix
    }
    return out;
}

Jet& Jet::operator+=(const Jet& rhs)
{
    const JetLayout& target = common(*this, rhs);
    if (layout_ != &target) {
        *this = promoted(target);
    }
    if (rhs.layout_ == &target) {
        for (int k = 0; k < target.size(); ++k) {
            c_[k] += rhs.c_[k];
        }
    } else if (rhs.directions() == 0) {
        c_[0] += rhs.c_[0];
    } else {
        for (int k = 0; k < target.size(); ++k) {
            c_[k] += rhs.c_[k];
        }
    }
    return *this;
}

Jet& Jet::operator-=(const Jet& rhs)
{
    const JetLayout& target = common(*this, rhs);
    if (layout_ != &target) {
        *this = promoted(target);
    }
    if (rhs.directions() == 0) {
        c_[0] -= rhs.c_[0];
    } else {
        for (int k = 0; k < target.size(); ++k) {
            c_[k] -= rhs.c_[k];
        }
    }
    return *this;
}

Jet operator*(const Jet& lhs, const Jet& rhs)
{
    if (rhs.directions() == 0) {
        return lhs * rhs.c_[0];
    }
    if (lhs.directions() == 0) {
        return rhs * lhs.c_[0];
    }
    const JetLayout& target = Jet::common(lhs, rhs);
    Jet out(0.0, target.directions(), target.order());
    for (const auto& term : target.products()) {
        out.c_[term.out] += lhs.c_[term.lhs] * rhs.c_[term.rhs];
    }
    return out;
}

Jet operator*(Jet lhs, double rhs)
{
    for (int k = 0; k < lhs.layout_->size(); ++k) {
        lhs.c_[k] *= rhs;
    }
    return lhs;
}

Jet operator/(Jet lhs, double rhs)
{
    if (rhs == 0.0) {
        fail(ErrorCode::jet_domain, "jet division by zero");
    }
    return lhs * (1.0 / rhs);
}

Jet operator/(const Jet& lhs, const Jet& rhs)
{
    if (rhs.directions() == 0) {
        return lhs / rhs.c_[0];
    }
    return lhs * pow(rhs, -1);
}

Jet operator/(double lhs, const Jet& rhs) { return pow(rhs, -1) * lhs; }

Jet& Jet::operator*=(const Jet& rhs) { return *this = *this * rhs; }
Jet& Jet::operator/=(const Jet& rhs) { return *this = *this / rhs; }

Jet Jet::operator-() const { return *this * -1.0; }

Jet Jet::compose(const std::array<double, JetLayout::kMaxOrder + 1>& taylor) const
{
    const int k = order();
    if (directions() == 0 || k == 0) {
        Jet out = *this;
        out.c_[0] = taylor[0];
        return out;
    }
    Jet h = *this;
    h.c_[0] = 0.0;
    Jet out(taylor[k], directions(), k);
    for (int i = k - 1; i >= 0; --i) {
        out = out * h;
        out.c_[0] += taylor[i];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Elementary functions
// ---------------------------------------------------------------------------

namespace {

using Taylor = std::array<double, JetLayout::kMaxOrder + 1>;

Taylor from_derivatives(const std::array<double, 5>& d)
{
    Taylor t{};
    for (int k = 0; k <= JetLayout::kMaxOrder; ++k) {
        t[k] = d[k] / factorial(k);
    }
    return t;
}

} // namespace

Jet pow(const Jet& x, double p)
{
    const double a = x.value();
    if (p == std::floor(p) && std::abs(p) <= 16) {
        return pow(x, static_cast<int>(p));
    }
    if (!(a > 0.0)) {
        fail(ErrorCode::jet_domain, "pow: non-positive base " + std::to_string(a) +
                                        " with non-integer exponent");
    }
    Taylor t{};
    double binom = 1.0;
    for (int k = 0; k <= JetLayout::kMaxOrder; ++k) {
        t[k] = binom * std::pow(a, p - k);
        binom *= (p - k) / (k + 1);
    }
    return x.compose(t);
}

Jet pow(const Jet& x, int p)
{
    if (p == 0) {
        return Jet(1.0, x.directions(), x.order());
    }
    if (p < 0) {
        const double a = x.value();
        if (a == 0.0) {
            fail(ErrorCode::jet_domain, "jet division by a zero leading value");
        }
        Taylor t{};
        double binom = 1.0;
        for (int k = 0; k <= JetLayout::kMaxOrder; ++k) {
            t[k] = binom * std::pow(a, p - k);
            binom *= static_cast<double>(p - k) / (k + 1);
        }
        return x.compose(t);
    }
    Jet result = x;
    Jet base = x;
    int e = p - 1;
    while (e > 0) {
        if (e & 1) {
            result = result * base;
        }
        e >>= 1;
        if (e > 0) {
            base = base * base;
        }
    }
    return result;
}

Jet sqrt(const Jet& x)
{
    if (!(x.value() > 0.0)) {
        fail(ErrorCode::jet_domain, "sqrt of non-positive leading value " + std::to_string(x.value()));
    }
    return pow(x, 0.5);
}

Jet exp(const Jet& x)
{
    const double e = std::exp(x.value());
    return x.compose(from_derivatives({e, e, e, e, e}));
}

Jet log(const Jet& x)
{
    const double a = x.value();
    if (!(a > 0.0)) {
        fail(ErrorCode::jet_domain, "log of non-positive leading value " + std::to_string(a));
    }
    Taylor t{};
    t[0] = std::log(a);
    for (int k = 1; k <= JetLayout::kMaxOrder; ++k) {
        t[k] = ((k % 2 == 1) ? 1.0 : -1.0) / (k * std::pow(a, k));
    }
    return x.compose(t);
}

Jet sin(const Jet& x)
{
    const double s = std::sin(x.value()), c = std::cos(x.value());
    return x.compose(from_derivatives({s, c, -s, -c, s}));
}

Jet cos(const Jet& x)
{
    const double s = std::sin(x.value()), c = std::cos(x.value());
    return x.compose(from_derivatives({c, -s, -c, s, c}));
}

Jet tan(const Jet& x) { return sin(x) / cos(x); }

Jet sinh(const Jet& x)
{
    const double s = std::sinh(x.value()), c = std::cosh(x.value());
    return x.compose(from_derivatives({s, c, s, c, s}));
}

Jet cosh(const Jet& x)
{
    const double s = std::sinh(x.value()), c = std::cosh(x.value());
    return x.compose(from_derivatives({c, s, c, s, c}));
}

Jet atan(const Jet& x)
{
    const double a = x.value();
    const double q = 1.0 + a * a;
    return x.compose(from_derivatives({std::atan(a), 1.0 / q, -2.0 * a / (q * q),
                                       (6.0 * a * a - 2.0) / (q * q * q),
                                       -24.0 * a * (a * a - 1.0) / (q * q * q * q)}));
}

// ---------------------------------------------------------------------------
// Lifts
// ---------------------------------------------------------------------------

Jet lift(const TangentFunction& f, std::span<const double> x, std::span<const double> v,
         std::span<const Direction> directions, int order)
{
    const int n = static_cast<int>(x.size());
    const int dirs = static_cast<int>(directions.size());
    for (int a = 0; a < dirs; ++a) {
        if (directions[a].index < 0 || directions[a].index >= n) {
            fail(ErrorCode::invalid_argument, "lift: direction index out of range");
        }
        for (int b = 0; b < a; ++b) {
            if (directions[a].space == directions[b].space &&
                directions[a].index == directions[b].index) {
                fail(ErrorCode::invalid_argument, "lift: directions must be distinct");
            }
        }
    }
    std::vector<Jet> xs, vs;
    xs.reserve(n);
    vs.reserve(n);
    for (int i = 0; i < n; ++i) {
        xs.emplace_back(x[i], dirs, order);
        vs.emplace_back(v[i], dirs, order);
    }
    for (int a = 0; a < dirs; ++a) {
        auto& target = directions[a].space == Space::x ? xs : vs;
        target[directions[a].index] += Jet::variable(0.0, a, dirs, order);
    }
    Jet out = f(xs, vs);
    return out.directions() == dirs ? out : out.embed(dirs, order);
}

Jet lift_along(const TangentFunction& f, std::span<const double> x, std::span<const double> v,
               std::span<const std::vector<double>> seeds, int order)
{
    const int n = static_cast<int>(x.size());
    const int dirs = static_cast<int>(seeds.size());
    std::vector<Jet> xs, vs;
    xs.reserve(n);
    vs.reserve(n);
    for (int i = 0; i < n; ++i) {
        Jet xi(x[i], dirs, order), vi(v[i], dirs, order);
        if (order >= 1) {
            for (int d = 0; d < dirs; ++d) {
                MultiIndex e{};
                e[d] = 1;
                const int k = xi.layout().find(e);
                xi.raw(k) = seeds[d][i];
                vi.raw(k) = seeds[d][n + i];
            }
        }
        xs.push_back(xi);
        vs.push_back(vi);
    }
    Jet out = f(xs, vs);
    return out.directions() == dirs ? out : out.embed(dirs, order);
}

// ---------------------------------------------------------------------------
// DerivativeTable
// ---------------------------------------------------------------------------

DerivativeTable::DerivativeTable(const TangentFunction& f, std::span<const double> x,
                                 std::span<const double> v, int order)
    : n_(static_cast<int>(x.size())), m_(2 * n_), order_(order)
{
    if (order < 0 || order > JetLayout::kMaxOrder) {
        fail(ErrorCode::invalid_argument, "derivative table order must be in [0, 4]");
    }
    const std::size_t m = m_;
    if (order >= 1) d1_.assign(m, 0.0);
    if (order >= 2) d2_.assign(m * m, 0.0);
    if (order >= 3) d3_.assign(m * m * m, 0.0);
    if (order >= 4) d4_.assign(m * m * m * m, 0.0);

    const int subset_size = (m_ <= JetLayout::kMaxDirections) ? m_ : std::max(order, 1);
    std::vector<int> subset(subset_size);
    std::iota(subset.begin(), subset.end(), 0);
    bool first = true;
    while (true) {
        std::vector<Direction> dirs;
        for (int a : subset) {
            dirs.push_back(a < n_ ? Direction{Space::x, a} : Direction{Space::v, a - n_});
        }
        const Jet jet = lift(f, x, v, dirs, order);
        if (first) {
            value_ = jet.value();
            first = false;
        }
        const JetLayout& lay = jet.layout();
        for (int k = 1; k < lay.size(); ++k) {
            const MultiIndex& alpha = lay.index(k);
            std::vector<int> idx;
            for (int s = 0; s < subset_size; ++s) {
                for (int r = 0; r < alpha[s]; ++r) {
                    idx.push_back(subset[s]);
                }
            }
            store(idx, jet.raw(k) * multi_factorial(alpha));
        }
        if (subset_size == m_) {
            break;
        }
        // next combination in lexicographic order
        int i = subset_size - 1;
        while (i >= 0 && subset[i] == m_ - subset_size + i) {
            --i;
        }
        if (i < 0) {
            break;
        }
        ++subset[i];
        for (int j = i + 1; j < subset_size; ++j) {
            subset[j] = subset[j - 1] + 1;
        }
    }
}

void DerivativeTable::store(std::span<const int> idx, double value)
{
    std::vector<int> p(idx.begin(), idx.end());
    std::sort(p.begin(), p.end());
    do {
        switch (p.size()) {
        case 1: d1_[p[0]] = value; break;
        case 2: d2_[p[0] * m_ + p[1]] = value; break;
        case 3: d3_[(p[0] * m_ + p[1]) * m_ + p[2]] = value; break;
        case 4: d4_[((p[0] * m_ + p[1]) * m_ + p[2]) * m_ + p[3]] = value; break;
        default: break;
        }
    } while (std::next_permutation(p.begin(), p.end()));
}

double DerivativeTable::at(std::span<const int> idx) const
{
    if (static_cast<int>(idx.size()) > order_) {
        fail(ErrorCode::invalid_argument, "derivative table: requested order exceeds table order");
    }
    switch (idx.size()) {
    case 0: return value_;
    case 1: return d(idx[0]);
    case 2: return d(idx[0], idx[1]);
    case 3: return d(idx[0], idx[1], idx[2]);
    case 4: return d(idx[0], idx[1], idx[2], idx[3]);
    default: fail(ErrorCode::invalid_argument, "derivative table: order above 4");
    }
}

Jet DerivativeTable::shifted(std::span<const int> alpha, std::span<const std::vector<double>> seeds,
                             int order) const
{
    const int p = static_cast<int>(seeds.size());
    if (static_cast<int>(alpha.size()) + order > order_) {
        fail(ErrorCode::invalid_argument, "shifted: table order too low");
    }
    Jet out(at(alpha), p, order);
    if (order == 0) {
        return out;
    }
    const JetLayout& lay = out.layout();
    std::array<int, 8> idx{};
    const int base = static_cast<int>(alpha.size());
    std::copy(alpha.begin(), alpha.end(), idx.begin());
    for (int k = 1; k < lay.size(); ++k) {
        const MultiIndex& beta = lay.index(k);
        std::array<int, 4> outer{};
        int depth = 0;
        for (int d = 0; d < p; ++d) {
            for (int r = 0; r < beta[d]; ++r) {
                outer[depth++] = d;
            }
        }
        // sum over c_1..c_depth of T[alpha, c] * prod seeds[outer_i][c_i]
        double total = 0.0;
        std::function<void(int, double)> rec = [&](int level, double weight) {
            if (level == depth) {
                total += weight * at(std::span<const int>(idx.data(), base + depth));
                return;
            }
            const auto& seed = seeds[outer[level]];
            for (int c = 0; c < m_; ++c) {
                if (seed[c] == 0.0) {
                    continue;
                }
                idx[base + level] = c;
                rec(level + 1, weight * seed[c]);
            }
        };
        rec(0, 1.0);
        out.raw(k) = total / multi_factorial(beta);
    }
    return out;
}

} // namespace finsler
