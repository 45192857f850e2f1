#pragma once

#include <Eigen/Dense>
#include <vector>

namespace finsler {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Dense n x n x n array. For Christoffel symbols (k, i, j) means Gamma^k_ij.
class Tensor3 {
public:
    Tensor3() = default;
    explicit Tensor3(int n) : n_(n), data_(static_cast<std::size_t>(n) * n * n, 0.0) {}

    int dim() const noexcept { return n_; }
    double& operator()(int a, int b, int c) { return data_[(a * n_ + b) * n_ + c]; }
    double operator()(int a, int b, int c) const { return data_[(a * n_ + b) * n_ + c]; }
    const std::vector<double>& data() const noexcept { return data_; }

    // out^a = T(a, b, c) y^b z^c
    Vec contract(const Vec& y, const Vec& z) const
    {
        Vec out = Vec::Zero(n_);
        for (int a = 0; a < n_; ++a)
            for (int b = 0; b < n_; ++b)
                for (int c = 0; c < n_; ++c) out(a) += (*this)(a, b, c) * y(b) * z(c);
        return out;
    }
    // out(a, b) = T(a, b, c) z^c
    Mat contract_last(const Vec& z) const
    {
        Mat out = Mat::Zero(n_, n_);
        for (int a = 0; a < n_; ++a)
            for (int b = 0; b < n_; ++b)
                for (int c = 0; c < n_; ++c) out(a, b) += (*this)(a, b, c) * z(c);
        return out;
    }
    double max_abs() const
    {
        double m = 0.0;
        for (double x : data_) m = std::max(m, std::abs(x));
        return m;
    }

private:
    int n_ = 0;
    std::vector<double> data_;
};

inline Vec to_vec(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), v.size()); }
inline std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

} // namespace finsler
