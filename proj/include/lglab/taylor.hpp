#pragma once

#include <array>
#include <cstddef>

namespace lglab {

/// Bivariate Taylor polynomial truncated at total degree 3, used to take
/// exact partial derivatives (up to third order) of rational fields.
/// coeff(i, j) multiplies u^i v^j.
class Taylor3 {
public:
    static constexpr int kOrder = 3;

    Taylor3() { c_.fill(0.0); }
    Taylor3(double constant) : Taylor3() { at(0, 0) = constant; }  // NOLINT(implicit)

    /// base + du * u + dv * v
    static Taylor3 linear(double base, double du, double dv) {
        Taylor3 t(base);
        t.at(1, 0) = du;
        t.at(0, 1) = dv;
        return t;
    }

    double coeff(int i, int j) const { return c_[static_cast<std::size_t>(index(i, j))]; }

    /// d^(i+j) / du^i dv^j at the expansion point.
    double derivative(int i, int j) const { return coeff(i, j) * factorial(i) * factorial(j); }

    friend Taylor3 operator+(const Taylor3& l, const Taylor3& r) {
        Taylor3 out;
        for (std::size_t k = 0; k < out.c_.size(); ++k) out.c_[k] = l.c_[k] + r.c_[k];
        return out;
    }
    friend Taylor3 operator-(const Taylor3& l, const Taylor3& r) {
        Taylor3 out;
        for (std::size_t k = 0; k < out.c_.size(); ++k) out.c_[k] = l.c_[k] - r.c_[k];
        return out;
    }
    friend Taylor3 operator-(const Taylor3& t) { return Taylor3(0.0) - t; }

    friend Taylor3 operator*(const Taylor3& l, const Taylor3& r) {
        Taylor3 out;
        for (int i = 0; i <= kOrder; ++i)
            for (int j = 0; i + j <= kOrder; ++j)
                for (int p = 0; p <= i; ++p)
                    for (int q = 0; q <= j; ++q) out.at(i, j) += l.coeff(p, q) * r.coeff(i - p, j - q);
        return out;
    }

    friend Taylor3 operator/(const Taylor3& l, const Taylor3& r) { return l * r.reciprocal(); }

    Taylor3 reciprocal() const {
        // 1/(c0 + h) = (1/c0) * sum_k (-h/c0)^k, exact through degree 3
        const double c0 = coeff(0, 0);
        Taylor3 h = *this;
        h.at(0, 0) = 0.0;
        const Taylor3 r = h * Taylor3(-1.0 / c0);
        Taylor3 sum(1.0);
        Taylor3 power(1.0);
        for (int k = 1; k <= kOrder; ++k) {
            power = power * r;
            sum = sum + power;
        }
        return sum * Taylor3(1.0 / c0);
    }

private:
    // (0,0) (0,1) (0,2) (0,3) (1,0) (1,1) (1,2) (2,0) (2,1) (3,0)
    static constexpr int index(int i, int j) {
        constexpr std::array<int, 4> row_start{0, 4, 7, 9};
        return row_start[static_cast<std::size_t>(i)] + j;
    }
    static constexpr double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

    double& at(int i, int j) { return c_[static_cast<std::size_t>(index(i, j))]; }

    std::array<double, 10> c_{};
};

}  // namespace lglab
