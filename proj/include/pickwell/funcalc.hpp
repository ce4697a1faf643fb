#ifndef PICKWELL_FUNCALC_HPP
#define PICKWELL_FUNCALC_HPP

///
/// \file funcalc.hpp
///
/// Rational functions p/q and their evaluation at scalars and at square
/// matrices. For rational f whose poles lie off the spectrum of Z, the Riesz
/// functional calculus f(Z) coincides with p(Z) q(Z)^{-1}; polynomials are
/// evaluated by Horner's scheme.
///

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <pickwell/numkernel.hpp>

namespace pickwell {

/// Coefficients in ascending powers.
using Polynomial = std::vector<complex>;

inline constexpr std::size_t kMaxRationalDegree = 16;

inline void trim(Polynomial& p, double rel = 1e-15)
{
    double scale = 0.0;
    for (const auto& c : p)
        scale = std::max(scale, std::abs(c));
    while (p.size() > 1 && std::abs(p.back()) <= rel * scale)
        p.pop_back();
    if (p.empty())
        p.push_back(0.0);
}

inline std::size_t degree(const Polynomial& p)
{
    std::size_t d = p.size();
    while (d > 1 && p[d - 1] == complex(0.0))
        --d;
    return d == 0 ? 0 : d - 1;
}

inline Polynomial poly_add(const Polynomial& a, const Polynomial& b)
{
    Polynomial out(std::max(a.size(), b.size()), complex(0.0));
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i)
        out[i] += b[i];
    return out;
}

inline Polynomial poly_mul(const Polynomial& a, const Polynomial& b)
{
    if (a.empty() || b.empty())
        return {0.0};
    Polynomial out(a.size() + b.size() - 1, complex(0.0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            out[i + j] += a[i] * b[j];
    return out;
}

inline Polynomial poly_scale(const Polynomial& a, complex s)
{
    Polynomial out = a;
    for (auto& c : out)
        c *= s;
    return out;
}

inline complex poly_eval(const Polynomial& p, complex z)
{
    complex acc = 0.0;
    for (auto it = p.rbegin(); it != p.rend(); ++it)
        acc = acc * z + *it;
    return acc;
}

inline ComplexMatrix poly_eval(const Polynomial& p, const ComplexMatrix& z)
{
    const auto n = z.rows();
    ComplexMatrix acc = ComplexMatrix::Zero(n, n);
    for (auto it = p.rbegin(); it != p.rend(); ++it) {
        acc = acc * z;
        acc.diagonal().array() += *it;
    }
    return acc;
}

/// Roots via the eigenvalues of the companion matrix.
inline std::vector<complex> poly_roots(Polynomial p)
{
    trim(p);
    const auto deg = p.size() - 1;
    if (deg == 0)
        return {};
    ComplexMatrix c = ComplexMatrix::Zero(static_cast<Eigen::Index>(deg), static_cast<Eigen::Index>(deg));
    for (std::size_t i = 1; i < deg; ++i)
        c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
    for (std::size_t i = 0; i < deg; ++i)
        c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(deg - 1)) = -p[i] / p[deg];
    Eigen::ComplexEigenSolver<ComplexMatrix> es(c, false);
    std::vector<complex> roots(deg);
    for (std::size_t i = 0; i < deg; ++i)
        roots[i] = es.eigenvalues()(static_cast<Eigen::Index>(i));
    return roots;
}

/// p/q with q(0) normalized to 1 whenever q(0) != 0.
class RationalForm {
public:
    RationalForm()
        : num_{0.0}, den_{1.0}
    {
    }

    RationalForm(Polynomial num, Polynomial den)
        : num_(std::move(num)), den_(std::move(den))
    {
        trim(num_);
        trim(den_);
        if (den_.size() == 1 && den_[0] == complex(0.0))
            throw error(errc::singular_denominator, "RationalForm: zero denominator");
        if (std::max(num_.size(), den_.size()) - 1 > kMaxRationalDegree)
            throw error(errc::shape_mismatch, "RationalForm: degree exceeds " +
                                                  std::to_string(kMaxRationalDegree));
        if (den_[0] != complex(0.0)) {
            const complex s = 1.0 / den_[0];
            num_ = poly_scale(num_, s);
            den_ = poly_scale(den_, s);
            den_[0] = 1.0;
        }
    }

    static RationalForm constant(complex c) { return RationalForm({c}, {1.0}); }
    static RationalForm identity() { return RationalForm({0.0, 1.0}, {1.0}); }

    const Polynomial& numerator() const noexcept { return num_; }
    const Polynomial& denominator() const noexcept { return den_; }
    std::size_t degree() const noexcept
    {
        return std::max(pickwell::degree(num_), pickwell::degree(den_));
    }

    friend RationalForm operator*(const RationalForm& a, const RationalForm& b)
    {
        return {poly_mul(a.num_, b.num_), poly_mul(a.den_, b.den_)};
    }
    friend RationalForm operator+(const RationalForm& a, const RationalForm& b)
    {
        return {poly_add(poly_mul(a.num_, b.den_), poly_mul(b.num_, a.den_)),
                poly_mul(a.den_, b.den_)};
    }

private:
    Polynomial num_;
    Polynomial den_;
};

inline complex eval_scalar(const RationalForm& f, complex z)
{
    const complex q = poly_eval(f.denominator(), z);
    double scale = 0.0;
    double zp = 1.0;
    for (const auto& c : f.denominator()) {
        scale += std::abs(c) * zp;
        zp *= std::abs(z);
    }
    if (std::abs(q) <= 1e-14 * scale)
        throw error(errc::pole_at_point, "eval_scalar: denominator vanishes at the argument");
    return poly_eval(f.numerator(), z) / q;
}

struct OperatorValue {
    ComplexMatrix value;
    /// ||q(Z) value - p(Z)||
    double residual = 0.0;
    /// Reciprocal condition estimate of q(Z).
    double rcond = 0.0;
};

/// f(Z) = p(Z) q(Z)^{-1}. Throws SingularDenominator if q(Z) is not invertible.
inline OperatorValue eval_operator_checked(const RationalForm& f, const ComplexMatrix& z)
{
    require_square(z, "eval_operator");
    require_finite(z, "eval_operator");
    const ComplexMatrix p = poly_eval(f.numerator(), z);
    const ComplexMatrix q = poly_eval(f.denominator(), z);
    Eigen::PartialPivLU<ComplexMatrix> lu(q);
    OperatorValue out;
    out.rcond = z.rows() == 0 ? 1.0 : lu.rcond();
    if (!(out.rcond > 1e-14))
        throw error(errc::singular_denominator,
                    "eval_operator: q(Z) is singular (rcond " + std::to_string(out.rcond) + ")",
                    out.rcond);
    out.value = lu.solve(p);
    out.residual = (q * out.value - p).norm();
    return out;
}

inline ComplexMatrix eval_operator(const RationalForm& f, const ComplexMatrix& z)
{
    return eval_operator_checked(f, z).value;
}

/// First n Taylor coefficients of p/q by power-series division.
inline std::vector<complex> taylor_jet(const RationalForm& f, std::size_t n)
{
    const auto& p = f.numerator();
    const auto& q = f.denominator();
    if (q.empty() || q[0] == complex(0.0))
        throw error(errc::pole_at_origin, "taylor_jet: denominator vanishes at 0");
    std::vector<complex> c(n, complex(0.0));
    for (std::size_t i = 0; i < n; ++i) {
        complex acc = i < p.size() ? p[i] : complex(0.0);
        for (std::size_t j = 1; j <= i && j < q.size(); ++j)
            acc -= q[j] * c[i - j];
        c[i] = acc / q[0];
    }
    return c;
}

/// Maximum of |f| over `samples` equally spaced points of the unit circle.
inline double sampled_sup_norm(const RationalForm& f, std::size_t samples = 512)
{
    double sup = 0.0;
    for (std::size_t j = 0; j < samples; ++j) {
        const double theta = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(samples);
        sup = std::max(sup, std::abs(eval_scalar(f, std::polar(1.0, theta))));
    }
    return sup;
}

/// Smallest modulus among the roots of the denominator (infinity if constant).
inline double min_pole_modulus(const RationalForm& f)
{
    double m = std::numeric_limits<double>::infinity();
    for (const auto& r : poly_roots(f.denominator()))
        m = std::min(m, std::abs(r));
    return m;
}

} // namespace pickwell

#endif // PICKWELL_FUNCALC_HPP
