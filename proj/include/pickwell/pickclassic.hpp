#ifndef PICKWELL_PICKCLASSIC_HPP
#define PICKWELL_PICKCLASSIC_HPP

///
/// \file pickclassic.hpp
///
/// Scalar interpolation in the closed unit ball of H^infinity.
///
///  - pick_matrix: ((1 - w_i conj(w_j)) / (1 - z_i conj(z_j))) and its PSD verdict.
///  - schur_interpolate: the Schur / Nevanlinna recursion at distinct nodes.
///  - caratheodory_fejer: the same recursion on Taylor coefficients at 0, which
///    realizes interpolation f(S_N) = lower-triangular Toeplitz at the nilpotent
///    shift S_N.
///
/// Interpolants are returned as a SchurFn: the cascade
///
///     f_j = (gamma_j + b_j f_{j+1}) / (1 + conj(gamma_j) b_j f_{j+1}),
///     b_j(zeta) = (zeta - z_j) / (1 - conj(z_j) zeta),
///
/// terminated by a constant (0 for the central solution, unimodular when the
/// recursion hits the boundary). The cascade is expanded once into a rational
/// form that is used for every evaluation.
///

#include <cmath>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include <pickwell/funcalc.hpp>

namespace pickwell {

enum class SchurMode { np, jet };

class SchurFn {
public:
    SchurFn() = default;

    SchurFn(std::vector<complex> parameters, std::vector<complex> anchors, complex terminal,
            SchurMode mode)
        : params_(std::move(parameters))
        , anchors_(std::move(anchors))
        , terminal_(terminal)
        , mode_(mode)
    {
        if (params_.size() != anchors_.size())
            throw error(errc::shape_mismatch, "SchurFn: one anchor per parameter required");
        rational_ = expand();
    }

    static SchurFn constant(complex c) { return SchurFn({}, {}, c, SchurMode::jet); }

    const std::vector<complex>& parameters() const noexcept { return params_; }
    const std::vector<complex>& anchors() const noexcept { return anchors_; }
    complex terminal() const noexcept { return terminal_; }
    SchurMode mode() const noexcept { return mode_; }
    const RationalForm& rational() const noexcept { return rational_; }
    std::size_t degree() const noexcept { return rational_.degree(); }

private:
    RationalForm expand() const
    {
        Polynomial p{terminal_};
        Polynomial q{1.0};
        for (std::size_t idx = params_.size(); idx-- > 0;) {
            const complex g = params_[idx];
            const complex a = anchors_[idx];
            const bool vanishing = pickwell::degree(p) == 0 && p[0] == complex(0.0);
            if (vanishing) {
                p = {g};
                q = {1.0};
                continue;
            }
            const Polynomial u{-a, 1.0};
            const Polynomial v{1.0, -std::conj(a)};
            const Polynomial vq = poly_mul(v, q);
            const Polynomial up = poly_mul(u, p);
            Polynomial np = poly_add(poly_scale(vq, g), up);
            Polynomial nq = poly_add(vq, poly_scale(up, std::conj(g)));
            p = std::move(np);
            q = std::move(nq);
        }
        return RationalForm(p, q);
    }

    std::vector<complex> params_;
    std::vector<complex> anchors_;
    complex terminal_ = 0.0;
    SchurMode mode_ = SchurMode::np;
    RationalForm rational_;
};

inline complex eval_scalar(const SchurFn& f, complex z) { return eval_scalar(f.rational(), z); }
inline ComplexMatrix eval_operator(const SchurFn& f, const ComplexMatrix& z)
{
    return eval_operator(f.rational(), z);
}
inline std::vector<complex> taylor_jet(const SchurFn& f, std::size_t n)
{
    return taylor_jet(f.rational(), n);
}
inline double sampled_sup_norm(const SchurFn& f, std::size_t samples = 512)
{
    return sampled_sup_norm(f.rational(), samples);
}

/// Recursion stopped: at 1-based `step` the current value had modulus
/// `modulus` > 1, or a unimodular value was not followed by constant data.
struct Infeasible {
    std::size_t step = 0;
    double modulus = 0.0;
    std::string reason;
};

using InterpolationResult = std::variant<SchurFn, Infeasible>;

inline bool feasible(const InterpolationResult& r) { return std::holds_alternative<SchurFn>(r); }

struct PickMatrixResult {
    ComplexMatrix matrix;
    double min_eigenvalue = 0.0;
    PsdVerdict verdict;
};

namespace detail {

inline void check_disc_nodes(const std::vector<complex>& z, const char* where)
{
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (!(std::abs(z[i]) < 1.0))
            throw error(errc::point_on_boundary,
                        std::string(where) + ": node " + std::to_string(i) + " is not inside the disc");
        for (std::size_t j = 0; j < i; ++j)
            if (z[i] == z[j])
                throw error(errc::duplicate_points,
                            std::string(where) + ": nodes " + std::to_string(j) + " and " +
                                std::to_string(i) + " coincide");
    }
}

/// Equality tolerance applied to the data following a unimodular value.
inline double degenerate_tol(const ToleranceConfig& tol) { return 1e3 * tol.boundary_tol; }

} // namespace detail

inline PickMatrixResult pick_matrix(const std::vector<complex>& z, const std::vector<complex>& w,
                                    const ToleranceConfig& tol = {})
{
    if (z.size() != w.size())
        throw error(errc::shape_mismatch, "pick_matrix: node and target counts differ");
    detail::check_disc_nodes(z, "pick_matrix");
    const auto n = static_cast<Eigen::Index>(z.size());
    PickMatrixResult out;
    out.matrix.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto ui = static_cast<std::size_t>(i);
            const auto uj = static_cast<std::size_t>(j);
            out.matrix(i, j) = (1.0 - w[ui] * std::conj(w[uj])) / (1.0 - z[ui] * std::conj(z[uj]));
        }
    out.verdict = psd_verdict(out.matrix, tol);
    out.min_eigenvalue = out.verdict.min_eigenvalue;
    return out;
}

inline InterpolationResult schur_interpolate(std::vector<complex> z, std::vector<complex> w,
                                             const ToleranceConfig& tol = {})
{
    if (z.size() != w.size())
        throw error(errc::shape_mismatch, "schur_interpolate: node and target counts differ");
    detail::check_disc_nodes(z, "schur_interpolate");
    for (const auto& v : w)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw error(errc::non_finite, "schur_interpolate: non-finite target");

    std::vector<complex> params;
    std::vector<complex> anchors;
    complex terminal = 0.0;
    std::size_t step = 0;
    while (!z.empty()) {
        ++step;
        const complex g = w.front();
        const double mod = std::abs(g);
        if (mod > 1.0 + tol.boundary_tol)
            return Infeasible{step, mod, "value of modulus > 1"};
        if (std::abs(mod - 1.0) <= tol.boundary_tol) {
            const complex u = g / mod;
            for (std::size_t i = 1; i < w.size(); ++i)
                if (std::abs(w[i] - u) > detail::degenerate_tol(tol))
                    return Infeasible{step + 1, std::abs(w[i]),
                                      "unimodular value not followed by constant data"};
            terminal = u;
            break;
        }
        const complex z0 = z.front();
        std::vector<complex> nz;
        std::vector<complex> nw;
        for (std::size_t i = 1; i < z.size(); ++i) {
            const complex den = 1.0 - std::conj(g) * w[i];
            if (std::abs(den) <= 1e-300)
                return Infeasible{step + 1, std::numeric_limits<double>::infinity(),
                                  "Moebius transform of the data is singular"};
            const complex b = (z[i] - z0) / (1.0 - std::conj(z0) * z[i]);
            nz.push_back(z[i]);
            nw.push_back(((w[i] - g) / den) / b);
        }
        params.push_back(g);
        anchors.push_back(z0);
        z = std::move(nz);
        w = std::move(nw);
    }
    return SchurFn(std::move(params), std::move(anchors), terminal, SchurMode::np);
}

namespace detail {

/// Truncated power-series quotient a / b to `n` terms; b[0] != 0.
inline std::vector<complex> series_divide(const std::vector<complex>& a,
                                          const std::vector<complex>& b, std::size_t n)
{
    std::vector<complex> c(n, complex(0.0));
    for (std::size_t i = 0; i < n; ++i) {
        complex acc = i < a.size() ? a[i] : complex(0.0);
        for (std::size_t j = 1; j <= i && j < b.size(); ++j)
            acc -= b[j] * c[i - j];
        c[i] = acc / b[0];
    }
    return c;
}

} // namespace detail

/// Schur recursion on Taylor coefficients: gamma_0 = c_0, and the next series is
/// (f - gamma_0) / (zeta (1 - conj(gamma_0) f)) truncated to one term fewer.
inline InterpolationResult caratheodory_fejer(std::vector<complex> jet,
                                              const ToleranceConfig& tol = {})
{
    for (const auto& v : jet)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw error(errc::non_finite, "caratheodory_fejer: non-finite coefficient");
    std::vector<complex> params;
    complex terminal = 0.0;
    std::size_t step = 0;
    while (!jet.empty()) {
        ++step;
        const complex g = jet.front();
        const double mod = std::abs(g);
        if (mod > 1.0 + tol.boundary_tol)
            return Infeasible{step, mod, "Schur parameter of modulus > 1"};
        if (std::abs(mod - 1.0) <= tol.boundary_tol) {
            for (std::size_t i = 1; i < jet.size(); ++i)
                if (std::abs(jet[i]) > detail::degenerate_tol(tol))
                    return Infeasible{step + 1, std::abs(jet[i]),
                                      "unimodular parameter not followed by a constant jet"};
            terminal = g / mod;
            break;
        }
        const std::size_t rest = jet.size() - 1;
        std::vector<complex> shifted(jet.begin() + 1, jet.end());
        std::vector<complex> den(jet.size());
        for (std::size_t i = 0; i < jet.size(); ++i)
            den[i] = (i == 0 ? 1.0 : 0.0) - std::conj(g) * jet[i];
        params.push_back(g);
        jet = detail::series_divide(shifted, den, rest);
    }
    std::vector<complex> anchors(params.size(), complex(0.0));
    return SchurFn(std::move(params), std::move(anchors), terminal, SchurMode::jet);
}

/// (i, j) entry c_{i-j} for i >= j, zero above the diagonal.
inline ComplexMatrix toeplitz_from_jet(const std::vector<complex>& jet)
{
    const auto n = static_cast<Eigen::Index>(jet.size());
    ComplexMatrix t = ComplexMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j <= i; ++j)
            t(i, j) = jet[static_cast<std::size_t>(i - j)];
    return t;
}

/// Nilpotent lower shift S_N (ones on the subdiagonal); f(S_N) is the
/// lower-triangular Toeplitz matrix of the first N Taylor coefficients of f.
inline ComplexMatrix shift_matrix(Eigen::Index n)
{
    ComplexMatrix s = ComplexMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i + 1 < n; ++i)
        s(i + 1, i) = 1.0;
    return s;
}

/// Jet read off a lower-triangular Toeplitz matrix, or empty if `t` is not one.
inline std::vector<complex> jet_from_toeplitz(const ComplexMatrix& t, double tol = 0.0)
{
    if (t.rows() != t.cols())
        return {};
    const auto n = t.rows();
    std::vector<complex> jet(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        jet[static_cast<std::size_t>(i)] = t(i, 0);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const complex expected = i >= j ? jet[static_cast<std::size_t>(i - j)] : complex(0.0);
            if (std::abs(t(i, j) - expected) > tol)
                return {};
        }
    return jet;
}

} // namespace pickwell

#endif // PICKWELL_PICKCLASSIC_HPP
