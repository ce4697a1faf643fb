#ifndef PICKWELL_NUMKERNEL_HPP
#define PICKWELL_NUMKERNEL_HPP

///
/// \file numkernel.hpp
///
/// Dense complex linear algebra used by every other module: Hermitian
/// eigendecomposition, PSD verdicts, norms, spectral radius and linear solves.
/// Thin wrappers around Eigen with the tolerance conventions of the library.
///

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include <pickwell/error.hpp>

namespace pickwell {

using complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

struct ToleranceConfig {
    double psd_tol = 1e-9;
    double residual_tol = 1e-10;
    double boundary_tol = 1e-9;

    bool valid() const noexcept
    {
        return psd_tol >= 0.0 && residual_tol >= 0.0 && boundary_tol >= 0.0;
    }
};

inline bool all_finite(const ComplexMatrix& a)
{
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag()))
                return false;
    return true;
}

inline void require_finite(const ComplexMatrix& a, const char* where)
{
    if (!all_finite(a))
        throw error(errc::non_finite, std::string(where) + ": matrix has NaN/Inf entries");
}

inline void require_square(const ComplexMatrix& a, const char* where)
{
    if (a.rows() != a.cols())
        throw error(errc::shape_mismatch,
                    std::string(where) + ": expected square matrix, got " +
                        std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
}

/// Largest singular value.
inline double operator_norm(const ComplexMatrix& a)
{
    require_finite(a, "operator_norm");
    if (a.size() == 0)
        return 0.0;
    Eigen::JacobiSVD<ComplexMatrix> svd(a);
    return svd.singularValues()(0);
}

inline double hermitian_defect(const ComplexMatrix& a)
{
    return (a - a.adjoint()).norm();
}

inline bool is_hermitian(const ComplexMatrix& a, double residual_tol)
{
    if (a.rows() != a.cols())
        return false;
    return hermitian_defect(a) <= residual_tol * std::max(1.0, a.norm());
}

struct HermitianEig {
    RealVector eigenvalues; // ascending
    ComplexMatrix eigenvectors;
};

inline HermitianEig hermitian_eig(const ComplexMatrix& a,
                                  const ToleranceConfig& tol = {})
{
    require_square(a, "hermitian_eig");
    require_finite(a, "hermitian_eig");
    if (!is_hermitian(a, tol.residual_tol))
        throw error(errc::not_hermitian, "hermitian_eig: ||A - A*|| = " +
                                             std::to_string(hermitian_defect(a)),
                    hermitian_defect(a));
    const ComplexMatrix sym = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sym);
    if (es.info() != Eigen::Success)
        throw error(errc::non_finite, "hermitian_eig: eigensolver did not converge");
    return {es.eigenvalues(), es.eigenvectors()};
}

struct PsdVerdict {
    bool psd = true;
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
    /// Eigenvector of the smallest eigenvalue (empty for 0x0 input).
    ComplexVector witness;

    explicit operator bool() const noexcept { return psd; }
};

/// PSD iff lambda_min >= -psd_tol * max(1, lambda_max).
inline PsdVerdict psd_verdict(const ComplexMatrix& a, const ToleranceConfig& tol = {})
{
    PsdVerdict v;
    if (a.rows() == 0)
        return v;
    const auto eig = hermitian_eig(a, tol);
    v.min_eigenvalue = eig.eigenvalues(0);
    v.max_eigenvalue = eig.eigenvalues(eig.eigenvalues.size() - 1);
    v.witness = eig.eigenvectors.col(0);
    v.psd = v.min_eigenvalue >= -tol.psd_tol * std::max(1.0, v.max_eigenvalue);
    return v;
}

/// max |lambda| from a full (non-Hermitian) eigenvalue computation.
inline double spectral_radius(const ComplexMatrix& a)
{
    require_square(a, "spectral_radius");
    require_finite(a, "spectral_radius");
    if (a.rows() == 0)
        return 0.0;
    Eigen::ComplexEigenSolver<ComplexMatrix> es(a, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
        throw error(errc::non_finite, "spectral_radius: eigensolver did not converge");
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Solves A X = B. Throws Singular when the reciprocal condition estimate is
/// below 1e-14; the estimate is attached to the error.
inline ComplexMatrix solve_linear(const ComplexMatrix& a, const ComplexMatrix& b)
{
    require_square(a, "solve_linear");
    if (a.rows() != b.rows())
        throw error(errc::shape_mismatch, "solve_linear: row count mismatch");
    require_finite(a, "solve_linear");
    require_finite(b, "solve_linear");
    Eigen::PartialPivLU<ComplexMatrix> lu(a);
    const double rcond = std::isnan(lu.rcond()) ? 0.0 : lu.rcond();
    if (!(rcond > 1e-14))
        throw error(errc::singular,
                    "solve_linear: reciprocal condition estimate " + std::to_string(rcond),
                    rcond);
    return lu.solve(b);
}

// --- small helpers shared by the map modules ---------------------------------

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b)
{
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// Column-major vectorization.
inline ComplexVector vec(const ComplexMatrix& a)
{
    return Eigen::Map<const ComplexVector>(a.data(), a.size());
}

inline ComplexMatrix unvec(const ComplexVector& v, Eigen::Index rows)
{
    return Eigen::Map<const ComplexMatrix>(v.data(), rows, v.size() / rows);
}

inline ComplexMatrix matrix_unit(Eigen::Index n, Eigen::Index p, Eigen::Index q)
{
    ComplexMatrix e = ComplexMatrix::Zero(n, n);
    e(p, q) = 1.0;
    return e;
}

} // namespace pickwell

#endif // PICKWELL_NUMKERNEL_HPP
