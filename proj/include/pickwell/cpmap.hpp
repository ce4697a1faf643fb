#ifndef PICKWELL_CPMAP_HPP
#define PICKWELL_CPMAP_HPP

///
/// \file cpmap.hpp
///
/// Completely positive maps on M_{mk} held in Kraus form
///
///     Phi(A) = sum_s K_s A K_s^*,
///
/// together with their superoperator (column-major vectorization) and Choi
/// (sum_pq E_pq (x) Phi(E_pq), domain index first) representations.
///
/// Maps built from points act on m x m block matrices with k x k blocks:
/// entry (i,j) of Phi_z((a_ij)) is sum_t Z_i^(t) a_ij Z_j^(t)*. Under the scalar
/// specialization used throughout, the commutant on which these maps live is
/// the full matrix algebra, so no subalgebra type is enforced.
///

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <pickwell/numkernel.hpp>

namespace pickwell {

/// A d-tuple of k x k matrices (Z^(1), ..., Z^(d)).
class OperatorPoint {
public:
    OperatorPoint() = default;

    explicit OperatorPoint(std::vector<ComplexMatrix> blocks)
        : blocks_(std::move(blocks))
    {
        if (blocks_.empty())
            throw error(errc::shape_mismatch, "OperatorPoint: need at least one block");
        const auto k = blocks_.front().rows();
        for (const auto& b : blocks_) {
            if (b.rows() != k || b.cols() != k)
                throw error(errc::shape_mismatch,
                            "OperatorPoint: all blocks must be square of equal size");
            require_finite(b, "OperatorPoint");
        }
        row_norm_ = operator_norm(row());
    }

    /// Convenience for d = 1.
    static OperatorPoint single(const ComplexMatrix& z) { return OperatorPoint({z}); }

    std::size_t d() const noexcept { return blocks_.size(); }
    Eigen::Index k() const noexcept { return blocks_.empty() ? 0 : blocks_.front().rows(); }
    const ComplexMatrix& operator[](std::size_t t) const { return blocks_[t]; }
    const std::vector<ComplexMatrix>& blocks() const noexcept { return blocks_; }

    /// Norm of the block row [Z^(1) ... Z^(d)].
    double row_norm() const noexcept { return row_norm_; }

    ComplexMatrix row() const
    {
        ComplexMatrix r(k(), k() * static_cast<Eigen::Index>(d()));
        for (std::size_t t = 0; t < d(); ++t)
            r.middleCols(static_cast<Eigen::Index>(t) * k(), k()) = blocks_[t];
        return r;
    }

    friend bool operator==(const OperatorPoint& a, const OperatorPoint& b)
    {
        if (a.d() != b.d() || a.k() != b.k())
            return false;
        for (std::size_t t = 0; t < a.d(); ++t)
            if (a.blocks_[t] != b.blocks_[t])
                return false;
        return true;
    }

private:
    std::vector<ComplexMatrix> blocks_;
    double row_norm_ = 0.0;
};

/// Records which points/targets a map was assembled from. Metadata only.
struct MapLabel {
    enum class Kind { none, points, targets } kind = Kind::none;
    std::vector<std::size_t> indices;
};

class CPMap {
public:
    CPMap() = default;

    CPMap(Eigen::Index m, Eigen::Index k, std::vector<ComplexMatrix> kraus, MapLabel label = {})
        : m_(m), k_(k), kraus_(std::move(kraus)), label_(std::move(label))
    {
        for (const auto& op : kraus_)
            if (op.rows() != dim() || op.cols() != dim())
                throw error(errc::shape_mismatch, "CPMap: Kraus operator has wrong size");
    }

    static CPMap zero(Eigen::Index m, Eigen::Index k) { return CPMap(m, k, {}); }
    static CPMap identity(Eigen::Index m, Eigen::Index k)
    {
        return CPMap(m, k, {ComplexMatrix::Identity(m * k, m * k)});
    }

    Eigen::Index m() const noexcept { return m_; }
    Eigen::Index k() const noexcept { return k_; }
    Eigen::Index dim() const noexcept { return m_ * k_; }
    const std::vector<ComplexMatrix>& kraus() const noexcept { return kraus_; }
    const MapLabel& label() const noexcept { return label_; }

    ComplexMatrix operator()(const ComplexMatrix& a) const
    {
        if (a.rows() != dim() || a.cols() != dim())
            throw error(errc::shape_mismatch, "CPMap::apply: dimension mismatch");
        ComplexMatrix out = ComplexMatrix::Zero(dim(), dim());
        for (const auto& op : kraus_)
            out.noalias() += op * a * op.adjoint();
        return out;
    }

private:
    Eigen::Index m_ = 0;
    Eigen::Index k_ = 0;
    std::vector<ComplexMatrix> kraus_;
    MapLabel label_;
};

inline ComplexMatrix apply(const CPMap& phi, const ComplexMatrix& a) { return phi(a); }

/// Block-diagonal Kraus family diag(Z_1^(t), ..., Z_m^(t)), one per t.
inline CPMap phi_from_points(const std::vector<OperatorPoint>& points)
{
    if (points.empty())
        throw error(errc::shape_mismatch, "phi_from_points: no points");
    const auto d = points.front().d();
    const auto k = points.front().k();
    for (const auto& p : points)
        if (p.d() != d || p.k() != k)
            throw error(errc::shape_mismatch, "phi_from_points: points differ in d or k");
    const auto m = static_cast<Eigen::Index>(points.size());
    std::vector<ComplexMatrix> kraus;
    kraus.reserve(d);
    for (std::size_t t = 0; t < d; ++t) {
        ComplexMatrix op = ComplexMatrix::Zero(m * k, m * k);
        for (Eigen::Index i = 0; i < m; ++i)
            op.block(i * k, i * k, k, k) = points[static_cast<std::size_t>(i)][t];
        kraus.push_back(std::move(op));
    }
    MapLabel label{MapLabel::Kind::points, {}};
    for (std::size_t i = 0; i < points.size(); ++i)
        label.indices.push_back(i);
    return CPMap(m, k, std::move(kraus), std::move(label));
}

/// Single Kraus operator diag(W_1, ..., W_m).
inline CPMap phi_from_targets(const std::vector<ComplexMatrix>& targets)
{
    if (targets.empty())
        throw error(errc::shape_mismatch, "phi_from_targets: no targets");
    const auto k = targets.front().rows();
    for (const auto& w : targets)
        if (w.rows() != k || w.cols() != k)
            throw error(errc::shape_mismatch, "phi_from_targets: targets must all be k x k");
    const auto m = static_cast<Eigen::Index>(targets.size());
    ComplexMatrix op = ComplexMatrix::Zero(m * k, m * k);
    for (Eigen::Index i = 0; i < m; ++i)
        op.block(i * k, i * k, k, k) = targets[static_cast<std::size_t>(i)];
    MapLabel label{MapLabel::Kind::targets, {}};
    for (std::size_t i = 0; i < targets.size(); ++i)
        label.indices.push_back(i);
    return CPMap(m, k, {std::move(op)}, std::move(label));
}

/// phi o psi: Kraus family of all products.
inline CPMap compose(const CPMap& phi, const CPMap& psi)
{
    if (phi.dim() != psi.dim())
        throw error(errc::shape_mismatch, "compose: dimension mismatch");
    std::vector<ComplexMatrix> kraus;
    kraus.reserve(phi.kraus().size() * psi.kraus().size());
    for (const auto& a : phi.kraus())
        for (const auto& b : psi.kraus())
            kraus.push_back(a * b);
    return CPMap(phi.m(), phi.k(), std::move(kraus));
}

inline CPMap power(const CPMap& phi, std::size_t n)
{
    CPMap out = CPMap::identity(phi.m(), phi.k());
    for (std::size_t i = 0; i < n; ++i)
        out = compose(phi, out);
    return out;
}

/// Promotion to M_r(M_dim): (A_uv) -> (Phi(A_uv)). Kraus operators I_r (x) K_s,
/// the outer (level) index first.
inline CPMap promote(const CPMap& phi, Eigen::Index r)
{
    if (r < 1)
        throw error(errc::shape_mismatch, "promote: level must be >= 1");
    if (r == 1)
        return phi;
    std::vector<ComplexMatrix> kraus;
    kraus.reserve(phi.kraus().size());
    const ComplexMatrix id = ComplexMatrix::Identity(r, r);
    for (const auto& op : phi.kraus())
        kraus.push_back(kron(id, op));
    return CPMap(r * phi.m(), phi.k(), std::move(kraus), phi.label());
}

/// Applies a map blockwise to an (r*dim) x (r*dim) matrix without forming the
/// promoted Kraus operators.
inline ComplexMatrix apply_promoted(const CPMap& phi, const ComplexMatrix& a)
{
    const auto n = phi.dim();
    if (n == 0 || a.rows() % n != 0 || a.rows() != a.cols())
        throw error(errc::shape_mismatch, "apply_promoted: dimension mismatch");
    const auto r = a.rows() / n;
    ComplexMatrix out(a.rows(), a.cols());
    for (Eigen::Index u = 0; u < r; ++u)
        for (Eigen::Index v = 0; v < r; ++v)
            out.block(u * n, v * n, n, n) = phi(a.block(u * n, v * n, n, n));
    return out;
}

/// Matrix of a linear map on M_dim in column-major vec coordinates:
/// vec(Phi(A)) = S vec(A).
struct Superoperator {
    Eigen::Index dim = 0;
    ComplexMatrix matrix;

    ComplexMatrix operator()(const ComplexMatrix& a) const
    {
        if (a.rows() != dim || a.cols() != dim)
            throw error(errc::shape_mismatch, "Superoperator::apply: dimension mismatch");
        return unvec(matrix * vec(a), dim);
    }

    static Superoperator identity(Eigen::Index dim)
    {
        return {dim, ComplexMatrix::Identity(dim * dim, dim * dim)};
    }
};

/// vec(K A K^*) = (conj(K) (x) K) vec(A).
inline Superoperator superoperator(const CPMap& phi)
{
    const auto n = phi.dim();
    Superoperator s{n, ComplexMatrix::Zero(n * n, n * n)};
    for (const auto& op : phi.kraus())
        s.matrix += kron(op.conjugate(), op);
    return s;
}

/// Superoperator of an arbitrary linear map given by its action.
inline Superoperator superoperator_of(const std::function<ComplexMatrix(const ComplexMatrix&)>& map,
                                      Eigen::Index dim)
{
    Superoperator s{dim, ComplexMatrix(dim * dim, dim * dim)};
    for (Eigen::Index q = 0; q < dim; ++q)
        for (Eigen::Index p = 0; p < dim; ++p)
            s.matrix.col(p + q * dim) = vec(map(matrix_unit(dim, p, q)));
    return s;
}

/// sum_pq E_pq (x) L(E_pq), read directly off the superoperator columns.
inline ComplexMatrix choi(const Superoperator& s)
{
    const auto n = s.dim;
    ComplexMatrix c(n * n, n * n);
    for (Eigen::Index p = 0; p < n; ++p)
        for (Eigen::Index q = 0; q < n; ++q) {
            const auto col = p + q * n;
            for (Eigen::Index b = 0; b < n; ++b)
                for (Eigen::Index a = 0; a < n; ++a)
                    c(p * n + a, q * n + b) = s.matrix(a + b * n, col);
        }
    return c;
}

inline ComplexMatrix choi(const CPMap& phi)
{
    const auto n = phi.dim();
    ComplexMatrix c(n * n, n * n);
    for (Eigen::Index p = 0; p < n; ++p)
        for (Eigen::Index q = 0; q < n; ++q)
            c.block(p * n, q * n, n, n) = phi(matrix_unit(n, p, q));
    return c;
}

struct CPVerdict {
    bool completely_positive = true;
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
    ComplexVector eigenvector;
    ComplexMatrix choi_matrix;

    explicit operator bool() const noexcept { return completely_positive; }
};

/// Choi's criterion. Throws NotHermiticityPreserving when L(E_pq)^* != L(E_qp).
inline CPVerdict is_completely_positive(const Superoperator& s, const ToleranceConfig& tol = {})
{
    CPVerdict out;
    out.choi_matrix = choi(s);
    require_finite(out.choi_matrix, "is_completely_positive");
    if (!is_hermitian(out.choi_matrix, tol.residual_tol))
        throw error(errc::not_hermiticity_preserving,
                    "is_completely_positive: Choi matrix is not Hermitian (defect " +
                        std::to_string(hermitian_defect(out.choi_matrix)) + ")",
                    hermitian_defect(out.choi_matrix));
    const auto v = psd_verdict(out.choi_matrix, tol);
    out.completely_positive = v.psd;
    out.min_eigenvalue = v.min_eigenvalue;
    out.max_eigenvalue = v.max_eigenvalue;
    out.eigenvector = v.witness;
    return out;
}

inline CPVerdict is_completely_positive(const CPMap& phi, const ToleranceConfig& tol = {})
{
    return is_completely_positive(superoperator(phi), tol);
}

inline CPVerdict is_completely_positive(const std::function<ComplexMatrix(const ComplexMatrix&)>& map,
                                        Eigen::Index dim, const ToleranceConfig& tol = {})
{
    return is_completely_positive(superoperator_of(map, dim), tol);
}

/// True when Phi^dim(I) vanishes, i.e. every word of length >= k in the
/// generating tuple is zero. A nilpotent tuple on C^k dies at word length k,
/// so dim = mk is always enough.
inline bool is_nilpotent(const CPMap& phi)
{
    const auto n = phi.dim();
    ComplexMatrix x = ComplexMatrix::Identity(n, n);
    const double scale = std::max(1.0, phi(x).norm());
    for (Eigen::Index i = 0; i < n; ++i) {
        x = phi(x);
        if (x.norm() == 0.0)
            return true;
    }
    return x.norm() <= 1e-14 * std::pow(scale, static_cast<double>(n));
}

/// Spectral radius of the superoperator, reported as exactly 0 for nilpotent
/// maps (numerical eigenvalues of a nilpotent matrix scatter like eps^(1/n)).
inline double map_spectral_radius(const CPMap& phi)
{
    if (phi.kraus().empty() || is_nilpotent(phi))
        return 0.0;
    return spectral_radius(superoperator(phi).matrix);
}

} // namespace pickwell

#endif // PICKWELL_CPMAP_HPP
