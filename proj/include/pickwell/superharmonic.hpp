#ifndef PICKWELL_SUPERHARMONIC_HPP
#define PICKWELL_SUPERHARMONIC_HPP

///
/// \file superharmonic.hpp
///
/// The superharmonic cone of a CP map Phi: elements Q >= 0 with Phi(Q) <= Q,
/// pure when Phi^n(Q) -> 0. Provides the Stein equation Q - Phi(Q) = R (dense
/// solve and Neumann series), the word-sum Gramians sum_w Z_w B B^* Z_w^* that
/// factor pure superharmonics as c c^*, and the superharmonic/purity tests.
///

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <pickwell/cpmap.hpp>

namespace pickwell {

/// m x m block Hermitian matrix with k x k blocks.
class BlockHermitian {
public:
    BlockHermitian() = default;

    BlockHermitian(Eigen::Index m, Eigen::Index k, ComplexMatrix data,
                   double residual_tol = ToleranceConfig{}.residual_tol)
        : m_(m), k_(k), data_(std::move(data))
    {
        if (data_.rows() != m * k || data_.cols() != m * k)
            throw error(errc::shape_mismatch, "BlockHermitian: size is not mk x mk");
        require_finite(data_, "BlockHermitian");
        if (!is_hermitian(data_, residual_tol))
            throw error(errc::not_hermitian, "BlockHermitian: data is not Hermitian",
                        hermitian_defect(data_));
        data_ = 0.5 * (data_ + data_.adjoint());
    }

    Eigen::Index m() const noexcept { return m_; }
    Eigen::Index k() const noexcept { return k_; }
    const ComplexMatrix& data() const noexcept { return data_; }
    auto block(Eigen::Index i, Eigen::Index j) const { return data_.block(i * k_, j * k_, k_, k_); }

private:
    Eigen::Index m_ = 0;
    Eigen::Index k_ = 0;
    ComplexMatrix data_;
};

inline double stein_residual(const CPMap& phi, const ComplexMatrix& q, const ComplexMatrix& r)
{
    return (q - phi(q) - r).norm();
}

/// LU factorization of I - S kept for repeated solves (including the blockwise
/// solves of promoted maps, which reuse the same factorization).
class SteinSolver {
public:
    explicit SteinSolver(const CPMap& phi)
        : phi_(phi)
    {
        const auto s = superoperator(phi);
        const auto n2 = s.matrix.rows();
        lu_.compute(ComplexMatrix::Identity(n2, n2) - s.matrix);
        rcond_ = lu_.rcond();
        if (!(rcond_ > 1e-13)) {
            const double rho = spectral_radius(s.matrix);
            throw error(errc::stein_singular,
                        "stein_solve: 1 is (numerically) in the spectrum of Phi; spectral radius " +
                            std::to_string(rho),
                        rho);
        }
    }

    double rcond() const noexcept { return rcond_; }

    ComplexMatrix solve(const ComplexMatrix& r) const
    {
        const auto n = phi_.dim();
        if (r.rows() != n || r.cols() != n)
            throw error(errc::shape_mismatch, "stein_solve: dimension mismatch");
        ComplexMatrix q = unvec(lu_.solve(vec(r)), n);
        return 0.5 * (q + q.adjoint());
    }

    /// Solves Q - Phi_r(Q) = R for the level-r promotion, block by block.
    ComplexMatrix solve_promoted(const ComplexMatrix& r) const
    {
        const auto n = phi_.dim();
        if (n == 0 || r.rows() % n != 0 || r.rows() != r.cols())
            throw error(errc::shape_mismatch, "stein_solve_promoted: dimension mismatch");
        const auto level = r.rows() / n;
        ComplexMatrix q(r.rows(), r.cols());
        for (Eigen::Index u = 0; u < level; ++u)
            for (Eigen::Index v = 0; v < level; ++v)
                q.block(u * n, v * n, n, n) = unvec(lu_.solve(vec(r.block(u * n, v * n, n, n))), n);
        return 0.5 * (q + q.adjoint());
    }

private:
    CPMap phi_;
    Eigen::PartialPivLU<ComplexMatrix> lu_;
    double rcond_ = 0.0;
};

/// Dense solve of (I - S) vec(Q) = vec(R).
inline BlockHermitian stein_solve(const CPMap& phi, const BlockHermitian& r)
{
    SteinSolver solver(phi);
    return BlockHermitian(r.m(), r.k(), solver.solve(r.data()));
}

/// Partial sums of sum_n Phi^n(R). Stops when the current term vanishes
/// (nilpotent maps terminate exactly) or once both the spectral tail bound
/// rho^N ||R|| / (1 - rho) and the current term are below tol.
inline BlockHermitian neumann_sum(const CPMap& phi, const BlockHermitian& r, double tol = 1e-13)
{
    const double rho = map_spectral_radius(phi);
    if (rho >= 1.0 - 1e-12)
        throw error(errc::not_convergent,
                    "neumann_sum: spectral radius " + std::to_string(rho) + " >= 1", rho);
    const double rnorm = r.data().norm();
    ComplexMatrix term = r.data();
    ComplexMatrix sum = term;
    constexpr std::size_t max_terms = 1'000'000;
    for (std::size_t n = 1; n < max_terms; ++n) {
        term = phi(term);
        sum += term;
        const double tnorm = term.norm();
        if (tnorm == 0.0)
            break;
        const double tail = std::pow(rho, static_cast<double>(n)) * rnorm / (1.0 - rho);
        if (tail <= tol && tnorm <= tol)
            break;
    }
    return BlockHermitian(r.m(), r.k(), sum);
}

/// Intertwiner c with c(e_w (x) h) = Z_w B h; its Gramian is
/// c c^* = sum_w Z_w B B^* Z_w^*. `words` is the truncation length N (sum over
/// |w| < N); std::nullopt means Exact, valid only for nilpotent points.
struct GramianFactor {
    OperatorPoint point;
    ComplexMatrix seed; // k x r
    std::optional<std::size_t> words;
    /// Upper bound on the norm of the discarded tail.
    double truncation_bound = 0.0;

    bool exact() const noexcept { return !words.has_value(); }
};

/// Chooses the truncation: Exact for nilpotent points, otherwise the smallest
/// N with rho^(2N) ||BB^*|| / (1 - rho^2) <= tol where rho is the row norm.
/// Refused (GramianUnavailable) when rho >= 1 and the point is not nilpotent.
inline GramianFactor make_gramian_factor(const OperatorPoint& point, const ComplexMatrix& seed,
                                         double tol = 1e-13)
{
    if (seed.rows() != point.k())
        throw error(errc::shape_mismatch, "GramianFactor: seed must have k rows");
    GramianFactor f{point, seed, std::nullopt, 0.0};
    if (is_nilpotent(phi_from_points({point})))
        return f;
    const double rho = point.row_norm();
    if (rho >= 1.0)
        throw error(errc::gramian_unavailable,
                    "GramianFactor: row norm " + std::to_string(rho) +
                        " >= 1 at a non-nilpotent point",
                    rho);
    const double bb = (seed * seed.adjoint()).norm();
    const double rho2 = rho * rho;
    std::size_t n = 1;
    double tail = bb * rho2 / (1.0 - rho2);
    while (tail > tol && n < 100'000) {
        tail *= rho2;
        ++n;
    }
    f.words = n;
    f.truncation_bound = tail;
    return f;
}

namespace detail {

inline ComplexMatrix word_sum(const CPMap& theta, const ComplexMatrix& seed_gram, std::size_t words)
{
    ComplexMatrix term = seed_gram;
    ComplexMatrix sum = term;
    for (std::size_t n = 1; n < words; ++n) {
        term = theta(term);
        if (term.norm() == 0.0)
            break;
        sum += term;
    }
    return sum;
}

} // namespace detail

/// Gramian of a single factor: Q = sum_{|w| < N} Z_w B B^* Z_w^*.
inline BlockHermitian gramian(const GramianFactor& f)
{
    const auto theta = phi_from_points({f.point});
    if (f.exact() && !is_nilpotent(theta))
        throw error(errc::not_nilpotent, "gramian: Exact truncation requires a nilpotent point");
    const std::size_t words = f.exact() ? static_cast<std::size_t>(f.point.k()) : *f.words;
    return BlockHermitian(1, f.point.k(),
                          detail::word_sum(theta, f.seed * f.seed.adjoint(), words));
}

/// Cross Gramian (c_i c_j^*) of factors sharing one multiplicity space: with
/// the stacked seed B = [B_1; ...; B_m] this is the word sum for the
/// block-diagonal tuple diag(points).
inline BlockHermitian cross_gramian(const std::vector<GramianFactor>& factors)
{
    if (factors.empty())
        throw error(errc::shape_mismatch, "cross_gramian: no factors");
    const auto k = factors.front().point.k();
    const auto r = factors.front().seed.cols();
    std::vector<OperatorPoint> tuple;
    std::size_t words = 0;
    for (const auto& f : factors) {
        if (f.point.k() != k || f.seed.cols() != r || f.point.d() != factors.front().point.d())
            throw error(errc::shape_mismatch, "cross_gramian: factors differ in shape");
        tuple.push_back(f.point);
        words = std::max(words, f.exact() ? static_cast<std::size_t>(k) : *f.words);
    }
    const auto m = static_cast<Eigen::Index>(factors.size());
    ComplexMatrix stacked(m * k, r);
    for (Eigen::Index i = 0; i < m; ++i)
        stacked.middleRows(i * k, k) = factors[static_cast<std::size_t>(i)].seed;
    const auto theta = phi_from_points(tuple);
    return BlockHermitian(m, k, detail::word_sum(theta, stacked * stacked.adjoint(), words));
}

struct SuperharmonicVerdict {
    bool superharmonic = false;
    PsdVerdict positive;  // Q >= 0
    PsdVerdict dominated; // Q - Phi(Q) >= 0

    explicit operator bool() const noexcept { return superharmonic; }
};

inline SuperharmonicVerdict is_superharmonic(const CPMap& phi, const ComplexMatrix& q,
                                             const ToleranceConfig& tol = {})
{
    SuperharmonicVerdict v;
    v.positive = psd_verdict(q, tol);
    v.dominated = psd_verdict(q - phi(q), tol);
    v.superharmonic = v.positive.psd && v.dominated.psd;
    return v;
}

inline SuperharmonicVerdict is_superharmonic(const CPMap& phi, const BlockHermitian& q,
                                             const ToleranceConfig& tol = {})
{
    return is_superharmonic(phi, q.data(), tol);
}

enum class Purity { pure, undecided };

struct PurityVerdict {
    Purity status = Purity::undecided;
    /// Spectral radius of the superoperator when it certified purity.
    std::optional<double> radius_certificate;
    std::size_t iterations = 0;
    double last_norm = 0.0;

    bool pure() const noexcept { return status == Purity::pure; }
};

/// Pure with the spectral radius as certificate whenever r(Phi) < 1; otherwise
/// iterates Phi^n(Q) at most 64*mk times and reports Undecided if the iterates
/// have not fallen below tol.psd_tol * max(1, ||Q||).
inline PurityVerdict is_pure_superharmonic(const CPMap& phi, const ComplexMatrix& q,
                                           const ToleranceConfig& tol = {})
{
    PurityVerdict v;
    const double rho = map_spectral_radius(phi);
    if (rho < 1.0) {
        v.status = Purity::pure;
        v.radius_certificate = rho;
        return v;
    }
    const double threshold = tol.psd_tol * std::max(1.0, operator_norm(q));
    const auto cap = static_cast<std::size_t>(64 * phi.dim());
    ComplexMatrix x = q;
    v.last_norm = operator_norm(x);
    for (std::size_t n = 1; n <= cap; ++n) {
        x = phi(x);
        v.iterations = n;
        v.last_norm = operator_norm(x);
        if (v.last_norm <= threshold) {
            v.status = Purity::pure;
            return v;
        }
    }
    return v;
}

inline PurityVerdict is_pure_superharmonic(const CPMap& phi, const BlockHermitian& q,
                                           const ToleranceConfig& tol = {})
{
    return is_pure_superharmonic(phi, q.data(), tol);
}

} // namespace pickwell

#endif // PICKWELL_SUPERHARMONIC_HPP
