#ifndef PICKWELL_INSTANCEKIT_HPP
#define PICKWELL_INSTANCEKIT_HPP

///
/// \file instancekit.hpp
///
/// Problem instances and their seeded generators. Every generator is a pure
/// function of (seed, parameters).
///

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <pickwell/cpmap.hpp>
#include <pickwell/lyapunov.hpp>
#include <pickwell/pickclassic.hpp>
#include <pickwell/random.hpp>

namespace pickwell {

struct ProblemInstance {
    std::size_t d = 1;
    Eigen::Index k = 1;
    std::vector<OperatorPoint> points;
    std::vector<ComplexMatrix> targets;
    ToleranceConfig tolerances;
    std::uint64_t seed = 0;
    std::string note;

    std::size_t n() const noexcept { return points.size(); }

    /// Throws ShapeMismatch / DuplicatePoints.
    void validate() const
    {
        if (points.empty())
            throw error(errc::shape_mismatch, "instance has no points");
        if (targets.size() != points.size())
            throw error(errc::shape_mismatch, "instance: target count differs from point count");
        for (const auto& p : points)
            if (p.d() != d || p.k() != k)
                throw error(errc::shape_mismatch, "instance: point shape differs from (d, k)");
        for (const auto& w : targets)
            if (w.rows() != k || w.cols() != k)
                throw error(errc::shape_mismatch, "instance: target is not k x k");
        if (!tolerances.valid())
            throw error(errc::shape_mismatch, "instance: negative tolerance");
        detail::check_distinct(points);
    }
};

/// Random k x k matrix scaled to operator norm exactly `radius`.
inline ComplexMatrix gen_strict_contraction(Rng& rng, Eigen::Index k, double radius)
{
    if (!(radius < 1.0) || radius < 0.0)
        throw error(errc::shape_mismatch, "gen_strict_contraction: radius must lie in [0, 1)");
    ComplexMatrix a = rng.complex_matrix(k, k);
    const double nrm = operator_norm(a);
    return nrm > 0.0 ? ComplexMatrix(a * (radius / nrm)) : a;
}

inline ComplexMatrix gen_strict_contraction(std::uint64_t seed, Eigen::Index k, double radius)
{
    Rng rng(seed);
    return gen_strict_contraction(rng, k, radius);
}

/// d-tuple of strictly upper-triangular k x k matrices, rescaled to row norm 1
/// (for k = 1 the only such point is 0).
inline OperatorPoint gen_nilpotent_point(Rng& rng, Eigen::Index k, std::size_t d)
{
    std::vector<ComplexMatrix> blocks;
    for (std::size_t t = 0; t < d; ++t) {
        ComplexMatrix z = ComplexMatrix::Zero(k, k);
        for (Eigen::Index i = 0; i < k; ++i)
            for (Eigen::Index j = i + 1; j < k; ++j)
                z(i, j) = rng.complex_normal();
        blocks.push_back(std::move(z));
    }
    const double nrm = OperatorPoint(blocks).row_norm();
    if (nrm > 0.0)
        for (auto& b : blocks)
            b /= nrm;
    return OperatorPoint(std::move(blocks));
}

inline OperatorPoint gen_nilpotent_point(std::uint64_t seed, Eigen::Index k, std::size_t d)
{
    Rng rng(seed);
    return gen_nilpotent_point(rng, k, d);
}

/// Row contraction: a random d-tuple scaled to row norm `radius`.
inline OperatorPoint gen_row_contraction(Rng& rng, Eigen::Index k, std::size_t d, double radius)
{
    std::vector<ComplexMatrix> blocks;
    for (std::size_t t = 0; t < d; ++t)
        blocks.push_back(rng.complex_matrix(k, k));
    const double nrm = OperatorPoint(blocks).row_norm();
    for (auto& b : blocks)
        b *= radius / nrm;
    return OperatorPoint(std::move(blocks));
}

/// Finite Blaschke product c * prod_j (zeta - a_j) / (1 - conj(a_j) zeta) with
/// |a_j| <= 0.9 and |c| = 1, expressed through its Schur parameters at 0.
inline SchurFn gen_blaschke(Rng& rng, std::size_t degree)
{
    const complex c = std::polar(1.0, 2.0 * M_PI * rng.uniform());
    Polynomial num{c};
    Polynomial den{1.0};
    for (std::size_t j = 0; j < degree; ++j) {
        const complex a = rng.in_disc(0.9);
        num = poly_mul(num, {-a, 1.0});
        den = poly_mul(den, {1.0, -std::conj(a)});
    }
    const auto jet = taylor_jet(RationalForm(num, den), degree + 1);
    ToleranceConfig tol;
    tol.boundary_tol = 1e-6;
    auto r = caratheodory_fejer(jet, tol);
    if (!feasible(r))
        throw error(errc::not_convergent, "gen_blaschke: Schur parameters did not terminate");
    return std::get<SchurFn>(std::move(r));
}

inline SchurFn gen_blaschke(std::uint64_t seed, std::size_t degree)
{
    Rng rng(seed);
    return gen_blaschke(rng, degree);
}

enum class PointMode { interior, nilpotent, mixed };

inline const char* to_string(PointMode m)
{
    switch (m) {
    case PointMode::interior: return "interior";
    case PointMode::nilpotent: return "nilpotent";
    case PointMode::mixed: return "mixed";
    }
    return "?";
}

struct GeneratedInstance {
    ProblemInstance instance;
    SchurFn function;
};

namespace detail {

inline std::vector<OperatorPoint> gen_points(Rng& rng, std::size_t n, Eigen::Index k,
                                             std::size_t d, PointMode mode)
{
    std::vector<OperatorPoint> points;
    while (points.size() < n) {
        const bool nil = mode == PointMode::nilpotent ||
                         (mode == PointMode::mixed && points.size() % 2 == 1);
        OperatorPoint p = nil ? gen_nilpotent_point(rng, k, d)
                              : gen_row_contraction(rng, k, d, rng.uniform(0.2, 0.95));
        bool fresh = true;
        for (const auto& q : points)
            fresh = fresh && !(q == p);
        if (fresh)
            points.push_back(std::move(p));
        else if (nil) // only the zero point is nilpotent when k = 1
            points.push_back(gen_row_contraction(rng, k, d, rng.uniform(0.2, 0.95)));
    }
    return points;
}

} // namespace detail

/// Targets W_i = f(Z_i) for a random Blaschke product f of degree <= 4, so the
/// instance is feasible by construction (d = 1).
inline GeneratedInstance gen_feasible_instance(std::uint64_t seed, std::size_t n, Eigen::Index k,
                                               PointMode mode)
{
    Rng rng(seed);
    GeneratedInstance out;
    auto& inst = out.instance;
    inst.d = 1;
    inst.k = k;
    inst.seed = seed;
    inst.points = detail::gen_points(rng, n, k, 1, mode);
    out.function = gen_blaschke(rng, static_cast<std::size_t>(rng.between(0, 4)));
    for (const auto& p : inst.points)
        inst.targets.push_back(eval_operator(out.function, p[0]));
    inst.note = std::string("gen_feasible_instance mode=") + to_string(mode) +
                " n=" + std::to_string(n) + " k=" + std::to_string(k) +
                " blaschke_degree=" + std::to_string(out.function.degree());
    return out;
}

/// Random points and random targets of operator norm in [0.1, 1.5]; no
/// feasibility guarantee either way.
inline ProblemInstance gen_random_instance(std::uint64_t seed, std::size_t n, Eigen::Index k,
                                           std::size_t d, PointMode mode)
{
    Rng rng(seed);
    ProblemInstance inst;
    inst.d = d;
    inst.k = k;
    inst.seed = seed;
    inst.points = detail::gen_points(rng, n, k, d, mode);
    for (std::size_t i = 0; i < n; ++i) {
        ComplexMatrix w = rng.complex_matrix(k, k);
        w *= rng.uniform(0.1, 1.5) / std::max(1e-300, operator_norm(w));
        inst.targets.push_back(std::move(w));
    }
    inst.note = std::string("gen_random_instance mode=") + to_string(mode) + " n=" +
                std::to_string(n) + " k=" + std::to_string(k) + " d=" + std::to_string(d);
    return inst;
}

/// Feasible instance whose targets are inflated until the exact check reports a
/// violation. Requires r(Phi_z) < 1 (always true for generated points).
inline ProblemInstance gen_infeasible_instance(std::uint64_t seed, std::size_t n, Eigen::Index k,
                                               PointMode mode)
{
    for (std::uint64_t attempt = 0;; ++attempt) {
        auto g = gen_feasible_instance(substream(seed, attempt), n, k, mode);
        auto inst = std::move(g.instance);
        Rng rng(substream(seed, attempt + 1000));
        for (double factor = 1.1; factor < 4.0; factor *= 1.1) {
            ProblemInstance trial = inst;
            trial.targets.clear();
            for (const auto& w : inst.targets) {
                const complex phase = std::polar(1.0, rng.uniform(0.0, 2.0 * M_PI));
                trial.targets.push_back(w * (factor * phase));
            }
            if (domination_exact(trial.points, trial.targets).status == Domination::violated) {
                trial.seed = seed;
                trial.note = "gen_infeasible_instance mode=" + std::string(to_string(mode)) +
                             " n=" + std::to_string(n) + " k=" + std::to_string(k) +
                             " attempt=" + std::to_string(attempt);
                return trial;
            }
        }
    }
}

} // namespace pickwell

#endif // PICKWELL_INSTANCEKIT_HPP
