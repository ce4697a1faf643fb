#ifndef PICKWELL_LYAPUNOV_HPP
#define PICKWELL_LYAPUNOV_HPP

///
/// \file lyapunov.hpp
///
/// Deciding whether Phi_W completely dominates Phi_z in the sense of Lyapunov.
///
/// Exact route. When the superoperator of Phi_z has spectral radius < 1 the
/// Pick operator P = (I - Phi_W) o (I - Phi_z)^{-1} exists, and domination is
/// equivalent to complete positivity of P, i.e. to Choi(P) >= 0. Every
/// superharmonic element is then pure (the Neumann series converges), which is
/// why nilpotent boundary points, where ||Phi_z|| = 1 but r(Phi_z) = 0, are
/// decided exactly as well. A negative Choi eigenvalue is turned into an
/// explicit witness at promotion level r = mk:
///
///     Q = (I - Phi_z)_r^{-1}(Omega),  Omega = sum_pq E_pq (x) E_pq >= 0,
///
/// which is pure superharmonic for (Phi_z)_r while Q - (Phi_W)_r(Q) = Choi(P)
/// has the negative eigenvalue.
///
/// Randomized route. For intertwiners c_j at points z_{l(j)} the cross
/// Gramians must satisfy (W_{l(i)} c_i c_j^* W_{l(j)}^*) <= (c_i c_j^*). Random
/// samples can refute domination but never certify it, so this route returns
/// Violated or Undecided only.
///

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include <pickwell/cpmap.hpp>
#include <pickwell/random.hpp>
#include <pickwell/superharmonic.hpp>

namespace pickwell {

enum class Domination { dominates, violated, undecided };

inline const char* to_string(Domination d)
{
    switch (d) {
    case Domination::dominates: return "Dominates";
    case Domination::violated: return "Violated";
    case Domination::undecided: return "Undecided";
    }
    return "Unknown";
}

struct PickOperator {
    Superoperator superop;
    std::vector<OperatorPoint> points;
    std::vector<ComplexMatrix> targets;
    /// Spectral radius of the superoperator of Phi_z.
    double radius = 0.0;
    /// ||P (I - S_z) - (I - S_W)|| / max(1, ||I - S_W||), measured at build time.
    double identity_defect = 0.0;
};

namespace detail {

inline void check_instance_shapes(const std::vector<OperatorPoint>& points,
                                  const std::vector<ComplexMatrix>& targets)
{
    if (points.empty() || points.size() != targets.size())
        throw error(errc::shape_mismatch, "need as many targets as points (at least one)");
    const auto k = points.front().k();
    const auto d = points.front().d();
    for (const auto& p : points)
        if (p.k() != k || p.d() != d)
            throw error(errc::shape_mismatch, "points differ in d or k");
    for (const auto& w : targets)
        if (w.rows() != k || w.cols() != k)
            throw error(errc::shape_mismatch, "targets must be k x k");
}

inline void check_distinct(const std::vector<OperatorPoint>& points)
{
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (points[i] == points[j])
                throw error(errc::duplicate_points,
                            "points " + std::to_string(j) + " and " + std::to_string(i) + " coincide");
}

} // namespace detail

inline PickOperator pick_operator(const std::vector<OperatorPoint>& points,
                                  const std::vector<ComplexMatrix>& targets)
{
    detail::check_instance_shapes(points, targets);
    detail::check_distinct(points);
    const auto phi_z = phi_from_points(points);
    const auto phi_w = phi_from_targets(targets);
    PickOperator out;
    out.points = points;
    out.targets = targets;
    out.radius = map_spectral_radius(phi_z);
    if (out.radius >= 1.0)
        throw error(errc::stein_singular,
                    "pick_operator: spectral radius of Phi_z is " + std::to_string(out.radius),
                    out.radius);
    const auto sz = superoperator(phi_z).matrix;
    const auto sw = superoperator(phi_w).matrix;
    const auto n2 = sz.rows();
    const ComplexMatrix lhs = ComplexMatrix::Identity(n2, n2) - sz;
    const ComplexMatrix rhs = ComplexMatrix::Identity(n2, n2) - sw;
    ComplexMatrix p;
    try {
        // P lhs = rhs  <=>  lhs^T P^T = rhs^T
        p = solve_linear(lhs.transpose(), rhs.transpose()).transpose();
    } catch (const error& e) {
        if (e.code() != errc::singular)
            throw;
        throw error(errc::stein_singular, "pick_operator: I - Phi_z is singular", out.radius);
    }
    out.identity_defect = (p * lhs - rhs).norm() / std::max(1.0, rhs.norm());
    out.superop = Superoperator{phi_z.dim(), std::move(p)};
    return out;
}

/// Pure superharmonic element for the promoted Phi_z whose image under the
/// promoted Phi_W exceeds it along `vector`.
struct DominationWitness {
    Eigen::Index level = 0;
    ComplexMatrix q;
    ComplexVector vector;
    /// <v, (Q - (Phi_W)_r(Q)) v>
    double margin = 0.0;
};

/// Concrete refutation found by sampling: labels, seeds B_j and the failing
/// eigenpair of (c_i c_j^*) - (W_{l(i)} c_i c_j^* W_{l(j)}^*).
struct SampleWitness {
    std::size_t sample = 0;
    std::vector<std::size_t> labels;
    std::vector<ComplexMatrix> seeds;
    double margin = 0.0;
    ComplexVector vector;
};

struct DominationVerdict {
    Domination status = Domination::undecided;
    std::optional<DominationWitness> witness;
    std::optional<SampleWitness> sample_witness;
    /// Minimum Choi eigenvalue of the Pick operator (exact route only).
    std::optional<double> choi_min_eigenvalue;
    std::optional<double> choi_max_eigenvalue;
    /// Spectral radius of Phi_z used to justify the exact route.
    std::optional<double> spectral_radius;
    std::optional<double> identity_defect;
    /// Randomized route: samples evaluated and the smallest margin observed.
    std::size_t samples = 0;
    std::optional<double> min_sample_margin;
    std::string note;
};

inline DominationVerdict domination_exact(const std::vector<OperatorPoint>& points,
                                          const std::vector<ComplexMatrix>& targets,
                                          const ToleranceConfig& tol = {})
{
    const auto pick = pick_operator(points, targets);
    const auto cp = is_completely_positive(pick.superop, tol);
    DominationVerdict out;
    out.spectral_radius = pick.radius;
    out.identity_defect = pick.identity_defect;
    out.choi_min_eigenvalue = cp.min_eigenvalue;
    out.choi_max_eigenvalue = cp.max_eigenvalue;
    if (cp.completely_positive) {
        out.status = Domination::dominates;
        return out;
    }
    out.status = Domination::violated;

    const auto phi_z = phi_from_points(points);
    const auto phi_w = phi_from_targets(targets);
    const auto n = phi_z.dim();
    ComplexVector unit = ComplexVector::Zero(n * n);
    for (Eigen::Index p = 0; p < n; ++p)
        unit(p * n + p) = 1.0;
    const ComplexMatrix omega = unit * unit.adjoint();

    DominationWitness w;
    w.level = n;
    w.q = SteinSolver(phi_z).solve_promoted(omega);
    w.vector = cp.eigenvector;
    const ComplexMatrix gap = w.q - apply_promoted(phi_w, w.q);
    w.margin = w.vector.dot(gap * w.vector).real();
    out.witness = std::move(w);
    return out;
}

struct WitnessCheck {
    bool confirmed = false;
    bool q_superharmonic = false;
    bool q_pure = false;
    double margin = 0.0;
    double min_eigenvalue = 0.0;
};

/// Recomputes everything from the Kraus data of Phi_z and Phi_W: Q must be
/// pure superharmonic for (Phi_z)_r and Q - (Phi_W)_r(Q) must have an
/// eigenvalue <= -psd_tol.
inline WitnessCheck verify_witness(const std::vector<OperatorPoint>& points,
                                   const std::vector<ComplexMatrix>& targets,
                                   const DominationWitness& witness,
                                   const ToleranceConfig& tol = {})
{
    const auto phi_z = phi_from_points(points);
    const auto phi_w = phi_from_targets(targets);
    WitnessCheck out;
    const auto& q = witness.q;
    const auto pos = psd_verdict(q, tol);
    const auto dom = psd_verdict(q - apply_promoted(phi_z, q), tol);
    out.q_superharmonic = pos.psd && dom.psd;
    out.q_pure = map_spectral_radius(phi_z) < 1.0;
    const ComplexMatrix gap = q - apply_promoted(phi_w, q);
    const auto v = psd_verdict(gap, tol);
    out.min_eigenvalue = v.min_eigenvalue;
    out.margin = witness.vector.dot(gap * witness.vector).real() / witness.vector.squaredNorm();
    out.confirmed = out.q_superharmonic && out.q_pure && out.min_eigenvalue <= -tol.psd_tol &&
                    out.margin <= -tol.psd_tol;
    return out;
}

struct CorollaryResult {
    PsdVerdict verdict;
    double margin = 0.0; // minimum eigenvalue of G - G_W
    ComplexMatrix gram;
};

namespace detail {

inline ComplexMatrix label_diagonal(const std::vector<ComplexMatrix>& targets,
                                    const std::vector<std::size_t>& labels)
{
    const auto k = targets.front().rows();
    const auto m = static_cast<Eigen::Index>(labels.size());
    ComplexMatrix d = ComplexMatrix::Zero(m * k, m * k);
    for (Eigen::Index i = 0; i < m; ++i)
        d.block(i * k, i * k, k, k) = targets[labels[static_cast<std::size_t>(i)]];
    return d;
}

inline CorollaryResult corollary_from_gram(const std::vector<ComplexMatrix>& targets,
                                           const std::vector<std::size_t>& labels,
                                           ComplexMatrix gram, const ToleranceConfig& tol)
{
    const auto wd = label_diagonal(targets, labels);
    CorollaryResult out;
    out.verdict = psd_verdict(gram - wd * gram * wd.adjoint(), tol);
    out.margin = out.verdict.min_eigenvalue;
    out.gram = std::move(gram);
    return out;
}

} // namespace detail

/// PSD test of (c_i c_j^*) - (W_{l(i)} c_i c_j^* W_{l(j)}^*); factor j must be
/// built at point l(j).
inline CorollaryResult corollary_inequality(const std::vector<OperatorPoint>& points,
                                            const std::vector<ComplexMatrix>& targets,
                                            const std::vector<std::size_t>& labels,
                                            const std::vector<GramianFactor>& factors,
                                            const ToleranceConfig& tol = {})
{
    detail::check_instance_shapes(points, targets);
    if (labels.size() != factors.size() || labels.empty())
        throw error(errc::shape_mismatch, "corollary_inequality: one label per factor required");
    for (std::size_t j = 0; j < labels.size(); ++j) {
        if (labels[j] >= points.size())
            throw error(errc::shape_mismatch, "corollary_inequality: label out of range");
        if (!(factors[j].point == points[labels[j]]))
            throw error(errc::shape_mismatch,
                        "corollary_inequality: factor " + std::to_string(j) +
                            " is not built at its labelled point");
    }
    return detail::corollary_from_gram(targets, labels, cross_gramian(factors).data(), tol);
}

/// Cross Gramian for labels and seeds: word sums when every labelled point
/// admits a GramianFactor, otherwise the Stein solve of the tuple map when its
/// spectral radius is < 1. Throws GramianUnavailable if neither applies.
inline ComplexMatrix sample_gram(const std::vector<OperatorPoint>& points,
                                 const std::vector<std::size_t>& labels,
                                 const std::vector<ComplexMatrix>& seeds)
{
    try {
        std::vector<GramianFactor> factors;
        factors.reserve(labels.size());
        for (std::size_t j = 0; j < labels.size(); ++j)
            factors.push_back(make_gramian_factor(points[labels[j]], seeds[j]));
        return cross_gramian(factors).data();
    } catch (const error& e) {
        if (e.code() != errc::gramian_unavailable)
            throw;
    }
    std::vector<OperatorPoint> tuple;
    for (auto l : labels)
        tuple.push_back(points[l]);
    const auto theta = phi_from_points(tuple);
    const double rho = map_spectral_radius(theta);
    if (rho >= 1.0)
        throw error(errc::gramian_unavailable,
                    "no Gramian: labelled point with row norm >= 1, not nilpotent, radius " +
                        std::to_string(rho),
                    rho);
    const auto k = points.front().k();
    const auto m = static_cast<Eigen::Index>(labels.size());
    ComplexMatrix stacked(m * k, seeds.front().cols());
    for (Eigen::Index i = 0; i < m; ++i)
        stacked.middleRows(i * k, k) = seeds[static_cast<std::size_t>(i)];
    return SteinSolver(theta).solve(stacked * stacked.adjoint());
}

struct RandomizedOptions {
    std::size_t samples = 100;
    std::uint64_t seed = 0;
    std::size_t max_level = 4;
    unsigned jobs = 1;
};

/// Labels, seeds and result of one random sample; sample i draws from
/// Rng(substream(seed, i)) so samples are independent of scheduling.
struct SampleOutcome {
    std::vector<std::size_t> labels;
    std::vector<ComplexMatrix> seeds;
    CorollaryResult result;
};

inline SampleOutcome draw_sample(const std::vector<OperatorPoint>& points,
                                 const std::vector<ComplexMatrix>& targets, std::uint64_t seed,
                                 std::size_t index, std::size_t max_level,
                                 const ToleranceConfig& tol)
{
    Rng rng(substream(seed, index));
    const auto k = points.front().k();
    SampleOutcome s;
    const auto level = static_cast<std::size_t>(rng.between(1, static_cast<long>(max_level)));
    const auto cols = static_cast<Eigen::Index>(rng.between(1, static_cast<long>(k)));
    for (std::size_t j = 0; j < level; ++j) {
        s.labels.push_back(static_cast<std::size_t>(rng.below(points.size())));
        s.seeds.push_back(rng.complex_matrix(k, cols));
    }
    s.result = detail::corollary_from_gram(targets, s.labels, sample_gram(points, s.labels, s.seeds),
                                           tol);
    return s;
}

inline DominationVerdict domination_randomized(const std::vector<OperatorPoint>& points,
                                               const std::vector<ComplexMatrix>& targets,
                                               const RandomizedOptions& opts,
                                               const ToleranceConfig& tol = {})
{
    detail::check_instance_shapes(points, targets);
    detail::check_distinct(points);
    DominationVerdict out;
    out.status = Domination::undecided;
    out.samples = opts.samples;
    if (opts.samples == 0) {
        out.note = "no samples drawn";
        return out;
    }

    std::vector<std::optional<SampleOutcome>> results(opts.samples);
    const unsigned jobs = std::max(1u, opts.jobs);
    auto run = [&](unsigned worker) {
        for (std::size_t i = worker; i < opts.samples; i += jobs)
            results[i] = draw_sample(points, targets, opts.seed, i, opts.max_level, tol);
    };
    if (jobs == 1) {
        run(0);
    } else {
        std::vector<std::future<void>> workers;
        for (unsigned w = 0; w < jobs; ++w)
            workers.push_back(std::async(std::launch::async, run, w));
        for (auto& f : workers)
            f.get();
    }

    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& s = *results[i];
        if (!out.min_sample_margin || s.result.margin < *out.min_sample_margin)
            out.min_sample_margin = s.result.margin;
        if (!s.result.verdict.psd && !out.sample_witness) {
            out.status = Domination::violated;
            out.sample_witness =
                SampleWitness{i, s.labels, s.seeds, s.result.margin, s.result.verdict.witness};
        }
    }
    if (out.status == Domination::undecided)
        out.note = "no violation in " + std::to_string(opts.samples) +
                   " samples; sampling cannot certify domination";
    return out;
}

} // namespace pickwell

#endif // PICKWELL_LYAPUNOV_HPP
