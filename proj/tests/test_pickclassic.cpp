#include <gtest/gtest.h>

#include <pickwell/lyapunov.hpp>
#include <pickwell/pickclassic.hpp>
#include <pickwell/random.hpp>

using namespace pickwell;

namespace {

std::vector<complex> random_nodes(Rng& rng, std::size_t n, double radius)
{
    std::vector<complex> z;
    while (z.size() < n) {
        const complex c = rng.in_disc(radius);
        bool far = true;
        for (const auto& p : z)
            far = far && std::abs(p - c) > 1e-3;
        if (far)
            z.push_back(c);
    }
    return z;
}

// Pick matrix entries evaluated by hand, without the library
double pick_min_eigenvalue(const std::vector<complex>& z, const std::vector<complex>& w)
{
    const auto n = static_cast<Eigen::Index>(z.size());
    ComplexMatrix p(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            p(i, j) = (1.0 - w[i] * std::conj(w[j])) / (1.0 - z[i] * std::conj(z[j]));
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(p);
    return es.eigenvalues()(0);
}

} // namespace

TEST(PickMatrix, Examples)
{
    const auto a = pick_matrix({0.0}, {0.0});
    EXPECT_EQ(a.matrix(0, 0), complex(1.0));
    EXPECT_TRUE(a.verdict.psd);

    const auto b = pick_matrix({0.0, 0.5}, {0.5, 0.0});
    EXPECT_NEAR(b.matrix(0, 0).real(), 0.75, 1e-15);
    EXPECT_NEAR(b.matrix(0, 1).real(), 1.0, 1e-15);
    EXPECT_NEAR(b.matrix(1, 1).real(), 4.0 / 3.0, 1e-15);
    EXPECT_NEAR(b.matrix.determinant().real(), 0.0, 1e-14);
    EXPECT_TRUE(b.verdict.psd);

    const auto c = pick_matrix({0.0, 0.5}, {0.0, 0.9});
    EXPECT_NEAR(c.matrix(1, 1).real(), 0.19 / 0.75, 1e-15);
    EXPECT_FALSE(c.verdict.psd);
    EXPECT_LT(c.min_eigenvalue, 0.0);
}

TEST(PickMatrix, RejectsBadNodes)
{
    try {
        pick_matrix({1.0}, {0.0});
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::point_on_boundary);
    }
    try {
        pick_matrix({0.2, 0.2}, {0.0, 0.1});
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::duplicate_points);
    }
}

TEST(SchurInterpolate, OnePoint)
{
    const auto r = schur_interpolate({0.0}, {0.5});
    ASSERT_TRUE(feasible(r));
    const auto& f = std::get<SchurFn>(r);
    for (complex z : {complex(0.0), complex(0.3, 0.4), complex(-0.9)})
        EXPECT_NEAR(std::abs(eval_scalar(f, z) - 0.5), 0.0, 1e-15);
}

TEST(SchurInterpolate, UniqueBlaschkeSolution)
{
    const auto r = schur_interpolate({0.0, 0.5}, {0.5, 0.0});
    ASSERT_TRUE(feasible(r));
    const auto& f = std::get<SchurFn>(r);
    for (complex z : {complex(0.1), complex(0.2, -0.7), complex(-0.6, 0.1)}) {
        const complex expect = (0.5 - z) / (1.0 - 0.5 * z);
        EXPECT_NEAR(std::abs(eval_scalar(f, z) - expect), 0.0, 1e-12);
    }
    EXPECT_EQ(f.degree(), 1u);
}

TEST(SchurInterpolate, InfeasibleAtStepTwo)
{
    const auto r = schur_interpolate({0.0, 0.5}, {0.0, 0.9});
    ASSERT_FALSE(feasible(r));
    const auto& inf = std::get<Infeasible>(r);
    EXPECT_EQ(inf.step, 2u);
    // second transformed target: 0.9 / 0.5
    EXPECT_NEAR(inf.modulus, 1.8, 1e-12);
}

TEST(SchurInterpolate, NevanlinnaPickEquivalence)
{
    Rng rng(1);
    int feasible_count = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const auto n = static_cast<std::size_t>(rng.between(1, 5));
        const auto z = random_nodes(rng, n, 0.95);
        std::vector<complex> w(n);
        for (auto& v : w)
            v = rng.in_disc(0.95);
        const double lam = pick_min_eigenvalue(z, w);
        if (std::abs(lam) < 1e-7)
            continue; // too close to call either way
        const auto r = schur_interpolate(z, w);
        EXPECT_EQ(feasible(r), lam >= 0.0) << "trial " << trial << " lambda " << lam;
        if (feasible(r)) {
            ++feasible_count;
            const auto& f = std::get<SchurFn>(r);
            EXPECT_LE(f.degree(), n - 1);
            for (std::size_t i = 0; i < n; ++i)
                EXPECT_LE(std::abs(eval_scalar(f, z[i]) - w[i]), 1e-8);
            EXPECT_LE(sampled_sup_norm(f), 1.0 + 1e-6);
        }
    }
    EXPECT_GT(feasible_count, 50);
}

TEST(CaratheodoryFejer, Examples)
{
    const auto a = caratheodory_fejer({0.5});
    ASSERT_TRUE(feasible(a));
    EXPECT_NEAR(std::abs(eval_scalar(std::get<SchurFn>(a), 0.7) - 0.5), 0.0, 1e-15);

    const auto b = caratheodory_fejer({0.0, 1.0});
    ASSERT_TRUE(feasible(b));
    EXPECT_NEAR(std::abs(eval_scalar(std::get<SchurFn>(b), complex(0.3, 0.2)) - complex(0.3, 0.2)), 0.0, 1e-15);

    const auto c = caratheodory_fejer({0.5, 0.5});
    ASSERT_TRUE(feasible(c));
    const auto& params = std::get<SchurFn>(c).parameters();
    ASSERT_EQ(params.size(), 2u);
    EXPECT_NEAR(std::abs(params[0] - 0.5), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(params[1] - 2.0 / 3.0), 0.0, 1e-15);
    const auto jet = taylor_jet(std::get<SchurFn>(c), 2);
    EXPECT_NEAR(std::abs(jet[1] - 0.5), 0.0, 1e-14);
}

TEST(CaratheodoryFejer, InfeasibleJet)
{
    const auto r = caratheodory_fejer({0.5, 0.9});
    ASSERT_FALSE(feasible(r));
    EXPECT_EQ(std::get<Infeasible>(r).step, 2u);
    EXPECT_FALSE(feasible(caratheodory_fejer({1.0, 0.1})));
}

TEST(ToeplitzFromJet, Examples)
{
    EXPECT_EQ(toeplitz_from_jet({0.3}), ComplexMatrix::Constant(1, 1, 0.3));
    ComplexMatrix j(2, 2);
    j << 0.0, 0.0, 1.0, 0.0;
    EXPECT_EQ(toeplitz_from_jet({0.0, 1.0}), j);
    ComplexMatrix t(2, 2);
    t << 0.5, 0.0, 0.5, 0.5;
    EXPECT_EQ(toeplitz_from_jet({0.5, 0.5}), t);
    EXPECT_NEAR(operator_norm(t), (1.0 + std::sqrt(5.0)) / 4.0, 1e-12);
    EXPECT_EQ(jet_from_toeplitz(t), (std::vector<complex>{0.5, 0.5}));
    EXPECT_TRUE(jet_from_toeplitz(t.transpose()).empty());
}

TEST(CaratheodoryFejer, ThreeWayEquivalence)
{
    Rng rng(2);
    for (int trial = 0; trial < 60; ++trial) {
        const auto n = static_cast<std::size_t>(rng.between(1, 5));
        std::vector<complex> jet(n);
        for (auto& c : jet)
            c = rng.in_disc(1.0) * rng.uniform(0.2, 1.1);
        const ComplexMatrix t = toeplitz_from_jet(jet);
        const double norm = operator_norm(t);
        if (std::abs(norm - 1.0) < 1e-6)
            continue;
        const auto cf = caratheodory_fejer(jet);
        EXPECT_EQ(feasible(cf), norm <= 1.0) << "trial " << trial << " norm " << norm;
        const auto s = shift_matrix(static_cast<Eigen::Index>(n));
        const auto v = domination_exact({OperatorPoint::single(s)}, {t});
        EXPECT_EQ(v.status == Domination::dominates, norm <= 1.0) << "trial " << trial;
        if (feasible(cf)) {
            const auto& f = std::get<SchurFn>(cf);
            EXPECT_LE(f.degree(), n - 1);
            EXPECT_LE((eval_operator(f, s) - t).norm(), 1e-9);
            EXPECT_LE(sampled_sup_norm(f), 1.0 + 1e-6);
        }
    }
}

TEST(SchurFnTest, CascadeMatchesNestedMoebius)
{
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto n = static_cast<std::size_t>(rng.between(1, 4));
        std::vector<complex> g(n), a(n);
        for (std::size_t i = 0; i < n; ++i) {
            g[i] = rng.in_disc(0.9);
            a[i] = rng.in_disc(0.9);
        }
        const complex term = rng.in_disc(0.9);
        const SchurFn f(g, a, term, SchurMode::np);
        const complex zeta = rng.in_disc(0.99);
        complex v = term;
        for (std::size_t i = n; i-- > 0;) {
            const complex b = (zeta - a[i]) / (1.0 - std::conj(a[i]) * zeta);
            v = (g[i] + b * v) / (1.0 + std::conj(g[i]) * b * v);
        }
        EXPECT_NEAR(std::abs(eval_scalar(f, zeta) - v), 0.0, 1e-11);
        EXPECT_GT(min_pole_modulus(f.rational()), 1.0);
    }
}
