#ifndef PICKWELL_RANDOM_HPP
#define PICKWELL_RANDOM_HPP

///
/// \file random.hpp
///
/// Reproducible random source. The engine is std::mt19937_64, whose output
/// sequence is fixed by the C++ standard; all conversions to doubles and
/// integers are done here (the <random> distributions are implementation
/// defined and therefore not used).
///
///  - uniform():  (x >> 11) * 2^-53, in [0, 1)
///  - normal():   Box-Muller on two uniforms
///  - below(n):   x mod n
///  - substream(seed, i): splitmix64 finalizer of seed + (i + 1) * 0x9E3779B97F4A7C15
///

#include <cmath>
#include <cstdint>
#include <random>

#include <pickwell/numkernel.hpp>

namespace pickwell {

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t substream(std::uint64_t seed, std::uint64_t index)
{
    return splitmix64(seed + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed)
        : engine_(seed)
    {
    }

    std::uint64_t next() { return engine_(); }

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }

    /// Integer in [lo, hi].
    long between(long lo, long hi)
    {
        return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    double normal()
    {
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    complex complex_normal() { return {normal() * M_SQRT1_2, normal() * M_SQRT1_2}; }

    /// Uniform in the disc of the given radius.
    complex in_disc(double radius)
    {
        const double r = radius * std::sqrt(uniform());
        return std::polar(r, 2.0 * M_PI * uniform());
    }

    ComplexMatrix complex_matrix(Eigen::Index rows, Eigen::Index cols)
    {
        ComplexMatrix a(rows, cols);
        for (Eigen::Index j = 0; j < cols; ++j)
            for (Eigen::Index i = 0; i < rows; ++i)
                a(i, j) = complex_normal();
        return a;
    }

    ComplexMatrix hermitian_matrix(Eigen::Index n)
    {
        const ComplexMatrix a = complex_matrix(n, n);
        return 0.5 * (a + a.adjoint());
    }

private:
    std::mt19937_64 engine_;
};

} // namespace pickwell

#endif // PICKWELL_RANDOM_HPP
