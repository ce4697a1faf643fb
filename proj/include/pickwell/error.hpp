#ifndef PICKWELL_ERROR_HPP
#define PICKWELL_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace pickwell {

enum class errc {
    not_hermitian,
    non_finite,
    singular,
    shape_mismatch,
    not_hermiticity_preserving,
    stein_singular,
    not_convergent,
    not_nilpotent,
    gramian_unavailable,
    duplicate_points,
    point_on_boundary,
    pole_at_point,
    singular_denominator,
    pole_at_origin,
    parse_error,
};

inline std::string_view to_string(errc code)
{
    switch (code) {
    case errc::not_hermitian: return "NotHermitian";
    case errc::non_finite: return "NonFinite";
    case errc::singular: return "Singular";
    case errc::shape_mismatch: return "ShapeMismatch";
    case errc::not_hermiticity_preserving: return "NotHermiticityPreserving";
    case errc::stein_singular: return "SteinSingular";
    case errc::not_convergent: return "NotConvergent";
    case errc::not_nilpotent: return "NotNilpotent";
    case errc::gramian_unavailable: return "GramianUnavailable";
    case errc::duplicate_points: return "DuplicatePoints";
    case errc::point_on_boundary: return "PointOnBoundary";
    case errc::pole_at_point: return "PoleAtPoint";
    case errc::singular_denominator: return "SingularDenominator";
    case errc::pole_at_origin: return "PoleAtOrigin";
    case errc::parse_error: return "ParseError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
/// `value()` holds the numeric diagnostic attached to some codes (the spectral
/// radius for SteinSingular, the condition estimate for Singular, ...).
class error : public std::runtime_error {
public:
    error(errc code, const std::string& what, double value = 0.0)
        : std::runtime_error(std::string(to_string(code)) + ": " + what)
        , code_(code)
        , value_(value)
    {
    }

    errc code() const noexcept { return code_; }
    double value() const noexcept { return value_; }

private:
    errc code_;
    double value_;
};

} // namespace pickwell

#endif // PICKWELL_ERROR_HPP
