#ifndef PICKWELL_SERIALIZE_HPP
#define PICKWELL_SERIALIZE_HPP

///
/// \file serialize.hpp
///
/// "pickwell-1" documents (UTF-8 JSON). Complex numbers are [re, im] pairs,
/// matrices row-major nested arrays of them. Doubles are written in shortest
/// round-trip form, so parse(serialize(x)) is bit-exact and re-serialization
/// is byte-identical.
///
///   instance: {version, d, k, n, points, targets, tolerances, seed, note}
///             points[i] is a list of d matrices
///   function: {version, kind: "schur-function", mode, parameters, anchors,
///              terminal, numerator, denominator}
///   matrix:   {version, kind: "matrix", matrix}
///

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include <pickwell/instancekit.hpp>
#include <pickwell/pickclassic.hpp>

namespace pickwell {

using json = nlohmann::ordered_json;

inline constexpr const char* kFormatVersion = "pickwell-1";

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& what)
{
    throw error(errc::parse_error, what);
}

inline json to_json(complex c) { return json::array({c.real(), c.imag()}); }

inline json to_json(const ComplexMatrix& a)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            row.push_back(to_json(a(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json to_json(const std::vector<complex>& v)
{
    json out = json::array();
    for (const auto& c : v)
        out.push_back(to_json(c));
    return out;
}

inline double number(const json& j, const std::string& where)
{
    if (!j.is_number())
        parse_fail(where + ": expected a number");
    return j.get<double>();
}

inline complex complex_from(const json& j, const std::string& where)
{
    if (!j.is_array() || j.size() != 2)
        parse_fail(where + ": expected [re, im]");
    return {number(j[0], where), number(j[1], where)};
}

inline ComplexMatrix matrix_from(const json& j, const std::string& where)
{
    if (!j.is_array() || j.empty())
        parse_fail(where + ": expected a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (!j[0].is_array())
        parse_fail(where + ": rows must be arrays");
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    ComplexMatrix a(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw error(errc::shape_mismatch, where + ": ragged matrix rows");
        for (Eigen::Index c = 0; c < cols; ++c)
            a(i, c) = complex_from(row[static_cast<std::size_t>(c)],
                                   where + "[" + std::to_string(i) + "][" + std::to_string(c) + "]");
    }
    return a;
}

inline std::vector<complex> vector_from(const json& j, const std::string& where)
{
    if (!j.is_array())
        parse_fail(where + ": expected an array");
    std::vector<complex> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(complex_from(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

inline const json& field(const json& doc, const char* name)
{
    auto it = doc.find(name);
    if (it == doc.end())
        parse_fail(std::string("missing field \"") + name + "\"");
    return *it;
}

/// Parses text, converting nlohmann's byte offset into line/column.
inline json parse_text(const std::string& text)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        const auto stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw error(errc::parse_error,
                    "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
    }
}

inline void check_version(const json& doc)
{
    if (!doc.is_object())
        parse_fail("document must be an object");
    const auto& v = field(doc, "version");
    if (!v.is_string() || v.get<std::string>() != kFormatVersion)
        parse_fail(std::string("unsupported version; expected \"") + kFormatVersion + "\"");
}

inline std::uint64_t count_from(const json& j, const char* name)
{
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
        parse_fail(std::string("field \"") + name + "\" must be a non-negative integer");
    return j.get<std::uint64_t>();
}

} // namespace detail

inline json instance_to_json(const ProblemInstance& inst)
{
    json doc;
    doc["version"] = kFormatVersion;
    doc["d"] = inst.d;
    doc["k"] = inst.k;
    doc["n"] = inst.n();
    json points = json::array();
    for (const auto& p : inst.points) {
        json blocks = json::array();
        for (const auto& b : p.blocks())
            blocks.push_back(detail::to_json(b));
        points.push_back(std::move(blocks));
    }
    doc["points"] = std::move(points);
    json targets = json::array();
    for (const auto& w : inst.targets)
        targets.push_back(detail::to_json(w));
    doc["targets"] = std::move(targets);
    doc["tolerances"] = {{"psd_tol", inst.tolerances.psd_tol},
                         {"residual_tol", inst.tolerances.residual_tol},
                         {"boundary_tol", inst.tolerances.boundary_tol}};
    doc["seed"] = inst.seed;
    doc["note"] = inst.note;
    return doc;
}

inline std::string serialize(const ProblemInstance& inst)
{
    return instance_to_json(inst).dump(2) + "\n";
}

inline ProblemInstance instance_from_json(const json& doc)
{
    detail::check_version(doc);
    ProblemInstance inst;
    inst.d = detail::count_from(detail::field(doc, "d"), "d");
    inst.k = static_cast<Eigen::Index>(detail::count_from(detail::field(doc, "k"), "k"));
    const auto n = detail::count_from(detail::field(doc, "n"), "n");
    if (inst.d == 0 || inst.k == 0 || n == 0)
        detail::parse_fail("d, k and n must be positive");
    const auto& points = detail::field(doc, "points");
    const auto& targets = detail::field(doc, "targets");
    if (!points.is_array() || points.empty())
        detail::parse_fail("\"points\" must be a non-empty array");
    if (!targets.is_array() || targets.empty())
        detail::parse_fail("\"targets\" must be a non-empty array");
    if (points.size() != n || targets.size() != n)
        throw error(errc::shape_mismatch, "points/targets count differs from n");
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto where = "points[" + std::to_string(i) + "]";
        if (!points[i].is_array() || points[i].size() != inst.d)
            throw error(errc::shape_mismatch, where + ": expected d matrices");
        std::vector<ComplexMatrix> blocks;
        for (std::size_t t = 0; t < points[i].size(); ++t)
            blocks.push_back(detail::matrix_from(points[i][t], where + "[" + std::to_string(t) + "]"));
        inst.points.emplace_back(std::move(blocks));
    }
    for (std::size_t i = 0; i < targets.size(); ++i)
        inst.targets.push_back(detail::matrix_from(targets[i], "targets[" + std::to_string(i) + "]"));
    const auto& tol = detail::field(doc, "tolerances");
    if (!tol.is_object())
        detail::parse_fail("\"tolerances\" must be an object");
    inst.tolerances.psd_tol = detail::number(detail::field(tol, "psd_tol"), "psd_tol");
    inst.tolerances.residual_tol = detail::number(detail::field(tol, "residual_tol"), "residual_tol");
    inst.tolerances.boundary_tol = detail::number(detail::field(tol, "boundary_tol"), "boundary_tol");
    inst.seed = detail::count_from(detail::field(doc, "seed"), "seed");
    const auto& note = detail::field(doc, "note");
    if (!note.is_string())
        detail::parse_fail("\"note\" must be a string");
    inst.note = note.get<std::string>();
    inst.validate();
    return inst;
}

inline ProblemInstance deserialize(const std::string& text)
{
    return instance_from_json(detail::parse_text(text));
}

// --- functions and matrices --------------------------------------------------

inline json function_to_json(const SchurFn& f)
{
    json doc;
    doc["version"] = kFormatVersion;
    doc["kind"] = "schur-function";
    doc["mode"] = f.mode() == SchurMode::np ? "np" : "jet";
    doc["parameters"] = detail::to_json(f.parameters());
    doc["anchors"] = detail::to_json(f.anchors());
    doc["terminal"] = detail::to_json(f.terminal());
    doc["numerator"] = detail::to_json(f.rational().numerator());
    doc["denominator"] = detail::to_json(f.rational().denominator());
    return doc;
}

/// The cascade (parameters, anchors, terminal) is authoritative; the rational
/// form stored alongside is informational and recomputed on load.
inline SchurFn function_from_json(const json& doc)
{
    detail::check_version(doc);
    const auto& kind = detail::field(doc, "kind");
    if (!kind.is_string() || kind.get<std::string>() != "schur-function")
        detail::parse_fail("expected kind \"schur-function\"");
    const auto& mode = detail::field(doc, "mode");
    if (!mode.is_string() || (mode != "np" && mode != "jet"))
        detail::parse_fail("mode must be \"np\" or \"jet\"");
    auto params = detail::vector_from(detail::field(doc, "parameters"), "parameters");
    auto anchors = detail::vector_from(detail::field(doc, "anchors"), "anchors");
    if (params.size() != anchors.size())
        throw error(errc::shape_mismatch, "parameters and anchors differ in length");
    const auto terminal = detail::complex_from(detail::field(doc, "terminal"), "terminal");
    return SchurFn(std::move(params), std::move(anchors), terminal,
                   mode == "np" ? SchurMode::np : SchurMode::jet);
}

inline std::string serialize(const SchurFn& f) { return function_to_json(f).dump(2) + "\n"; }

inline SchurFn deserialize_function(const std::string& text)
{
    return function_from_json(detail::parse_text(text));
}

inline json matrix_to_json(const ComplexMatrix& a)
{
    json doc;
    doc["version"] = kFormatVersion;
    doc["kind"] = "matrix";
    doc["matrix"] = detail::to_json(a);
    return doc;
}

inline ComplexMatrix matrix_from_json(const json& doc)
{
    detail::check_version(doc);
    const auto& kind = detail::field(doc, "kind");
    if (!kind.is_string() || kind.get<std::string>() != "matrix")
        detail::parse_fail("expected kind \"matrix\"");
    return detail::matrix_from(detail::field(doc, "matrix"), "matrix");
}

inline ComplexMatrix deserialize_matrix(const std::string& text)
{
    return matrix_from_json(detail::parse_text(text));
}

/// FNV-1a 64 of a byte string, rendered as 16 hex digits.
inline std::string fnv1a_hex(const std::string& bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xF];
        h >>= 4;
    }
    return out;
}

/// Digest of the canonical (compact) serialization.
inline std::string digest(const ProblemInstance& inst)
{
    return fnv1a_hex(instance_to_json(inst).dump());
}

} // namespace pickwell

#endif // PICKWELL_SERIALIZE_HPP
