#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relfit/error.hpp"
#include "relfit/fit.hpp"
#include "relfit/geometry.hpp"
#include "relfit/linalg.hpp"
#include "relfit/model.hpp"
#include "relfit/rational.hpp"

// Rationals travel as "num/den" strings and absent values as null.
namespace nlohmann {

template <>
struct adl_serializer<relfit::Rational>
{
    static void to_json(json& j, const relfit::Rational& q) { j = relfit::to_string(q); }
    static void from_json(const json& j, relfit::Rational& q) { q = relfit::parse_rational(j.get<std::string>()); }
};

template <typename T>
struct adl_serializer<std::optional<T>>
{
    static void to_json(json& j, const std::optional<T>& v)
    {
        if (v)
            j = *v;
        else
            j = nullptr;
    }
    static void from_json(const json& j, std::optional<T>& v)
    {
        if (j.is_null())
            v.reset();
        else
            v = j.get<T>();
    }
};

} // namespace nlohmann

namespace relfit {

/// Version tag carried by every document. Bump on any incompatible change.
inline constexpr std::string_view schema_version = "relfit/1";

namespace doc {

using nlohmann::json;

struct Face
{
    std::vector<std::size_t> indices;  // 1-based
    RationalVector certificate;
    friend bool operator==(const Face&, const Face&) = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Face, indices, certificate)

inline std::vector<std::size_t> one_based(const std::vector<std::size_t>& v)
{
    std::vector<std::size_t> out(v);
    for (auto& i : out)
        ++i;
    return out;
}

inline Face face_of(const FacialSet& f) { return {one_based(f.indices), f.certificate}; }

struct Cell
{
    std::string label;
    double fitted = 0;
    std::uint64_t observed = 0;
    friend bool operator==(const Cell&, const Cell&) = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Cell, label, fitted, observed)

struct Theta
{
    std::vector<double> theta;
    std::vector<std::optional<double>> beta;  // null where theta is zero
    std::vector<bool> zero_by_convention;
    bool unique = true;
    friend bool operator==(const Theta&, const Theta&) = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Theta, theta, beta, zero_by_convention, unique)

struct Diagnostics
{
    std::vector<std::size_t> inner_iterations;
    std::size_t bisection_steps = 0;
    double margin_residual = 0;
    std::optional<double> divergence;
    std::vector<std::size_t> removed_cells;  // 1-based
    std::vector<std::size_t> removed_rows;   // 1-based
    bool threshold_agrees = true;
    friend bool operator==(const Diagnostics&, const Diagnostics&) = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Diagnostics, inner_iterations, bisection_steps, margin_residual, divergence,
                                   removed_cells, removed_rows, threshold_agrees)

struct Config
{
    double margin_tol = 0;
    double bisection_tol = 0;
    std::size_t max_inner_iters = 0;
    std::size_t max_bisection_steps = 0;
    friend bool operator==(const Config&, const Config&) = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Config, margin_tol, bisection_tol, max_inner_iters, max_bisection_steps)

struct Fit
{
    std::string schema{schema_version};
    std::string command = "fit";
    std::string sampling;
    std::vector<Cell> cells;
    double total = 0;
    double gamma = 1;
    std::string status;
    std::vector<std::size_t> support;  // 1-based
    std::optional<Face> minimal_face;
    std::optional<Theta> theta;
    bool overall_effect = false;
    Config config;
    Diagnostics diagnostics;
    friend bool operator==(const Fit&, const Fit&) = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Fit, schema, command, sampling, cells, total, gamma, status, support,
                                   minimal_face, theta, overall_effect, config, diagnostics)

struct Exists
{
    std::string schema{schema_version};
    std::string command = "exists";
    std::string sampling;
    bool exists = false;
    std::optional<RationalVector> witness;
    std::optional<Face> minimal_face;
    friend bool operator==(const Exists&, const Exists&) = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Exists, schema, command, sampling, exists, witness, minimal_face)

struct Faces
{
    std::string schema{schema_version};
    std::string command = "faces";
    std::size_t num_cells = 0;
    std::vector<Face> faces;
    friend bool operator==(const Faces&, const Faces&) = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Faces, schema, command, num_cells, faces)

struct Kernel
{
    std::string schema{schema_version};
    std::string command = "kernel";
    std::size_t num_cells = 0;
    std::size_t rank = 0;
    std::vector<RationalVector> basis;
    friend bool operator==(const Kernel&, const Kernel&) = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Kernel, schema, command, num_cells, rank, basis)

struct Divergence
{
    std::string schema{schema_version};
    std::string command = "divergence";
    double divergence = 0;
    friend bool operator==(const Divergence&, const Divergence&) = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Divergence, schema, command, divergence)

struct DualRow
{
    RationalVector kernel_vector;
    double positive_monomial = 0;
    double negative_monomial = 0;
    std::optional<double> odds_ratio;
    double difference = 0;
    friend bool operator==(const DualRow&, const DualRow&) = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(DualRow, kernel_vector, positive_monomial, negative_monomial, odds_ratio,
                                   difference)

struct Variety
{
    std::string schema{schema_version};
    std::string command = "check-variety";
    bool member = false;
    double tolerance = 0;
    bool all_differences_zero = false;
    std::vector<DualRow> dual_report;
    friend bool operator==(const Variety&, const Variety&) = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Variety, schema, command, member, tolerance, all_differences_zero, dual_report)

struct ErrorBody
{
    std::string code;
    std::string message;
    int exit_code = 2;
    std::optional<double> residual;
    friend bool operator==(const ErrorBody&, const ErrorBody&) = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ErrorBody, code, message, exit_code, residual)

struct ErrorReport
{
    std::string schema{schema_version};
    ErrorBody error;
    friend bool operator==(const ErrorReport&, const ErrorReport&) = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ErrorReport, schema, error)

// ---------------------------------------------------------------------------

inline std::string_view to_string(Sampling s) { return s == Sampling::poisson ? "poisson" : "multinomial"; }

inline Fit make_fit(const FitResult& r, const ModelMatrix& a, const ObservedTable& table,
                    const std::vector<std::string>& labels, const FitConfig& cfg)
{
    Fit d;
    d.sampling = std::string(to_string(table.sampling()));
    for (std::size_t i = 0; i < r.delta.size(); ++i) {
        d.cells.push_back({labels.at(i), r.delta[i], table.counts()[i]});
        d.total += r.delta[i];
    }
    d.gamma = r.gamma;
    d.status = std::string(relfit::to_string(r.status));
    d.support = one_based(r.support);
    if (r.minimal_face)
        d.minimal_face = face_of(*r.minimal_face);
    if (r.theta) {
        Theta t{r.theta->theta, {}, r.theta->zero_by_convention, r.theta->unique};
        for (double b : r.theta->beta)
            t.beta.push_back(std::isfinite(b) ? std::optional<double>(b) : std::nullopt);
        d.theta = std::move(t);
    }
    d.overall_effect = has_overall_effect(a);
    d.config = {cfg.margin_tol, cfg.bisection_tol, cfg.max_inner_iters, cfg.max_bisection_steps};
    const auto& g = r.diagnostics;
    d.diagnostics = {g.inner_iterations, g.bisection_steps,    g.margin_residual,  g.divergence,
                     one_based(g.removed_cells), one_based(g.removed_rows), g.threshold_agrees};
    return d;
}

inline Exists make_exists(const ExistenceReport& r, Sampling sampling)
{
    Exists d;
    d.sampling = std::string(to_string(sampling));
    d.exists = r.exists;
    d.witness = r.witness;
    if (r.minimal_face)
        d.minimal_face = face_of(*r.minimal_face);
    return d;
}

inline Faces make_faces(const std::vector<FacialSet>& faces, std::size_t num_cells)
{
    Faces d;
    d.num_cells = num_cells;
    for (const auto& f : faces)
        d.faces.push_back(face_of(f));
    return d;
}

inline Kernel make_kernel(const KernelBasis& basis, const ModelMatrix& a)
{
    Kernel d;
    d.num_cells = a.num_cells();
    d.rank = a.num_rows();
    for (std::size_t k = 0; k < basis.size(); ++k)
        d.basis.push_back(basis.row(k));
    return d;
}

inline Variety make_variety(bool member, double tol, const DualReport& report, const KernelBasis& basis)
{
    Variety d;
    d.member = member;
    d.tolerance = tol;
    d.all_differences_zero = report.all_differences_zero(tol);
    for (std::size_t k = 0; k < report.rows.size(); ++k) {
        const auto& row = report.rows[k];
        std::optional<double> ratio;
        if (row.odds_ratio && std::isfinite(*row.odds_ratio))
            ratio = row.odds_ratio;
        d.dual_report.push_back(
            {basis.row(k), row.positive_monomial, row.negative_monomial, ratio, row.difference});
    }
    return d;
}

inline int exit_code_for(const Error& e)
{
    return dynamic_cast<const ConvergenceError*>(&e) ? 3 : 2;
}

inline ErrorReport make_error(const Error& e)
{
    ErrorReport d;
    d.error.code = std::string(relfit::to_string(e.code()));
    d.error.message = e.what();
    d.error.exit_code = exit_code_for(e);
    if (const auto* c = dynamic_cast<const ConvergenceError*>(&e); c && std::isfinite(c->residual()))
        d.error.residual = c->residual();
    return d;
}

} // namespace doc

/** Compact single-line JSON with sorted keys and shortest round-trip floats, newline terminated. */
template <typename Document>
std::string emit_json(const Document& d)
{
    nlohmann::json j = d;
    return j.dump() + "\n";
}

/**
 * Inverse of emit_json(). Rejects documents whose schema tag is not the one
 * this build writes.
 */
template <typename Document>
Document parse_json(std::string_view text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("schema") || j["schema"] != schema_version)
        throw Error(ErrorCode::ParseError, "missing or unsupported schema tag, expected " +
                                               std::string(schema_version));
    try {
        return j.get<Document>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("malformed document: ") + e.what());
    }
}

} // namespace relfit
