#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <future>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "relfit/csv.hpp"
#include "relfit/document.hpp"
#include "relfit/error.hpp"
#include "relfit/fit.hpp"
#include "relfit/geometry.hpp"
#include "relfit/linalg.hpp"
#include "relfit/model.hpp"

namespace relfit::cli {

enum class Command { fit, exists, faces, kernel, divergence, check_variety };
enum class OutputFormat { json, table };
enum class LogLevel { debug, info, warn };

inline std::optional<Command> parse_command(std::string_view s)
{
    if (s == "fit") return Command::fit;
    if (s == "exists") return Command::exists;
    if (s == "faces") return Command::faces;
    if (s == "kernel") return Command::kernel;
    if (s == "divergence") return Command::divergence;
    if (s == "check-variety") return Command::check_variety;
    return std::nullopt;
}

inline std::optional<Sampling> parse_sampling(std::string_view s)
{
    if (s == "poisson") return Sampling::poisson;
    if (s == "multinomial") return Sampling::multinomial;
    return std::nullopt;
}

struct JobSpec
{
    Command command = Command::fit;
    std::string matrix_path;
    std::string data_path;
    std::string reference_path;       ///< second distribution for `divergence`
    std::string kernel_path;          ///< optional basis for `check-variety`
    std::optional<Sampling> sampling;
    FitConfig config;
    OutputFormat output = OutputFormat::json;
    std::size_t max_cells = 20;       ///< cap for `faces`
    double variety_tol = 1e-8;

    void validate() const
    {
        auto need = [](const std::string& path, std::string_view flag) {
            if (path.empty())
                throw Error(ErrorCode::InvalidConfig, std::string(flag) + " is required for this command");
        };
        config.validate();
        switch (command) {
        case Command::fit:
        case Command::exists:
            need(matrix_path, "--matrix");
            need(data_path, "--data");
            if (!sampling)
                throw Error(ErrorCode::InvalidConfig, "--sampling is required for this command");
            break;
        case Command::faces:
        case Command::kernel:
            need(matrix_path, "--matrix");
            break;
        case Command::divergence:
            need(data_path, "--data");
            need(reference_path, "--reference");
            break;
        case Command::check_variety:
            need(matrix_path, "--matrix");
            need(data_path, "--data");
            break;
        }
        if (!(variety_tol > 0))
            throw Error(ErrorCode::InvalidConfig, "--variety-tol must be positive");
    }
};

using Logger = std::function<void(LogLevel, const std::string&)>;

namespace detail {

inline std::string fmt_double(double x)
{
    std::ostringstream s;
    s << std::setprecision(10) << x;
    return s.str();
}

inline std::string fmt_indices(const std::vector<std::size_t>& v)
{
    std::string s = "{";
    for (std::size_t k = 0; k < v.size(); ++k)
        s += (k ? "," : "") + std::to_string(v[k]);
    return s + "}";
}

inline std::string fmt_rationals(const RationalVector& v)
{
    std::string s = "(";
    for (std::size_t k = 0; k < v.size(); ++k) {
        s += k ? ", " : "";
        s += denominator_of(v[k]) == 1 ? numerator_of(v[k]).str() : relfit::to_string(v[k]);
    }
    return s + ")";
}

inline void table(std::ostream& out, const doc::Fit& d)
{
    std::size_t width = 5;
    for (const auto& c : d.cells)
        width = std::max(width, c.label.size());
    out << std::left << std::setw(static_cast<int>(width)) << "cell" << "  " << std::right << std::setw(10)
        << "observed" << "  " << std::setw(16) << "fitted" << "\n";
    for (const auto& c : d.cells)
        out << std::left << std::setw(static_cast<int>(width)) << c.label << "  " << std::right << std::setw(10)
            << c.observed << "  " << std::setw(16) << fmt_double(c.fitted) << "\n";
    out << "total " << fmt_double(d.total) << ", gamma " << fmt_double(d.gamma) << ", " << d.status << " ("
        << d.sampling << ")\n";
    if (d.minimal_face)
        out << "support " << fmt_indices(d.minimal_face->indices) << ", certificate "
            << fmt_rationals(d.minimal_face->certificate) << "\n";
    out << "overall effect " << (d.overall_effect ? "yes" : "no") << ", margin residual "
        << fmt_double(d.diagnostics.margin_residual) << ", bisection steps " << d.diagnostics.bisection_steps
        << "\n";
    if (d.theta) {
        out << "theta";
        for (double t : d.theta->theta)
            out << " " << fmt_double(t);
        out << (d.theta->unique ? "" : " (not unique)") << "\n";
    } else {
        out << "theta: none (support is not A-feasible)\n";
    }
}

inline void table(std::ostream& out, const doc::Exists& d)
{
    out << "MLE exists: " << (d.exists ? "yes" : "no") << "\n";
    if (d.witness)
        out << "positive witness " << fmt_rationals(*d.witness) << "\n";
    if (d.minimal_face)
        out << "minimal facial set " << fmt_indices(d.minimal_face->indices) << ", certificate "
            << fmt_rationals(d.minimal_face->certificate) << "\n";
}

inline void table(std::ostream& out, const doc::Faces& d)
{
    out << d.faces.size() << " facial sets over " << d.num_cells << " cells\n";
    for (const auto& f : d.faces)
        out << "  " << std::left << std::setw(20) << fmt_indices(f.indices) << " c = " << fmt_rationals(f.certificate)
            << "\n";
}

inline void table(std::ostream& out, const doc::Kernel& d)
{
    out << "kernel of a rank " << d.rank << " matrix on " << d.num_cells << " cells, " << d.basis.size()
        << " basis vectors\n";
    for (const auto& row : d.basis)
        out << "  " << fmt_rationals(row) << "\n";
}

inline void table(std::ostream& out, const doc::Divergence& d)
{
    out << "D(t||u) = " << fmt_double(d.divergence) << "\n";
}

inline void table(std::ostream& out, const doc::Variety& d)
{
    out << "in variety: " << (d.member ? "yes" : "no") << " (tolerance " << fmt_double(d.tolerance) << ")\n";
    for (const auto& r : d.dual_report)
        out << "  d = " << fmt_rationals(r.kernel_vector) << "  d+ " << fmt_double(r.positive_monomial) << "  d- "
            << fmt_double(r.negative_monomial) << "  diff " << fmt_double(r.difference) << "\n";
}

template <typename Document>
void write(std::ostream& out, const Document& d, OutputFormat format)
{
    if (format == OutputFormat::json)
        out << emit_json(d);
    else
        table(out, d);
}

} // namespace detail

/**
 * Runs one job, writing the result document to `out` and any failure to
 * `err` as a JSON error document. Returns the process exit code: 0 on
 * success, 2 on invalid input, 3 when a fit fails to converge.
 */
inline int run(const JobSpec& job, std::ostream& out, std::ostream& err, const Logger& log = {})
{
    auto note = [&](LogLevel level, const std::string& msg) {
        if (log)
            log(level, msg);
    };
    try {
        job.validate();
        switch (job.command) {
        case Command::fit: {
            const auto model = parse_matrix_csv(job.matrix_path);
            const auto table = parse_counts_csv(job.data_path, model, *job.sampling);
            note(LogLevel::info, "fitting " + std::to_string(model.matrix.num_rows()) + " subsets over " +
                                     std::to_string(model.matrix.num_cells()) + " cells");
            const auto result = extended_mle(model.matrix, table, job.config);
            const auto& diag = result.diagnostics;
            note(LogLevel::debug, "IPF calls " + std::to_string(diag.inner_iterations.size()) +
                                      ", bisection steps " + std::to_string(diag.bisection_steps));
            if (!diag.threshold_agrees)
                note(LogLevel::warn, "numeric zero threshold disagreed with the exact support");
            detail::write(out, doc::make_fit(result, model.matrix, table, model.labels, job.config), job.output);
            break;
        }
        case Command::exists: {
            const auto model = parse_matrix_csv(job.matrix_path);
            const auto table = parse_counts_csv(job.data_path, model, *job.sampling);
            detail::write(out, doc::make_exists(mle_exists(model.matrix, table), *job.sampling), job.output);
            break;
        }
        case Command::faces: {
            const auto model = parse_matrix_csv(job.matrix_path);
            const auto faces = enumerate_facial_sets(model.matrix, job.max_cells);
            note(LogLevel::info, std::to_string(faces.size()) + " facial sets");
            detail::write(out, doc::make_faces(faces, model.matrix.num_cells()), job.output);
            break;
        }
        case Command::kernel: {
            const auto model = parse_matrix_csv(job.matrix_path);
            detail::write(out, doc::make_kernel(kernel_basis(model.matrix), model.matrix), job.output);
            break;
        }
        case Command::divergence: {
            const auto t = distribution_from_vector(parse_vector_csv(job.data_path), std::nullopt, nullptr,
                                                   job.data_path);
            const auto u = distribution_from_vector(parse_vector_csv(job.reference_path), t.size(), nullptr,
                                                   job.reference_path);
            const auto td = to_double(t);
            const auto ud = to_double(u);
            detail::write(out, doc::Divergence{.divergence = bregman_divergence(td, ud)}, job.output);
            break;
        }
        case Command::check_variety: {
            const auto model = parse_matrix_csv(job.matrix_path);
            const auto values = distribution_from_vector(parse_vector_csv(job.data_path), model.matrix.num_cells(),
                                                        &model.labels, job.data_path);
            const auto delta = Distribution::intensity(to_double(values));
            const KernelBasis basis =
                job.kernel_path.empty()
                    ? kernel_basis(model.matrix)
                    : KernelBasis::from_rows(model.matrix, parse_rational_matrix_csv_text(
                                                               csv::read_file(job.kernel_path), job.kernel_path));
            const bool member = variety_member(delta, model.matrix, job.variety_tol);
            detail::write(out, doc::make_variety(member, job.variety_tol, dual_report(delta, basis), basis),
                          job.output);
            break;
        }
        }
        return 0;
    } catch (const Error& e) {
        const auto report = doc::make_error(e);
        note(LogLevel::debug, "failed with " + report.error.code);
        err << emit_json(report);
        return report.error.exit_code;
    }
}

/** One entry of a batch manifest. */
struct BatchResult
{
    int exit_code = 0;
    std::string output;
    std::string error;
};

/**
 * Runs independent jobs concurrently and returns their outputs in input
 * order. Each job reads its own files and writes to its own buffers.
 */
inline std::vector<BatchResult> run_batch(const std::vector<JobSpec>& jobs)
{
    std::vector<std::future<BatchResult>> pending;
    pending.reserve(jobs.size());
    for (const auto& job : jobs)
        pending.push_back(std::async(std::launch::async, [&job] {
            std::ostringstream out, err;
            const int code = run(job, out, err);
            return BatchResult{code, out.str(), err.str()};
        }));
    std::vector<BatchResult> results;
    for (auto& f : pending)
        results.push_back(f.get());
    return results;
}

} // namespace relfit::cli
