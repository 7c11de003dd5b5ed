#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "relfit/error.hpp"
#include "relfit/linalg.hpp"
#include "relfit/model.hpp"
#include "relfit/rational.hpp"

namespace relfit {

struct LabeledMatrix
{
    ModelMatrix matrix;
    std::vector<std::string> labels;  ///< one per cell; "1", "2", ... when the file has no header
};

/** A single vector read from a row or column CSV, before it is given a meaning. */
struct LabeledVector
{
    RationalVector values;
    std::optional<std::vector<std::string>> labels;
};

namespace csv {

struct Line
{
    std::size_t number;  ///< 1-based line in the source
    std::vector<std::string> fields;
};

inline std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

/** Splits text into lines of comma-separated fields. Blank lines and lines starting with '#' are skipped. */
inline std::vector<Line> split(std::string_view text)
{
    std::vector<Line> lines;
    std::size_t number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        ++number;
        const std::string line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        if (line.empty() || line.front() == '#')
            continue;
        Line parsed{number, {}};
        std::size_t start = 0;
        for (;;) {
            const auto comma = line.find(',', start);
            parsed.fields.push_back(trim(std::string_view(line).substr(start, comma - start)));
            if (comma == std::string::npos)
                break;
            start = comma + 1;
        }
        lines.push_back(std::move(parsed));
    }
    return lines;
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline std::string at(const std::string& source, std::size_t line, std::size_t column)
{
    return source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": ";
}

inline bool is_number(const std::string& field)
{
    try {
        parse_rational(field);
        return true;
    } catch (const Error&) {
        return false;
    }
}

inline bool all_numeric(const Line& line)
{
    for (const auto& f : line.fields)
        if (!is_number(f))
            return false;
    return true;
}

} // namespace csv

/**
 * Reads a 0-1 model matrix: one generating subset per line, one cell per
 * column, with an optional first line of cell labels. Malformed entries are
 * reported as ParseError with their line and column; the structural checks
 * of validate_model_matrix() apply afterwards.
 */
inline LabeledMatrix parse_matrix_csv_text(std::string_view text, const std::string& source = "<matrix>")
{
    auto lines = csv::split(text);
    if (lines.empty())
        throw Error(ErrorCode::ParseError, source + ": no rows");

    std::vector<std::string> labels;
    std::size_t first = 0;
    if (!csv::all_numeric(lines.front())) {
        labels = lines.front().fields;
        first = 1;
    }
    if (first == lines.size())
        throw Error(ErrorCode::ParseError, source + ": header but no rows");

    const std::size_t width = lines[first].fields.size();
    if (!labels.empty() && labels.size() != width)
        throw Error(ErrorCode::ParseError,
                    csv::at(source, lines.front().number, 1) + "header has " + std::to_string(labels.size()) +
                        " labels but rows have " + std::to_string(width) + " entries");

    Matrix<long long> raw;
    for (std::size_t r = first; r < lines.size(); ++r) {
        const auto& line = lines[r];
        if (line.fields.size() != width)
            throw Error(ErrorCode::ParseError,
                        csv::at(source, line.number, std::min(line.fields.size(), width) + 1) + "row has " +
                            std::to_string(line.fields.size()) + " entries, expected " + std::to_string(width));
        std::vector<long long> row;
        for (std::size_t c = 0; c < width; ++c) {
            const auto& f = line.fields[c];
            if (f != "0" && f != "1")
                throw Error(ErrorCode::ParseError,
                            csv::at(source, line.number, c + 1) + "entry '" + f + "' is not 0 or 1");
            row.push_back(f == "1" ? 1 : 0);
        }
        raw.append_row(row);
    }

    if (labels.empty())
        for (std::size_t c = 0; c < width; ++c)
            labels.push_back(std::to_string(c + 1));
    return {validate_model_matrix(raw), std::move(labels)};
}

inline LabeledMatrix parse_matrix_csv(const std::string& path)
{
    return parse_matrix_csv_text(csv::read_file(path), path);
}

/**
 * Reads one vector in either layout:
 *   row form     optional header line of labels, then a single line of values;
 *   column form  one value per line, or "label,value" per line, with an
 *                optional header line.
 */
inline LabeledVector parse_vector_csv_text(std::string_view text, const std::string& source = "<data>")
{
    auto lines = csv::split(text);
    if (lines.empty())
        throw Error(ErrorCode::ParseError, source + ": no values");

    auto values_of = [&](const csv::Line& line, std::size_t from, std::size_t step) {
        RationalVector out;
        for (std::size_t c = from; c < line.fields.size(); c += step) {
            try {
                out.push_back(parse_rational(line.fields[c]));
            } catch (const Error&) {
                throw Error(ErrorCode::ParseError, csv::at(source, line.number, c + 1) + "entry '" +
                                                       line.fields[c] + "' is not a number");
            }
        }
        return out;
    };

    auto is_header = [](const csv::Line& line) {
        for (const auto& f : line.fields)
            if (csv::is_number(f))
                return false;
        return true;
    };
    const bool has_header = lines.size() > 1 && is_header(lines.front());
    const std::size_t first = has_header ? 1 : 0;
    const std::size_t data_lines = lines.size() - first;
    const auto& head = lines[first].fields;
    const bool single_labeled = data_lines == 1 && head.size() == 2 && !csv::is_number(head[0]);

    LabeledVector out;
    if (data_lines == 1 && !single_labeled) {
        out.values = values_of(lines[first], 0, 1);
        if (has_header) {
            if (lines.front().fields.size() != out.values.size())
                throw Error(ErrorCode::ParseError, csv::at(source, lines.front().number, 1) +
                                                       "header and values differ in length");
            out.labels = lines.front().fields;
        }
        return out;
    }

    const std::size_t width = lines[first].fields.size();
    if (width != 1 && width != 2)
        throw Error(ErrorCode::ParseError, csv::at(source, lines[first].number, 1) +
                                               "column layout takes 'value' or 'label,value' lines");
    std::vector<std::string> labels;
    for (std::size_t r = first; r < lines.size(); ++r) {
        const auto& line = lines[r];
        if (line.fields.size() != width)
            throw Error(ErrorCode::ParseError, csv::at(source, line.number, 1) + "expected " +
                                                   std::to_string(width) + " fields per line");
        if (width == 2)
            labels.push_back(line.fields[0]);
        auto v = values_of(line, width - 1, 1);
        out.values.push_back(v.front());
    }
    if (width == 2)
        out.labels = std::move(labels);
    return out;
}

inline LabeledVector parse_vector_csv(const std::string& path)
{
    return parse_vector_csv_text(csv::read_file(path), path);
}

namespace detail {

inline void check_labels(const LabeledVector& v, const std::vector<std::string>* cell_labels,
                         const std::string& source)
{
    if (!v.labels || !cell_labels)
        return;
    for (std::size_t i = 0; i < v.labels->size(); ++i)
        if ((*v.labels)[i] != (*cell_labels)[i])
            throw Error(ErrorCode::ParseError, source + ": label '" + (*v.labels)[i] + "' at position " +
                                                   std::to_string(i + 1) + " does not match cell '" +
                                                   (*cell_labels)[i] + "'");
}

inline void check_length(std::size_t got, std::size_t cells, const std::string& source)
{
    if (got != cells)
        throw Error(ErrorCode::LengthMismatch,
                    source + ": " + std::to_string(got) + " values for " + std::to_string(cells) + " cells");
}

} // namespace detail

/**
 * Counts for a table with `num_cells` cells. Labels, when both files carry
 * them, must agree with the matrix header.
 */
inline ObservedTable counts_from_vector(const LabeledVector& v, std::size_t num_cells, Sampling sampling,
                                        const std::vector<std::string>* cell_labels = nullptr,
                                        const std::string& source = "<data>")
{
    detail::check_length(v.values.size(), num_cells, source);
    detail::check_labels(v, cell_labels, source);
    std::vector<std::uint64_t> counts;
    for (std::size_t i = 0; i < v.values.size(); ++i) {
        const auto& x = v.values[i];
        if (x < 0)
            throw Error(ErrorCode::NegativeCount, source + ": count " + std::to_string(i + 1) + " is negative");
        if (denominator_of(x) != 1)
            throw Error(ErrorCode::ParseError, source + ": count " + std::to_string(i + 1) + " is not an integer");
        counts.push_back(numerator_of(x).convert_to<std::uint64_t>());
    }
    return ObservedTable(std::move(counts), sampling);
}

inline ObservedTable parse_counts_csv(const std::string& path, const LabeledMatrix& model, Sampling sampling)
{
    return counts_from_vector(parse_vector_csv(path), model.matrix.num_cells(), sampling, &model.labels, path);
}

/** Nonnegative values, exact as written, for divergence and variety checks. */
inline RationalVector distribution_from_vector(const LabeledVector& v, std::optional<std::size_t> num_cells,
                                               const std::vector<std::string>* cell_labels = nullptr,
                                               const std::string& source = "<data>")
{
    if (num_cells)
        detail::check_length(v.values.size(), *num_cells, source);
    detail::check_labels(v, cell_labels, source);
    for (std::size_t i = 0; i < v.values.size(); ++i)
        if (v.values[i] < 0)
            throw Error(ErrorCode::NegativeCount, source + ": value " + std::to_string(i + 1) + " is negative");
    return v.values;
}

/** Kernel rows as exact rationals, one vector per line, no header. */
inline RationalMatrix parse_rational_matrix_csv_text(std::string_view text, const std::string& source = "<kernel>")
{
    RationalMatrix m;
    for (const auto& line : csv::split(text)) {
        RationalVector row;
        for (std::size_t c = 0; c < line.fields.size(); ++c) {
            try {
                row.push_back(parse_rational(line.fields[c]));
            } catch (const Error&) {
                throw Error(ErrorCode::ParseError, csv::at(source, line.number, c + 1) + "entry '" +
                                                       line.fields[c] + "' is not a number");
            }
        }
        if (m.rows() != 0 && row.size() != m.cols())
            throw Error(ErrorCode::ParseError, csv::at(source, line.number, 1) + "ragged row");
        m.append_row(row);
    }
    return m;
}

} // namespace relfit
