#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "relfit/error.hpp"

namespace relfit {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;
using RationalVector = std::vector<Rational>;

/**
 * Small dense row-major matrix. Only what the exact routines need: element
 * access, row views and stacking. Floating-point work goes through Eigen.
 */
template <typename T>
class Matrix
{
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, const T& fill = T())
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix from_rows(const std::vector<std::vector<T>>& rows)
    {
        Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != m.cols_)
                throw Error(ErrorCode::DimensionMismatch, "ragged rows in matrix literal");
            for (std::size_t c = 0; c < m.cols_; ++c)
                m(r, c) = rows[r][c];
        }
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::vector<T> row(std::size_t r) const
    {
        return std::vector<T>(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                              data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
    }

    std::vector<T> col(std::size_t c) const
    {
        std::vector<T> out(rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            out[r] = (*this)(r, c);
        return out;
    }

    void append_row(const std::vector<T>& values)
    {
        if (rows_ == 0 && cols_ == 0)
            cols_ = values.size();
        if (values.size() != cols_)
            throw Error(ErrorCode::DimensionMismatch, "appended row has wrong length");
        data_.insert(data_.end(), values.begin(), values.end());
        ++rows_;
    }

    void swap_rows(std::size_t a, std::size_t b)
    {
        if (a == b)
            return;
        for (std::size_t c = 0; c < cols_; ++c)
            std::swap((*this)(a, c), (*this)(b, c));
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using RationalMatrix = Matrix<Rational>;

inline Integer numerator_of(const Rational& q) { return boost::multiprecision::numerator(q); }
inline Integer denominator_of(const Rational& q) { return boost::multiprecision::denominator(q); }

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline std::vector<double> to_double(const RationalVector& v)
{
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& x : v)
        out.push_back(to_double(x));
    return out;
}

/** Always "num/den", denominator positive, e.g. "-1/1", "7/8". */
inline std::string to_string(const Rational& q)
{
    return numerator_of(q).str() + "/" + denominator_of(q).str();
}

/**
 * Parses "n", "n/d", or a finite decimal such as "-0.125" or "1e-3" into an
 * exact rational. Decimals are read digit-for-digit, not through binary64.
 */
namespace detail {

// GMP reads a leading 0 as an octal prefix, so strip leading zeros first.
inline Integer decimal_integer(std::string_view digits, bool negative)
{
    const auto first = digits.find_first_not_of('0');
    if (first == std::string_view::npos)
        return Integer(0);
    Integer n(std::string(digits.substr(first)));
    return negative ? Integer(-n) : n;
}

} // namespace detail

inline Rational parse_rational(std::string_view text)
{
    auto fail = [&] {
        return Error(ErrorCode::ParseError, "not a rational number: '" + std::string(text) + "'");
    };
    auto trim = [](std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
            s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
            s.remove_suffix(1);
        return s;
    };
    auto parse_int = [&](std::string_view s) {
        s = trim(s);
        std::size_t start = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
        if (s.size() == start)
            throw fail();
        for (std::size_t i = start; i < s.size(); ++i)
            if (s[i] < '0' || s[i] > '9')
                throw fail();
        return detail::decimal_integer(s.substr(start), s[0] == '-');
    };

    text = trim(text);
    if (text.empty())
        throw fail();

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Integer num = parse_int(text.substr(0, slash));
        Integer den = parse_int(text.substr(slash + 1));
        if (den == 0)
            throw fail();
        return Rational(num, den);
    }

    std::string_view mantissa = text;
    long exponent = 0;
    if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
        mantissa = text.substr(0, e);
        exponent = parse_int(text.substr(e + 1)).convert_to<long>();
    }
    std::string digits;
    bool negative = false;
    std::size_t i = 0;
    if (!mantissa.empty() && (mantissa[0] == '-' || mantissa[0] == '+')) {
        negative = mantissa[0] == '-';
        i = 1;
    }
    bool seen_point = false;
    for (; i < mantissa.size(); ++i) {
        char ch = mantissa[i];
        if (ch == '.' && !seen_point) {
            seen_point = true;
        } else if (ch >= '0' && ch <= '9') {
            digits.push_back(ch);
            if (seen_point)
                --exponent;
        } else {
            throw fail();
        }
    }
    if (digits.empty())
        throw fail();
    Rational value{detail::decimal_integer(digits, false)};
    Integer ten_power = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(exponent < 0 ? -exponent : exponent));
    if (exponent < 0)
        value /= Rational(ten_power);
    else
        value *= Rational(ten_power);
    return negative ? Rational(-value) : value;
}

/**
 * Rescales v to integer entries with content 1 and, unless keep_sign is set,
 * a positive first nonzero entry. The zero vector is returned unchanged.
 */
inline RationalVector primitive_integer_vector(const RationalVector& v, bool keep_sign = false)
{
    Integer den_lcm = 1;
    for (const auto& x : v)
        if (x != 0)
            den_lcm = boost::multiprecision::lcm(den_lcm, denominator_of(x));
    Integer content = 0;
    std::vector<Integer> ints;
    ints.reserve(v.size());
    for (const auto& x : v) {
        Integer n = numerator_of(x) * (den_lcm / denominator_of(x));
        ints.push_back(n);
        if (n != 0)
            content = content == 0 ? Integer(abs(n)) : boost::multiprecision::gcd(content, Integer(abs(n)));
    }
    if (content == 0)
        return v;
    int sign = 1;
    for (const auto& n : ints) {
        if (keep_sign)
            break;
        if (n != 0) {
            sign = n < 0 ? -1 : 1;
            break;
        }
    }
    RationalVector out;
    out.reserve(v.size());
    for (const auto& n : ints)
        out.emplace_back(Integer(n / content * sign));
    return out;
}

inline Rational dot(const RationalVector& a, const RationalVector& b)
{
    if (a.size() != b.size())
        throw Error(ErrorCode::DimensionMismatch, "dot product of vectors with different lengths");
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != 0 && b[i] != 0)
            s += a[i] * b[i];
    return s;
}

} // namespace relfit
