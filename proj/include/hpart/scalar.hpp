#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace hpart {

/// Runtime error with a stage/context prefix.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string &what) : std::runtime_error(what) {}
};

enum class Kind { Integer, Decimal, Date, Text };

const char *kind_name(Kind k);
Kind kind_from_name(const std::string &name);

/// Days since 1970-01-01. Proleptic Gregorian, no timezone.
std::int32_t parse_date(const std::string &ymd);
std::string format_date(std::int32_t days);

/// A typed constant. Comparisons are only defined between scalars of the
/// same kind; text compares with binary collation.
class Scalar {
public:
    Scalar() : kind_(Kind::Integer), num_(0), dec_(0.0) {}

    static Scalar integer(std::int64_t v);
    static Scalar decimal(double v);
    static Scalar date(std::int32_t days);
    static Scalar text(std::string v);

    Kind kind() const { return kind_; }
    std::int64_t as_int() const { return num_; }
    double as_decimal() const { return dec_; }
    std::int32_t as_date() const { return static_cast<std::int32_t>(num_); }
    const std::string &as_text() const { return text_; }

    /// Value as a double for histogram interpolation; text has no numeric
    /// projection and throws.
    double numeric() const;

    /// Bytes occupied by the value in a stored tuple.
    std::size_t byte_width() const;

    bool operator==(const Scalar &o) const;
    bool operator<(const Scalar &o) const;
    bool operator<=(const Scalar &o) const { return *this == o || *this < o; }
    bool operator>(const Scalar &o) const { return !(*this <= o); }
    bool operator>=(const Scalar &o) const { return !(*this < o); }
    bool operator!=(const Scalar &o) const { return !(*this == o); }

    /// SQL-literal form; parseable back by the workload parser.
    std::string to_sql() const;
    /// Compact unquoted form used in reports and catalog arrays.
    std::string to_string() const;

private:
    Kind kind_;
    std::int64_t num_;   // Integer value or Date days
    double dec_;
    std::string text_;
};

} // namespace hpart
