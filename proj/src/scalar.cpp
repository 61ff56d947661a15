#include "hpart/scalar.hpp"

#include <cmath>
#include <cstdio>

namespace hpart {

const char *kind_name(Kind k) {
    switch (k) {
    case Kind::Integer: return "integer";
    case Kind::Decimal: return "decimal";
    case Kind::Date: return "date";
    case Kind::Text: return "text";
    }
    return "?";
}

Kind kind_from_name(const std::string &name) {
    if (name == "integer") return Kind::Integer;
    if (name == "decimal") return Kind::Decimal;
    if (name == "date") return Kind::Date;
    if (name == "text") return Kind::Text;
    throw Error("unknown type kind: " + name);
}

static bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

static const int kDaysInMonth[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};

std::int32_t parse_date(const std::string &ymd) {
    int y, m, d;
    char tail;
    if (std::sscanf(ymd.c_str(), "%d-%d-%d%c", &y, &m, &d, &tail) != 3)
        throw Error("bad date literal: " + ymd);
    if (m < 1 || m > 12) throw Error("bad date literal: " + ymd);
    int dim = kDaysInMonth[m - 1] + ((m == 2 && is_leap(y)) ? 1 : 0);
    if (d < 1 || d > dim) throw Error("bad date literal: " + ymd);
    // days from civil algorithm (Howard Hinnant)
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int>(doe) - 719468;
}

std::string format_date(std::int32_t days) {
    std::int64_t z = days + 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02u",
                  static_cast<long long>(y + (m <= 2)), m, d);
    return buf;
}

Scalar Scalar::integer(std::int64_t v) {
    Scalar s;
    s.kind_ = Kind::Integer;
    s.num_ = v;
    return s;
}

Scalar Scalar::decimal(double v) {
    Scalar s;
    s.kind_ = Kind::Decimal;
    s.dec_ = v;
    return s;
}

Scalar Scalar::date(std::int32_t days) {
    Scalar s;
    s.kind_ = Kind::Date;
    s.num_ = days;
    return s;
}

Scalar Scalar::text(std::string v) {
    Scalar s;
    s.kind_ = Kind::Text;
    s.text_ = std::move(v);
    return s;
}

double Scalar::numeric() const {
    switch (kind_) {
    case Kind::Integer: return static_cast<double>(num_);
    case Kind::Decimal: return dec_;
    case Kind::Date: return static_cast<double>(num_);
    case Kind::Text: throw Error("text scalar has no numeric projection");
    }
    return 0.0;
}

std::size_t Scalar::byte_width() const {
    switch (kind_) {
    case Kind::Integer: return 4;
    case Kind::Decimal: return 8;
    case Kind::Date: return 4;
    case Kind::Text: return text_.size();
    }
    return 0;
}

bool Scalar::operator==(const Scalar &o) const {
    if (kind_ != o.kind_) throw Error("comparing scalars of different kinds");
    switch (kind_) {
    case Kind::Integer:
    case Kind::Date: return num_ == o.num_;
    case Kind::Decimal: return dec_ == o.dec_;
    case Kind::Text: return text_ == o.text_;
    }
    return false;
}

bool Scalar::operator<(const Scalar &o) const {
    if (kind_ != o.kind_) throw Error("comparing scalars of different kinds");
    switch (kind_) {
    case Kind::Integer:
    case Kind::Date: return num_ < o.num_;
    case Kind::Decimal: return dec_ < o.dec_;
    case Kind::Text: return text_ < o.text_;
    }
    return false;
}

std::string Scalar::to_string() const {
    switch (kind_) {
    case Kind::Integer: return std::to_string(num_);
    case Kind::Decimal: {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.10g", dec_);
        return buf;
    }
    case Kind::Date: return format_date(static_cast<std::int32_t>(num_));
    case Kind::Text: return text_;
    }
    return "";
}

std::string Scalar::to_sql() const {
    switch (kind_) {
    case Kind::Integer:
    case Kind::Decimal: return to_string();
    case Kind::Date: return "'" + to_string() + "'";
    case Kind::Text: {
        std::string out = "'";
        for (char c : text_) {
            if (c == '\'')
                out += "''";
            else
                out += c;
        }
        out += "'";
        return out;
    }
    }
    return "";
}

} // namespace hpart
