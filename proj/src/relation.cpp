#include "hpart/relation.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace hpart {

std::size_t Column::size() const {
    switch (kind_) {
    case Kind::Integer:
    case Kind::Date: return ints_.size();
    case Kind::Decimal: return decs_.size();
    case Kind::Text: return texts_.size();
    }
    return 0;
}

void Column::push(const Scalar &v) {
    if (v.kind() != kind_) throw Error("column type mismatch on append");
    switch (kind_) {
    case Kind::Integer: ints_.push_back(v.as_int()); break;
    case Kind::Date: ints_.push_back(v.as_date()); break;
    case Kind::Decimal: decs_.push_back(v.as_decimal()); break;
    case Kind::Text: texts_.push_back(v.as_text()); break;
    }
}

Scalar Column::at(std::size_t row) const {
    switch (kind_) {
    case Kind::Integer: return Scalar::integer(ints_[row]);
    case Kind::Date: return Scalar::date(static_cast<std::int32_t>(ints_[row]));
    case Kind::Decimal: return Scalar::decimal(decs_[row]);
    case Kind::Text: return Scalar::text(texts_[row]);
    }
    throw Error("bad column kind");
}

std::size_t Column::byte_width_at(std::size_t row) const {
    switch (kind_) {
    case Kind::Integer:
    case Kind::Date: return 4;
    case Kind::Decimal: return 8;
    case Kind::Text: return texts_[row].size();
    }
    return 0;
}

RelationData::RelationData(RelationDef def) : def_(std::move(def)) {
    columns_.reserve(def_.attributes.size());
    for (const auto &a : def_.attributes) columns_.emplace_back(a.kind);
}

const Column &RelationData::column(const std::string &attr) const {
    int idx = def_.index_of(attr);
    if (idx < 0) throw Error("unknown attribute " + attr + " in " + def_.name);
    return columns_[static_cast<std::size_t>(idx)];
}

void RelationData::append_row(const std::vector<Scalar> &values) {
    if (values.size() != columns_.size())
        throw Error("row arity mismatch in " + def_.name);
    for (std::size_t i = 0; i < values.size(); ++i) columns_[i].push(values[i]);
    ++rows_;
}

Scalar RelationData::parse_cell(const std::string &cell, Kind kind) {
    switch (kind) {
    case Kind::Integer: {
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (ec != std::errc() || p != cell.data() + cell.size())
            throw Error("bad integer cell: " + cell);
        return Scalar::integer(v);
    }
    case Kind::Decimal: {
        std::size_t pos = 0;
        double v = std::stod(cell, &pos);
        if (pos != cell.size()) throw Error("bad decimal cell: " + cell);
        return Scalar::decimal(v);
    }
    case Kind::Date: return Scalar::date(parse_date(cell));
    case Kind::Text: return Scalar::text(cell);
    }
    throw Error("bad kind");
}

// RFC-style CSV: fields may be quoted with ", embedded quotes doubled.
static std::vector<std::string> split_csv_line(const std::string &line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else if (c == '\r') {
            // ignore
        } else {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

RelationData RelationData::load_csv(const std::string &path, const RelationDef &def) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open csv file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw Error("csv file missing header: " + path);
    auto header = split_csv_line(line);
    if (header.size() != def.attributes.size())
        throw Error("csv header arity mismatch for " + def.name);
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] != def.attributes[i].name)
            throw Error("csv header mismatch in " + path + ": expected " +
                        def.attributes[i].name + ", got " + header[i]);
    RelationData rel(def);
    std::size_t lineno = 1;
    std::vector<Scalar> row(def.attributes.size());
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != def.attributes.size())
            throw Error(path + " row " + std::to_string(lineno) + ": arity mismatch");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            try {
                row[i] = parse_cell(cells[i], def.attributes[i].kind);
            } catch (const Error &e) {
                throw Error(path + " row " + std::to_string(lineno) + ": " + e.what());
            }
        }
        rel.append_row(row);
    }
    return rel;
}

static std::string csv_quote(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void RelationData::save_csv(const std::string &path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write csv file: " + path);
    for (std::size_t i = 0; i < def_.attributes.size(); ++i)
        out << (i ? "," : "") << def_.attributes[i].name;
    out << "\n";
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < columns_.size(); ++c)
            out << (c ? "," : "") << csv_quote(columns_[c].at(r).to_string());
        out << "\n";
    }
}

} // namespace hpart
