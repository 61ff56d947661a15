#pragma once

#include "hpart/schema.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace hpart {

/// One typed column. Storage is chosen by kind; rows are addressed by the
/// enclosing relation's row ids.
class Column {
public:
    explicit Column(Kind kind) : kind_(kind) {}

    Kind kind() const { return kind_; }
    std::size_t size() const;

    void push(const Scalar &v);
    Scalar at(std::size_t row) const;
    std::size_t byte_width_at(std::size_t row) const;

private:
    Kind kind_;
    std::vector<std::int64_t> ints_;  // Integer and Date (days)
    std::vector<double> decs_;
    std::vector<std::string> texts_;
};

/// Columnar relation instance with stable row ids 0..n-1.
class RelationData {
public:
    RelationData() = default;
    explicit RelationData(RelationDef def);

    const RelationDef &def() const { return def_; }
    std::size_t row_count() const { return rows_; }
    std::size_t column_count() const { return columns_.size(); }

    const Column &column(std::size_t idx) const { return columns_[idx]; }
    const Column &column(const std::string &attr) const;
    int column_index(const std::string &attr) const { return def_.index_of(attr); }

    void append_row(const std::vector<Scalar> &values);
    Scalar value(std::size_t row, std::size_t col) const { return columns_[col].at(row); }

    /// Parse one CSV cell into the column's kind.
    static Scalar parse_cell(const std::string &cell, Kind kind);

    static RelationData load_csv(const std::string &path, const RelationDef &def);
    void save_csv(const std::string &path) const;

private:
    RelationDef def_;
    std::vector<Column> columns_;
    std::size_t rows_ = 0;
};

/// All loaded relations, by name.
using Dataset = std::map<std::string, RelationData>;

} // namespace hpart
