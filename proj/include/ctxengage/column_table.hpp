#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace ctxengage {

enum class ColumnType { Int64, Float64, Bool, String, StringSet };

const char* column_type_name(ColumnType t);
ColumnType column_type_from_name(const std::string& s);

// Int64 columns may hold absent cells (the optional engagement timestamps).
// `present` is either empty (all cells present) or row-sized.
struct Int64Data {
    std::vector<std::int64_t> values;
    std::vector<std::uint8_t> present;

    bool is_present(std::size_t i) const { return present.empty() || present[i] != 0; }
    bool operator==(const Int64Data&) const = default;
};

using Float64Data = std::vector<double>;
using BoolData = std::vector<std::uint8_t>;
using StringData = std::vector<std::string>;
// Each cell is a set: sorted ascending, no duplicates.
using StringSetData = std::vector<std::vector<std::string>>;

class Column {
public:
    Column(Int64Data d) : data_(std::move(d)) {}
    Column(Float64Data d) : data_(std::move(d)) {}
    Column(BoolData d) : data_(std::move(d)) {}
    Column(StringData d) : data_(std::move(d)) {}
    Column(StringSetData d) : data_(std::move(d)) {}

    ColumnType type() const { return static_cast<ColumnType>(data_.index()); }
    std::size_t size() const;

    const Int64Data& i64() const { return std::get<Int64Data>(data_); }
    const Float64Data& f64() const { return std::get<Float64Data>(data_); }
    const BoolData& bools() const { return std::get<BoolData>(data_); }
    const StringData& strings() const { return std::get<StringData>(data_); }
    const StringSetData& sets() const { return std::get<StringSetData>(data_); }

    bool operator==(const Column& other) const { return data_ == other.data_; }

private:
    std::variant<Int64Data, Float64Data, BoolData, StringData, StringSetData> data_;
};

using ColumnPtr = std::shared_ptr<const Column>;

// Immutable named-column dataset. Adding or dropping columns produces a new
// table sharing the untouched column storage, so stage outputs are cheap.
class ColumnTable {
public:
    ColumnTable() = default;

    std::size_t row_count() const { return rows_; }
    std::size_t column_count() const { return names_.size(); }
    const std::vector<std::string>& column_names() const { return names_; }

    bool has_column(const std::string& name) const { return index_.count(name) != 0; }
    const Column& column(const std::string& name) const;
    const Column& column(std::size_t i) const { return *cols_[i]; }
    const std::string& column_name(std::size_t i) const { return names_[i]; }

    // Throws if the name already exists or sizes disagree.
    ColumnTable with_column(const std::string& name, Column col) const;
    ColumnTable with_columns(const std::vector<std::pair<std::string, Column>>& cols) const;
    ColumnTable without_columns(const std::vector<std::string>& names) const;
    // Keeps exactly `names`, in the given order.
    ColumnTable select_columns(const std::vector<std::string>& names) const;
    ColumnTable take_rows(const std::vector<std::size_t>& row_ids) const;

    static ColumnTable concat_rows(const ColumnTable& a, const ColumnTable& b);

    // Convenience accessors; throw on missing column or type mismatch.
    std::span<const std::int64_t> i64(const std::string& name) const { return column(name).i64().values; }
    const Int64Data& i64_data(const std::string& name) const { return column(name).i64(); }
    std::span<const double> f64(const std::string& name) const { return column(name).f64(); }
    std::span<const std::uint8_t> bools(const std::string& name) const { return column(name).bools(); }
    const StringData& strings(const std::string& name) const { return column(name).strings(); }
    const StringSetData& sets(const std::string& name) const { return column(name).sets(); }

    bool operator==(const ColumnTable& other) const;

    static ColumnTable from_columns(std::vector<std::pair<std::string, Column>> cols);

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<ColumnPtr> cols_;
    std::size_t rows_ = 0;
};

}  // namespace ctxengage
