#include "ctxengage/column_table.hpp"

#include <algorithm>

namespace ctxengage {

const char* column_type_name(ColumnType t) {
    switch (t) {
        case ColumnType::Int64: return "int64";
        case ColumnType::Float64: return "float64";
        case ColumnType::Bool: return "bool";
        case ColumnType::String: return "string";
        case ColumnType::StringSet: return "string_set";
    }
    throw std::logic_error("bad column type");
}

ColumnType column_type_from_name(const std::string& s) {
    if (s == "int64") return ColumnType::Int64;
    if (s == "float64") return ColumnType::Float64;
    if (s == "bool") return ColumnType::Bool;
    if (s == "string") return ColumnType::String;
    if (s == "string_set") return ColumnType::StringSet;
    throw std::runtime_error("unknown column type: " + s);
}

std::size_t Column::size() const {
    return std::visit(
        [](const auto& d) -> std::size_t {
            if constexpr (std::is_same_v<std::decay_t<decltype(d)>, Int64Data>) {
                return d.values.size();
            } else {
                return d.size();
            }
        },
        data_);
}

const Column& ColumnTable::column(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::runtime_error("no such column: " + name);
    return *cols_[it->second];
}

ColumnTable ColumnTable::with_column(const std::string& name, Column col) const {
    return with_columns({{name, std::move(col)}});
}

ColumnTable ColumnTable::with_columns(const std::vector<std::pair<std::string, Column>>& cols) const {
    ColumnTable out = *this;
    for (const auto& [name, col] : cols) {
        if (out.index_.count(name)) throw std::runtime_error("duplicate column: " + name);
        if (!out.names_.empty() && col.size() != out.rows_)
            throw std::runtime_error("column " + name + " has wrong length");
        if (out.names_.empty()) out.rows_ = col.size();
        out.index_[name] = out.names_.size();
        out.names_.push_back(name);
        out.cols_.push_back(std::make_shared<const Column>(col));
    }
    return out;
}

ColumnTable ColumnTable::without_columns(const std::vector<std::string>& names) const {
    std::vector<std::string> keep;
    for (const auto& n : names_) {
        if (std::find(names.begin(), names.end(), n) == names.end()) keep.push_back(n);
    }
    return select_columns(keep);
}

ColumnTable ColumnTable::select_columns(const std::vector<std::string>& names) const {
    ColumnTable out;
    out.rows_ = rows_;
    for (const auto& n : names) {
        auto it = index_.find(n);
        if (it == index_.end()) throw std::runtime_error("no such column: " + n);
        if (out.index_.count(n)) throw std::runtime_error("duplicate column: " + n);
        out.index_[n] = out.names_.size();
        out.names_.push_back(n);
        out.cols_.push_back(cols_[it->second]);
    }
    return out;
}

namespace {

Column take_column(const Column& c, const std::vector<std::size_t>& ids) {
    switch (c.type()) {
        case ColumnType::Int64: {
            Int64Data d;
            d.values.reserve(ids.size());
            const auto& src = c.i64();
            bool any_absent = false;
            for (auto i : ids) {
                d.values.push_back(src.values[i]);
                if (!src.is_present(i)) any_absent = true;
            }
            if (any_absent || !src.present.empty()) {
                d.present.reserve(ids.size());
                for (auto i : ids) d.present.push_back(src.is_present(i) ? 1 : 0);
            }
            return Column(std::move(d));
        }
        case ColumnType::Float64: {
            Float64Data d;
            d.reserve(ids.size());
            for (auto i : ids) d.push_back(c.f64()[i]);
            return Column(std::move(d));
        }
        case ColumnType::Bool: {
            BoolData d;
            d.reserve(ids.size());
            for (auto i : ids) d.push_back(c.bools()[i]);
            return Column(std::move(d));
        }
        case ColumnType::String: {
            StringData d;
            d.reserve(ids.size());
            for (auto i : ids) d.push_back(c.strings()[i]);
            return Column(std::move(d));
        }
        case ColumnType::StringSet: {
            StringSetData d;
            d.reserve(ids.size());
            for (auto i : ids) d.push_back(c.sets()[i]);
            return Column(std::move(d));
        }
    }
    throw std::logic_error("bad column type");
}

Column concat_column(const Column& a, const Column& b) {
    if (a.type() != b.type()) throw std::runtime_error("column type mismatch in concat");
    switch (a.type()) {
        case ColumnType::Int64: {
            Int64Data d = a.i64();
            const auto& bb = b.i64();
            std::size_t na = d.values.size();
            d.values.insert(d.values.end(), bb.values.begin(), bb.values.end());
            if (!d.present.empty() || !bb.present.empty()) {
                if (d.present.empty()) d.present.assign(na, 1);
                if (bb.present.empty()) {
                    d.present.insert(d.present.end(), bb.values.size(), 1);
                } else {
                    d.present.insert(d.present.end(), bb.present.begin(), bb.present.end());
                }
            }
            return Column(std::move(d));
        }
        case ColumnType::Float64: {
            Float64Data d = a.f64();
            d.insert(d.end(), b.f64().begin(), b.f64().end());
            return Column(std::move(d));
        }
        case ColumnType::Bool: {
            BoolData d = a.bools();
            d.insert(d.end(), b.bools().begin(), b.bools().end());
            return Column(std::move(d));
        }
        case ColumnType::String: {
            StringData d = a.strings();
            d.insert(d.end(), b.strings().begin(), b.strings().end());
            return Column(std::move(d));
        }
        case ColumnType::StringSet: {
            StringSetData d = a.sets();
            d.insert(d.end(), b.sets().begin(), b.sets().end());
            return Column(std::move(d));
        }
    }
    throw std::logic_error("bad column type");
}

}  // namespace

ColumnTable ColumnTable::take_rows(const std::vector<std::size_t>& row_ids) const {
    ColumnTable out;
    out.rows_ = row_ids.size();
    out.names_ = names_;
    out.index_ = index_;
    out.cols_.reserve(cols_.size());
    for (const auto& c : cols_) out.cols_.push_back(std::make_shared<const Column>(take_column(*c, row_ids)));
    return out;
}

ColumnTable ColumnTable::concat_rows(const ColumnTable& a, const ColumnTable& b) {
    if (a.column_names() != b.column_names()) throw std::runtime_error("schema mismatch in concat");
    ColumnTable out;
    out.rows_ = a.rows_ + b.rows_;
    out.names_ = a.names_;
    out.index_ = a.index_;
    out.cols_.reserve(a.cols_.size());
    for (std::size_t i = 0; i < a.cols_.size(); ++i)
        out.cols_.push_back(std::make_shared<const Column>(concat_column(*a.cols_[i], *b.cols_[i])));
    return out;
}

bool ColumnTable::operator==(const ColumnTable& other) const {
    if (rows_ != other.rows_ || names_ != other.names_) return false;
    for (std::size_t i = 0; i < cols_.size(); ++i) {
        const auto& a = *cols_[i];
        const auto& b = *other.cols_[i];
        if (a.type() != b.type()) return false;
        // Normalize Int64 presence masks before comparing.
        if (a.type() == ColumnType::Int64) {
            const auto& da = a.i64();
            const auto& db = b.i64();
            if (da.values.size() != db.values.size()) return false;
            for (std::size_t r = 0; r < da.values.size(); ++r) {
                if (da.is_present(r) != db.is_present(r)) return false;
                if (da.is_present(r) && da.values[r] != db.values[r]) return false;
            }
        } else if (!(a == b)) {
            return false;
        }
    }
    return true;
}

ColumnTable ColumnTable::from_columns(std::vector<std::pair<std::string, Column>> cols) {
    ColumnTable out;
    for (auto& [name, col] : cols) {
        if (out.index_.count(name)) throw std::runtime_error("duplicate column: " + name);
        if (!out.names_.empty() && col.size() != out.rows_)
            throw std::runtime_error("column " + name + " has wrong length");
        if (out.names_.empty()) out.rows_ = col.size();
        out.index_[name] = out.names_.size();
        out.names_.push_back(name);
        out.cols_.push_back(std::make_shared<const Column>(std::move(col)));
    }
    return out;
}

}  // namespace ctxengage
