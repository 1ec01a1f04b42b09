#include "ctxengage/table_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace ctxengage {

namespace fs = std::filesystem;

namespace {

fs::path data_path(const std::string& name, const fs::path& root) { return root / (name + ".data.tsv"); }
fs::path schema_path(const std::string& name, const fs::path& root) { return root / (name + ".schema.tsv"); }

void check_cell(const std::string& s) {
    if (s.find('\t') != std::string::npos || s.find('\n') != std::string::npos)
        throw std::runtime_error("cell contains tab or newline: " + s);
}

std::vector<std::string> split_tabs(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find('\t', start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::vector<std::string> split_spaces(const std::string& s) {
    std::vector<std::string> out;
    if (s.empty()) return out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(' ', start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

// Writes to a temp file then renames, so readers never observe partial files.
class AtomicFile {
public:
    explicit AtomicFile(fs::path target) : target_(std::move(target)), tmp_(target_.string() + ".tmp") {
        out_.open(tmp_, std::ios::binary | std::ios::trunc);
        if (!out_) throw std::runtime_error("cannot open " + tmp_.string());
    }
    std::ostream& stream() { return out_; }
    void commit() {
        out_.flush();
        if (!out_) throw std::runtime_error("write failed: " + tmp_.string());
        out_.close();
        fs::rename(tmp_, target_);
    }

private:
    fs::path target_;
    fs::path tmp_;
    std::ofstream out_;
};

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw std::runtime_error("cannot format double");
    return std::string(buf, p);
}

double parse_double(const std::string& s) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw std::runtime_error("bad float cell: '" + s + "'");
    return v;
}

void write_table(const ColumnTable& table, const DatasetId& id, const fs::path& root, bool overwrite) {
    write_table(table, id.render(), root, overwrite);
}

void write_table(const ColumnTable& table, const std::string& name, const fs::path& root, bool overwrite) {
    fs::create_directories(root);
    if (!overwrite && (fs::exists(schema_path(name, root)) || fs::exists(data_path(name, root))))
        throw std::runtime_error("artifact already exists: " + name);

    AtomicFile data(data_path(name, root));
    auto& out = data.stream();
    const std::size_t ncols = table.column_count();
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        for (std::size_t ci = 0; ci < ncols; ++ci) {
            if (ci) out << '\t';
            const Column& col = table.column(ci);
            switch (col.type()) {
                case ColumnType::Int64: {
                    const auto& d = col.i64();
                    if (d.is_present(r)) out << d.values[r];
                    break;
                }
                case ColumnType::Float64: out << format_double(col.f64()[r]); break;
                case ColumnType::Bool: out << (col.bools()[r] ? '1' : '0'); break;
                case ColumnType::String: {
                    check_cell(col.strings()[r]);
                    out << col.strings()[r];
                    break;
                }
                case ColumnType::StringSet: {
                    const auto& set = col.sets()[r];
                    for (std::size_t i = 0; i < set.size(); ++i) {
                        check_cell(set[i]);
                        if (i) out << ' ';
                        out << set[i];
                    }
                    break;
                }
            }
        }
        out << '\n';
    }
    data.commit();

    // Schema written last: its presence marks the artifact complete.
    AtomicFile schema(schema_path(name, root));
    schema.stream() << "#rows\t" << table.row_count() << '\n';
    for (std::size_t ci = 0; ci < ncols; ++ci)
        schema.stream() << table.column_name(ci) << '\t' << column_type_name(table.column(ci).type()) << '\n';
    schema.commit();
}

ColumnTable read_table(const DatasetId& id, const fs::path& root) { return read_table(id.render(), root); }

ColumnTable read_table(const std::string& name, const fs::path& root) {
    std::ifstream schema(schema_path(name, root));
    if (!schema) throw std::runtime_error("missing schema file for " + name);
    std::string line;
    if (!std::getline(schema, line)) throw std::runtime_error("empty schema file for " + name);
    auto head = split_tabs(line);
    if (head.size() != 2 || head[0] != "#rows") throw std::runtime_error("schema mismatch for " + name);
    std::size_t nrows = std::stoull(head[1]);

    std::vector<std::string> names;
    std::vector<ColumnType> types;
    while (std::getline(schema, line)) {
        if (line.empty()) continue;
        auto parts = split_tabs(line);
        if (parts.size() != 2) throw std::runtime_error("schema mismatch for " + name);
        names.push_back(parts[0]);
        types.push_back(column_type_from_name(parts[1]));
    }

    std::ifstream data(data_path(name, root), std::ios::binary);
    if (!data) throw std::runtime_error("missing data file for " + name);

    std::vector<Int64Data> i64s(names.size());
    std::vector<Float64Data> f64s(names.size());
    std::vector<BoolData> boolss(names.size());
    std::vector<StringData> strs(names.size());
    std::vector<StringSetData> setss(names.size());
    for (std::size_t c = 0; c < names.size(); ++c) {
        switch (types[c]) {
            case ColumnType::Int64: i64s[c].values.reserve(nrows); break;
            case ColumnType::Float64: f64s[c].reserve(nrows); break;
            case ColumnType::Bool: boolss[c].reserve(nrows); break;
            case ColumnType::String: strs[c].reserve(nrows); break;
            case ColumnType::StringSet: setss[c].reserve(nrows); break;
        }
    }

    std::size_t rows_read = 0;
    while (std::getline(data, line)) {
        auto cells = split_tabs(line);
        if (cells.size() != names.size())
            throw std::runtime_error("schema mismatch in " + name + " at data row " + std::to_string(rows_read + 1));
        for (std::size_t c = 0; c < names.size(); ++c) {
            const std::string& cell = cells[c];
            switch (types[c]) {
                case ColumnType::Int64: {
                    auto& d = i64s[c];
                    if (cell.empty()) {
                        if (d.present.empty()) d.present.assign(d.values.size(), 1);
                        d.values.push_back(0);
                        d.present.push_back(0);
                    } else {
                        std::int64_t v = 0;
                        auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
                        if (ec != std::errc() || p != cell.data() + cell.size())
                            throw std::runtime_error("bad int cell '" + cell + "' in " + name);
                        d.values.push_back(v);
                        if (!d.present.empty()) d.present.push_back(1);
                    }
                    break;
                }
                case ColumnType::Float64: f64s[c].push_back(parse_double(cell)); break;
                case ColumnType::Bool: {
                    if (cell != "0" && cell != "1") throw std::runtime_error("bad bool cell '" + cell + "' in " + name);
                    boolss[c].push_back(cell == "1" ? 1 : 0);
                    break;
                }
                case ColumnType::String: strs[c].push_back(cell); break;
                case ColumnType::StringSet: setss[c].push_back(split_spaces(cell)); break;
            }
        }
        ++rows_read;
    }
    if (rows_read != nrows)
        throw std::runtime_error("schema mismatch for " + name + ": expected " + std::to_string(nrows) +
                                 " rows, found " + std::to_string(rows_read));

    std::vector<std::pair<std::string, Column>> cols;
    cols.reserve(names.size());
    for (std::size_t c = 0; c < names.size(); ++c) {
        switch (types[c]) {
            case ColumnType::Int64: cols.emplace_back(names[c], Column(std::move(i64s[c]))); break;
            case ColumnType::Float64: cols.emplace_back(names[c], Column(std::move(f64s[c]))); break;
            case ColumnType::Bool: cols.emplace_back(names[c], Column(std::move(boolss[c]))); break;
            case ColumnType::String: cols.emplace_back(names[c], Column(std::move(strs[c]))); break;
            case ColumnType::StringSet: cols.emplace_back(names[c], Column(std::move(setss[c]))); break;
        }
    }
    return ColumnTable::from_columns(std::move(cols));
}

bool stage_exists(const DatasetId& id, const fs::path& root) { return stage_exists(id.render(), root); }

bool stage_exists(const std::string& name, const fs::path& root) {
    return fs::exists(schema_path(name, root)) && fs::exists(data_path(name, root));
}

}  // namespace ctxengage
