#include "upsr_cli/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

namespace upsr::cli {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (c == '"') {
            if (quoted && i + 1 < line.size() && line[i + 1] == '"') {
                cell += '"';
                ++i;
            } else {
                quoted = !quoted;
            }
        } else if (c == ',' && !quoted) {
            cells.push_back(trim(cell));
            cell.clear();
        } else {
            cell += c;
        }
    }
    if (quoted) {
        throw CsvError("unterminated quote in row: " + line);
    }
    cells.push_back(trim(cell));
    return cells;
}

std::optional<double> parse_number(std::string cell) {
    if (!cell.empty() && cell.back() == '%') {
        cell.pop_back();
    }
    cell = trim(cell);
    if (cell.empty()) {
        return std::nullopt;
    }
    try {
        std::size_t pos = 0;
        const double v = std::stod(cell, &pos);
        if (pos != cell.size()) {
            return std::nullopt;
        }
        return v;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

} // namespace

bool is_iso_date(const std::string& cell) {
    static const std::regex re(R"(^(\d{4})-(\d{2})(-(\d{2}))?([T ]\d{2}:\d{2}(:\d{2}(\.\d+)?)?(Z|[+-]\d{2}:?\d{2})?)?$)");
    std::smatch m;
    if (!std::regex_match(cell, m, re)) {
        return false;
    }
    const int month = std::stoi(m[2].str());
    if (month < 1 || month > 12) {
        return false;
    }
    if (m[4].matched) {
        const int day = std::stoi(m[4].str());
        return day >= 1 && day <= 31;
    }
    return true;
}

int iso_month(const std::string& cell) {
    if (!is_iso_date(cell)) {
        throw CsvError("not an ISO-8601 date: '" + cell + "'");
    }
    return std::stoi(cell.substr(5, 2));
}

std::size_t ReturnsTable::index_of(const std::string& key) const {
    const auto it = std::find(names.begin(), names.end(), key);
    if (it != names.end()) {
        return static_cast<std::size_t>(it - names.begin());
    }
    if (!key.empty() && std::all_of(key.begin(), key.end(), [](unsigned char c) { return std::isdigit(c); })) {
        const auto idx = std::stoul(key);
        if (idx < columns.size()) {
            return idx;
        }
    }
    std::string known;
    for (const auto& n : names) {
        known += (known.empty() ? "" : ", ") + n;
    }
    throw CsvError("no return column '" + key + "' (columns: " + known + ")");
}

ReturnsTable read_returns(std::istream& in, const CsvOptions& options) {
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty() || trim(line).front() == '#') {
            continue;
        }
        rows.push_back(split_row(line));
    }
    if (rows.empty()) {
        throw CsvError("no rows in returns file");
    }
    const std::size_t width = rows.front().size();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != width) {
            throw CsvError("row " + std::to_string(r + 1) + " has " + std::to_string(rows[r].size()) +
                           " cells, expected " + std::to_string(width));
        }
    }

    bool header = false;
    if (options.header) {
        header = *options.header;
    } else {
        header = std::any_of(rows.front().begin(), rows.front().end(),
                             [](const std::string& c) { return !parse_number(c) && !is_iso_date(c); });
    }
    std::vector<std::string> head;
    if (header) {
        head = rows.front();
        rows.erase(rows.begin());
    }
    if (rows.empty()) {
        throw CsvError("returns file has a header but no data rows");
    }

    int date_col = -1;
    if (options.date_column) {
        date_col = *options.date_column;
        if (date_col >= static_cast<int>(width)) {
            throw CsvError("date column " + std::to_string(date_col) + " is out of range");
        }
    } else {
        for (std::size_t c = 0; c < width; ++c) {
            if (std::all_of(rows.begin(), rows.end(), [&](const auto& row) { return is_iso_date(row[c]); })) {
                date_col = static_cast<int>(c);
                break;
            }
        }
    }

    ReturnsTable table;
    const double scale = options.percent ? 0.01 : 1.0;
    for (std::size_t c = 0; c < width; ++c) {
        if (static_cast<int>(c) == date_col) {
            table.date_name = header ? head[c] : "date";
            for (const auto& row : rows) {
                if (!is_iso_date(row[c])) {
                    throw CsvError("date column holds a non-date cell '" + row[c] + "'");
                }
                table.dates.push_back(row[c]);
            }
            continue;
        }
        table.names.push_back(header ? head[c] : "V" + std::to_string(table.names.size() + 1));
        std::vector<double> col;
        col.reserve(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const auto v = parse_number(rows[r][c]);
            if (!v || !std::isfinite(*v)) {
                throw CsvError("cell '" + rows[r][c] + "' in column " + table.names.back() + ", data row " +
                               std::to_string(r + 1) + " is not a finite number");
            }
            col.push_back(*v * scale);
        }
        table.columns.push_back(std::move(col));
    }
    if (table.columns.empty()) {
        throw CsvError("returns file has no numeric columns");
    }
    return table;
}

ReturnsTable read_returns_file(const std::string& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) {
        throw CsvError("cannot open returns file '" + path + "'");
    }
    return read_returns(in, options);
}

} // namespace upsr::cli
