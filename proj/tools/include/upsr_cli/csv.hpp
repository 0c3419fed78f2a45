#pragma once

#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace upsr::cli {

/// Malformed input file; reported as a usage error.
class CsvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CsvOptions {
    std::optional<bool> header;       ///< unset: header iff the first row has a non-numeric, non-date cell
    std::optional<int> date_column;   ///< unset: first column whose cells all parse as ISO-8601; -1: none
    bool percent = false;             ///< divide every return by 100
};

/// Comma-separated returns. Dates are kept as written; every other column is numeric.
struct ReturnsTable {
    std::vector<std::string> names;           ///< one per numeric column ("V1", ... without a header)
    std::vector<std::vector<double>> columns;
    std::vector<std::string> dates;           ///< empty when there is no date column
    std::string date_name;

    std::size_t rows() const { return columns.empty() ? dates.size() : columns.front().size(); }
    /// Column by header name, or by 0-based position among the numeric columns.
    std::size_t index_of(const std::string& key) const;
    const std::vector<double>& column(const std::string& key) const { return columns.at(index_of(key)); }
};

bool is_iso_date(const std::string& cell);
/// Month 1..12 of an ISO-8601 date cell.
int iso_month(const std::string& cell);

ReturnsTable read_returns(std::istream& in, const CsvOptions& options = {});
ReturnsTable read_returns_file(const std::string& path, const CsvOptions& options = {});

} // namespace upsr::cli
