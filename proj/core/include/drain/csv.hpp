#pragma once

#include <filesystem>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace drain {

/// Shortest round-trip decimal form; "nan" / "inf" / "-inf" for non-finite values.
std::string format_number(double v);

/// Minimal CSV table: a header row and rows of pre-formatted cells.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    CsvTable& row(std::vector<std::string> cells);

    std::string str() const;
    void save(const std::filesystem::path& path) const;

    const std::vector<std::string>& header() const noexcept { return header_; }
    const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Writes text through a sibling temporary and rename.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace drain
