#include "drain/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "drain/errors.hpp"

namespace drain {

std::string format_number(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::row(std::vector<std::string> cells)
{
    if (cells.size() != header_.size()) {
        throw UsageError("csv row has " + std::to_string(cells.size()) + " cells, header has " +
                         std::to_string(header_.size()));
    }
    rows_.push_back(std::move(cells));
    return *this;
}

std::string CsvTable::str() const
{
    std::string out;
    auto emit = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) {
                out += ',';
            }
            out += cells[i];
        }
        out += '\n';
    };
    emit(header_);
    for (const auto& r : rows_) {
        emit(r);
    }
    return out;
}

void CsvTable::save(const std::filesystem::path& path) const
{
    write_text_file(path, str());
}

void write_text_file(const std::filesystem::path& path, std::string_view text)
{
    auto tmp = path;
    tmp += ".part";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw DataError("cannot open " + tmp.string() + " for writing");
        }
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!out) {
            throw DataError("write failed: " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace drain
