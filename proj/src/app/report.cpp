#include "app/report.hpp"

#include <charconv>
#include <stdexcept>

namespace conekernel::app {

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw std::runtime_error("number formatting failed");
    return std::string(buf, ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::row() {
    rows_.emplace_back();
    return *this;
}

CsvTable& CsvTable::add(double v) {
    rows_.back().push_back(format_double(v));
    return *this;
}

CsvTable& CsvTable::add(long long v) {
    rows_.back().push_back(std::to_string(v));
    return *this;
}

CsvTable& CsvTable::add(unsigned long long v) {
    rows_.back().push_back(std::to_string(v));
    return *this;
}

CsvTable& CsvTable::add(std::string_view token) {
    rows_.back().emplace_back(token);
    return *this;
}

CsvTable& CsvTable::add_empty() {
    rows_.back().emplace_back();
    return *this;
}

std::string CsvTable::str() const {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out.push_back(',');
            out += cells[i];
        }
        out.push_back('\n');
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
}

} // namespace conekernel::app
