#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace conekernel::app {

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

/// CSV table with a mandatory header row. Cells are numbers or plain tokens
/// (no quoting needed).
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    CsvTable& row();
    CsvTable& add(double v);
    CsvTable& add(long long v);
    CsvTable& add(unsigned long long v);
    CsvTable& add(std::string_view token);
    CsvTable& add_empty();

    std::string str() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

} // namespace conekernel::app
