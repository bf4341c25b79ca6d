#pragma once

#include <fstream>
#include <string>
#include <variant>
#include <vector>

namespace rfem {

/// 17 significant digits, "nan"/"inf" for non-finite values.
std::string format_double(double v);

using CsvCell = std::variant<long long, double, std::string>;

/// Header row first, fixed column order, one writer per file.
class CsvWriter {
public:
    CsvWriter(const std::string& path, std::vector<std::string> header);

    void row(const std::vector<CsvCell>& cells);
    void flush() { out_.flush(); }

private:
    std::ofstream out_;
    std::string path_;
    std::size_t columns_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const; // throws ConfigError if missing
};

CsvTable read_csv(const std::string& path);

} // namespace rfem
