#include "rfem/csv.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "rfem/errors.hpp"

namespace rfem {

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, std::vector<std::string> header)
    : out_(path), path_(path), columns_(header.size())
{
    if (!out_)
        throw ConfigError("cannot write " + path);
    for (std::size_t i = 0; i < header.size(); ++i)
        out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

void CsvWriter::row(const std::vector<CsvCell>& cells)
{
    if (cells.size() != columns_)
        throw InvalidInput(path_ + ": row has " + std::to_string(cells.size()) + " cells, header has "
                           + std::to_string(columns_));
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i)
            out_ << ',';
        std::visit(
            [this](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, double>)
                    out_ << format_double(v);
                else
                    out_ << v;
            },
            cells[i]);
    }
    out_ << '\n';
    if (!out_)
        throw ConfigError("write to " + path_ + " failed");
}

int CsvTable::column(const std::string& name) const
{
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name)
            return static_cast<int>(i);
    throw ConfigError("CSV has no column '" + name + "'");
}

namespace {

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
        out.push_back(cell);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

} // namespace

CsvTable read_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open " + path);
    CsvTable t;
    std::string line;
    if (!std::getline(in, line))
        throw ConfigError(path + ": empty file");
    t.header = split(line);
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        auto cells = split(line);
        if (cells.size() != t.header.size())
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.header.size())
                              + " cells");
        t.rows.push_back(std::move(cells));
    }
    return t;
}

} // namespace rfem
