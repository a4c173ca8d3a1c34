#include "costru/app/csv.hpp"

#include <fmt/format.h>

#include <sstream>

#include "costru/dataset_io.hpp"
#include "costru/types.hpp"

namespace costru::app {

CsvWriter::CsvWriter(std::uint64_t config_hash, std::uint64_t seed, std::vector<std::string> header)
    : width_(header.size()) {
    text_ = fmt::format("# config_hash={:016x} seed={}\n", config_hash, seed);
    for (std::size_t i = 0; i < header.size(); ++i) text_ += (i ? "," : "") + header[i];
    text_ += "\n";
}

void CsvWriter::row(const std::vector<CsvCell>& cells) {
    if (cells.size() != width_) throw InputError("csv row width differs from header");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) text_ += ",";
        std::visit([this](const auto& v) { text_ += fmt::format("{}", v); }, cells[i]);
    }
    text_ += "\n";
    ++nb_rows_;
}

void CsvWriter::write(const std::string& path) const { write_text_file(path, text_); }

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw InputError("csv has no column '" + name + "'");
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream stream(line);
    std::string cell;
    while (std::getline(stream, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
    CsvTable table;
    std::stringstream stream(text);
    std::string line;
    bool have_header = false;
    while (std::getline(stream, line)) {
        if (line.empty()) continue;
        if (line.front() == '#') {
            table.comment = line;
            continue;
        }
        if (!have_header) {
            table.header = split_line(line);
            have_header = true;
            continue;
        }
        auto cells = split_line(line);
        if (cells.size() != table.header.size()) throw InputError("csv row width differs from header");
        table.rows.push_back(std::move(cells));
    }
    if (!have_header) throw InputError("csv has no header");
    return table;
}

}  // namespace costru::app
