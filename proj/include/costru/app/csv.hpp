#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace costru::app {

using CsvCell = std::variant<std::string, long long, double>;

/// First line `# config_hash=<hex> seed=<n>`, then the header, then rows.
/// Doubles use the shortest round-trip form, so output is a pure function of the values.
class CsvWriter {
public:
    CsvWriter(std::uint64_t config_hash, std::uint64_t seed, std::vector<std::string> header);

    void row(const std::vector<CsvCell>& cells);
    std::size_t nb_rows() const { return nb_rows_; }
    const std::string& text() const { return text_; }
    void write(const std::string& path) const;

private:
    std::size_t width_;
    std::size_t nb_rows_ = 0;
    std::string text_;
};

struct CsvTable {
    std::string comment;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index by name; throws InputError when absent.
    std::size_t column(const std::string& name) const;
};

/// Reads files produced by CsvWriter (no quoting).
CsvTable parse_csv(const std::string& text);

}  // namespace costru::app
