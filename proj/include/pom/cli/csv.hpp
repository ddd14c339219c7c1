#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace pom::cli {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shortest form that reads back to the same double; NaN prints as "nan".
std::string format_number(double v);

// Comma-separated, header row first, '\n' line endings. No quoting: every
// field this tool writes is numeric or a bare token.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    void row(const std::vector<std::string>& fields);

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t columns_;
};

using CsvRow = std::map<std::string, std::string>;

std::vector<CsvRow> read_csv(const std::filesystem::path& path);

} // namespace pom::cli
