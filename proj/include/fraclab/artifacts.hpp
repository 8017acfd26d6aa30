#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace fraclab {

inline constexpr const char* kCsvSchema = "# schema=v1";

/// In-memory CSV table. Cells are preformatted strings; numbers go through
/// format_number so identical inputs give identical bytes.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns);

    CsvTable& row(std::vector<std::string> cells);
    const std::vector<std::string>& columns() const { return columns_; }
    std::size_t size() const { return rows_.size(); }
    std::string str() const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

// Shortest round-trip decimal form.
std::string format_number(double v);

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

struct Verdict {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct RunSummary {
    std::string command;
    std::string config_echo;
    std::vector<Verdict> verdicts;
    std::vector<std::pair<std::string, double>> timings;  // seconds
    std::vector<std::filesystem::path> artifacts;

    bool all_pass() const;
    // {command, config_echo, verdicts[], timings, artifacts}
    std::string json() const;
};

}  // namespace fraclab
