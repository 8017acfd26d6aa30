#include "fraclab/artifacts.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include <json.hpp>

#include "fraclab/errors.hpp"

namespace fraclab {

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

CsvTable& CsvTable::row(std::vector<std::string> cells) {
    if (cells.size() != columns_.size()) throw ShapeError("csv row width does not match the header");
    rows_.push_back(std::move(cells));
    return *this;
}

std::string CsvTable::str() const {
    std::string out = std::string(kCsvSchema) + "\n";
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (k) out += ',';
            out += cells[k];
        }
        out += '\n';
    };
    line(columns_);
    for (const auto& r : rows_) line(r);
    return out;
}

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw Error("failed writing " + tmp.string());
    }
    fs::rename(tmp, path);
}

bool RunSummary::all_pass() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

std::string RunSummary::json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["config_echo"] = config_echo;
    j["verdicts"] = nlohmann::ordered_json::array();
    for (const auto& v : verdicts) j["verdicts"].push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
    j["timings"] = nlohmann::ordered_json::object();
    for (const auto& [name, seconds] : timings) j["timings"][name] = seconds;
    j["artifacts"] = nlohmann::ordered_json::array();
    for (const auto& p : artifacts) j["artifacts"].push_back(p.string());
    return j.dump(2) + "\n";
}

}  // namespace fraclab
