#include "rismimo/csvio.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace rismimo {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

CsvReader::CsvReader(const std::string& path) : in_(path), path_(path) {
    if (!in_) throw std::invalid_argument("CsvReader: cannot open " + path);
}

void CsvReader::expect_header(const std::vector<std::string>& names) {
    std::vector<std::string> fields;
    if (!next_row(fields)) throw std::invalid_argument("CsvReader: " + path_ + " is empty");
    if (fields != names) throw std::invalid_argument("CsvReader: bad header in " + path_);
}

bool CsvReader::next_row(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in_, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        fields = split_csv_line(line);
        return true;
    }
    return false;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path), path_(path) {
    if (!out_) throw std::invalid_argument("CsvWriter: cannot open " + path + " for writing");
    write_row(header);
}

void CsvWriter::write_row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) out_ << ',';
        out_ << fields[i];
    }
    out_ << '\n';
}

void CsvWriter::finish(std::uint64_t seed) {
    if (finished_) return;
    out_ << "# seed=" << seed << " version=" << kVersion << '\n';
    out_.flush();
    if (!out_) throw std::runtime_error("CsvWriter: write failed for " + path_);
    finished_ = true;
}

std::string CsvWriter::fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string CsvWriter::fmt_int(long long v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lld", v);
    return buf;
}

}  // namespace rismimo
