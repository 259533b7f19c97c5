#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace rismimo {

// Minimal CSV reader: comma-separated, no quoting, '#' lines ignored.
class CsvReader {
public:
    explicit CsvReader(const std::string& path);

    // Throws std::invalid_argument if the first row is not exactly `names`.
    void expect_header(const std::vector<std::string>& names);

    // Returns false at end of file. Skips blank and comment lines.
    bool next_row(std::vector<std::string>& fields);

private:
    std::ifstream in_;
    std::string path_;
};

// CSV writer that appends the provenance trailer `# seed=<s> version=<v>`
// on close. All numeric formatting goes through fixed printf specifiers
// so identical inputs produce identical bytes.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);

    void write_row(const std::vector<std::string>& fields);
    void finish(std::uint64_t seed);

    static std::string fmt(double v);
    static std::string fmt_int(long long v);

private:
    std::ofstream out_;
    std::string path_;
    bool finished_ = false;
};

inline constexpr const char* kVersion = "1.0.0";

std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace rismimo
