#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace bray {

// Shortest decimal that round-trips to the exact double; all text outputs use
// it so reruns are byte-identical and parse back losslessly.
std::string format_double(double v);
double parse_double_exact(const std::string& s);

class CsvWriter {
public:
    explicit CsvWriter(std::string header_line) : header_(std::move(header_line)) {}
    void add_row(const std::vector<std::string>& cells);
    void add_comment(const std::string& line);  // '#'-prefixed lines after the header
    std::string str() const;

private:
    std::string header_;
    std::vector<std::string> rows_;
};

struct CsvFile {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};
CsvFile read_csv(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);
void ensure_directory(const std::string& path);

// 8-bit binary PGM with linear min-max scaling; returns {min, max} used.
std::pair<double, double> write_pgm(const std::string& path, const std::vector<double>& values,
                                    int width, int height);

void write_json_file(const std::string& path, const nlohmann::ordered_json& j);

}  // namespace bray
