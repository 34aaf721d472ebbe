#include "bray/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bray/errors.hpp"

namespace bray {

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double_exact(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        fail(ErrorCode::IoError, "malformed number in data file: '" + s + "'");
    return v;
}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
    std::string row;
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) row += ',';
        row += cells[i];
    }
    rows_.push_back(std::move(row));
}

void CsvWriter::add_comment(const std::string& line) { rows_.push_back("# " + line); }

std::string CsvWriter::str() const {
    std::string out = header_ + "\n";
    for (const auto& r : rows_) out += r + "\n";
    return out;
}

CsvFile read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoError, "cannot open measurement file: " + path);
    CsvFile f;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream is(line);
        while (std::getline(is, cell, ',')) cells.push_back(cell);
        if (!have_header) {
            f.columns = std::move(cells);
            have_header = true;
        } else {
            f.rows.push_back(std::move(cells));
        }
    }
    if (!have_header) fail(ErrorCode::IoError, "empty measurement file: " + path);
    return f;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot write file: " + path);
    out << content;
    if (!out) fail(ErrorCode::IoError, "short write: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void ensure_directory(const std::string& path) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) fail(ErrorCode::IoError, "cannot create output directory: " + path);
}

std::pair<double, double> write_pgm(const std::string& path, const std::vector<double>& values,
                                    int width, int height) {
    if (static_cast<size_t>(width) * height != values.size())
        fail(ErrorCode::NumericFailure, "slice dimensions do not match value count");
    double lo = values.empty() ? 0.0 : values[0], hi = lo;
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double span = hi - lo;
    std::string data;
    data.reserve(values.size());
    for (double v : values) {
        const double t = span > 0.0 ? (v - lo) / span : 0.0;
        data.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * t))));
    }
    std::ostringstream head;
    head << "P5\n" << width << " " << height << "\n255\n";
    write_text_file(path, head.str() + data);
    return {lo, hi};
}

void write_json_file(const std::string& path, const nlohmann::ordered_json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

}  // namespace bray
