#include "dll/cli/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "dll/error.hpp"

namespace dll::cli {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

Dataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) fail(ErrorKind::data, path + ": empty file, expected a header");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    const std::vector<std::string_view> header = split(line);
    if (header.size() < 2 || header[0] != "y" || header[1] != "x1")
        fail(ErrorKind::data, path + ": header must start with y,x1");
    for (std::size_t k = 2; k < header.size(); ++k) {
        const std::string want = "x2_" + std::to_string(k - 1);
        if (header[k] != want)
            fail(ErrorKind::data, path + ": header column " + std::to_string(k + 1) + " is '" +
                                      std::string(header[k]) + "', expected '" + want + "'");
    }
    const std::size_t cols = header.size();

    std::vector<double> values;
    std::size_t rows = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string_view> cells = split(line);
        const std::string where = path + ": row " + std::to_string(rows + 1) + " (line " +
                                  std::to_string(line_no) + ")";
        if (cells.size() != cols)
            fail(ErrorKind::data, where + " has " + std::to_string(cells.size()) + " fields, expected " +
                                      std::to_string(cols));
        for (std::size_t k = 0; k < cols; ++k) {
            double v = 0.0;
            const char* first = cells[k].data();
            const char* last = first + cells[k].size();
            if (!cells[k].empty() && *first == '+') ++first;
            const auto [ptr, ec] = std::from_chars(first, last, v);
            if (cells[k].empty() || ec != std::errc() || ptr != last)
                fail(ErrorKind::data, where + ", column " + std::string(header[k]) +
                                          ": not a number: '" + std::string(cells[k]) + "'");
            if (!std::isfinite(v))
                fail(ErrorKind::data, where + ", column " + std::string(header[k]) +
                                          ": non-finite value");
            values.push_back(v);
        }
        ++rows;
    }
    if (rows == 0) fail(ErrorKind::data, path + ": empty dataset");

    Dataset data;
    const auto n = static_cast<Eigen::Index>(rows);
    const auto p = static_cast<Eigen::Index>(cols - 2);
    data.y.resize(n);
    data.x1.resize(n);
    data.x2.resize(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double* row = values.data() + static_cast<std::size_t>(i) * cols;
        data.y[i] = row[0];
        data.x1[i] = row[1];
        for (Eigen::Index j = 0; j < p; ++j) data.x2(i, j) = row[2 + j];
    }
    return data;
}

void write_csv(const std::string& path, const Dataset& data) {
    std::FILE* f = path.empty() || path == "-" ? stdout : std::fopen(path.c_str(), "w");
    if (!f) fail(ErrorKind::io, "cannot write " + path);
    std::fputs("y,x1", f);
    for (Eigen::Index j = 0; j < data.p(); ++j) std::fprintf(f, ",x2_%ld", static_cast<long>(j + 1));
    std::fputc('\n', f);
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        std::fprintf(f, "%.17g,%.17g", data.y[i], data.x1[i]);
        for (Eigen::Index j = 0; j < data.p(); ++j) std::fprintf(f, ",%.17g", data.x2(i, j));
        std::fputc('\n', f);
    }
    const bool failed = std::ferror(f) != 0;
    if (f != stdout) {
        if (std::fclose(f) != 0 || failed) fail(ErrorKind::io, "error writing " + path);
    } else {
        std::fflush(f);
        if (failed) fail(ErrorKind::io, "error writing to standard output");
    }
}

}  // namespace dll::cli
