#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace esnd::io {

/// Formats a double with 17 significant digits, enough to round-trip exactly.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

/// Writes one sample per line in decimal text.
inline void write_signal(const std::filesystem::path& path, std::span<const double> samples) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("write_signal: cannot open " + path.string());
    for (double v : samples)
        out << format_double(v) << '\n';
    if (!out)
        throw std::runtime_error("write_signal: write failed for " + path.string());
}

inline std::vector<double> read_signal(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("read_signal: cannot open " + path.string());
    std::vector<double> samples;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        const char* begin = line.c_str();
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin)
            throw std::runtime_error("read_signal: " + path.string() + ":" + std::to_string(lineno) +
                                     ": not a number: '" + line + "'");
        while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
        if (*end != '\0')
            throw std::runtime_error("read_signal: " + path.string() + ":" + std::to_string(lineno) +
                                     ": trailing garbage: '" + line + "'");
        samples.push_back(v);
    }
    return samples;
}

} // namespace esnd::io
