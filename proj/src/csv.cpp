#include "avdb/csv.hpp"

#include <cstdio>
#include <cstdlib>

namespace avdb {

std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) {
            out.push_back(line.substr(pos));
            return out;
        }
        out.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
}

std::string csv_join(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += fields[i];
    }
    return out;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_metric(const std::optional<double>& v) {
    return v ? format_double(*v) : "NA";
}

std::optional<double> parse_metric(const std::string& s) {
    if (s == "NA") return std::nullopt;
    return std::strtod(s.c_str(), nullptr);
}

}  // namespace avdb
