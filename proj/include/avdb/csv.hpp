#pragma once

#include <optional>
#include <string>
#include <vector>

namespace avdb {

/// Plain comma-separated fields; the toolkit never emits commas inside a
/// field, so no quoting is needed.
std::vector<std::string> csv_split(const std::string& line);
std::string csv_join(const std::vector<std::string>& fields);

/// Shortest representation that parses back to the same double (%.17g).
std::string format_double(double v);

/// Optional metric formatting: unset values round-trip as "NA".
std::string format_metric(const std::optional<double>& v);
std::optional<double> parse_metric(const std::string& s);

}  // namespace avdb
