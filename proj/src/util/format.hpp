#pragma once
#include <string>
#include <vector>
#include <ostream>

namespace ptn {

// Locale-independent float formatting with 17 significant digits, enough to
// round-trip an IEEE double exactly.
std::string fmt17(double x);

// Minimal CSV emitter: comma separator, LF line endings, header row first.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os, std::vector<std::string> header);
    void row(const std::vector<double>& values);
    void raw_row(const std::vector<std::string>& cells);
private:
    std::ostream& os_;
    std::size_t ncols_;
};

} // namespace ptn
