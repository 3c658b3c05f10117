#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hazscore {

/// Raised when a file cannot be opened, read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Splits one record on `delimiter`. No quoting; fields are views into `line`.
std::vector<std::string_view> split_fields(std::string_view line, char delimiter);

std::string_view trim(std::string_view s);

std::optional<double> parse_double(std::string_view s);
std::optional<std::int64_t> parse_int(std::string_view s);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

/// Line reader that strips trailing '\r' and tracks 1-based line numbers.
class LineReader {
public:
    explicit LineReader(const std::filesystem::path& path);

    bool next(std::string& line);
    std::size_t line_number() const { return line_no_; }

private:
    std::ifstream in_;
    std::size_t line_no_ = 0;
};

/// Minimal CSV writer; fields are written verbatim, joined by `delimiter`.
class DelimitedWriter {
public:
    explicit DelimitedWriter(const std::filesystem::path& path, char delimiter = ',');

    DelimitedWriter& field(std::string_view s);
    DelimitedWriter& field(double v);
    DelimitedWriter& field(std::int64_t v);
    DelimitedWriter& field(int v) { return field(static_cast<std::int64_t>(v)); }
    DelimitedWriter& field(std::size_t v) { return field(static_cast<std::int64_t>(v)); }
    void end_row();

    void header(const std::vector<std::string>& names);
    void close();

private:
    std::ofstream out_;
    std::filesystem::path path_;
    std::string row_;
    char delimiter_;
    bool first_ = true;
};

}  // namespace hazscore
