#include "hazscore/delimited.hpp"

#include <charconv>
#include <cmath>

namespace hazscore {

std::vector<std::string_view> split_fields(std::string_view line, char delimiter) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delimiter, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    std::int64_t v = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) return std::nullopt;
    return v;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

LineReader::LineReader(const std::filesystem::path& path) : in_(path) {
    if (!in_) throw IoError("cannot open '" + path.string() + "' for reading");
}

bool LineReader::next(std::string& line) {
    if (!std::getline(in_, line)) {
        if (in_.bad()) throw IoError("read failure");
        return false;
    }
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

DelimitedWriter::DelimitedWriter(const std::filesystem::path& path, char delimiter)
    : path_(path), delimiter_(delimiter) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw IoError("cannot open '" + path.string() + "' for writing");
}

DelimitedWriter& DelimitedWriter::field(std::string_view s) {
    if (!first_) row_.push_back(delimiter_);
    row_.append(s);
    first_ = false;
    return *this;
}

DelimitedWriter& DelimitedWriter::field(double v) { return field(std::string_view(format_double(v))); }

DelimitedWriter& DelimitedWriter::field(std::int64_t v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return field(std::string_view(buf, static_cast<std::size_t>(ptr - buf)));
}

void DelimitedWriter::end_row() {
    row_.push_back('\n');
    out_.write(row_.data(), static_cast<std::streamsize>(row_.size()));
    row_.clear();
    first_ = true;
}

void DelimitedWriter::header(const std::vector<std::string>& names) {
    for (const auto& n : names) field(n);
    end_row();
}

void DelimitedWriter::close() {
    out_.close();
    if (!out_) throw IoError("failed writing '" + path_.string() + "'");
}

}  // namespace hazscore
