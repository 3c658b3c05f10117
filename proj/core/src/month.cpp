#include "hazscore/month.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace hazscore {

namespace {

bool parse_int(std::string_view s, int& out) {
    if (s.empty()) return false;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && ptr == end;
}

[[noreturn]] void bad_month(std::string_view text) {
    throw std::invalid_argument("invalid month '" + std::string(text) + "'");
}

}  // namespace

Month Month::parse(std::string_view text) {
    int year = 0;
    int month = 0;
    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
        // M/D/YYYY
        const auto slash2 = text.find('/', slash + 1);
        if (slash2 == std::string_view::npos) bad_month(text);
        int day = 0;
        if (!parse_int(text.substr(0, slash), month) || !parse_int(text.substr(slash + 1, slash2 - slash - 1), day) ||
            !parse_int(text.substr(slash2 + 1), year))
            bad_month(text);
    } else if (text.size() == 6 && text.find('-') == std::string_view::npos) {
        if (!parse_int(text.substr(0, 4), year) || !parse_int(text.substr(4, 2), month)) bad_month(text);
    } else if ((text.size() == 7 || text.size() == 10) && text[4] == '-') {
        if (!parse_int(text.substr(0, 4), year) || !parse_int(text.substr(5, 2), month)) bad_month(text);
        if (text.size() == 10) {
            int day = 0;
            if (text[7] != '-' || !parse_int(text.substr(8, 2), day)) bad_month(text);
        }
    } else {
        bad_month(text);
    }
    if (month < 1 || month > 12 || year < 1000 || year > 9999) bad_month(text);
    return Month(year, month);
}

std::string Month::to_string() const {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d", year(), month());
    return buf;
}

}  // namespace hazscore
