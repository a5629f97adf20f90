#include "logsample/timestamp.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <ctime>
#include <iomanip>
#include <sstream>

namespace logsample {

namespace {

using namespace std::chrono;

std::optional<Timestamp> from_civil(int y, int mo, int d, int h, int mi, int s) {
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 ||
        s > 60)
        return std::nullopt;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                             day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

bool read_int(std::string_view text, std::size_t& pos, std::size_t digits, int& out) {
    if (pos + digits > text.size()) return false;
    for (std::size_t i = 0; i < digits; ++i)
        if (!std::isdigit(static_cast<unsigned char>(text[pos + i]))) return false;
    std::from_chars(text.data() + pos, text.data() + pos + digits, out);
    pos += digits;
    return true;
}

bool expect(std::string_view text, std::size_t& pos, char c) {
    if (pos >= text.size() || text[pos] != c) return false;
    ++pos;
    return true;
}

}  // namespace

std::optional<Timestamp> parse_iso8601(std::string_view text) {
    std::size_t pos = 0;
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    if (!read_int(text, pos, 4, y) || !expect(text, pos, '-') || !read_int(text, pos, 2, mo) ||
        !expect(text, pos, '-') || !read_int(text, pos, 2, d))
        return std::nullopt;
    if (pos == text.size()) return from_civil(y, mo, d, 0, 0, 0);
    if (text[pos] != 'T' && text[pos] != ' ') return std::nullopt;
    ++pos;
    if (!read_int(text, pos, 2, h) || !expect(text, pos, ':') || !read_int(text, pos, 2, mi))
        return std::nullopt;
    if (pos < text.size() && text[pos] == ':') {
        ++pos;
        if (!read_int(text, pos, 2, s)) return std::nullopt;
        if (pos < text.size() && text[pos] == '.') {
            ++pos;
            const std::size_t start = pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
            if (pos == start) return std::nullopt;
        }
    }
    auto base = from_civil(y, mo, d, h, mi, s);
    if (!base) return std::nullopt;
    if (pos == text.size()) return base;
    if (text[pos] == 'Z' && pos + 1 == text.size()) return base;
    if (text[pos] != '+' && text[pos] != '-') return std::nullopt;
    const int sign = text[pos] == '+' ? 1 : -1;
    ++pos;
    int oh = 0, om = 0;
    if (!read_int(text, pos, 2, oh)) return std::nullopt;
    if (pos < text.size() && text[pos] == ':') ++pos;
    if (!read_int(text, pos, 2, om) || pos != text.size()) return std::nullopt;
    return *base - sign * (hours{oh} + minutes{om});
}

std::optional<Timestamp> parse_timestamp(std::string_view text, std::string_view format) {
    std::tm tm{};
    std::istringstream in{std::string(text)};
    in >> std::get_time(&tm, std::string(format).c_str());
    if (!in.fail()) {
        in.peek();
        if (in.eof()) {
            auto t = from_civil(tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                                tm.tm_min, tm.tm_sec);
            if (t) return t;
        }
    }
    return parse_iso8601(text);
}

std::string format_timestamp(Timestamp t) {
    const auto day_point = floor<days>(t);
    const year_month_day ymd{day_point};
    const hh_mm_ss hms{t - day_point};
    char buf[48];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02u:%02u:%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<unsigned>(hms.hours().count()) % 24u,
                  static_cast<unsigned>(hms.minutes().count()) % 60u,
                  static_cast<unsigned>(hms.seconds().count()) % 60u);
    return buf;
}

}  // namespace logsample
