#include "driftscan/month.hpp"

#include <cctype>
#include <cstdio>

#include "driftscan/error.hpp"

namespace driftscan {

Month::Month(int year, int mon) {
    if (year < 0 || mon < 1 || mon > 12)
        throw Error("invalid month: year=" + std::to_string(year) + " mon=" + std::to_string(mon));
    index_ = year * 12 + (mon - 1);
}

Month Month::parse(const std::string& text) {
    auto fail = [&] { throw Error("malformed month '" + text + "' (expected YYYY-MM)"); };
    if (text.size() != 7 || text[4] != '-') fail();
    for (int i : {0, 1, 2, 3, 5, 6})
        if (!std::isdigit(static_cast<unsigned char>(text[i]))) fail();
    int year = std::stoi(text.substr(0, 4));
    int mon = std::stoi(text.substr(5, 2));
    if (mon < 1 || mon > 12) fail();
    return Month(year, mon);
}

std::string Month::str() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year(), mon());
    return buf;
}

}  // namespace driftscan
