#pragma once

#include <compare>
#include <string>

namespace driftscan {

// Calendar month, rendered as ISO "YYYY-MM". Arithmetic is in whole months;
// the index is year*12 + (month-1), so gaps between snapshots are plain
// integer distances.
class Month {
public:
    Month() = default;
    Month(int year, int mon);

    // Strict "YYYY-MM" (zero-padded, month 01..12). Throws Error otherwise.
    static Month parse(const std::string& text);
    static Month from_index(int index) { return Month(index); }

    int year() const { return index_ / 12; }
    int mon() const { return index_ % 12 + 1; }
    int index() const { return index_; }
    Month plus(int months) const { return Month(index_ + months); }
    std::string str() const;

    auto operator<=>(const Month&) const = default;

private:
    explicit Month(int index) : index_(index) {}
    int index_ = 0;
};

inline int months_between(Month from, Month to) { return to.index() - from.index(); }

}  // namespace driftscan
