#pragma once

#include <chrono>
#include <compare>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dietmine {

/// Calendar date (proleptic Gregorian), kept as plain fields so parsing,
/// formatting and ordering stay locale-free.
struct Date {
    int year = 1970;
    unsigned month = 1;
    unsigned day = 1;

    auto operator<=>(const Date&) const = default;

    bool valid() const {
        return std::chrono::year_month_day{std::chrono::year{year},
                                           std::chrono::month{month},
                                           std::chrono::day{day}}
            .ok();
    }

    std::chrono::sys_days to_sys_days() const {
        return std::chrono::sys_days{std::chrono::year_month_day{
            std::chrono::year{year}, std::chrono::month{month},
            std::chrono::day{day}}};
    }

    static Date from_sys_days(std::chrono::sys_days sd) {
        std::chrono::year_month_day ymd{sd};
        return Date{int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day())};
    }

    Date plus_days(long n) const {
        return from_sys_days(to_sys_days() + std::chrono::days{n});
    }

    /// ISO weekday: 1 = Monday .. 7 = Sunday.
    int weekday_iso() const {
        return int(std::chrono::weekday{to_sys_days()}.iso_encoding());
    }

    std::string str() const {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year, month, day);
        return buf;
    }

    /// Parses strict "YYYY-MM-DD"; throws std::invalid_argument otherwise.
    static Date parse(std::string_view s) {
        auto bad = [&] {
            throw std::invalid_argument("bad date: '" + std::string(s) + "'");
        };
        if (s.size() != 10 || s[4] != '-' || s[7] != '-') bad();
        for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
            if (s[i] < '0' || s[i] > '9') bad();
        auto num = [&](std::size_t pos, std::size_t len) {
            int v = 0;
            for (std::size_t i = pos; i < pos + len; ++i) v = v * 10 + (s[i] - '0');
            return v;
        };
        Date d{num(0, 4), unsigned(num(5, 2)), unsigned(num(8, 2))};
        if (!d.valid()) bad();
        return d;
    }
};

} // namespace dietmine
