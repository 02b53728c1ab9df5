#include "spfcast/quarter.hpp"

#include <cstdio>

#include "spfcast/errors.hpp"

namespace spfcast {

Quarter::Quarter(int year_, int q_) : year(year_), q(q_) {
    if (q_ < 1 || q_ > 4) {
        raise(ErrorCode::InvalidArgument,
              "quarter number must be 1..4, got " + std::to_string(q_));
    }
}

Quarter Quarter::from_index(int idx) {
    Quarter out;
    out.year = idx >= 0 ? idx / 4 : -((-idx + 3) / 4);
    out.q = idx - out.year * 4 + 1;
    return out;
}

std::string Quarter::str() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04dQ%d", year, q);
    return buf;
}

Quarter Quarter::parse(std::string_view text) {
    int year = 0;
    std::size_t i = 0;
    if (text.size() < 6) raise(ErrorCode::Parse, "bad quarter '" + std::string(text) + "'");
    for (; i < 4; ++i) {
        char c = text[i];
        if (c < '0' || c > '9') raise(ErrorCode::Parse, "bad quarter '" + std::string(text) + "'");
        year = year * 10 + (c - '0');
    }
    if ((text[4] != 'Q' && text[4] != 'q') || text.size() != 6 || text[5] < '1' || text[5] > '4') {
        raise(ErrorCode::Parse, "bad quarter '" + std::string(text) + "' (expected YYYYQn)");
    }
    return Quarter(year, text[5] - '0');
}

Quarter Quarter::of_month(int year, int month) {
    if (month < 1 || month > 12) {
        raise(ErrorCode::InvalidArgument, "month must be 1..12, got " + std::to_string(month));
    }
    return Quarter(year, (month - 1) / 3 + 1);
}

int month_index(int year, int month) {
    if (month < 1 || month > 12) {
        raise(ErrorCode::InvalidArgument, "month must be 1..12, got " + std::to_string(month));
    }
    return year * 12 + (month - 1);
}

Quarter quarter_of_month_index(int midx) {
    return Quarter::of_month(midx / 12, midx % 12 + 1);
}

std::string month_index_str(int midx) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d", midx / 12, midx % 12 + 1);
    return buf;
}

int parse_month(std::string_view text) {
    if (text.size() != 7 || text[4] != '-') {
        raise(ErrorCode::Parse, "bad month '" + std::string(text) + "' (expected YYYY-MM)");
    }
    int year = 0, month = 0;
    for (int i = 0; i < 4; ++i) {
        if (text[i] < '0' || text[i] > '9') raise(ErrorCode::Parse, "bad month '" + std::string(text) + "'");
        year = year * 10 + (text[i] - '0');
    }
    for (int i = 5; i < 7; ++i) {
        if (text[i] < '0' || text[i] > '9') raise(ErrorCode::Parse, "bad month '" + std::string(text) + "'");
        month = month * 10 + (text[i] - '0');
    }
    return month_index(year, month);
}

}  // namespace spfcast
