#pragma once

#include <cstdio>
#include <string>

namespace mtqa {

// Round-trip-safe decimal formatting ("." decimal point, independent of locale
// since the C locale is never changed). Used for every CSV number so repeated
// runs emit identical bytes.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    // trim digits while the value still round-trips, for readable files
    for (int prec = 1; prec < 17; ++prec) {
        char shorter[40];
        std::snprintf(shorter, sizeof shorter, "%.*g", prec, x);
        double back = 0.0;
        std::sscanf(shorter, "%lf", &back);
        if (back == x) return shorter;
    }
    return buf;
}

}  // namespace mtqa
