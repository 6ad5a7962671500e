#pragma once

#include <cmath>

namespace dpp::detail {

inline double log_gamma(double x) {
#if defined(__GLIBC__) || defined(__APPLE__)
    int sign = 0;
    return ::lgamma_r(x, &sign);  // std::lgamma writes the global signgam
#else
    return std::lgamma(x);
#endif
}

}  // namespace dpp::detail
