#include "pmean/welfare.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "pmean/error.hpp"

namespace pmean {

Exponent Exponent::finite(double p) {
    if (!std::isfinite(p)) {
        if (p == -std::numeric_limits<double>::infinity()) return neg_infinity();
        fail(Errc::domain, "exponent must be finite or -inf");
    }
    if (p > 1.0) fail(Errc::domain, "exponent p must satisfy p <= 1");
    if (std::fabs(p) < 1e-9) return nash();
    return Exponent(Kind::finite, p);
}

Exponent Exponent::parse(std::string_view text) {
    if (text == "nsw" || text == "0") return nash();
    if (text == "egal" || text == "-inf" || text == "-infinity") return neg_infinity();
    if (text == "util") return utilitarian();
    std::string buf(text);
    char* end = nullptr;
    const double p = std::strtod(buf.c_str(), &end);
    if (end == buf.c_str() || *end != '\0') fail(Errc::parse, "cannot parse exponent '" + buf + "'");
    return finite(p);
}

double Exponent::value() const {
    if (kind_ == Kind::neg_infinity) fail(Errc::internal, "value() called on -inf exponent");
    return kind_ == Kind::nash ? 0.0 : value_;
}

std::string Exponent::str() const {
    if (kind_ == Kind::neg_infinity) return "-inf";
    if (kind_ == Kind::nash) return "0";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value_);
    // trim to shortest representation that round-trips
    for (int prec = 1; prec < 17; ++prec) {
        char shorter[32];
        std::snprintf(shorter, sizeof shorter, "%.*g", prec, value_);
        if (std::strtod(shorter, nullptr) == value_) return shorter;
    }
    return buf;
}

namespace {

void check_values(std::span<const double> values) {
    if (values.empty()) fail(Errc::invalid_argument, "p_mean: empty value vector");
    for (double v : values) {
        if (!std::isfinite(v) || v < 0.0) fail(Errc::domain, "p_mean: values must be finite and nonnegative");
    }
}

} // namespace

double p_mean(std::span<const double> values, Exponent p) {
    check_values(values);
    const std::size_t n = values.size();

    if (p.is_neg_infinity()) return *std::min_element(values.begin(), values.end());

    if (p.is_nash()) {
        double log_sum = 0.0;
        for (double v : values) {
            if (v == 0.0) return 0.0;
            log_sum += std::log(v);
        }
        return std::exp(log_sum / static_cast<double>(n));
    }

    const double pe = p.value();
    // Rescale so the summed powers stay bounded: divide by the min for p < 0
    // (terms land in (0,1]) and by the max for p > 0.
    if (pe < 0.0) {
        double m = std::numeric_limits<double>::infinity();
        for (double v : values) {
            if (v == 0.0) return 0.0;
            m = std::min(m, v);
        }
        double sum = 0.0;
        for (double v : values) sum += std::pow(v / m, pe);
        return m * std::pow(sum / static_cast<double>(n), 1.0 / pe);
    }

    const double m = *std::max_element(values.begin(), values.end());
    if (m == 0.0) return 0.0;
    double sum = 0.0;
    for (double v : values) sum += std::pow(v / m, pe);
    return m * std::pow(sum / static_cast<double>(n), 1.0 / pe);
}

double welfare_ratio(double reference, double achieved) {
    if (!(reference >= 0.0) || !(achieved >= 0.0))
        fail(Errc::domain, "welfare_ratio: arguments must be nonnegative");
    if (achieved > 0.0) return reference / achieved;
    if (reference > 0.0) return std::numeric_limits<double>::infinity();
    return 1.0;
}

} // namespace pmean
