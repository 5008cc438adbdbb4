#pragma once

#include <span>
#include <string>
#include <string_view>

namespace pmean {

// Welfare exponent p in [-inf, 1]. The egalitarian limit (p = -inf) and the
// Nash case (p = 0) are first-class variants rather than floating-point
// sentinels, so that limit handling never depends on comparing doubles.
class Exponent {
public:
    static Exponent neg_infinity() { return Exponent(Kind::neg_infinity, 0.0); }
    static Exponent nash() { return Exponent(Kind::nash, 0.0); }
    static Exponent utilitarian() { return Exponent(Kind::finite, 1.0); }

    // Throws Errc::domain for p > 1. Finite |p| < 1e-9 collapses to nash;
    // below that the power form has no usable precision.
    static Exponent finite(double p);

    // Accepts a decimal or the aliases nsw (0), egal / -inf, util (1).
    static Exponent parse(std::string_view text);

    bool is_neg_infinity() const { return kind_ == Kind::neg_infinity; }
    bool is_nash() const { return kind_ == Kind::nash; }
    bool is_finite() const { return kind_ == Kind::finite; }

    // Finite exponent value; 0 for nash. Must not be called for -inf.
    double value() const;

    // Canonical text form used in reports: "-inf", "0", "0.5", ...
    std::string str() const;

    bool operator==(const Exponent& other) const = default;

private:
    enum class Kind { neg_infinity, nash, finite };
    Exponent(Kind kind, double value) : kind_(kind), value_(value) {}
    Kind kind_;
    double value_;
};

// The p-th generalized mean of nonnegative values: ((1/n) sum v_i^p)^(1/p),
// with the geometric mean at p = 0 and the minimum at p = -inf. If any value
// is zero and p <= 0 the result is 0 (limit convention). Negative or
// non-finite inputs raise Errc::domain, an empty vector Errc::invalid_argument.
double p_mean(std::span<const double> values, Exponent p);

// reference/achieved with the conventions +inf when achieved = 0 < reference
// and 1 when both are zero.
double welfare_ratio(double reference, double achieved);

} // namespace pmean
