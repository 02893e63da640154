#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace csgnash {

using Rational = mpq_class;

// Accepts "3", "-3/4", "0.75", "1e-3", "2.5E2". Throws Error(Syntax) otherwise.
Rational parse_rational(std::string_view text);

// "3/4" or "2" (canonical form).
std::string to_string(const Rational& r);

// Exact dyadic conversion of a finite double.
Rational rational_from_double(double d);

inline double to_double(const Rational& r) { return r.get_d(); }
inline double to_double(double d) { return d; }

// Shortest round-trip decimal, always with a fractional part ("2.0", "0.75").
std::string format_double(double d);

// Arithmetic policy used by the templated engines.
template <class T>
struct Scalar;

template <>
struct Scalar<double> {
    static constexpr bool exact = false;
    static double from(const Rational& r) { return r.get_d(); }
    static double from(double d) { return d; }
    static Rational to_rational(double d) { return rational_from_double(d); }
};

template <>
struct Scalar<Rational> {
    static constexpr bool exact = true;
    static const Rational& from(const Rational& r) { return r; }
    static Rational from(double d) { return rational_from_double(d); }
    static const Rational& to_rational(const Rational& r) { return r; }
};

// True if |a - b| <= tol * max(1, |a|, |b|). With tol = 0 this is exact equality.
bool approx_equal(const Rational& a, const Rational& b, const Rational& tol);

}  // namespace csgnash
