#include "csgnash/rational.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

#include "csgnash/error.hpp"

namespace csgnash {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.empty()) fail(ErrorCode::Syntax, "empty number");

    bool negative = false;
    std::string_view body = s;
    if (body.front() == '-' || body.front() == '+') {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }

    Rational result;
    if (auto slash = body.find('/'); slash != std::string_view::npos) {
        auto num = body.substr(0, slash);
        auto den = body.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den))
            fail(ErrorCode::Syntax, "malformed rational '" + std::string(text) + "'");
        mpz_class n(std::string(num), 10), d(std::string(den), 10);
        if (d == 0) fail(ErrorCode::Syntax, "zero denominator in '" + std::string(text) + "'");
        result = Rational(n, d);
        result.canonicalize();
    } else {
        // Decimal with optional exponent, converted exactly.
        std::string_view mant = body;
        long exponent = 0;
        if (auto e = body.find_first_of("eE"); e != std::string_view::npos) {
            mant = body.substr(0, e);
            auto exp_text = body.substr(e + 1);
            bool exp_neg = false;
            if (!exp_text.empty() && (exp_text.front() == '-' || exp_text.front() == '+')) {
                exp_neg = exp_text.front() == '-';
                exp_text.remove_prefix(1);
            }
            if (!all_digits(exp_text)) fail(ErrorCode::Syntax, "malformed number '" + std::string(text) + "'");
            exponent = std::strtol(std::string(exp_text).c_str(), nullptr, 10);
            if (exp_neg) exponent = -exponent;
        }
        std::string_view int_part = mant, frac_part;
        if (auto dot = mant.find('.'); dot != std::string_view::npos) {
            int_part = mant.substr(0, dot);
            frac_part = mant.substr(dot + 1);
        }
        if ((int_part.empty() && frac_part.empty()) || (!int_part.empty() && !all_digits(int_part)) ||
            (!frac_part.empty() && !all_digits(frac_part)))
            fail(ErrorCode::Syntax, "malformed number '" + std::string(text) + "'");
        std::string digits = std::string(int_part) + std::string(frac_part);
        if (digits.empty()) digits = "0";
        mpz_class n(digits, 10);
        long scale = static_cast<long>(frac_part.size()) - exponent;
        mpz_class pow10;
        if (scale >= 0) {
            mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(scale));
            result = Rational(n, pow10);
        } else {
            mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(-scale));
            result = Rational(n * pow10);
        }
        result.canonicalize();
    }
    return negative ? Rational(-result) : result;
}

std::string to_string(const Rational& r) { return r.get_str(10); }

Rational rational_from_double(double d) {
    if (!std::isfinite(d)) fail(ErrorCode::InvalidArgument, "non-finite value cannot be rationalised");
    Rational r(d);  // mpq_set_d is exact
    return r;
}

std::string format_double(double d) {
    if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
    if (std::isnan(d)) return "nan";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, d);
    std::string out(buf, res.ptr);
    if (out.find_first_of(".eE") == std::string::npos) out += ".0";
    return out;
}

bool approx_equal(const Rational& a, const Rational& b, const Rational& tol) {
    if (tol == 0) return a == b;
    Rational scale = 1;
    Rational aa = abs(a), bb = abs(b);
    if (aa > scale) scale = aa;
    if (bb > scale) scale = bb;
    return abs(Rational(a - b)) <= tol * scale;
}

}  // namespace csgnash
