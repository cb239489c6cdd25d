#pragma once

#include <gmpxx.h>

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace epciso {

using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

// Bits needed to store num/den as a pair of binary numbers (sign ignored).
inline int rational_bits(const Rational& q) {
    if (q == 0) return 1;
    return static_cast<int>(mpz_sizeinbase(q.get_num().get_mpz_t(), 2) +
                            mpz_sizeinbase(q.get_den().get_mpz_t(), 2));
}

// Canonical text form "num/den" with the sign on the numerator.
inline std::string rational_str(const Rational& q) {
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) {
            mpz_class num(s);
            return Rational(num);
        }
        mpz_class num(s.substr(0, slash));
        mpz_class den(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        Rational q(num, den);
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        throw std::runtime_error("bad rational literal: " + s);
    }
}

}  // namespace epciso
