#pragma once
// quadfield.hpp -- exact arithmetic in the quadratic field K = Q(sqrt(delta0))
// and the maximal-exponent computation h = max{k : gamma is a k-th power in K}.
//
// Elements are kept in the canonical form (x + y*sqrt(delta0))/z with
// z >= 1 and gcd(x, y, z) = 1; delta0 is a squarefree integer != 0, 1 fixed
// per element (operations on mixed fields are contract errors).
//
// prime_root / compute_h accept elements of norm +1 or -1.  Numeric work
// (high-precision embeddings + continued-fraction trace reconstruction) is
// only ever a hint generator: a root is returned only after exact
// verification, and "no root" is returned only once the working precision
// provably separates all bounded-denominator candidates.

#include <optional>
#include <string>

#include <gmpxx.h>

#include "lucasrank/arith.hpp"
#include "lucasrank/errors.hpp"

namespace lucasrank {

class QuadElem {
public:
    QuadElem(mpz_class x, mpz_class y, mpz_class z, mpz_class delta0);

    static QuadElem from_int(long v, const mpz_class& delta0);
    static QuadElem from_rational(const mpq_class& v, const mpz_class& delta0);

    const mpz_class& x() const { return x_; }
    const mpz_class& y() const { return y_; }
    const mpz_class& z() const { return z_; }
    const mpz_class& delta0() const { return d0_; }

    bool is_zero() const { return x_ == 0 && y_ == 0; }
    bool is_rational() const { return y_ == 0; }

    QuadElem conjugate() const;          // y -> -y
    mpq_class norm() const;              // a * conj(a)
    mpq_class trace() const;             // a + conj(a)
    QuadElem inverse() const;            // contract: a != 0
    QuadElem pow(long long n) const;     // negative n via inversion

    friend QuadElem operator+(const QuadElem& a, const QuadElem& b);
    friend QuadElem operator-(const QuadElem& a, const QuadElem& b);
    friend QuadElem operator*(const QuadElem& a, const QuadElem& b);
    friend QuadElem operator/(const QuadElem& a, const QuadElem& b);
    friend QuadElem operator-(const QuadElem& a);

    bool operator==(const QuadElem& o) const;
    bool operator!=(const QuadElem& o) const { return !(*this == o); }

    // exact sign of the real embedding x + sign_of_sqrt * y*sqrt(delta0)
    // (contract: delta0 > 0); returns -1, 0, or +1
    int embedding_sign(int sign_of_sqrt) const;

    std::string str() const;  // e.g. "(-3+sqrt(5))/2", "2", "-9-4*sqrt(5)"

private:
    mpz_class x_, y_, z_, d0_;
    void canonicalize();
};

// gamma = alpha/beta for the recurrence U_n = a1*U_{n-1} + a2*U_{n-2}:
// closed form gamma = -((a1^2 + 2*a2) + a1*sqrt(Delta)) / (2*a2) over the
// squarefree kernel delta0 of Delta = a1^2 + 4*a2.
// Throws hypothesis_error("square discriminant") when Delta is 0 or a square.
QuadElem gamma_of(i64 a1, i64 a2);

// true iff a^k = 1 for some k in {1,2,3,4,6} (the only torsion orders that
// occur in quadratic fields)
bool is_root_of_unity(const QuadElem& a);

// absolute logarithmic Weil height via the Mahler measure of the primitive
// minimal polynomial; rationals p/q give log max(|p|, |q|).  Contract: a != 0.
double weil_height(const QuadElem& a);

// exact q-th root of a in K, or nullopt if none exists.
// Contract: q prime, a != 0, norm(a) = +1 or -1.
// Throws undecided_error if the decision would need more than the maximum
// working precision (never happens for sane denominators).
std::optional<QuadElem> prime_root(const QuadElem& a, u64 q);

struct HResult {
    u64 h;             // the maximal exponent
    QuadElem gamma0;   // gamma0^h = gamma, gamma0 not a q-th power for any prime q
};

// Contract: gamma not a root of unity, norm(gamma) = +1 or -1.
// Search bound: any non-torsion quadratic number has height >= 0.2406
// (Lehmer-type floor (log phi)/2), so h <= height(gamma)/0.2406.
HResult compute_h(const QuadElem& gamma);

}  // namespace lucasrank
