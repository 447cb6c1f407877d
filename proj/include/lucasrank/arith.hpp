#pragma once
// arith.hpp -- exact elementary number theory primitives used everywhere else:
// deterministic primality + factorization (to 126 bits), the classical
// arithmetic functions, Jacobi/Legendre symbols, signed squarefree parts,
// d-parts (d^inf, h), q-adic valuations, the offset logarithmic integral
// Li(x) = integral_2^x dt/log t, and supernatural-divisor enumeration.
//
// Everything here is a pure function of its arguments; safe for concurrent
// use from any number of threads.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lucasrank/errors.hpp"

namespace lucasrank {

using u32  = std::uint32_t;
using u64  = std::uint64_t;
using i64  = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

// Decimal rendering for 128-bit values (JSON/CSV want decimal strings).
std::string to_string_u128(u128 v);
std::string to_string_i128(i128 v);

// ---------------------------------------------------------------------------
// Factorization
// ---------------------------------------------------------------------------

struct Factorization {
    // (prime, exponent) pairs, primes strictly ascending, exponents >= 1.
    std::vector<std::pair<u128, int>> factors;
    u128 n = 1;  // the factored magnitude |input|

    bool single_prime() const { return factors.size() == 1 && factors[0].second == 1; }
    int omega() const { return static_cast<int>(factors.size()); }
};

// Deterministic primality.  < 2^64: Miller-Rabin over a witness set proven
// exhaustive for the 64-bit range.  >= 2^64: BPSW plus extra Miller-Rabin
// verification rounds (GMP).
bool is_prime_u64(u64 n);
bool is_prime_u128(u128 n);

// Factor |n|.  Contract: n != 0 and |n| < 2^126 (range error otherwise).
// Deterministic: trial division by a fixed small-prime table, then
// Brent-cycle Pollard rho with a fixed parameter schedule.
Factorization factor(i128 n);

// Classical arithmetic functions on n >= 1 (64-bit domain suffices here).
int  mobius(u64 n);
u64  euler_phi(u64 n);
int  omega(u64 n);
u64  tau(u64 n);
std::vector<u64> divisors(u64 n);  // ascending

// Jacobi symbol (a/n) for odd n >= 1; a may be any integer (reduced mod n).
int jacobi(i128 a, u64 n);

// Legendre symbol (a/p); contract: p is an odd prime (checked).
int legendre_symbol(i128 a, u64 p);

// Signed squarefree part: returns s with n = s * t^2, |s| squarefree,
// sign(s) = sign(n).  Contract: n != 0, |n| < 2^126.
i128 squarefree_part(i128 n);

// d-part of h: the largest divisor of h whose prime factors all divide d,
// i.e. (d^inf, h).  Contract: h >= 1, d >= 1.
u64 d_part(u64 h, u64 d);

// q-adic valuation of n.  Contract: n >= 1, q prime.
int valuation(u64 n, u64 q);

// Offset logarithmic integral Li(x) = integral_2^x dt/log t, relative
// accuracy well under 1e-9.  Contract: x >= 2 (domain error below).
double li(double x);

// All v <= bound with every prime factor of v dividing d ("v | d^inf"),
// ascending.  Contract: d >= 1, bound >= 1.
std::vector<u64> smooth_divisors(u64 d, u64 bound);

// Modular helpers (used by the Lucas engine; 128-bit intermediates).
inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>((static_cast<u128>(a) * b) % m); }
inline u64 addmod(u64 a, u64 b, u64 m) { return static_cast<u64>((static_cast<u128>(a) + b) % m); }
inline u64 submod(u64 a, u64 b, u64 m) { return static_cast<u64>((static_cast<u128>(a) + m - b) % m); }
u64 powmod(u64 a, u64 e, u64 m);

}  // namespace lucasrank
