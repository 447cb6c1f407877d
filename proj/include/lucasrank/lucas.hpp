#pragma once
// lucas.hpp -- per-prime computations for the Lucas sequence
// U_n = a1*U_{n-1} + a2*U_{n-2} (U_0 = 0, U_1 = 1) and its companion
// V_n (V_0 = 2, V_1 = a1): terms mod p, Frobenius sign, rank of
// appearance, and the fast divisibility tests the census is built on.
//
// All per-prime operations require p to lie in the sequence's prime
// universe: p not dividing 2*a2*Delta.  Calls with excluded primes are
// contract errors, never silent wrong answers.

#include <optional>
#include <utility>
#include <vector>

#include "lucasrank/arith.hpp"
#include "lucasrank/errors.hpp"
#include "lucasrank/quadfield.hpp"

namespace lucasrank {

struct LucasParams {
    i64 a1 = 0, a2 = 0;
    i128 delta = 0;           // a1^2 + 4*a2
    i128 delta0 = 0;          // squarefree kernel of delta (0 when delta is square)
    bool delta_square = false;  // only constructible via validate_for_rank
    std::vector<u64> excluded;  // sorted primes dividing 2*a2*Delta
    u64 h = 0;                // maximal exponent (strict validate only)
    std::optional<QuadElem> gamma;   // alpha/beta (absent when delta is square)
    std::optional<QuadElem> gamma0;  // gamma0^h = gamma (strict validate only)
};

struct RankRecord {
    u64 p;     // the prime
    int sign;  // (Delta/p) in {-1,+1}
    u64 m;     // p - sign
    u64 rho;   // rank of appearance, rho | m
    u64 iota;  // index of appearance, m / rho
};

// Strict constructor: enforces every hypothesis of the density theory.
// Throws hypothesis_error("square discriminant") when Delta is 0 or a
// perfect square, hypothesis_error("root of unity") when gamma is torsion.
// Eagerly computes h and gamma0.
LucasParams validate(i64 a1, i64 a2);

// Relaxed constructor for rank/census work: square discriminants are
// admitted (gamma is then rational and the Frobenius sign is always +1);
// degenerate torsion gamma is still rejected.
LucasParams validate_for_rank(i64 a1, i64 a2);

bool is_excluded(const LucasParams& P, u64 p);

// (U_n mod p, V_n mod p) by 2x2 matrix power, O(log n) modular steps.
std::pair<u64, u64> term_mod(const LucasParams& P, u64 n, u64 p);

// (Delta/p) in {-1,+1}.  Contract: p not excluded.
int frobenius_sign(const LucasParams& P, u64 p);

// Full rank record by order-descent from m = p - (Delta/p): for each prime
// q | m, divide rho by q while U_{rho/q} == 0 (mod p).  Contract: p not
// excluded.
RankRecord rank(const LucasParams& P, u64 p);

// true iff d | rho_U(p), WITHOUT factoring m: for q^k || d with
// a = v_q(m), d | rho at q iff a >= k and U_{m/q^(a-k+1)} != 0 (mod p).
// Contract: p not excluded, d >= 1.
bool divides_rank(const LucasParams& P, u64 d, u64 p);
// same, with the factorization of d precomputed (census hot path)
bool divides_rank(const LucasParams& P, const Factorization& dfac, u64 p);

// true iff d | iota_U(p); single term evaluation at m/d.
// Contract: p not excluded, d | m (callers guarantee via congruence filter).
bool divides_index(const LucasParams& P, u64 d, u64 p);

}  // namespace lucasrank
