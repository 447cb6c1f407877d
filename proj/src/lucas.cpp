// lucas.cpp -- see lucas.hpp for contracts.

#include "lucasrank/lucas.hpp"

#include <algorithm>

namespace lucasrank {

namespace {

// primes dividing |v|, merged into out (v != 0)
void merge_prime_divisors(i128 v, std::vector<u64>& out) {
    if (v < 0) v = -v;
    for (const auto& [p, e] : factor(v).factors) out.push_back(static_cast<u64>(p));
}

LucasParams build(i64 a1, i64 a2, bool allow_square_delta) {
    if (a1 == 0 || a2 == 0)
        throw contract_error("validate: a1 and a2 must be nonzero");
    LucasParams P;
    P.a1 = a1;
    P.a2 = a2;
    P.delta = i128(a1) * a1 + 4 * i128(a2);
    if (P.delta == 0)
        throw hypothesis_error("square discriminant", "discriminant Delta = 0");
    i128 sf = squarefree_part(P.delta);  // sign-preserving kernel
    if (sf == 1) {
        // Delta is a positive perfect square: alpha/beta is rational
        if (!allow_square_delta)
            throw hypothesis_error("square discriminant",
                                   "Delta = a1^2 + 4*a2 is a perfect square");
        P.delta_square = true;
        P.delta0 = 0;
        // gamma = alpha/beta rational; torsion would mean gamma = +-1, i.e.
        // alpha = +-beta, impossible here (a1 != 0, Delta != 0)
    } else {
        P.delta0 = sf;
        P.gamma = gamma_of(a1, a2);
        if (is_root_of_unity(*P.gamma))
            throw hypothesis_error("root of unity",
                                   "gamma = alpha/beta is a root of unity");
        if (!allow_square_delta) {
            HResult hr = compute_h(*P.gamma);
            P.h = hr.h;
            P.gamma0 = hr.gamma0;
        }
    }
    P.excluded.push_back(2);
    merge_prime_divisors(a2, P.excluded);
    merge_prime_divisors(P.delta, P.excluded);
    std::sort(P.excluded.begin(), P.excluded.end());
    P.excluded.erase(std::unique(P.excluded.begin(), P.excluded.end()),
                     P.excluded.end());
    return P;
}

inline u64 reduce_mod(i64 v, u64 p) {
    i64 r = v % static_cast<i64>(p);
    if (r < 0) r += static_cast<i64>(p);
    return static_cast<u64>(r);
}

}  // namespace

LucasParams validate(i64 a1, i64 a2) { return build(a1, a2, false); }

LucasParams validate_for_rank(i64 a1, i64 a2) { return build(a1, a2, true); }

bool is_excluded(const LucasParams& P, u64 p) {
    return std::binary_search(P.excluded.begin(), P.excluded.end(), p);
}

std::pair<u64, u64> term_mod(const LucasParams& P, u64 n, u64 p) {
    if (!is_prime_u64(p)) throw contract_error("term_mod: p must be prime");
    u64 a1 = reduce_mod(P.a1, p), a2 = reduce_mod(P.a2, p);
    // M = [[a1, a2], [1, 0]]; M^n = [[U_{n+1}, a2*U_n], [U_n, a2*U_{n-1}]]
    u64 m00 = 1, m01 = 0, m10 = 0, m11 = 1;  // identity
    u64 b00 = a1, b01 = a2, b10 = 1, b11 = 0;
    u64 e = n;
    while (e) {
        if (e & 1) {
            u64 t00 = addmod(mulmod(m00, b00, p), mulmod(m01, b10, p), p);
            u64 t01 = addmod(mulmod(m00, b01, p), mulmod(m01, b11, p), p);
            u64 t10 = addmod(mulmod(m10, b00, p), mulmod(m11, b10, p), p);
            u64 t11 = addmod(mulmod(m10, b01, p), mulmod(m11, b11, p), p);
            m00 = t00;
            m01 = t01;
            m10 = t10;
            m11 = t11;
        }
        e >>= 1;
        if (!e) break;
        u64 t00 = addmod(mulmod(b00, b00, p), mulmod(b01, b10, p), p);
        u64 t01 = addmod(mulmod(b00, b01, p), mulmod(b01, b11, p), p);
        u64 t10 = addmod(mulmod(b10, b00, p), mulmod(b11, b10, p), p);
        u64 t11 = addmod(mulmod(b10, b01, p), mulmod(b11, b11, p), p);
        b00 = t00;
        b01 = t01;
        b10 = t10;
        b11 = t11;
    }
    u64 un = m10, un1 = m00;
    u64 vn = submod(addmod(un1, un1, p), mulmod(a1, un, p), p);
    return {un, vn};
}

int frobenius_sign(const LucasParams& P, u64 p) {
    if (is_excluded(P, p))
        throw contract_error("frobenius_sign: p = " + std::to_string(p) +
                             " is outside the prime universe");
    if (P.delta_square) return 1;
    int s = legendre_symbol(P.delta, p);
    if (s == 0)  // unreachable: p | Delta implies excluded
        throw contract_error("frobenius_sign: p divides Delta");
    return s;
}

RankRecord rank(const LucasParams& P, u64 p) {
    int sign = frobenius_sign(P, p);  // checks the universe contract
    u64 m = sign > 0 ? p - 1 : p + 1;
    u64 r = m;
    for (const auto& [q128, e] : factor(m).factors) {
        u64 q = static_cast<u64>(q128);
        for (int i = 0; i < e && r % q == 0; ++i) {
            if (term_mod(P, r / q, p).first != 0) break;
            r /= q;
        }
    }
    if (term_mod(P, r, p).first != 0)
        throw contract_error("rank: U_m mod p nonzero -- universe contract broken");
    return {p, sign, m, r, m / r};
}

bool divides_rank(const LucasParams& P, u64 d, u64 p) {
    if (d == 0) throw contract_error("divides_rank: d must be positive");
    return divides_rank(P, factor(d), p);
}

bool divides_rank(const LucasParams& P, const Factorization& dfac, u64 p) {
    int sign = frobenius_sign(P, p);  // checks the universe contract
    u64 m = sign > 0 ? p - 1 : p + 1;
    for (const auto& [q128, k] : dfac.factors) {
        u64 q = static_cast<u64>(q128);
        int a = 0;  // v_q(m), by repeated division -- no factoring of m
        u64 mm = m;
        while (mm % q == 0) {
            mm /= q;
            ++a;
        }
        if (a < k) return false;
        // v_q(rho) >= k  iff  U_{m / q^(a-k+1)} != 0 (mod p)
        u64 idx = m;
        for (int j = 0; j < a - k + 1; ++j) idx /= q;
        if (term_mod(P, idx, p).first == 0) return false;
    }
    return true;
}

bool divides_index(const LucasParams& P, u64 d, u64 p) {
    if (d == 0) throw contract_error("divides_index: d must be positive");
    int sign = frobenius_sign(P, p);  // checks the universe contract
    u64 m = sign > 0 ? p - 1 : p + 1;
    if (m % d != 0)
        throw contract_error("divides_index: d = " + std::to_string(d) +
                             " does not divide m = " + std::to_string(m));
    return term_mod(P, m / d, p).first == 0;
}

}  // namespace lucasrank
