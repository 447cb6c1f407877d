// arith.cpp -- see arith.hpp for contracts.

#include "lucasrank/arith.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numeric>

#include <gmpxx.h>

namespace lucasrank {

std::string to_string_u128(u128 v) {
    if (v == 0) return "0";
    char buf[48];
    int i = 48;
    while (v) {
        buf[--i] = char('0' + int(v % 10));
        v /= 10;
    }
    return std::string(buf + i, buf + 48);
}

std::string to_string_i128(i128 v) {
    if (v < 0) return "-" + to_string_u128(static_cast<u128>(-v));
    return to_string_u128(static_cast<u128>(v));
}

u64 powmod(u64 a, u64 e, u64 m) {
    u64 r = m == 1 ? 0 : 1;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Primality
// ---------------------------------------------------------------------------

static bool mr_witness(u64 n, u64 a, u64 d, int s) {
    // returns true if n passes the strong pseudoprime test to base a
    a %= n;
    if (a == 0) return true;
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) return true;
    for (int i = 1; i < s; ++i) {
        x = mulmod(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = std::countr_zero(d);
    d >>= s;
    // first 12 primes: deterministic for all n < 2^64
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (!mr_witness(n, a, d, s)) return false;
    }
    return true;
}

static mpz_class mpz_from_u128(u128 v) {
    mpz_class hi(static_cast<unsigned long>(v >> 64));
    mpz_class lo(static_cast<unsigned long>(v & ~0ull));
    return (hi << 64) + lo;
}

static u128 u128_from_mpz(const mpz_class& v) {
    // v assumed in [0, 2^128)
    mpz_class hi = v >> 64;
    mpz_class lo = v - (hi << 64);
    return (static_cast<u128>(hi.get_ui()) << 64) | static_cast<u128>(lo.get_ui());
}

bool is_prime_u128(u128 n) {
    if (n < (static_cast<u128>(1) << 64)) return is_prime_u64(static_cast<u64>(n));
    mpz_class z = mpz_from_u128(n);
    // BPSW plus 24 extra Miller-Rabin rounds; no BPSW pseudoprime is known,
    // and none exists below 2^64 (verified exhaustively in the literature).
    return mpz_probab_prime_p(z.get_mpz_t(), 25) > 0;
}

// ---------------------------------------------------------------------------
// Factorization
// ---------------------------------------------------------------------------

namespace {

// fixed trial-division table: primes < 1000
const std::vector<u32>& small_primes() {
    static const std::vector<u32> table = [] {
        std::vector<u32> ps;
        std::vector<bool> comp(1000, false);
        for (u32 i = 2; i < 1000; ++i) {
            if (comp[i]) continue;
            ps.push_back(i);
            for (u32 j = i * i; j < 1000; j += i) comp[j] = true;
        }
        return ps;
    }();
    return table;
}

// Brent-cycle Pollard rho on a 64-bit composite with no factors < 1000.
u64 pollard_brent_u64(u64 n) {
    if ((n & 1) == 0) return 2;
    for (u64 c = 1;; ++c) {  // deterministic parameter schedule
        u64 x = 2, y = 2, d = 1, q = 1, ys = 0;
        const u64 m = 128;
        u64 r = 1;
        auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
        while (d == 1) {
            x = y;
            for (u64 i = 0; i < r; ++i) y = f(y);
            for (u64 k = 0; k < r && d == 1; k += m) {
                ys = y;
                for (u64 i = 0; i < std::min(m, r - k); ++i) {
                    y = f(y);
                    q = mulmod(q, x > y ? x - y : y - x, n);
                }
                d = std::gcd(q, n);
            }
            r <<= 1;
        }
        if (d == n) {  // backtrack one step at a time
            d = 1;
            while (d == 1) {
                ys = f(ys);
                d = std::gcd(x > ys ? x - ys : ys - x, n);
            }
        }
        if (d != n) return d;
        // cycle degenerate for this c; try the next increment
    }
}

// Pollard rho for >= 2^64 values (rarely needed; plain floyd with mpz).
u128 pollard_mpz(u128 n) {
    mpz_class N = mpz_from_u128(n);
    for (unsigned long c = 1;; ++c) {
        mpz_class x = 2, y = 2, d = 1, diff;
        while (d == 1) {
            x = (x * x + c) % N;
            y = (y * y + c) % N;
            y = (y * y + c) % N;
            diff = x > y ? x - y : y - x;
            if (diff == 0) break;  // degenerate cycle, next c
            mpz_gcd(d.get_mpz_t(), diff.get_mpz_t(), N.get_mpz_t());
        }
        if (d != 1 && d != N) return u128_from_mpz(d);
    }
}

void factor_rec(u128 n, std::vector<u128>& out) {
    if (n == 1) return;
    if (is_prime_u128(n)) {
        out.push_back(n);
        return;
    }
    // rho degenerates on perfect powers p^k with large p; peel those first
    {
        mpz_class N = mpz_from_u128(n);
        if (mpz_perfect_power_p(N.get_mpz_t())) {
            for (int k = 2; k <= 127; ++k) {
                mpz_class r;
                if (mpz_root(r.get_mpz_t(), N.get_mpz_t(), k)) {
                    std::vector<u128> base;
                    factor_rec(u128_from_mpz(r), base);
                    for (int i = 0; i < k; ++i) out.insert(out.end(), base.begin(), base.end());
                    return;
                }
            }
        }
    }
    u128 d;
    if (n < (static_cast<u128>(1) << 64)) {
        d = pollard_brent_u64(static_cast<u64>(n));
    } else {
        d = pollard_mpz(n);
    }
    factor_rec(d, out);
    factor_rec(n / d, out);
}

}  // namespace

Factorization factor(i128 n) {
    if (n == 0) throw contract_error("factor: argument must be nonzero");
    u128 v = n < 0 ? static_cast<u128>(-(n + 1)) + 1 : static_cast<u128>(n);
    if (v >= (static_cast<u128>(1) << 126))
        throw contract_error("factor: |n| >= 2^126 is outside the supported range");

    Factorization f;
    f.n = v;
    std::vector<u128> primes;
    for (u32 p : small_primes()) {
        if (static_cast<u128>(p) * p > v) break;
        while (v % p == 0) {
            primes.push_back(p);
            v /= p;
        }
    }
    if (v > 1) {
        if (v < 1000u * 1000u) {
            primes.push_back(v);  // below the trial bound squared => prime
        } else {
            factor_rec(v, primes);
        }
    }
    std::sort(primes.begin(), primes.end());
    for (u128 p : primes) {
        if (!f.factors.empty() && f.factors.back().first == p)
            ++f.factors.back().second;
        else
            f.factors.push_back({p, 1});
    }
    return f;
}

// ---------------------------------------------------------------------------
// Arithmetic functions
// ---------------------------------------------------------------------------

static Factorization factor_pos_u64(u64 n, const char* who) {
    if (n < 1) throw contract_error(std::string(who) + ": argument must be >= 1");
    return factor(static_cast<i128>(n));
}

int mobius(u64 n) {
    Factorization f = factor_pos_u64(n, "mobius");
    for (auto& [p, e] : f.factors)
        if (e > 1) return 0;
    return (f.factors.size() % 2 == 0) ? 1 : -1;
}

u64 euler_phi(u64 n) {
    Factorization f = factor_pos_u64(n, "euler_phi");
    u64 r = n;
    for (auto& [p, e] : f.factors) {
        u64 q = static_cast<u64>(p);
        r = r / q * (q - 1);
    }
    return r;
}

int omega(u64 n) { return factor_pos_u64(n, "omega").omega(); }

u64 tau(u64 n) {
    Factorization f = factor_pos_u64(n, "tau");
    u64 r = 1;
    for (auto& [p, e] : f.factors) r *= static_cast<u64>(e + 1);
    return r;
}

std::vector<u64> divisors(u64 n) {
    Factorization f = factor_pos_u64(n, "divisors");
    std::vector<u64> ds{1};
    for (auto& [p, e] : f.factors) {
        u64 q = static_cast<u64>(p);
        size_t sz = ds.size();
        u64 pk = 1;
        for (int i = 1; i <= e; ++i) {
            pk *= q;
            for (size_t j = 0; j < sz; ++j) ds.push_back(ds[j] * pk);
        }
    }
    std::sort(ds.begin(), ds.end());
    return ds;
}

// ---------------------------------------------------------------------------
// Symbols
// ---------------------------------------------------------------------------

int jacobi(i128 a, u64 n) {
    if (n == 0 || n % 2 == 0) throw contract_error("jacobi: modulus must be odd and positive");
    i128 r = a % static_cast<i128>(n);
    if (r < 0) r += n;
    u64 aa = static_cast<u64>(r);
    u64 nn = n;
    int t = 1;
    while (aa != 0) {
        int z = std::countr_zero(aa);
        aa >>= z;
        if ((z & 1) && (nn % 8 == 3 || nn % 8 == 5)) t = -t;
        if ((aa % 4 == 3) && (nn % 4 == 3)) t = -t;
        std::swap(aa, nn);
        aa %= nn;
    }
    return nn == 1 ? t : 0;
}

int legendre_symbol(i128 a, u64 p) {
    if (p == 2 || !is_prime_u64(p))
        throw contract_error("legendre_symbol: p must be an odd prime");
    return jacobi(a, p);
}

// ---------------------------------------------------------------------------
// Squarefree part, d-part, valuation
// ---------------------------------------------------------------------------

i128 squarefree_part(i128 n) {
    Factorization f = factor(n);  // validates n != 0 and the range
    i128 s = 1;
    for (auto& [p, e] : f.factors)
        if (e & 1) s *= static_cast<i128>(p);
    return n < 0 ? -s : s;
}

u64 d_part(u64 h, u64 d) {
    if (h < 1 || d < 1) throw contract_error("d_part: arguments must be >= 1");
    u64 r = 1;
    u64 g = std::gcd(h, d);
    while (g > 1) {
        r *= g;
        h /= g;
        g = std::gcd(h, g);
    }
    return r;
}

int valuation(u64 n, u64 q) {
    if (n < 1) throw contract_error("valuation: n must be >= 1");
    if (!is_prime_u64(q)) throw contract_error("valuation: q must be prime");
    int e = 0;
    while (n % q == 0) {
        n /= q;
        ++e;
    }
    return e;
}

// ---------------------------------------------------------------------------
// Logarithmic integral
// ---------------------------------------------------------------------------

static double li_series(double x) {
    // li(x) = gamma + log log x + sum_{k>=1} (log x)^k / (k * k!)
    // positive-term series, plain double gives ~1e-15 relative accuracy
    constexpr double euler_gamma = 0.5772156649015328606065120900824024;
    double L = std::log(x);
    double sum = 0.0, term = 1.0;  // term == L^k / k!
    for (int k = 1; k < 500; ++k) {
        term *= L / k;
        double add = term / k;
        sum += add;
        if (k > L && add < 1e-18 * (sum + 1.0)) break;
    }
    return euler_gamma + std::log(L) + sum;
}

double li(double x) {
    if (!(x >= 2.0)) throw contract_error("li: domain is x >= 2");
    if (x == 2.0) return 0.0;
    return li_series(x) - li_series(2.0);
}

// ---------------------------------------------------------------------------
// Supernatural divisors
// ---------------------------------------------------------------------------

std::vector<u64> smooth_divisors(u64 d, u64 bound) {
    if (d < 1 || bound < 1) throw contract_error("smooth_divisors: arguments must be >= 1");
    std::vector<u64> ps;
    for (auto& [p, e] : factor(static_cast<i128>(d)).factors) ps.push_back(static_cast<u64>(p));
    std::vector<u64> out;
    // DFS over exponent vectors; extending only by primes of index >= the
    // last one used generates every smooth value exactly once
    std::vector<std::pair<u64, size_t>> stack{{1, 0}};
    while (!stack.empty()) {
        auto [v, i] = stack.back();
        stack.pop_back();
        out.push_back(v);
        for (size_t j = i; j < ps.size(); ++j) {
            if (v <= bound / ps[j]) stack.push_back({v * ps[j], j});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace lucasrank
