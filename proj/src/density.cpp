// density.cpp -- see density.hpp for contracts.

#include "lucasrank/density.hpp"

#include <numeric>

namespace lucasrank {

namespace {

void require_strict(const LucasParams& P, const char* who) {
    if (P.delta_square)
        throw hypothesis_error("square discriminant",
                               std::string(who) +
                                   ": density theory needs a non-square discriminant");
    if (P.h == 0)
        throw contract_error(std::string(who) +
                             ": params carry no exponent h (construct via validate())");
}

u128 abs_u128(i128 v) { return v < 0 ? static_cast<u128>(-(v + 1)) + 1 : static_cast<u128>(v); }

// nonnegative remainder of delta0 mod 4
int mod4(i128 v) {
    int r = static_cast<int>(v % 4);
    return r < 0 ? r + 4 : r;
}

// every prime of |Delta0| divides d  (Delta0 squarefree, so this is
// exactly "Delta0 | d^inf")
bool delta0_divides_dinf(i128 delta0, u64 d) {
    u128 D = abs_u128(delta0);
    u128 g = std::gcd(D, static_cast<u128>(d));
    while (g > 1) {
        while (D % g == 0) D /= g;
        g = std::gcd(D, static_cast<u128>(d));
    }
    return D == 1;
}

// prod_{p | d} (1 - p^-2)^-1 = prod p^2/(p^2 - 1), exact
mpq_class sato_factor(u64 d) {
    mpq_class prod(1);
    for (const auto& pe : factor(d).factors) {
        u64 p = static_cast<u64>(pe.first);
        prod *= mpq_class(mpz_class(p) * mpz_class(p),
                          mpz_class(p) * mpz_class(p) - 1);
    }
    prod.canonicalize();
    return prod;
}

}  // namespace

DensityReport delta_U(const LucasParams& P, u64 d) {
    require_strict(P, "delta_U");
    if (d == 0) throw contract_error("delta_U: d must be positive");
    if (d % 2 == 0)
        throw hypothesis_error("d even", "the density theorem requires d odd");
    if (P.delta0 == -3 && d % 3 == 0)
        throw hypothesis_error("3 divides d",
                               "the density theorem requires 3 to not divide d when "
                               "Delta0 = -3");

    DensityReport R;
    R.d = d;
    R.h = P.h;
    R.d_inf_h = d_part(P.h, d);

    if (P.delta > 0) {
        R.branch = EtaBranch::eta_zero;
        R.condition = "Delta > 0";
    } else if (mod4(P.delta0) != 1) {
        R.branch = EtaBranch::eta_zero;
        R.condition = "Delta0 != 1 (mod 4)";
    } else if (!delta0_divides_dinf(P.delta0, d)) {
        R.branch = EtaBranch::eta_zero;
        R.condition = "Delta0 does not divide d^inf";
    } else {
        R.branch = EtaBranch::eta_nonzero;
        R.condition = "Delta < 0, Delta0 = 1 (mod 4), Delta0 | d^inf";
    }

    if (R.branch == EtaBranch::eta_zero) {
        R.eta = 0;
    } else {
        // eta = (d^inf,h) / [(d^inf,h), |Delta0|/(d,|Delta0|)]^2
        u128 D = abs_u128(P.delta0);
        u128 ratio = D / std::gcd(static_cast<u128>(d), D);
        u128 g = static_cast<u128>(R.d_inf_h);
        u128 l = g / std::gcd(g, ratio) * ratio;  // lcm, no overflow: ratio = 1 here
        mpz_class L(to_string_u128(l));
        R.eta = mpq_class(mpz_class(static_cast<unsigned long>(R.d_inf_h)), L * L);
        R.eta.canonicalize();
    }

    mpq_class inner = mpq_class(1, static_cast<unsigned long>(R.d_inf_h)) + R.eta;
    R.delta = inner * sato_factor(d) / mpq_class(static_cast<unsigned long>(d));
    R.delta.canonicalize();
    if (!(R.delta > 0 && R.delta <= 1))
        throw contract_error("delta_U: computed density outside (0,1]");
    return R;
}

mpq_class delta_Und(const LucasParams& P, u64 n, u64 d) {
    require_strict(P, "delta_Und");
    if (d == 0 || n == 0 || n % d != 0)
        throw contract_error("delta_Und: d must divide n");
    if (n % 2 == 0)
        throw hypothesis_error("n even", "delta_{U,n,d} requires n odd");
    if (P.delta0 == -3 && n % 3 == 0)
        throw hypothesis_error("3 divides n",
                               "delta_{U,n,d} requires 3 to not divide n when "
                               "Delta0 = -3");

    int two = 1;
    if (P.delta < 0 && mod4(P.delta0) == 1) {
        u128 D = abs_u128(P.delta0);
        if (D <= n && n % static_cast<u64>(D) == 0) two = 2;
    }
    u64 g = std::gcd(d, P.h);
    mpq_class r(mpz_class(static_cast<unsigned long>(two)) * static_cast<unsigned long>(g),
                mpz_class(static_cast<unsigned long>(euler_phi(n))) *
                    static_cast<unsigned long>(d));
    r.canonicalize();
    return r;
}

mpq_class s_closed(u64 d, u64 e, u64 h) {
    if (d == 0 || h == 0 || e == 0)
        throw contract_error("s_closed: d, e, h must be positive");
    if (d_part(e, d) != e)
        throw contract_error("s_closed: e must divide d^inf");
    u64 g = d_part(h, d);
    u64 l = g / std::gcd(g, e) * e;  // [(d^inf,h), e]
    mpq_class r(mpz_class(static_cast<unsigned long>(g)),
                mpz_class(static_cast<unsigned long>(d)) *
                    mpz_class(static_cast<unsigned long>(l)) *
                    mpz_class(static_cast<unsigned long>(l)));
    r.canonicalize();
    return r * sato_factor(d);
}

mpq_class s_truncated(u64 d, u64 e, u64 h, u64 vmax) {
    if (d == 0 || h == 0 || e == 0)
        throw contract_error("s_truncated: d, e, h must be positive");
    if (d_part(e, d) != e)
        throw contract_error("s_truncated: e must divide d^inf");
    if (vmax < e) throw contract_error("s_truncated: vmax must be >= e");

    std::vector<u64> as = divisors(d);
    mpq_class acc(0);
    for (u64 v : smooth_divisors(d, vmax)) {
        if (v % e != 0) continue;
        for (u64 a : as) {
            int mu = mobius(a);
            if (mu == 0) continue;
            mpz_class num(static_cast<unsigned long>(std::gcd(a * v, h)));
            mpz_class den = mpz_class(static_cast<unsigned long>(euler_phi(d * v))) *
                            static_cast<unsigned long>(a) *
                            static_cast<unsigned long>(v);
            mpq_class term(mu > 0 ? num : -num, den);
            term.canonicalize();
            acc += term;
        }
    }
    acc.canonicalize();
    return acc;
}

mpq_class series_residual(const LucasParams& P, u64 d, u64 vmax) {
    DensityReport R = delta_U(P, d);  // re-checks all hypotheses
    std::vector<u64> as = divisors(d);
    mpq_class acc(0);
    for (u64 v : smooth_divisors(d, vmax)) {
        for (u64 a : as) {
            int mu = mobius(a);
            if (mu == 0) continue;
            mpq_class t = delta_Und(P, d * v, a * v);
            acc += mu > 0 ? t : -t;
        }
    }
    mpq_class r = R.delta - acc;
    r.canonicalize();
    return r;
}

}  // namespace lucasrank
