// quadfield.cpp -- see quadfield.hpp for contracts.

#include "lucasrank/quadfield.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <mpfr.h>

namespace lucasrank {

namespace {

mpz_class mpz_of_i128(i128 v) {
    bool neg = v < 0;
    u128 m = neg ? static_cast<u128>(-(v + 1)) + 1 : static_cast<u128>(v);
    mpz_class hi(static_cast<unsigned long>(m >> 64));
    mpz_class lo(static_cast<unsigned long>(m & ~0ull));
    mpz_class r = (hi << 64) + lo;
    if (neg) r = -r;
    return r;
}

i128 i128_of_mpz(const mpz_class& v) {  // contract: |v| < 2^127
    mpz_class a = abs(v);
    mpz_class hi = a >> 64;
    mpz_class lo = a - (hi << 64);
    u128 m = (static_cast<u128>(hi.get_ui()) << 64) | static_cast<u128>(lo.get_ui());
    i128 r = static_cast<i128>(m);
    return v < 0 ? -r : r;
}

double log_mpz(const mpz_class& v) {  // natural log of a positive mpz
    long e;
    double d = mpz_get_d_2exp(&e, v.get_mpz_t());
    return std::log(d) + double(e) * 0.693147180559945309417232121458;
}

// RAII mpfr_t
struct R {
    mpfr_t v;
    explicit R(mpfr_prec_t p) { mpfr_init2(v, p); }
    R(const R&) = delete;
    R& operator=(const R&) = delete;
    ~R() { mpfr_clear(v); }
    operator mpfr_ptr() { return v; }
    operator mpfr_srcptr() const { return v; }
};

}  // namespace

// ---------------------------------------------------------------------------
// QuadElem
// ---------------------------------------------------------------------------

QuadElem::QuadElem(mpz_class x, mpz_class y, mpz_class z, mpz_class delta0)
    : x_(std::move(x)), y_(std::move(y)), z_(std::move(z)), d0_(std::move(delta0)) {
    if (d0_ == 0 || d0_ == 1)
        throw contract_error("QuadElem: delta0 must be a squarefree integer != 0, 1");
    canonicalize();
}

void QuadElem::canonicalize() {
    if (z_ == 0) throw contract_error("QuadElem: zero denominator");
    if (z_ < 0) {
        x_ = -x_;
        y_ = -y_;
        z_ = -z_;
    }
    mpz_class g = gcd(gcd(x_, y_), z_);
    if (g > 1) {
        x_ /= g;
        y_ /= g;
        z_ /= g;
    }
}

QuadElem QuadElem::from_int(long v, const mpz_class& delta0) {
    return QuadElem(mpz_class(v), 0, 1, delta0);
}

QuadElem QuadElem::from_rational(const mpq_class& v, const mpz_class& delta0) {
    return QuadElem(v.get_num(), 0, v.get_den(), delta0);
}

static void same_field(const QuadElem& a, const QuadElem& b) {
    if (a.delta0() != b.delta0())
        throw contract_error("QuadElem: operands live in different quadratic fields");
}

QuadElem operator+(const QuadElem& a, const QuadElem& b) {
    same_field(a, b);
    return QuadElem(a.x_ * b.z_ + b.x_ * a.z_, a.y_ * b.z_ + b.y_ * a.z_, a.z_ * b.z_, a.d0_);
}

QuadElem operator-(const QuadElem& a, const QuadElem& b) {
    same_field(a, b);
    return QuadElem(a.x_ * b.z_ - b.x_ * a.z_, a.y_ * b.z_ - b.y_ * a.z_, a.z_ * b.z_, a.d0_);
}

QuadElem operator*(const QuadElem& a, const QuadElem& b) {
    same_field(a, b);
    return QuadElem(a.x_ * b.x_ + a.y_ * b.y_ * a.d0_, a.x_ * b.y_ + a.y_ * b.x_,
                    a.z_ * b.z_, a.d0_);
}

QuadElem QuadElem::inverse() const {
    if (is_zero()) throw contract_error("QuadElem: division by zero");
    // 1/a = z*(x - y*sqrt(d0)) / (x^2 - y^2*d0)
    return QuadElem(x_ * z_, -y_ * z_, x_ * x_ - y_ * y_ * d0_, d0_);
}

QuadElem operator/(const QuadElem& a, const QuadElem& b) {
    same_field(a, b);
    return a * b.inverse();
}

QuadElem operator-(const QuadElem& a) { return QuadElem(-a.x_, -a.y_, a.z_, a.d0_); }

QuadElem QuadElem::conjugate() const { return QuadElem(x_, -y_, z_, d0_); }

mpq_class QuadElem::norm() const {
    mpq_class n(x_ * x_ - y_ * y_ * d0_, z_ * z_);
    n.canonicalize();
    return n;
}

mpq_class QuadElem::trace() const {
    mpq_class t(2 * x_, z_);
    t.canonicalize();
    return t;
}

QuadElem QuadElem::pow(long long n) const {
    if (n < 0) return inverse().pow(-n);
    QuadElem result = from_int(1, d0_);
    QuadElem base = *this;
    unsigned long long e = static_cast<unsigned long long>(n);
    while (e) {
        if (e & 1) result = result * base;
        base = base * base;
        e >>= 1;
    }
    return result;
}

bool QuadElem::operator==(const QuadElem& o) const {
    if (d0_ == o.d0_) return x_ == o.x_ && y_ == o.y_ && z_ == o.z_;
    // rationals are field-independent
    return is_rational() && o.is_rational() && x_ == o.x_ && z_ == o.z_;
}

int QuadElem::embedding_sign(int sign_of_sqrt) const {
    if (d0_ <= 0) throw contract_error("embedding_sign: field must be real");
    // sign of x + s*y*sqrt(d0)
    mpz_class sy = sign_of_sqrt >= 0 ? y_ : mpz_class(-y_);
    if (sy == 0) return sgn(x_);
    if (x_ == 0) return sgn(sy);
    if (x_ > 0 && sy > 0) return 1;
    if (x_ < 0 && sy < 0) return -1;
    // mixed signs: compare x^2 against y^2*d0 (equality impossible, d0 nonsquare)
    int c = cmp(mpz_class(x_ * x_), mpz_class(sy * sy * d0_)) > 0 ? 1 : -1;
    return x_ > 0 ? c : -c;
}

std::string QuadElem::str() const {
    if (y_ == 0) {
        std::string s = x_.get_str();
        if (z_ != 1) s += "/" + z_.get_str();
        return s;
    }
    std::string rad = "sqrt(" + d0_.get_str() + ")";
    std::string body;
    if (x_ != 0) body = x_.get_str();
    if (y_ == 1)
        body += body.empty() ? rad : "+" + rad;
    else if (y_ == -1)
        body += "-" + rad;
    else if (y_ > 0)
        body += (body.empty() ? "" : "+") + y_.get_str() + "*" + rad;
    else
        body += y_.get_str() + "*" + rad;
    if (z_ == 1) return body;
    return "(" + body + ")/" + z_.get_str();
}

// ---------------------------------------------------------------------------
// gamma, roots of unity, height
// ---------------------------------------------------------------------------

QuadElem gamma_of(i64 a1, i64 a2) {
    if (a2 == 0)
        throw hypothesis_error("square discriminant",
                               "a2 = 0 makes Delta = a1^2 a perfect square");
    mpz_class A1(static_cast<long>(a1)), A2(static_cast<long>(a2));
    mpz_class delta = A1 * A1 + 4 * A2;
    if (delta == 0)
        throw hypothesis_error("square discriminant", "discriminant Delta = 0");
    if (mpz_perfect_square_p(delta.get_mpz_t()))
        throw hypothesis_error("square discriminant",
                               "Delta = " + delta.get_str() + " is a perfect square");
    if (mpz_sizeinbase(delta.get_mpz_t(), 2) > 125)
        throw contract_error("gamma_of: |Delta| outside the supported range");
    i128 d0i = squarefree_part(i128_of_mpz(delta));
    mpz_class D0 = mpz_of_i128(d0i);
    mpz_class t = sqrt(mpz_class(delta / D0));  // Delta = D0 * t^2, t >= 1
    return QuadElem(-(A1 * A1 + 2 * A2), -A1 * t, 2 * A2, D0);
}

bool is_root_of_unity(const QuadElem& a) {
    if (a.is_zero()) return false;
    QuadElem one = QuadElem::from_int(1, a.delta0());
    QuadElem p = a;
    if (p == one) return true;
    for (int k = 2; k <= 6; ++k) {
        p = p * a;
        if ((k == 2 || k == 3 || k == 4 || k == 6) && p == one) return true;
    }
    return false;
}

double weil_height(const QuadElem& a) {
    if (a.is_zero()) throw contract_error("weil_height: argument must be nonzero");
    if (a.is_rational()) {
        mpz_class m = std::max(mpz_class(abs(a.x())), a.z());
        return m == 1 ? 0.0 : log_mpz(m);
    }
    // primitive minimal polynomial A X^2 + B X + C
    mpz_class A = a.z() * a.z();
    mpz_class B = -2 * a.x() * a.z();
    mpz_class C = a.x() * a.x() - a.y() * a.y() * a.delta0();
    mpz_class g = gcd(gcd(A, B), C);
    A /= g;
    C /= g;
    if (a.delta0() < 0) {
        // conjugate complex roots, each of modulus sqrt(|C|/A):
        // Mahler measure = A * max(1, |C|/A) = max(A, |C|)
        mpz_class m = std::max(A, mpz_class(abs(C)));
        return 0.5 * (m == 1 ? 0.0 : log_mpz(m));
    }
    const mpfr_prec_t prec = 256;
    R s(prec), r1(prec), r2(prec), t(prec), acc(prec);
    mpfr_set_z(s, a.delta0().get_mpz_t(), MPFR_RNDN);
    mpfr_sqrt(s, s, MPFR_RNDN);
    mpfr_set_z(t, a.y().get_mpz_t(), MPFR_RNDN);
    mpfr_mul(t, t, s, MPFR_RNDN);            // y*sqrt(d0)
    mpfr_set_z(r1, a.x().get_mpz_t(), MPFR_RNDN);
    mpfr_set(r2.v, r1.v, MPFR_RNDN);
    mpfr_add(r1, r1, t, MPFR_RNDN);
    mpfr_sub(r2, r2, t, MPFR_RNDN);
    mpfr_set_z(t, a.z().get_mpz_t(), MPFR_RNDN);
    mpfr_div(r1, r1, t, MPFR_RNDN);
    mpfr_div(r2, r2, t, MPFR_RNDN);
    double m = log_mpz(A);
    for (mpfr_ptr r : {static_cast<mpfr_ptr>(r1), static_cast<mpfr_ptr>(r2)}) {
        mpfr_abs(acc, r, MPFR_RNDN);
        if (mpfr_cmp_ui(acc.v, 1) > 0) {
            mpfr_log(acc, acc, MPFR_RNDN);
            m += mpfr_get_d(acc, MPFR_RNDN);
        }
    }
    return 0.5 * m;
}

// ---------------------------------------------------------------------------
// prime_root
// ---------------------------------------------------------------------------

namespace {

// candidate delta from a reconstructed trace t and norm eps; verified exactly
std::optional<QuadElem> build_and_verify(const QuadElem& a, u64 q, const mpq_class& t,
                                         int eps) {
    const mpz_class& D = a.delta0();
    mpq_class tt = t * t - eps * 4;
    mpq_class r = tt / mpq_class(4 * D);
    if (r < 0) return std::nullopt;
    if (!mpz_perfect_square_p(r.get_num().get_mpz_t())) return std::nullopt;
    if (!mpz_perfect_square_p(r.get_den().get_mpz_t())) return std::nullopt;
    mpz_class vn = sqrt(r.get_num()), vd = sqrt(r.get_den());
    mpq_class u = t / 2;
    mpz_class Z = lcm(u.get_den(), vd);
    mpz_class X = u.get_num() * (Z / u.get_den());
    mpz_class Y = vn * (Z / vd);
    for (int s : {1, -1}) {
        QuadElem d(X, s > 0 ? Y : mpz_class(-Y), Z, D);
        if (d.pow(static_cast<long long>(q)) == a) return d;
    }
    return std::nullopt;
}

// rational approximations to t with denominator <= B lying within 2^(-prec/2);
// the true trace of a root, if it exists, is always among these (it is a
// continued-fraction convergent once the working precision separates
// denominators up to B)
std::vector<mpq_class> bounded_approximations(mpfr_srcptr t, const mpz_class& B,
                                              mpfr_prec_t prec) {
    std::vector<mpq_class> out;
    R cur(prec), diff(prec), approx(prec);
    mpfr_set(cur, t, MPFR_RNDN);
    mpz_class h0(0), h1(1), k0(1), k1(0);  // convergent recurrences (h/k)
    mpz_class ai;
    for (int step = 0; step < 20000; ++step) {
        mpfr_get_z(ai.get_mpz_t(), cur, MPFR_RNDD);  // floor
        mpz_class h2 = ai * h1 + h0;
        mpz_class k2 = ai * k1 + k0;
        if (k2 > B) break;
        mpq_class cand(h2, k2);
        cand.canonicalize();
        mpfr_set_q(approx, cand.get_mpq_t(), MPFR_RNDN);
        mpfr_sub(diff, t, approx, MPFR_RNDN);
        if (mpfr_zero_p(diff.v) || mpfr_get_exp(diff.v) <= -(prec / 2)) out.push_back(cand);
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        // remainder: cur - ai, then reciprocal
        R frac(prec);
        mpfr_sub_z(frac, cur, ai.get_mpz_t(), MPFR_RNDN);
        if (mpfr_zero_p(frac.v) || mpfr_get_exp(frac.v) < -(prec - 32)) break;  // exact hit
        mpfr_ui_div(cur, 1, frac, MPFR_RNDN);
    }
    return out;
}

}  // namespace

std::optional<QuadElem> prime_root(const QuadElem& a, u64 q) {
    if (!is_prime_u64(q)) throw contract_error("prime_root: q must be prime");
    if (a.is_zero()) throw contract_error("prime_root: argument must be nonzero");
    mpq_class N = a.norm();
    int na;
    if (N == 1)
        na = 1;
    else if (N == -1)
        na = -1;
    else
        throw contract_error("prime_root: norm must be +1 or -1, got " + N.get_str());

    if (a.is_rational()) {
        // norm a^2 = 1 forces a = 1 or a = -1
        QuadElem one = QuadElem::from_int(1, a.delta0());
        if (a == one) return one;
        if (q != 2) return -one;  // (-1)^q = -1 for odd q
        if (a.delta0() == -1) return QuadElem(0, 1, 1, a.delta0());  // i^2 = -1
        return std::nullopt;  // sqrt(-1) exists in no other quadratic field
    }

    const mpz_class& D = a.delta0();
    bool real_field = D > 0;
    if (q == 2 && na == -1) return std::nullopt;  // N(delta)^2 = +1 always
    if (real_field && q % 2 == 0) {
        // even order needs a totally positive radicand -- exact sign test
        if (a.embedding_sign(+1) < 0 || a.embedding_sign(-1) < 0) return std::nullopt;
    }

    mpz_class B = a.z() * a.z();  // denominator bound for the trace
    long need_bits = 4 * static_cast<long>(mpz_sizeinbase(B.get_mpz_t(), 2)) + 192;

    for (long digits = 128; digits <= 2048; digits *= 2) {
        mpfr_prec_t prec = static_cast<mpfr_prec_t>(digits * 3.4) + 64;
        bool decisive = prec >= need_bits;
        std::optional<QuadElem> found;

        auto consider = [&](mpfr_srcptr tnum, int eps) {
            if (found) return;
            for (const mpq_class& tq : bounded_approximations(tnum, B, prec)) {
                auto d = build_and_verify(a, q, tq, eps);
                if (d) {
                    found = d;
                    return;
                }
            }
        };

        R sD(prec), xr(prec), yr(prec), zr(prec);
        mpz_class absD = abs(D);
        mpfr_set_z(sD, absD.get_mpz_t(), MPFR_RNDN);
        mpfr_sqrt(sD, sD, MPFR_RNDN);
        mpfr_set_z(xr, a.x().get_mpz_t(), MPFR_RNDN);
        mpfr_set_z(yr, a.y().get_mpz_t(), MPFR_RNDN);
        mpfr_set_z(zr, a.z().get_mpz_t(), MPFR_RNDN);

        if (real_field) {
            R av(prec), tmp(prec);
            mpfr_mul(tmp, yr, sD, MPFR_RNDN);
            mpfr_add(av, xr, tmp, MPFR_RNDN);
            mpfr_div(av, av, zr, MPFR_RNDN);  // embedding value
            if (q == 2) {
                R sq(prec), inv(prec), t(prec);
                mpfr_sqrt(sq, av, MPFR_RNDN);
                mpfr_ui_div(inv, 1, sq, MPFR_RNDN);
                mpfr_add(t, sq, inv, MPFR_RNDN);
                consider(t, +1);
                mpfr_neg(t, t, MPFR_RNDN);
                consider(t, +1);
                mpfr_sub(t, sq, inv, MPFR_RNDN);
                consider(t, -1);
                mpfr_neg(t, t, MPFR_RNDN);
                consider(t, -1);
            } else {
                R root(prec), inv(prec), t(prec);
                mpfr_abs(root, av, MPFR_RNDN);
                mpfr_rootn_ui(root, root, static_cast<unsigned long>(q), MPFR_RNDN);
                if (mpfr_sgn(av.v) < 0) mpfr_neg(root, root, MPFR_RNDN);
                mpfr_ui_div(inv, 1, root, MPFR_RNDN);
                if (na == 1)
                    mpfr_add(t, root, inv, MPFR_RNDN);
                else
                    mpfr_sub(t, root, inv, MPFR_RNDN);
                consider(t, na);
            }
        } else {
            // unit-circle embedding: a = e^{i*phi}, candidates 2*cos((phi+2*pi*j)/q)
            R im(prec), phi(prec), twopi(prec);
            mpfr_mul(im, yr, sD, MPFR_RNDN);
            mpfr_atan2(phi, im, xr, MPFR_RNDN);
            mpfr_const_pi(twopi, MPFR_RNDN);
            mpfr_mul_ui(twopi, twopi, 2, MPFR_RNDN);
            for (u64 j = 0; j < q && !found; ++j) {
                R th(prec), t(prec);
                mpfr_mul_ui(th, twopi, static_cast<unsigned long>(j), MPFR_RNDN);
                mpfr_add(th, th, phi, MPFR_RNDN);
                mpfr_div_ui(th, th, static_cast<unsigned long>(q), MPFR_RNDN);
                mpfr_cos(t, th, MPFR_RNDN);
                mpfr_mul_ui(t, t, 2, MPFR_RNDN);
                consider(t, +1);
            }
        }

        if (found) return found;
        if (decisive) return std::nullopt;
    }
    throw undecided_error("prime_root: reconstruction inconclusive at maximum precision");
}

// ---------------------------------------------------------------------------
// compute_h
// ---------------------------------------------------------------------------

static u64 next_prime_above(u64 n) {
    for (u64 k = n + 1;; ++k)
        if (is_prime_u64(k)) return k;
}

HResult compute_h(const QuadElem& gamma) {
    mpq_class N = gamma.norm();
    if (!(N == 1 || N == -1))
        throw contract_error("compute_h: norm(gamma) must be +1 or -1");
    if (is_root_of_unity(gamma))
        throw contract_error("compute_h: gamma must not be a root of unity");

    // Lehmer-type floor: every non-torsion quadratic number has height
    // >= (log phi)/2 = 0.240605...; 0.2406 keeps the bound an over-estimate.
    const double lehmer_floor = 0.2406;
    const double H = weil_height(gamma);

    u64 h = 1;
    QuadElem g0 = gamma;
    bool progress = true;
    while (progress) {
        progress = false;
        double bound = H / (double(h) * lehmer_floor) * (1.0 + 1e-9);
        if (bound < 2.0) break;
        for (u64 q = 2; q <= static_cast<u64>(bound); q = next_prime_above(q)) {
            auto r = prime_root(g0, q);
            if (r) {
                g0 = *r;
                h *= q;
                progress = true;
                break;  // restart the prime scan with the reduced element
            }
        }
    }
    return {h, g0};
}

}  // namespace lucasrank
