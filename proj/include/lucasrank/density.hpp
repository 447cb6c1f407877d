#pragma once
// density.hpp -- exact rational evaluation of the limiting density
//
//   delta_U(d) = (1/d) * (1/(d^inf, h) + eta_U(d)) * prod_{p|d} (1 - p^-2)^-1
//
// together with the per-level densities delta_{U,n,d}, the closed form
// S_{d,e,h}, its truncated double-sum form, and the series residual that
// ties them together.  Everything returned is an exact mpq_class; no
// floating point appears in any result.
//
// Sign conventions: Delta0 is signed; gcd/lcm and the bracket [.,.] are
// evaluated on absolute values; congruences mod 4 use nonnegative
// remainders (so Delta0 = -7 and -3 are = 1 mod 4).  "Delta0 | d^inf"
// means every prime of |Delta0| divides d.

#include <string>

#include <gmpxx.h>

#include "lucasrank/arith.hpp"
#include "lucasrank/errors.hpp"
#include "lucasrank/lucas.hpp"

namespace lucasrank {

enum class EtaBranch { eta_zero, eta_nonzero };

struct DensityReport {
    u64 d = 1;
    u64 h = 1;
    u64 d_inf_h = 1;       // (d^inf, h)
    mpq_class eta;         // eta_U(d), exact
    mpq_class delta;       // delta_U(d), exact, in (0, 1]
    EtaBranch branch = EtaBranch::eta_zero;
    std::string condition;  // the condition that selected the branch
};

// Exact delta_U(d).  Contract: P from strict validate() (P.h >= 1).
// Hypothesis errors: "square discriminant" (square-Delta params),
// "d even", "3 divides d" (when Delta0 = -3).
DensityReport delta_U(const LucasParams& P, u64 d);

// Exact delta_{U,n,d} = (1 or 2) * (d,h) / (phi(n) * d), the branch factor
// being 2 iff Delta < 0, Delta0 = 1 (mod 4) and Delta0 | n.
// Contract: P strict, d | n; hypothesis errors: "n even", "3 divides n"
// (when Delta0 = -3).
mpq_class delta_Und(const LucasParams& P, u64 n, u64 d);

// Closed form S_{d,e,h} = (d^inf,h) / (d * [(d^inf,h), e]^2) * prod_{p|d}
// (1 - p^-2)^-1.  Contract: d, h >= 1 and e | d^inf.
mpq_class s_closed(u64 d, u64 e, u64 h);

// Truncation of the defining double sum
//   S_{d,e,h} = sum_{v | d^inf, e | v} sum_{a | d} mu(a) (av,h)/(phi(dv) a v)
// to v <= vmax.  Contract: as s_closed, vmax >= e.
mpq_class s_truncated(u64 d, u64 e, u64 h, u64 vmax);

// delta_U(d) minus its telescoping series
//   sum_{v | d^inf, v <= vmax} sum_{a | d} mu(a) delta_{U,dv,av}
// -- an exact rational that tends to 0 as vmax grows.
mpq_class series_residual(const LucasParams& P, u64 d, u64 vmax);

}  // namespace lucasrank
