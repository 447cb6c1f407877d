#pragma once
// census.hpp -- parallel, resumable prime censuses over the Lucas prime
// universe {p <= x : p does not divide 2*a2*Delta}, plus the exact finite-x
// verification identities that tie the census back to the density theory:
//
//   count_R(d; x)            #{universe p <= x : d | rho_U(p)}
//   count_pi_Und(n, d; x)    #{universe p <= x : p == (Delta/p) (mod n), d | iota_U(p)}
//   verify_mobius_identity   R_U(d;x) == sum_{v | d^inf, dv <= x+1} sum_{a|d} mu(a) pi_{U,dv,av}(x)
//   verify_inner_sum         mu-sum over a | d  ==  direct count from full rank records
//
// The v-sum truncation at dv <= x+1 is lossless: p == (Delta/p) (mod dv) with
// p <= x forces dv <= p + 1.  Both identity checks are exact integer
// comparisons -- no tolerances.
//
// Concurrency: count_R is data-parallel over disjoint segments; per-segment
// results are merged by commutative integer addition in segment order, so the
// output is identical for any worker count or segment size.  Checkpoints are
// written by a single coordinator at segment granularity (atomic tmp+rename)
// and carry a config digest; resuming against a mismatched digest is refused.

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

#include "lucasrank/arith.hpp"
#include "lucasrank/lucas.hpp"

namespace lucasrank {

// Largest supported census bound: keeps m = p +- 1 arithmetic and rho
// factorizations comfortably inside 128-bit intermediates.
inline constexpr u64 kCensusMaxX = u64(1) << 50;

struct CensusConfig {
    LucasParams params;                   // from validate()/validate_for_rank()
    u64 d = 1;                            // count primes with d | rho_U(p)
    u64 x = 0;                            // census bound, 100 <= x <= 2^50
    u64 segment_size = u64(1) << 22;      // >= 2
    unsigned workers = 1;                 // >= 1
    std::string checkpoint_path;          // empty: no checkpointing
    bool resume = false;                  // require and load an existing checkpoint
    u64 audit_interval = 1024;            // sample ~1 in N universe primes (0 = audit off)
    u64 audit_seed = 0;                   // perturbs which primes get audited
    u64 max_segments = 0;                 // stop after N segments this run (0 = run to the
                                          // end); kill/resume testing hook
};

struct CensusReport {
    LucasParams params;                   // echoed, including the excluded primes
    u64 d = 1;
    u64 x = 0;
    u64 count_R = 0;                      // primes counted (<= pi_x)
    u64 pi_x = 0;                         // universe primes processed
    double li_x = 0.0;                    // Li(x)
    double empirical_li = 0.0;            // count_R / Li(x)
    double empirical_pi = 0.0;            // count_R / pi_x
    std::optional<mpq_class> delta_predicted;  // delta_U(d); absent when the density
                                               // theorem's hypotheses do not hold
    double abs_error = 0.0;               // |empirical_pi - delta_predicted| (0 when absent)
    double runtime_seconds = 0.0;
    u64 segments = 0;                     // segments covering [2, x]
    u64 segments_done = 0;                // watermark reached (== segments when complete)
    u64 audited = 0;                      // primes double-checked by the sampling audit
    bool complete = true;                 // false when max_segments stopped the run early
};

// On-disk resume state.  Counters cover exactly the segments [0, segments_done).
struct Checkpoint {
    u64 format_version = 1;
    u64 digest = 0;                       // census_config_digest of the owning run
    u64 segments_done = 0;
    u64 count_R = 0;
    u64 pi_x = 0;
    u64 audited = 0;
};

// FNV-1a digest of the run-defining fields (sequence, d, x, segment_size,
// audit settings).  Deliberately excludes workers, checkpoint_path and
// max_segments: those may change between a kill and a resume.
u64 census_config_digest(const CensusConfig& cfg);

// Text checkpoint I/O.  read throws checkpoint_error on a missing, corrupt or
// wrong-version file; write is atomic (tmp file + rename).
Checkpoint read_checkpoint(const std::string& path);
void write_checkpoint(const std::string& path, const Checkpoint& ck);

// Ascending primes in [lo, hi) by segmented Eratosthenes (base primes are
// cached process-wide).  Contract: 2 <= lo < hi <= 2^50.
std::vector<u64> sieve_segment(u64 lo, u64 hi);

// The census: count universe primes p <= x with d | rho_U(p), using the
// divides_rank fast path plus a deterministic 1-in-audit_interval full-rank
// audit.  Deterministic for any workers/segment_size; resumable through
// checkpoint_path.  Throws checkpoint_error on digest mismatch and
// contract_error on an audit disagreement (which would mean a library bug).
CensusReport count_R(const CensusConfig& cfg);

// pi_{U,n,d}(x): universe primes p <= x with p == (Delta/p) (mod n) and
// d | iota_U(p).  Congruence first (cheap), then one term_mod call.
// Contract: d >= 1, d | n, 2 <= x <= 2^50.
u64 count_pi_Und(const LucasParams& P, u64 n, u64 d, u64 x);

// Outcome of an exact integer identity check.  lhs is the definitional count,
// rhs the Mobius-sum side; exact <=> lhs == rhs.
struct IdentityVerdict {
    bool exact = false;
    u64 lhs = 0;
    long long rhs = 0;                    // signed during accumulation
    u64 terms = 0;                        // Mobius-sum terms evaluated
    std::string details;                  // empty when exact
};

// R_U(d;x) == sum_{v | d^inf, dv <= x+1} sum_{a | d} mu(a) pi_{U,dv,av}(x).
IdentityVerdict verify_mobius_identity(const LucasParams& P, u64 d, u64 x);

// sum_{a | d} mu(a) pi_{U,dv,av}(x) == #{universe p <= x : p == (Delta/p)
// (mod dv), v | iota, (iota/v, d) = 1}, the direct side computed from full
// rank records.  Contract: v | d^inf, d*v <= 2^50.
IdentityVerdict verify_inner_sum(const LucasParams& P, u64 d, u64 v, u64 x);

// All v <= bound with v | d^inf, ascending.  Contract: d >= 1, bound >= 1.
std::vector<u64> enumerate_supernatural_divisors(u64 d, u64 bound);

// One row per requested checkpoint of a single census pass.
struct ConvergenceRow {
    u64 x = 0;
    u64 count = 0;                        // R_U(d; x)
    u64 pi_x = 0;                         // universe primes <= x
    double li_x = 0.0;
    double ratio_li = 0.0;                // count / Li(x)
    double ratio_pi = 0.0;                // count / pi_x
    std::optional<mpq_class> delta_predicted;
    double error = 0.0;                   // ratio_pi - delta (signed; 0 when delta absent)
};

// Single sequential pass up to max(checkpoints), emitting cumulative counters
// at each checkpoint.  Contract: checkpoints nonempty, strictly ascending,
// each in [100, 2^50].
std::vector<ConvergenceRow> convergence_report(const LucasParams& P, u64 d,
                                               const std::vector<u64>& checkpoints);

}  // namespace lucasrank
