// test_census.cpp -- unit tests for the segmented sieve, the parallel
// resumable census, and the exact finite-x verification identities.
//
// Independent oracles: (a) trial-division / linear-scan recomputation of
// every frozen count; (b) the exact Mobius identity itself, which ties
// count_R, count_pi_Und, divides_rank and divides_index together; (c)
// determinism across worker counts, segment sizes and kill/resume.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "lucasrank/census.hpp"
#include "lucasrank/density.hpp"
#include "lucasrank/lucas.hpp"

using namespace lucasrank;

namespace {

// Ascending primes <= n by plain trial division -- independent of the
// library's sieve.
std::vector<u64> primes_below_oracle(u64 n) {
    std::vector<u64> out;
    for (u64 c = 2; c <= n; ++c) {
        bool prime = true;
        for (u64 q = 2; q * q <= c; ++q)
            if (c % q == 0) {
                prime = false;
                break;
            }
        if (prime) out.push_back(c);
    }
    return out;
}

// Rank by linear scan of U_n mod p -- independent of rank()'s order descent.
u64 rank_scan_oracle(i64 a1, i64 a2, u64 p) {
    const i64 sp = static_cast<i64>(p);
    const u64 A1 = static_cast<u64>(((a1 % sp) + sp) % sp);
    const u64 A2 = static_cast<u64>(((a2 % sp) + sp) % sp);
    u64 u_prev = 0, u = 1 % p;
    for (u64 n = 1; n <= 2 * p + 2; ++n) {
        if (u == 0) return n;
        const u64 nx = (mulmod(A1, u, p) + mulmod(A2, u_prev, p)) % p;
        u_prev = u;
        u = nx;
    }
    return 0;  // no rank found: caller will fail the test
}

// Census count by the definition, all parts recomputed from scratch.
u64 count_R_oracle(const LucasParams& P, u64 d, u64 x) {
    u64 count = 0;
    for (u64 p : primes_below_oracle(x)) {
        if (is_excluded(P, p)) continue;
        const u64 rho = rank_scan_oracle(P.a1, P.a2, p);
        REQUIRE(rho != 0);
        if (rho % d == 0) ++count;
    }
    return count;
}

std::string temp_path(const std::string& tag) {
    return (std::filesystem::temp_directory_path() /
            ("lucasrank-test-" + tag + "-" + std::to_string(::getpid()) + ".ck"))
        .string();
}

struct PathGuard {
    std::string path;
    explicit PathGuard(std::string p) : path(std::move(p)) {}
    ~PathGuard() {
        std::error_code ec;
        std::filesystem::remove(path, ec);
        std::filesystem::remove(path + ".tmp", ec);
    }
};

}  // namespace

// ---------------------------------------------------------------------------
// sieve_segment
// ---------------------------------------------------------------------------

TEST_CASE("sieve_segment: pins and trial-division oracle") {
    CHECK(sieve_segment(2, 30) ==
          std::vector<u64>{2, 3, 5, 7, 11, 13, 17, 19, 23, 29});
    CHECK(sieve_segment(1000000, 1000100) ==
          std::vector<u64>{1000003, 1000033, 1000037, 1000039, 1000081, 1000099});
    CHECK(sieve_segment(14, 16).empty());

    // stitched odd-sized segments cover [2, 5000) exactly like trial division
    std::vector<u64> stitched;
    for (u64 lo = 2; lo < 5000; lo += 97) {
        for (u64 p : sieve_segment(lo, std::min<u64>(lo + 97, 5000))) stitched.push_back(p);
    }
    CHECK(stitched == primes_below_oracle(4999));

    CHECK_THROWS_AS(sieve_segment(1, 10), contract_error);
    CHECK_THROWS_AS(sieve_segment(10, 10), contract_error);
    CHECK_THROWS_AS(sieve_segment(30, 10), contract_error);
    CHECK_THROWS_AS(sieve_segment(2, (u64(1) << 50) + 1), contract_error);
}

// ---------------------------------------------------------------------------
// count_R
// ---------------------------------------------------------------------------

TEST_CASE("count_R: frozen counts against the from-scratch oracle") {
    struct Case {
        i64 a1, a2;
        u64 d, x, frozen;
    };
    // frozen values independently recomputed by count_R_oracle below
    const std::vector<Case> cases = {
        {1, 1, 1, 100, 23},     // pi(100) - #{2,5} = 25 - 2
        {1, 1, 3, 1000, 60},    {1, 1, 3, 10000, 463}, {4, 1, 3, 1000, 22},
        {1, -2, 7, 10000, 357}, {2, 3, 5, 1000, 35},
    };
    for (const auto& c : cases) {
        CAPTURE(c.a1);
        CAPTURE(c.a2);
        CAPTURE(c.d);
        CAPTURE(c.x);
        const LucasParams P = validate_for_rank(c.a1, c.a2);
        CensusConfig cfg;
        cfg.params = P;
        cfg.d = c.d;
        cfg.x = c.x;
        const CensusReport rep = count_R(cfg);
        CHECK(rep.count_R == c.frozen);
        CHECK(rep.count_R == count_R_oracle(P, c.d, c.x));
        CHECK(rep.count_R <= rep.pi_x);
        CHECK(rep.complete);
        CHECK(rep.segments_done == rep.segments);
        CHECK(rep.empirical_pi >= 0.0);
        CHECK(rep.empirical_pi <= 1.0);
        CHECK(rep.empirical_li >= 0.0);
        CHECK(rep.empirical_li <= 1.0);
    }
}

TEST_CASE("count_R: report fields for Fibonacci d=1, x=100") {
    CensusConfig cfg;
    cfg.params = validate(1, 1);
    cfg.d = 1;
    cfg.x = 100;
    const CensusReport rep = count_R(cfg);
    CHECK(rep.count_R == 23);
    CHECK(rep.pi_x == 23);  // every universe prime is counted for d=1
    CHECK(rep.empirical_pi == 1.0);
    REQUIRE(rep.delta_predicted.has_value());
    CHECK(*rep.delta_predicted == mpq_class(1));
    CHECK(rep.abs_error == 0.0);
    CHECK(rep.li_x == doctest::Approx(li(100.0)));
    CHECK(rep.params.excluded == std::vector<u64>{2, 5});
    CHECK(rep.runtime_seconds >= 0.0);
}

TEST_CASE("count_R: delta_predicted present exactly when the density theorem applies") {
    CensusConfig cfg;
    cfg.params = validate(1, 1);
    cfg.d = 3;
    cfg.x = 1000;
    const CensusReport strict = count_R(cfg);
    REQUIRE(strict.delta_predicted.has_value());
    CHECK(*strict.delta_predicted == mpq_class(3, 8));
    CHECK(strict.abs_error == doctest::Approx(std::fabs(60.0 / 166.0 - 0.375)));

    // square discriminant: census runs, prediction is absent
    cfg.params = validate_for_rank(2, 3);
    cfg.d = 5;
    const CensusReport square = count_R(cfg);
    CHECK(square.count_R == 35);
    CHECK_FALSE(square.delta_predicted.has_value());
    CHECK(square.abs_error == 0.0);

    // d even: density theorem does not apply, census still counts
    cfg.params = validate(1, 1);
    cfg.d = 2;
    const CensusReport even = count_R(cfg);
    CHECK_FALSE(even.delta_predicted.has_value());
    CHECK(even.count_R == count_R_oracle(cfg.params, 2, 1000));
}

TEST_CASE("count_R: deterministic across workers and segment sizes") {
    const LucasParams P = validate(1, 1);
    CensusConfig base;
    base.params = P;
    base.d = 3;
    base.x = 10000;
    const CensusReport ref = count_R(base);
    CHECK(ref.count_R == 463);

    for (unsigned workers : {1u, 2u, 8u}) {
        for (u64 seg : {u64(1) << 14, u64(1) << 22, u64(997)}) {
            CensusConfig cfg = base;
            cfg.workers = workers;
            cfg.segment_size = seg;
            const CensusReport rep = count_R(cfg);
            CAPTURE(workers);
            CAPTURE(seg);
            CHECK(rep.count_R == ref.count_R);
            CHECK(rep.pi_x == ref.pi_x);
            CHECK(rep.audited == ref.audited);
            CHECK(rep.complete);
        }
    }
}

TEST_CASE("count_R: sampling audit is deterministic and can cover every prime") {
    const LucasParams P = validate(1, -2);
    CensusConfig cfg;
    cfg.params = P;
    cfg.d = 7;
    cfg.x = 2000;

    cfg.audit_interval = 1;  // audit everything: full rank vs fast path on each prime
    const CensusReport all = count_R(cfg);
    CHECK(all.audited == all.pi_x);

    cfg.audit_interval = 0;  // audit off
    const CensusReport off = count_R(cfg);
    CHECK(off.audited == 0);
    CHECK(off.count_R == all.count_R);
    CHECK(off.pi_x == all.pi_x);

    cfg.audit_interval = 16;
    cfg.audit_seed = 42;
    const CensusReport sampled = count_R(cfg);
    CHECK(sampled.audited > 0);
    CHECK(sampled.audited < sampled.pi_x);
    CHECK(sampled.count_R == all.count_R);
    // same seed, different segmentation: identical audit population
    cfg.segment_size = 311;
    cfg.workers = 2;
    const CensusReport resampled = count_R(cfg);
    CHECK(resampled.audited == sampled.audited);
}

TEST_CASE("count_R: config contract errors") {
    CensusConfig cfg;
    cfg.params = validate(1, 1);
    cfg.d = 3;
    cfg.x = 1000;

    CensusConfig bad = cfg;
    bad.x = 99;
    CHECK_THROWS_AS(count_R(bad), contract_error);
    bad = cfg;
    bad.x = (u64(1) << 50) + 1;
    CHECK_THROWS_AS(count_R(bad), contract_error);
    bad = cfg;
    bad.segment_size = 1;
    CHECK_THROWS_AS(count_R(bad), contract_error);
    bad = cfg;
    bad.workers = 0;
    CHECK_THROWS_AS(count_R(bad), contract_error);
    bad = cfg;
    bad.d = 0;
    CHECK_THROWS_AS(count_R(bad), contract_error);
    bad = cfg;
    bad.params = LucasParams{};
    CHECK_THROWS_AS(count_R(bad), contract_error);
    bad = cfg;
    bad.resume = true;  // resume without a checkpoint path
    CHECK_THROWS_AS(count_R(bad), contract_error);
}

// ---------------------------------------------------------------------------
// checkpointing
// ---------------------------------------------------------------------------

TEST_CASE("checkpoint: write/read round-trip, corruption, digest refusal") {
    const std::string path = temp_path("roundtrip");
    PathGuard guard(path);

    const Checkpoint ck{1, 0xdeadbeefcafef00dull, 7, 123, 456, 3};
    write_checkpoint(path, ck);
    const Checkpoint back = read_checkpoint(path);
    CHECK(back.format_version == ck.format_version);
    CHECK(back.digest == ck.digest);
    CHECK(back.segments_done == ck.segments_done);
    CHECK(back.count_R == ck.count_R);
    CHECK(back.pi_x == ck.pi_x);
    CHECK(back.audited == ck.audited);

    CHECK_THROWS_AS(read_checkpoint(path + ".does-not-exist"), checkpoint_error);

    {
        std::ofstream out(path, std::ios::trunc);
        out << "something else entirely\n";
    }
    CHECK_THROWS_AS(read_checkpoint(path), checkpoint_error);

    {
        std::ofstream out(path, std::ios::trunc);
        out << "lucasrank-census-checkpoint\nversion 1\ndigest 00ff\n";  // truncated
    }
    CHECK_THROWS_AS(read_checkpoint(path), checkpoint_error);

    {
        std::ofstream out(path, std::ios::trunc);
        out << "lucasrank-census-checkpoint\nversion 2\ndigest 00ff\nsegments_done 0\n"
            << "count_R 0\npi_x 0\naudited 0\n";  // unsupported version
    }
    CHECK_THROWS_AS(read_checkpoint(path), checkpoint_error);
}

TEST_CASE("checkpoint: digest covers the run-defining fields only") {
    CensusConfig a;
    a.params = validate(1, 1);
    a.d = 3;
    a.x = 10000;
    CensusConfig b = a;
    CHECK(census_config_digest(a) == census_config_digest(b));

    b.workers = 8;  // excluded from the digest: may change across a resume
    b.max_segments = 2;
    b.checkpoint_path = "elsewhere";
    b.resume = true;
    CHECK(census_config_digest(a) == census_config_digest(b));

    b = a;
    b.d = 5;
    CHECK(census_config_digest(a) != census_config_digest(b));
    b = a;
    b.x = 20000;
    CHECK(census_config_digest(a) != census_config_digest(b));
    b = a;
    b.segment_size = 4096;
    CHECK(census_config_digest(a) != census_config_digest(b));
    b = a;
    b.params = validate(3, -1);
    CHECK(census_config_digest(a) != census_config_digest(b));
    b = a;
    b.audit_seed = 1;
    CHECK(census_config_digest(a) != census_config_digest(b));
}

TEST_CASE("checkpoint: kill/resume reproduces the uninterrupted run") {
    const LucasParams P = validate(1, 1);
    CensusConfig base;
    base.params = P;
    base.d = 3;
    base.x = 10000;
    base.segment_size = 997;  // 11 segments, awkward boundaries on purpose
    const CensusReport full = count_R(base);

    const std::string path = temp_path("resume");
    PathGuard guard(path);

    // run 1: killed after 3 segments
    CensusConfig killed = base;
    killed.checkpoint_path = path;
    killed.max_segments = 3;
    const CensusReport partial = count_R(killed);
    CHECK_FALSE(partial.complete);
    CHECK(partial.segments_done == 3);
    CHECK(partial.segments == full.segments);
    CHECK(partial.count_R <= partial.pi_x);

    const Checkpoint ck = read_checkpoint(path);
    CHECK(ck.segments_done == 3);
    CHECK(ck.count_R == partial.count_R);

    // run 2: resumed with a different worker count, runs to the end
    CensusConfig resumed = base;
    resumed.checkpoint_path = path;
    resumed.resume = true;
    resumed.workers = 2;
    const CensusReport done = count_R(resumed);
    CHECK(done.complete);
    CHECK(done.segments_done == full.segments);
    CHECK(done.count_R == full.count_R);
    CHECK(done.pi_x == full.pi_x);
    CHECK(done.audited == full.audited);

    // resuming the already-complete run is a no-op with the same totals
    const CensusReport again = count_R(resumed);
    CHECK(again.complete);
    CHECK(again.count_R == full.count_R);
    CHECK(again.pi_x == full.pi_x);

    // a mismatched config must be refused
    CensusConfig mismatched = resumed;
    mismatched.d = 5;
    CHECK_THROWS_AS(count_R(mismatched), checkpoint_error);
    CensusConfig missing = resumed;
    missing.checkpoint_path = path + ".missing";
    CHECK_THROWS_AS(count_R(missing), checkpoint_error);
}

// ---------------------------------------------------------------------------
// count_pi_Und
// ---------------------------------------------------------------------------

TEST_CASE("count_pi_Und: pins and hand enumeration") {
    const LucasParams P = validate(1, 1);
    CHECK(count_pi_Und(P, 1, 1, 100) == 23);  // all universe primes

    // n=5, d=1: primes p <= 100 with p == (5/p) (mod 5); hand enumeration
    u64 byhand = 0;
    std::vector<u64> matched;
    for (u64 p : primes_below_oracle(100)) {
        if (p == 2 || p == 5) continue;
        const i64 sign = legendre_symbol(5, p);
        const u64 target = sign > 0 ? 1 : 4;  // p == +-1 (mod 5)
        if (p % 5 == target) {
            ++byhand;
            matched.push_back(p);
        }
    }
    CHECK(byhand == 5);
    CHECK(matched == std::vector<u64>{11, 31, 41, 61, 71});
    CHECK(count_pi_Und(P, 5, 1, 100) == 5);

    CHECK(count_pi_Und(P, 103, 1, 100) == 0);  // n > x+1 is unsatisfiable
    CHECK_THROWS_AS(count_pi_Und(P, 6, 4, 100), contract_error);   // d does not divide n
    CHECK_THROWS_AS(count_pi_Und(P, 5, 1, 1), contract_error);     // x out of range
    CHECK_THROWS_AS(count_pi_Und(P, 0, 1, 100), contract_error);
}

TEST_CASE("count_pi_Und: agrees with full rank records") {
    for (auto [a1, a2] : std::vector<std::pair<i64, i64>>{{1, 1}, {4, 1}, {1, -2}, {2, 3}}) {
        const LucasParams P = validate_for_rank(a1, a2);
        for (auto [n, d] : std::vector<std::pair<u64, u64>>{
                 {1, 1}, {3, 1}, {3, 3}, {10, 5}, {12, 4}, {9, 9}, {14, 7}}) {
            u64 oracle = 0;
            for (u64 p : sieve_segment(2, 2001)) {
                if (is_excluded(P, p)) continue;
                const RankRecord rec = rank(P, p);
                if (rec.m % n == 0 && rec.iota % d == 0) ++oracle;
            }
            CAPTURE(a1);
            CAPTURE(a2);
            CAPTURE(n);
            CAPTURE(d);
            CHECK(count_pi_Und(P, n, d, 2000) == oracle);
        }
    }
}

// ---------------------------------------------------------------------------
// verify_mobius_identity / verify_inner_sum
// ---------------------------------------------------------------------------

TEST_CASE("verify_mobius_identity: exact across the sequence/d/x matrix") {
    struct Case {
        i64 a1, a2;
        u64 d, x;
    };
    const std::vector<Case> cases = {
        {1, 1, 3, 10000}, {1, 1, 15, 10000}, {4, 1, 3, 10000},
        {1, 1, 1, 1000},  {1, -2, 7, 1000},  {1, 1, 9, 1000},
    };
    for (const auto& c : cases) {
        CAPTURE(c.a1);
        CAPTURE(c.a2);
        CAPTURE(c.d);
        CAPTURE(c.x);
        const LucasParams P = validate(c.a1, c.a2);
        const IdentityVerdict v = verify_mobius_identity(P, c.d, c.x);
        CHECK(v.exact);
        CHECK(v.details.empty());
        CHECK(static_cast<long long>(v.lhs) == v.rhs);
        CHECK(v.terms >= 1);
    }
}

TEST_CASE("verify_mobius_identity: holds for a square discriminant too") {
    const LucasParams P = validate_for_rank(2, 3);
    const IdentityVerdict v = verify_mobius_identity(P, 5, 1000);
    CHECK(v.exact);
    CHECK(v.lhs == 35);
}

TEST_CASE("verify_inner_sum: exact, including the trivial collapse") {
    const LucasParams fib = validate(1, 1);
    for (u64 v : {u64(1), u64(3), u64(9)}) {
        CAPTURE(v);
        const IdentityVerdict verdict = verify_inner_sum(fib, 3, v, 1000);
        CHECK(verdict.exact);
        CHECK(static_cast<long long>(verdict.lhs) == verdict.rhs);
    }

    // d=1, v=1: the Mobius sum collapses to the universe count
    const IdentityVerdict trivial = verify_inner_sum(fib, 1, 1, 1000);
    CHECK(trivial.exact);
    CHECK(trivial.lhs == 166);  // pi(1000) - #{2,5}

    const LucasParams p41 = validate(4, 1);
    CHECK(verify_inner_sum(p41, 5, 5, 1000).exact);

    CHECK_THROWS_AS(verify_inner_sum(fib, 3, 2, 1000), contract_error);  // v !| d^inf
    CHECK_THROWS_AS(verify_inner_sum(fib, 0, 1, 1000), contract_error);
}

// ---------------------------------------------------------------------------
// enumerate_supernatural_divisors
// ---------------------------------------------------------------------------

TEST_CASE("enumerate_supernatural_divisors: pins and brute scan") {
    CHECK(enumerate_supernatural_divisors(6, 20) ==
          std::vector<u64>{1, 2, 3, 4, 6, 8, 9, 12, 16, 18});
    CHECK(enumerate_supernatural_divisors(1, 1000) == std::vector<u64>{1});
    CHECK(enumerate_supernatural_divisors(3, 243).size() == 6);  // 1,3,9,27,81,243

    // brute scan oracle for d=12, bound=200
    std::vector<u64> oracle;
    for (u64 v = 1; v <= 200; ++v) {
        u64 w = v;
        for (u64 q : {u64(2), u64(3)})
            while (w % q == 0) w /= q;
        if (w == 1) oracle.push_back(v);
    }
    CHECK(enumerate_supernatural_divisors(12, 200) == oracle);

    CHECK_THROWS_AS(enumerate_supernatural_divisors(0, 10), contract_error);
    CHECK_THROWS_AS(enumerate_supernatural_divisors(6, 0), contract_error);
}

// ---------------------------------------------------------------------------
// convergence_report
// ---------------------------------------------------------------------------

TEST_CASE("convergence_report: cumulative rows match standalone censuses") {
    const LucasParams P = validate(1, 1);
    const std::vector<u64> xs = {1000, 5000, 10000};
    const auto rows = convergence_report(P, 3, xs);
    REQUIRE(rows.size() == xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
        CHECK(rows[i].x == xs[i]);
        CensusConfig cfg;
        cfg.params = P;
        cfg.d = 3;
        cfg.x = xs[i];
        const CensusReport rep = count_R(cfg);
        CHECK(rows[i].count == rep.count_R);
        CHECK(rows[i].pi_x == rep.pi_x);
        REQUIRE(rows[i].delta_predicted.has_value());
        CHECK(*rows[i].delta_predicted == mpq_class(3, 8));
        CHECK(rows[i].error ==
              doctest::Approx(rows[i].ratio_pi - 0.375).epsilon(1e-12));
        CHECK(rows[i].ratio_li == doctest::Approx(rows[i].count / li(double(xs[i]))));
    }
    CHECK(rows[0].count == 60);
    CHECK(rows[2].count == 463);
}

TEST_CASE("convergence_report: d=1 ratio is exactly 1 at every checkpoint") {
    const LucasParams P = validate(1, 1);
    const auto rows = convergence_report(P, 1, {100, 1000, 10000});
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) {
        CHECK(row.count == row.pi_x);
        CHECK(row.ratio_pi == 1.0);
        CHECK(row.error == 0.0);
    }
    CHECK(rows[0].count == 23);
}

TEST_CASE("convergence_report: contract errors") {
    const LucasParams P = validate(1, 1);
    CHECK_THROWS_AS(convergence_report(P, 3, {}), contract_error);
    CHECK_THROWS_AS(convergence_report(P, 3, {1000, 1000}), contract_error);
    CHECK_THROWS_AS(convergence_report(P, 3, {1000, 100}), contract_error);
    CHECK_THROWS_AS(convergence_report(P, 3, {99}), contract_error);
    CHECK_THROWS_AS(convergence_report(P, 0, {1000}), contract_error);
    CHECK_THROWS_AS(convergence_report(LucasParams{}, 3, {1000}), contract_error);
}
