// census.cpp -- segmented sieving, the parallel resumable census, and the
// exact finite-x verification identities.

#include "lucasrank/census.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "lucasrank/density.hpp"

namespace lucasrank {

namespace {

constexpr u64 kWorkSegment = u64(1) << 22;  // internal step for sequential passes

u64 isqrt_u64(u64 n) {
    u64 r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && r > n / r) --r;
    while ((r + 1) <= n / (r + 1)) ++r;
    return r;
}

// Base primes for the segmented sieve, grown on demand and shared
// process-wide.  Snapshots are immutable, so readers never see a vector
// being reallocated under them.
std::shared_ptr<const std::vector<u32>> base_primes_at_least(u64 need) {
    static std::mutex mu;
    static std::shared_ptr<const std::vector<u32>> cache =
        std::make_shared<const std::vector<u32>>();
    static u64 cache_limit = 1;

    std::lock_guard<std::mutex> lock(mu);
    if (cache_limit >= need) return cache;

    u64 limit = 4096;
    while (limit < need) limit *= 2;

    std::vector<std::uint8_t> comp(limit + 1, 0);
    auto fresh = std::make_shared<std::vector<u32>>();
    for (u64 p = 2; p <= limit; ++p) {
        if (comp[p]) continue;
        fresh->push_back(static_cast<u32>(p));
        for (u64 m = p * p; m <= limit; m += p) comp[m] = 1;
    }
    cache = std::move(fresh);
    cache_limit = limit;
    return cache;
}

// splitmix64 finalizer: deterministic per-prime audit selection that is
// independent of segmentation and worker scheduling.
u64 mix64(u64 z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

bool audit_selected(u64 p, u64 seed, u64 interval) {
    return interval != 0 && mix64(p ^ seed) % interval == 0;
}

std::string hex16(u64 v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void require_config(const CensusConfig& cfg) {
    if (cfg.params.delta == 0 || cfg.params.excluded.empty())
        throw contract_error("count_R: params must come from validate()/validate_for_rank()");
    if (cfg.d < 1) throw contract_error("count_R: d must be >= 1");
    if (cfg.x < 100) throw contract_error("count_R: x must be >= 100");
    if (cfg.x > kCensusMaxX) throw contract_error("count_R: x exceeds 2^50");
    if (cfg.segment_size < 2) throw contract_error("count_R: segment_size must be >= 2");
    if (cfg.workers < 1) throw contract_error("count_R: workers must be >= 1");
}

struct SegmentResult {
    u64 count = 0;
    u64 pi = 0;
    u64 audited = 0;
    bool done = false;
};

std::optional<mpq_class> try_delta(const LucasParams& P, u64 d) {
    try {
        return delta_U(P, d).delta;
    } catch (const contract_error&) {
        return std::nullopt;  // square Delta, h unavailable, or d outside the density theorem
    }
}

}  // namespace

std::vector<u64> sieve_segment(u64 lo, u64 hi) {
    if (lo < 2 || lo >= hi || hi > kCensusMaxX)
        throw contract_error("sieve_segment: require 2 <= lo < hi <= 2^50");
    const u64 span = hi - lo;
    std::vector<std::uint8_t> comp(span, 0);
    const u64 root = isqrt_u64(hi - 1);
    auto base = base_primes_at_least(root);
    for (u32 bp : *base) {
        const u64 p = bp;
        if (p > root) break;
        u64 start = p * p;
        if (start < lo) start = ((lo + p - 1) / p) * p;
        for (u64 m = start; m < hi; m += p) comp[m - lo] = 1;
    }
    std::vector<u64> out;
    out.reserve(span / 8 + 8);
    for (u64 i = 0; i < span; ++i)
        if (!comp[i]) out.push_back(lo + i);
    return out;
}

u64 census_config_digest(const CensusConfig& cfg) {
    std::ostringstream os;
    os << "lucasrank-census|v1"
       << "|a1=" << cfg.params.a1 << "|a2=" << cfg.params.a2
       << "|d=" << cfg.d << "|x=" << cfg.x
       << "|segment=" << cfg.segment_size
       << "|audit=" << cfg.audit_interval << "|seed=" << cfg.audit_seed;
    const std::string s = os.str();
    u64 h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

void write_checkpoint(const std::string& path, const Checkpoint& ck) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw checkpoint_error("cannot open checkpoint file for writing: " + tmp);
        out << "lucasrank-census-checkpoint\n"
            << "version " << ck.format_version << "\n"
            << "digest " << hex16(ck.digest) << "\n"
            << "segments_done " << ck.segments_done << "\n"
            << "count_R " << ck.count_R << "\n"
            << "pi_x " << ck.pi_x << "\n"
            << "audited " << ck.audited << "\n";
        out.flush();
        if (!out) throw checkpoint_error("short write to checkpoint file: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw checkpoint_error("cannot rename checkpoint into place: " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw checkpoint_error("cannot open checkpoint file: " + path);
    std::string header;
    if (!std::getline(in, header) || header != "lucasrank-census-checkpoint")
        throw checkpoint_error("not a census checkpoint file: " + path);
    Checkpoint ck;
    bool saw_version = false, saw_digest = false, saw_segments = false;
    bool saw_count = false, saw_pi = false, saw_audited = false;
    std::string key;
    while (in >> key) {
        if (key == "version") {
            if (!(in >> ck.format_version)) break;
            saw_version = true;
        } else if (key == "digest") {
            std::string hex;
            if (!(in >> hex)) break;
            try {
                ck.digest = std::stoull(hex, nullptr, 16);
            } catch (const std::exception&) {
                throw checkpoint_error("corrupt digest in checkpoint file: " + path);
            }
            saw_digest = true;
        } else if (key == "segments_done") {
            if (!(in >> ck.segments_done)) break;
            saw_segments = true;
        } else if (key == "count_R") {
            if (!(in >> ck.count_R)) break;
            saw_count = true;
        } else if (key == "pi_x") {
            if (!(in >> ck.pi_x)) break;
            saw_pi = true;
        } else if (key == "audited") {
            if (!(in >> ck.audited)) break;
            saw_audited = true;
        } else {
            throw checkpoint_error("unknown field '" + key + "' in checkpoint file: " + path);
        }
    }
    if (!(saw_version && saw_digest && saw_segments && saw_count && saw_pi && saw_audited))
        throw checkpoint_error("incomplete checkpoint file: " + path);
    if (ck.format_version != 1)
        throw checkpoint_error("unsupported checkpoint format version " +
                               std::to_string(ck.format_version) + ": " + path);
    if (ck.count_R > ck.pi_x)
        throw checkpoint_error("inconsistent counters in checkpoint file: " + path);
    return ck;
}

CensusReport count_R(const CensusConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    require_config(cfg);
    const LucasParams& P = cfg.params;

    // 2^50 itself is composite, so clamping x+1 to the sieve cap loses nothing.
    const u64 hi_all = std::min(cfg.x + 1, kCensusMaxX);
    const u64 n_segments = (hi_all - 2 + cfg.segment_size - 1) / cfg.segment_size;
    const u64 digest = census_config_digest(cfg);

    u64 start_segment = 0;
    u64 total_count = 0, total_pi = 0, total_audited = 0;
    if (cfg.resume) {
        if (cfg.checkpoint_path.empty())
            throw contract_error("count_R: resume requested without a checkpoint path");
        const Checkpoint ck = read_checkpoint(cfg.checkpoint_path);
        if (ck.digest != digest)
            throw checkpoint_error("checkpoint digest mismatch (file " + hex16(ck.digest) +
                                   ", run " + hex16(digest) + "): refusing to resume");
        if (ck.segments_done > n_segments)
            throw checkpoint_error("checkpoint claims more segments than the run has");
        start_segment = ck.segments_done;
        total_count = ck.count_R;
        total_pi = ck.pi_x;
        total_audited = ck.audited;
    }

    const u64 end_segment = cfg.max_segments == 0
                                ? n_segments
                                : std::min(n_segments, start_segment + cfg.max_segments);
    const Factorization dfac = factor(static_cast<i128>(cfg.d));

    std::atomic<u64> next{start_segment};
    std::atomic<bool> abort{false};
    std::mutex mu;  // guards results/watermark/totals/checkpoint writes/first_error
    std::exception_ptr first_error;
    std::vector<SegmentResult> results(end_segment - start_segment);
    u64 watermark = start_segment;

    auto process = [&](u64 seg) {
        SegmentResult r;
        const u64 lo = 2 + seg * cfg.segment_size;
        const u64 hi = std::min(lo + cfg.segment_size, hi_all);
        for (u64 p : sieve_segment(lo, hi)) {
            if (is_excluded(P, p)) continue;
            ++r.pi;
            bool in_count;
            if (audit_selected(p, cfg.audit_seed, cfg.audit_interval)) {
                ++r.audited;
                const RankRecord full = rank(P, p);
                in_count = (full.rho % cfg.d == 0);
                if (in_count != divides_rank(P, dfac, p))
                    throw contract_error("census audit mismatch at p=" + std::to_string(p) +
                                         ": divides_rank disagrees with the full rank record");
            } else {
                in_count = divides_rank(P, dfac, p);
            }
            if (in_count) ++r.count;
        }
        return r;
    };

    auto worker = [&]() {
        try {
            while (!abort.load(std::memory_order_relaxed)) {
                const u64 seg = next.fetch_add(1, std::memory_order_relaxed);
                if (seg >= end_segment) break;
                SegmentResult r = process(seg);
                r.done = true;
                std::lock_guard<std::mutex> lock(mu);
                results[seg - start_segment] = r;
                bool advanced = false;
                while (watermark < end_segment && results[watermark - start_segment].done) {
                    const SegmentResult& f = results[watermark - start_segment];
                    total_count += f.count;
                    total_pi += f.pi;
                    total_audited += f.audited;
                    ++watermark;
                    advanced = true;
                }
                if (advanced && !cfg.checkpoint_path.empty())
                    write_checkpoint(cfg.checkpoint_path,
                                     Checkpoint{1, digest, watermark, total_count, total_pi,
                                                total_audited});
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(mu);
            if (!first_error) first_error = std::current_exception();
            abort.store(true, std::memory_order_relaxed);
        }
    };

    const u64 todo = end_segment - start_segment;
    const unsigned nthreads =
        static_cast<unsigned>(std::min<u64>(cfg.workers, std::max<u64>(todo, 1)));
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);

    CensusReport rep;
    rep.params = P;
    rep.d = cfg.d;
    rep.x = cfg.x;
    rep.count_R = total_count;
    rep.pi_x = total_pi;
    rep.segments = n_segments;
    rep.segments_done = watermark;
    rep.complete = (watermark == n_segments);
    rep.audited = total_audited;
    rep.li_x = li(static_cast<double>(cfg.x));
    rep.empirical_li = static_cast<double>(total_count) / rep.li_x;
    rep.empirical_pi =
        total_pi ? static_cast<double>(total_count) / static_cast<double>(total_pi) : 0.0;
    rep.delta_predicted = try_delta(P, cfg.d);
    if (rep.delta_predicted)
        rep.abs_error = std::fabs(rep.empirical_pi - rep.delta_predicted->get_d());
    rep.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

u64 count_pi_Und(const LucasParams& P, u64 n, u64 d, u64 x) {
    if (n < 1 || d < 1) throw contract_error("count_pi_Und: n and d must be >= 1");
    if (n % d != 0) throw contract_error("count_pi_Und: d must divide n");
    if (x < 2 || x > kCensusMaxX) throw contract_error("count_pi_Und: x out of range [2, 2^50]");
    const u64 hi_all = std::min(x + 1, kCensusMaxX);
    u64 count = 0;
    for (u64 lo = 2; lo < hi_all; lo += kWorkSegment) {
        const u64 hi = std::min(lo + kWorkSegment, hi_all);
        for (u64 p : sieve_segment(lo, hi)) {
            if (is_excluded(P, p)) continue;
            const u64 m = frobenius_sign(P, p) > 0 ? p - 1 : p + 1;
            if (m % n != 0) continue;            // p == (Delta/p) (mod n)
            if (divides_index(P, d, p)) ++count; // d | n | m, so the contract holds
        }
    }
    return count;
}

IdentityVerdict verify_mobius_identity(const LucasParams& P, u64 d, u64 x) {
    if (d < 1) throw contract_error("verify_mobius_identity: d must be >= 1");
    CensusConfig cfg;
    cfg.params = P;
    cfg.d = d;
    cfg.x = x;
    IdentityVerdict v;
    v.lhs = count_R(cfg).count_R;
    long long rhs = 0;
    const u64 vbound = (x + 1) / d;  // dv <= x+1 truncation (lossless)
    if (vbound >= 1) {
        for (u64 vv : smooth_divisors(d, vbound)) {
            for (u64 a : divisors(d)) {
                const int mu = mobius(a);
                if (mu == 0) continue;
                rhs += static_cast<long long>(mu) *
                       static_cast<long long>(count_pi_Und(P, d * vv, a * vv, x));
                ++v.terms;
            }
        }
    }
    v.rhs = rhs;
    v.exact = (rhs >= 0 && static_cast<u64>(rhs) == v.lhs);
    if (!v.exact)
        v.details = "count_R = " + std::to_string(v.lhs) +
                    ", Mobius double sum = " + std::to_string(rhs);
    return v;
}

IdentityVerdict verify_inner_sum(const LucasParams& P, u64 d, u64 v, u64 x) {
    if (d < 1 || v < 1) throw contract_error("verify_inner_sum: d and v must be >= 1");
    if (d_part(v, d) != v) throw contract_error("verify_inner_sum: v must divide d^inf");
    if (x < 2 || x > kCensusMaxX) throw contract_error("verify_inner_sum: x out of range [2, 2^50]");
    if (static_cast<u128>(d) * v > kCensusMaxX)
        throw contract_error("verify_inner_sum: d*v exceeds 2^50");
    const u64 dv = d * v;

    IdentityVerdict out;
    long long mobius_side = 0;
    for (u64 a : divisors(d)) {
        const int mu = mobius(a);
        if (mu == 0) continue;
        mobius_side += static_cast<long long>(mu) *
                       static_cast<long long>(count_pi_Und(P, dv, a * v, x));
        ++out.terms;
    }

    // Direct side: full rank records, counting p == (Delta/p) (mod dv),
    // v | iota, (iota/v, d) = 1.
    u64 direct = 0;
    const u64 hi_all = std::min(x + 1, kCensusMaxX);
    for (u64 lo = 2; lo < hi_all; lo += kWorkSegment) {
        const u64 hi = std::min(lo + kWorkSegment, hi_all);
        for (u64 p : sieve_segment(lo, hi)) {
            if (is_excluded(P, p)) continue;
            const RankRecord rec = rank(P, p);
            if (rec.m % dv != 0) continue;
            if (rec.iota % v != 0) continue;
            if (std::gcd(rec.iota / v, d) != 1) continue;
            ++direct;
        }
    }

    out.lhs = direct;
    out.rhs = mobius_side;
    out.exact = (mobius_side >= 0 && static_cast<u64>(mobius_side) == direct);
    if (!out.exact)
        out.details = "direct count = " + std::to_string(direct) +
                      ", Mobius sum = " + std::to_string(mobius_side);
    return out;
}

std::vector<u64> enumerate_supernatural_divisors(u64 d, u64 bound) {
    if (d < 1 || bound < 1)
        throw contract_error("enumerate_supernatural_divisors: arguments must be >= 1");
    return smooth_divisors(d, bound);  // already ascending
}

std::vector<ConvergenceRow> convergence_report(const LucasParams& P, u64 d,
                                               const std::vector<u64>& checkpoints) {
    if (d < 1) throw contract_error("convergence_report: d must be >= 1");
    if (checkpoints.empty())
        throw contract_error("convergence_report: need at least one checkpoint");
    for (size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] < 100 || checkpoints[i] > kCensusMaxX)
            throw contract_error("convergence_report: checkpoints must lie in [100, 2^50]");
        if (i > 0 && checkpoints[i] <= checkpoints[i - 1])
            throw contract_error("convergence_report: checkpoints must be strictly ascending");
    }
    if (P.delta == 0 || P.excluded.empty())
        throw contract_error("convergence_report: params must come from validate()/validate_for_rank()");
    const std::optional<mpq_class> delta = try_delta(P, d);
    const Factorization dfac = factor(static_cast<i128>(d));

    std::vector<ConvergenceRow> rows;
    rows.reserve(checkpoints.size());
    u64 count = 0, pi = 0;
    size_t ci = 0;
    auto emit_below = [&](u64 bound) {
        // Emit every checkpoint < bound; totals then cover exactly p <= checkpoint.
        while (ci < checkpoints.size() && checkpoints[ci] < bound) {
            ConvergenceRow row;
            row.x = checkpoints[ci];
            row.count = count;
            row.pi_x = pi;
            row.li_x = li(static_cast<double>(row.x));
            row.ratio_li = static_cast<double>(count) / row.li_x;
            row.ratio_pi = pi ? static_cast<double>(count) / static_cast<double>(pi) : 0.0;
            row.delta_predicted = delta;
            if (delta) row.error = row.ratio_pi - delta->get_d();
            rows.push_back(row);
            ++ci;
        }
    };

    const u64 hi_all = std::min(checkpoints.back() + 1, kCensusMaxX);
    for (u64 lo = 2; lo < hi_all; lo += kWorkSegment) {
        const u64 hi = std::min(lo + kWorkSegment, hi_all);
        for (u64 p : sieve_segment(lo, hi)) {
            emit_below(p);
            if (is_excluded(P, p)) continue;
            ++pi;
            bool in_count;
            if (audit_selected(p, 0, 1024)) {
                const RankRecord full = rank(P, p);
                in_count = (full.rho % d == 0);
                if (in_count != divides_rank(P, dfac, p))
                    throw contract_error("census audit mismatch at p=" + std::to_string(p));
            } else {
                in_count = divides_rank(P, dfac, p);
            }
            if (in_count) ++count;
        }
    }
    emit_below(kCensusMaxX + 1);  // flush the remaining checkpoints
    return rows;
}

}  // namespace lucasrank
