// lucasrank_cli.cpp -- command-line front end: sequence analysis, per-prime
// ranks, exact densities, parallel/resumable censuses, identity verification,
// and convergence reports.
//
// Output formats: --format=human (default), json, csv.  JSON output is a
// single object {schema_version, inputs, results, timing}; exact rationals
// appear as strings "num/den" plus a separate decimal field; counts and
// bounds are decimal strings.  CSV uses RFC-4180-style quoting.  All
// deterministic payload lives under "results"; wall-clock numbers live only
// under "timing" and are zeroed by --stable-output so that byte-for-byte
// output comparison is possible.
//
// Exit codes: 0 success, 1 verification mismatch, 2 invalid input or violated
// hypothesis, 3 checkpoint error.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "lucasrank/arith.hpp"
#include "lucasrank/census.hpp"
#include "lucasrank/density.hpp"
#include "lucasrank/lucas.hpp"
#include "lucasrank/quadfield.hpp"

using namespace lucasrank;
using ordered_json = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------------------
// serialization helpers
// ---------------------------------------------------------------------------

std::string rat_str(const mpq_class& q) {
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

ordered_json rat_json(const mpq_class& q) {
    return ordered_json{{"exact", rat_str(q)}, {"decimal", q.get_d()}};
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

void emit_csv(const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows) {
    auto line = [](const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) std::cout << ',';
            std::cout << csv_quote(cells[i]);
        }
        std::cout << '\n';
    };
    line(header);
    for (const auto& row : rows) line(row);
}

void emit_json(const ordered_json& inputs, const ordered_json& results, double seconds) {
    ordered_json top;
    top["schema_version"] = "1";
    top["inputs"] = inputs;
    top["results"] = results;
    top["timing"] = ordered_json{{"seconds", seconds}};
    std::cout << top.dump(2) << '\n';
}

ordered_json excluded_json(const LucasParams& P) {
    ordered_json arr = ordered_json::array();
    for (u64 p : P.excluded) arr.push_back(std::to_string(p));
    return arr;
}

std::string excluded_str(const LucasParams& P) {
    std::string s;
    for (size_t i = 0; i < P.excluded.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(P.excluded[i]);
    }
    return s;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

// Lucas parameters for counting subcommands: strict when possible so that
// delta_U predictions are available, but square discriminants are admitted
// (their censuses and ranks are perfectly well defined).
LucasParams params_for_counting(i64 a1, i64 a2) {
    try {
        return validate(a1, a2);
    } catch (const hypothesis_error& e) {
        if (e.hypothesis == "square discriminant") return validate_for_rank(a1, a2);
        throw;
    }
}

// ---------------------------------------------------------------------------
// shared flag bundles
// ---------------------------------------------------------------------------

struct CommonOpts {
    std::string format = "human";
    bool stable = false;
};

struct CensusOpts {
    i64 a1 = 0, a2 = 0;
    u64 d = 1, x = 0;
    unsigned workers = 1;
    u64 segment_size = u64(1) << 22;
    std::string checkpoint;
    bool resume = false;
    u64 audit_interval = 1024;
    u64 seed = 0;
    u64 max_segments = 0;
    std::vector<u64> checkpoints_at;
};

ordered_json census_inputs_json(const CensusOpts& o) {
    ordered_json in;
    in["a1"] = std::to_string(o.a1);
    in["a2"] = std::to_string(o.a2);
    in["d"] = std::to_string(o.d);
    if (o.x) in["x"] = std::to_string(o.x);
    in["workers"] = std::to_string(o.workers);
    in["segment_size"] = std::to_string(o.segment_size);
    in["audit_interval"] = std::to_string(o.audit_interval);
    in["seed"] = std::to_string(o.seed);
    in["checkpoint"] = o.checkpoint;
    in["resume"] = o.resume;
    if (o.max_segments) in["max_segments"] = std::to_string(o.max_segments);
    if (!o.checkpoints_at.empty()) {
        ordered_json arr = ordered_json::array();
        for (u64 c : o.checkpoints_at) arr.push_back(std::to_string(c));
        in["checkpoints_at"] = arr;
    }
    return in;
}

// ---------------------------------------------------------------------------
// subcommand bodies (return process exit code)
// ---------------------------------------------------------------------------

int run_analyze(i64 a1, i64 a2, const CommonOpts& c) {
    Timer timer;
    const LucasParams P = validate(a1, a2);
    const double secs = c.stable ? 0.0 : timer.seconds();

    if (c.format == "json") {
        ordered_json in{{"a1", std::to_string(a1)}, {"a2", std::to_string(a2)}};
        ordered_json res;
        res["delta"] = to_string_i128(P.delta);
        res["delta0"] = to_string_i128(P.delta0);
        res["square_discriminant"] = false;
        res["root_of_unity"] = false;
        res["gamma"] = P.gamma->str();
        res["h"] = std::to_string(P.h);
        res["gamma0"] = P.gamma0->str();
        res["excluded"] = excluded_json(P);
        emit_json(in, res, secs);
    } else if (c.format == "csv") {
        emit_csv({"a1", "a2", "delta", "delta0", "square_discriminant", "root_of_unity",
                  "gamma", "h", "gamma0", "excluded"},
                 {{std::to_string(a1), std::to_string(a2), to_string_i128(P.delta),
                   to_string_i128(P.delta0), "false", "false", P.gamma->str(),
                   std::to_string(P.h), P.gamma0->str(), excluded_str(P)}});
    } else {
        std::cout << "sequence U(" << a1 << "," << a2 << ")\n"
                  << "  Delta   = " << to_string_i128(P.delta) << "\n"
                  << "  Delta0  = " << to_string_i128(P.delta0) << "\n"
                  << "  gamma   = " << P.gamma->str() << "\n"
                  << "  h       = " << P.h << "\n"
                  << "  gamma0  = " << P.gamma0->str() << "\n"
                  << "  square discriminant: no\n"
                  << "  root of unity:       no\n"
                  << "  excluded primes: " << excluded_str(P) << "\n";
    }
    return 0;
}

int run_rank(i64 a1, i64 a2, const std::vector<u64>& plist, u64 pmin, u64 pmax,
             const CommonOpts& c) {
    Timer timer;
    const LucasParams P = validate_for_rank(a1, a2);
    if (plist.empty() && pmax == 0)
        throw contract_error("rank: give at least one -p PRIME or a --pmax bound");

    struct Row {
        u64 p;
        bool excluded;
        RankRecord rec{};
    };
    std::vector<Row> rows;
    auto add_prime = [&](u64 p) {
        if (is_excluded(P, p)) {
            rows.push_back({p, true, {}});
        } else {
            rows.push_back({p, false, rank(P, p)});
        }
    };
    for (u64 p : plist) {
        if (!is_prime_u64(p))
            throw contract_error("rank: " + std::to_string(p) + " is not prime");
        add_prime(p);
    }
    if (pmax != 0) {
        if (pmax > kCensusMaxX) throw contract_error("rank: --pmax exceeds 2^50");
        const u64 lo = std::max<u64>(pmin, 2);
        if (lo > pmax) throw contract_error("rank: empty range, --pmin > --pmax");
        for (u64 seg = lo; seg <= pmax; seg += (u64(1) << 22)) {
            const u64 hi = std::min(seg + (u64(1) << 22), pmax + 1);
            if (seg >= hi) break;
            for (u64 p : sieve_segment(seg, hi)) add_prime(p);
        }
    }
    const double secs = c.stable ? 0.0 : timer.seconds();

    if (c.format == "json") {
        ordered_json in{{"a1", std::to_string(a1)}, {"a2", std::to_string(a2)}};
        if (!plist.empty()) {
            ordered_json arr = ordered_json::array();
            for (u64 p : plist) arr.push_back(std::to_string(p));
            in["primes"] = arr;
        }
        if (pmax) {
            in["pmin"] = std::to_string(std::max<u64>(pmin, 2));
            in["pmax"] = std::to_string(pmax);
        }
        ordered_json arr = ordered_json::array();
        for (const Row& r : rows) {
            ordered_json row;
            row["p"] = std::to_string(r.p);
            if (r.excluded) {
                row["status"] = "excluded";
            } else {
                row["status"] = "ok";
                row["sign"] = r.rec.sign;
                row["m"] = std::to_string(r.rec.m);
                row["rho"] = std::to_string(r.rec.rho);
                row["iota"] = std::to_string(r.rec.iota);
            }
            arr.push_back(row);
        }
        emit_json(in, ordered_json{{"rows", arr}}, secs);
    } else if (c.format == "csv") {
        std::vector<std::vector<std::string>> cells;
        for (const Row& r : rows) {
            if (r.excluded) {
                cells.push_back({std::to_string(r.p), "excluded", "", "", "", ""});
            } else {
                cells.push_back({std::to_string(r.p), "ok", std::to_string(r.rec.sign),
                                 std::to_string(r.rec.m), std::to_string(r.rec.rho),
                                 std::to_string(r.rec.iota)});
            }
        }
        emit_csv({"p", "status", "sign", "m", "rho", "iota"}, cells);
    } else {
        for (const Row& r : rows) {
            if (r.excluded)
                std::cout << "p=" << r.p << "  excluded (p | 2*a2*Delta)\n";
            else
                std::cout << "p=" << r.p << "  sign=" << (r.rec.sign > 0 ? "+1" : "-1")
                          << "  m=" << r.rec.m << "  rho=" << r.rec.rho
                          << "  iota=" << r.rec.iota << "\n";
        }
    }
    return 0;
}

int run_density(i64 a1, i64 a2, u64 d, const CommonOpts& c) {
    Timer timer;
    const LucasParams P = validate(a1, a2);
    const DensityReport rep = delta_U(P, d);
    const double secs = c.stable ? 0.0 : timer.seconds();
    const std::string branch = rep.branch == EtaBranch::eta_zero ? "zero" : "nonzero";

    if (c.format == "json") {
        ordered_json in{{"a1", std::to_string(a1)},
                        {"a2", std::to_string(a2)},
                        {"d", std::to_string(d)}};
        ordered_json res;
        res["delta"] = rat_json(rep.delta);
        res["eta"] = rat_json(rep.eta);
        res["eta_branch"] = branch;
        res["branch_condition"] = rep.condition;
        res["h"] = std::to_string(rep.h);
        res["d_inf_h"] = std::to_string(rep.d_inf_h);
        res["excluded"] = excluded_json(P);
        emit_json(in, res, secs);
    } else if (c.format == "csv") {
        emit_csv({"a1", "a2", "d", "h", "d_inf_h", "eta", "eta_branch", "branch_condition",
                  "delta", "delta_decimal"},
                 {{std::to_string(a1), std::to_string(a2), std::to_string(d),
                   std::to_string(rep.h), std::to_string(rep.d_inf_h), rat_str(rep.eta),
                   branch, rep.condition, rat_str(rep.delta), fmt_double(rep.delta.get_d())}});
    } else {
        std::cout << "delta_U(" << d << ") for U(" << a1 << "," << a2 << ")\n"
                  << "  delta  = " << rat_str(rep.delta) << "  (= " << rep.delta.get_d()
                  << ")\n"
                  << "  eta    = " << rat_str(rep.eta) << "  [branch: " << branch << ", "
                  << rep.condition << "]\n"
                  << "  h      = " << rep.h << "   (d^inf, h) = " << rep.d_inf_h << "\n";
    }
    return 0;
}

// rows shared by `census --checkpoints-at` and `report`
int emit_convergence(const LucasParams& P, const CensusOpts& o, const CommonOpts& c,
                     Timer& timer) {
    const auto rows = convergence_report(P, o.d, o.checkpoints_at);
    const double secs = c.stable ? 0.0 : timer.seconds();

    if (c.format == "json") {
        ordered_json arr = ordered_json::array();
        for (const auto& r : rows) {
            ordered_json row;
            row["x"] = std::to_string(r.x);
            row["count"] = std::to_string(r.count);
            row["pi_x"] = std::to_string(r.pi_x);
            row["li_x"] = r.li_x;
            row["ratio_li"] = r.ratio_li;
            row["ratio_pi"] = r.ratio_pi;
            row["delta_predicted"] =
                r.delta_predicted ? rat_json(*r.delta_predicted) : ordered_json(nullptr);
            row["error"] = r.error;
            arr.push_back(row);
        }
        ordered_json res;
        res["rows"] = arr;
        res["excluded"] = excluded_json(P);
        emit_json(census_inputs_json(o), res, secs);
    } else if (c.format == "csv") {
        std::vector<std::vector<std::string>> cells;
        for (const auto& r : rows) {
            cells.push_back({std::to_string(r.x), std::to_string(r.count), fmt_double(r.li_x),
                             std::to_string(r.pi_x), fmt_double(r.ratio_li),
                             fmt_double(r.ratio_pi),
                             r.delta_predicted ? rat_str(*r.delta_predicted) : "",
                             fmt_double(r.error)});
        }
        emit_csv({"x", "count", "li_x", "pi_x", "ratio_li", "ratio_pi", "delta_predicted",
                  "error"},
                 cells);
    } else {
        for (const auto& r : rows) {
            std::cout << "x=" << r.x << "  count=" << r.count << "  pi=" << r.pi_x
                      << "  count/Li=" << r.ratio_li << "  count/pi=" << r.ratio_pi;
            if (r.delta_predicted)
                std::cout << "  delta=" << rat_str(*r.delta_predicted) << "  error=" << r.error;
            std::cout << "\n";
        }
    }
    return 0;
}

int run_census(const CensusOpts& o, const CommonOpts& c) {
    Timer timer;
    const LucasParams P = params_for_counting(o.a1, o.a2);
    if (!o.checkpoints_at.empty()) return emit_convergence(P, o, c, timer);

    CensusConfig cfg;
    cfg.params = P;
    cfg.d = o.d;
    cfg.x = o.x;
    cfg.segment_size = o.segment_size;
    cfg.workers = o.workers;
    cfg.checkpoint_path = o.checkpoint;
    cfg.resume = o.resume;
    cfg.audit_interval = o.audit_interval;
    cfg.audit_seed = o.seed;
    cfg.max_segments = o.max_segments;
    const CensusReport rep = count_R(cfg);
    const double secs = c.stable ? 0.0 : timer.seconds();

    if (c.format == "json") {
        ordered_json res;
        res["count_R"] = std::to_string(rep.count_R);
        res["pi_x"] = std::to_string(rep.pi_x);
        res["li_x"] = rep.li_x;
        res["empirical_li"] = rep.empirical_li;
        res["empirical_pi"] = rep.empirical_pi;
        res["delta_predicted"] =
            rep.delta_predicted ? rat_json(*rep.delta_predicted) : ordered_json(nullptr);
        res["abs_error"] = rep.delta_predicted ? ordered_json(rep.abs_error) : ordered_json(nullptr);
        res["segments"] = std::to_string(rep.segments);
        res["segments_done"] = std::to_string(rep.segments_done);
        res["complete"] = rep.complete;
        res["audited"] = std::to_string(rep.audited);
        res["excluded"] = excluded_json(P);
        emit_json(census_inputs_json(o), res, secs);
    } else if (c.format == "csv") {
        emit_csv({"a1", "a2", "d", "x", "count_R", "pi_x", "li_x", "empirical_li",
                  "empirical_pi", "delta_predicted", "abs_error", "segments", "segments_done",
                  "complete", "audited", "excluded"},
                 {{std::to_string(o.a1), std::to_string(o.a2), std::to_string(o.d),
                   std::to_string(o.x), std::to_string(rep.count_R), std::to_string(rep.pi_x),
                   fmt_double(rep.li_x), fmt_double(rep.empirical_li),
                   fmt_double(rep.empirical_pi),
                   rep.delta_predicted ? rat_str(*rep.delta_predicted) : "",
                   rep.delta_predicted ? fmt_double(rep.abs_error) : "",
                   std::to_string(rep.segments), std::to_string(rep.segments_done),
                   rep.complete ? "true" : "false", std::to_string(rep.audited),
                   excluded_str(P)}});
    } else {
        std::cout << "census U(" << o.a1 << "," << o.a2 << ")  d=" << o.d << "  x=" << o.x
                  << "\n"
                  << "  count_R      = " << rep.count_R << "\n"
                  << "  universe pi  = " << rep.pi_x << "\n"
                  << "  Li(x)        = " << rep.li_x << "\n"
                  << "  count/Li(x)  = " << rep.empirical_li << "\n"
                  << "  count/pi(x)  = " << rep.empirical_pi << "\n";
        if (rep.delta_predicted)
            std::cout << "  delta_U(d)   = " << rat_str(*rep.delta_predicted) << "  (= "
                      << rep.delta_predicted->get_d() << ")\n"
                      << "  |ratio-delta|= " << rep.abs_error << "\n";
        else
            std::cout << "  delta_U(d)   = (not predicted: density theorem hypotheses do not hold)\n";
        std::cout << "  segments     = " << rep.segments_done << "/" << rep.segments
                  << (rep.complete ? " (complete)" : " (stopped early)") << "\n"
                  << "  audited      = " << rep.audited << "\n"
                  << "  excluded     = " << excluded_str(P) << "\n";
    }
    return 0;
}

int run_verify(i64 a1, i64 a2, u64 d, u64 x, const std::string& mode, u64 v, u64 vmax,
               double tolerance, const CommonOpts& c) {
    Timer timer;
    ordered_json in{{"a1", std::to_string(a1)},
                    {"a2", std::to_string(a2)},
                    {"d", std::to_string(d)},
                    {"mode", mode}};

    if (mode == "series") {
        const LucasParams P = validate(a1, a2);
        u64 effective_vmax = vmax;
        if (effective_vmax == 0) {
            effective_vmax = 1;  // min(d^6, 10^6), overflow-safe
            for (int i = 0; i < 6 && effective_vmax < 1000000; ++i)
                effective_vmax = std::min<u64>(effective_vmax * d, 1000000);
        }
        const mpq_class residual = series_residual(P, d, effective_vmax);
        const bool pass = std::fabs(residual.get_d()) < tolerance;
        const double secs = c.stable ? 0.0 : timer.seconds();
        in["vmax"] = std::to_string(effective_vmax);

        if (c.format == "json") {
            ordered_json res;
            res["residual"] = rat_json(residual);
            res["tolerance"] = tolerance;
            res["pass"] = pass;
            emit_json(in, res, secs);
        } else if (c.format == "csv") {
            emit_csv({"mode", "d", "vmax", "residual", "residual_decimal", "tolerance",
                      "pass"},
                     {{mode, std::to_string(d), std::to_string(effective_vmax),
                       rat_str(residual), fmt_double(residual.get_d()),
                       fmt_double(tolerance), pass ? "true" : "false"}});
        } else {
            std::cout << "series residual for U(" << a1 << "," << a2 << "), d=" << d
                      << ", vmax=" << effective_vmax << ": " << rat_str(residual) << " (= "
                      << residual.get_d() << ")  " << (pass ? "PASS" : "FAIL")
                      << " at tolerance " << tolerance << "\n";
        }
        return pass ? 0 : 1;
    }

    const LucasParams P = params_for_counting(a1, a2);
    IdentityVerdict verdict;
    if (mode == "identity") {
        verdict = verify_mobius_identity(P, d, x);
        in["x"] = std::to_string(x);
    } else if (mode == "innersum") {
        verdict = verify_inner_sum(P, d, v, x);
        in["v"] = std::to_string(v);
        in["x"] = std::to_string(x);
    } else {
        throw contract_error("verify: unknown --mode '" + mode + "'");
    }
    const double secs = c.stable ? 0.0 : timer.seconds();

    if (c.format == "json") {
        ordered_json res;
        res["lhs"] = std::to_string(verdict.lhs);
        res["rhs"] = std::to_string(verdict.rhs);
        res["terms"] = std::to_string(verdict.terms);
        res["exact"] = verdict.exact;
        res["details"] = verdict.details;
        emit_json(in, res, secs);
    } else if (c.format == "csv") {
        emit_csv({"mode", "d", "v", "x", "lhs", "rhs", "terms", "exact", "details"},
                 {{mode, std::to_string(d), mode == "innersum" ? std::to_string(v) : "",
                   std::to_string(x), std::to_string(verdict.lhs),
                   std::to_string(verdict.rhs), std::to_string(verdict.terms),
                   verdict.exact ? "true" : "false", verdict.details}});
    } else {
        std::cout << "verify " << mode << " for U(" << a1 << "," << a2 << "), d=" << d;
        if (mode == "innersum") std::cout << ", v=" << v;
        std::cout << ", x=" << x << ": lhs=" << verdict.lhs << " rhs=" << verdict.rhs << "  "
                  << (verdict.exact ? "EXACT MATCH" : ("MISMATCH: " + verdict.details))
                  << "\n";
    }
    return verdict.exact ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "lucasrank: ranks of appearance of primes in Lucas sequences, exact prime "
        "densities, and verification censuses"};
    app.require_subcommand(1);

    CommonOpts common;
    app.add_option("--format", common.format, "output format")
        ->check(CLI::IsMember({"human", "json", "csv"}))
        ->capture_default_str();
    app.add_flag("--stable-output", common.stable,
                 "zero wall-clock timing fields for byte-stable output");

    // analyze -----------------------------------------------------------------
    i64 an_a1 = 0, an_a2 = 0;
    auto* analyze = app.add_subcommand("analyze", "sequence profile: Delta, gamma, h");
    analyze->fallthrough();
    analyze->add_option("a1", an_a1, "recurrence coefficient a1")->required();
    analyze->add_option("a2", an_a2, "recurrence coefficient a2")->required();

    // rank --------------------------------------------------------------------
    i64 rk_a1 = 0, rk_a2 = 0;
    std::vector<u64> rk_primes;
    u64 rk_pmin = 2, rk_pmax = 0;
    auto* rank_cmd = app.add_subcommand("rank", "rank of appearance rho_U(p)");
    rank_cmd->fallthrough();
    rank_cmd->add_option("a1", rk_a1)->required();
    rank_cmd->add_option("a2", rk_a2)->required();
    rank_cmd->add_option("-p,--prime", rk_primes, "specific prime(s)");
    rank_cmd->add_option("--pmin", rk_pmin, "range start (default 2)");
    rank_cmd->add_option("--pmax", rk_pmax, "range end (inclusive): stream all primes");

    // density -----------------------------------------------------------------
    i64 de_a1 = 0, de_a2 = 0;
    u64 de_d = 1;
    auto* density_cmd = app.add_subcommand("density", "exact limiting density delta_U(d)");
    density_cmd->fallthrough();
    density_cmd->add_option("a1", de_a1)->required();
    density_cmd->add_option("a2", de_a2)->required();
    density_cmd->add_option("d", de_d, "count primes with d | rho")->required();

    // census ------------------------------------------------------------------
    CensusOpts co;
    auto* census_cmd = app.add_subcommand("census", "count primes p <= x with d | rho_U(p)");
    census_cmd->fallthrough();
    census_cmd->add_option("a1", co.a1)->required();
    census_cmd->add_option("a2", co.a2)->required();
    census_cmd->add_option("d", co.d)->required();
    census_cmd->add_option("x", co.x, "census bound (required unless --checkpoints-at)");
    census_cmd->add_option("--workers", co.workers, "worker threads")
        ->envname("LUCAS_RANK_WORKERS");
    census_cmd->add_option("--segment-size", co.segment_size, "sieve segment size");
    census_cmd->add_option("--checkpoint", co.checkpoint, "checkpoint file path");
    census_cmd->add_flag("--resume", co.resume, "resume from the checkpoint file");
    census_cmd->add_option("--audit-interval", co.audit_interval,
                           "audit ~1 in N primes with a full rank computation (0 = off)");
    census_cmd->add_option("--seed", co.seed, "audit sampling seed");
    census_cmd->add_option("--max-segments", co.max_segments,
                           "stop after N segments (kill/resume testing hook)");
    census_cmd->add_option("--checkpoints-at", co.checkpoints_at,
                           "emit a convergence table at these x values instead")
        ->delimiter(',');

    // verify ------------------------------------------------------------------
    i64 vf_a1 = 0, vf_a2 = 0;
    u64 vf_d = 1, vf_x = 0, vf_v = 1, vf_vmax = 0;
    double vf_tolerance = 1e-3;
    std::string vf_mode;
    auto* verify_cmd =
        app.add_subcommand("verify", "exact identity checks (exit 1 on mismatch)");
    verify_cmd->fallthrough();
    verify_cmd->add_option("a1", vf_a1)->required();
    verify_cmd->add_option("a2", vf_a2)->required();
    verify_cmd->add_option("d", vf_d)->required();
    verify_cmd->add_option("x", vf_x, "census bound (identity/innersum modes)");
    verify_cmd->add_option("--mode", vf_mode, "identity | series | innersum")
        ->required()
        ->check(CLI::IsMember({"identity", "series", "innersum"}));
    verify_cmd->add_option("--v", vf_v, "inner-sum v (must divide d^inf)");
    verify_cmd->add_option("--vmax", vf_vmax, "series truncation (default min(d^6, 10^6))");
    verify_cmd->add_option("--tolerance", vf_tolerance, "series residual tolerance");

    // report ------------------------------------------------------------------
    CensusOpts ro;
    auto* report_cmd = app.add_subcommand("report", "convergence table for d | rho census");
    report_cmd->fallthrough();
    report_cmd->add_option("a1", ro.a1)->required();
    report_cmd->add_option("a2", ro.a2)->required();
    report_cmd->add_option("d", ro.d)->required();
    report_cmd->add_option("--checkpoints-at", ro.checkpoints_at, "x values, ascending")
        ->required()
        ->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // prints help, exit 0
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // invalid flags/arguments
    }

    try {
        if (app.got_subcommand(analyze)) return run_analyze(an_a1, an_a2, common);
        if (app.got_subcommand(rank_cmd))
            return run_rank(rk_a1, rk_a2, rk_primes, rk_pmin, rk_pmax, common);
        if (app.got_subcommand(density_cmd)) return run_density(de_a1, de_a2, de_d, common);
        if (app.got_subcommand(census_cmd)) {
            if (co.checkpoints_at.empty() && co.x == 0)
                throw contract_error("census: the x bound is required (or --checkpoints-at)");
            return run_census(co, common);
        }
        if (app.got_subcommand(verify_cmd))
            return run_verify(vf_a1, vf_a2, vf_d, vf_x, vf_mode, vf_v, vf_vmax, vf_tolerance,
                              common);
        if (app.got_subcommand(report_cmd)) {
            Timer timer;
            const LucasParams P = params_for_counting(ro.a1, ro.a2);
            return emit_convergence(P, ro, common, timer);
        }
        throw contract_error("no subcommand selected");
    } catch (const hypothesis_error& e) {
        std::cerr << "error: violated hypothesis: " << e.hypothesis << " (" << e.what()
                  << ")\n";
        return 2;
    } catch (const checkpoint_error& e) {
        std::cerr << "error: checkpoint: " << e.what() << "\n";
        return 3;
    } catch (const contract_error& e) {
        std::cerr << "error: invalid input: " << e.what() << "\n";
        return 2;
    } catch (const undecided_error& e) {
        std::cerr << "error: undecided at maximum precision: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
