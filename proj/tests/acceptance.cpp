// Standalone acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "ranktwist/constellation.hpp"
#include "ranktwist/pipeline.hpp"
#include "ranktwist/seltrans.hpp"

using namespace ranktwist;

namespace {

// failures collected per criterion; the first few are echoed
struct Check {
    int failures = 0;
    std::string first;
    void operator()(bool ok, const std::string& what)
    {
        if (ok) return;
        if (failures++ == 0) first = what;
    }
};

Curve random_curve(std::mt19937_64& rng, long bound)
{
    std::uniform_int_distribution<long> d(-bound, bound);
    for (;;) {
        long a = d(rng), b = d(rng), c = d(rng);
        if (a != b && a != c && b != c) return make_curve(a, b, c);
    }
}

u64 random_prime_outside(std::mt19937_64& rng, const TransitionChain& c, u64 lo, u64 hi)
{
    for (;;) {
        u64 p = next_prime(lo + rng() % (hi - lo));
        if (c.curve.in_T(Place{p})) continue;
        if (std::find(c.primes.begin(), c.primes.end(), p) != c.primes.end()) continue;
        return p;
    }
}

bool trial_prime(long n)
{
    n = n < 0 ? -n : n;
    if (n < 2) return false;
    for (long d = 2; d * d <= n; ++d) if (n % d == 0) return false;
    return true;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---- criteria; each returns a detail string and records failures ----

std::string reciprocity(Check& ck)
{
    const u64 ps[10] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
    std::mt19937_64 rng(1);
    auto draw = [&] {
        std::vector<u64> s;
        for (u64 p : ps) if (rng() & 1) s.push_back(p);
        return SquareClass((rng() & 1) ? -1 : 1, s);
    };
    for (int it = 0; it < 10000; ++it) {
        auto a = draw(), b = draw();
        ck(reciprocity_audit(a, b).product == 1, "product != 1 for " + a.str() + ", " + b.str());
    }
    long compared = 0;
    for (u64 p : primes_up_to(50))
        for (i64 a = -50; a <= 50; ++a)
            for (i64 b = -50; b <= 50; ++b) {
                if (!a || !b) continue;
                ++compared;
                ck(hilbert_symbol(mpq_class((long)a), mpq_class((long)b), Place{p}) == oracle::brute_hilbert(a, b, p),
                   "symbol mismatch (" + std::to_string(a) + "," + std::to_string(b) + ")_" + std::to_string(p));
            }
    return "10000 global products, " + std::to_string(compared) + " local symbols vs conic search";
}

std::string form_consistency(Check& ck)
{
    long pairs = 0;
    Place two{2};
    for (auto E : {make_curve(0, 1, 2), make_curve(0, 1, -1), make_curve(0, 5, -5)}) {
        auto s = kummer_quadratic_space(E, two);
        ck(s.dim() == 6, "dimension " + std::to_string(s.dim()));
        for (std::uint32_t x = 0; x < 64; ++x)
            for (std::uint32_t y = 0; y < 64; ++y) {
                auto [x1, x2] = unpack_pair(x, two);
                auto [y1, y2] = unpack_pair(y, two);
                int pairing = hilbert_symbol(x1, y2) * hilbert_symbol(y1, x2);
                ++pairs;
                ck(s.q(x ^ y) * s.q(x) * s.q(y) == pairing, E.str() + ": b != pairing");
            }
    }
    return std::to_string(pairs) + " pairs";
}

std::string kummer_images(Check& ck)
{
    std::mt19937_64 rng(2024);
    int images = 0, good = 0, twisted = 0;
    for (int it = 0; it < 20; ++it) {
        auto E = random_curve(rng, 40);
        for (auto v : E.T) {
            auto im = local_image(E, v).subspace;
            int want = v.is_real() ? 1 : (v.p == 2 ? 3 : 2);
            ++images;
            ck(im.dim() == want, E.str() + " image dim at " + v.str());
            ck(kummer_quadratic_space(E, v).is_maximal_isotropic(im), E.str() + " not maximal isotropic at " + v.str());
            auto s = oracle::sampled_image(E, v, v.is_real() ? 1 : (v.p == 2 ? 4096 : 400));
            ck(im.contains(s), E.str() + " sampled point outside image at " + v.str());
        }
        int n = 0;
        for (u64 p = 5; n < 5; p += 2) {
            if (!is_prime(p) || E.in_T(Place{p})) continue;
            ++n;
            ++good;
            auto pairs = local_solvable_pairs(E, Place{p});
            ck(Subspace(4, std::vector<std::uint32_t>(pairs.begin(), pairs.end())) == unramified_subspace(Place{p}),
               E.str() + " image != unramified at " + std::to_string(p));
        }
        n = 0;
        for (u64 p = 5; n < 5; p += 2) {
            if (!is_prime(p) || E.in_T(Place{p})) continue;
            ++n;
            ++twisted;
            Place v{p};
            LocalClass pi{v, (rng() & 1) ? 2u : 3u};
            auto L = twisted_condition(E, v, pi);
            auto Ep = twist(E, mpz_class((long)pi.representative()));
            auto pairs = local_solvable_pairs(Ep, v);
            ck(Subspace(4, std::vector<std::uint32_t>(pairs.begin(), pairs.end())) == L,
               E.str() + " twisted image != span at " + std::to_string(p));
            ck(L.dim() == 2 && L.intersect(unramified_subspace(v)).dim() == 0,
               E.str() + " twisted condition meets unramified at " + std::to_string(p));
        }
    }
    return std::to_string(images) + " images at T, " + std::to_string(good) + " good places, " +
           std::to_string(twisted) + " twisted places";
}

std::uint32_t mat(int a, int b, int c, int d) { return a | b << 1 | c << 2 | d << 3; }

std::string matrices(Check& ck)
{
    auto space = det_space();
    auto iso = maximal_isotropics(space);
    std::vector<Subspace> families{
        Subspace(4, {mat(1, 0, 0, 0), mat(0, 1, 0, 0)}), Subspace(4, {mat(0, 0, 1, 0), mat(0, 0, 0, 1)}),
        Subspace(4, {mat(1, 0, 0, 0), mat(0, 0, 1, 0)}), Subspace(4, {mat(0, 1, 0, 0), mat(0, 0, 0, 1)}),
        Subspace(4, {mat(1, 0, 1, 0), mat(0, 1, 0, 1)}), Subspace(4, {mat(1, 1, 0, 0), mat(0, 0, 1, 1)}),
    };
    std::set<std::vector<std::uint32_t>> got, want;
    for (auto& s : iso) got.insert(s.elements());
    for (auto& s : families) want.insert(s.elements());
    ck(iso.size() == 6, std::to_string(iso.size()) + " maximal isotropics");
    ck(got == want, "families differ");
    int degenerate = 0;
    for (auto& s : all_subspaces(4)) {
        if (!space.is_isotropic(s)) continue;
        ++degenerate;
        bool inside = false;
        for (auto& m : iso) inside = inside || m.contains(s);
        ck(inside, "degenerate subgroup outside the six");
    }
    return std::to_string(iso.size()) + " maximal, " + std::to_string(degenerate) + " degenerate subgroups";
}

std::string trichotomy(Check& ck)
{
    std::mt19937_64 rng(2025);
    int steps = 0;
    std::map<std::string, int> seen;
    while (steps < 200) {
        auto c = make_chain(random_curve(rng, 25));
        int len = 1 + rng() % 4;
        for (int k = 0; k < len; ++k) {
            u64 p = random_prime_outside(rng, c, 5, 300);
            bool nonres = rng() & 1;
            if (rng() & 1) {
                // aim for L = A so the +2 case occurs
                c.append(p, false);
                auto A = compute_selmer(c.relaxed(c.primes.size() - 1)).restriction(Place{p});
                bool eq = A == twisted_condition(c.curve, Place{p}, c.pis.back());
                c.primes.pop_back();
                c.pis.pop_back();
                nonres = !eq;
            }
            c.append(p, nonres);
        }
        int parity = -1;
        for (std::size_t i = 0; i < c.primes.size(); ++i) {
            StepReport r = transition_step(c, i);
            ++steps;
            ++seen[r.case_tag];
            std::string at = c.curve.str() + " step " + std::to_string(i);
            ck(r.A.dim() == 2, at + ": dim A = " + std::to_string(r.A.dim()));
            ck(r.n == -2 || r.n == 0 || r.n == 2, at + ": n = " + std::to_string(r.n));
            ck(r.dim_after - r.dim_before == r.n, at + ": n disagrees with recomputation");
            if (r.restriction_dim == 2) ck(r.n == -2, at + ": full restriction without drop");
            if (r.restriction_dim == 0 && r.A == r.L_next) ck(r.n == 2, at + ": A = L without jump");
            if (r.restriction_dim == 0 && !(r.A == r.L_next)) ck(r.n == 0, at + ": A != L with change");
            if (r.n == -2) ck(r.codim2_contained, at + ": codimension 2 containment fails");
            if (parity < 0) parity = r.dim_before & 1;
            ck((r.dim_before & 1) == parity && (r.dim_after & 1) == parity, at + ": parity changed");
        }
    }
    ck(seen["-2"] > 0 && seen["0"] > 0 && seen["+2"] > 0, "some case never occurred");
    return std::to_string(steps) + " steps (" + std::to_string(seen["-2"]) + " / " + std::to_string(seen["0"]) +
           " / " + std::to_string(seen["+2"]) + " for -2 / 0 / +2)";
}

std::string final_step(Check& ck)
{
    std::mt19937_64 rng(5);
    std::vector<Curve> curves{make_curve(0, 1, -1), make_curve(0, 1, 2), make_curve(0, 5, -5), make_curve(-1, 0, 3),
                              make_curve(0, 2, 7)};
    int done = 0;
    while (done < 50) {
        const Curve& E = curves[done % curves.size()];
        int r = 1 + rng() % 3;
        std::vector<u64> qs;
        SquareClass d;
        for (int k = 0; k < r; ++k) {
            u64 q;
            do q = next_prime(5 + rng() % 2000);
            while (E.in_T(Place{q}) || std::find(qs.begin(), qs.end(), q) != qs.end());
            qs.push_back(q);
            d *= SquareClass::prime(q);
        }
        bool trivial_at_T = true;
        for (auto v : E.T) trivial_at_T = trivial_at_T && restrict(d, v).is_square();
        if (!trivial_at_T) continue;
        ++done;
        auto c = make_chain(E);
        for (auto q : d.support()) c.append(q, restrict(d, Place{q}));
        int lhs = sel2_of_twist(E, d).dim;
        int rhs = 2 + compute_selmer(c.structure(c.primes.size() - 1)).dim();
        ck(lhs == rhs, E.str() + " d = " + d.str());
    }
    return std::to_string(done) + " twists";
}

int log2_exact(std::size_t n)
{
    int k = 0;
    while ((std::size_t(1) << k) < n) ++k;
    return (std::size_t(1) << k) == n ? k : -1;
}

std::string baselines(Check& ck)
{
    std::ostringstream out;
    for (auto [E, want] : {std::pair{make_curve(0, 1, -1), 2}, std::pair{make_curve(0, 5, -5), 3}}) {
        auto g = compute_selmer(baseline_structure(E));
        auto pairs = oracle::descent_pairs(E);
        ck(g.dim() == want, E.str() + ": dim " + std::to_string(g.dim()));
        ck(log2_exact(pairs.size()) == want, E.str() + ": oracle count " + std::to_string(pairs.size()));
        for (auto& [x1, x2] : pairs)
            ck(g.contains(encode_pair({SquareClass::of(x1), SquareClass::of(x2)}, g.primes)), E.str() + ": oracle class missing");
        out << E.str() << " dim " << g.dim() << " (oracle " << pairs.size() << " classes); ";
    }
    auto s = out.str();
    return s.substr(0, s.size() - 2);
}

std::string sign_tables(Check& ck)
{
    auto prod = sign_table_products(reference_z_table(), reference_form_table());
    auto pattern = suitable_pattern();
    int constrained = 0;
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 3; ++j) {
            if (pattern[i][j] == 0) continue;
            ++constrained;
            ck(prod[i][j] == pattern[i][j], "product z" + std::to_string(i + 1) + ", q" + std::to_string(j + 1));
        }
    ck(constrained == 24, std::to_string(constrained) + " constrained entries");
    ProductMatrix m{};
    for (int i = 0; i < 12; ++i) {
        for (int j = 0; j < 3; ++j) m[i][j] = prod[i][j];
        m[i][3] = 1;
    }
    auto c = cascade_predict(m, 6);
    ck(c.dims == std::vector<int>{6, 4, 2, 0}, "cascade");
    ck(c.final_dim == 2, "final dim " + std::to_string(c.final_dim));
    std::string dims;
    for (int d : c.dims) dims += (dims.empty() ? "" : " ") + std::to_string(d);
    return std::to_string(constrained) + " products, cascade [" + dims + "], final " + std::to_string(c.final_dim);
}

std::string reduction(Check& ck)
{
    std::mt19937_64 rng(17);
    int seeds = 0, steps = 0;
    while (seeds < 10) {
        auto E = random_curve(rng, 30);
        if (compute_selmer(baseline_structure(E)).dim() % 2) continue;  // reduction keeps parity
        ++seeds;
        try {
            auto res = selmer_reduce(E, {}, 10000);
            ck(res.trivial, E.str() + " not reduced to trivial");
            std::size_t k = 0;
            for (auto& st : res.steps) {
                ck(compute_selmer(res.chain.structure(k)).dim() == st.dim_before, E.str() + " dim before step");
                ++k;
                ck(compute_selmer(res.chain.structure(k)).dim() == st.dim_after, E.str() + " dim after step");
                ck(st.dim_after < st.dim_before || st.kind == "S3a", E.str() + " step without drop");
                ++steps;
            }
            ck(compute_selmer(res.chain.structure(res.chain.primes.size())).dim() == 0, E.str() + " final dim");
        } catch (const ReductionExhausted& e) {
            ck(false, E.str() + ": " + e.what());
        }
    }
    return std::to_string(seeds) + " curves, " + std::to_string(steps) + " steps";
}

std::string constellation(Check& ck)
{
    auto s = build_system(0, 1, 2, 1, 6, 1, Profile::Relaxed);
    ck(beta_p(s, 2) == 16, "beta_2");
    ck(beta_p(s, 3) == mpq_class(81, 16), "beta_3");
    ck(beta_p(s, 5) == mpq_class(25, 32) && beta_p(s, 5).get_d() == 0.78125, "beta_5");
    auto r = default_region(s);
    for (long N : {10L, 20L, 30L}) {
        auto rep = count_and_compare(s, r, N);
        double count = 0;
        std::size_t pts = 0;
        for (long x = -N; x <= N; ++x)
            for (long y = -N; y <= N; ++y) {
                long v[4] = {36 * x + 1, 36 * x + 1296 * y + 37, 36 * x + 2592 * y + 73, 36 * y + 1};
                bool ok = true;
                for (long w : v) ok = ok && w > 0 && trial_prime(w);
                if (!ok) continue;
                double w = 1;
                for (long u : v) w *= std::log((double)u);
                count += w;
                ++pts;
            }
        ck(rep.witnesses.size() == pts, "witness count at N = " + std::to_string(N));
        ck(std::fabs(rep.count - count) <= 1e-9 * std::max(1.0, count), "weighted count at N = " + std::to_string(N));
    }
    auto big = count_and_compare(s, r, 600);
    ck(big.witnesses.size() >= 500, std::to_string(big.witnesses.size()) + " witnesses at N = 600");
    ck(big.ratio >= 0.75 && big.ratio <= 1.25, "ratio " + std::to_string(big.ratio));
    return "N = 600: " + std::to_string(big.witnesses.size()) + " witnesses, ratio " + std::to_string(big.ratio);
}

std::string end_to_end(Check& ck)
{
    const std::string root = RANKTWIST_SOURCE_DIR;
    auto cfg = load_config(root + "/configs/regression.cfg");
    auto first = run_experiment(cfg);
    if (!std::holds_alternative<Certificate>(first)) {
        ck(false, "search returned NotFound");
        return "no certificate";
    }
    auto& cert = std::get<Certificate>(first);
    ck(cert.doc["selmer"]["dim"] == 2, "dim Sel2");
    ck(cert.doc["point"]["non_torsion"] == true, "point torsion");
    auto v = verify_certificate(cert.doc);
    ck(v.ok, "verify failed at " + v.clause + ": " + v.reason);
    auto second = run_experiment(cfg);
    ck(std::holds_alternative<Certificate>(second) && std::get<Certificate>(second).dump() == cert.dump(),
       "re-run differs");
    ck(cert.dump() == read_file(root + "/tests/data/regression_certificate.json"), "differs from frozen certificate");
    std::string t = cert.doc["t"]["value"];
    return "t = " + t + ", dim 2, verify pass, byte-identical";
}

} // namespace

int main()
{
    struct Criterion {
        int id;
        double limit;  // seconds, 0 = none
        std::function<std::string(Check&)> run;
    };
    std::vector<Criterion> all{
        {1, 30, reciprocity},  {2, 0, form_consistency}, {3, 0, kummer_images}, {4, 1, matrices},
        {5, 0, trichotomy},    {6, 0, final_step},       {7, 0, baselines},     {8, 1, sign_tables},
        {9, 0, reduction},     {10, 120, constellation}, {11, 600, end_to_end},
    };
    int failed = 0;
    for (auto& c : all) {
        Check ck;
        std::string detail;
        auto t0 = std::chrono::steady_clock::now();
        try {
            detail = c.run(ck);
        } catch (const std::exception& e) {
            ck(false, std::string("exception: ") + e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.limit > 0 && secs >= c.limit) ck(false, "took " + std::to_string(secs) + " s");
        bool ok = ck.failures == 0;
        failed += !ok;
        std::cout << "criterion " << c.id << ": " << (ok ? "PASS" : "FAIL") << " (" << std::fixed;
        std::cout.precision(2);
        std::cout << secs << " s) " << detail;
        if (!ok) std::cout << "; " << ck.failures << " failures, first: " << ck.first;
        std::cout << "\n" << std::flush;
    }
    std::cout << (failed ? std::to_string(failed) + " criteria failed\n" : "all criteria pass\n");
    return failed ? 1 : 0;
}
