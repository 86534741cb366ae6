#include "ranktwist/constellation.hpp"

#include <cmath>
#include <random>
#include <set>

namespace ranktwist {

std::string AffineForm::str() const
{
    return cx.get_str() + "*X + " + cy.get_str() + "*Y + " + c0.get_str();
}

mpz_class LinearFormSystem::c(const mpz_class& x) const { return m * m * kappa * x + 1; }
mpz_class LinearFormSystem::d(const mpz_class& y) const { return m * m * kappa * (m * m * kappa * y + lambda); }

std::vector<u64> odd_bad_primes(const mpz_class& a1, const mpz_class& a2, const mpz_class& a3)
{
    std::set<u64> out{3};
    for (mpz_class x : {mpz_class(a1 - a2), mpz_class(a1 - a3), mpz_class(a2 - a3)}) {
        if (x == 0) continue;
        for (auto& [p, e] : factor(x)) {
            if (p == 2) continue;
            if (!p.fits_ulong_p()) throw std::overflow_error("odd_bad_primes: prime beyond 64 bits");
            out.insert(p.get_ui());
        }
    }
    return {out.begin(), out.end()};
}

LinearFormSystem build_system(const mpz_class& a1, const mpz_class& a2, const mpz_class& a3,
                              const mpz_class& kappa, const mpz_class& m, const mpz_class& lambda, Profile profile)
{
    if (a1 == a2 || a1 == a3 || a2 == a3) throw SystemError("build_system: roots must be distinct");
    if (kappa == 0 || m == 0) throw SystemError("build_system: kappa and m must be nonzero");
    if (profile == Profile::Strict) {
        mpz_class N = 1;
        for (auto p : odd_bad_primes(a1, a2, a3)) N *= (unsigned long)p;
        mpz_class M = 8 * N;
        if (m % M != 0) throw SystemError("build_system: m must be divisible by " + M.get_str());
        mpz_class r = (lambda * kappa) % M;
        if (r < 0) r += M;
        if (r != 1) throw SystemError("build_system: lambda kappa must be 1 mod " + M.get_str());
    }
    LinearFormSystem s{a1, a2, a3, kappa, m, lambda, {}};
    mpz_class u = m * m * kappa;
    const mpz_class* a[3] = {&s.a1, &s.a2, &s.a3};
    for (int i = 0; i < 3; ++i) s.L[i] = AffineForm{u, *a[i] * u * u, *a[i] * u * lambda + 1};
    s.L[3] = AffineForm{0, u, lambda};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (s.L[i].cx * s.L[j].cy - s.L[i].cy * s.L[j].cx == 0)
                throw SystemError("build_system: homogeneous parts of L" + std::to_string(i + 1) + " and L" +
                                  std::to_string(j + 1) + " are dependent");
    return s;
}

namespace {

u64 mod_u(const mpz_class& x, u64 p)
{
    return mpz_fdiv_ui(x.get_mpz_t(), p);
}

// residue pairs mod p where no form vanishes; scans x, solves for y
u64 surviving_pairs(const LinearFormSystem& s, u64 p)
{
    struct F { u64 cx, cy, c0, cy_inv; };
    std::vector<F> fs;
    for (auto& L : s.L) {
        F f{mod_u(L.cx, p), mod_u(L.cy, p), mod_u(L.c0, p), 0};
        if (f.cy) f.cy_inv = pow_mod(f.cy, p - 2, p);
        fs.push_back(f);
    }
    u64 total = 0;
    for (u64 x = 0; x < p; ++x) {
        u64 killed[4];
        int n = 0;
        bool all = false;
        for (auto& f : fs) {
            u64 v = (mul_mod(f.cx, x, p) + f.c0) % p;
            if (f.cy == 0) {
                if (v == 0) all = true;
                continue;
            }
            u64 y = mul_mod((p - v) % p, f.cy_inv, p);
            bool dup = false;
            for (int k = 0; k < n; ++k) dup = dup || killed[k] == y;
            if (!dup) killed[n++] = y;
        }
        if (!all) total += p - n;
    }
    return total;
}

} // namespace

mpq_class beta_p(const LinearFormSystem& s, u64 p)
{
    if (!is_prime(p)) throw std::invalid_argument("beta_p: " + std::to_string(p) + " is not prime");
    mpz_class pp = (unsigned long)p, ph = (unsigned long)(p - 1);
    mpq_class scale(pp * pp * pp * pp, ph * ph * ph * ph);
    mpq_class out = scale * mpq_class(mpz_class((unsigned long)surviving_pairs(s, p)), pp * pp);
    out.canonicalize();
    return out;
}

Admissibility admissibility_check(const LinearFormSystem& s, u64 p_bound)
{
    // for p not dividing m kappa every form is a line mod p, leaving p^2 - 4p > 0 pairs once p >= 5
    std::set<u64> ps;
    for (auto p : primes_up_to(std::max<u64>(p_bound, 5))) ps.insert(p);
    mpz_class mk = s.m * s.kappa;
    if (mk < 0) mk = -mk;
    for (auto& [p, e] : factor(mk)) {
        if (!p.fits_ulong_p()) throw std::overflow_error("admissibility_check: prime beyond 64 bits");
        ps.insert(p.get_ui());
    }
    for (auto p : ps)
        if (surviving_pairs(s, p) == 0) return {false, p};
    return {};
}

SingularSeries singular_series(const LinearFormSystem& s, u64 cutoff)
{
    auto adm = admissibility_check(s, std::min<u64>(cutoff, 100));
    if (!adm.ok) throw NotAdmissible(adm.prime);
    SingularSeries out;
    out.cutoff = cutoff;
    double prod = 1, at_tenth = 1;
    for (auto p : primes_up_to(cutoff)) {
        prod *= beta_p(s, p).get_d();
        if (p <= cutoff / 10) at_tenth = prod;
    }
    out.value = prod;
    out.decade_change = std::fabs(prod / at_tenth - 1);
    return out;
}

bool Region::contains(const mpq_class& x, const mpq_class& y) const
{
    for (auto& h : planes) if (!h.contains(x, y)) return false;
    return true;
}

Region Region::homogeneous() const
{
    Region r = *this;
    for (auto& h : r.planes) h.c = 0;
    return r;
}

Region default_region(const LinearFormSystem& s)
{
    Region r;
    for (int i = 0; i < 3; ++i) r.planes.push_back({mpq_class(s.L[i].cx), mpq_class(s.L[i].cy), mpq_class(s.L[i].c0)});
    int sg = sgn(s.kappa);
    r.planes.push_back({mpq_class(sg * s.L[3].cx), mpq_class(sg * s.L[3].cy), mpq_class(sg * s.L[3].c0)});
    return r;
}

namespace {

using Pt = std::pair<mpq_class, mpq_class>;

// closed half-plane clip of a convex polygon
std::vector<Pt> clip(const std::vector<Pt>& poly, const HalfPlane& h)
{
    std::vector<Pt> out;
    auto val = [&](const Pt& q) { return mpq_class(h.a * q.first + h.b * q.second + h.c); };
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Pt& P = poly[i];
        const Pt& Q = poly[(i + 1) % poly.size()];
        mpq_class vp = val(P), vq = val(Q);
        if (vp >= 0) out.push_back(P);
        if ((vp > 0 && vq < 0) || (vp < 0 && vq > 0)) {
            mpq_class t = vp / (vp - vq);
            out.push_back({P.first + t * (Q.first - P.first), P.second + t * (Q.second - P.second)});
        }
    }
    return out;
}

} // namespace

mpq_class region_volume_exact(const Region& r)
{
    std::vector<Pt> poly{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
    for (auto& h : r.homogeneous().planes) {
        poly = clip(poly, h);
        if (poly.empty()) break;
    }
    mpq_class area = 0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Pt& P = poly[i];
        const Pt& Q = poly[(i + 1) % poly.size()];
        area += P.first * Q.second - Q.first * P.second;
    }
    area = abs(area) / 2;
    return area;
}

double region_volume(const Region& r)
{
    mpq_class a = region_volume_exact(r);
    if (a == 0) throw DegenerateRegion("region_volume: region has empty interior");
    return a.get_d();
}

MonteCarloVolume region_volume_mc(const Region& r, std::size_t samples, std::uint64_t seed)
{
    if (samples == 0) throw std::invalid_argument("region_volume_mc: no samples");
    Region h = r.homogeneous();
    std::vector<std::array<double, 2>> pl;
    for (auto& p : h.planes) pl.push_back({p.a.get_d(), p.b.get_d()});
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    std::size_t hits = 0;
    for (std::size_t k = 0; k < samples; ++k) {
        double x = u(rng), y = u(rng);
        bool in = true;
        for (auto& p : pl) in = in && p[0] * x + p[1] * y > 0;
        hits += in;
    }
    double f = double(hits) / double(samples);
    return {4 * f, 4 * std::sqrt(f * (1 - f) / double(samples))};
}

namespace {

struct Kahan {
    double sum = 0, comp = 0;
    void add(double v)
    {
        double y = v - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

bool fits64(const mpz_class& x) { return x.fits_slong_p(); }

bool abs_is_prime(const mpz_class& v)
{
    mpz_class a = abs(v);
    if (a.fits_ulong_p()) return is_prime((u64)a.get_ui());
    return is_prime(a);
}

} // namespace

ConstellationReport count_and_compare(const LinearFormSystem& s, const Region& r, long N, const CountOptions& opt)
{
    if (N < 0) throw std::invalid_argument("count_and_compare: negative N");
    ConstellationReport rep;
    rep.N = N;
    rep.cutoff = opt.cutoff;
    auto adm = admissibility_check(s, std::min<u64>(opt.cutoff, 100));
    if (!adm.ok) {
        rep.flags.push_back("inadmissible at " + std::to_string(adm.prime));
        return rep;
    }
    for (auto p : primes_up_to(opt.beta_report_bound)) rep.betas.push_back({p, beta_p(s, p)});
    rep.series = singular_series(s, opt.cutoff);
    rep.volume_constant = region_volume(r);

    // region allowing a form to go negative: flagged, the count still uses |L_i|
    Region hom = r.homogeneous();
    for (int i = 0; i < 4; ++i) {
        Region t = hom;
        int sg = i == 3 ? sgn(s.kappa) : 1;
        t.planes.push_back({mpq_class(-sg * s.L[i].cx), mpq_class(-sg * s.L[i].cy), 0});
        if (region_volume_exact(t) > 0)
            rep.flags.push_back("region admits " + std::string(i == 3 ? "kappa L4" : "L" + std::to_string(i + 1)) +
                                " < 0");
    }

    // integer half-planes for fast membership
    struct IPlane { mpz_class a, b, c; };
    std::vector<IPlane> ip;
    for (auto& h : r.planes) {
        mpz_class l = lcm(lcm(h.a.get_den(), h.b.get_den()), h.c.get_den());
        ip.push_back({mpq_class(h.a * l).get_num(), mpq_class(h.b * l).get_num(), mpq_class(h.c * l).get_num()});
    }
    bool fast = true;
    for (auto& p : ip) fast = fast && fits64(p.a) && fits64(p.b) && fits64(p.c);
    for (auto& L : s.L) fast = fast && fits64(L.cx) && fits64(L.cy) && fits64(L.c0);

    Kahan total;
    for (long x0 = -N; x0 <= N; x0 += opt.chunk) {
        Kahan strip;
        long x1 = std::min(N, x0 + opt.chunk - 1);
        for (long x = x0; x <= x1; ++x)
            for (long y = -N; y <= N; ++y) {
                std::array<mpz_class, 4> vals;
                if (fast) {
                    bool in = true;
                    for (auto& p : ip) {
                        i128 v = (i128)p.a.get_si() * x + (i128)p.b.get_si() * y + (i128)p.c.get_si();
                        if (v <= 0) { in = false; break; }
                    }
                    if (!in) continue;
                    bool ok = true;
                    for (int i = 3; i >= 0 && ok; --i) {
                        i128 v = (i128)s.L[i].cx.get_si() * x + (i128)s.L[i].cy.get_si() * y + (i128)s.L[i].c0.get_si();
                        u128 a = v < 0 ? (u128)(-v) : (u128)v;
                        if (a >> 64) {
                            vals[i] = mpz_from_i128(v);
                            ok = abs_is_prime(vals[i]);
                        } else {
                            ok = is_prime((u64)a);
                            if (ok) vals[i] = mpz_from_i128(v);
                        }
                    }
                    if (!ok) continue;
                } else {
                    if (!r.contains(mpq_class(x), mpq_class(y))) continue;
                    bool ok = true;
                    for (int i = 3; i >= 0 && ok; --i) {
                        vals[i] = s.L[i].eval(x, y);
                        ok = abs_is_prime(vals[i]);
                    }
                    if (!ok) continue;
                }
                double w = 1;
                for (auto& v : vals) w *= std::log(mpz_class(abs(v)).get_d());
                strip.add(w);
                rep.witnesses.push_back({x, y, vals});
            }
        total.add(strip.sum);
    }
    rep.count = total.sum;
    rep.prediction = rep.volume_constant * double(N) * double(N) * rep.series.value;
    rep.ratio = rep.prediction > 0 ? rep.count / rep.prediction : 0;
    return rep;
}

} // namespace ranktwist
