#include "ranktwist/curve2tor.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>

namespace ranktwist {

bool Curve::in_T(Place v) const { return std::binary_search(T.begin(), T.end(), v); }

std::vector<u64> Curve::finite_T() const
{
    std::vector<u64> out;
    for (auto v : T) if (!v.is_real()) out.push_back(v.p);
    return out;
}

std::string Curve::str() const
{
    return "(" + a1.get_str() + "," + a2.get_str() + "," + a3.get_str() + ")";
}

Curve make_curve(const mpz_class& a1, const mpz_class& a2, const mpz_class& a3)
{
    if (a1 == a2 || a1 == a3 || a2 == a3) throw CoincidentRoots("make_curve: roots must be distinct");
    Curve E;
    E.a1 = a1; E.a2 = a2; E.a3 = a3;
    E.alpha = a1 - a2;
    E.beta = a1 - a3;
    E.gamma = a2 - a3;
    mpz_class abc = E.alpha * E.beta * E.gamma;
    E.disc = 16 * abc * abc;
    std::set<Place> T{Place::infinity(), Place{2}, Place{3}};
    for (const auto* x : {&E.alpha, &E.beta, &E.gamma}) {
        for (auto& [p, e] : factor(*x)) {
            if (!p.fits_ulong_p()) throw std::overflow_error("make_curve: bad prime beyond 64 bits");
            T.insert(Place{p.get_ui()});
        }
    }
    E.T.assign(T.begin(), T.end());
    return E;
}

Curve twist(const Curve& E, const mpz_class& d)
{
    if (d == 0) throw std::invalid_argument("twist: zero");
    return make_curve(E.a1 * d, E.a2 * d, E.a3 * d);
}

Curve twist(const Curve& E, const SquareClass& d) { return twist(E, d.value()); }

bool CurvePoint::operator<(const CurvePoint& o) const
{
    if (infinity != o.infinity) return infinity;
    if (infinity) return false;
    if (x != o.x) return x < o.x;
    return y < o.y;
}

std::string CurvePoint::str() const
{
    if (infinity) return "O";
    return "(" + x.get_str() + ", " + y.get_str() + ")";
}

bool on_curve(const Curve& E, const CurvePoint& P)
{
    return P.infinity || P.y * P.y == E.f(P.x);
}

CurvePoint negate(const CurvePoint& P)
{
    if (P.infinity) return P;
    return CurvePoint::affine(P.x, -P.y);
}

CurvePoint add(const Curve& E, const CurvePoint& P, const CurvePoint& Q)
{
    if (P.infinity) return Q;
    if (Q.infinity) return P;
    mpq_class lam;
    if (P.x == Q.x) {
        if (P.y != Q.y || P.y == 0) return CurvePoint::identity();
        mpq_class A = E.A(), B = E.B();
        lam = (3 * P.x * P.x + 2 * A * P.x + B) / (2 * P.y);
    } else {
        lam = (Q.y - P.y) / (Q.x - P.x);
    }
    mpq_class x3 = lam * lam - mpq_class(E.A()) - P.x - Q.x;
    mpq_class y3 = lam * (P.x - x3) - P.y;
    return CurvePoint::affine(x3, y3);
}

CurvePoint mul(const Curve& E, const CurvePoint& P, long n)
{
    CurvePoint base = n < 0 ? negate(P) : P;
    unsigned long k = n < 0 ? -(unsigned long)n : (unsigned long)n;
    CurvePoint r = CurvePoint::identity();
    while (k) {
        if (k & 1) r = add(E, r, base);
        base = add(E, base, base);
        k >>= 1;
    }
    return r;
}

std::vector<CurvePoint> two_torsion(const Curve& E)
{
    return {CurvePoint::identity(), CurvePoint::affine(E.a1, 0), CurvePoint::affine(E.a2, 0),
            CurvePoint::affine(E.a3, 0)};
}

std::pair<SquareClass, SquareClass> kummer_of_point(const Curve& E, const CurvePoint& P)
{
    if (P.infinity) return {SquareClass(), SquareClass()};
    if (P.x == E.a1) {
        return {SquareClass::of(mpz_class(E.alpha * E.beta)), SquareClass::of(E.alpha)};
    }
    if (P.x == E.a2) {
        return {SquareClass::of(mpz_class(-E.alpha)), SquareClass::of(mpz_class(-E.alpha * E.gamma))};
    }
    return {SquareClass::of(mpq_class(P.x - E.a1)), SquareClass::of(mpq_class(P.x - E.a2))};
}

std::uint32_t local_kummer(const Curve& E, const CurvePoint& P, Place v)
{
    if (P.infinity) return 0;
    if (P.x == E.a1)
        return pack_pair(local_class_of(mpz_class(E.alpha * E.beta), v), local_class_of(E.alpha, v));
    if (P.x == E.a2)
        return pack_pair(local_class_of(mpz_class(-E.alpha), v), local_class_of(mpz_class(-E.alpha * E.gamma), v));
    return pack_pair(local_class_of(mpq_class(P.x - E.a1), v), local_class_of(mpq_class(P.x - E.a2), v));
}

std::vector<std::uint32_t> local_torsion_images(const Curve& E, Place v)
{
    std::vector<std::uint32_t> out;
    for (auto& P : two_torsion(E)) out.push_back(local_kummer(E, P, v));
    return out;
}

namespace {

struct DiskSearch {
    Place v;
    u64 p;
    int need;  // x - r has constant class on c + p^m Z_p once m - v(c - r) >= need
    mpz_class r[3];
    std::set<std::uint32_t>* out;

    void record(const LocalClass c[3])
    {
        if ((c[0].bits ^ c[1].bits ^ c[2].bits) != 0) return;  // f(x) must be a square
        out->insert(pack_pair(c[0], c[1]));
    }

    void run(const mpz_class& c, int m, const mpz_class& pm)
    {
        LocalClass cls[3];
        int inside = -1, n_inside = 0;
        bool split = false;
        for (int i = 0; i < 3; ++i) {
            mpz_class diff = c - r[i];
            if (mpz_divisible_p(diff.get_mpz_t(), pm.get_mpz_t())) {
                inside = i;
                ++n_inside;
                continue;
            }
            int e = valuation(diff, p);
            if (m - e >= need) cls[i] = local_class_of(diff, v);
            else split = true;
        }
        if (!split && n_inside == 0) {
            record(cls);
            return;
        }
        if (!split && n_inside == 1) {
            // x - r ranges over every class of p^m Z_p \ {0}
            int j = (inside + 1) % 3, k = (inside + 2) % 3;
            cls[inside] = cls[j] * cls[k];
            record(cls);
            return;
        }
        mpz_class child_pm = pm * (unsigned long)p;
        for (u64 t = 0; t < p; ++t) run(c + pm * (unsigned long)t, m + 1, child_pm);
    }
};

std::set<std::uint32_t> real_pairs(const Curve& E, Place v)
{
    std::vector<mpz_class> roots{E.a1, E.a2, E.a3};
    std::sort(roots.begin(), roots.end());
    std::vector<mpq_class> xs{mpq_class(roots[0] - 1), mpq_class(roots[2] + 1)};
    xs.push_back(mpq_class(roots[0] + roots[1], 2));
    xs.push_back(mpq_class(roots[1] + roots[2], 2));
    std::set<std::uint32_t> out;
    for (auto& x : xs) {
        if (E.f(x) < 0) continue;
        out.insert(pack_pair(local_class_of(mpq_class(x - E.a1), v), local_class_of(mpq_class(x - E.a2), v)));
    }
    for (auto t : local_torsion_images(E, v)) out.insert(t);
    return out;
}

} // namespace

std::set<std::uint32_t> local_solvable_pairs(const Curve& E, Place v)
{
    if (v.is_real()) return real_pairs(E, v);
    std::set<std::uint32_t> out;
    DiskSearch s;
    s.v = v;
    s.p = v.p;
    s.need = v.p == 2 ? 3 : 1;
    s.out = &out;
    // x in p^{-2e} Z_p: scale by p^{2e}; below v(x) = -4 only the trivial pair occurs
    mpz_class scale = 1;
    for (int e = 0; e <= 2; ++e) {
        s.r[0] = E.a1 * scale;
        s.r[1] = E.a2 * scale;
        s.r[2] = E.a3 * scale;
        s.run(0, 0, 1);
        scale *= (unsigned long)(v.p * v.p);
    }
    return out;
}

bool local_membership(const Curve& E, const LocalClass& b1, const LocalClass& b2, Place v)
{
    if (b1.place != v || b2.place != v) throw std::invalid_argument("local_membership: wrong place");
    return local_solvable_pairs(E, v).count(pack_pair(b1, b2)) > 0;
}

QuadSpace kummer_quadratic_space(const Curve& E, Place v)
{
    return local_quadratic_space(v, local_class_of(mpz_class(-E.alpha * E.gamma), v),
                                 local_class_of(mpz_class(E.alpha * E.beta), v));
}

LocalImage local_image(const Curve& E, Place v)
{
    int d = local_dim(v);
    Subspace s(2 * d);
    for (auto t : local_torsion_images(E, v)) s.add(t);
    // the image has dimension exactly d, so torsion spanning d dimensions is all of it
    if (s.dim() < d) {
        auto pairs = local_solvable_pairs(E, v);
        for (auto x : pairs) s.add(x);
        if (pairs.size() != (std::size_t(1) << s.dim()))
            throw LocalImageError("local_image: solvable pairs at " + v.str() + " do not form a group");
    }
    if (s.dim() != d)
        throw LocalImageError("local_image: dimension " + std::to_string(s.dim()) + " at " + v.str());
    if (!kummer_quadratic_space(E, v).is_isotropic(s))
        throw LocalImageError("local_image: not isotropic at " + v.str());
    return LocalImage{v, s};
}

Subspace unramified_subspace(Place v)
{
    if (v.is_real() || v.p == 2) throw std::invalid_argument("unramified_subspace: odd primes only");
    return Subspace(4, {1u, 1u << 2});
}

Subspace twisted_condition(const Curve& E, Place v, const LocalClass& pi)
{
    LocalClass a = local_class_of(E.alpha, v);
    LocalClass ab = local_class_of(mpz_class(E.alpha * E.beta), v);
    LocalClass ag = local_class_of(mpz_class(-E.alpha * E.gamma), v);
    LocalClass m1 = local_class_of(mpz_class(-1), v);
    return Subspace(2 * local_dim(v),
                    {pack_pair(ab, pi * a), pack_pair(m1 * pi * a, ag)});
}

std::vector<mpz_class> integer_roots_cubic(const mpz_class& A, const mpz_class& B, const mpz_class& C)
{
    auto g = [&](const mpz_class& x) { return mpz_class(((x + A) * x + B) * x + C); };
    mpz_class M = 1 + std::max({abs(A), abs(B), abs(C)});
    std::set<mpz_class> roots;
    auto bisect = [&](mpz_class lo, mpz_class hi, bool increasing) {
        while (lo <= hi) {
            mpz_class mid = lo + (hi - lo) / 2;
            if (hi - lo < 0) break;
            mpz_class val = g(mid);
            if (val == 0) { roots.insert(mid); return; }
            if ((val < 0) == increasing) lo = mid + 1;
            else hi = mid - 1;
        }
    };
    auto brute = [&](const mpz_class& lo, const mpz_class& hi) {
        for (mpz_class x = lo; x <= hi; ++x) if (g(x) == 0) roots.insert(x);
    };
    auto fdiv = [](const mpz_class& a, long b) { mpz_class q; mpz_fdiv_q_ui(q.get_mpz_t(), a.get_mpz_t(), b); return q; };
    auto cdiv = [](const mpz_class& a, long b) { mpz_class q; mpz_cdiv_q_ui(q.get_mpz_t(), a.get_mpz_t(), b); return q; };
    mpz_class D = A * A - 3 * B;
    if (D <= 0) {
        bisect(-M, M, true);
    } else {
        mpz_class s = sqrt(D);
        mpz_class e1 = fdiv(mpz_class(-A - s - 1), 3) - 1, f1 = cdiv(mpz_class(-A - s), 3) + 1;
        mpz_class e2 = fdiv(mpz_class(-A + s), 3) - 1, f2 = cdiv(mpz_class(-A + s + 1), 3) + 1;
        bisect(-M, e1, true);
        brute(e1, f1);
        if (f1 <= e2) bisect(f1, e2, false);
        brute(e2, f2);
        bisect(f2, M, true);
    }
    return {roots.begin(), roots.end()};
}

std::string TorsionGroup::str() const
{
    return "Z/" + std::to_string(n2) + " x Z/" + std::to_string(n);
}

static std::vector<mpz_class> divisors(const mpz_class& n)
{
    std::vector<mpz_class> out{1};
    for (auto& [p, e] : factor(n)) {
        std::size_t sz = out.size();
        mpz_class pk = 1;
        for (int k = 1; k <= e; ++k) {
            pk *= p;
            for (std::size_t i = 0; i < sz; ++i) out.push_back(out[i] * pk);
        }
    }
    return out;
}

TorsionGroup torsion_subgroup(const Curve& E)
{
    std::set<CurvePoint> pts;
    for (auto& P : two_torsion(E)) pts.insert(P);
    // Lutz-Nagell: torsion points are integral with y = 0 or y | alpha beta gamma
    for (auto& y : divisors(mpz_class(E.alpha * E.beta * E.gamma))) {
        for (auto& x : integer_roots_cubic(E.A(), E.B(), mpz_class(E.C() - y * y))) {
            for (int s : {1, -1}) {
                CurvePoint P = CurvePoint::affine(x, mpq_class(s * y));
                if (is_torsion(E, P)) pts.insert(P);
            }
        }
    }
    TorsionGroup g;
    g.points.assign(pts.begin(), pts.end());
    g.n2 = 2;
    g.n = (int)g.points.size() / 2;
    return g;
}

bool is_torsion(const Curve& E, const CurvePoint& P)
{
    // full 2-torsion over Q forces element orders dividing 24
    return mul(E, P, 24).infinity;
}

int additive_root_number(u64 p, int vd)
{
    return ((vd * (long)p / 12) & 1) ? -1 : 1;
}

RootNumber root_number_local(const Curve& E, Place v)
{
    if (v.is_real()) return {true, -1, "archimedean"};
    u64 p = v.p;
    // translate a1 to 0: y^2 = x (x + alpha)(x + beta)
    mpz_class al = E.alpha, be = E.beta;
    mpz_class a2 = al + be, a4 = al * be;
    mpz_class c4 = 16 * (a2 * a2 - 3 * a4);
    mpz_class c6 = -64 * a2 * a2 * a2 + 288 * a2 * a4;
    mpz_class disc = E.disc;
    auto vp = [p](const mpz_class& x) { return x == 0 ? 1000 : valuation(x, p); };
    if (p == 2) {
        // u = 2 rescaling while (c4/16, c6/64) still come from an integral model
        while (vp(c4) >= 4 && vp(c6) >= 6 && vp(disc) >= 12) {
            mpz_class c4n = c4 / 16, c6n = c6 / 64;
            mpz_class m4 = c6n % 4, m32 = c6n % 32;
            if (m4 < 0) m4 += 4;
            if (m32 < 0) m32 += 32;
            bool kraus = (vp(c4n) == 0 && m4 == 3) || (vp(c4n) >= 4 && (m32 == 0 || m32 == 8));
            if (!kraus) break;
            c4 = c4n; c6 = c6n; disc /= 4096;
        }
        if (vp(disc) == 0) return {true, 1, "good"};
        if (vp(c4) == 0) {
            mpz_class r = c6 % 8;
            if (r < 0) r += 8;
            bool split = r == 7;
            return {true, split ? -1 : 1, split ? "split" : "nonsplit"};
        }
        return {false, 0, "additive"};
    }
    while (vp(al) >= 2 && vp(be) >= 2) {
        mpz_class pp = (unsigned long)(p * p);
        al /= pp; be /= pp;
        c4 /= pp * pp;
        c6 /= pp * pp * pp;
        disc /= pp * pp * pp * pp * pp * pp;
    }
    mpz_class ga = be - al;
    int z = (vp(al) > 0) + (vp(be) > 0) + (vp(ga) > 0);
    if (z == 0) return {true, 1, "good"};
    if (z == 1) {
        bool split = legendre(mpz_class(-c6), p) == 1;
        return {true, split ? -1 : 1, split ? "split" : "nonsplit"};
    }
    if (p == 3) return {false, 0, "additive"};
    int vd = vp(disc);
    if (3 * vp(c4) < vd) return {true, legendre((i64)-1, p), "additive"};
    return {true, additive_root_number(p, vd), "additive"};
}

std::vector<CurvePoint> point_search(const Curve& E, long bound)
{
    std::set<CurvePoint> pts;
    for (auto& P : two_torsion(E)) if (!P.infinity) pts.insert(P);
    for (long w = 1; w <= bound; ++w) {
        mpz_class w2 = (long)(w * w);
        for (long u = -bound; u <= bound; ++u) {
            if (std::gcd(u, w) != 1) continue;
            mpz_class U = u;
            mpz_class F = (U - E.a1 * w2) * (U - E.a2 * w2) * (U - E.a3 * w2);
            if (F < 0 || !mpz_perfect_square_p(F.get_mpz_t())) continue;
            mpz_class s = sqrt(F);
            mpq_class x(U, w2), y(s, mpz_class(w2 * w));
            x.canonicalize();
            y.canonicalize();
            pts.insert(CurvePoint::affine(x, y));
            pts.insert(CurvePoint::affine(x, -y));
        }
    }
    return {pts.begin(), pts.end()};
}

} // namespace ranktwist
