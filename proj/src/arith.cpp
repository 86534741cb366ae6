#include "ranktwist/arith.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ranktwist {

u64 pow_mod(u64 a, u64 e, u64 m)
{
    u64 r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mul_mod(r, a, m);
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    return r;
}

static bool mr_witness(u64 n, u64 a, u64 d, int s)
{
    u64 x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) return false;
    for (int i = 1; i < s; ++i) {
        x = mul_mod(x, x, n);
        if (x == n - 1) return false;
    }
    return true;
}

bool is_prime(u64 n)
{
    if (n < 2) return false;
    static const u64 small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (u64 p : small) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while (!(d & 1)) { d >>= 1; ++s; }
    for (u64 a : small) {
        if (mr_witness(n, a, d, s)) return false;
    }
    return true;
}

bool is_prime(const mpz_class& n)
{
    if (n < 2) return false;
    if (n.fits_ulong_p()) return is_prime((u64)n.get_ui());
    static const unsigned long bases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41};
    for (unsigned long p : bases) {
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return false;
    }
    mpz_class d = n - 1;
    unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
    d >>= s;
    mpz_class nm1 = n - 1, x;
    for (unsigned long a : bases) {
        mpz_class ma = a;
        mpz_powm(x.get_mpz_t(), ma.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
        if (x == 1 || x == nm1) continue;
        bool composite = true;
        for (unsigned long i = 1; i < s; ++i) {
            x = x * x % n;
            if (x == nm1) { composite = false; break; }
        }
        if (composite) return false;
    }
    // 13 bases are a proof below 3.3e24
    static const mpz_class limit("3317044064679887385961981");
    if (n < limit) return true;
    return mpz_probab_prime_p(n.get_mpz_t(), 25) > 0;
}

static u64 rho(u64 n)
{
    if (n % 2 == 0) return 2;
    for (u64 c = 1;; ++c) {
        u64 x = 2, y = 2, d = 1, q = 1, ys = 0;
        auto f = [&](u64 v) { return (mul_mod(v, v, n) + c) % n; };
        u64 r = 1;
        do {
            x = y;
            for (u64 i = 0; i < r; ++i) y = f(y);
            u64 k = 0;
            do {
                ys = y;
                for (u64 i = 0; i < std::min<u64>(128, r - k); ++i) {
                    y = f(y);
                    q = mul_mod(q, x > y ? x - y : y - x, n);
                }
                d = std::gcd(q, n);
                k += 128;
            } while (k < r && d == 1);
            r <<= 1;
        } while (d == 1);
        if (d == n) {
            do {
                ys = f(ys);
                d = std::gcd(x > ys ? x - ys : ys - x, n);
            } while (d == 1);
        }
        if (d != n) return d;
    }
}

static void factor_rec(u64 n, std::map<u64, int>& out)
{
    if (n == 1) return;
    if (is_prime(n)) { out[n]++; return; }
    u64 d = rho(n);
    factor_rec(d, out);
    factor_rec(n / d, out);
}

std::map<u64, int> factor(u64 n)
{
    if (n == 0) throw std::invalid_argument("factor: zero");
    std::map<u64, int> out;
    for (u64 p = 2; p < 1000 && p * p <= n; p += (p == 2 ? 1 : 2)) {
        while (n % p == 0) { out[p]++; n /= p; }
    }
    factor_rec(n, out);
    return out;
}

static mpz_class rho(const mpz_class& n)
{
    for (unsigned long c = 1;; ++c) {
        mpz_class x = 2, y = 2, d = 1;
        auto f = [&](const mpz_class& v) { return mpz_class((v * v + c) % n); };
        while (d == 1) {
            x = f(x);
            y = f(f(y));
            mpz_class diff = abs(x - y);
            mpz_gcd(d.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
        }
        if (d != n) return d;
    }
}

static void factor_rec(const mpz_class& n, std::map<mpz_class, int>& out)
{
    if (n == 1) return;
    if (n.fits_ulong_p()) {
        for (auto [p, e] : factor((u64)n.get_ui())) out[mpz_class((unsigned long)p)] += e;
        return;
    }
    if (is_prime(n)) { out[n]++; return; }
    mpz_class d = rho(n);
    factor_rec(d, out);
    factor_rec(mpz_class(n / d), out);
}

std::map<mpz_class, int> factor(mpz_class n)
{
    if (n == 0) throw std::invalid_argument("factor: zero");
    n = abs(n);
    std::map<mpz_class, int> out;
    for (unsigned long p = 2; p < 100000 && n > 1; p += (p == 2 ? 1 : 2)) {
        while (mpz_divisible_ui_p(n.get_mpz_t(), p)) { out[mpz_class(p)]++; n /= p; }
        if (mpz_class(p) * p > n) break;
    }
    factor_rec(n, out);
    return out;
}

int jacobi(i64 a, u64 n)
{
    u64 x = a >= 0 ? (u64)a % n : (n - (u64)(-(a + 1)) % n - 1) % n;
    u64 m = n;
    int t = 1;
    while (x) {
        while (!(x & 1)) {
            x >>= 1;
            u64 r = m & 7;
            if (r == 3 || r == 5) t = -t;
        }
        std::swap(x, m);
        if ((x & 3) == 3 && (m & 3) == 3) t = -t;
        x %= m;
    }
    return m == 1 ? t : 0;
}

int legendre(i64 a, u64 p)
{
    if (p == 2) throw std::invalid_argument("legendre: p = 2");
    return jacobi(a, p);
}

int legendre(const mpz_class& a, u64 p)
{
    mpz_class r = a % (unsigned long)p;
    if (r < 0) r += (unsigned long)p;
    return legendre((i64)r.get_ui(), p);
}

u64 least_nonresidue(u64 p)
{
    for (u64 u = 2;; ++u) {
        if (legendre((i64)u, p) == -1) return u;
    }
}

int valuation(u64 n, u64 p)
{
    if (n == 0) throw std::invalid_argument("valuation of zero");
    int v = 0;
    while (n % p == 0) { n /= p; ++v; }
    return v;
}

int valuation(const mpz_class& n, u64 p)
{
    if (n == 0) throw std::invalid_argument("valuation of zero");
    mpz_class m = n;
    mpz_class pp = (unsigned long)p;
    return (int)mpz_remove(m.get_mpz_t(), m.get_mpz_t(), pp.get_mpz_t());
}

std::vector<u64> primes_up_to(u64 n)
{
    std::vector<u64> out;
    if (n < 2) return out;
    std::vector<bool> comp(n + 1, false);
    for (u64 i = 2; i <= n; ++i) {
        if (comp[i]) continue;
        out.push_back(i);
        for (u64 j = i * i; j <= n; j += i) comp[j] = true;
    }
    return out;
}

u64 next_prime(u64 n)
{
    u64 c = n + 1;
    while (!is_prime(c)) ++c;
    return c;
}

u64 isqrt(u64 n)
{
    u64 r = (u64)std::sqrt((double)n);
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

mpz_class mpz_from_i128(i128 v)
{
    bool neg = v < 0;
    u128 u = neg ? (u128)(-(v + 1)) + 1 : (u128)v;
    mpz_class hi = (unsigned long)(u64)(u >> 64);
    mpz_class r = (hi << 64) + mpz_class((unsigned long)(u64)u);
    return neg ? mpz_class(-r) : r;
}

std::string to_string(const mpz_class& v) { return v.get_str(); }

} // namespace ranktwist
