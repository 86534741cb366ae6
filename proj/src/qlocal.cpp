#include "ranktwist/qlocal.hpp"

#include <algorithm>
#include <numeric>

namespace ranktwist {

Place Place::prime(u64 q)
{
    if (!is_prime(q)) throw std::invalid_argument("Place::prime: " + std::to_string(q) + " is not prime");
    return Place{q};
}

int local_dim(Place v)
{
    if (v.is_real()) return 1;
    return v.p == 2 ? 3 : 2;
}

SquareClass::SquareClass(int sign, std::vector<u64> primes) : sign_(sign < 0 ? -1 : 1), primes_(std::move(primes))
{
    std::sort(primes_.begin(), primes_.end());
    // duplicates cancel
    std::vector<u64> out;
    for (std::size_t i = 0; i < primes_.size();) {
        std::size_t j = i;
        while (j < primes_.size() && primes_[j] == primes_[i]) ++j;
        if ((j - i) & 1) out.push_back(primes_[i]);
        i = j;
    }
    primes_ = std::move(out);
}

SquareClass SquareClass::of(i64 n)
{
    if (n == 0) throw std::invalid_argument("SquareClass: zero");
    std::vector<u64> ps;
    u64 a = n < 0 ? (u64)(-(n + 1)) + 1 : (u64)n;
    for (auto [p, e] : factor(a)) if (e & 1) ps.push_back(p);
    return SquareClass(n < 0 ? -1 : 1, ps);
}

SquareClass SquareClass::of(const mpz_class& n)
{
    if (n == 0) throw std::invalid_argument("SquareClass: zero");
    std::vector<u64> ps;
    for (auto& [p, e] : factor(n)) {
        if (!(e & 1)) continue;
        if (!p.fits_ulong_p()) throw std::overflow_error("SquareClass: prime factor beyond 64 bits");
        ps.push_back(p.get_ui());
    }
    return SquareClass(sgn(n), ps);
}

SquareClass SquareClass::of(const mpq_class& x)
{
    return of(mpz_class(x.get_num() * x.get_den()));
}

bool SquareClass::divisible_by(u64 p) const
{
    return std::binary_search(primes_.begin(), primes_.end(), p);
}

mpz_class SquareClass::value() const
{
    mpz_class v = sign_;
    for (auto p : primes_) v *= (unsigned long)p;
    return v;
}

SquareClass SquareClass::operator*(const SquareClass& o) const
{
    SquareClass r;
    r.sign_ = sign_ * o.sign_;
    std::set_symmetric_difference(primes_.begin(), primes_.end(), o.primes_.begin(), o.primes_.end(),
                                  std::back_inserter(r.primes_));
    return r;
}

bool SquareClass::operator<(const SquareClass& o) const
{
    if (primes_ != o.primes_) return primes_ < o.primes_;
    return sign_ > o.sign_;
}

i64 LocalClass::representative() const
{
    if (place.is_real()) return bits & 1 ? -1 : 1;
    if (place.p == 2) {
        i64 r = 1;
        if (bits & 1) r = -r;
        if (bits & 2) r *= 2;
        if (bits & 4) r *= 5;
        return r;
    }
    i64 r = 1;
    if (bits & 1) r *= (i64)least_nonresidue(place.p);
    if (bits & 2) r *= (i64)place.p;
    return r;
}

LocalClass LocalClass::operator*(const LocalClass& o) const
{
    if (place != o.place) throw std::invalid_argument("LocalClass: places differ");
    return LocalClass{place, bits ^ o.bits};
}

bool LocalClass::odd_valuation() const
{
    if (place.is_real()) return false;
    return bits & 2;
}

std::string LocalClass::str() const
{
    return std::to_string(representative()) + "@" + place.str();
}

static unsigned unit_bits_2(u64 w8)
{
    switch (w8) {
    case 1: return 0;
    case 3: return 0b101;
    case 5: return 0b100;
    case 7: return 0b001;
    }
    throw std::logic_error("unit_bits_2: even residue");
}

LocalClass restrict(const SquareClass& x, Place v)
{
    if (v.is_real()) return LocalClass{v, x.sign() < 0 ? 1u : 0u};
    u64 p = v.p;
    unsigned bits = 0;
    if (p == 2) {
        u64 w = x.sign() < 0 ? 7 : 1;
        for (auto q : x.support()) {
            if (q == 2) bits |= 2;
            else w = w * (q % 8) % 8;
        }
        return LocalClass{v, bits | unit_bits_2(w)};
    }
    u64 w = x.sign() < 0 ? p - 1 : 1;
    for (auto q : x.support()) {
        if (q == p) bits |= 2;
        else w = mul_mod(w, q % p, p);
    }
    if (legendre((i64)w, p) == -1) bits |= 1;
    return LocalClass{v, bits};
}

LocalClass local_class_of(const mpz_class& n, Place v)
{
    if (n == 0) throw std::invalid_argument("local_class_of: zero");
    if (v.is_real()) return LocalClass{v, n < 0 ? 1u : 0u};
    mpz_class m = n;
    mpz_class pp = (unsigned long)v.p;
    unsigned long e = mpz_remove(m.get_mpz_t(), m.get_mpz_t(), pp.get_mpz_t());
    unsigned bits = (e & 1) ? 2 : 0;
    if (v.p == 2) {
        mpz_class r = m % 8;
        if (r < 0) r += 8;
        return LocalClass{v, bits | unit_bits_2(r.get_ui())};
    }
    if (legendre(m, v.p) == -1) bits |= 1;
    return LocalClass{v, bits};
}

LocalClass local_class_of(const mpq_class& x, Place v)
{
    return local_class_of(mpz_class(x.get_num() * x.get_den()), v);
}

int hilbert_symbol(const LocalClass& a, const LocalClass& b)
{
    if (a.place != b.place) throw std::invalid_argument("hilbert_symbol: places differ");
    Place v = a.place;
    unsigned e;
    if (v.is_real()) {
        e = a.bits & b.bits & 1;
    } else if (v.p == 2) {
        unsigned sa = a.bits & 1, ta = a.bits >> 1 & 1, fa = a.bits >> 2 & 1;
        unsigned sb = b.bits & 1, tb = b.bits >> 1 & 1, fb = b.bits >> 2 & 1;
        e = (sa & sb) ^ (ta & fb) ^ (tb & fa);
    } else {
        unsigned ua = a.bits & 1, pa = a.bits >> 1 & 1;
        unsigned ub = b.bits & 1, pb = b.bits >> 1 & 1;
        e = (pa & pb & ((v.p - 1) / 2 & 1)) ^ (ua & pb) ^ (ub & pa);
    }
    return e ? -1 : 1;
}

int hilbert_symbol(const SquareClass& a, const SquareClass& b, Place v)
{
    return hilbert_symbol(restrict(a, v), restrict(b, v));
}

int hilbert_symbol(const mpq_class& a, const mpq_class& b, Place v)
{
    if (a == 0 || b == 0) throw std::invalid_argument("hilbert_symbol: zero input");
    return hilbert_symbol(local_class_of(a, v), local_class_of(b, v));
}

std::set<Place> bad_places(const SquareClass& a)
{
    std::set<Place> s{Place::infinity(), Place{2}};
    for (auto p : a.support()) s.insert(Place{p});
    return s;
}

ReciprocityAudit reciprocity_audit(const SquareClass& a, const SquareClass& b)
{
    auto places = bad_places(a);
    for (auto v : bad_places(b)) places.insert(v);
    ReciprocityAudit r;
    for (auto v : places) {
        int s = hilbert_symbol(a, b, v);
        r.symbols[v] = s;
        r.product *= s;
    }
    return r;
}

SignedPrime find_prime(const PrimeQuery& query)
{
    // CRT: x = r mod M
    u128 M = 1, r = 0;
    for (auto [m, res] : query.congruences) {
        if (m == 0) throw Inconsistent("find_prime: zero modulus");
        res %= m;
        if (std::gcd(res, m) != 1 && m > 1) throw Inconsistent("find_prime: residue not coprime to modulus");
        u64 g = std::gcd((u64)M, m);
        if ((r % g) != res % g) throw Inconsistent("find_prime: incompatible congruences");
        // step through r + k*M until it matches res mod m
        u64 step = (u64)(M % m), cur = (u64)(r % m);
        u64 k = 0;
        while (cur != res) {
            cur = (cur + step) % m;
            if (++k > m) throw Inconsistent("find_prime: incompatible congruences");
        }
        r += (u128)k * M;
        M = M / g * m;
        r %= M;
        if (M >> 62) throw std::overflow_error("find_prime: modulus too large");
    }
    u64 mod = (u64)M, start = (u64)r;
    for (u64 i = 0; i < query.bound; ++i) {
        u64 p = start + i * mod;
        if (p < 2 || query.exclude.count(p) || !is_prime(p)) continue;
        bool ok = true;
        for (auto [q, s] : query.legendre) {
            if (q == p || q == 2) { ok = false; break; }
            if (legendre((i64)(p % q), q) != s) { ok = false; break; }
        }
        for (std::size_t k = 0; ok && k < query.residue.size(); ++k) {
            const auto& [x, s] = query.residue[k];
            if (p == 2 || x.divisible_by(p)) { ok = false; break; }
            int sym = restrict(x, Place{p}).bits & 1 ? -1 : 1;
            if (sym != s) ok = false;
        }
        if (ok) return SignedPrime{query.sign < 0 ? -1 : 1, p};
    }
    throw PrimeNotFound(query.bound);
}

} // namespace ranktwist
