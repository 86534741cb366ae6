#pragma once
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ranktwist/arith.hpp"

namespace ranktwist {

struct Place {
    u64 p = 0;  // 0 is the real place

    static Place infinity() { return Place{0}; }
    static Place prime(u64 q);
    bool is_real() const { return p == 0; }
    bool operator==(const Place& o) const { return p == o.p; }
    bool operator!=(const Place& o) const { return p != o.p; }
    bool operator<(const Place& o) const { return p < o.p; }
    std::string str() const { return p ? std::to_string(p) : "inf"; }
};

// dimension of Q_v^*/Q_v^*2 over F2
int local_dim(Place v);

// sign times a squarefree product of primes
class SquareClass {
public:
    SquareClass() = default;
    SquareClass(int sign, std::vector<u64> primes);

    static SquareClass of(i64 n);
    static SquareClass of(const mpz_class& n);
    static SquareClass of(const mpq_class& x);  // num * den
    static SquareClass prime(u64 p, int sign = 1) { return SquareClass(sign, {p}); }

    int sign() const { return sign_; }
    const std::vector<u64>& support() const { return primes_; }
    bool is_trivial() const { return sign_ == 1 && primes_.empty(); }
    bool divisible_by(u64 p) const;

    mpz_class value() const;
    std::string str() const { return value().get_str(); }

    SquareClass operator*(const SquareClass& o) const;
    SquareClass& operator*=(const SquareClass& o) { return *this = *this * o; }
    bool operator==(const SquareClass& o) const { return sign_ == o.sign_ && primes_ == o.primes_; }
    bool operator!=(const SquareClass& o) const { return !(*this == o); }
    bool operator<(const SquareClass& o) const;

private:
    int sign_ = 1;
    std::vector<u64> primes_;  // sorted, distinct
};

// Canonical local generators, bit i of `bits`:
//   inf : bit0 = -1
//   odd : bit0 = u (least non-residue), bit1 = p
//   2   : bit0 = -1, bit1 = 2, bit2 = 5
struct LocalClass {
    Place place;
    unsigned bits = 0;

    i64 representative() const;
    LocalClass operator*(const LocalClass& o) const;
    bool is_square() const { return bits == 0; }
    bool odd_valuation() const;
    bool operator==(const LocalClass& o) const { return place == o.place && bits == o.bits; }
    bool operator!=(const LocalClass& o) const { return !(*this == o); }
    std::string str() const;
};

LocalClass restrict(const SquareClass& x, Place v);
LocalClass local_class_of(const mpz_class& n, Place v);  // n != 0, no factoring
LocalClass local_class_of(const mpq_class& x, Place v);

int hilbert_symbol(const LocalClass& a, const LocalClass& b);
int hilbert_symbol(const SquareClass& a, const SquareClass& b, Place v);
int hilbert_symbol(const mpq_class& a, const mpq_class& b, Place v);

struct ReciprocityAudit {
    std::map<Place, int> symbols;
    int product = 1;
};
ReciprocityAudit reciprocity_audit(const SquareClass& a, const SquareClass& b);

// places where a class can be non-trivially paired: support, 2 and inf
std::set<Place> bad_places(const SquareClass& a);

struct PrimeQuery {
    std::vector<std::pair<u64, u64>> congruences;  // (modulus, residue)
    int sign = 1;
    std::vector<std::pair<u64, int>> legendre;         // (q, s): (p|q) = s
    std::vector<std::pair<SquareClass, int>> residue;  // (x, s): (x|p) = s
    std::set<u64> exclude;
    u64 bound = 1000000;  // candidates scanned
};

struct SignedPrime {
    int sign = 1;
    u64 p = 0;
    SquareClass as_class() const { return SquareClass::prime(p, sign); }
    i64 value() const { return sign * (i64)p; }
};

struct PrimeNotFound : std::runtime_error {
    explicit PrimeNotFound(u64 bound)
        : std::runtime_error("find_prime: no prime within " + std::to_string(bound) + " candidates"),
          bound(bound) {}
    u64 bound;
};
struct Inconsistent : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

SignedPrime find_prime(const PrimeQuery& query);

} // namespace ranktwist
