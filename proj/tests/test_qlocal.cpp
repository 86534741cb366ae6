#include "doctest.h"
#include "oracles.hpp"
#include "ranktwist/qlocal.hpp"

#include <random>

using namespace ranktwist;

TEST_CASE("restrict examples")
{
    auto r = restrict(SquareClass::of(18), Place{3});
    CHECK(r.bits == 1);  // 2 is a non-residue mod 3
    CHECK(r.representative() == 2);
    CHECK(restrict(SquareClass::of(8), Place{2}).representative() == 2);
    CHECK(restrict(SquareClass::of(7), Place::infinity()).representative() == 1);
    CHECK(restrict(SquareClass::of(-7), Place::infinity()).representative() == -1);
}

TEST_CASE("restrict is a homomorphism and agrees with direct reduction")
{
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<i64> dist(-5000, 5000);
    for (int it = 0; it < 2000; ++it) {
        i64 a = dist(rng), b = dist(rng);
        if (!a || !b) continue;
        for (u64 p : {0ull, 2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 101ull}) {
            Place v{p};
            auto ra = restrict(SquareClass::of(a), v);
            auto rb = restrict(SquareClass::of(b), v);
            CHECK((ra * rb) == restrict(SquareClass::of(a) * SquareClass::of(b), v));
            CHECK(ra == local_class_of(mpz_class((long)a), v));
        }
    }
}

TEST_CASE("canonical local representatives")
{
    CHECK(LocalClass{Place{7}, 1}.representative() == 3);
    CHECK(LocalClass{Place{7}, 3}.representative() == 21);
    CHECK(LocalClass{Place{2}, 7}.representative() == -10);
    for (unsigned bits = 0; bits < 8; ++bits) {
        LocalClass c{Place{2}, bits};
        CHECK(local_class_of(mpz_class((long)c.representative()), Place{2}) == c);
    }
    for (u64 p : {3ull, 5ull, 7ull, 23ull}) {
        for (unsigned bits = 0; bits < 4; ++bits) {
            LocalClass c{Place{p}, bits};
            CHECK(local_class_of(mpz_class((long)c.representative()), Place{p}) == c);
        }
    }
}

TEST_CASE("square class group law")
{
    auto x = SquareClass::of(-6), y = SquareClass::of(10);
    CHECK((x * y) == SquareClass::of(-15));
    CHECK((x * x).is_trivial());
    CHECK(SquareClass::of(-72) == SquareClass::of(-2));
    CHECK(SquareClass::of(mpq_class(3, 4)) == SquareClass::of(3));
    CHECK_THROWS(SquareClass::of(0));
}

TEST_CASE("hilbert symbol examples")
{
    CHECK(hilbert_symbol(SquareClass::of(-1), SquareClass::of(-1), Place::infinity()) == -1);
    CHECK(hilbert_symbol(SquareClass::of(3), SquareClass::of(5), Place{5}) == -1);
    CHECK(hilbert_symbol(SquareClass::of(2), SquareClass::of(17), Place{17}) == 1);
    CHECK(hilbert_symbol(SquareClass::of(-1), SquareClass::of(-1), Place{2}) == -1);
    CHECK_THROWS_AS(hilbert_symbol(mpq_class(0), mpq_class(3), Place{3}), std::invalid_argument);
}

TEST_CASE("reciprocity audit examples")
{
    auto r = reciprocity_audit(SquareClass::of(3), SquareClass::of(5));
    CHECK(r.symbols.at(Place{3}) == -1);
    CHECK(r.symbols.at(Place{5}) == -1);
    CHECK(r.symbols.at(Place{2}) == 1);
    CHECK(r.symbols.at(Place::infinity()) == 1);
    CHECK(r.product == 1);

    auto m = reciprocity_audit(SquareClass::of(-1), SquareClass::of(-1));
    CHECK(m.symbols.at(Place::infinity()) == -1);
    CHECK(m.symbols.at(Place{2}) == -1);
    CHECK(m.product == 1);

    auto t = reciprocity_audit(SquareClass(), SquareClass::of(30));
    for (auto& [v, s] : t.symbols) CHECK(s == 1);
}

TEST_CASE("hilbert symbol properties")
{
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<i64> dist(-300, 300);
    for (int it = 0; it < 1500; ++it) {
        i64 a = dist(rng), b = dist(rng), c = dist(rng);
        if (!a || !b || !c) continue;
        auto A = SquareClass::of(a), B = SquareClass::of(b), C = SquareClass::of(c);
        for (u64 p : {0ull, 2ull, 3ull, 5ull, 7ull, 13ull}) {
            Place v{p};
            CHECK(hilbert_symbol(A * B, C, v) == hilbert_symbol(A, C, v) * hilbert_symbol(B, C, v));
            CHECK(hilbert_symbol(A, B, v) == hilbert_symbol(B, A, v));
        }
    }
}

TEST_CASE("odd-place rules for units and uniformizers")
{
    for (u64 p : {3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull}) {
        Place v{p};
        LocalClass u{v, 1}, pi{v, 2}, upi{v, 3}, one{v, 0};
        // two even-valuation classes pair trivially
        CHECK(hilbert_symbol(u, u) == 1);
        CHECK(hilbert_symbol(u, one) == 1);
        // a unit pairs trivially with a uniformizer iff it is a square
        for (auto p2 : {pi, upi}) {
            CHECK(hilbert_symbol(one, p2) == 1);
            CHECK(hilbert_symbol(u, p2) == -1);
        }
    }
}

TEST_CASE("find_prime examples")
{
    PrimeQuery q;
    q.congruences = {{8, 1}};
    q.exclude = {2, 3, 5, 7, 11, 13};
    CHECK(find_prime(q).p == 17);

    PrimeQuery q2;
    q2.congruences = {{24, 1}};
    q2.legendre = {{5, 1}};
    CHECK(find_prime(q2).p == 241);

    PrimeQuery q3;
    q3.congruences = {{4, 0}};
    CHECK_THROWS_AS(find_prime(q3), Inconsistent);

    PrimeQuery q4;
    q4.congruences = {{8, 3}, {12, 5}};
    CHECK_THROWS_AS(find_prime(q4), Inconsistent);

    PrimeQuery q5;
    q5.congruences = {{8, 1}};
    q5.sign = -1;
    q5.residue = {{SquareClass::of(3), -1}, {SquareClass::of(5), -1}};
    auto r = find_prime(q5);
    CHECK(r.value() == -17);

    PrimeQuery q6;
    q6.congruences = {{1000003, 1}};
    q6.bound = 1;
    CHECK_THROWS_AS(find_prime(q6), PrimeNotFound);
}

TEST_CASE("find_prime result satisfies every constraint")
{
    std::mt19937_64 rng(3);
    std::vector<u64> qs{3, 5, 7, 11, 13};
    for (int it = 0; it < 100; ++it) {
        PrimeQuery q;
        q.congruences = {{8, std::vector<u64>{1, 3, 5, 7}[rng() % 4]}};
        q.legendre = {{qs[rng() % 5], rng() % 2 ? 1 : -1}};
        auto r = find_prime(q);
        CHECK(is_prime(r.p));
        CHECK(r.p % 8 == q.congruences[0].second);
        CHECK(legendre((i64)(r.p % q.legendre[0].first), q.legendre[0].first) == q.legendre[0].second);
        // nothing smaller qualifies
        for (u64 c = q.congruences[0].second; c < r.p; c += 8) {
            if (!is_prime(c) || c == q.legendre[0].first) continue;
            CHECK(legendre((i64)(c % q.legendre[0].first), q.legendre[0].first) != q.legendre[0].second);
        }
    }
}

TEST_CASE("hilbert symbol matches brute-force conic solvability on a sample")
{
    for (i64 a = -12; a <= 12; ++a) {
        for (i64 b = -12; b <= 12; ++b) {
            if (!a || !b) continue;
            for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull}) {
                CHECK(hilbert_symbol(mpq_class((long)a), mpq_class((long)b), Place{p}) ==
                      oracle::brute_hilbert(a, b, p));
            }
        }
    }
}

TEST_CASE("arith helpers")
{
    CHECK(is_prime(2));
    CHECK(!is_prime(1));
    CHECK(is_prime(1000000007ull));
    CHECK(!is_prime(3215031751ull));  // strong pseudoprime to bases 2,3,5,7
    CHECK(is_prime(mpz_class("170141183460469231731687303715884105727")));
    CHECK(!is_prime(mpz_class("170141183460469231731687303715884105729")));
    auto f = factor(600851475143ull);
    CHECK(f.size() == 4);
    CHECK(f.at(6857) == 1);
    auto g = factor(mpz_class("1000000016000000063"));  // (1e9+7)(1e9+9)
    CHECK(g.size() == 2);
    CHECK(least_nonresidue(7) == 3);
    CHECK(least_nonresidue(17) == 3);
    CHECK(legendre(-1, 13) == 1);
    CHECK(jacobi(2, 15) == 1);
}
