#pragma once
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace ranktwist {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

inline u64 mul_mod(u64 a, u64 b, u64 m) { return (u64)((u128)a * b % m); }
u64 pow_mod(u64 a, u64 e, u64 m);

// deterministic for all 64-bit n
bool is_prime(u64 n);
// deterministic below 3.3e24, probabilistic (25 rounds) above
bool is_prime(const mpz_class& n);

// prime -> exponent, n > 0
std::map<u64, int> factor(u64 n);
std::map<mpz_class, int> factor(mpz_class n);

// Legendre symbol (a|p), p odd prime; 0 if p | a
int legendre(i64 a, u64 p);
int legendre(const mpz_class& a, u64 p);
// Jacobi symbol (a|n), n odd positive
int jacobi(i64 a, u64 n);

u64 least_nonresidue(u64 p);

int valuation(u64 n, u64 p);
int valuation(const mpz_class& n, u64 p);

std::vector<u64> primes_up_to(u64 n);
u64 next_prime(u64 n);  // least prime > n

u64 isqrt(u64 n);

mpz_class mpz_from_i128(i128 v);
std::string to_string(const mpz_class& v);

} // namespace ranktwist
