#pragma once
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ranktwist/arith.hpp"

namespace ranktwist {

// cx X + cy Y + c0
struct AffineForm {
    mpz_class cx, cy, c0;
    mpz_class eval(const mpz_class& x, const mpz_class& y) const { return cx * x + cy * y + c0; }
    std::string str() const;
};

enum class Profile {
    Strict,   // m = 0 mod lcm(8, odd primes of T), lambda kappa = 1 mod 8N
    Relaxed,  // forms only
};

struct LinearFormSystem {
    mpz_class a1, a2, a3, kappa, m, lambda;
    std::array<AffineForm, 4> L;

    // c = m^2 kappa X + 1, d = m^2 kappa (m^2 kappa Y + lambda)
    mpz_class c(const mpz_class& x) const;
    mpz_class d(const mpz_class& y) const;
};

struct SystemError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// odd primes dividing (a1-a2)(a1-a3)(a2-a3), together with 3
std::vector<u64> odd_bad_primes(const mpz_class& a1, const mpz_class& a2, const mpz_class& a3);

LinearFormSystem build_system(const mpz_class& a1, const mpz_class& a2, const mpz_class& a3,
                              const mpz_class& kappa, const mpz_class& m, const mpz_class& lambda,
                              Profile profile = Profile::Strict);

// (p/phi(p))^4 |{(x,y) mod p : no form vanishes}| / p^2
mpq_class beta_p(const LinearFormSystem& s, u64 p);

struct Admissibility {
    bool ok = true;
    u64 prime = 0;  // first p with beta_p = 0
};
Admissibility admissibility_check(const LinearFormSystem& s, u64 p_bound = 100);

struct NotAdmissible : std::runtime_error {
    explicit NotAdmissible(u64 p)
        : std::runtime_error("system is not admissible at " + std::to_string(p)), prime(p) {}
    u64 prime;
};

struct SingularSeries {
    double value = 1;
    u64 cutoff = 1;
    double decade_change = 0;  // |prod_{p <= P} / prod_{p <= P/10} - 1|
};
SingularSeries singular_series(const LinearFormSystem& s, u64 cutoff = 10000);

// open half-plane a x + b y + c > 0
struct HalfPlane {
    mpq_class a, b, c;
    bool contains(const mpq_class& x, const mpq_class& y) const { return a * x + b * y + c > 0; }
};

struct Region {
    std::vector<HalfPlane> planes;
    bool contains(const mpq_class& x, const mpq_class& y) const;
    Region homogeneous() const;  // constants dropped
};

// L_1, L_2, L_3 > 0 and kappa L_4 > 0
Region default_region(const LinearFormSystem& s);

struct DegenerateRegion : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// area of the homogeneous region inside [-1,1]^2, so vol(Omega n [-H,H]^2) ~ C H^2
mpq_class region_volume_exact(const Region& r);
double region_volume(const Region& r);

struct MonteCarloVolume {
    double estimate = 0, std_error = 0;
};
MonteCarloVolume region_volume_mc(const Region& r, std::size_t samples, std::uint64_t seed);

struct Witness {
    long x = 0, y = 0;
    std::array<mpz_class, 4> values;  // signed L_i(x, y)
};

struct ConstellationReport {
    long N = 0;
    u64 cutoff = 0;
    std::vector<std::pair<u64, mpq_class>> betas;  // p <= beta_report_bound
    SingularSeries series;
    double volume_constant = 0;
    double count = 0;       // sum of prod log|L_i| over witnesses
    double prediction = 0;  // C N^2 prod beta_p
    double ratio = 0;
    std::vector<Witness> witnesses;
    std::vector<std::string> flags;
};

struct CountOptions {
    u64 cutoff = 10000;
    u64 beta_report_bound = 50;
    long chunk = 64;  // x-strip width of the compensated accumulation
};

ConstellationReport count_and_compare(const LinearFormSystem& s, const Region& r, long N,
                                      const CountOptions& opt = {});

} // namespace ranktwist
