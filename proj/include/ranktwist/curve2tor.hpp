#pragma once
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ranktwist/qlocal.hpp"
#include "ranktwist/quadspace.hpp"

namespace ranktwist {

// y^2 = (x - a1)(x - a2)(x - a3)
struct Curve {
    mpz_class a1, a2, a3;
    mpz_class alpha, beta, gamma;  // a1-a2, a1-a3, a2-a3
    mpz_class disc;                // 16 (alpha beta gamma)^2
    std::vector<Place> T;          // sorted; inf, 2, 3 and primes dividing alpha beta gamma

    bool in_T(Place v) const;
    std::vector<u64> finite_T() const;
    // x^3 + A x^2 + B x + C
    mpz_class A() const { return -(a1 + a2 + a3); }
    mpz_class B() const { return a1 * a2 + a1 * a3 + a2 * a3; }
    mpz_class C() const { return -(a1 * a2 * a3); }
    mpq_class f(const mpq_class& x) const { return (x - a1) * (x - a2) * (x - a3); }
    std::string str() const;
};

struct CoincidentRoots : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

Curve make_curve(const mpz_class& a1, const mpz_class& a2, const mpz_class& a3);
inline Curve make_curve(i64 a1, i64 a2, i64 a3) { return make_curve(mpz_class((long)a1), mpz_class((long)a2), mpz_class((long)a3)); }
Curve twist(const Curve& E, const SquareClass& d);
Curve twist(const Curve& E, const mpz_class& d);

struct CurvePoint {
    bool infinity = true;
    mpq_class x, y;

    static CurvePoint identity() { return {}; }
    static CurvePoint affine(const mpq_class& x, const mpq_class& y) { return {false, x, y}; }
    bool operator==(const CurvePoint& o) const
    {
        return infinity == o.infinity && (infinity || (x == o.x && y == o.y));
    }
    bool operator<(const CurvePoint& o) const;
    std::string str() const;
};

bool on_curve(const Curve& E, const CurvePoint& P);
CurvePoint negate(const CurvePoint& P);
CurvePoint add(const Curve& E, const CurvePoint& P, const CurvePoint& Q);
CurvePoint mul(const Curve& E, const CurvePoint& P, long n);
std::vector<CurvePoint> two_torsion(const Curve& E);

std::pair<SquareClass, SquareClass> kummer_of_point(const Curve& E, const CurvePoint& P);
// same map, landing directly in a local group (no factoring)
std::uint32_t local_kummer(const Curve& E, const CurvePoint& P, Place v);
// Kummer images of O, P1, P2, P3 at v
std::vector<std::uint32_t> local_torsion_images(const Curve& E, Place v);

// pairs (b1,b2) packed as in quadspace; all pairs realised by points of E(Q_v)
std::set<std::uint32_t> local_solvable_pairs(const Curve& E, Place v);
bool local_membership(const Curve& E, const LocalClass& b1, const LocalClass& b2, Place v);

struct LocalImage {
    Place place;
    Subspace subspace;
};

struct LocalImageError : std::logic_error {
    using std::logic_error::logic_error;
};

LocalImage local_image(const Curve& E, Place v);

// q_E((b1,b2)) = (b1,b2)(b1,-alpha gamma)(b2,alpha beta); Kummer images are maximal isotropic
QuadSpace kummer_quadratic_space(const Curve& E, Place v);

// even-valuation pairs at odd v
Subspace unramified_subspace(Place v);
// span{(alpha beta, pi alpha), (-pi alpha, -alpha gamma)} at v
Subspace twisted_condition(const Curve& E, Place v, const LocalClass& pi);

struct TorsionGroup {
    std::vector<CurvePoint> points;  // sorted, identity first
    int n2 = 2, n = 2;               // Z/n2 x Z/n
    std::string str() const;
};
TorsionGroup torsion_subgroup(const Curve& E);
bool is_torsion(const Curve& E, const CurvePoint& P);

struct RootNumber {
    bool supported = true;
    int value = 1;
    std::string reduction;  // good, split, nonsplit, additive, archimedean
};
RootNumber root_number_local(const Curve& E, Place v);
// additive potentially good at p >= 5 with discriminant valuation vd
int additive_root_number(u64 p, int vd);

std::vector<CurvePoint> point_search(const Curve& E, long bound);

// integer roots of x^3 + A x^2 + B x + C
std::vector<mpz_class> integer_roots_cubic(const mpz_class& A, const mpz_class& B, const mpz_class& C);

} // namespace ranktwist
