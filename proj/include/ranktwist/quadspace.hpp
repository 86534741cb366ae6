#pragma once
#include <cstdint>
#include <functional>
#include <set>
#include <variant>
#include <vector>

#include "ranktwist/f2.hpp"
#include "ranktwist/qlocal.hpp"

namespace ranktwist {

// Quadratic space over F2 with values in {+1,-1}; vectors are masks.
class QuadSpace {
public:
    QuadSpace() : dim_(0), q_{1} {}
    QuadSpace(int dim, std::vector<int> q);
    static QuadSpace from(int dim, const std::function<int(std::uint32_t)>& q);

    int dim() const { return dim_; }
    int q(std::uint32_t x) const { return q_[x]; }
    int b(std::uint32_t x, std::uint32_t y) const { return q_[x ^ y] * q_[x] * q_[y]; }
    bool is_nondegenerate() const;
    bool is_isotropic(const Subspace& s) const;
    bool is_maximal_isotropic(const Subspace& s) const;

private:
    int dim_;
    std::vector<int> q_;
};

// Pair (b1,b2) of local classes at v packs as b1 | b2 << local_dim(v).
std::uint32_t pack_pair(const LocalClass& b1, const LocalClass& b2);
std::pair<LocalClass, LocalClass> unpack_pair(std::uint32_t x, Place v);

// q((b1,b2)) = (b1,b2)_v
QuadSpace local_quadratic_space(Place v);
// q((b1,b2)) = (b1,b2)_v (b1,x)_v (b2,y)_v; same pairing as the plain form
QuadSpace local_quadratic_space(Place v, const LocalClass& x, const LocalClass& y);

QuadSpace hyperbolic_plane();
// M2(F2) as bits (m11,m12,m21,m22), q = (-1)^det
QuadSpace det_space();

std::vector<Subspace> maximal_isotropics(const QuadSpace& space);
// every subspace of F2^dim, dim <= 6
std::vector<Subspace> all_subspaces(int dim);

enum class Degeneracy { T1Kills, T2Kills, T1T2Kills, Nondegenerate };

struct DegenerateResult {
    Degeneracy kind = Degeneracy::Nondegenerate;
    u64 witness = 0;
};

struct ScanExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using ClassPair = std::pair<SquareClass, SquareClass>;

// V given by generators; dim V >= 2 required
DegenerateResult classify_degenerate(const std::vector<ClassPair>& V, const std::set<u64>& exclude = {},
                                     std::size_t scan_primes = 10000);

// true iff dim(A n L) = dim(A n H) mod 2
bool kmr_parity_check(const Subspace& A, const Subspace& L, const Subspace& H, const QuadSpace& space);

} // namespace ranktwist
