#include "ranktwist/quadspace.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace ranktwist {

QuadSpace::QuadSpace(int dim, std::vector<int> q) : dim_(dim), q_(std::move(q))
{
    if (dim < 0 || dim > 12 || q_.size() != (std::size_t(1) << dim))
        throw std::invalid_argument("QuadSpace: table size mismatch");
    if (q_[0] != 1) throw std::invalid_argument("QuadSpace: q(0) must be +1");
}

QuadSpace QuadSpace::from(int dim, const std::function<int(std::uint32_t)>& q)
{
    std::vector<int> t(std::size_t(1) << dim);
    for (std::uint32_t x = 0; x < t.size(); ++x) t[x] = q(x);
    return QuadSpace(dim, std::move(t));
}

bool QuadSpace::is_nondegenerate() const
{
    std::uint32_t n = 1u << dim_;
    for (std::uint32_t x = 1; x < n; ++x) {
        bool radical = true;
        for (std::uint32_t y = 0; y < n && radical; ++y) radical = b(x, y) == 1;
        if (radical) return false;
    }
    return true;
}

bool QuadSpace::is_isotropic(const Subspace& s) const
{
    // q trivial on s forces b trivial on s
    for (auto e : s.elements()) if (q(e) != 1) return false;
    return true;
}

bool QuadSpace::is_maximal_isotropic(const Subspace& s) const
{
    return 2 * s.dim() == dim_ && is_isotropic(s);
}

std::uint32_t pack_pair(const LocalClass& b1, const LocalClass& b2)
{
    if (b1.place != b2.place) throw std::invalid_argument("pack_pair: places differ");
    return b1.bits | b2.bits << local_dim(b1.place);
}

std::pair<LocalClass, LocalClass> unpack_pair(std::uint32_t x, Place v)
{
    int d = local_dim(v);
    return {LocalClass{v, x & ((1u << d) - 1)}, LocalClass{v, x >> d}};
}

QuadSpace local_quadratic_space(Place v)
{
    return QuadSpace::from(2 * local_dim(v), [v](std::uint32_t x) {
        auto [b1, b2] = unpack_pair(x, v);
        return hilbert_symbol(b1, b2);
    });
}

QuadSpace local_quadratic_space(Place v, const LocalClass& x, const LocalClass& y)
{
    return QuadSpace::from(2 * local_dim(v), [&](std::uint32_t w) {
        auto [b1, b2] = unpack_pair(w, v);
        return hilbert_symbol(b1, b2) * hilbert_symbol(b1, x) * hilbert_symbol(b2, y);
    });
}

QuadSpace hyperbolic_plane()
{
    return QuadSpace::from(2, [](std::uint32_t x) { return (x == 3) ? -1 : 1; });
}

QuadSpace det_space()
{
    return QuadSpace::from(4, [](std::uint32_t m) {
        unsigned det = ((m & 1) & (m >> 3 & 1)) ^ ((m >> 1 & 1) & (m >> 2 & 1));
        return det ? -1 : 1;
    });
}

// subspaces as element-set bitmaps (dim <= 6 gives <= 64 elements)
static std::uint64_t element_set(const Subspace& s)
{
    std::uint64_t m = 0;
    for (auto e : s.elements()) m |= std::uint64_t(1) << e;
    return m;
}

static void grow(const Subspace& s, int dim, const std::function<bool(std::uint32_t)>& admissible,
                 std::map<std::uint64_t, Subspace>& seen)
{
    auto key = element_set(s);
    if (seen.count(key)) return;
    seen.emplace(key, s);
    for (std::uint32_t v = 1; v < (1u << dim); ++v) {
        if (s.contains(v) || !admissible(v)) continue;
        Subspace t = s;
        t.add(v);
        grow(t, dim, admissible, seen);
    }
}

std::vector<Subspace> all_subspaces(int dim)
{
    if (dim > 6) throw std::invalid_argument("all_subspaces: dim > 6");
    std::map<std::uint64_t, Subspace> seen;
    grow(Subspace(dim), dim, [](std::uint32_t) { return true; }, seen);
    std::vector<Subspace> out;
    for (auto& [k, s] : seen) out.push_back(s);
    return out;
}

std::vector<Subspace> maximal_isotropics(const QuadSpace& space)
{
    int dim = space.dim();
    if (dim > 6) throw std::invalid_argument("maximal_isotropics: dim > 6");
    std::map<std::uint64_t, Subspace> seen;
    // isotropic subspaces are closed under taking subspaces, so growing one
    // q-trivial, b-orthogonal vector at a time reaches all of them
    std::function<void(const Subspace&)> rec = [&](const Subspace& s) {
        auto key = element_set(s);
        if (seen.count(key)) return;
        seen.emplace(key, s);
        for (std::uint32_t v = 1; v < (1u << dim); ++v) {
            if (space.q(v) != 1 || s.contains(v)) continue;
            bool orth = true;
            for (auto b : s.basis()) if (space.b(v, b) != 1) { orth = false; break; }
            if (!orth) continue;
            Subspace t = s;
            t.add(v);
            rec(t);
        }
    };
    rec(Subspace(dim));
    int best = 0;
    for (auto& [k, s] : seen) best = std::max(best, s.dim());
    std::vector<Subspace> out;
    for (auto& [k, s] : seen) if (s.dim() == best) out.push_back(s);
    std::sort(out.begin(), out.end());
    return out;
}

DegenerateResult classify_degenerate(const std::vector<ClassPair>& V, const std::set<u64>& exclude,
                                     std::size_t scan_primes)
{
    // linear independence over the joint support
    std::set<u64> support;
    for (auto& [x1, x2] : V) {
        support.insert(x1.support().begin(), x1.support().end());
        support.insert(x2.support().begin(), x2.support().end());
    }
    std::vector<u64> sup(support.begin(), support.end());
    std::size_t n = 2 * (sup.size() + 1);
    auto encode = [&](const ClassPair& z) {
        BitVec b(n);
        std::size_t h = sup.size() + 1;
        if (z.first.sign() < 0) b.set(0);
        if (z.second.sign() < 0) b.set(h);
        for (std::size_t i = 0; i < sup.size(); ++i) {
            if (z.first.divisible_by(sup[i])) b.set(1 + i);
            if (z.second.divisible_by(sup[i])) b.set(h + 1 + i);
        }
        return b;
    };
    std::vector<BitVec> rows;
    for (auto& z : V) rows.push_back(encode(z));
    auto basis_rows = rows;
    if (rank(basis_rows) < 2) throw std::invalid_argument("classify_degenerate: dim V < 2");

    bool t1 = true, t2 = true, t12 = true;
    for (auto& [x1, x2] : V) {
        t1 = t1 && x1.is_trivial();
        t2 = t2 && x2.is_trivial();
        t12 = t12 && x1 == x2;
    }
    if (t1) return {Degeneracy::T1Kills, 0};
    if (t2) return {Degeneracy::T2Kills, 0};
    if (t12) return {Degeneracy::T1T2Kills, 0};

    // Frobenius at unramified p: character value 1 iff the coordinate is a non-residue
    std::size_t scanned = 0;
    for (u64 p = 3; scanned < scan_primes; p += 2) {
        if (!is_prime(p) || support.count(p) || exclude.count(p)) continue;
        ++scanned;
        Place v{p};
        std::vector<BitVec> frob;
        for (auto& [x1, x2] : V) {
            BitVec r(2);
            r.set(0, restrict(x1, v).bits & 1);
            r.set(1, restrict(x2, v).bits & 1);
            frob.push_back(r);
        }
        if (rank(frob) == 2) return {Degeneracy::Nondegenerate, p};
    }
    throw ScanExhausted("classify_degenerate: no witness among " + std::to_string(scan_primes) +
                        " primes and no projection annihilates V");
}

bool kmr_parity_check(const Subspace& A, const Subspace& L, const Subspace& H, const QuadSpace& space)
{
    for (auto* s : {&A, &L, &H}) {
        if (s->ambient() != space.dim() || !space.is_maximal_isotropic(*s))
            throw std::invalid_argument("kmr_parity_check: subspace not maximal isotropic");
    }
    if (L.intersect(H).dim() != 0) throw std::invalid_argument("kmr_parity_check: L and H meet");
    return (A.intersect(L).dim() - A.intersect(H).dim()) % 2 == 0;
}

} // namespace ranktwist
