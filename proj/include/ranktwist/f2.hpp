#pragma once
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace ranktwist {

class BitVec {
public:
    BitVec() = default;
    explicit BitVec(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

    std::size_t size() const { return n_; }
    bool get(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
    void set(std::size_t i, bool v = true)
    {
        if (v) w_[i >> 6] |= std::uint64_t(1) << (i & 63);
        else w_[i >> 6] &= ~(std::uint64_t(1) << (i & 63));
    }
    void flip(std::size_t i) { w_[i >> 6] ^= std::uint64_t(1) << (i & 63); }

    BitVec& operator^=(const BitVec& o)
    {
        for (std::size_t k = 0; k < w_.size(); ++k) w_[k] ^= o.w_[k];
        return *this;
    }
    friend BitVec operator^(BitVec a, const BitVec& b) { return a ^= b; }

    bool dot(const BitVec& o) const
    {
        std::uint64_t acc = 0;
        for (std::size_t k = 0; k < w_.size(); ++k) acc ^= w_[k] & o.w_[k];
        return __builtin_parityll(acc);
    }
    bool is_zero() const
    {
        for (auto w : w_) if (w) return false;
        return true;
    }
    // index of lowest set bit, or size() if zero
    std::size_t lowest() const;

    // numeric order, bit 0 least significant
    bool operator<(const BitVec& o) const;
    bool operator==(const BitVec& o) const { return n_ == o.n_ && w_ == o.w_; }

    std::string str() const;

private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> w_;
};

// Reduced row echelon form in place (pivot = lowest set bit); drops zero rows.
// Returns pivot columns, aligned with rows.
std::vector<std::size_t> rref(std::vector<BitVec>& rows);

// Basis of {x : r.x = 0 for all rows}, ambient dimension n, in reduced echelon form.
std::vector<BitVec> kernel(std::vector<BitVec> rows, std::size_t n);

std::size_t rank(std::vector<BitVec> rows);

// Subspace of F2^n, n <= 32, vectors as masks. Basis kept in reduced echelon form
// (pivot = highest bit, every pivot column clear in the other rows).
class Subspace {
public:
    Subspace() = default;
    explicit Subspace(int ambient) : ambient_(ambient) {}
    Subspace(int ambient, const std::vector<std::uint32_t>& gens);

    int ambient() const { return ambient_; }
    int dim() const { return (int)basis_.size(); }
    const std::vector<std::uint32_t>& basis() const { return basis_; }

    bool add(std::uint32_t v);  // true if dimension grew
    std::uint32_t reduce(std::uint32_t v) const;
    bool contains(std::uint32_t v) const { return reduce(v) == 0; }
    bool contains(const Subspace& o) const;
    std::vector<std::uint32_t> elements() const;

    Subspace intersect(const Subspace& o) const;
    Subspace sum(const Subspace& o) const;

    bool operator==(const Subspace& o) const { return ambient_ == o.ambient_ && basis_ == o.basis_; }
    bool operator<(const Subspace& o) const { return basis_ < o.basis_; }

    std::string str() const;

private:
    int ambient_ = 0;
    std::vector<std::uint32_t> basis_;  // sorted descending by pivot
};

} // namespace ranktwist
