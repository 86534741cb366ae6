#include "ranktwist/f2.hpp"

#include <algorithm>
#include <stdexcept>

namespace ranktwist {

std::size_t BitVec::lowest() const
{
    for (std::size_t k = 0; k < w_.size(); ++k) {
        if (w_[k]) return k * 64 + __builtin_ctzll(w_[k]);
    }
    return n_;
}

bool BitVec::operator<(const BitVec& o) const
{
    if (n_ != o.n_) return n_ < o.n_;
    for (std::size_t k = w_.size(); k-- > 0;) {
        if (w_[k] != o.w_[k]) return w_[k] < o.w_[k];
    }
    return false;
}

std::string BitVec::str() const
{
    std::string s(n_, '0');
    for (std::size_t i = 0; i < n_; ++i) if (get(i)) s[i] = '1';
    return s;
}

std::vector<std::size_t> rref(std::vector<BitVec>& rows)
{
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    if (rows.empty()) return pivots;
    std::size_t n = rows[0].size();
    for (std::size_t col = 0; col < n && r < rows.size(); ++col) {
        std::size_t sel = r;
        while (sel < rows.size() && !rows[sel].get(col)) ++sel;
        if (sel == rows.size()) continue;
        std::swap(rows[r], rows[sel]);
        for (std::size_t k = 0; k < rows.size(); ++k) {
            if (k != r && rows[k].get(col)) rows[k] ^= rows[r];
        }
        pivots.push_back(col);
        ++r;
    }
    rows.resize(r);
    return pivots;
}

std::vector<BitVec> kernel(std::vector<BitVec> rows, std::size_t n)
{
    for (auto& row : rows) {
        if (row.size() != n) throw std::invalid_argument("kernel: row length mismatch");
    }
    auto piv = rref(rows);
    std::vector<bool> is_pivot(n, false);
    for (auto c : piv) is_pivot[c] = true;
    std::vector<BitVec> out;
    for (std::size_t f = 0; f < n; ++f) {
        if (is_pivot[f]) continue;
        BitVec v(n);
        v.set(f);
        for (std::size_t k = 0; k < rows.size(); ++k) {
            if (rows[k].get(f)) v.set(piv[k]);
        }
        out.push_back(std::move(v));
    }
    rref(out);
    return out;
}

std::size_t rank(std::vector<BitVec> rows) { return rref(rows).size(); }

Subspace::Subspace(int ambient, const std::vector<std::uint32_t>& gens) : ambient_(ambient)
{
    for (auto g : gens) add(g);
}

static int top_bit(std::uint32_t v) { return 31 - __builtin_clz(v); }

std::uint32_t Subspace::reduce(std::uint32_t v) const
{
    for (auto b : basis_) {
        if (v >> top_bit(b) & 1) v ^= b;
    }
    return v;
}

bool Subspace::add(std::uint32_t v)
{
    if (ambient_ < 32 && (v >> ambient_)) throw std::invalid_argument("Subspace: vector outside ambient space");
    v = reduce(v);
    if (!v) return false;
    int t = top_bit(v);
    for (auto& b : basis_) {
        if (b >> t & 1) b ^= v;
    }
    basis_.push_back(v);
    std::sort(basis_.begin(), basis_.end(), std::greater<>());
    return true;
}

bool Subspace::contains(const Subspace& o) const
{
    for (auto b : o.basis_) if (!contains(b)) return false;
    return true;
}

std::vector<std::uint32_t> Subspace::elements() const
{
    std::vector<std::uint32_t> out{0};
    for (auto b : basis_) {
        std::size_t n = out.size();
        for (std::size_t i = 0; i < n; ++i) out.push_back(out[i] ^ b);
    }
    std::sort(out.begin(), out.end());
    return out;
}

Subspace Subspace::intersect(const Subspace& o) const
{
    Subspace r(ambient_);
    const Subspace& small = dim() <= o.dim() ? *this : o;
    const Subspace& big = dim() <= o.dim() ? o : *this;
    for (auto e : small.elements()) {
        if (big.contains(e)) r.add(e);
    }
    return r;
}

Subspace Subspace::sum(const Subspace& o) const
{
    Subspace r = *this;
    for (auto b : o.basis_) r.add(b);
    return r;
}

std::string Subspace::str() const
{
    std::string s = "<";
    for (std::size_t i = 0; i < basis_.size(); ++i) {
        if (i) s += ",";
        for (int k = 0; k < ambient_; ++k) s += (basis_[i] >> k & 1) ? '1' : '0';
    }
    return s + ">";
}

} // namespace ranktwist
