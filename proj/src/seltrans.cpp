#include "ranktwist/seltrans.hpp"

#include <algorithm>
#include <sstream>

namespace ranktwist {

namespace {

// class of generator k at w: k = 0 is -1, else primes[k-1]
unsigned gen_bits(const std::vector<u64>& primes, std::size_t k, Place w)
{
    if (k == 0) return restrict(SquareClass(-1, {}), w).bits;
    return restrict(SquareClass::prime(primes[k - 1]), w).bits;
}

std::uint32_t full_mask(int bits) { return bits >= 32 ? ~0u : (1u << bits) - 1; }

Subspace full_space(Place v)
{
    int n = 2 * local_dim(v);
    Subspace s(n);
    for (int k = 0; k < n; ++k) s.add(1u << k);
    return s;
}

// functionals f with f.s = 0 for all s in L
std::vector<std::uint32_t> annihilator(const Subspace& L)
{
    Subspace ann(L.ambient());
    for (std::uint32_t f = 1; f <= full_mask(L.ambient()); ++f) {
        bool ok = true;
        for (auto b : L.basis()) if (__builtin_parity(f & b)) { ok = false; break; }
        if (ok) ann.add(f);
    }
    return ann.basis();
}

SquareClass decode_block(const BitVec& v, const std::vector<u64>& primes, std::size_t offset)
{
    int sign = v.get(offset) ? -1 : 1;
    std::vector<u64> ps;
    for (std::size_t k = 0; k < primes.size(); ++k)
        if (v.get(offset + 1 + k)) ps.push_back(primes[k]);
    return SquareClass(sign, ps);
}

LocalClass pi_class(u64 p, bool nonresidue_unit) { return LocalClass{Place{p}, nonresidue_unit ? 3u : 2u}; }

} // namespace

SelmerStructure baseline_structure(const Curve& E)
{
    SelmerStructure s{E, {}};
    for (auto v : E.T) s.conditions[v] = local_image(E, v).subspace;
    return s;
}

ClassPair SelmerGroup::decode(const BitVec& v) const
{
    return {decode_block(v, primes, 0), decode_block(v, primes, primes.size() + 1)};
}

std::vector<ClassPair> SelmerGroup::pairs() const
{
    std::vector<ClassPair> out;
    for (auto& b : basis) out.push_back(decode(b));
    return out;
}

std::uint32_t SelmerGroup::restrict_vec(const BitVec& v, Place w) const
{
    std::size_t n = primes.size() + 1;
    int d = local_dim(w);
    std::uint32_t lo = 0, hi = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (v.get(k)) lo ^= gen_bits(primes, k, w);
        if (v.get(n + k)) hi ^= gen_bits(primes, k, w);
    }
    return lo | hi << d;
}

Subspace SelmerGroup::restriction(Place w) const
{
    Subspace s(2 * local_dim(w));
    for (auto& b : basis) s.add(restrict_vec(b, w));
    return s;
}

bool SelmerGroup::contains(const BitVec& v) const
{
    BitVec r = v;
    for (auto& b : basis) {
        std::size_t piv = b.lowest();
        if (r.get(piv)) r ^= b;
    }
    return r.is_zero();
}

BitVec encode_pair(const ClassPair& z, const std::vector<u64>& primes)
{
    std::size_t n = primes.size() + 1;
    BitVec b(2 * n);
    auto put = [&](const SquareClass& x, std::size_t off) {
        if (x.sign() < 0) b.set(off);
        for (auto q : x.support()) {
            auto it = std::lower_bound(primes.begin(), primes.end(), q);
            if (it == primes.end() || *it != q)
                throw std::invalid_argument("encode_pair: " + std::to_string(q) + " outside generator set");
            b.set(off + 1 + (it - primes.begin()));
        }
    };
    put(z.first, 0);
    put(z.second, n);
    return b;
}

SelmerGroup compute_selmer(const SelmerStructure& s)
{
    SelmerGroup g;
    for (auto v : s.curve.T)
        if (!s.conditions.count(v)) throw std::invalid_argument("compute_selmer: no condition at " + v.str());
    for (auto& [v, L] : s.conditions) {
        if (L.ambient() != 2 * local_dim(v))
            throw std::invalid_argument("compute_selmer: condition at " + v.str() + " has wrong ambient");
        if (!v.is_real()) g.primes.push_back(v.p);
    }
    std::size_t n = g.primes.size() + 1;
    std::vector<BitVec> rows;
    for (auto& [v, L] : s.conditions) {
        int d = local_dim(v);
        std::vector<unsigned> cls(n);
        for (std::size_t k = 0; k < n; ++k) cls[k] = gen_bits(g.primes, k, v);
        for (auto f : annihilator(L)) {
            BitVec row(2 * n);
            std::uint32_t f1 = f & full_mask(d), f2 = f >> d;
            for (std::size_t k = 0; k < n; ++k) {
                if (__builtin_parity(f1 & cls[k])) row.set(k);
                if (__builtin_parity(f2 & cls[k])) row.set(n + k);
            }
            rows.push_back(row);
        }
    }
    g.basis = kernel(rows, 2 * n);
    return g;
}

SelmerStructure TransitionChain::structure(std::size_t i) const
{
    if (i > primes.size()) throw std::out_of_range("TransitionChain::structure: index past chain");
    SelmerStructure s{curve, baseline};
    for (std::size_t j = 0; j < primes.size(); ++j) {
        Place v{primes[j]};
        s.conditions[v] = j < i ? twisted_condition(curve, v, pis[j]) : unramified_subspace(v);
    }
    return s;
}

SelmerStructure TransitionChain::relaxed(std::size_t i) const
{
    if (i >= primes.size()) throw std::out_of_range("TransitionChain::relaxed: index past chain");
    SelmerStructure s = structure(i);
    s.conditions[Place{primes[i]}] = full_space(Place{primes[i]});
    return s;
}

void TransitionChain::append(u64 p, bool nonresidue_unit) { append(p, pi_class(p, nonresidue_unit)); }

void TransitionChain::append(u64 p, const LocalClass& pi)
{
    Place v = Place::prime(p);
    if (curve.in_T(v)) throw std::invalid_argument("TransitionChain: " + std::to_string(p) + " lies in T");
    if (std::find(primes.begin(), primes.end(), p) != primes.end())
        throw std::invalid_argument("TransitionChain: repeated prime " + std::to_string(p));
    if (pi.place != v || !pi.odd_valuation())
        throw std::invalid_argument("TransitionChain: uniformizer needs odd valuation at " + v.str());
    primes.push_back(p);
    pis.push_back(pi);
}

TransitionChain make_chain(const Curve& E)
{
    TransitionChain c;
    c.curve = E;
    c.baseline = baseline_structure(E).conditions;
    return c;
}

StepReport transition_step(const TransitionChain& chain, std::size_t i)
{
    if (i >= chain.primes.size()) throw std::out_of_range("transition_step: i >= chain length");
    Place v{chain.primes[i]};
    SelmerGroup before = compute_selmer(chain.structure(i));
    SelmerGroup after = compute_selmer(chain.structure(i + 1));
    SelmerGroup relaxed = compute_selmer(chain.relaxed(i));

    StepReport r;
    r.i = i;
    r.A = relaxed.restriction(v);
    r.L_next = twisted_condition(chain.curve, v, chain.pis[i]);
    r.dim_before = before.dim();
    r.dim_after = after.dim();
    r.dim_relaxed = relaxed.dim();
    r.restriction_dim = before.restriction(v).dim();
    r.n = r.dim_after - r.dim_before;

    std::ostringstream where;
    where << "transition_step at " << v.str() << " (i = " << i << ")";
    if (r.A.dim() != 2) throw InvariantFailure(where.str() + ": dim A = " + std::to_string(r.A.dim()));
    int expected = 0;
    if (r.restriction_dim == 2) expected = -2;
    else if (r.restriction_dim == 0 && r.A == r.L_next) expected = 2;
    if (r.n != expected)
        throw InvariantFailure(where.str() + ": n = " + std::to_string(r.n) + ", case predicts " +
                               std::to_string(expected));
    r.case_tag = expected == 2 ? "+2" : expected == -2 ? "-2" : "0";
    if (r.n == -2) {
        r.codim2_contained = true;
        for (auto& b : after.basis) r.codim2_contained = r.codim2_contained && before.contains(b);
        if (!r.codim2_contained) throw InvariantFailure(where.str() + ": new group not inside the old one");
    }
    return r;
}

Curve twist_known(const Curve& E, const SquareClass& d)
{
    mpz_class dv = d.value();
    Curve F = E;
    F.a1 *= dv; F.a2 *= dv; F.a3 *= dv;
    F.alpha *= dv; F.beta *= dv; F.gamma *= dv;
    mpz_class abc = F.alpha * F.beta * F.gamma;
    F.disc = 16 * abc * abc;
    std::set<Place> T(E.T.begin(), E.T.end());
    for (auto q : d.support()) T.insert(Place{q});
    F.T.assign(T.begin(), T.end());
    return F;
}

SelmerStructure twist_structure(const Curve& E, const SquareClass& d) { return baseline_structure(twist_known(E, d)); }

TwistSelmer sel2_of_twist(const Curve& E, const SquareClass& d)
{
    TwistSelmer out;
    out.group = compute_selmer(twist_structure(E, d));
    out.dim = out.group.dim();
    out.basis = out.group.pairs();
    return out;
}

// ---- suitable twists ----

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    default: return "not-checked";
    }
}

ProductMatrix suitable_pattern()
{
    ProductMatrix m{};
    for (int i = 0; i < 12; ++i) m[i][0] = (i == 0 || i == 3) ? -1 : 1;
    for (int i = 4; i < 12; ++i) m[i][1] = (i == 4 || i == 7) ? -1 : 1;
    for (int i = 8; i < 12; ++i) m[i][2] = (i == 8 || i == 11) ? -1 : 1;
    return m;
}

SuitabilityReport verify_suitable(const Curve& E, const SquareClass& kappa, const std::array<SignedPrime, 4>& q,
                                  const std::array<SquareClass, 12>& z,
                                  const std::optional<CurvePoint>& point_on_minus_t)
{
    SuitabilityReport r;
    std::set<Place> Tp(E.T.begin(), E.T.end());
    for (auto p : kappa.support()) Tp.insert(Place{p});
    r.T_prime.assign(Tp.begin(), Tp.end());

    // P2: distinct primes away from T'
    r.p2 = Verdict::Pass;
    for (int j = 0; j < 4; ++j) {
        if (!is_prime(q[j].p)) {
            r.p2 = Verdict::Fail;
            r.notes.push_back("q" + std::to_string(j + 1) + " = " + std::to_string(q[j].value()) + " is not prime");
            continue;
        }
        if (Tp.count(Place{q[j].p})) {
            r.p2 = Verdict::Fail;
            r.notes.push_back("q" + std::to_string(j + 1) + " divides kappa or lies in T");
        }
        for (int k = 0; k < j; ++k)
            if (q[k].p == q[j].p) {
                r.p2 = Verdict::Fail;
                r.notes.push_back("q" + std::to_string(k + 1) + " = q" + std::to_string(j + 1));
            }
    }
    if (r.p2 == Verdict::Fail) return r;  // t is not of the required shape

    r.t = kappa;
    for (auto& qj : q) r.t *= qj.as_class();

    r.p1 = Verdict::Pass;
    for (auto v : E.T)
        if (!restrict(r.t, v).is_square()) {
            r.p1 = Verdict::Fail;
            r.notes.push_back("t is not a square at " + v.str());
        }

    auto pattern = suitable_pattern();
    r.p3 = Verdict::Pass;
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 4; ++j) {
            int prod = 1;
            for (auto v : r.T_prime) prod *= hilbert_symbol(z[i], q[j].as_class(), v);
            r.products[i][j] = prod;
            if (pattern[i][j] != 0 && pattern[i][j] != prod) {
                r.p3 = Verdict::Fail;
                r.notes.push_back("product (z" + std::to_string(i + 1) + ", q" + std::to_string(j + 1) + ") = " +
                                  std::to_string(prod));
            }
        }

    if (point_on_minus_t) {
        Curve F = twist_known(E, SquareClass(-1, {}) * r.t);
        const auto& P = *point_on_minus_t;
        if (P.infinity || !on_curve(F, P)) {
            r.p4 = Verdict::Fail;
            r.notes.push_back("point not on E^{-t}");
        } else if (is_torsion(F, P)) {
            r.p4 = Verdict::Fail;
            r.notes.push_back("point is torsion");
        } else {
            r.p4 = Verdict::Pass;
        }
    }
    return r;
}

CascadePrediction cascade_predict(const ProductMatrix& products, int start_dim)
{
    for (auto& row : products)
        for (int j = 0; j < 3; ++j)
            if (row[j] != 1 && row[j] != -1) throw InconsistentData("cascade_predict: product entries must be +-1");
    if (start_dim != 6) throw InconsistentData("cascade_predict: twelve basis classes span dimension 6");

    CascadePrediction c;
    c.dims.push_back(start_dim);
    // current group as coefficient vectors over the six basis pairs
    Subspace cur(6);
    for (int k = 0; k < 6; ++k) cur.add(1u << k);
    for (int j = 0; j < 3; ++j) {
        // z is a non-residue at q_j iff its symbol product over T' is -1
        std::array<std::uint32_t, 6> res{};
        for (int k = 0; k < 6; ++k)
            res[k] = (products[2 * k][j] < 0 ? 1u : 0u) | (products[2 * k + 1][j] < 0 ? 2u : 0u);
        c.restrictions.push_back(res);
        auto image = [&](std::uint32_t coeffs) {
            std::uint32_t out = 0;
            for (int k = 0; k < 6; ++k) if (coeffs >> k & 1) out ^= res[k];
            return out;
        };
        Subspace img(2), ker(6);
        for (auto e : cur.elements()) {
            std::uint32_t x = image(e);
            img.add(x);
            if (x == 0) ker.add(e);
        }
        c.restriction_ranks.push_back(img.dim());
        int dim = c.dims.back();
        std::string tag = "q" + std::to_string(j + 1);
        if (img.dim() == 2) {
            cur = ker;
            dim -= 2;
        } else if (img.dim() == 1) {
            c.flags.push_back(tag + ": restriction rank 1, dimension kept, group not determined");
        } else {
            c.flags.push_back(tag + ": all products +1, predicted drop 0");
        }
        c.dims.push_back(dim);
    }
    c.final_dim = 2 + c.dims.back();
    return c;
}

SignTable reference_z_table()
{
    SignTable t;
    for (int i = 1; i <= 12; ++i) t.rows.push_back("z" + std::to_string(i));
    for (int l = 1; l <= 6; ++l) t.cols.push_back("tau" + std::to_string(l));
    t.signs.assign(12, std::vector<int>(6, 1));
    // (row, column) of every minus sign
    const int minus[][2] = {{0, 0}, {3, 1}, {4, 2}, {7, 3}, {8, 4}, {11, 5}};
    for (auto& m : minus) t.signs[m[0]][m[1]] = -1;
    return t;
}

SignTable reference_form_table()
{
    SignTable t;
    t.rows = {"L1", "L2", "L3"};
    for (int l = 1; l <= 6; ++l) t.cols.push_back("tau" + std::to_string(l));
    t.signs = {{-1, -1, 1, 1, 1, 1}, {-1, -1, -1, -1, 1, 1}, {1, 1, -1, 1, -1, -1}};
    return t;
}

std::array<std::array<int, 3>, 6> reference_orderings()
{
    return {{{2, 1, 3}, {1, 2, 3}, {2, 3, 1}, {1, 3, 2}, {2, 1, 3}, {1, 2, 3}}};
}

std::array<std::pair<int, int>, 6> reference_real_images()
{
    return {{{-1, 1}, {1, -1}, {-1, 1}, {1, -1}, {-1, 1}, {1, -1}}};
}

std::vector<std::vector<int>> sign_table_products(const SignTable& z, const SignTable& q)
{
    if (z.cols != q.cols) throw std::invalid_argument("sign_table_products: column labels differ");
    std::vector<std::vector<int>> out(z.rows.size(), std::vector<int>(q.rows.size(), 1));
    for (std::size_t i = 0; i < z.rows.size(); ++i)
        for (std::size_t j = 0; j < q.rows.size(); ++j)
            for (std::size_t l = 0; l < z.cols.size(); ++l)
                if (z.signs[i][l] < 0 && q.signs[j][l] < 0) out[i][j] = -out[i][j];
    return out;
}

// ---- reduction ----

namespace {

std::vector<ClassPair> all_elements(const SelmerGroup& g)
{
    std::vector<ClassPair> out;
    std::size_t d = g.basis.size();
    for (std::uint64_t m = 1; m < (std::uint64_t(1) << d); ++m) {
        BitVec v(g.basis.empty() ? 0 : g.basis[0].size());
        for (std::size_t k = 0; k < d; ++k) if (m >> k & 1) v ^= g.basis[k];
        out.push_back(g.decode(v));
    }
    return out;
}

std::set<u64> chain_exclusions(const TransitionChain& c, const std::set<u64>& extra)
{
    std::set<u64> ex(extra);
    for (auto p : c.curve.finite_T()) ex.insert(p);
    ex.insert(c.primes.begin(), c.primes.end());
    return ex;
}

// uniformizer at p with twisted condition different from A
LocalClass pick_uniformizer(TransitionChain& c, u64 p)
{
    c.append(p, false);
    std::size_t i = c.primes.size() - 1;
    Subspace A = compute_selmer(c.relaxed(i)).restriction(Place{p});
    bool equal = A == twisted_condition(c.curve, Place{p}, c.pis[i]);
    c.primes.pop_back();
    c.pis.pop_back();
    return pi_class(p, equal);
}

} // namespace

ReduceResult selmer_reduce(const Curve& E, const std::set<u64>& exclusions, u64 candidate_bound)
{
    return selmer_reduce(make_chain(E), exclusions, candidate_bound);
}

ReduceResult selmer_reduce(const TransitionChain& start, const std::set<u64>& exclusions, u64 candidate_bound)
{
    ReduceResult out;
    out.chain = start;
    const Curve& E = start.curve;
    SelmerGroup cur = compute_selmer(out.chain.structure(out.chain.primes.size()));
    out.dims.push_back(cur.dim());
    int stalled = 0;
    while (cur.dim() >= 2) {
        auto V = cur.pairs();
        auto ex = chain_exclusions(out.chain, exclusions);
        DegenerateResult cls;
        try {
            cls = classify_degenerate(V, ex, candidate_bound);
        } catch (const ScanExhausted& e) {
            throw ReductionExhausted(e.what(), out.chain);
        }
        ReduceStep step;
        step.dim_before = cur.dim();
        if (cls.kind == Degeneracy::Nondegenerate) {
            step.prime = cls.witness;
            step.kind = "S2";
            out.chain.append(cls.witness, false);
        } else {
            auto elems = all_elements(cur);
            auto least = *std::min_element(elems.begin(), elems.end());
            SquareClass x, partner;
            if (cls.kind == Degeneracy::T1Kills) {
                x = least.second;
                partner = SquareClass::of(mpz_class(E.alpha * E.beta));
            } else if (cls.kind == Degeneracy::T2Kills) {
                x = least.first;
                partner = SquareClass::of(mpz_class(-E.alpha * E.gamma));
            } else {
                x = least.first;
                partner = SquareClass::of(mpz_class(E.beta * E.gamma));
            }
            PrimeQuery q;
            q.exclude = ex;
            q.exclude.insert(2);
            q.bound = candidate_bound;
            q.residue.push_back({x, -1});
            if (!partner.is_trivial() && partner != x) q.residue.push_back({partner, -1});
            SignedPrime p;
            try {
                p = find_prime(q);
            } catch (const PrimeNotFound& e) {
                throw ReductionExhausted(std::string("selmer_reduce: ") + e.what(), out.chain);
            }
            step.prime = p.p;
            step.kind = "S3a";
            out.chain.append(p.p, pick_uniformizer(out.chain, p.p));
        }
        cur = compute_selmer(out.chain.structure(out.chain.primes.size()));
        step.dim_after = cur.dim();
        out.dims.push_back(cur.dim());
        out.steps.push_back(step);
        if (step.kind == "S2" && step.dim_after != step.dim_before - 2)
            throw InvariantFailure("selmer_reduce: S2 step did not drop by 2");
        if (step.kind == "S3a") {
            if (step.dim_after != step.dim_before)
                throw InvariantFailure("selmer_reduce: first S3 step changed the dimension");
            if (++stalled > 4) throw ReductionExhausted("selmer_reduce: degeneracy persists", out.chain);
        } else {
            stalled = 0;
            if (out.steps.size() >= 2 && out.steps[out.steps.size() - 2].kind == "S3a") out.steps.back().kind = "S3b";
        }
    }
    out.trivial = cur.dim() == 0;
    return out;
}

SquareClass DSpaces::decode(const BitVec& v) const { return decode_block(v, primes, 0); }

bool DSpaces::contains(int i, const SquareClass& x) const
{
    BitVec r = encode_pair({x, SquareClass()}, primes);
    BitVec v(primes.size() + 1);
    for (std::size_t k = 0; k < v.size(); ++k) v.set(k, r.get(k));
    for (auto& b : basis.at(i)) {
        std::size_t piv = b.lowest();
        if (v.get(piv)) v ^= b;
    }
    return v.is_zero();
}

DSpaces d_spaces(const TransitionChain& chain, std::size_t r)
{
    if (r > chain.primes.size()) throw std::out_of_range("d_spaces: r past chain length");
    DSpaces D;
    std::set<u64> gens;
    for (auto p : chain.curve.finite_T()) gens.insert(p);
    gens.insert(chain.primes.begin(), chain.primes.begin() + r);
    D.primes.assign(gens.begin(), gens.end());
    std::size_t n = D.primes.size() + 1;
    for (int which = 0; which < 3; ++which) {
        std::vector<BitVec> rows;
        for (std::size_t j = 0; j < r; ++j) {
            Place v{chain.primes[j]};
            int d = local_dim(v);
            Subspace L = twisted_condition(chain.curve, v, chain.pis[j]);
            for (auto f : annihilator(L)) {
                std::uint32_t f1 = f & full_mask(d), f2 = f >> d;
                // x -> (x,x), (x,1), (1,x)
                std::uint32_t g = which == 0 ? f1 ^ f2 : which == 1 ? f1 : f2;
                BitVec row(n);
                for (std::size_t k = 0; k < n; ++k)
                    if (__builtin_parity(g & gen_bits(D.primes, k, v))) row.set(k);
                rows.push_back(row);
            }
        }
        D.basis[which] = kernel(rows, n);
    }
    return D;
}

int d_dim_sum(const DSpaces& D)
{
    return int(D.basis[0].size() + D.basis[1].size() + D.basis[2].size());
}

namespace {

// appends p with the uniformizer avoiding A; the Selmer group must stay trivial
void append_keeping_trivial(TransitionChain& c, u64 p)
{
    c.append(p, pick_uniformizer(c, p));
    if (compute_selmer(c.structure(c.primes.size())).dim() != 0)
        throw InvariantFailure("shrink_d_spaces: Selmer group grew at " + std::to_string(p));
}

SignedPrime hunt(const std::set<u64>& ex, u64 bound, const std::vector<SquareClass>& nonresidues)
{
    PrimeQuery q;
    q.exclude = ex;
    q.exclude.insert(2);
    q.bound = bound;
    for (auto& y : nonresidues) q.residue.push_back({y, -1});
    return find_prime(q);
}

} // namespace

ShrinkResult shrink_d_spaces(const TransitionChain& chain, const std::set<u64>& exclusions, u64 candidate_bound)
{
    ShrinkResult out;
    out.chain = chain;
    TransitionChain& c = out.chain;
    if (compute_selmer(c.structure(c.primes.size())).dim() != 0)
        throw std::invalid_argument("shrink_d_spaces: Selmer group of the chain is not trivial");
    const Curve& E = c.curve;

    // every nontrivial element of <-1, alpha, beta, gamma> becomes a non-residue somewhere
    std::vector<SquareClass> gens{SquareClass(-1, {}), SquareClass::of(E.alpha), SquareClass::of(E.beta),
                                  SquareClass::of(E.gamma)};
    std::set<SquareClass> uncovered;
    for (unsigned m = 1; m < 16; ++m) {
        SquareClass y;
        for (int k = 0; k < 4; ++k) if (m >> k & 1) y *= gens[k];
        if (!y.is_trivial()) uncovered.insert(y);
    }
    try {
        while (!uncovered.empty()) {
            SquareClass y = *uncovered.begin();
            auto p = hunt(chain_exclusions(c, exclusions), candidate_bound, {y});
            append_keeping_trivial(c, p.p);
            for (auto it = uncovered.begin(); it != uncovered.end();) {
                if (restrict(*it, Place{p.p}).bits & 1) it = uncovered.erase(it);
                else ++it;
            }
        }
        out.prep_end = c.primes.size();
        DSpaces D = d_spaces(c, c.primes.size());
        out.d_sums.push_back(d_dim_sum(D));
        std::vector<SquareClass> partners{SquareClass::of(mpz_class(E.alpha * E.beta)),
                                          SquareClass::of(mpz_class(-E.alpha * E.gamma)),
                                          SquareClass::of(mpz_class(E.beta * E.gamma))};
        while (out.d_sums.back() > 0) {
            // least nontrivial class over the three spaces
            std::optional<SquareClass> x;
            for (int i = 0; i < 3; ++i)
                for (auto& b : D.basis[i]) {
                    SquareClass y = D.decode(b);
                    if (!x || y < *x) x = y;
                }
            std::vector<SquareClass> want{*x};
            for (auto& y : partners) if (!y.is_trivial()) want.push_back(y);
            auto p = hunt(chain_exclusions(c, exclusions), candidate_bound, want);
            append_keeping_trivial(c, p.p);
            D = d_spaces(c, c.primes.size());
            int sum = d_dim_sum(D);
            if (sum >= out.d_sums.back())
                throw InvariantFailure("shrink_d_spaces: D spaces did not shrink at " + std::to_string(p.p));
            out.d_sums.push_back(sum);
        }
    } catch (const PrimeNotFound& e) {
        throw ReductionExhausted(std::string("shrink_d_spaces: ") + e.what(), c);
    }
    return out;
}

} // namespace ranktwist
