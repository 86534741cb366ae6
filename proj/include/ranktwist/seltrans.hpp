#pragma once
#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ranktwist/curve2tor.hpp"

namespace ranktwist {

struct SelmerStructure {
    Curve curve;
    std::map<Place, Subspace> conditions;  // must cover T; H1_nr elsewhere
};

// local images at every place of T
SelmerStructure baseline_structure(const Curve& E);

// F2-basis of a Selmer group over the generators {-1} u primes, pair coordinates
// (x1 block, x2 block); basis in reduced echelon form.
struct SelmerGroup {
    std::vector<u64> primes;
    std::vector<BitVec> basis;

    int dim() const { return (int)basis.size(); }
    ClassPair decode(const BitVec& v) const;
    std::vector<ClassPair> pairs() const;
    std::uint32_t restrict_vec(const BitVec& v, Place w) const;
    // dimension of the span of res_w over the group
    Subspace restriction(Place w) const;
    bool contains(const BitVec& v) const;
};

SelmerGroup compute_selmer(const SelmerStructure& s);
// encode a class pair over a generator list (support must be covered)
BitVec encode_pair(const ClassPair& z, const std::vector<u64>& primes);

struct TransitionChain {
    Curve curve;
    std::map<Place, Subspace> baseline;  // conditions at T
    std::vector<u64> primes;             // v_1 .. v_n, outside T
    std::vector<LocalClass> pis;         // odd-valuation class at each v_j

    // twisted at v_1..v_i, H1_nr at v_{i+1}..v_n
    SelmerStructure structure(std::size_t i) const;
    // as structure(i) but unrestricted at v_{i+1}
    SelmerStructure relaxed(std::size_t i) const;
    void append(u64 p, bool nonresidue_unit = false);
    void append(u64 p, const LocalClass& pi);
};

TransitionChain make_chain(const Curve& E);

struct InvariantFailure : std::logic_error {
    using std::logic_error::logic_error;
};

struct StepReport {
    std::size_t i = 0;
    Subspace A;
    Subspace L_next;
    int dim_before = 0, dim_after = 0, dim_relaxed = 0;
    int restriction_dim = 0;
    int n = 0;
    std::string case_tag;  // "+2", "-2", "0"
    bool codim2_contained = false;
};

StepReport transition_step(const TransitionChain& chain, std::size_t i);

struct TwistSelmer {
    int dim = 0;
    std::vector<ClassPair> basis;
    SelmerGroup group;
};

// Selmer structure of E^d: local images of E^d at T u supp(d)
SelmerStructure twist_structure(const Curve& E, const SquareClass& d);
TwistSelmer sel2_of_twist(const Curve& E, const SquareClass& d);

// E^d with T(E^d) = T(E) u supp(d), no factoring
Curve twist_known(const Curve& E, const SquareClass& d);

// ---- suitable twists ----

enum class Verdict { Pass, Fail, NotChecked };
std::string to_string(Verdict v);

// symbol products prod_{v in T'} (z_i, q_j)_v, rows z_1..z_12, columns q_1..q_4
using ProductMatrix = std::array<std::array<int, 4>, 12>;

// required value or 0 where unconstrained
ProductMatrix suitable_pattern();

struct SuitabilityReport {
    Verdict p1 = Verdict::NotChecked, p2 = Verdict::NotChecked, p3 = Verdict::NotChecked,
            p4 = Verdict::NotChecked;
    SquareClass t;
    std::vector<Place> T_prime;
    ProductMatrix products{};
    std::vector<std::string> notes;
};

SuitabilityReport verify_suitable(const Curve& E, const SquareClass& kappa, const std::array<SignedPrime, 4>& q,
                                  const std::array<SquareClass, 12>& z,
                                  const std::optional<CurvePoint>& point_on_minus_t = std::nullopt);

struct CascadePrediction {
    std::vector<int> dims;  // start, after q1, q2, q3
    int final_dim = 0;
    std::vector<int> restriction_ranks;
    std::vector<std::array<std::uint32_t, 6>> restrictions;  // per step, per basis pair, bits (x1, x2)
    std::vector<std::string> flags;
};

struct InconsistentData : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

CascadePrediction cascade_predict(const ProductMatrix& products, int start_dim);

struct SignTable {
    std::vector<std::string> rows;
    std::vector<std::string> cols;
    std::vector<std::vector<int>> signs;  // +1 / -1
};

SignTable reference_z_table();     // signs of z_1..z_12 at tau_1..tau_6
SignTable reference_form_table();  // signs of L_1..L_3 at tau_1..tau_6
// root orderings at tau_1..tau_6: permutation (i,j,k) with a_i < a_j < a_k
std::array<std::array<int, 3>, 6> reference_orderings();
// nontrivial real image class (sign of x - a1, sign of x - a2) at tau_1..tau_6
std::array<std::pair<int, int>, 6> reference_real_images();

std::vector<std::vector<int>> sign_table_products(const SignTable& z, const SignTable& q);

// ---- reduction ----

struct ReduceStep {
    u64 prime = 0;
    std::string kind;  // "S2", "S3a", "S3b"
    int dim_before = 0, dim_after = 0;
};

struct ReduceResult {
    TransitionChain chain;
    std::vector<int> dims;
    std::vector<ReduceStep> steps;
    bool trivial = false;
};

struct ReductionExhausted : std::runtime_error {
    ReductionExhausted(const std::string& msg, TransitionChain partial)
        : std::runtime_error(msg), partial(std::move(partial)) {}
    TransitionChain partial;
};

ReduceResult selmer_reduce(const Curve& E, const std::set<u64>& exclusions = {}, u64 candidate_bound = 10000);
// continue from an existing chain
ReduceResult selmer_reduce(const TransitionChain& start, const std::set<u64>& exclusions = {},
                           u64 candidate_bound = 10000);

struct DSpaces {
    std::vector<u64> primes;        // generators {-1} u primes
    std::array<std::vector<BitVec>, 3> basis;  // D_{r,1} (x,x), D_{r,2} (x,1), D_{r,3} (1,x)
    SquareClass decode(const BitVec& v) const;
    bool contains(int i, const SquareClass& x) const;
};

DSpaces d_spaces(const TransitionChain& chain, std::size_t r);
int d_dim_sum(const DSpaces& D);

struct ShrinkResult {
    TransitionChain chain;
    std::size_t prep_end = 0;   // chain length after the primes covering <-1, alpha, beta, gamma>
    std::vector<int> d_sums;    // sum of dim D after prep_end, then after each further prime
};

// extends a chain with trivial Selmer group until all three D spaces vanish, keeping it trivial
ShrinkResult shrink_d_spaces(const TransitionChain& chain, const std::set<u64>& exclusions = {},
                             u64 candidate_bound = 10000);

} // namespace ranktwist
