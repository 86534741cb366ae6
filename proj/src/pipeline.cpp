#include "ranktwist/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace ranktwist {

namespace {

std::string trim(const std::string& s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

mpz_class parse_int(const std::string& key, const std::string& v)
{
    mpz_class out;
    std::string s = trim(v);
    if (s.empty() || out.set_str(s[0] == '+' ? s.substr(1) : s, 10) != 0)
        throw ConfigError("config: '" + key + "' expects a decimal integer, got '" + s + "'");
    return out;
}

long parse_long(const std::string& key, const std::string& v)
{
    mpz_class z = parse_int(key, v);
    if (!z.fits_slong_p()) throw ConfigError("config: '" + key + "' out of range");
    return z.get_si();
}

std::string signs_str(const std::array<int, 4>& signs)
{
    std::string out;
    for (int e : signs) out += e < 0 ? '-' : '+';
    return out;
}

std::string profile_name(Profile p) { return p == Profile::Strict ? "strict" : "relaxed"; }

std::string q_str(const mpq_class& q)
{
    return q.get_den() == 1 ? q.get_num().get_str() : q.get_num().get_str() + "/" + q.get_den().get_str();
}

Json rational(const mpq_class& q) { return Json::array({q.get_num().get_str(), q.get_den().get_str()}); }

Json form_json(const AffineForm& f)
{
    Json j;
    j["X"] = f.cx.get_str();
    j["Y"] = f.cy.get_str();
    j["1"] = f.c0.get_str();
    return j;
}

// tautological point on y^2 = (x + t a1)(x + t a2)(x + t a3) attached to a witness
CurvePoint tautological_point(const LinearFormSystem& s, const mpz_class& t, const mpz_class& x, const mpz_class& y)
{
    mpz_class c = s.c(x), d = s.d(y);
    mpq_class px(t * c, d), py(t * t * s.m, d * d);
    px.canonicalize();
    py.canonicalize();
    return CurvePoint::affine(px, py);
}

struct TwistData {
    SquareClass t;
    mpz_class value;
    std::vector<u64> factors;  // |L_1| .. |L_4|
    std::string problem;       // empty when t has the required shape
};

// t = kappa L1 L2 L3 L4 with four distinct primes outside T, coprime to kappa, square at T
TwistData twist_of(const Curve& E, const mpz_class& kappa, const std::array<mpz_class, 4>& values,
                   const mpz_class& prime_bound)
{
    TwistData out;
    out.value = kappa;
    SquareClass t = SquareClass::of(kappa);
    for (auto& v : values) {
        out.value *= v;
        mpz_class a = abs(v);
        if (!is_prime(a)) { out.problem = "P2: " + a.get_str() + " is not prime"; return out; }
        if (a > prime_bound || !a.fits_ulong_p()) { out.problem = "prime " + a.get_str() + " above bound"; return out; }
        u64 q = a.get_ui();
        if (std::find(out.factors.begin(), out.factors.end(), q) != out.factors.end()) {
            out.problem = "P2: repeated prime " + a.get_str();
            return out;
        }
        if (E.in_T(Place{q})) { out.problem = "P2: " + a.get_str() + " lies in T"; return out; }
        if (kappa % a == 0) { out.problem = "P2: " + a.get_str() + " divides kappa"; return out; }
        out.factors.push_back(q);
        t *= SquareClass::prime(q, sgn(v));
    }
    out.t = t;
    for (auto v : E.T)
        if (!local_class_of(out.value, v).is_square()) {
            out.problem = "P1: t is not a square at " + v.str();
            return out;
        }
    return out;
}

Json basis_json(const std::vector<ClassPair>& basis)
{
    Json b = Json::array();
    for (auto& [x1, x2] : basis) b.push_back(Json::array({x1.str(), x2.str()}));
    return b;
}

Json conclusion_text()
{
    return Json::array({
        "dim Sel2(E^t/Q) = 2 = dim E^t(Q)[2], so rk E^t(Q) = 0",
        "the recorded point on E^-t has infinite order (24P != O), so rk E^-t(Q) >= 1",
        "rk E^t(Q(i)) = rk E^t(Q) + rk E^-t(Q) >= 1 > 0 = rk E^t(Q)",
        "rk E^-t(Q(i)) = rk E^-t(Q) + rk E^t(Q) = rk E^-t(Q) > 0",
    });
}

// Gaussian integers as (re, im)
struct Gauss {
    mpz_class re, im;
    Gauss operator*(const Gauss& o) const { return {re * o.re - im * o.im, re * o.im + im * o.re}; }
};

bool gauss_is_square(const Gauss& z)
{
    mpz_class n = z.re * z.re + z.im * z.im;
    if (n == 0) return true;
    if (!mpz_perfect_square_p(n.get_mpz_t())) return false;
    mpz_class s = sqrt(n);
    // z = (a + b i)^2: a^2 = (s + re)/2, b^2 = (s - re)/2, 2ab = im
    mpz_class a2 = s + z.re, b2 = s - z.re;
    if (a2 % 2 != 0) return false;
    a2 /= 2;
    b2 /= 2;
    if (!mpz_perfect_square_p(a2.get_mpz_t()) || !mpz_perfect_square_p(b2.get_mpz_t())) return false;
    mpz_class a = sqrt(a2), b = sqrt(b2);
    return 2 * a * b == abs(z.im);
}

VerifyResult fail(const std::string& clause, const std::string& reason) { return {false, clause, reason, std::nullopt}; }

} // namespace

void ExperimentConfig::validate() const
{
    if (N <= 0) throw ConfigError("config: N must be positive");
    if (cutoff == 0) throw ConfigError("config: cutoff must be positive");
    if (prime_bound <= 0) throw ConfigError("config: prime_bound must be positive");
    if (witness_limit <= 0) throw ConfigError("config: witness_limit must be positive");
    if (kappa == 0) throw ConfigError("config: kappa must be nonzero");
    if (m == 0) throw ConfigError("config: m must be nonzero");
    if (curve[0] == curve[1] || curve[0] == curve[2] || curve[1] == curve[2])
        throw ConfigError("config: curve roots must be distinct");
}

ExperimentConfig parse_config(std::istream& in)
{
    ExperimentConfig c;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
        if (key == "curve") {
            std::replace(val.begin(), val.end(), ',', ' ');
            std::istringstream ss(val);
            std::vector<std::string> parts;
            for (std::string w; ss >> w;) parts.push_back(w);
            if (parts.size() != 3) throw ConfigError("config: curve expects three integers");
            for (int k = 0; k < 3; ++k) c.curve[k] = parse_int(key, parts[k]);
        } else if (key == "kappa") c.kappa = parse_int(key, val);
        else if (key == "m") c.m = parse_int(key, val);
        else if (key == "lambda") c.lambda = parse_int(key, val);
        else if (key == "N") c.N = parse_long(key, val);
        else if (key == "cutoff") {
            long v = parse_long(key, val);
            if (v <= 0) throw ConfigError("config: cutoff must be positive");
            c.cutoff = (u64)v;
        } else if (key == "prime_bound") c.prime_bound = parse_int(key, val);
        else if (key == "witness_limit") c.witness_limit = parse_long(key, val);
        else if (key == "profile") {
            if (val == "strict") c.profile = Profile::Strict;
            else if (val == "relaxed") c.profile = Profile::Relaxed;
            else throw ConfigError("config: profile must be strict or relaxed");
        } else if (key == "signs") {
            std::string compact;
            for (char ch : val) if (ch != ' ' && ch != ',') compact += ch;
            if (compact.size() != 4 || compact.find_first_not_of("+-") != std::string::npos)
                throw ConfigError("config: signs expects four of '+' / '-'");
            for (int k = 0; k < 4; ++k) c.signs[k] = compact[k] == '-' ? -1 : 1;
        } else if (key == "output") c.output = val;
        else throw ConfigError("config: unknown key '" + key + "'");
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw ConfigError("config: cannot open " + path);
    return parse_config(f);
}

std::string to_text(const ExperimentConfig& c)
{
    std::ostringstream o;
    o << "curve = " << c.curve[0] << " " << c.curve[1] << " " << c.curve[2] << "\n"
      << "kappa = " << c.kappa << "\n"
      << "m = " << c.m << "\n"
      << "lambda = " << c.lambda << "\n"
      << "N = " << c.N << "\n"
      << "cutoff = " << c.cutoff << "\n"
      << "prime_bound = " << c.prime_bound << "\n"
      << "witness_limit = " << c.witness_limit << "\n"
      << "profile = " << profile_name(c.profile) << "\n"
      << "signs = " << signs_str(c.signs) << "\n";
    if (!c.output.empty()) o << "output = " << c.output << "\n";
    return o.str();
}

Region signed_region(const LinearFormSystem& s, const std::array<int, 4>& signs)
{
    Region r = default_region(s);
    for (int i = 0; i < 4; ++i)
        if (signs[i] < 0) {
            auto& h = r.planes[i];
            h = HalfPlane{-h.a, -h.b, -h.c};
        }
    return r;
}

std::variant<Certificate, NotFound> run_experiment(const ExperimentConfig& cfg)
{
    cfg.validate();
    Curve E;
    LinearFormSystem sys;
    try {
        E = make_curve(cfg.curve[0], cfg.curve[1], cfg.curve[2]);
        sys = build_system(cfg.curve[0], cfg.curve[1], cfg.curve[2], cfg.kappa, cfg.m, cfg.lambda, cfg.profile);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    auto adm = admissibility_check(sys);
    if (!adm.ok) throw NotAdmissible(adm.prime);

    CountOptions opt;
    opt.cutoff = cfg.cutoff;
    Region region = signed_region(sys, cfg.signs);
    try {
        region_volume(region);
    } catch (const DegenerateRegion&) {
        throw ConfigError("config: region " + signs_str(cfg.signs) + " has empty interior");
    }
    auto rep = count_and_compare(sys, region, cfg.N, opt);

    NotFound nf;
    nf.witnesses = rep.witnesses.size();
    for (auto& w : rep.witnesses) {
        if (nf.examined >= cfg.witness_limit) break;
        ++nf.examined;
        auto td = twist_of(E, cfg.kappa, w.values, cfg.prime_bound);
        if (!td.problem.empty()) {
            nf.skipped.push_back({w.x, w.y, -1, td.problem});
            continue;
        }
        auto sel = sel2_of_twist(E, td.t);
        if (sel.dim != 2) {
            nf.skipped.push_back({w.x, w.y, sel.dim, "dim Sel2 = " + std::to_string(sel.dim)});
            continue;
        }
        Curve F = twist_known(E, SquareClass(-1, {}) * td.t);
        CurvePoint P = tautological_point(sys, td.value, w.x, w.y);
        if (!on_curve(F, P) || mul(F, P, 24).infinity) {
            nf.skipped.push_back({w.x, w.y, sel.dim, "tautological point is torsion"});
            continue;
        }

        Json doc;
        doc["schema_version"] = 1;
        doc["curve"] = Json::array({cfg.curve[0].get_str(), cfg.curve[1].get_str(), cfg.curve[2].get_str()});
        Json T = Json::array();
        for (auto v : E.T) T.push_back(v.str());
        doc["T"] = T;
        Json forms;
        forms["kappa"] = sys.kappa.get_str();
        forms["m"] = sys.m.get_str();
        forms["lambda"] = sys.lambda.get_str();
        forms["profile"] = profile_name(cfg.profile);
        forms["signs"] = signs_str(cfg.signs);
        for (int i = 0; i < 4; ++i) forms["L" + std::to_string(i + 1)] = form_json(sys.L[i]);
        doc["forms"] = forms;
        Json t;
        t["sign"] = sgn(td.value);
        t["kappa"] = cfg.kappa.get_str();
        Json factors = Json::array();
        for (auto& v : w.values) factors.push_back(v.get_str());
        t["factors"] = factors;
        t["value"] = td.value.get_str();
        doc["t"] = t;
        doc["witness"] = Json::array({w.x, w.y});
        Json s;
        s["dim"] = sel.dim;
        s["basis"] = basis_json(sel.basis);
        doc["selmer"] = s;
        Json p;
        p["curve"] = "y^2 = (x + t a1)(x + t a2)(x + t a3)";
        p["x"] = rational(P.x);
        p["y"] = rational(P.y);
        p["non_torsion"] = true;
        doc["point"] = p;
        doc["conclusion"] = conclusion_text();
        Json betas = Json::array();
        for (auto& [q, b] : rep.betas) betas.push_back(Json::array({q, q_str(b)}));
        doc["betas"] = betas;
        Json bounds;
        bounds["N"] = cfg.N;
        bounds["cutoff"] = cfg.cutoff;
        bounds["prime_bound"] = cfg.prime_bound.get_str();
        bounds["witness_limit"] = cfg.witness_limit;
        bounds["witnesses_sieved"] = nf.witnesses;
        bounds["witnesses_examined"] = nf.examined;
        Json skipped = Json::array();
        for (auto& k : nf.skipped) {
            Json e;
            e["witness"] = Json::array({k.x, k.y});
            e["dim"] = k.dim;
            e["reason"] = k.reason;
            skipped.push_back(e);
        }
        bounds["skipped"] = skipped;
        doc["bounds"] = bounds;
        return Certificate{doc};
    }
    return nf;
}

GaussianProbe gaussian_probe(const Curve& Et, const CurvePoint& P_minus, long bound)
{
    GaussianProbe g;
    // (X, Y) on E^-t maps to (-X, i Y) on E^t
    if (!P_minus.infinity) g.image_on_curve = Et.f(-P_minus.x) == -P_minus.y * P_minus.y;
    for (long u = -bound; u <= bound; ++u)
        for (long v = -bound; v <= bound; ++v) {
            if (v == 0) continue;  // rational x is not the object of the probe
            Gauss val{1, 0};
            for (const mpz_class* a : {&Et.a1, &Et.a2, &Et.a3}) val = val * Gauss{mpz_class(u) - *a, mpz_class(v)};
            if (gauss_is_square(val)) g.integral_points.push_back({std::to_string(u), std::to_string(v)});
        }
    return g;
}

VerifyResult verify_certificate(const Json& cert, long probe_bound)
{
    try {
        if (cert.at("schema_version").get<int>() != 1) return fail("schema", "unsupported schema_version");
        auto& cj = cert.at("curve");
        std::array<mpz_class, 3> a;
        for (int k = 0; k < 3; ++k) a[k] = mpz_class(cj.at(k).get<std::string>());
        Curve E = make_curve(a[0], a[1], a[2]);

        Json T = Json::array();
        for (auto v : E.T) T.push_back(v.str());
        if (T != cert.at("T")) return fail("T", "recorded T differs from the recomputed one");

        auto& fj = cert.at("forms");
        mpz_class kappa(fj.at("kappa").get<std::string>()), m(fj.at("m").get<std::string>()),
            lambda(fj.at("lambda").get<std::string>());
        Profile prof = fj.at("profile").get<std::string>() == "strict" ? Profile::Strict : Profile::Relaxed;
        auto sys = build_system(a[0], a[1], a[2], kappa, m, lambda, prof);
        for (int i = 0; i < 4; ++i)
            if (form_json(sys.L[i]) != fj.at("L" + std::to_string(i + 1)))
                return fail("forms", "L" + std::to_string(i + 1) + " does not match (kappa, m, lambda)");

        auto& tj = cert.at("t");
        if (mpz_class(tj.at("kappa").get<std::string>()) != kappa) return fail("t", "kappa differs from the forms");
        long wx = cert.at("witness").at(0).get<long>(), wy = cert.at("witness").at(1).get<long>();
        std::array<mpz_class, 4> values;
        for (int i = 0; i < 4; ++i) values[i] = sys.L[i].eval(wx, wy);
        auto& fac = tj.at("factors");
        if (fac.size() != 4) return fail("t", "four factors expected");
        std::array<mpz_class, 4> recorded;
        for (int i = 0; i < 4; ++i) recorded[i] = mpz_class(fac.at(i).get<std::string>());

        // P2 on the recorded factors first, so a replaced prime is reported as such
        for (int i = 0; i < 4; ++i) {
            mpz_class q = abs(recorded[i]);
            if (!is_prime(q)) return fail("P2", recorded[i].get_str() + " is not prime");
            if (!q.fits_ulong_p()) return fail("P2", recorded[i].get_str() + " too large");
            for (int j = 0; j < i; ++j)
                if (q == abs(recorded[j])) return fail("P2", "repeated prime " + q.get_str());
            if (E.in_T(Place{q.get_ui()})) return fail("P2", q.get_str() + " lies in T");
            if (gcd(q, kappa) != 1) return fail("P2", q.get_str() + " divides kappa");
        }
        for (int i = 0; i < 4; ++i)
            if (values[i] != recorded[i])
                return fail("witness", "L" + std::to_string(i + 1) + "(x, y) differs from factor " + std::to_string(i + 1));
        mpz_class tv = kappa * values[0] * values[1] * values[2] * values[3];
        if (tv.get_str() != tj.at("value").get<std::string>() || sgn(tv) != tj.at("sign").get<int>())
            return fail("t", "t differs from kappa L1 L2 L3 L4");

        for (auto v : E.T)
            if (!local_class_of(tv, v).is_square()) return fail("P1", "t is not a square at " + v.str());

        SquareClass t = SquareClass::of(kappa);
        for (int i = 0; i < 4; ++i) t *= SquareClass::prime(mpz_class(abs(values[i])).get_ui(), sgn(values[i]));
        auto sel = sel2_of_twist(E, t);
        auto& sj = cert.at("selmer");
        if (sj.at("dim").get<int>() != sel.dim)
            return fail("Sel-recompute", "recorded dim " + std::to_string(sj.at("dim").get<int>()) + ", recomputed " +
                                             std::to_string(sel.dim));
        if (basis_json(sel.basis) != sj.at("basis")) return fail("Sel-recompute", "basis differs");
        if (sel.dim != 2) return fail("Sel-recompute", "dim Sel2 is not 2");

        auto& pj = cert.at("point");
        auto rat = [](const Json& j) {
            mpq_class q(mpz_class(j.at(0).get<std::string>()), mpz_class(j.at(1).get<std::string>()));
            q.canonicalize();
            return q;
        };
        CurvePoint P = CurvePoint::affine(rat(pj.at("x")), rat(pj.at("y")));
        Curve F = twist_known(E, SquareClass(-1, {}) * t);
        if (!on_curve(F, P)) return fail("point", "point is not on E^-t");
        if (mul(F, P, 24).infinity) return fail("point", "24P = O");
        if (!(P == tautological_point(sys, tv, wx, wy))) return fail("point", "point is not the witness point");
        if (cert.at("conclusion") != conclusion_text()) return fail("conclusion", "conclusion text differs");

        VerifyResult ok;
        if (probe_bound > 0) ok.probe = gaussian_probe(twist_known(E, t), P, probe_bound);
        return ok;
    } catch (const Json::exception& e) {
        return fail("parse", e.what());
    } catch (const std::invalid_argument& e) {
        return fail("parse", e.what());
    }
}

} // namespace ranktwist
