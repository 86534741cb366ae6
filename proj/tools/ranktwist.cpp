#include <fstream>
#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "ranktwist/pipeline.hpp"

using namespace ranktwist;

namespace {

Curve parse_curve(const std::vector<std::string>& a)
{
    if (a.size() != 3) throw ConfigError("--curve expects three integers");
    return make_curve(mpz_class(a[0]), mpz_class(a[1]), mpz_class(a[2]));
}

Json pair_json(const ClassPair& z) { return Json::array({z.first.str(), z.second.str()}); }

Json group_json(const SelmerGroup& g)
{
    Json j;
    j["dim"] = g.dim();
    Json b = Json::array();
    for (auto& z : g.pairs()) b.push_back(pair_json(z));
    j["basis"] = b;
    return j;
}

Json chain_json(const TransitionChain& c)
{
    Json j = Json::array();
    for (std::size_t k = 0; k < c.primes.size(); ++k)
        j.push_back(Json::array({c.primes[k], c.pis[k].str()}));
    return j;
}

std::array<int, 4> parse_signs(const std::string& s)
{
    std::istringstream in("signs = " + s);
    return parse_config(in).signs;
}

int run_selmer(const std::vector<std::string>& curve, const std::string& twist_by, const std::vector<u64>& chain,
               bool reduce)
{
    Curve E = parse_curve(curve);
    Json out;
    out["curve"] = E.str();
    Json T = Json::array();
    for (auto v : E.T) T.push_back(v.str());
    out["T"] = T;
    if (!twist_by.empty()) {
        auto d = SquareClass::of(mpz_class(twist_by));
        auto s = sel2_of_twist(E, d);
        out["twist"] = d.str();
        out["selmer"] = group_json(s.group);
    } else {
        out["selmer"] = group_json(compute_selmer(baseline_structure(E)));
    }
    if (!chain.empty()) {
        auto c = make_chain(E);
        for (auto p : chain) c.append(p);
        Json steps = Json::array();
        for (std::size_t i = 0; i < c.primes.size(); ++i) {
            auto r = transition_step(c, i);
            Json s;
            s["prime"] = c.primes[i];
            s["dim_before"] = r.dim_before;
            s["dim_after"] = r.dim_after;
            s["restriction_dim"] = r.restriction_dim;
            s["case"] = r.case_tag;
            steps.push_back(s);
        }
        out["chain"] = steps;
        out["final"] = group_json(compute_selmer(c.structure(c.primes.size())));
    }
    if (reduce) {
        auto r = selmer_reduce(E);
        Json steps = Json::array();
        for (auto& s : r.steps) {
            Json j;
            j["prime"] = s.prime;
            j["kind"] = s.kind;
            j["dim_before"] = s.dim_before;
            j["dim_after"] = s.dim_after;
            steps.push_back(j);
        }
        out["reduce"] = {{"dims", r.dims}, {"steps", steps}, {"chain", chain_json(r.chain)}, {"trivial", r.trivial}};
    }
    std::cout << out.dump(2) << "\n";
    return ExitSuccess;
}

int run_search(const std::string& path, std::string output)
{
    auto cfg = load_config(path);
    if (output.empty()) output = cfg.output;
    auto r = run_experiment(cfg);
    if (auto* nf = std::get_if<NotFound>(&r)) {
        for (auto& s : nf->skipped)
            std::cerr << "skipped (" << s.x << ", " << s.y << "): " << s.reason << "\n";
        std::cerr << "no certificate: " << nf->examined << " of " << nf->witnesses << " witnesses examined\n";
        return ExitNotFound;
    }
    auto& cert = std::get<Certificate>(r);
    for (auto& s : cert.doc["bounds"]["skipped"])
        std::cerr << "skipped (" << s["witness"][0] << ", " << s["witness"][1] << "): " << s["reason"].get<std::string>()
                  << "\n";
    if (output.empty() || output == "-") {
        std::cout << cert.dump();
    } else {
        std::ofstream f(output, std::ios::binary);
        if (!f) throw ConfigError("cannot write " + output);
        f << cert.dump();
        std::cerr << "certificate written to " << output << "\n";
    }
    return ExitSuccess;
}

int run_constellation(const std::vector<std::string>& curve, const std::string& kappa, const std::string& m,
                      const std::string& lambda, long N, u64 cutoff, bool relaxed, const std::string& signs,
                      bool witnesses)
{
    auto s = build_system(mpz_class(curve.at(0)), mpz_class(curve.at(1)), mpz_class(curve.at(2)), mpz_class(kappa),
                          mpz_class(m), mpz_class(lambda), relaxed ? Profile::Relaxed : Profile::Strict);
    auto adm = admissibility_check(s);
    if (!adm.ok) throw NotAdmissible(adm.prime);
    CountOptions o;
    o.cutoff = cutoff;
    auto rep = count_and_compare(s, signed_region(s, parse_signs(signs)), N, o);
    Json out;
    Json forms;
    for (int i = 0; i < 4; ++i) forms["L" + std::to_string(i + 1)] = s.L[i].str();
    out["forms"] = forms;
    out["N"] = N;
    Json betas = Json::array();
    for (auto& [p, b] : rep.betas) betas.push_back(Json::array({p, b.get_str()}));
    out["betas"] = betas;
    out["singular_series"] = {{"value", rep.series.value}, {"cutoff", rep.series.cutoff},
                              {"decade_change", rep.series.decade_change}};
    out["volume_constant"] = rep.volume_constant;
    out["count"] = rep.count;
    out["prediction"] = rep.prediction;
    out["ratio"] = rep.ratio;
    out["witness_count"] = rep.witnesses.size();
    if (witnesses) {
        Json w = Json::array();
        for (auto& x : rep.witnesses) w.push_back(Json::array({x.x, x.y}));
        out["witnesses"] = w;
    }
    out["flags"] = rep.flags;
    std::cout << out.dump(2) << "\n";
    return ExitSuccess;
}

int run_tables()
{
    auto z = reference_z_table();
    auto L = reference_form_table();
    auto print = [](const SignTable& t) {
        std::cout << "      ";
        for (auto& c : t.cols) std::cout << " " << std::setw(5) << c;
        std::cout << "\n";
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            std::cout << std::setw(6) << t.rows[r];
            for (int s : t.signs[r]) std::cout << " " << std::setw(5) << (s > 0 ? "+" : "-");
            std::cout << "\n";
        }
    };
    std::cout << "signs of z at the real places\n";
    print(z);
    std::cout << "\nsigns of the forms at the real places\n";
    print(L);
    auto prod = sign_table_products(z, L);
    auto pattern = suitable_pattern();
    ProductMatrix m{};
    std::cout << "\nsymbol products (required value in brackets)\n";
    for (int i = 0; i < 12; ++i) {
        std::cout << std::setw(6) << z.rows[i];
        for (int j = 0; j < 3; ++j) {
            m[i][j] = prod[i][j];
            std::string req = pattern[i][j] == 0 ? "" : pattern[i][j] > 0 ? "(+)" : "(-)";
            std::cout << " " << std::setw(3) << (prod[i][j] > 0 ? "+1" : "-1") << std::setw(4) << req;
        }
        m[i][3] = 1;
        std::cout << "\n";
    }
    auto c = cascade_predict(m, 6);
    std::cout << "\ncascade:";
    for (int d : c.dims) std::cout << " " << d;
    std::cout << "\nfinal Sel2 dimension: " << c.final_dim << "\n";
    for (auto& f : c.flags) std::cout << "flag: " << f << "\n";
    return ExitSuccess;
}

int run_verify(const std::string& path, long probe)
{
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open " + path);
    Json doc;
    try {
        doc = Json::parse(f);
    } catch (const Json::exception& e) {
        std::cout << "fail(parse): " << e.what() << "\n";
        return ExitVerifyFailed;
    }
    auto r = verify_certificate(doc, probe);
    if (!r.ok) {
        std::cout << "fail(" << r.clause << "): " << r.reason << "\n";
        return ExitVerifyFailed;
    }
    std::cout << "pass\n";
    if (r.probe) {
        std::cout << "consistency probe: image of the point on E^t over Q(i): " << (r.probe->image_on_curve ? "yes" : "no")
                  << "; Gaussian integral x with |re|, |im| <= " << probe << ": " << r.probe->integral_points.size()
                  << "\n";
        for (auto& [u, v] : r.probe->integral_points) std::cout << "  x = " << u << " + " << v << " i\n";
    }
    return ExitSuccess;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"quadratic twists with prescribed 2-Selmer rank and rank growth over Q(i)"};
    app.require_subcommand(1);

    std::vector<std::string> curve;
    std::string twist_by;
    std::vector<u64> chain;
    bool reduce = false;
    auto* sel = app.add_subcommand("selmer", "2-Selmer group of E or a twist, transition chains, reduction to 0");
    sel->add_option("--curve", curve, "roots a1 a2 a3")->expected(3)->required();
    sel->add_option("--twist", twist_by, "twist by the class of this integer");
    sel->add_option("--chain", chain, "primes of a transition chain (uniformiser p)")->delimiter(',');
    sel->add_flag("--reduce", reduce, "add primes until the Selmer group is trivial");

    std::string cfg_path, output;
    auto* search = app.add_subcommand("twist-search", "run a twist search from a config file");
    search->add_option("config", cfg_path, "config file")->required();
    search->add_option("-o,--output", output, "certificate path, '-' for stdout");

    std::string kappa = "1", m = "24", lambda = "1", signs = "++++";
    long N = 100;
    u64 cutoff = 10000;
    bool relaxed = false, list = false;
    auto* con = app.add_subcommand("constellation", "local densities, singular series, count against prediction");
    con->add_option("--curve", curve, "roots a1 a2 a3")->expected(3)->required();
    con->add_option("--kappa", kappa);
    con->add_option("--m", m);
    con->add_option("--lambda", lambda);
    con->add_option("-N", N, "box [-N, N]^2");
    con->add_option("--cutoff", cutoff, "singular series cutoff");
    con->add_option("--signs", signs, "flip half-planes of the default region");
    con->add_flag("--relaxed", relaxed, "skip the congruence profile checks");
    con->add_flag("--witnesses", list, "list the witnesses");

    auto* tab = app.add_subcommand("tables", "sign tables, symbol products and the predicted cascade");

    std::string cert_path;
    long probe = 0;
    auto* ver = app.add_subcommand("verify", "re-check a certificate");
    ver->add_option("certificate", cert_path)->required();
    ver->add_option("--probe", probe, "bound of the Gaussian-integer sweep (0 = off)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : ExitConfigError;
    }

    try {
        if (*sel) return run_selmer(curve, twist_by, chain, reduce);
        if (*search) return run_search(cfg_path, output);
        if (*con) return run_constellation(curve, kappa, m, lambda, N, cutoff, relaxed, signs, list);
        if (*tab) return run_tables();
        if (*ver) return run_verify(cert_path, probe);
    } catch (const NotAdmissible& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ExitConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return ExitSuccess;
}
