#include "doctest.h"
#include "oracles.hpp"
#include "ranktwist/pipeline.hpp"

#include <fstream>
#include <sstream>

using namespace ranktwist;

namespace {

const std::string src = RANKTWIST_SOURCE_DIR;

std::string slurp(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    std::ostringstream o;
    o << f.rdbuf();
    return o.str();
}

ExperimentConfig cfg_of(const std::string& text)
{
    std::istringstream in(text);
    return parse_config(in);
}

const Certificate& regression()
{
    static Certificate c = std::get<Certificate>(run_experiment(load_config(src + "/configs/regression.cfg")));
    return c;
}

mpq_class rat(const Json& j)
{
    mpq_class q(mpz_class(j.at(0).get<std::string>()), mpz_class(j.at(1).get<std::string>()));
    q.canonicalize();
    return q;
}

} // namespace

TEST_CASE("config parsing")
{
    auto c = load_config(src + "/configs/regression.cfg");
    CHECK(c.curve[0] == 0);
    CHECK(c.curve[2] == 8);
    CHECK(c.m == 6);
    CHECK(c.profile == Profile::Relaxed);
    CHECK(c.signs == std::array<int, 4>{-1, -1, -1, -1});
    CHECK(c.N == 100);

    // round trip
    auto again = cfg_of(to_text(c));
    CHECK(to_text(again) == to_text(c));

    auto d = cfg_of("# defaults\n\ncurve = 0, 1, 2\n");
    CHECK(d.kappa == 1);
    CHECK(d.profile == Profile::Strict);
    CHECK(d.signs == std::array<int, 4>{1, 1, 1, 1});

    CHECK_THROWS_AS(cfg_of("colour = red\n"), ConfigError);
    CHECK_THROWS_AS(cfg_of("m = six\n"), ConfigError);
    CHECK_THROWS_AS(cfg_of("curve = 0 1\n"), ConfigError);
    CHECK_THROWS_AS(cfg_of("curve = 0 1 1\n"), ConfigError);
    CHECK_THROWS_AS(cfg_of("N = 0\n"), ConfigError);
    CHECK_THROWS_AS(cfg_of("N = -5\n"), ConfigError);
    CHECK_THROWS_AS(cfg_of("witness_limit = 0\n"), ConfigError);
    CHECK_THROWS_AS(cfg_of("signs = +-+\n"), ConfigError);
    CHECK_THROWS_AS(cfg_of("profile = loose\n"), ConfigError);
    CHECK_THROWS_AS(cfg_of("no equals sign\n"), ConfigError);
    CHECK_THROWS_AS(load_config(src + "/configs/missing.cfg"), ConfigError);
}

TEST_CASE("configuration errors surface before sieving")
{
    // m = 2: all three of L1, L2, L3 cannot avoid 3
    auto bad = cfg_of("curve = 0 1 2\nm = 2\nprofile = relaxed\n");
    CHECK_THROWS_AS(run_experiment(bad), NotAdmissible);
    // strict profile rejects m = 6 for a curve with 3 in N
    CHECK_THROWS_AS(run_experiment(cfg_of("curve = 0 1 2\nm = 6\n")), ConfigError);
    // opposite half-planes for L1 and L2 leave no interior
    CHECK_THROWS_AS(run_experiment(cfg_of("curve = 0 1 8\nm = 6\nprofile = relaxed\nsigns = -+-+\n")), ConfigError);
    CHECK(ExitSuccess == 0);
    CHECK(ExitNotFound == 2);
    CHECK(ExitVerifyFailed == 3);
    CHECK(ExitConfigError == 4);
}

TEST_CASE("regression certificate replays byte for byte")
{
    auto bytes = regression().dump();
    CHECK(bytes == slurp(src + "/tests/data/regression_certificate.json"));
    auto second = std::get<Certificate>(run_experiment(load_config(src + "/configs/regression.cfg")));
    CHECK(second.dump() == bytes);
}

TEST_CASE("regression certificate content")
{
    const Json& doc = regression().doc;
    CHECK(doc["schema_version"] == 1);
    CHECK(doc["T"] == Json::array({"inf", "2", "3", "7"}));
    CHECK(doc["selmer"]["dim"] == 2);

    // factors re-derive from the witness
    long x = doc["witness"][0], y = doc["witness"][1];
    long v[4] = {36 * x + 1, 36 * x + 1296 * y + 37, 36 * x + 10368 * y + 289, 36 * y + 1};
    mpz_class t = 1;
    std::vector<u64> primes;
    for (int i = 0; i < 4; ++i) {
        CHECK(doc["t"]["factors"][i].get<std::string>() == std::to_string(v[i]));
        CHECK(v[i] < 0);
        t *= v[i];
        primes.push_back((u64)-v[i]);
    }
    CHECK(t > 0);
    CHECK(doc["t"]["value"].get<std::string>() == t.get_str());

    // exhaustive descent: 2^dim pairs
    auto E = make_curve(0, 1, 8);
    CHECK(oracle::twist_descent_count(E, 1, primes) == 4);

    // the point lies on y^2 = x (x + t) (x + 8t)
    mpq_class px = rat(doc["point"]["x"]), py = rat(doc["point"]["y"]);
    CHECK(py * py == px * (px + t) * (px + 8 * t));
    // integral model; a torsion point would have integral coordinates
    CHECK(px.get_den() != 1);
    // tautological shape: x = t c / d with c = 36 x + 1, d = 36 (36 y + 1)
    mpq_class expect(t * (36 * x + 1), mpz_class(36 * (36 * y + 1)));
    expect.canonicalize();
    CHECK(px == expect);

    CHECK(doc["conclusion"].size() == 4);
    CHECK(doc["betas"][0] == Json::array({2, "16"}));
}

TEST_CASE("skipped witnesses are logged with their dimension")
{
    const Json& sk = regression().doc["bounds"]["skipped"];
    bool saw4 = false;
    for (auto& e : sk) {
        if (e["dim"] != 4) continue;
        saw4 = true;
        long x = e["witness"][0], y = e["witness"][1];
        long v[4] = {36 * x + 1, 36 * x + 1296 * y + 37, 36 * x + 10368 * y + 289, 36 * y + 1};
        std::vector<u64> primes;
        int sign = 1;
        for (long w : v) {
            primes.push_back((u64)(w < 0 ? -w : w));
            if (w < 0) sign = -sign;
        }
        CHECK(oracle::twist_descent_count(make_curve(0, 1, 8), sign, primes) == 16);
    }
    CHECK(saw4);
    CHECK(regression().doc["bounds"]["witnesses_examined"] == (long)sk.size() + 1);
}

TEST_CASE("search exhausted")
{
    auto c = load_config(src + "/configs/regression.cfg");
    c.witness_limit = 5;
    auto r = run_experiment(c);
    REQUIRE(std::holds_alternative<NotFound>(r));
    auto& nf = std::get<NotFound>(r);
    CHECK(nf.examined == 5);
    CHECK(nf.skipped.size() == 5);
    CHECK(nf.witnesses > 5);

    // all-positive region: the tautological class stays in the Selmer group
    c = load_config(src + "/configs/regression.cfg");
    c.signs = {1, 1, 1, 1};
    c.N = 60;
    auto r2 = run_experiment(c);
    REQUIRE(std::holds_alternative<NotFound>(r2));
    for (auto& s : std::get<NotFound>(r2).skipped) CHECK(s.dim != 2);
}

TEST_CASE("verify_certificate")
{
    const Json& doc = regression().doc;
    auto ok = verify_certificate(doc, 10);
    CHECK(ok.ok);
    REQUIRE(ok.probe.has_value());
    CHECK(ok.probe->image_on_curve);
    CHECK(verify_certificate(Json::parse(slurp(src + "/tests/data/regression_certificate.json"))).ok);

    auto tampered = [&](auto&& edit) {
        Json j = doc;
        edit(j);
        return verify_certificate(j);
    };
    // q replaced by a composite
    auto p2 = tampered([](Json& j) { j["t"]["factors"][1] = "-74415"; });  // 5 * 14883
    CHECK(!p2.ok);
    CHECK(p2.clause == "P2");
    auto p2b = tampered([](Json& j) { j["t"]["factors"][0] = j["t"]["factors"][3]; });
    CHECK(p2b.clause == "P2");
    auto sel = tampered([](Json& j) { j["selmer"]["dim"] = 4; });
    CHECK(!sel.ok);
    CHECK(sel.clause == "Sel-recompute");
    auto basis = tampered([](Json& j) { j["selmer"]["basis"][0][0] = "3"; });
    CHECK(basis.clause == "Sel-recompute");
    auto wit = tampered([](Json& j) { j["witness"][1] = -56; });
    CHECK(wit.clause == "witness");
    auto pt = tampered([](Json& j) { j["point"]["y"][0] = "1"; });
    CHECK(pt.clause == "point");
    auto tt = tampered([](Json& j) { j["T"] = Json::array({"inf", "2", "3"}); });
    CHECK(tt.clause == "T");
    auto forms = tampered([](Json& j) { j["forms"]["L2"]["Y"] = "1297"; });
    CHECK(forms.clause == "forms");
    auto missing = tampered([](Json& j) { j.erase("point"); });
    CHECK(missing.clause == "parse");
}

TEST_CASE("gaussian probe")
{
    // y^2 = x^3 - x: f(i) = -2i = (1 - i)^2, f(-i) = 2i = (1 + i)^2
    auto E = make_curve(-1, 0, 1);
    auto g = gaussian_probe(E, CurvePoint::identity(), 1);
    std::set<std::pair<std::string, std::string>> pts(g.integral_points.begin(), g.integral_points.end());
    CHECK(pts.count({"0", "1"}));
    CHECK(pts.count({"0", "-1"}));
    // brute check of the remaining candidates: f(u + v i) for |u|, |v| <= 1, v != 0
    for (long u = -1; u <= 1; ++u)
        for (long v : {-1L, 1L}) {
            // f(z) = z^3 - z with z = u + v i
            long re = u * u * u - 3 * u * v * v - u, im = 3 * u * u * v - v * v * v - v;
            bool square = false;
            for (long a = -4; a <= 4; ++a)
                for (long b = -4; b <= 4; ++b) square = square || (a * a - b * b == re && 2 * a * b == im);
            CHECK(square == (pts.count({std::to_string(u), std::to_string(v)}) > 0));
        }
}
