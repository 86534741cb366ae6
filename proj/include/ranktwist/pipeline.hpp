#pragma once
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "ranktwist/constellation.hpp"
#include "ranktwist/seltrans.hpp"

namespace ranktwist {

using Json = nlohmann::ordered_json;

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
    std::array<mpz_class, 3> curve{0, 1, 2};
    mpz_class kappa = 1;
    mpz_class m = 24;
    mpz_class lambda = 1;
    long N = 40;                // sieve box [-N, N]^2
    u64 cutoff = 10000;         // singular series
    mpz_class prime_bound = mpz_class("1000000000000");  // largest |L_i| accepted
    long witness_limit = 1000;  // witnesses examined before giving up
    Profile profile = Profile::Strict;
    std::array<int, 4> signs{1, 1, 1, 1};  // flips of the default half-planes L1, L2, L3, kappa L4 > 0
    std::string output;

    void validate() const;
};

// key = value lines, '#' starts a comment
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
std::string to_text(const ExperimentConfig& c);

// default region with plane i replaced by its opposite where signs[i] = -1
Region signed_region(const LinearFormSystem& s, const std::array<int, 4>& signs);

struct SkippedWitness {
    long x = 0, y = 0;
    int dim = -1;  // -1: t not of the required shape
    std::string reason;
};

struct NotFound {
    long examined = 0;
    std::size_t witnesses = 0;
    std::vector<SkippedWitness> skipped;
};

struct Certificate {
    Json doc;
    std::string dump() const { return doc.dump(2) + "\n"; }
};

std::variant<Certificate, NotFound> run_experiment(const ExperimentConfig& cfg);

struct GaussianProbe {
    bool image_on_curve = false;          // (-x, i y) of the point lies on E^t over Q(i)
    std::vector<std::pair<std::string, std::string>> integral_points;  // x = u + v i with |u|,|v| <= bound
};

// E^t over Q(i): integral x with f(x) a square in Z[i], and the image of the tautological point
GaussianProbe gaussian_probe(const Curve& Et, const CurvePoint& P_minus, long bound);

struct VerifyResult {
    bool ok = true;
    std::string clause;  // first violated clause
    std::string reason;
    std::optional<GaussianProbe> probe;
};

VerifyResult verify_certificate(const Json& cert, long probe_bound = 0);

enum ExitCode { ExitSuccess = 0, ExitNotFound = 2, ExitVerifyFailed = 3, ExitConfigError = 4 };

} // namespace ranktwist
