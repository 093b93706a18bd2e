#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "iirl/bayesian.hpp"
#include "iirl/environments.hpp"
#include "iirl/mdp.hpp"
#include "iirl/planners.hpp"

namespace iirl {

/// Raised for configuration problems the CLI maps to exit code 2.
struct ConfigError : Error {
    using Error::Error;
};

struct EnvironmentSpec {
    enum class Type { Maze, Random, Fixture, File };
    Type type = Type::Random;
    MazeMakerSpec maze;
    RandomMdpSpec random;
    std::string fixture;  // "theorem3" | "lemma3"
    double fixture_x = 2.0, fixture_y = 1.0, fixture_delta = 0.1;
    std::string path;

    /// Builds the instance for one seed (random environments draw their
    /// randomness from the seed's environment stream).
    TwoAgentMdp build(uint64_t seed) const;
};

/// Parsed and validated run configuration. Unknown keys anywhere in the
/// document are rejected; the schema carries an explicit version field.
struct RunConfig {
    std::string selector;  // alg1 | alg2 | planners-eval | verify-ideal
    EnvironmentSpec environment;
    ResponseModel model;
    int episodes = 50;
    int samples = 2000;
    std::vector<uint64_t> seeds;
    std::string out_dir = "results";
    std::optional<int> start_state;  // point start; empty means uniform
    MhConfig mh;
    std::vector<double> betas;     // planners-eval sweep
    std::vector<double> epsilons;  // planners-eval sweep
    int verify_n_states = 5;
    double verify_discount = 0.9;
    bool non_interactive = false;

    static RunConfig from_json_text(const std::string& text);
    static RunConfig from_file(const std::string& path);

    StartDistribution start_for(const TwoAgentMdp& mdp) const;
};

}  // namespace iirl
