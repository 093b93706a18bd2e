#include "iirl/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace iirl {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key()))
            throw ConfigError("config: unknown key '" + it.key() + "' in " + where);
    }
}

EnvironmentSpec parse_environment(const json& j) {
    EnvironmentSpec env;
    const std::string type = j.at("type").get<std::string>();
    if (type == "maze") {
        reject_unknown(j,
                       {"type", "side", "rewards", "move_success", "discount",
                        "all_doors_open_debug", "random_move_over_existing"},
                       "environment(maze)");
        env.type = EnvironmentSpec::Type::Maze;
        env.maze = MazeMakerSpec::canonical();
        if (j.contains("side")) env.maze.side = j.at("side").get<int>();
        if (j.contains("rewards")) {
            env.maze.rewards.clear();
            for (const auto& pair : j.at("rewards"))
                env.maze.rewards.emplace_back(pair.at(0).get<int>(), pair.at(1).get<double>());
        }
        if (j.contains("move_success")) env.maze.move_success = j.at("move_success").get<double>();
        if (j.contains("discount")) env.maze.discount = j.at("discount").get<double>();
        if (j.contains("all_doors_open_debug"))
            env.maze.all_doors_open_debug = j.at("all_doors_open_debug").get<bool>();
        if (j.contains("random_move_over_existing"))
            env.maze.random_move_over_existing = j.at("random_move_over_existing").get<bool>();
        env.maze.validate();
    } else if (type == "random") {
        reject_unknown(j,
                       {"type", "n_states", "n_a1", "n_a2", "dirichlet_alpha", "beta_a", "beta_b",
                        "influence_cap_a1", "influence_cap_a2", "discount"},
                       "environment(random)");
        env.type = EnvironmentSpec::Type::Random;
        if (j.contains("n_states")) env.random.n_states = j.at("n_states").get<int>();
        if (j.contains("n_a1")) env.random.n_a1 = j.at("n_a1").get<int>();
        if (j.contains("n_a2")) env.random.n_a2 = j.at("n_a2").get<int>();
        if (j.contains("dirichlet_alpha"))
            env.random.dirichlet_alpha = j.at("dirichlet_alpha").get<double>();
        if (j.contains("beta_a")) env.random.beta_a = j.at("beta_a").get<double>();
        if (j.contains("beta_b")) env.random.beta_b = j.at("beta_b").get<double>();
        if (j.contains("influence_cap_a1"))
            env.random.influence_cap_a1 = j.at("influence_cap_a1").get<double>();
        if (j.contains("influence_cap_a2"))
            env.random.influence_cap_a2 = j.at("influence_cap_a2").get<double>();
        if (j.contains("discount")) env.random.discount = j.at("discount").get<double>();
        env.random.validate();
    } else if (type == "fixture") {
        reject_unknown(j, {"type", "fixture", "x", "y", "delta"}, "environment(fixture)");
        env.type = EnvironmentSpec::Type::Fixture;
        env.fixture = j.at("fixture").get<std::string>();
        if (env.fixture != "theorem3" && env.fixture != "lemma3")
            throw ConfigError("config: fixture must be theorem3 or lemma3");
        if (j.contains("x")) env.fixture_x = j.at("x").get<double>();
        if (j.contains("y")) env.fixture_y = j.at("y").get<double>();
        if (j.contains("delta")) env.fixture_delta = j.at("delta").get<double>();
    } else if (type == "file") {
        reject_unknown(j, {"type", "path"}, "environment(file)");
        env.type = EnvironmentSpec::Type::File;
        env.path = j.at("path").get<std::string>();
    } else {
        throw ConfigError("config: unknown environment type " + type);
    }
    return env;
}

}  // namespace

TwoAgentMdp EnvironmentSpec::build(uint64_t seed) const {
    switch (type) {
        case Type::Maze:
            return build_maze_maker(maze);
        case Type::Random: {
            RandomMdpSpec spec = random;
            spec.seed = seed;
            return build_random_mdp(spec);
        }
        case Type::Fixture:
            return fixture == "theorem3" ? build_theorem3_fixture(fixture_x, fixture_y)
                                         : build_lemma3_fixture(fixture_delta);
        case Type::File:
            return load_mdp(path);
    }
    throw ConfigError("config: unhandled environment type");
}

RunConfig RunConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& ex) {
        throw ConfigError(std::string("config: JSON parse failure: ") + ex.what());
    }
    try {
        reject_unknown(j,
                       {"version", "selector", "environment", "model", "episodes", "samples",
                        "seeds", "out", "start_state", "mh", "betas", "epsilons",
                        "verify_n_states", "verify_discount", "non_interactive"},
                       "top level");
        if (j.at("version").get<int>() != 1) throw ConfigError("config: unsupported version");

        RunConfig cfg;
        cfg.selector = j.at("selector").get<std::string>();
        const std::set<std::string> selectors = {"alg1", "alg2", "planners-eval", "verify-ideal"};
        if (!selectors.count(cfg.selector))
            throw ConfigError("config: unknown selector " + cfg.selector);

        if (j.contains("seeds"))
            for (const auto& s : j.at("seeds")) cfg.seeds.push_back(s.get<uint64_t>());
        if (cfg.seeds.empty()) throw ConfigError("config: seeds must be nonempty");
        if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();
        if (j.contains("episodes")) cfg.episodes = j.at("episodes").get<int>();
        if (j.contains("samples")) cfg.samples = j.at("samples").get<int>();
        if (j.contains("start_state")) cfg.start_state = j.at("start_state").get<int>();
        if (j.contains("non_interactive")) cfg.non_interactive = j.at("non_interactive").get<bool>();

        if (cfg.selector != "verify-ideal") cfg.environment = parse_environment(j.at("environment"));

        if (j.contains("model")) cfg.model = ResponseModel::from_json(j.at("model").dump());

        if (j.contains("mh")) {
            const json& m = j.at("mh");
            reject_unknown(m, {"delta", "beta_prior_rate", "beta_proposal_shape", "propose_beta"},
                           "mh");
            if (m.contains("delta")) cfg.mh.delta = m.at("delta").get<double>();
            if (m.contains("beta_prior_rate"))
                cfg.mh.beta_prior_rate = m.at("beta_prior_rate").get<double>();
            if (m.contains("beta_proposal_shape"))
                cfg.mh.beta_proposal_shape = m.at("beta_proposal_shape").get<double>();
            if (m.contains("propose_beta")) cfg.mh.propose_beta = m.at("propose_beta").get<bool>();
        }
        if (j.contains("betas"))
            for (const auto& v : j.at("betas")) cfg.betas.push_back(v.get<double>());
        if (j.contains("epsilons"))
            for (const auto& v : j.at("epsilons")) cfg.epsilons.push_back(v.get<double>());
        if (j.contains("verify_n_states")) cfg.verify_n_states = j.at("verify_n_states").get<int>();
        if (j.contains("verify_discount"))
            cfg.verify_discount = j.at("verify_discount").get<double>();

        // selector-specific requirements
        if (cfg.selector == "alg1") {
            if (cfg.model.kind != ResponseModel::Kind::Optimal)
                throw ConfigError("config: alg1 requires the optimal follower model");
            if (cfg.episodes < 1) throw ConfigError("config: alg1 needs episodes >= 1");
        } else if (cfg.selector == "alg2") {
            if (cfg.model.kind != ResponseModel::Kind::Boltzmann)
                throw ConfigError("config: alg2 requires a boltzmann follower model");
            if (cfg.episodes < 1 || cfg.samples < 0)
                throw ConfigError("config: alg2 needs episodes >= 1 and samples >= 0");
        } else if (cfg.selector == "planners-eval") {
            if (cfg.betas.empty() && cfg.epsilons.empty())
                throw ConfigError("config: planners-eval needs betas and/or epsilons");
        } else if (cfg.selector == "verify-ideal") {
            if (cfg.verify_n_states < 2) throw ConfigError("config: verify-ideal needs >= 2 states");
            if (!(cfg.verify_discount >= 0.0 && cfg.verify_discount < 1.0))
                throw ConfigError("config: verify-ideal discount must lie in [0, 1)");
        }
        return cfg;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& ex) {
        throw ConfigError(std::string("config: ") + ex.what());
    }
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

StartDistribution RunConfig::start_for(const TwoAgentMdp& mdp) const {
    if (start_state) {
        if (*start_state < 0 || *start_state >= mdp.n_states)
            throw ConfigError("config: start_state out of range");
        return StartDistribution::point(mdp.n_states, *start_state);
    }
    return StartDistribution::uniform(mdp.n_states);
}

}  // namespace iirl
