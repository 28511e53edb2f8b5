#include "vlaw/loop/config.hpp"

#include <fstream>
#include <functional>
#include <sstream>

namespace vlaw::loop {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) {
        return "";
    }
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string families_to_string(const std::vector<env::Family>& families) {
    std::string out;
    for (std::size_t i = 0; i < families.size(); ++i) {
        if (i) out += ",";
        out += env::family_name(families[i]);
    }
    return out;
}

std::vector<env::Family> families_from_string(const std::string& text) {
    std::vector<env::Family> out;
    if (trim(text) == "all") {
        for (int i = 0; i < env::kNumFamilies; ++i) {
            out.push_back(static_cast<env::Family>(i));
        }
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(env::family_from_name(item));
        }
    }
    return out;
}

struct Field {
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <typename T>
T parse_number(const std::string& key, const std::string& value, const char* type_name) {
    std::stringstream ss(trim(value));
    T out{};
    ss >> out;
    if (ss.fail() || !ss.eof()) {
        throw ConfigError(key, "config: key '" + key + "' expects " + type_name + ", got '" +
                                   trim(value) + "'");
    }
    return out;
}

std::string format_double(double v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
}

const std::map<std::string, Field>& fields() {
    static const std::map<std::string, Field> table = [] {
        std::map<std::string, Field> f;
        auto add_int = [&f](const std::string& key, int RunConfig::* member) {
            f[key] = Field{[key, member](RunConfig& c, const std::string& v) {
                               c.*member = parse_number<int>(key, v, "an integer");
                           },
                           [member](const RunConfig& c) { return std::to_string(c.*member); }};
        };
        auto add_double = [&f](const std::string& key, double RunConfig::* member) {
            f[key] = Field{[key, member](RunConfig& c, const std::string& v) {
                               c.*member = parse_number<double>(key, v, "a real number");
                           },
                           [member](const RunConfig& c) { return format_double(c.*member); }};
        };
        f["families"] = Field{[](RunConfig& c, const std::string& v) {
                                  c.families = families_from_string(v);
                              },
                              [](const RunConfig& c) { return families_to_string(c.families); }};
        add_int("loop.k_real", &RunConfig::k_real);
        add_int("loop.n_syn", &RunConfig::n_syn);
        add_int("loop.k_iter", &RunConfig::k_iter);
        add_double("loop.alpha", &RunConfig::alpha);
        add_double("loop.lambda", &RunConfig::lambda);
        add_double("loop.beta", &RunConfig::beta);
        add_int("chunk.h", &RunConfig::chunk_len);
        add_int("wm.steps", &RunConfig::wm_steps);
        add_int("wm.pretrain_steps", &RunConfig::wm_pretrain_steps);
        add_int("wm.batch", &RunConfig::wm_batch);
        add_int("wm.hidden", &RunConfig::wm_hidden);
        add_int("wm.t_steps", &RunConfig::wm_t_steps);
        add_double("wm.lr", &RunConfig::wm_lr);
        add_int("policy.steps", &RunConfig::policy_steps);
        add_int("policy.warmstart_steps", &RunConfig::policy_warmstart_steps);
        add_int("policy.batch", &RunConfig::policy_batch);
        add_int("policy.hidden", &RunConfig::policy_hidden);
        add_int("policy.sample_steps", &RunConfig::policy_sample_steps);
        add_double("policy.lr", &RunConfig::policy_lr);
        add_int("rm.steps", &RunConfig::rm_steps);
        add_int("rm.batch", &RunConfig::rm_batch);
        add_int("rm.hidden", &RunConfig::rm_hidden);
        add_double("rm.lr", &RunConfig::rm_lr);
        add_int("data.expert_demos", &RunConfig::expert_demos);
        add_int("data.pretrain_demos", &RunConfig::pretrain_demos);
        add_int("eval.episodes", &RunConfig::eval_episodes);
        f["seed"] = Field{[](RunConfig& c, const std::string& v) {
                              c.seed = parse_number<std::uint64_t>("seed", v, "an unsigned integer");
                          },
                          [](const RunConfig& c) { return std::to_string(c.seed); }};
        // `jobs` is deliberately not a config key: it caps worker count only
        // and may never change results, so it stays a CLI flag.
        return f;
    }();
    return table;
}

void apply_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
    const auto it = fields().find(key);
    if (it == fields().end()) {
        throw ConfigError(key, "config: unknown key '" + key + "'");
    }
    it->second.set(cfg, value);
}

}  // namespace

void RunConfig::validate() const {
    if (families.empty()) {
        throw ConfigError("families", "config: families must be nonempty");
    }
    if (chunk_len != env::kChunkLen) {
        throw ConfigError("chunk.h", "config: chunk.h is fixed at " + std::to_string(env::kChunkLen));
    }
    auto positive = [](const char* key, long v) {
        if (v <= 0) {
            throw ConfigError(key, std::string("config: ") + key + " must be positive");
        }
    };
    auto nonneg = [](const char* key, long v) {
        if (v < 0) {
            throw ConfigError(key, std::string("config: ") + key + " must be nonnegative");
        }
    };
    // rollout and step budgets may be zero (degenerate phases are no-ops)
    nonneg("loop.k_real", k_real);
    nonneg("loop.n_syn", n_syn);
    nonneg("loop.k_iter", k_iter);
    nonneg("wm.steps", wm_steps);
    nonneg("wm.pretrain_steps", wm_pretrain_steps);
    nonneg("policy.steps", policy_steps);
    nonneg("policy.warmstart_steps", policy_warmstart_steps);
    nonneg("rm.steps", rm_steps);
    positive("wm.batch", wm_batch);
    positive("wm.hidden", wm_hidden);
    positive("wm.t_steps", wm_t_steps);
    positive("policy.batch", policy_batch);
    positive("policy.hidden", policy_hidden);
    positive("policy.sample_steps", policy_sample_steps);
    positive("rm.batch", rm_batch);
    positive("rm.hidden", rm_hidden);
    positive("data.expert_demos", expert_demos);
    positive("data.pretrain_demos", pretrain_demos);
    positive("eval.episodes", eval_episodes);
    positive("jobs", jobs);
    if (alpha < 0.0 || alpha > 1.0) {
        throw ConfigError("loop.alpha", "config: loop.alpha must lie in [0,1]");
    }
    if (lambda < 0.0) {
        throw ConfigError("loop.lambda", "config: loop.lambda must be nonnegative");
    }
    if (!(beta > 0.0)) {
        throw ConfigError("loop.beta", "config: loop.beta must be positive");
    }
}

RunConfig config_from_entries(const std::map<std::string, std::string>& entries) {
    RunConfig cfg;
    for (const auto& [key, value] : entries) {
        apply_entry(cfg, key, value);
    }
    cfg.validate();
    return cfg;
}

RunConfig config_load(const std::string& path, const std::vector<std::string>& overrides) {
    RunConfig cfg;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) {
            throw MissingArtifact("config: cannot open " + path);
        }
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos) {
                line = line.substr(0, hash);
            }
            line = trim(line);
            if (line.empty()) {
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw ConfigError(line, "config: expected 'key = value' at " + path + ":" +
                                            std::to_string(line_no));
            }
            apply_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
    }
    for (const auto& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(ov, "config: override must be key=value, got '" + ov + "'");
        }
        apply_entry(cfg, trim(ov.substr(0, eq)), trim(ov.substr(eq + 1)));
    }
    cfg.validate();
    return cfg;
}

std::string config_snapshot(const RunConfig& cfg) {
    std::string out;
    for (const auto& [key, field] : fields()) {
        out += key + " = " + field.get(cfg) + "\n";
    }
    return out;
}

void config_save(const RunConfig& cfg, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw std::runtime_error("config: cannot write " + path);
    }
    out << config_snapshot(cfg);
}

RunConfig config_load_snapshot(const std::string& path) {
    return config_load(path, {});
}

}  // namespace vlaw::loop
