#include "hcnet/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "hcnet/error.hpp"
#include "json.hpp"

namespace hcnet {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
    throw Error(ErrorCode::ConfigError, where + ": " + msg);
}

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(where, "expected an object");
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* a : allowed) known = known || key == a;
        if (!known) fail(where, "unknown key '" + key + "'");
    }
}

double get_number(const json& v, const std::string& where) {
    if (!v.is_number()) fail(where, "expected a number");
    return v.get<double>();
}

std::int64_t get_integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) fail(where, "expected an integer");
    return v.get<std::int64_t>();
}

bool get_bool(const json& v, const std::string& where) {
    if (!v.is_boolean()) fail(where, "expected true or false");
    return v.get<bool>();
}

std::vector<double> get_numbers(const json& v, const std::string& where) {
    if (!v.is_array()) fail(where, "expected a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(get_number(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

PowerLawRate parse_rate(const json& v, const std::string& where) {
    reject_unknown(v, where, {"coefficient", "exponent"});
    PowerLawRate rate;
    if (v.contains("coefficient")) rate.coefficient = get_number(v["coefficient"], where + ".coefficient");
    if (!v.contains("exponent")) fail(where, "missing 'exponent'");
    if (!v["exponent"].is_string()) fail(where + ".exponent", "exponents are written as \"p/q\" strings");
    try {
        rate.exponent = Rational::parse(v["exponent"].get<std::string>());
    } catch (const Error& e) {
        fail(where + ".exponent", e.what());
    }
    return rate;
}

Component parse_component(const json& v, const std::string& where) {
    reject_unknown(v, where, {"size", "rate", "intra_edges", "user_rates"});
    Component c;
    if (!v.contains("size")) fail(where, "missing 'size'");
    c.size = static_cast<int>(get_integer(v["size"], where + ".size"));
    if (!v.contains("rate")) fail(where, "missing 'rate'");
    c.rate = parse_rate(v["rate"], where + ".rate");
    if (v.contains("intra_edges")) {
        const auto& edges = v["intra_edges"];
        if (!edges.is_array()) fail(where + ".intra_edges", "expected a list of [u, v] pairs");
        for (std::size_t i = 0; i < edges.size(); ++i) {
            const std::string w = where + ".intra_edges[" + std::to_string(i) + "]";
            if (!edges[i].is_array() || edges[i].size() != 2) fail(w, "expected a pair of user indices");
            const auto a = get_integer(edges[i][0], w), b = get_integer(edges[i][1], w);
            if (a < 1 || b < 1 || a > c.size || b > c.size) fail(w, "user index outside 1.." + std::to_string(c.size));
            c.intra_edges.emplace_back(static_cast<int>(a - 1), static_cast<int>(b - 1));
        }
    }
    if (v.contains("user_rates")) {
        const auto& rates = v["user_rates"];
        if (!rates.is_array()) fail(where + ".user_rates", "expected a list of rates");
        for (std::size_t i = 0; i < rates.size(); ++i)
            c.user_rates.push_back(parse_rate(rates[i], where + ".user_rates[" + std::to_string(i) + "]"));
    }
    return c;
}

StarState parse_state(const json& v, const std::string& where, const NetworkSpec& spec, std::vector<int>& users) {
    reject_unknown(v, where, {"branch", "level", "users"});
    if (v.contains("users")) {
        if (!v["users"].is_array() || v["users"].empty()) fail(where + ".users", "expected a nonempty list of users");
        for (std::size_t i = 0; i < v["users"].size(); ++i)
            users.push_back(static_cast<int>(get_integer(v["users"][i], where + ".users")) - 1);
        if (v.contains("level") && get_integer(v["level"], where + ".level") != static_cast<std::int64_t>(users.size()))
            fail(where, "'level' must equal the number of users");
    } else if (!v.contains("level")) {
        fail(where, "missing 'level'");
    }
    const auto level = v.contains("level") ? get_integer(v["level"], where + ".level") : static_cast<std::int64_t>(users.size());
    if (level == 0) {
        if (v.contains("branch")) fail(where, "the empty state takes no branch");
        return StarState::root();
    }
    if (!v.contains("branch")) fail(where, "missing 'branch'");
    const auto branch = get_integer(v["branch"], where + ".branch");
    const auto K = static_cast<std::int64_t>(spec.components.size());
    if (branch < 1 || branch > K) fail(where + ".branch", "outside 1.." + std::to_string(K));
    const int L = spec.components[static_cast<std::size_t>(branch - 1)].size;
    if (level < 0 || level > L)
        throw Error(ErrorCode::LevelOutOfRange, where + ".level: outside 0.." + std::to_string(L));
    for (int u : users)
        if (u < 0 || u >= L) fail(where + ".users", "user index outside 1.." + std::to_string(L));
    auto sorted = users;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) fail(where + ".users", "repeated user");
    return {static_cast<int>(branch - 1), static_cast<int>(level)};
}

json rate_json(const PowerLawRate& r) { return {{"coefficient", r.coefficient}, {"exponent", r.exponent.str()}}; }

json state_json(const StarState& s, const std::vector<int>& users) {
    if (s.is_root()) return {{"level", 0}};
    json j = {{"branch", s.branch + 1}, {"level", s.level}};
    if (!users.empty()) {
        json u = json::array();
        for (int x : users) u.push_back(x + 1);
        j["users"] = u;
    }
    return j;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ConfigError, std::string("malformed config: ") + e.what());
    }
    reject_unknown(doc, "config",
                   {"network", "nu", "source", "target", "replications", "seed", "r", "epsilon", "omega", "delta",
                    "nu_grid", "law_grid", "workers", "accelerated", "horizon_factor", "space", "exact_mix"});
    RunConfig c;
    if (!doc.contains("network")) fail("config", "missing 'network'");
    const auto& net = doc["network"];
    reject_unknown(net, "network", {"components"});
    if (!net.contains("components") || !net["components"].is_array()) fail("network", "missing 'components' list");
    for (std::size_t i = 0; i < net["components"].size(); ++i)
        c.network.components.push_back(parse_component(net["components"][i], "network.components[" + std::to_string(i) + "]"));
    validate_spec(c.network);
    if (doc.contains("nu")) c.nu = get_number(doc["nu"], "nu");
    if (!(c.nu > 0.0)) fail("nu", "must be positive");
    if (doc.contains("source")) c.source = parse_state(doc["source"], "source", c.network, c.source_users);
    if (doc.contains("target")) c.target = parse_state(doc["target"], "target", c.network, c.target_users);
    if (doc.contains("replications")) c.replications = get_integer(doc["replications"], "replications");
    if (c.replications < 1) fail("replications", "must be positive");
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) fail("seed", "expected a nonnegative integer");
        c.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("r")) c.r = get_number(doc["r"], "r");
    if (doc.contains("epsilon")) c.epsilon = get_number(doc["epsilon"], "epsilon");
    if (doc.contains("omega")) c.omega = get_numbers(doc["omega"], "omega");
    for (double w : c.omega)
        if (!(w >= 0.0)) fail("omega", "entries must be nonnegative");
    if (doc.contains("delta")) c.delta = get_number(doc["delta"], "delta");
    if (doc.contains("nu_grid")) c.nu_grid = get_numbers(doc["nu_grid"], "nu_grid");
    for (double v : c.nu_grid)
        if (!(v > 0.0)) fail("nu_grid", "entries must be positive");
    if (doc.contains("law_grid")) {
        const auto& g = doc["law_grid"];
        reject_unknown(g, "law_grid", {"max", "points"});
        if (g.contains("max")) c.law_max = get_number(g["max"], "law_grid.max");
        if (g.contains("points")) c.law_points = static_cast<int>(get_integer(g["points"], "law_grid.points"));
        if (!(c.law_max > 0.0) || c.law_points < 2) fail("law_grid", "needs max > 0 and at least 2 points");
    }
    if (doc.contains("workers")) c.workers = static_cast<int>(get_integer(doc["workers"], "workers"));
    if (c.workers < 0) fail("workers", "must be nonnegative");
    if (doc.contains("accelerated")) c.accelerated = get_bool(doc["accelerated"], "accelerated");
    if (doc.contains("horizon_factor")) c.horizon_factor = get_number(doc["horizon_factor"], "horizon_factor");
    if (!(c.horizon_factor > 0.0)) fail("horizon_factor", "must be positive");
    if (doc.contains("space")) {
        if (!doc["space"].is_string()) fail("space", "expected \"star\" or \"full\"");
        c.space = doc["space"].get<std::string>();
        if (c.space != "star" && c.space != "full") fail("space", "expected \"star\" or \"full\"");
    }
    if (doc.contains("exact_mix")) c.exact_mix = get_bool(doc["exact_mix"], "exact_mix");
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string dump_config(const RunConfig& c) {
    json comps = json::array();
    for (const auto& comp : c.network.components) {
        json j = {{"size", comp.size}, {"rate", rate_json(comp.rate)}};
        if (!comp.intra_edges.empty()) {
            json edges = json::array();
            for (const auto& [a, b] : comp.intra_edges) edges.push_back({a + 1, b + 1});
            j["intra_edges"] = edges;
        }
        if (!comp.user_rates.empty()) {
            json rates = json::array();
            for (const auto& r : comp.user_rates) rates.push_back(rate_json(r));
            j["user_rates"] = rates;
        }
        comps.push_back(j);
    }
    json doc = {{"network", {{"components", comps}}},
                {"nu", c.nu},
                {"replications", c.replications},
                {"seed", c.seed},
                {"r", c.r},
                {"epsilon", c.epsilon},
                {"omega", c.omega},
                {"delta", c.delta},
                {"nu_grid", c.nu_grid},
                {"law_grid", {{"max", c.law_max}, {"points", c.law_points}}},
                {"workers", c.workers},
                {"accelerated", c.accelerated},
                {"horizon_factor", c.horizon_factor},
                {"space", c.space},
                {"exact_mix", c.exact_mix}};
    if (c.source) doc["source"] = state_json(*c.source, c.source_users);
    if (c.target) doc["target"] = state_json(*c.target, c.target_users);
    return doc.dump(2) + "\n";
}

}  // namespace hcnet
