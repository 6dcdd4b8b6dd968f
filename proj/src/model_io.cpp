#include "dualobs/model_io.hpp"

#include "dualobs/error.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace dualobs {

using nlohmann::json;

namespace {

CostPair parse_costs(const json& j, const char* key)
{
    CostPair c;
    if (!j.contains(key)) return c;
    const json& e = j.at(key);
    if (e.contains("c10")) c.c10 = e.at("c10").get<double>();
    if (e.contains("c01")) c.c01 = e.at("c01").get<double>();
    return c;
}

json costs_json(const CostPair& c) { return json{{"c10", c.c10}, {"c01", c.c01}}; }

}  // namespace

JointModelSpec parse_model_spec(const std::string& text)
{
    try {
        const json j = json::parse(text);
        JointModelSpec s;
        s.s1_size = j.at("s1_size").get<std::size_t>();
        s.s2_size = j.at("s2_size").get<std::size_t>();
        s.f0 = j.at("f0").get<std::vector<double>>();
        s.f1 = j.at("f1").get<std::vector<double>>();
        s.p0 = j.at("p0").get<double>();
        if (j.contains("costs")) {
            const json& c = j.at("costs");
            s.costs.center = parse_costs(c, "center");
            s.costs.observer1 = parse_costs(c, "observer1");
            s.costs.observer2 = parse_costs(c, "observer2");
        }
        return s;
    } catch (const json::exception& e) {
        throw ParseError(std::string("model file: ") + e.what());
    }
}

JointModelSpec read_model_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open model file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_model_spec(ss.str());
}

std::string model_to_json(const JointModelSpec& s, int indent)
{
    json j;
    j["s1_size"] = s.s1_size;
    j["s2_size"] = s.s2_size;
    j["f0"] = s.f0;
    j["f1"] = s.f1;
    j["p0"] = s.p0;
    j["costs"] = json{{"center", costs_json(s.costs.center)},
                      {"observer1", costs_json(s.costs.observer1)},
                      {"observer2", costs_json(s.costs.observer2)}};
    return j.dump(indent);
}

std::uint64_t fnv1a64(const std::string& bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t model_hash(const JointModelSpec& spec) { return fnv1a64(model_to_json(spec, -1)); }

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace dualobs
