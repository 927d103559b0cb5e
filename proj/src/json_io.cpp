#include "tbpp/json_io.hpp"

#include <stdexcept>

namespace tbpp {

using nlohmann::json;

json model_to_json(const TbppModel& model) {
    json j;
    j["clocks"] = json::array();
    for (const auto& c : model.clocks) j["clocks"].push_back(c.name);
    j["nonterminals"] = json::array();
    for (const auto& n : model.nonterminals) j["nonterminals"].push_back(n.name);
    j["rules"] = json::array();
    for (const auto& r : model.rules) {
        json jr;
        jr["lhs"] = model.nonterminals[r.lhs].name;
        jr["guard"] = json::array();
        for (const auto& a : r.guard.conjuncts)
            jr["guard"].push_back({{"clock", model.clocks[a.clock].name},
                                   {"rel", rel_str(a.rel)},
                                   {"bound", a.bound}});
        jr["assign"] = json::array();
        for (const auto& u : r.assign.updates) {
            json ju;
            ju["target"] = model.clocks[u.target].name;
            if (u.from_clock)
                ju["source"] = model.clocks[u.source_clock].name;
            else
                ju["source"] = u.constant;
            jr["assign"].push_back(ju);
        }
        jr["rhs"] = json::array();
        for (int child : r.rhs) jr["rhs"].push_back(model.nonterminals[child].name);
        j["rules"].push_back(jr);
    }
    j["max_constant"] = model.max_constant;
    if (model.query) j["query"] = query_to_json(model, *model.query);
    return j;
}

namespace {

Rel rel_from_str(const std::string& s) {
    if (s == "<") return Rel::Lt;
    if (s == "<=") return Rel::Le;
    if (s == "=") return Rel::Eq;
    if (s == ">=") return Rel::Ge;
    if (s == ">") return Rel::Gt;
    throw std::invalid_argument("unknown relation: " + s);
}

QueryMode mode_from_str(const std::string& s) {
    if (s == "reach") return QueryMode::Reach;
    if (s == "cover") return QueryMode::Cover;
    if (s == "simple-reach") return QueryMode::SimpleReach;
    if (s == "simple-cover") return QueryMode::SimpleCover;
    if (s == "nonempty") return QueryMode::Nonempty;
    if (s == "ternary") return QueryMode::Ternary;
    throw std::invalid_argument("unknown query mode: " + s);
}

}  // namespace

TbppModel model_from_json(const json& j) {
    TbppModel m;
    for (const auto& c : j.at("clocks"))
        m.clocks.push_back({c.get<std::string>(), m.clock_count()});
    for (const auto& n : j.at("nonterminals"))
        m.nonterminals.push_back({n.get<std::string>(), m.nonterminal_count()});
    auto clock_of = [&m](const std::string& name) {
        int i = m.clock_index(name);
        if (i < 0) throw std::invalid_argument("undeclared clock: " + name);
        return i;
    };
    auto nt_of = [&m](const std::string& name) {
        int i = m.nonterminal_index(name);
        if (i < 0) throw std::invalid_argument("undeclared nonterminal: " + name);
        return i;
    };
    for (const auto& jr : j.at("rules")) {
        Rule r;
        r.lhs = nt_of(jr.at("lhs").get<std::string>());
        for (const auto& ja : jr.value("guard", json::array()))
            r.guard.conjuncts.push_back({clock_of(ja.at("clock").get<std::string>()),
                                         rel_from_str(ja.at("rel").get<std::string>()),
                                         ja.at("bound").get<std::int64_t>()});
        for (const auto& ju : jr.value("assign", json::array())) {
            ClockUpdate u;
            u.target = clock_of(ju.at("target").get<std::string>());
            if (ju.at("source").is_string()) {
                u.from_clock = true;
                u.source_clock = clock_of(ju.at("source").get<std::string>());
            } else {
                u.from_clock = false;
                u.constant = ju.at("source").get<std::int64_t>();
            }
            r.assign.updates.push_back(u);
        }
        for (const auto& jn : jr.at("rhs")) r.rhs.push_back(nt_of(jn.get<std::string>()));
        m.rules.push_back(std::move(r));
    }
    m.refresh_max_constant();
    if (j.contains("query")) m.query = query_from_json(m, j.at("query"));
    return m;
}

json query_to_json(const TbppModel& model, const Query& q) {
    json j;
    j["mode"] = query_mode_str(q.mode);
    j["initial"] = model.nonterminals[q.initial].name;
    j["targets"] = json::array();
    for (int t : q.targets) j["targets"].push_back(model.nonterminals[t].name);
    if (q.delta) j["delta"] = rat_str(*q.delta);
    j["multiplicity_cap"] = q.multiplicity_cap;
    return j;
}

Query query_from_json(const TbppModel& model, const json& j) {
    Query q;
    q.mode = mode_from_str(j.at("mode").get<std::string>());
    int init = model.nonterminal_index(j.at("initial").get<std::string>());
    if (init < 0) throw std::invalid_argument("undeclared initial nonterminal");
    q.initial = init;
    for (const auto& t : j.value("targets", json::array())) {
        int idx = model.nonterminal_index(t.get<std::string>());
        if (idx < 0) throw std::invalid_argument("undeclared target nonterminal");
        q.targets.push_back(idx);
    }
    if (j.contains("delta")) q.delta = parse_rat(j.at("delta").get<std::string>());
    q.multiplicity_cap = j.value("multiplicity_cap", 16);
    return q;
}

}  // namespace tbpp
