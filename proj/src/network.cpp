#include "gridsentinel/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>

#include <json.hpp>

namespace gridsentinel {

using nlohmann::json;

namespace {

BusKind parse_kind(const std::string& s) {
    if (s == "slack") return BusKind::Slack;
    if (s == "pv" || s == "PV") return BusKind::PV;
    if (s == "pq" || s == "PQ") return BusKind::PQ;
    throw CaseError(CaseErrorKind::Schema, "unknown bus kind '" + s + "'");
}

const json& require(const json& obj, const char* key, const char* where) {
    if (!obj.is_object() || !obj.contains(key))
        throw CaseError(CaseErrorKind::Schema, std::string(where) + ": missing key '" + key + "'");
    return obj.at(key);
}

double number(const json& obj, const char* key, const char* where) {
    const json& v = require(obj, key, where);
    if (!v.is_number())
        throw CaseError(CaseErrorKind::Schema, std::string(where) + ": '" + key + "' must be a number");
    return v.get<double>();
}

int integer(const json& obj, const char* key, const char* where) {
    const json& v = require(obj, key, where);
    if (!v.is_number_integer())
        throw CaseError(CaseErrorKind::Schema, std::string(where) + ": '" + key + "' must be an integer");
    return v.get<int>();
}

bool boolean(const json& obj, const char* key, const char* where, bool fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean())
        throw CaseError(CaseErrorKind::Schema, std::string(where) + ": '" + key + "' must be a boolean");
    return v.get<bool>();
}

void check_dense_ids(std::vector<int> ids, const char* what) {
    std::sort(ids.begin(), ids.end());
    for (size_t i = 1; i < ids.size(); ++i)
        if (ids[i] == ids[i - 1])
            throw CaseError(CaseErrorKind::DuplicateId,
                            std::string("duplicate ") + what + " id " + std::to_string(ids[i]));
    for (size_t i = 0; i < ids.size(); ++i)
        if (ids[i] != static_cast<int>(i))
            throw CaseError(CaseErrorKind::Schema, std::string(what) + " ids must be dense 0..n-1");
}

}  // namespace

const char* to_string(BusKind kind) {
    switch (kind) {
        case BusKind::Slack: return "slack";
        case BusKind::PV: return "pv";
        case BusKind::PQ: return "pq";
    }
    return "?";
}

int NetworkModel::in_service_line_count() const {
    return static_cast<int>(std::count_if(lines.begin(), lines.end(),
                                          [](const Line& l) { return l.in_service; }));
}

int NetworkModel::slack_bus() const {
    for (const Bus& b : buses)
        if (b.kind == BusKind::Slack) return b.id;
    return -1;
}

const GeneratorDynamic* NetworkModel::generator_at(int bus) const {
    for (const GeneratorDynamic& g : gens)
        if (g.bus == bus) return &g;
    return nullptr;
}

bool is_connected(const NetworkModel& net) {
    const int n = net.bus_count();
    if (n == 0) return false;
    std::vector<std::vector<int>> adj(n);
    for (const Line& l : net.lines) {
        if (!l.in_service) continue;
        adj[l.from].push_back(l.to);
        adj[l.to].push_back(l.from);
    }
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int visited = 1;
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int v : adj[u])
            if (!seen[v]) {
                seen[v] = 1;
                ++visited;
                q.push(v);
            }
    }
    return visited == n;
}

void validate(const NetworkModel& net) {
    if (net.buses.empty()) throw CaseError(CaseErrorKind::Schema, "case has no buses");
    if (!(net.base_mva > 0.0)) throw CaseError(CaseErrorKind::BadValue, "base_mva must be positive");

    std::vector<int> ids;
    for (const Bus& b : net.buses) ids.push_back(b.id);
    check_dense_ids(ids, "bus");
    ids.clear();
    for (const Line& l : net.lines) ids.push_back(l.id);
    check_dense_ids(ids, "line");

    const int slacks = static_cast<int>(std::count_if(
        net.buses.begin(), net.buses.end(), [](const Bus& b) { return b.kind == BusKind::Slack; }));
    if (slacks == 0) throw CaseError(CaseErrorKind::MissingSlack, "case has no slack bus");
    if (slacks > 1) throw CaseError(CaseErrorKind::MultipleSlack, "case has more than one slack bus");

    const int n = net.bus_count();
    for (const Bus& b : net.buses) {
        if (b.load.real() < 0.0 || b.p_gen < 0.0)
            throw CaseError(CaseErrorKind::BadValue,
                            "bus " + std::to_string(b.id) + ": negative real load or generation");
        if (b.kind != BusKind::PQ && !(b.v_set > 0.0))
            throw CaseError(CaseErrorKind::BadValue,
                            "bus " + std::to_string(b.id) + ": voltage setpoint must be positive");
    }
    for (const Line& l : net.lines) {
        const std::string tag = "line " + std::to_string(l.id);
        if (l.from < 0 || l.from >= n || l.to < 0 || l.to >= n)
            throw CaseError(CaseErrorKind::BadValue, tag + ": unknown bus");
        if (l.from == l.to) throw CaseError(CaseErrorKind::BadValue, tag + ": from == to");
        if (!(l.x1 > 0.0)) throw CaseError(CaseErrorKind::BadValue, tag + ": x1 must be positive");
        if (l.r1 < 0.0 || l.r0 < 0.0) throw CaseError(CaseErrorKind::BadValue, tag + ": negative resistance");
        if (std::abs(l.z0()) < std::abs(l.z1()))
            throw CaseError(CaseErrorKind::BadValue, tag + ": |z0| < |z1|");
    }

    std::set<int> gen_buses;
    bool grounded = false;
    for (const GeneratorDynamic& g : net.gens) {
        const std::string tag = "generator at bus " + std::to_string(g.bus);
        if (g.bus < 0 || g.bus >= n) throw CaseError(CaseErrorKind::BadValue, tag + ": unknown bus");
        if (!gen_buses.insert(g.bus).second)
            throw CaseError(CaseErrorKind::DuplicateId, tag + ": duplicate");
        if (!(g.x1s > 0.0 && g.x2 > 0.0 && g.x0 > 0.0))
            throw CaseError(CaseErrorKind::BadValue, tag + ": reactances must be positive");
        if (net.buses[g.bus].kind == BusKind::PQ)
            throw CaseError(CaseErrorKind::BadValue, tag + ": generator on a PQ bus");
        grounded = grounded || g.grounded;
    }
    for (const Bus& b : net.buses)
        if (b.kind != BusKind::PQ && !gen_buses.count(b.id))
            throw CaseError(CaseErrorKind::BadValue,
                            "bus " + std::to_string(b.id) + ": voltage-controlled bus without generator data");
    if (!grounded) throw CaseError(CaseErrorKind::BadValue, "no grounded source");

    if (!is_connected(net)) throw CaseError(CaseErrorKind::Disconnected, "network graph is disconnected");
}

NetworkModel load_case(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw CaseError(CaseErrorKind::Syntax, std::string("case parse error: ") + e.what());
    }
    if (!doc.is_object()) throw CaseError(CaseErrorKind::Schema, "case must be a JSON object");

    NetworkModel net;
    net.base_mva = number(doc, "base_mva", "case");
    if (doc.contains("nominal_hz")) net.nominal_hz = number(doc, "nominal_hz", "case");

    for (const char* key : {"buses", "lines", "gens"})
        if (!require(doc, key, "case").is_array())
            throw CaseError(CaseErrorKind::Schema, std::string("case: '") + key + "' must be an array");

    for (const json& jb : doc.at("buses")) {
        Bus b;
        b.id = integer(jb, "id", "bus");
        const json& kind = require(jb, "kind", "bus");
        if (!kind.is_string()) throw CaseError(CaseErrorKind::Schema, "bus: 'kind' must be a string");
        b.kind = parse_kind(kind.get<std::string>());
        if (jb.contains("load")) {
            const json& ld = jb.at("load");
            if (!ld.is_array() || ld.size() != 2 || !ld[0].is_number() || !ld[1].is_number())
                throw CaseError(CaseErrorKind::Schema, "bus: 'load' must be [p, q]");
            b.load = {ld[0].get<double>(), ld[1].get<double>()};
        }
        if (jb.contains("p_gen")) b.p_gen = number(jb, "p_gen", "bus");
        if (jb.contains("v_set")) b.v_set = number(jb, "v_set", "bus");
        net.buses.push_back(b);
    }
    for (const json& jl : doc.at("lines")) {
        Line l;
        l.id = integer(jl, "id", "line");
        l.from = integer(jl, "from", "line");
        l.to = integer(jl, "to", "line");
        l.r1 = number(jl, "r1", "line");
        l.x1 = number(jl, "x1", "line");
        l.b1 = jl.contains("b1") ? number(jl, "b1", "line") : 0.0;
        l.r0 = jl.contains("r0") ? number(jl, "r0", "line") : 3.0 * l.r1;
        l.x0 = jl.contains("x0") ? number(jl, "x0", "line") : 3.0 * l.x1;
        l.in_service = boolean(jl, "in_service", "line", true);
        net.lines.push_back(l);
    }
    for (const json& jg : doc.at("gens")) {
        GeneratorDynamic g;
        g.bus = integer(jg, "bus", "gen");
        g.x1s = number(jg, "x1s", "gen");
        g.x2 = jg.contains("x2") ? number(jg, "x2", "gen") : g.x1s;
        g.x0 = number(jg, "x0", "gen");
        g.grounded = boolean(jg, "grounded", "gen", true);
        net.gens.push_back(g);
    }
    std::sort(net.buses.begin(), net.buses.end(), [](const Bus& a, const Bus& b) { return a.id < b.id; });
    std::sort(net.lines.begin(), net.lines.end(), [](const Line& a, const Line& b) { return a.id < b.id; });
    validate(net);
    return net;
}

std::string serialize_case(const NetworkModel& net) {
    json doc;
    doc["base_mva"] = net.base_mva;
    doc["nominal_hz"] = net.nominal_hz;
    doc["buses"] = json::array();
    for (const Bus& b : net.buses)
        doc["buses"].push_back({{"id", b.id},
                                {"kind", to_string(b.kind)},
                                {"load", {b.load.real(), b.load.imag()}},
                                {"p_gen", b.p_gen},
                                {"v_set", b.v_set}});
    doc["lines"] = json::array();
    for (const Line& l : net.lines)
        doc["lines"].push_back({{"id", l.id}, {"from", l.from}, {"to", l.to}, {"r1", l.r1},
                                {"x1", l.x1}, {"b1", l.b1}, {"r0", l.r0}, {"x0", l.x0},
                                {"in_service", l.in_service}});
    doc["gens"] = json::array();
    for (const GeneratorDynamic& g : net.gens)
        doc["gens"].push_back(
            {{"bus", g.bus}, {"x1s", g.x1s}, {"x2", g.x2}, {"x0", g.x0}, {"grounded", g.grounded}});
    return doc.dump(1);
}

Eigen::MatrixXcd build_ybus(const NetworkModel& net, SequenceDomain domain, bool include_generators) {
    const int n = net.bus_count();
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, n);
    const bool positive = domain == SequenceDomain::Positive;
    for (const Line& l : net.lines) {
        if (!l.in_service) continue;
        const Complex ys = 1.0 / (positive ? l.z1() : l.z0());
        const Complex ysh = positive ? Complex(0.0, 0.5 * l.b1) : Complex(0.0, 0.0);
        y(l.from, l.from) += ys + ysh;
        y(l.to, l.to) += ys + ysh;
        y(l.from, l.to) -= ys;
        y(l.to, l.from) -= ys;
    }
    if (include_generators) {
        for (const GeneratorDynamic& g : net.gens) {
            if (positive)
                y(g.bus, g.bus) += 1.0 / Complex(0.0, g.x1s);
            else if (g.grounded)
                y(g.bus, g.bus) += 1.0 / Complex(0.0, g.x0);
        }
    }
    return y;
}

NetworkModel apply_outage(const NetworkModel& net, int line_id) {
    if (line_id < 0 || line_id >= net.line_count())
        throw OutageError(OutageErrorKind::UnknownLine, "unknown line id " + std::to_string(line_id));
    if (!net.lines[line_id].in_service)
        throw OutageError(OutageErrorKind::AlreadyOut,
                          "line " + std::to_string(line_id) + " is already out of service");
    NetworkModel out = net;
    out.lines[line_id].in_service = false;
    if (!is_connected(out))
        throw OutageError(OutageErrorKind::Disconnects,
                          "outage of line " + std::to_string(line_id) + " disconnects the network");
    return out;
}

}  // namespace gridsentinel
