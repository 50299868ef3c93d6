#include "sogppa/netlist.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>

#include <json.hpp>

namespace sogppa {

using json = nlohmann::ordered_json;

namespace {

const std::pair<WordKind, const char*> kKindNames[] = {
    {WordKind::Const, "CONST"}, {WordKind::Not, "NOT"},     {WordKind::And, "AND"},
    {WordKind::Or, "OR"},       {WordKind::Xor, "XOR"},     {WordKind::Add, "ADD"},
    {WordKind::Sub, "SUB"},     {WordKind::Mux, "MUX"},     {WordKind::Eq, "EQ"},
    {WordKind::Lt, "LT"},       {WordKind::Shl, "SHL"},     {WordKind::Shr, "SHR"},
    {WordKind::Concat, "CONCAT"}, {WordKind::Slice, "SLICE"},
    {WordKind::RedOr, "REDOR"}, {WordKind::RedAnd, "REDAND"},
    {WordKind::RedXor, "REDXOR"}, {WordKind::Reg, "REG"},
};

uint64_t mask_bits(int width) {
    return width >= 64 ? ~0ULL : ((1ULL << width) - 1);
}

[[noreturn]] void fail(const std::string& msg) { throw NetlistError(msg); }

} // namespace

const char* word_kind_name(WordKind k) {
    for (const auto& [kind, name] : kKindNames)
        if (kind == k) return name;
    return "?";
}

std::optional<WordKind> word_kind_from_name(const std::string& name) {
    for (const auto& [kind, kname] : kKindNames)
        if (name == kname) return kind;
    return std::nullopt;
}

void WordDesign::build_width_cache() const {
    if (!width_cache_.empty()) return;
    for (const auto& p : ports) width_cache_[p.name] = p.width;
    for (const auto& [n, w] : nets) width_cache_[n] = w;
}

bool WordDesign::has_net(const std::string& net) const {
    build_width_cache();
    return width_cache_.count(net) != 0;
}

int WordDesign::width_of(const std::string& net) const {
    build_width_cache();
    auto it = width_cache_.find(net);
    if (it == width_cache_.end()) fail("unknown net '" + net + "'");
    return it->second;
}

void WordDesign::validate() const {
    width_cache_.clear();
    build_width_cache();
    if (clock_period_ns <= 0) fail("clock_period_ns must be positive");

    std::set<std::string> names;
    for (const auto& p : ports) {
        if (p.width < 1 || p.width > 64) fail("port '" + p.name + "' has unsupported width");
        if (!names.insert(p.name).second) fail("duplicate name '" + p.name + "'");
    }
    for (const auto& [n, w] : nets) {
        if (w < 1 || w > 64) fail("net '" + n + "' has unsupported width");
        if (!names.insert(n).second) fail("duplicate name '" + n + "'");
    }

    // single-driver check: drivers are input ports and node outputs
    std::set<std::string> driven;
    for (const auto& p : ports)
        if (p.is_input) driven.insert(p.name);
    for (const auto& nd : nodes) {
        if (!has_net(nd.output)) fail("dangling net '" + nd.output + "'");
        if (!driven.insert(nd.output).second)
            fail("multiple drivers for net '" + nd.output + "'");
    }
    for (const auto& [n, w] : nets)
        if (!driven.count(n)) fail("net '" + n + "' has no driver");
    for (const auto& p : ports)
        if (!p.is_input && !driven.count(p.name))
            fail("output port '" + p.name + "' has no driver");

    // per-kind width rules
    for (const auto& nd : nodes) {
        for (const auto& in : nd.inputs)
            if (!has_net(in)) fail("dangling net '" + in + "'");
        if (!nd.enable.empty() && !has_net(nd.enable))
            fail("dangling net '" + nd.enable + "'");
        const int ow = width_of(nd.output);
        auto expect = [&](bool ok, const std::string& what) {
            if (!ok)
                fail(std::string(word_kind_name(nd.kind)) + " node driving '" + nd.output +
                     "': " + what);
        };
        auto arity = [&](size_t n) {
            expect(nd.inputs.size() == n, "wrong input count");
        };
        switch (nd.kind) {
        case WordKind::Const:
            arity(0);
            expect(ow >= 64 || nd.const_value <= mask_bits(ow), "constant wider than output");
            break;
        case WordKind::Not:
            arity(1);
            expect(width_of(nd.inputs[0]) == ow, "width mismatch");
            break;
        case WordKind::And:
        case WordKind::Or:
        case WordKind::Xor:
            arity(2);
            expect(width_of(nd.inputs[0]) == ow && width_of(nd.inputs[1]) == ow,
                   "width mismatch");
            break;
        case WordKind::Add:
        case WordKind::Sub:
            arity(2); // operands zero-extended to output width
            expect(width_of(nd.inputs[0]) <= ow && width_of(nd.inputs[1]) <= ow,
                   "operand wider than output");
            break;
        case WordKind::Mux:
            arity(3);
            expect(width_of(nd.inputs[0]) == 1, "select must be 1 bit");
            expect(width_of(nd.inputs[1]) == ow && width_of(nd.inputs[2]) == ow,
                   "width mismatch");
            break;
        case WordKind::Eq:
        case WordKind::Lt:
            arity(2);
            expect(ow == 1, "comparison output must be 1 bit");
            expect(width_of(nd.inputs[0]) == width_of(nd.inputs[1]), "width mismatch");
            break;
        case WordKind::Shl:
        case WordKind::Shr:
            arity(1);
            expect(width_of(nd.inputs[0]) == ow, "width mismatch");
            expect(nd.shift_amount >= 0 && nd.shift_amount < ow, "shift amount out of range");
            break;
        case WordKind::Concat: {
            expect(!nd.inputs.empty(), "needs at least one input");
            int sum = 0;
            for (const auto& in : nd.inputs) sum += width_of(in);
            expect(sum == ow, "width mismatch");
            break;
        }
        case WordKind::Slice:
            arity(1);
            expect(nd.slice_hi >= nd.slice_lo && nd.slice_hi < width_of(nd.inputs[0]),
                   "slice range out of bounds");
            expect(ow == nd.slice_hi - nd.slice_lo + 1, "width mismatch");
            break;
        case WordKind::RedOr:
        case WordKind::RedAnd:
        case WordKind::RedXor:
            arity(1);
            expect(ow == 1, "reduction output must be 1 bit");
            break;
        case WordKind::Reg:
            arity(1);
            expect(width_of(nd.inputs[0]) == ow, "width mismatch");
            if (!nd.enable.empty()) expect(width_of(nd.enable) == 1, "enable must be 1 bit");
            break;
        }
    }

    // acyclicity of the combinational subgraph (REG d->q arcs excluded)
    std::map<std::string, const WordNode*> driver;
    for (const auto& nd : nodes) driver[nd.output] = &nd;
    std::map<const WordNode*, int> state; // 0 unvisited, 1 on stack, 2 done
    std::vector<const WordNode*> stack;
    for (const auto& nd : nodes) {
        if (state[&nd]) continue;
        stack.push_back(&nd);
        while (!stack.empty()) {
            const WordNode* cur = stack.back();
            if (state[cur] == 0) {
                state[cur] = 1;
                if (cur->kind != WordKind::Reg) {
                    for (const auto& in : cur->inputs) {
                        auto it = driver.find(in);
                        if (it == driver.end()) continue;
                        if (state[it->second] == 1)
                            fail("combinational cycle through net '" + in + "'");
                        if (state[it->second] == 0) stack.push_back(it->second);
                    }
                }
            } else {
                state[cur] = 2;
                stack.pop_back();
            }
        }
    }
}

WordDesign parse_netlist(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(std::string("syntax error: ") + e.what());
    }
    WordDesign d;
    try {
        d.name = doc.at("name").get<std::string>();
        d.clock_period_ns = doc.at("clock_period_ns").get<double>();
        for (const auto& p : doc.at("ports")) {
            Port port;
            port.name = p.at("name").get<std::string>();
            const auto dir = p.at("dir").get<std::string>();
            if (dir != "input" && dir != "output")
                fail("port '" + port.name + "': bad direction '" + dir + "'");
            port.is_input = dir == "input";
            port.width = p.at("width").get<int>();
            d.ports.push_back(std::move(port));
        }
        for (const auto& n : doc.at("nets"))
            d.nets.emplace_back(n.at("name").get<std::string>(), n.at("width").get<int>());
        for (const auto& jn : doc.at("nodes")) {
            WordNode nd;
            const auto kname = jn.at("kind").get<std::string>();
            auto kind = word_kind_from_name(kname);
            if (!kind) fail("unknown node kind '" + kname + "'");
            nd.kind = *kind;
            for (const auto& in : jn.at("inputs")) nd.inputs.push_back(in.get<std::string>());
            nd.output = jn.at("output").get<std::string>();
            if (jn.contains("params")) {
                const auto& p = jn["params"];
                if (p.contains("value"))
                    nd.const_value = std::stoull(p["value"].get<std::string>());
                if (p.contains("amount")) nd.shift_amount = p["amount"].get<int>();
                if (p.contains("hi")) nd.slice_hi = p["hi"].get<int>();
                if (p.contains("lo")) nd.slice_lo = p["lo"].get<int>();
                if (p.contains("enable")) nd.enable = p["enable"].get<std::string>();
            }
            d.nodes.push_back(std::move(nd));
        }
    } catch (const json::exception& e) {
        fail(std::string("malformed netlist document: ") + e.what());
    }
    d.validate();
    return d;
}

std::string print_netlist(const WordDesign& design) {
    json doc;
    doc["name"] = design.name;
    doc["clock_period_ns"] = design.clock_period_ns;
    doc["ports"] = json::array();
    for (const auto& p : design.ports)
        doc["ports"].push_back({{"name", p.name},
                                {"dir", p.is_input ? "input" : "output"},
                                {"width", p.width}});
    doc["nets"] = json::array();
    for (const auto& [n, w] : design.nets)
        doc["nets"].push_back({{"name", n}, {"width", w}});
    doc["nodes"] = json::array();
    for (const auto& nd : design.nodes) {
        json jn{{"kind", word_kind_name(nd.kind)}};
        jn["inputs"] = nd.inputs;
        jn["output"] = nd.output;
        json params = json::object();
        if (nd.kind == WordKind::Const) {
            params["value"] = std::to_string(nd.const_value);
            params["width"] = design.width_of(nd.output);
        }
        if (nd.kind == WordKind::Shl || nd.kind == WordKind::Shr)
            params["amount"] = nd.shift_amount;
        if (nd.kind == WordKind::Slice) {
            params["hi"] = nd.slice_hi;
            params["lo"] = nd.slice_lo;
        }
        if (!nd.enable.empty()) params["enable"] = nd.enable;
        if (!params.empty()) jn["params"] = params;
        doc["nodes"].push_back(std::move(jn));
    }
    return doc.dump(2) + "\n";
}

WordTrace simulate_word(const WordDesign& design, const WordStimulus& stimulus) {
    if (stimulus.empty()) fail("cycle count must be >= 1");

    // topological order of non-REG nodes
    std::map<std::string, const WordNode*> driver;
    for (const auto& nd : design.nodes) driver[nd.output] = &nd;
    std::vector<const WordNode*> order;
    std::map<const WordNode*, bool> done;
    std::vector<std::pair<const WordNode*, bool>> stack;
    for (const auto& nd : design.nodes) {
        if (nd.kind == WordKind::Reg || done[&nd]) continue;
        stack.emplace_back(&nd, false);
        while (!stack.empty()) {
            auto [cur, expanded] = stack.back();
            stack.pop_back();
            if (done[cur]) continue;
            if (expanded) {
                done[cur] = true;
                order.push_back(cur);
                continue;
            }
            stack.emplace_back(cur, true);
            for (const auto& in : cur->inputs) {
                auto it = driver.find(in);
                if (it != driver.end() && it->second->kind != WordKind::Reg &&
                    !done[it->second])
                    stack.emplace_back(it->second, false);
            }
        }
    }

    std::map<std::string, uint64_t> values; // net -> value
    for (const auto& nd : design.nodes)
        if (nd.kind == WordKind::Reg) values[nd.output] = 0; // registers start at 0

    WordTrace trace;
    for (size_t cycle = 0; cycle < stimulus.size(); ++cycle) {
        for (const auto& p : design.ports) {
            if (!p.is_input) continue;
            auto it = stimulus[cycle].find(p.name);
            if (it == stimulus[cycle].end())
                fail("stimulus missing input '" + p.name + "' at cycle " +
                     std::to_string(cycle));
            if (it->second > mask_bits(p.width))
                fail("stimulus value too wide for input '" + p.name + "'");
            values[p.name] = it->second;
        }
        for (const WordNode* nd : order) {
            auto in = [&](size_t i) { return values.at(nd->inputs[i]); };
            const int ow = design.width_of(nd->output);
            const uint64_t m = mask_bits(ow);
            uint64_t v = 0;
            switch (nd->kind) {
            case WordKind::Const: v = nd->const_value; break;
            case WordKind::Not: v = ~in(0); break;
            case WordKind::And: v = in(0) & in(1); break;
            case WordKind::Or: v = in(0) | in(1); break;
            case WordKind::Xor: v = in(0) ^ in(1); break;
            case WordKind::Add: v = in(0) + in(1); break;
            case WordKind::Sub: v = in(0) - in(1); break;
            case WordKind::Mux: v = in(0) ? in(1) : in(2); break;
            case WordKind::Eq: v = in(0) == in(1) ? 1 : 0; break;
            case WordKind::Lt: v = in(0) < in(1) ? 1 : 0; break;
            case WordKind::Shl: v = in(0) << nd->shift_amount; break;
            case WordKind::Shr: v = in(0) >> nd->shift_amount; break;
            case WordKind::Concat: {
                int off = 0; // inputs listed low-part first
                for (size_t i = 0; i < nd->inputs.size(); ++i) {
                    v |= values.at(nd->inputs[i]) << off;
                    off += design.width_of(nd->inputs[i]);
                }
                break;
            }
            case WordKind::Slice: v = in(0) >> nd->slice_lo; break;
            case WordKind::RedOr: v = in(0) != 0 ? 1 : 0; break;
            case WordKind::RedAnd:
                v = in(0) == mask_bits(design.width_of(nd->inputs[0])) ? 1 : 0;
                break;
            case WordKind::RedXor: v = __builtin_popcountll(in(0)) & 1; break;
            case WordKind::Reg: break; // handled at cycle boundary
            }
            values[nd->output] = v & m;
        }
        std::map<std::string, uint64_t> out;
        for (const auto& p : design.ports)
            if (!p.is_input) out[p.name] = values.at(p.name);
        trace.push_back(std::move(out));

        // cycle boundary: registers capture d (or hold when enable is low)
        std::map<std::string, uint64_t> next;
        for (const auto& nd : design.nodes) {
            if (nd.kind != WordKind::Reg) continue;
            uint64_t d = values.at(nd.inputs[0]);
            uint64_t q = values.at(nd.output);
            bool en = nd.enable.empty() || values.at(nd.enable) != 0;
            next[nd.output] = en ? d : q;
        }
        for (auto& [net, v] : next) values[net] = v;
    }
    return trace;
}

} // namespace sogppa
