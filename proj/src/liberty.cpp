#include "sogppa/liberty.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <sstream>

namespace sogppa {

namespace {

struct Token {
    enum Kind { Ident, Number, String, Punct, End } kind = End;
    std::string text;
    int line = 1, col = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    Token next() {
        skip_ws();
        Token t;
        t.line = line_;
        t.col = col_;
        if (pos_ >= text_.size()) return t;
        char c = text_[pos_];
        if (c == '"') {
            t.kind = Token::String;
            advance();
            while (pos_ < text_.size() && text_[pos_] != '"') {
                if (text_[pos_] != '\\' || pos_ + 1 >= text_.size() || text_[pos_ + 1] != '\n')
                    t.text += text_[pos_];
                advance();
            }
            if (pos_ >= text_.size()) fail(t, "unterminated string");
            advance();
            return t;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            t.kind = Token::Ident;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                    text_[pos_] == '_' || text_[pos_] == '.')) {
                t.text += text_[pos_];
                advance();
            }
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' ||
            c == '.') {
            t.kind = Token::Number;
            while (pos_ < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                    std::strchr(".eE+-", text_[pos_]))) {
                t.text += text_[pos_];
                advance();
            }
            return t;
        }
        t.kind = Token::Punct;
        t.text = c;
        advance();
        return t;
    }

    [[noreturn]] static void fail(const Token& t, const std::string& msg) {
        throw LibertyError("liberty parse error at line " + std::to_string(t.line) +
                           ", col " + std::to_string(t.col) + ": " + msg);
    }

private:
    void skip_ws() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '*') {
                while (pos_ + 1 < text_.size() &&
                       !(text_[pos_] == '*' && text_[pos_ + 1] == '/'))
                    advance();
                advance();
                advance();
            } else if (c == '\\' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '\n') {
                advance();
                advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }
    const std::string& text_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;
};

// generic liberty group tree
struct Group {
    std::string name;
    std::vector<std::string> args;
    std::vector<std::pair<std::string, std::vector<std::string>>> attrs; // incl. complex
    std::vector<Group> children;
    int line = 1;

    const std::string* attr(const std::string& key) const {
        for (const auto& [k, v] : attrs)
            if (k == key && !v.empty()) return &v.front();
        return nullptr;
    }
    const Group* child(const std::string& gname, const std::string& arg0 = "") const {
        for (const auto& g : children)
            if (g.name == gname && (arg0.empty() || (!g.args.empty() && g.args[0] == arg0)))
                return &g;
        return nullptr;
    }
};

class Parser {
public:
    explicit Parser(const std::string& text) : lex_(text) { cur_ = lex_.next(); }

    Group parse_group() {
        Group g;
        g.line = cur_.line;
        expect(Token::Ident, "group name");
        g.name = take().text;
        expect_punct("(");
        while (!is_punct(")")) {
            if (cur_.kind == Token::End) Lexer::fail(cur_, "unbalanced parentheses");
            if (!is_punct(",")) g.args.push_back(cur_.text);
            take();
        }
        take(); // ')'
        expect_punct("{");
        while (!is_punct("}")) {
            if (cur_.kind == Token::End) Lexer::fail(cur_, "unbalanced braces");
            parse_statement(g);
        }
        take(); // '}'
        return g;
    }

private:
    void parse_statement(Group& g) {
        Token name_tok = cur_;
        expect(Token::Ident, "attribute or group name");
        std::string key = take().text;
        if (is_punct(":")) {
            take();
            std::vector<std::string> vals;
            while (!is_punct(";")) {
                if (cur_.kind == Token::End) Lexer::fail(cur_, "missing ';'");
                vals.push_back(take().text);
            }
            take();
            g.attrs.emplace_back(key, std::move(vals));
            return;
        }
        if (is_punct("(")) {
            // lookahead past the argument list to see '{' (group) vs ';' (complex attr)
            take();
            std::vector<std::string> args;
            while (!is_punct(")")) {
                if (cur_.kind == Token::End) Lexer::fail(cur_, "unbalanced parentheses");
                if (!is_punct(",")) args.push_back(cur_.text);
                take();
            }
            take();
            if (is_punct("{")) {
                Group child;
                child.name = key;
                child.args = std::move(args);
                child.line = name_tok.line;
                take();
                while (!is_punct("}")) {
                    if (cur_.kind == Token::End) Lexer::fail(cur_, "unbalanced braces");
                    parse_statement(child);
                }
                take();
                g.children.push_back(std::move(child));
            } else {
                if (is_punct(";")) take();
                g.attrs.emplace_back(key, std::move(args));
            }
            return;
        }
        Lexer::fail(cur_, "expected ':' or '(' after '" + key + "'");
    }

    Token take() {
        Token t = cur_;
        cur_ = lex_.next();
        return t;
    }
    void expect(Token::Kind k, const std::string& what) {
        if (cur_.kind != k) Lexer::fail(cur_, "expected " + what);
    }
    void expect_punct(const std::string& p) {
        if (!is_punct(p)) Lexer::fail(cur_, "expected '" + p + "'");
        take();
    }
    bool is_punct(const std::string& p) const {
        return cur_.kind == Token::Punct && cur_.text == p;
    }

    Lexer lex_;
    Token cur_;
};

std::vector<double> parse_number_list(const std::string& s) {
    std::vector<double> out;
    std::string cur;
    for (char c : s) {
        if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) {
                out.push_back(std::stod(cur));
                cur.clear();
            }
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(std::stod(cur));
    return out;
}

LookupTable2D parse_table(const Group& g, int line) {
    LookupTable2D t;
    for (const auto& [k, vals] : g.attrs) {
        if (k == "index_1" && !vals.empty()) t.slew_axis = parse_number_list(vals[0]);
        if (k == "index_2" && !vals.empty()) t.load_axis = parse_number_list(vals[0]);
        if (k == "values") {
            for (const auto& row : vals)
                for (double v : parse_number_list(row)) t.values.push_back(v);
        }
    }
    if (t.values.empty())
        throw LibertyError("table at line " + std::to_string(line) + " has no values");
    if (t.slew_axis.empty()) t.slew_axis = {0.0};
    if (t.load_axis.empty()) t.load_axis = {0.0};
    for (const auto* axis : {&t.slew_axis, &t.load_axis})
        for (size_t i = 1; i < axis->size(); ++i)
            if ((*axis)[i] <= (*axis)[i - 1])
                throw LibertyError("non-ascending table axis at line " + std::to_string(line));
    if (t.values.size() != t.slew_axis.size() * t.load_axis.size())
        throw LibertyError("table value count mismatch at line " + std::to_string(line));
    return t;
}

// rise/fall collapse: element-wise max when shapes agree
std::optional<LookupTable2D> merge_max(const std::optional<LookupTable2D>& a,
                                       const std::optional<LookupTable2D>& b,
                                       int* warnings) {
    if (!a) return b;
    if (!b) return a;
    if (a->values.size() != b->values.size() || a->slew_axis != b->slew_axis ||
        a->load_axis != b->load_axis) {
        ++*warnings;
        return a;
    }
    LookupTable2D m = *a;
    for (size_t i = 0; i < m.values.size(); ++i)
        m.values[i] = std::max(m.values[i], b->values[i]);
    return m;
}

double unit_scale(const std::string& spec, double base) {
    // "1ns" -> 1.0 etc.; only the leading multiplier matters for our subset
    size_t i = 0;
    while (i < spec.size() &&
           (std::isdigit(static_cast<unsigned char>(spec[i])) || spec[i] == '.'))
        ++i;
    return i ? std::stod(spec.substr(0, i)) * base : base;
}

} // namespace

double LookupTable2D::lookup(double slew, double load) const {
    auto interp1 = [](const std::vector<double>& axis, double x, size_t& i0, size_t& i1,
                      double& t) {
        if (axis.size() == 1 || x <= axis.front()) {
            i0 = i1 = 0;
            t = 0;
            if (axis.size() > 1 && x <= axis.front()) { i0 = i1 = 0; }
            return;
        }
        if (x >= axis.back()) {
            i0 = i1 = axis.size() - 1;
            t = 0;
            return;
        }
        size_t hi = std::upper_bound(axis.begin(), axis.end(), x) - axis.begin();
        i0 = hi - 1;
        i1 = hi;
        t = (x - axis[i0]) / (axis[i1] - axis[i0]);
    };
    size_t r0, r1, c0, c1;
    double tr = 0, tc = 0;
    interp1(slew_axis, slew, r0, r1, tr);
    interp1(load_axis, load, c0, c1, tc);
    const size_t n = load_axis.size();
    auto at = [&](size_t r, size_t c) { return values[r * n + c]; };
    double v0 = at(r0, c0) * (1 - tc) + at(r0, c1) * tc;
    double v1 = at(r1, c0) * (1 - tc) + at(r1, c1) * tc;
    return v0 * (1 - tr) + v1 * tr;
}

const std::string* Cell::output_pin() const {
    for (const auto& [name, pin] : pins)
        if (!pin.is_input) return &name;
    return nullptr;
}

const Cell& Library::cell(const std::string& cname) const {
    auto it = cells.find(cname);
    if (it == cells.end()) throw LibertyError("unknown cell '" + cname + "'");
    return it->second;
}

std::pair<double, double> Library::delay_of(const std::string& cname, double input_slew_ns,
                                            double load_fF) const {
    const Cell& c = cell(cname);
    double worst_delay = -1, out_slew = input_slew_ns;
    for (const auto& arc : c.arcs) {
        double d = arc.delay.lookup(input_slew_ns, load_fF);
        if (d > worst_delay) {
            worst_delay = d;
            out_slew = arc.slew ? arc.slew->lookup(input_slew_ns, load_fF) : input_slew_ns;
        }
    }
    if (worst_delay < 0)
        throw LibertyError("cell '" + cname + "' has no timing arcs");
    return {worst_delay, out_slew};
}

double Library::attr(const std::string& cname, const std::string& attr_name) const {
    const Cell& c = cell(cname);
    if (attr_name == "area") return c.area;
    if (attr_name == "leakage") return c.leakage_uW;
    if (attr_name == "internal_energy") return internal_energy(cname);
    if (attr_name == "setup") {
        if (!c.is_sequential)
            throw LibertyError("cell '" + cname + "' is combinational, no setup");
        return c.setup_ns.value_or(kDefaultSetupNs);
    }
    if (attr_name == "clk_to_q") {
        if (!c.is_sequential)
            throw LibertyError("cell '" + cname + "' is combinational, no clk_to_q");
        return c.clk_to_q_ns.value_or(kDefaultClkToQNs);
    }
    throw LibertyError("unknown attribute '" + attr_name + "'");
}

double Library::input_cap(const std::string& cname, const std::string& pin) const {
    const Cell& c = cell(cname);
    auto it = c.pins.find(pin);
    if (it == c.pins.end())
        throw LibertyError("cell '" + cname + "' has no pin '" + pin + "'");
    return it->second.capacitance_fF;
}

double Library::sum_input_caps(const std::string& cname) const {
    double sum = 0;
    for (const auto& [name, pin] : cell(cname).pins)
        if (pin.is_input) sum += pin.capacitance_fF;
    return sum;
}

double Library::internal_energy(const std::string& cname) const {
    const Cell& c = cell(cname);
    if (c.internal_energy_fJ) return *c.internal_energy_fJ;
    return 0.5 * sum_input_caps(cname) * nom_voltage * nom_voltage;
}

Library parse_liberty(const std::string& text) {
    Parser parser(text);
    Group root = parser.parse_group();
    if (root.name != "library") throw LibertyError("top-level group must be 'library'");

    Library lib;
    lib.name = root.args.empty() ? "unnamed" : root.args[0];
    if (const auto* a = root.attr("time_unit")) lib.units.time_ns = unit_scale(*a, 1.0);
    if (const auto* a = root.attr("voltage_unit")) lib.units.voltage_V = unit_scale(*a, 1.0);
    if (const auto* a = root.attr("nom_voltage")) lib.nom_voltage = std::stod(*a);

    for (const auto& g : root.children) {
        if (g.name != "cell") {
            ++lib.warning_count;
            continue;
        }
        if (g.args.empty()) throw LibertyError("cell group without a name");
        Cell c;
        c.name = g.args[0];
        const auto* area = g.attr("area");
        if (!area)
            throw LibertyError("cell '" + c.name + "': missing required attribute 'area'");
        c.area = std::stod(*area);
        if (const auto* a = g.attr("cell_leakage_power")) c.leakage_uW = std::stod(*a);
        if (const auto* a = g.attr("internal_energy")) c.internal_energy_fJ = std::stod(*a);
        c.is_sequential = g.child("ff") != nullptr;

        for (const auto& pg : g.children) {
            if (pg.name != "pin") {
                if (pg.name != "ff") ++lib.warning_count;
                continue;
            }
            if (pg.args.empty()) throw LibertyError("pin group without a name");
            LibPin pin;
            const auto* dir = pg.attr("direction");
            if (!dir)
                throw LibertyError("cell '" + c.name + "', pin '" + pg.args[0] +
                                   "': missing direction");
            pin.is_input = *dir == "input";
            if (const auto* cap = pg.attr("capacitance")) pin.capacitance_fF = std::stod(*cap);
            else if (pin.is_input)
                throw LibertyError("cell '" + c.name + "', pin '" + pg.args[0] +
                                   "': missing capacitance");
            c.pins[pg.args[0]] = pin;

            for (const auto& tg : pg.children) {
                if (tg.name != "timing") continue;
                const auto* related = tg.attr("related_pin");
                std::string from = related ? *related : "";
                const auto* ttype = tg.attr("timing_type");
                std::optional<LookupTable2D> rise_d, fall_d, rise_s, fall_s;
                for (const auto& table_g : tg.children) {
                    if (table_g.name == "cell_rise" || table_g.name == "rise_constraint")
                        rise_d = parse_table(table_g, table_g.line);
                    else if (table_g.name == "cell_fall" || table_g.name == "fall_constraint")
                        fall_d = parse_table(table_g, table_g.line);
                    else if (table_g.name == "rise_transition")
                        rise_s = parse_table(table_g, table_g.line);
                    else if (table_g.name == "fall_transition")
                        fall_s = parse_table(table_g, table_g.line);
                    else
                        ++lib.warning_count;
                }
                auto delay = merge_max(rise_d, fall_d, &lib.warning_count);
                auto slew = merge_max(rise_s, fall_s, &lib.warning_count);
                if (!delay) {
                    ++lib.warning_count;
                    continue;
                }
                if (ttype && (*ttype == "setup_rising" || *ttype == "setup_falling")) {
                    c.setup_ns = delay->lookup(0, 0);
                    continue;
                }
                if (c.is_sequential && (from == "CK" || from == "CLK") && !pin.is_input) {
                    c.clk_to_q_ns = delay->lookup(0, 0);
                }
                TimingArc arc;
                arc.from_pin = from;
                arc.to_pin = pg.args[0];
                arc.delay = std::move(*delay);
                arc.slew = std::move(slew);
                c.arcs.push_back(std::move(arc));
            }
        }
        if (!lib.cells.emplace(c.name, std::move(c)).second)
            throw LibertyError("duplicate cell '" + c.name + "'");
    }
    return lib;
}

std::string print_liberty(const Library& lib) {
    std::ostringstream os;
    os.precision(17);
    auto table = [&](const std::string& name, const LookupTable2D& t, int indent) {
        std::string pad(indent, ' ');
        os << pad << name << " (tmpl) {\n";
        auto axis = [&](const char* key, const std::vector<double>& a) {
            os << pad << "  " << key << " (\"";
            for (size_t i = 0; i < a.size(); ++i) os << (i ? ", " : "") << a[i];
            os << "\");\n";
        };
        axis("index_1", t.slew_axis);
        axis("index_2", t.load_axis);
        os << pad << "  values (";
        const size_t n = t.load_axis.size();
        for (size_t r = 0; r < t.slew_axis.size(); ++r) {
            if (r) os << ", ";
            os << "\"";
            for (size_t c = 0; c < n; ++c) os << (c ? ", " : "") << t.values[r * n + c];
            os << "\"";
        }
        os << ");\n" << pad << "}\n";
    };
    os << "library (" << lib.name << ") {\n";
    os << "  time_unit : \"1ns\";\n  voltage_unit : \"1V\";\n";
    os << "  nom_voltage : " << lib.nom_voltage << ";\n";
    for (const auto& [cname, c] : lib.cells) {
        os << "  cell (" << cname << ") {\n";
        os << "    area : " << c.area << ";\n";
        os << "    cell_leakage_power : " << c.leakage_uW << ";\n";
        if (c.internal_energy_fJ)
            os << "    internal_energy : " << *c.internal_energy_fJ << ";\n";
        if (c.is_sequential)
            os << "    ff (IQ, IQN) {\n      next_state : \"D\";\n      clocked_on : \"CK\";\n    }\n";
        for (const auto& [pname, pin] : c.pins) {
            os << "    pin (" << pname << ") {\n";
            os << "      direction : " << (pin.is_input ? "input" : "output") << ";\n";
            os << "      capacitance : " << pin.capacitance_fF << ";\n";
            for (const auto& arc : c.arcs) {
                if (arc.to_pin != pname) continue;
                os << "      timing () {\n        related_pin : \"" << arc.from_pin
                   << "\";\n";
                table("cell_rise", arc.delay, 8);
                if (arc.slew) table("rise_transition", *arc.slew, 8);
                os << "      }\n";
            }
            if (c.is_sequential && pname == "D" && c.setup_ns) {
                os << "      timing () {\n        related_pin : \"CK\";\n"
                   << "        timing_type : setup_rising;\n";
                LookupTable2D s{{0.0}, {0.0}, {*c.setup_ns}};
                table("rise_constraint", s, 8);
                os << "      }\n";
            }
            os << "    }\n";
        }
        os << "  }\n";
    }
    os << "}\n";
    return os.str();
}

} // namespace sogppa
