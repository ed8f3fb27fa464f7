#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <type_traits>
#include <variant>
#include <sstream>

#include "mulimit/ca_engine.hpp"
#include "mulimit/errors.hpp"
#include "mulimit/experiment.hpp"

namespace mulimit {

const char* mode_name(Mode m) {
    switch (m) {
    case Mode::ConstructRun: return "construct-run";
    case Mode::MaxFixture: return "max-fixture";
    case Mode::Oracle: return "oracle";
    }
    return "?";
}

ConstructionParams ExperimentConfig::construction_params() const {
    ConstructionParams p;
    p.family = family;
    p.inner_speed = inner_speed;
    p.workspace_constant = workspace_constant;
    return p;
}

Alphabet ExperimentConfig::query_alphabet() const {
    switch (mode) {
    case Mode::ConstructRun: return construction_alphabet(family);
    case Mode::MaxFixture: return max_automaton().alphabet;
    case Mode::Oracle: return rule_fixture(rule).alphabet;
    }
    return Alphabet();
}

void ExperimentConfig::validate() const {
    if (mode != Mode::Oracle) {
        if (N < 3 || (mode == Mode::ConstructRun && N < 2 * CounterRule::kRadius + 1)) {
            throw ValidationError("N", "window too small for the rule radius");
        }
        if (trials < 1) {
            throw ValidationError("trials", "must be at least 1");
        }
        if (!(star_density >= 0.0 && star_density <= 1.0)) {
            throw ValidationError("star_density", "must lie in [0, 1]");
        }
        if (stride < 1) {
            throw ValidationError("stride", "must be positive");
        }
        if (queries.empty()) {
            throw ValidationError("queries", "at least one query word is required");
        }
        if (transient && *transient >= T) {
            throw ValidationError("transient", "must be smaller than T");
        }
    }
    if (mode == Mode::ConstructRun) {
        if (family.members.empty()) {
            throw ValidationError("family", "construct-run needs at least one family member");
        }
        construction_params().validate();
    } else if (!family.members.empty()) {
        family.validate();
    }
    if (mode == Mode::Oracle) {
        try {
            rule_fixture(rule);
        } catch (const ContractViolation&) {
            throw ValidationError("rule", "unknown rule fixture '" + rule + "'");
        }
        if (word.empty()) {
            throw ValidationError("word", "must be nonempty");
        }
    }
    const Alphabet a = query_alphabet();
    for (const auto& q : queries) {
        if (q.empty() || q.size() > N) {
            throw ValidationError("queries", "query '" + q + "' does not fit the window");
        }
        for (char c : q) {
            if (!a.contains(c)) {
                throw ValidationError("queries", "query '" + q + "' uses a symbol outside the alphabet");
            }
        }
    }
    if (mode == Mode::Oracle) {
        for (char c : word) {
            if (!a.contains(c)) {
                throw ValidationError("word", "symbol outside the rule alphabet");
            }
        }
    }
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return std::string();
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

std::uint64_t to_uint(const std::string& v, const std::string& field) {
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) {
        throw ValidationError(field, "expected a nonnegative integer, got '" + v + "'");
    }
    try {
        return std::stoull(v);
    } catch (const std::exception&) {
        throw ValidationError(field, "integer out of range");
    }
}

double to_double(const std::string& v, const std::string& field) {
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size()) {
        throw ValidationError(field, "expected a number, got '" + v + "'");
    }
    return d;
}

bool to_bool(const std::string& v, const std::string& field) {
    if (v == "true") {
        return true;
    }
    if (v == "false") {
        return false;
    }
    throw ValidationError(field, "expected true or false");
}

Rational to_rational(const std::string& v, const std::string& field) {
    const auto slash = v.find('/');
    if (slash == std::string::npos) {
        return Rational(static_cast<std::int64_t>(to_uint(v, field)));
    }
    const auto num = to_uint(trim(v.substr(0, slash)), field);
    const auto den = to_uint(trim(v.substr(slash + 1)), field);
    if (den == 0) {
        throw ValidationError(field, "zero denominator");
    }
    return Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

std::string fmt_double(double d) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    return buf;
}

struct MemberDraft {
    std::size_t line = 0;
    std::map<std::string, std::string> kv;
};

SubshiftSpec build_member(const MemberDraft& m, std::size_t index) {
    const std::string field = "family." + std::to_string(index);
    auto get = [&](const std::string& key) -> const std::string& {
        auto it = m.kv.find(key);
        if (it == m.kv.end()) {
            throw ValidationError(field + "." + key, "missing");
        }
        return it->second;
    };
    const std::string& kind = get("kind");
    const Alphabet alphabet(get("alphabet"));
    auto parse_word = [&](const std::string& key, const std::string& text) {
        for (char c : text) {
            if (!alphabet.contains(c)) {
                throw ValidationError(field + "." + key, "symbol outside the alphabet");
            }
        }
        return alphabet.parse(text);
    };
    if (kind == "substitution") {
        for (const auto& [k, v] : m.kv) {
            if (k != "kind" && k != "alphabet" && k != "images" && k != "seed") {
                throw ParseError(m.line, "unknown key '" + k + "' in " + field);
            }
        }
        SubstitutionSpec s;
        s.alphabet = alphabet;
        for (const auto& img : split_list(get("images"))) {
            s.images.push_back(parse_word("images", img));
        }
        const std::string& seed = get("seed");
        if (seed.size() != 1 || !alphabet.contains(seed[0])) {
            throw ValidationError(field + ".seed", "must be one symbol of the alphabet");
        }
        s.seed = alphabet.index_of(seed[0]);
        try {
            s.validate();
        } catch (const ValidationError& e) {
            throw ValidationError(field + "." + e.field(), e.what());
        }
        return s;
    }
    if (kind == "sofic") {
        for (const auto& [k, v] : m.kv) {
            if (k != "kind" && k != "alphabet" && k != "states" && k != "start" && k != "edges") {
                throw ParseError(m.line, "unknown key '" + k + "' in " + field);
            }
        }
        SoficSpec s;
        s.alphabet = alphabet;
        s.states = split_list(get("states"));
        auto state_index = [&](const std::string& name, const std::string& key) {
            for (std::size_t i = 0; i < s.states.size(); ++i) {
                if (s.states[i] == name) {
                    return i;
                }
            }
            throw ValidationError(field + "." + key, "unknown state '" + name + "'");
        };
        s.start = state_index(get("start"), "start");
        for (const auto& e : split_list(get("edges"))) {
            std::stringstream ss(e);
            std::string from, label, to, extra;
            ss >> from >> label >> to;
            if (to.empty() || (ss >> extra) || label.size() != 1) {
                throw ValidationError(field + ".edges", "expected 'from label to', got '" + e + "'");
            }
            const Word l = parse_word("edges", label);
            s.edges.push_back({state_index(from, "edges"), l[0], state_index(to, "edges")});
        }
        try {
            s.validate();
        } catch (const ValidationError& e) {
            throw ValidationError(field + "." + e.field(), e.what());
        }
        return s;
    }
    throw ValidationError(field + ".kind", "expected substitution or sofic, got '" + kind + "'");
}

Mode to_mode(const std::string& v) {
    if (v == "construct-run") {
        return Mode::ConstructRun;
    }
    if (v == "max-fixture") {
        return Mode::MaxFixture;
    }
    if (v == "oracle") {
        return Mode::Oracle;
    }
    throw ValidationError("mode", "expected construct-run, max-fixture or oracle");
}

} // namespace

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig c;
    std::map<std::size_t, MemberDraft> members;
    std::set<std::string> top_keys;
    MemberDraft* section = nullptr;
    std::stringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        // comments are whole lines; '#' elsewhere is a symbol
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ParseError(line_no, "unterminated section header");
            }
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (name.rfind("family.", 0) != 0) {
                throw ParseError(line_no, "unknown section '" + name + "'");
            }
            const std::string idx = name.substr(7);
            if (idx.empty() || idx.find_first_not_of("0123456789") != std::string::npos ||
                idx[0] == '0') {
                throw ParseError(line_no, "section index must be a positive integer");
            }
            const std::size_t i = std::stoul(idx);
            if (members.count(i)) {
                throw ParseError(line_no, "duplicate section [" + name + "]");
            }
            section = &members[i];
            section->line = line_no;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError(line_no, "expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ParseError(line_no, "empty key");
        }
        if (section != nullptr) {
            if (section->kv.count(key)) {
                throw ParseError(line_no, "duplicate key '" + key + "'");
            }
            section->kv[key] = value;
            continue;
        }
        if (!top_keys.insert(key).second) {
            throw ParseError(line_no, "duplicate key '" + key + "'");
        }
        if (key == "mode") {
            c.mode = to_mode(value);
        } else if (key == "N") {
            c.N = to_uint(value, key);
        } else if (key == "T") {
            c.T = to_uint(value, key);
        } else if (key == "trials") {
            c.trials = to_uint(value, key);
        } else if (key == "seed") {
            c.seed = to_uint(value, key);
        } else if (key == "star_density") {
            c.star_density = to_double(value, key);
        } else if (key == "queries") {
            c.queries = split_list(value);
        } else if (key == "stride") {
            c.stride = to_uint(value, key);
        } else if (key == "out") {
            c.out = value;
        } else if (key == "diagram") {
            c.diagram = to_bool(value, key);
        } else if (key == "transient") {
            c.transient = value == "auto" ? std::nullopt : std::optional(to_uint(value, key));
        } else if (key == "inner_speed") {
            c.inner_speed = to_rational(value, key);
        } else if (key == "workspace_constant") {
            c.workspace_constant = static_cast<unsigned>(to_uint(value, key));
        } else if (key == "rule") {
            c.rule = value;
        } else if (key == "word") {
            c.word = value;
        } else if (key == "n") {
            c.n = to_uint(value, key);
        } else {
            throw ParseError(line_no, "unknown key '" + key + "'");
        }
    }
    std::size_t expect = 1;
    for (const auto& [i, m] : members) {
        if (i != expect++) {
            throw ParseError(m.line, "family sections must be numbered 1, 2, ... without gaps");
        }
        c.family.members.push_back(build_member(m, i));
    }
    c.validate();
    return c;
}

std::string render_config(const ExperimentConfig& c) {
    std::ostringstream o;
    o << "mode = " << mode_name(c.mode) << "\n";
    o << "N = " << c.N << "\n";
    o << "T = " << c.T << "\n";
    o << "trials = " << c.trials << "\n";
    o << "seed = " << c.seed << "\n";
    o << "star_density = " << fmt_double(c.star_density) << "\n";
    o << "queries = ";
    for (std::size_t i = 0; i < c.queries.size(); ++i) {
        o << (i ? ", " : "") << c.queries[i];
    }
    o << "\n";
    o << "stride = " << c.stride << "\n";
    o << "out = " << c.out << "\n";
    o << "diagram = " << (c.diagram ? "true" : "false") << "\n";
    o << "transient = " << (c.transient ? std::to_string(*c.transient) : std::string("auto")) << "\n";
    o << "inner_speed = " << c.inner_speed.num() << "/" << c.inner_speed.den() << "\n";
    o << "workspace_constant = " << c.workspace_constant << "\n";
    o << "rule = " << c.rule << "\n";
    o << "word = " << c.word << "\n";
    o << "n = " << c.n << "\n";
    for (std::size_t i = 0; i < c.family.members.size(); ++i) {
        o << "\n[family." << i + 1 << "]\n";
        std::visit(
            [&](const auto& m) {
                using M = std::decay_t<decltype(m)>;
                o << "alphabet = " << m.alphabet.glyphs() << "\n";
                if constexpr (std::is_same_v<M, SubstitutionSpec>) {
                    o << "kind = substitution\n";
                    o << "images = ";
                    for (std::size_t j = 0; j < m.images.size(); ++j) {
                        o << (j ? ", " : "") << m.alphabet.render(m.images[j]);
                    }
                    o << "\nseed = " << m.alphabet.glyph(m.seed) << "\n";
                } else {
                    o << "kind = sofic\n";
                    o << "states = ";
                    for (std::size_t j = 0; j < m.states.size(); ++j) {
                        o << (j ? ", " : "") << m.states[j];
                    }
                    o << "\nstart = " << m.states[m.start] << "\n";
                    o << "edges = ";
                    for (std::size_t j = 0; j < m.edges.size(); ++j) {
                        const auto& e = m.edges[j];
                        o << (j ? ", " : "") << m.states[e.from] << " " << m.alphabet.glyph(e.label)
                          << " " << m.states[e.to];
                    }
                    o << "\n";
                }
            },
            c.family.members[i]);
    }
    return o.str();
}

} // namespace mulimit
