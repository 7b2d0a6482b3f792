#include "riskshare/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace riskshare {

namespace {

struct Entry {
    std::string value;
    int line = 0;
    mutable bool used = false;
};

struct Sections {
    std::string origin;
    std::map<std::string, std::map<std::string, Entry>> data;

    [[noreturn]] void fail(const std::string& msg, int line = 0) const {
        std::ostringstream os;
        os << origin;
        if (line > 0) os << ":" << line;
        os << ": " << msg;
        throw ScenarioError(os.str());
    }

    bool has(const std::string& sec, const std::string& key) const {
        auto s = data.find(sec);
        return s != data.end() && s->second.count(key) > 0;
    }

    const Entry& get(const std::string& sec, const std::string& key) const {
        auto s = data.find(sec);
        if (s == data.end()) fail("missing section [" + sec + "]");
        auto k = s->second.find(key);
        if (k == s->second.end()) fail("missing key '" + key + "' in section [" + sec + "]");
        k->second.used = true;
        return k->second;
    }

    std::string str(const std::string& sec, const std::string& key) const {
        return get(sec, key).value;
    }

    std::string str_or(const std::string& sec, const std::string& key,
                       const std::string& def) const {
        if (!has(sec, key)) return def;
        return str(sec, key);
    }

    double num(const std::string& sec, const std::string& key) const {
        const Entry& e = get(sec, key);
        try {
            std::size_t pos = 0;
            const double v = std::stod(e.value, &pos);
            if (pos != e.value.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            fail("key '" + key + "' is not a number: '" + e.value + "'", e.line);
        }
    }

    double num_or(const std::string& sec, const std::string& key, double def) const {
        if (!has(sec, key)) return def;
        return num(sec, key);
    }

    std::vector<double> vec(const std::string& sec, const std::string& key) const {
        const Entry& e = get(sec, key);
        std::vector<double> out;
        std::istringstream is(e.value);
        std::string tok;
        while (is >> tok) {
            try {
                std::size_t pos = 0;
                out.push_back(std::stod(tok, &pos));
                if (pos != tok.size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                fail("key '" + key + "' has a non-numeric entry: '" + tok + "'", e.line);
            }
        }
        if (out.empty()) fail("key '" + key + "' is an empty vector", e.line);
        return out;
    }

    void check_all_used() const {
        for (const auto& [sec, kv] : data)
            for (const auto& [key, e] : kv)
                if (!e.used) fail("unknown key '" + key + "' in section [" + sec + "]", e.line);
    }
};

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

Sections tokenize(const std::string& text, const std::string& origin) {
    Sections out;
    out.origin = origin;
    std::istringstream is(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') out.fail("unterminated section header", lineno);
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) out.fail("empty section name", lineno);
            out.data[section];
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) out.fail("expected 'key = value': '" + line + "'", lineno);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) out.fail("empty key", lineno);
        if (out.data[section].count(key)) out.fail("duplicate key '" + key + "'", lineno);
        out.data[section][key] = Entry{value, lineno, false};
    }
    return out;
}

RiskMeasureSpec parse_risk(const Sections& sc, const std::string& sec) {
    const std::string kind = sc.str(sec, "risk");
    if (kind == "entropic") return RiskMeasureSpec::entropic(sc.num(sec, "gamma"));
    if (kind == "avar") return RiskMeasureSpec::avar(sc.num(sec, "lambda"));
    sc.fail("key 'risk' must be 'entropic' or 'avar', got '" + kind + "'",
            sc.get(sec, "risk").line);
}

FirmSpec parse_firm(const Sections& sc, const std::string& sec, std::size_t atoms) {
    FirmSpec f;
    std::vector<double> w = sc.vec(sec, "endowment");
    const double scale = sc.num_or(sec, "scale", 1.0);
    for (auto& x : w) x *= scale;
    if (w.size() != atoms)
        sc.fail("endowment length " + std::to_string(w.size()) + " does not match " +
                    std::to_string(atoms) + " atoms",
                sc.get(sec, "endowment").line);
    f.endowment = Claim(std::move(w));
    f.risk = parse_risk(sc, sec);
    return f;
}

std::vector<Claim> parse_products(const Sections& sc, const std::string& key,
                                  std::size_t atoms) {
    const Entry& e = sc.get("catalogue", key);
    std::vector<Claim> out;
    std::istringstream groups(e.value);
    std::string group;
    while (std::getline(groups, group, '|')) {
        std::istringstream is(group);
        std::vector<double> v;
        double x;
        while (is >> x) v.push_back(x);
        if (v.empty()) sc.fail("empty product in '" + key + "'", e.line);
        if (v.size() != atoms)
            sc.fail("product in '" + key + "' has wrong dimension", e.line);
        out.emplace_back(std::move(v));
    }
    if (out.empty()) sc.fail("no products in '" + key + "'", e.line);
    return out;
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& origin) {
    const Sections sc = tokenize(text, origin);
    Scenario s;
    s.raw_text = text;
    s.name = sc.str("", "name");
    const std::string game = sc.str_or("", "game", "risk");
    if (game == "risk") s.game = GameKind::RiskMin;
    else if (game == "profit") s.game = GameKind::ProfitMax;
    else sc.fail("key 'game' must be 'risk' or 'profit', got '" + game + "'",
                 sc.get("", "game").line);
    s.out_dir = sc.str_or("", "out_dir", "");

    const std::size_t atoms = static_cast<std::size_t>(sc.num("space", "atoms"));
    if (sc.has("space", "weights")) {
        auto w = sc.vec("space", "weights");
        if (w.size() != atoms)
            sc.fail("space weights length does not match atoms",
                    sc.get("space", "weights").line);
        s.space = ProbSpace(std::move(w));
    } else {
        s.space = ProbSpace(atoms);
    }

    const double a = sc.num_or("grid", "a", 0.05);
    const std::size_t cells = static_cast<std::size_t>(sc.num("grid", "cells"));
    if (sc.has("grid", "cell_weights")) {
        auto cw = sc.vec("grid", "cell_weights");
        s.grid = TypeGrid(a, cells, std::move(cw));
    } else {
        s.grid = TypeGrid(a, cells);
    }

    if (s.game == GameKind::RiskMin) {
        s.firm1 = parse_firm(sc, "firm1", atoms);
        s.firm2 = parse_firm(sc, "firm2", atoms);
        PlannerConfig& c = s.solver;
        c.max_iterations = static_cast<std::size_t>(sc.num_or("solver", "max_iterations", 4000));
        c.cube_init = sc.num_or("solver", "cube", 0.25);
        c.cube_min = sc.num_or("solver", "cube_min", 1e-7);
        c.tolerance = sc.num_or("solver", "tolerance", 1e-10);
        c.patience = static_cast<std::size_t>(sc.num_or("solver", "patience", 60));
        c.seed = static_cast<unsigned long>(sc.num_or("solver", "seed", 1));
        c.tbr_init = sc.num_or("solver", "tbr_init", 0.5);
        const std::string tbr = sc.str_or("solver", "tbr", "free");
        if (tbr == "free") c.tbr_policy = TbrPolicy::Free;
        else if (tbr == "frozen1") c.tbr_policy = TbrPolicy::FrozenFirm1;
        else if (tbr == "frozen0") c.tbr_policy = TbrPolicy::FrozenFirm2;
        else sc.fail("solver key 'tbr' must be free|frozen1|frozen0",
                     sc.get("solver", "tbr").line);
        const std::string mode = sc.str_or("solver", "mode", "shared");
        if (mode == "shared") c.mode = ScheduleMode::Shared;
        else if (mode == "per-firm") c.mode = ScheduleMode::PerFirm;
        else sc.fail("solver key 'mode' must be shared|per-firm",
                     sc.get("solver", "mode").line);
        const std::string ir = sc.str_or("solver", "enforce_ir", "true");
        if (ir == "true") c.enforce_ir = true;
        else if (ir == "false") c.enforce_ir = false;
        else sc.fail("solver key 'enforce_ir' must be true|false",
                     sc.get("solver", "enforce_ir").line);
    } else {
        CatalogueGameSpec& cg = s.catalogue;
        cg.basic1 = parse_products(sc, "basic1", atoms);
        cg.basic2 = parse_products(sc, "basic2", atoms);
        cg.cost1 = sc.vec("catalogue", "cost1");
        cg.cost2 = sc.vec("catalogue", "cost2");
        if (cg.cost1.size() != cg.basic1.size() || cg.cost2.size() != cg.basic2.size())
            sc.fail("cost vectors must match the basic product counts");
        cg.hull_step = sc.num_or("catalogue", "hull_step", 1.0);
        cg.price_grid = sc.vec("catalogue", "prices");
        cg.enumeration_cap = static_cast<std::size_t>(sc.num_or("nash", "cap", 4096));
        cg.nash.iterations = static_cast<std::size_t>(sc.num_or("nash", "iterations", 100000));
        cg.nash.threshold = sc.num_or("nash", "threshold", 0.01);
        cg.nash.menu_size = static_cast<int>(sc.num_or("nash", "menus", 1));
        cg.nash.seed = static_cast<unsigned long>(sc.num_or("nash", "seed", 1));
    }
    sc.check_all_used();
    return s;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError(path + ": cannot open scenario file");
    std::ostringstream os;
    os << in.rdbuf();
    return parse_scenario(os.str(), path);
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_vec(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += fmt(v[i]);
    }
    return out;
}

void emit_risk(std::ostringstream& os, const RiskMeasureSpec& r) {
    if (r.kind == RiskKind::Entropic)
        os << "risk = entropic\ngamma = " << fmt(r.risk_aversion) << "\n";
    else
        os << "risk = avar\nlambda = " << fmt(r.tail_level) << "\n";
}

}  // namespace

std::string serialize_scenario(const Scenario& s) {
    std::ostringstream os;
    os << "name = " << s.name << "\n";
    os << "game = " << (s.game == GameKind::RiskMin ? "risk" : "profit") << "\n";
    if (!s.out_dir.empty()) os << "out_dir = " << s.out_dir << "\n";
    os << "\n[space]\natoms = " << s.space.atom_count() << "\n";
    os << "weights = " << fmt_vec(s.space.weights()) << "\n";
    os << "\n[grid]\na = " << fmt(s.grid.lower()) << "\ncells = " << s.grid.cells() << "\n";
    os << "cell_weights = " << fmt_vec(s.grid.cell_weights()) << "\n";
    if (s.game == GameKind::RiskMin) {
        for (int i = 0; i < 2; ++i) {
            const FirmSpec& f = i == 0 ? s.firm1 : s.firm2;
            os << "\n[firm" << (i + 1) << "]\n";
            os << "endowment = " << fmt_vec(f.endowment.payoffs) << "\n";
            emit_risk(os, f.risk);
        }
        const PlannerConfig& c = s.solver;
        os << "\n[solver]\n";
        os << "max_iterations = " << c.max_iterations << "\n";
        os << "cube = " << fmt(c.cube_init) << "\n";
        os << "cube_min = " << fmt(c.cube_min) << "\n";
        os << "tolerance = " << fmt(c.tolerance) << "\n";
        os << "patience = " << c.patience << "\n";
        os << "seed = " << c.seed << "\n";
        os << "tbr_init = " << fmt(c.tbr_init) << "\n";
        os << "tbr = "
           << (c.tbr_policy == TbrPolicy::Free
                   ? "free"
                   : (c.tbr_policy == TbrPolicy::FrozenFirm1 ? "frozen1" : "frozen0"))
           << "\n";
        os << "mode = " << (c.mode == ScheduleMode::Shared ? "shared" : "per-firm") << "\n";
        os << "enforce_ir = " << (c.enforce_ir ? "true" : "false") << "\n";
    } else {
        const CatalogueGameSpec& cg = s.catalogue;
        os << "\n[catalogue]\n";
        auto emit_products = [&](const char* key, const std::vector<Claim>& ps) {
            os << key << " = ";
            for (std::size_t i = 0; i < ps.size(); ++i) {
                if (i) os << " | ";
                os << fmt_vec(ps[i].payoffs);
            }
            os << "\n";
        };
        emit_products("basic1", cg.basic1);
        os << "cost1 = " << fmt_vec(cg.cost1) << "\n";
        emit_products("basic2", cg.basic2);
        os << "cost2 = " << fmt_vec(cg.cost2) << "\n";
        os << "hull_step = " << fmt(cg.hull_step) << "\n";
        os << "prices = " << fmt_vec(cg.price_grid) << "\n";
        os << "\n[nash]\n";
        os << "cap = " << cg.enumeration_cap << "\n";
        os << "iterations = " << cg.nash.iterations << "\n";
        os << "threshold = " << fmt(cg.nash.threshold) << "\n";
        os << "menus = " << cg.nash.menu_size << "\n";
        os << "seed = " << cg.nash.seed << "\n";
    }
    return os.str();
}

namespace {

constexpr const char* kEntropic52 = R"(# Two entropic firms on a uniform 14-atom space; duopoly with a free
# tie-breaking rule.
name = entropic-5.2
game = risk

[space]
atoms = 14

[grid]
a = 0.05
cells = 6

[firm1]
endowment = -1 -3 -9 -3 -1 -0.2 -0.1 -0.1 -0.2 1 -3 -9 -3 -1
scale = 0.5
risk = entropic
gamma = 2.0

[firm2]
endowment = -0.03 -0.1 -0.18 -0.2 -1 -3 -9 -10 -3 -1 -0.2 -0.18 -0.1 -0.03
scale = 0.5
risk = entropic
gamma = 2.0

[solver]
max_iterations = 4000
cube = 0.25
seed = 1
tbr = free
)";

constexpr const char* kAvar53 = R"(# Two AV@R firms; tail levels 0.05 and 0.1.
name = avar-5.3
game = risk

[space]
atoms = 14

[grid]
a = 0.05
cells = 6

[firm1]
endowment = -1 -2 -4 -10 -4 -2 -1 -0.8 -0.5 -0.3 0 0 0 0
scale = 0.02
risk = avar
lambda = 0.05

[firm2]
endowment = -0.03 -0.1 -0.18 -0.2 -1 -3 -9 -10 -3 -1 -0.2 -0.18 -0.1 -0.03
scale = 0.05
risk = avar
lambda = 0.1

[solver]
max_iterations = 4000
cube = 0.25
seed = 1
tbr = free
)";

constexpr const char* kTiny2x2 = R"(# Two atoms, two type cells; small enough for exhaustive search.
name = tiny-2x2
game = risk

[space]
atoms = 2

[grid]
a = 0.05
cells = 2

[firm1]
endowment = -1.0 0.2
risk = entropic
gamma = 1.5

[firm2]
endowment = 0.3 -0.8
risk = entropic
gamma = 2.0

[solver]
max_iterations = 3000
cube = 0.25
seed = 1
tbr = free
)";

constexpr const char* kCatalogueDemo = R"(# Desk-scale profit-maximization catalogue game.
name = catalogue-demo
game = profit

[space]
atoms = 4

[grid]
a = 0.05
cells = 5

[catalogue]
basic1 = 1 -0.5 0.25 -0.25 | 0.5 0.5 -0.5 -0.5
cost1 = 0.05 0.05
basic2 = 0.8 -0.3 0.2 -0.4 | -0.2 0.6 0.3 -0.5
cost2 = 0.04 0.06
hull_step = 0.5
prices = 0 0.04 0.08 0.12 0.16

[nash]
cap = 4096
iterations = 100000
threshold = 0.01
menus = 1
)";

}  // namespace

std::vector<std::string> bundled_scenario_names() {
    return {"entropic-5.2", "avar-5.3", "tiny-2x2", "catalogue-demo"};
}

std::string bundled_scenario_text(const std::string& name) {
    if (name == "entropic-5.2") return kEntropic52;
    if (name == "avar-5.3") return kAvar53;
    if (name == "tiny-2x2") return kTiny2x2;
    if (name == "catalogue-demo") return kCatalogueDemo;
    throw ScenarioError("unknown bundled scenario '" + name + "'");
}

Scenario resolve_scenario(const std::string& spec) {
    std::ifstream probe(spec);
    if (probe.good()) return load_scenario_file(spec);
    return parse_scenario(bundled_scenario_text(spec), spec);
}

}  // namespace riskshare
