#include "config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "mfsmp/csv.hpp"
#include "mfsmp/errors.hpp"
#include "mfsmp/time_grid.hpp"

namespace mfsmp::cli {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s{
        {"run", {"threads", "out"}},
        {"grid", {"T", "l", "dt"}},
        {"ensemble", {"N", "seed"}},
        {"model", {"name"}},
        {"spike", {"tau_fraction", "eps_fraction", "eps_fractions"}},
        {"regression", {"degree", "ridge", "picard"}},
        {"controls", {"lo", "hi", "points", "max_cells"}},
        {"rates", {"targets"}},
        {"finance",
         {"alpha", "beta", "appreciation", "volatility", "initial_wealth", "gamma", "delta", "kappa", "lambda",
          "zeta", "iterations", "shift"}},
        {"nplayer", {"players", "replicates"}},
        {"custom",
         {"drift_inner", "diffusion_inner", "terminal_inner", "driver_inner_x", "driver_inner_y", "init",
          "base_control", "alternate_control", "growth_constant"}},
        {"custom_drift", {}},
        {"custom_diffusion", {}},
        {"custom_driver", {}},
        {"custom_terminal", {}},
    };
    return s;
}

bool free_keys(const std::string& section) { return section.rfind("custom_", 0) == 0; }

std::string trim(std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

// Line of `key` inside `[section]`, for diagnostics.
int find_line(const std::filesystem::path& path, const std::string& section, const std::string& key) {
    std::ifstream in(path);
    std::string line, current;
    for (int no = 1; std::getline(in, line); ++no) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == ';' || t[0] == '#') continue;
        if (t.front() == '[' && t.back() == ']') {
            current = trim(t.substr(1, t.size() - 2));
            if (key.empty() && current == section) return no;
            continue;
        }
        const auto eq = t.find('=');
        if (current == section && eq != std::string::npos && trim(t.substr(0, eq)) == key) return no;
    }
    return 0;
}

class Reader {
public:
    Reader(const pt::ptree& tree, std::filesystem::path path) : tree_(tree), path_(std::move(path)) {}

    [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& what) const {
        std::ostringstream os;
        os << path_.string() << ':' << find_line(path_, section, key) << ": [" << section << "] " << key << ": "
           << what;
        throw ConfigError(os.str());
    }

    std::optional<std::string> raw(const std::string& section, const std::string& key) const {
        const auto s = tree_.get_child_optional(pt::ptree::path_type(section, '\0'));
        if (!s) return std::nullopt;
        const auto v = s->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
        if (!v) return std::nullopt;
        return trim(*v);
    }

    template <class T>
    void number(const std::string& section, const std::string& key, T& out) const {
        const auto v = raw(section, key);
        if (!v) return;
        std::istringstream is(*v);
        T x{};
        is >> x;
        if (is.fail() || !is.eof()) fail(section, key, "cannot parse '" + *v + "'");
        out = x;
    }

    template <class T>
    void number(const std::string& section, const std::string& key, std::optional<T>& out) const {
        if (!raw(section, key)) return;
        T x{};
        number(section, key, x);
        out = x;
    }

    void text(const std::string& section, const std::string& key, std::string& out) const {
        if (const auto v = raw(section, key)) out = *v;
    }

    void flag(const std::string& section, const std::string& key, bool& out) const {
        const auto v = raw(section, key);
        if (!v) return;
        if (*v == "true" || *v == "1") out = true;
        else if (*v == "false" || *v == "0") out = false;
        else fail(section, key, "expected true or false, got '" + *v + "'");
    }

    void list(const std::string& section, const std::string& key, std::vector<double>& out) const {
        const auto v = raw(section, key);
        if (!v) return;
        try {
            out = parse_list(*v, key);
        } catch (const ConfigError& e) {
            fail(section, key, e.what());
        }
    }

    void table(const std::string& section, std::map<std::string, double>& out) const {
        const auto s = tree_.get_child_optional(pt::ptree::path_type(section, '\0'));
        if (!s) return;
        for (const auto& [k, v] : *s) {
            double x = 0;
            number(section, k, x);
            out[k] = x;
        }
    }

private:
    const pt::ptree& tree_;
    std::filesystem::path path_;
};

}  // namespace

std::vector<double> parse_list(const std::string& text, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        std::istringstream is(item);
        double x = 0;
        is >> x;
        if (item.empty() || is.fail() || !is.eof()) throw ConfigError(key + ": cannot parse list item '" + item + "'");
        out.push_back(x);
    }
    return out;
}

ExperimentConfig default_config() {
    ExperimentConfig c;
    finalize(c);
    return c;
}

void finalize(ExperimentConfig& c) {
    const double a = c.alpha, b = c.beta, mu = c.appreciation, s = c.volatility;
    c.market.alpha = [a](double) { return a; };
    c.market.beta = [b](double) { return b; };
    c.market.appreciation = [mu](double) { return mu; };
    c.market.volatility = [s](double) { return s; };
    c.market.delay = c.l;
    c.market.horizon = c.T;
    c.nplayer.seed = c.seed;
}

void validate(const ExperimentConfig& c) {
    try {
        build_grid(c.T, c.l, c.dt);
    } catch (const Error& e) {
        throw ConfigError(std::string("[grid] ") + e.kind() + ": " + e.what());
    }
    if (c.particles < 1) throw ConfigError("[ensemble] N must be at least 1");
    if (!(c.tau_fraction >= 0 && c.tau_fraction < 1)) throw ConfigError("[spike] tau_fraction must lie in [0, 1)");
    auto check_eps = [&](double e) {
        if (!(e >= 0 && c.tau_fraction + e <= 1 + 1e-12))
            throw ConfigError("[spike] eps fraction " + format_double(e) + " leaves [0, T]");
    };
    check_eps(c.eps_fraction);
    for (double e : c.eps_fractions) check_eps(e);
    if (c.basis.degree < 0) throw ConfigError("[regression] degree must be nonnegative");
    if (c.basis.ridge < 0) throw ConfigError("[regression] ridge must be nonnegative");
    if (c.control_points && *c.control_points < 1) throw ConfigError("[controls] points must be positive");
    if (c.control_lo && c.control_hi && *c.control_hi < *c.control_lo) throw ConfigError("[controls] hi < lo");
    if (c.max_cells < 1) throw ConfigError("[controls] max_cells must be positive");
    if (c.iterations < 1) throw ConfigError("[finance] iterations must be positive");
    if (c.nplayer.replicates < 1) throw ConfigError("[nplayer] replicates must be positive");
    for (int p : c.nplayer.players)
        if (p < 1) throw ConfigError("[nplayer] player counts must be positive");
    if (c.threads < 0) throw ConfigError("[run] threads must be nonnegative");
    for (const std::string& t : c.targets) parse_rate_target(t);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    if (!std::filesystem::is_regular_file(path)) throw ConfigError("config file not found: " + path.string());
    pt::ptree tree;
    try {
        pt::read_ini(path.string(), tree);
    } catch (const pt::ini_parser_error& e) {
        std::ostringstream os;
        os << path.string() << ':' << e.line() << ": " << e.message();
        throw ConfigError(os.str());
    }
    const Reader r(tree, path);
    for (const auto& [section, keys] : tree) {
        const auto it = schema().find(section);
        if (keys.empty() && !keys.data().empty()) r.fail("", section, "key outside a section");
        if (it == schema().end()) r.fail(section, "", "unknown section");
        if (free_keys(section)) continue;
        for (const auto& [key, value] : keys)
            if (!it->second.count(key)) r.fail(section, key, "unknown key");
    }

    ExperimentConfig c;
    r.number("run", "threads", c.threads);
    r.text("run", "out", c.out);
    r.number("grid", "T", c.T);
    r.number("grid", "l", c.l);
    r.number("grid", "dt", c.dt);
    r.number("ensemble", "N", c.particles);
    r.number("ensemble", "seed", c.seed);
    r.text("model", "name", c.model);
    r.number("spike", "tau_fraction", c.tau_fraction);
    r.number("spike", "eps_fraction", c.eps_fraction);
    r.list("spike", "eps_fractions", c.eps_fractions);
    r.number("regression", "degree", c.basis.degree);
    r.number("regression", "ridge", c.basis.ridge);
    r.flag("regression", "picard", c.picard);
    r.number("controls", "lo", c.control_lo);
    r.number("controls", "hi", c.control_hi);
    r.number("controls", "points", c.control_points);
    r.number("controls", "max_cells", c.max_cells);
    if (const auto t = r.raw("rates", "targets")) {
        std::stringstream ss(*t);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!trim(item).empty()) c.targets.push_back(trim(item));
    }
    r.number("finance", "alpha", c.alpha);
    r.number("finance", "beta", c.beta);
    r.number("finance", "appreciation", c.appreciation);
    r.number("finance", "volatility", c.volatility);
    r.number("finance", "initial_wealth", c.market.initial_wealth);
    r.number("finance", "gamma", c.investor.gamma);
    r.number("finance", "delta", c.investor.delta);
    r.number("finance", "kappa", c.investor.kappa);
    r.number("finance", "lambda", c.investor.lambda);
    r.number("finance", "zeta", c.investor.zeta);
    r.number("finance", "iterations", c.iterations);
    r.number("finance", "shift", c.shift);
    if (r.raw("nplayer", "players")) {
        std::vector<double> p;
        r.list("nplayer", "players", p);
        c.nplayer.players.clear();
        for (double v : p) {
            if (v != std::floor(v)) r.fail("nplayer", "players", "player counts must be integers");
            c.nplayer.players.push_back(static_cast<int>(v));
        }
    }
    r.number("nplayer", "replicates", c.nplayer.replicates);
    r.text("custom", "drift_inner", c.custom.drift_inner);
    r.text("custom", "diffusion_inner", c.custom.diffusion_inner);
    r.text("custom", "terminal_inner", c.custom.terminal_inner);
    r.number("custom", "driver_inner_x", c.custom.driver_inner_x);
    r.number("custom", "driver_inner_y", c.custom.driver_inner_y);
    r.number("custom", "init", c.custom.init);
    r.number("custom", "base_control", c.custom.base_control);
    r.number("custom", "alternate_control", c.custom.alternate_control);
    r.number("custom", "growth_constant", c.custom.growth_constant);
    r.table("custom_drift", c.custom.drift);
    r.table("custom_diffusion", c.custom.diffusion);
    r.table("custom_driver", c.custom.driver);
    r.table("custom_terminal", c.custom.terminal);
    finalize(c);
    validate(c);
    return c;
}

std::string echo(const ExperimentConfig& c) {
    std::ostringstream os;
    auto d = [](double v) { return format_double(v); };
    auto join = [&](const auto& v) {
        std::string s;
        for (std::size_t a = 0; a < v.size(); ++a) {
            if (a) s += ',';
            if constexpr (std::is_same_v<std::decay_t<decltype(v[a])>, double>) s += d(v[a]);
            else if constexpr (std::is_same_v<std::decay_t<decltype(v[a])>, std::string>) s += v[a];
            else s += std::to_string(v[a]);
        }
        return s;
    };
    os << "[grid]\nT = " << d(c.T) << "\nl = " << d(c.l) << "\ndt = " << d(c.dt) << "\n\n";
    os << "[ensemble]\nN = " << c.particles << "\nseed = " << c.seed << "\n\n";
    if (!c.model.empty()) os << "[model]\nname = " << c.model << "\n\n";
    os << "[spike]\ntau_fraction = " << d(c.tau_fraction) << "\neps_fraction = " << d(c.eps_fraction)
       << "\neps_fractions = " << join(c.eps_fractions) << "\n\n";
    os << "[regression]\ndegree = " << c.basis.degree << "\nridge = " << d(c.basis.ridge)
       << "\npicard = " << (c.picard ? "true" : "false") << "\n\n";
    os << "[controls]\n";
    if (c.control_lo) os << "lo = " << d(*c.control_lo) << '\n';
    if (c.control_hi) os << "hi = " << d(*c.control_hi) << '\n';
    if (c.control_points) os << "points = " << *c.control_points << '\n';
    os << "max_cells = " << c.max_cells << "\n\n";
    if (!c.targets.empty()) os << "[rates]\ntargets = " << join(c.targets) << "\n\n";
    os << "[finance]\nalpha = " << d(c.alpha) << "\nbeta = " << d(c.beta) << "\nappreciation = " << d(c.appreciation)
       << "\nvolatility = " << d(c.volatility) << "\ninitial_wealth = " << d(c.market.initial_wealth)
       << "\ngamma = " << d(c.investor.gamma) << "\ndelta = " << d(c.investor.delta)
       << "\nkappa = " << d(c.investor.kappa) << "\nlambda = " << d(c.investor.lambda)
       << "\nzeta = " << d(c.investor.zeta) << "\niterations = " << c.iterations << "\nshift = " << d(c.shift)
       << "\n\n";
    os << "[nplayer]\nplayers = " << join(c.nplayer.players) << "\nreplicates = " << c.nplayer.replicates << "\n";
    if (c.model == "custom") {
        const CustomTable& t = c.custom;
        os << "\n[custom]\ndrift_inner = " << t.drift_inner << "\ndiffusion_inner = " << t.diffusion_inner
           << "\nterminal_inner = " << t.terminal_inner << "\ndriver_inner_x = " << d(t.driver_inner_x)
           << "\ndriver_inner_y = " << d(t.driver_inner_y) << "\ninit = " << d(t.init)
           << "\nbase_control = " << d(t.base_control) << "\nalternate_control = " << d(t.alternate_control)
           << "\ngrowth_constant = " << d(t.growth_constant) << '\n';
        for (const auto& [name, m] : {std::pair{"custom_drift", &t.drift}, std::pair{"custom_diffusion", &t.diffusion},
                                      std::pair{"custom_driver", &t.driver}, std::pair{"custom_terminal", &t.terminal}}) {
            if (m->empty()) continue;
            os << "\n[" << name << "]\n";
            for (const auto& [k, v] : *m) os << k << " = " << d(v) << '\n';
        }
    }
    return os.str();
}

}  // namespace mfsmp::cli
