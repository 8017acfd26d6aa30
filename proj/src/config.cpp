#include "fraclab/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "fraclab/errors.hpp"

namespace fraclab {

namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep)) out.push_back(trim(item));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

double to_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) throw ConfigError(key, "expected a number, got '" + text + "'");
    return v;
}

std::int64_t to_int(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
        throw ConfigError(key, "expected an integer, got '" + text + "'");
    return v;
}

std::size_t to_size(const std::string& key, const std::string& text) {
    const auto v = to_int(key, text);
    if (v < 0) throw ConfigError(key, "must be nonnegative");
    return static_cast<std::size_t>(v);
}

bool to_bool(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "true") return true;
    if (t == "false") return false;
    throw ConfigError(key, "expected true or false, got '" + text + "'");
}

std::vector<double> to_doubles(const std::string& key, const std::string& text) {
    std::vector<double> out;
    if (trim(text).empty()) return out;
    for (const auto& item : split(text, ',')) out.push_back(to_double(key, item));
    return out;
}

std::vector<std::size_t> to_sizes(const std::string& key, const std::string& text) {
    std::vector<std::size_t> out;
    if (trim(text).empty()) return out;
    for (const auto& item : split(text, ',')) out.push_back(to_size(key, item));
    return out;
}

// "x:m, x:m"
std::vector<Atom> to_atoms(const std::string& key, const std::string& text) {
    std::vector<Atom> out;
    if (trim(text).empty()) return out;
    for (const auto& item : split(text, ',')) {
        const auto parts = split(item, ':');
        if (parts.size() != 2) throw ConfigError(key, "atoms are written location:mass, got '" + item + "'");
        out.push_back({to_double(key, parts[0]), to_double(key, parts[1])});
    }
    return out;
}

// "n:eps, n:eps"
std::vector<ScheduleLevel> to_schedule(const std::string& key, const std::string& text) {
    std::vector<ScheduleLevel> out;
    if (trim(text).empty()) return out;
    for (const auto& item : split(text, ',')) {
        const auto parts = split(item, ':');
        if (parts.size() != 2) throw ConfigError(key, "schedule pairs are written n:epsilon, got '" + item + "'");
        out.push_back({to_size(key, parts[0]), to_double(key, parts[1])});
    }
    return out;
}

// "1, 2, 4" or "1..67108864" (doubling)
std::vector<std::int64_t> to_levels(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    const auto dots = t.find("..");
    if (dots != std::string::npos) {
        const auto first = to_int(key, t.substr(0, dots));
        const auto last = to_int(key, t.substr(dots + 2));
        if (first < 1 || last < first) throw ConfigError(key, "doubling range needs 1 <= first <= last");
        return SolverConfig::doubling_levels(first, last);
    }
    std::vector<std::int64_t> out;
    for (const auto& item : split(t, ',')) out.push_back(to_int(key, item));
    return out;
}

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F&& f) {
    std::string out;
    for (std::size_t k = 0; k < items.size(); ++k) {
        if (k) out += ", ";
        out += f(items[k]);
    }
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, std::map<std::string, Setter>>& schema() {
    static const std::map<std::string, std::map<std::string, Setter>> s = {
        {"run", {{"command", [](RunConfig& c, const std::string&, const std::string& v) { c.command = trim(v); }}}},
        {"domain",
         {{"a", [](RunConfig& c, const std::string& k, const std::string& v) { c.a = to_double(k, v); }},
          {"b", [](RunConfig& c, const std::string& k, const std::string& v) { c.b = to_double(k, v); }}}},
        {"grid", {{"n", [](RunConfig& c, const std::string& k, const std::string& v) { c.n = to_size(k, v); }}}},
        {"operator",
         {{"alpha", [](RunConfig& c, const std::string& k, const std::string& v) { c.alpha = to_double(k, v); }}}},
        {"nonlinearity",
         {{"kind",
           [](RunConfig& c, const std::string& k, const std::string& v) {
               try {
                   c.nonlinearity.kind = parse_nonlinearity_kind(trim(v));
               } catch (const Error& e) {
                   throw ConfigError(k, e.what());
               }
           }},
          {"gamma", [](RunConfig& c, const std::string& k, const std::string& v) { c.nonlinearity.gamma = to_double(k, v); }},
          {"beta", [](RunConfig& c, const std::string& k, const std::string& v) { c.nonlinearity.beta = to_double(k, v); }},
          {"c1", [](RunConfig& c, const std::string& k, const std::string& v) { c.nonlinearity.c1 = to_double(k, v); }},
          {"c2", [](RunConfig& c, const std::string& k, const std::string& v) { c.nonlinearity.c2 = to_double(k, v); }},
          {"monotone",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.nonlinearity.monotone = to_bool(k, v); }}}},
        {"measure",
         {{"density_id", [](RunConfig& c, const std::string&, const std::string& v) { c.measure.density_id = trim(v); }},
          {"density_params",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.measure.density_params = to_doubles(k, v); }},
          {"atoms", [](RunConfig& c, const std::string& k, const std::string& v) { c.measure.atoms = to_atoms(k, v); }}}},
        {"solver",
         {{"inner_tol", [](RunConfig& c, const std::string& k, const std::string& v) { c.solver.inner_tol = to_double(k, v); }},
          {"outer_tol", [](RunConfig& c, const std::string& k, const std::string& v) { c.solver.outer_tol = to_double(k, v); }},
          {"max_inner_iters",
           [](RunConfig& c, const std::string& k, const std::string& v) {
               c.solver.max_inner_iters = static_cast<int>(to_int(k, v));
           }},
          {"levels", [](RunConfig& c, const std::string& k, const std::string& v) { c.solver.levels = to_levels(k, v); }},
          {"run_all_levels",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.solver.run_all_levels = to_bool(k, v); }}}},
        {"mc",
         {{"samples", [](RunConfig& c, const std::string& k, const std::string& v) { c.mc.walk.samples = to_size(k, v); }},
          {"dt", [](RunConfig& c, const std::string& k, const std::string& v) { c.mc.walk.dt = to_double(k, v); }},
          {"seed",
           [](RunConfig& c, const std::string& k, const std::string& v) {
               c.mc.walk.seed = static_cast<std::uint64_t>(to_size(k, v));
           }},
          {"batch", [](RunConfig& c, const std::string& k, const std::string& v) { c.mc.walk.batch = to_size(k, v); }},
          {"max_steps", [](RunConfig& c, const std::string& k, const std::string& v) { c.mc.walk.max_steps = to_int(k, v); }},
          {"bridge_correction",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.mc.walk.bridge_correction = to_bool(k, v); }},
          {"points", [](RunConfig& c, const std::string& k, const std::string& v) { c.mc.points = to_doubles(k, v); }},
          {"allowance", [](RunConfig& c, const std::string& k, const std::string& v) { c.mc.allowance = to_double(k, v); }}}},
        {"schedule", {{"pairs", [](RunConfig& c, const std::string& k, const std::string& v) { c.schedule = to_schedule(k, v); }}}},
        {"stability",
         {{"mode", [](RunConfig& c, const std::string&, const std::string& v) { c.stability.mode = trim(v); }},
          {"tv_count", [](RunConfig& c, const std::string& k, const std::string& v) { c.stability.tv_count = to_size(k, v); }},
          {"tv_perturbation",
           [](RunConfig& c, const std::string&, const std::string& v) { c.stability.tv_perturbation = trim(v); }},
          {"tv_atom", [](RunConfig& c, const std::string& k, const std::string& v) { c.stability.tv_atom = to_double(k, v); }},
          {"min_levels",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.stability.thresholds.min_levels = to_size(k, v); }},
          {"vanishing_ratio",
           [](RunConfig& c, const std::string& k, const std::string& v) {
               c.stability.thresholds.vanishing_ratio = to_double(k, v);
           }},
          {"tv_factor",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.stability.thresholds.tv_factor = to_double(k, v); }},
          {"exclusion_radius",
           [](RunConfig& c, const std::string& k, const std::string& v) {
               c.stability.thresholds.exclusion_radius = to_double(k, v);
           }}}},
        {"capacity",
         {{"x0", [](RunConfig& c, const std::string& k, const std::string& v) { c.capacity.x0 = to_double(k, v); }},
          {"sizes", [](RunConfig& c, const std::string& k, const std::string& v) { c.capacity.sizes = to_sizes(k, v); }}}},
        {"output", {{"dir", [](RunConfig& c, const std::string&, const std::string& v) { c.output_dir = trim(v); }}}},
    };
    return s;
}

// Runs a module constructor and reports its failure under `key`.
template <typename F>
void check(const std::string& key, F&& f) {
    try {
        f();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(key, e.what());
    }
}

void validate(const RunConfig& c) {
    static const std::set<std::string> commands = {"", "solve", "bracket", "capacity", "stability", "mc-verify"};
    if (!commands.count(c.command)) throw ConfigError("run.command", "unknown command '" + c.command + "'");
    check("domain", [&] { c.domain(); });
    check("operator.alpha", [&] { c.order(); });
    check("nonlinearity", [&] {
        c.nonlinearity.g();
        c.nonlinearity.h();
    });
    check("measure", [&] {
        const auto spec = c.measure.spec();
        for (const auto& a : spec.atoms) {
            if (!(a.mass >= 0.0)) throw ParameterError("atom masses must be nonnegative");
            if (!c.domain().contains(a.location)) throw ParameterError("atom outside the domain");
        }
    });
    check("solver", [&] { c.solver.validate(); });
    check("mc", [&] { c.mc.walk.validate(); });
    if (!(c.mc.allowance >= 0.0)) throw ConfigError("mc.allowance", "must be nonnegative");
    for (double x : c.mc.points)
        if (!c.domain().contains(x)) throw ConfigError("mc.points", "points must lie inside the domain");
    if (!c.schedule.empty()) check("schedule.pairs", [&] { c.refinement(); });
    static const std::set<std::string> modes = {"tv", "vanishing", "mollification_split", "additive_perturbation"};
    if (!modes.count(c.stability.mode)) throw ConfigError("stability.mode", "unknown mode '" + c.stability.mode + "'");
    if (c.stability.tv_perturbation != "scale" && c.stability.tv_perturbation != "atom")
        throw ConfigError("stability.tv_perturbation", "expected scale or atom");
    if (c.stability.tv_count == 0) throw ConfigError("stability.tv_count", "must be positive");
    if (c.stability.tv_perturbation == "atom" && !c.domain().contains(c.stability.tv_atom))
        throw ConfigError("stability.tv_atom", "must lie inside the domain");
    if (!(c.stability.thresholds.vanishing_ratio > 0.0))
        throw ConfigError("stability.vanishing_ratio", "must be positive");
    if (!(c.stability.thresholds.tv_factor > 0.0)) throw ConfigError("stability.tv_factor", "must be positive");
    if (c.stability.thresholds.min_levels < 2) throw ConfigError("stability.min_levels", "must be at least 2");
    if (!c.domain().contains(c.capacity.x0)) throw ConfigError("capacity.x0", "must lie inside the domain");
    if (c.capacity.sizes.empty()) throw ConfigError("capacity.sizes", "at least one size is required");
    for (std::size_t k = 0; k < c.capacity.sizes.size(); ++k) {
        if (c.capacity.sizes[k] == 0 || (k && c.capacity.sizes[k] <= c.capacity.sizes[k - 1]))
            throw ConfigError("capacity.sizes", "sizes must be positive and increasing");
        if (c.capacity.sizes[k] > kMaxInteriorNodes) throw ConfigError("capacity.sizes", "size exceeds the grid limit");
    }
    if (c.n > kMaxInteriorNodes) throw ConfigError("grid.n", "grid size exceeds the limit");
    if (c.output_dir.empty()) throw ConfigError("output.dir", "must not be empty");
}

}  // namespace

Nonlinearity NonlinearitySection::g() const { return Nonlinearity(kind, gamma, c1, c2, monotone); }

std::optional<Nonlinearity> NonlinearitySection::h() const {
    if (!beta) return std::nullopt;
    return g().with_exponent(*beta);
}

MeasureSpec MeasureSection::spec() const {
    MeasureSpec s;
    if (density_id != "none") s.densities.emplace_back(density_id, density_params);
    s.atoms = atoms;
    return s;
}

RunConfig parse_config(const std::string& text) {
    pt::ptree tree;
    std::istringstream is(text);
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("", std::string("malformed configuration: ") + e.what());
    }
    RunConfig config;
    const auto& known = schema();
    for (const auto& [section, body] : tree) {
        const auto sec = known.find(section);
        if (sec == known.end()) throw ConfigError(section, "unknown section");
        if (!body.data().empty()) throw ConfigError(section, "expected a [section]");
        for (const auto& [key, value] : body) {
            const std::string full = section + "." + key;
            const auto setter = sec->second.find(key);
            if (setter == sec->second.end()) throw ConfigError(full, "unknown key");
            setter->second(config, full, value.data());
        }
    }
    validate(config);
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot read configuration " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string echo(const RunConfig& c) {
    std::ostringstream os;
    auto levels = [&] {
        const auto& l = c.solver.levels;
        if (l == SolverConfig::doubling_levels(l.front(), l.back()))
            return std::to_string(l.front()) + ".." + std::to_string(l.back());
        return join(l, [](std::int64_t v) { return std::to_string(v); });
    };
    if (!c.command.empty()) os << "[run]\ncommand = " << c.command << "\n\n";
    os << "[domain]\na = " << fmt(c.a) << "\nb = " << fmt(c.b) << "\n\n";
    os << "[grid]\nn = " << c.n << "\n\n";
    os << "[operator]\nalpha = " << fmt(c.alpha) << "\n\n";
    os << "[nonlinearity]\nkind = " << to_string(c.nonlinearity.kind) << "\ngamma = " << fmt(c.nonlinearity.gamma)
       << "\n";
    if (c.nonlinearity.beta) os << "beta = " << fmt(*c.nonlinearity.beta) << "\n";
    os << "c1 = " << fmt(c.nonlinearity.c1) << "\nc2 = " << fmt(c.nonlinearity.c2)
       << "\nmonotone = " << (c.nonlinearity.monotone ? "true" : "false") << "\n\n";
    os << "[measure]\ndensity_id = " << c.measure.density_id
       << "\ndensity_params = " << join(c.measure.density_params, fmt)
       << "\natoms = " << join(c.measure.atoms, [](const Atom& a) { return fmt(a.location) + ":" + fmt(a.mass); })
       << "\n\n";
    os << "[solver]\ninner_tol = " << fmt(c.solver.inner_tol) << "\nouter_tol = " << fmt(c.solver.outer_tol)
       << "\nmax_inner_iters = " << c.solver.max_inner_iters << "\nlevels = " << levels()
       << "\nrun_all_levels = " << (c.solver.run_all_levels ? "true" : "false") << "\n\n";
    os << "[mc]\nsamples = " << c.mc.walk.samples << "\ndt = " << fmt(c.mc.walk.dt) << "\nseed = " << c.mc.walk.seed
       << "\nbatch = " << c.mc.walk.batch << "\nmax_steps = " << c.mc.walk.max_steps
       << "\nbridge_correction = " << (c.mc.walk.bridge_correction ? "true" : "false")
       << "\npoints = " << join(c.mc.points, fmt) << "\nallowance = " << fmt(c.mc.allowance) << "\n\n";
    os << "[schedule]\npairs = "
       << join(c.schedule, [](const ScheduleLevel& l) { return std::to_string(l.n) + ":" + fmt(l.epsilon); })
       << "\n\n";
    const auto& t = c.stability.thresholds;
    os << "[stability]\nmode = " << c.stability.mode << "\ntv_count = " << c.stability.tv_count
       << "\ntv_perturbation = " << c.stability.tv_perturbation << "\ntv_atom = " << fmt(c.stability.tv_atom)
       << "\nmin_levels = " << t.min_levels << "\nvanishing_ratio = " << fmt(t.vanishing_ratio)
       << "\ntv_factor = " << fmt(t.tv_factor) << "\nexclusion_radius = " << fmt(t.exclusion_radius) << "\n\n";
    os << "[capacity]\nx0 = " << fmt(c.capacity.x0)
       << "\nsizes = " << join(c.capacity.sizes, [](std::size_t v) { return std::to_string(v); }) << "\n\n";
    os << "[output]\ndir = " << c.output_dir << "\n";
    return os.str();
}

}  // namespace fraclab
