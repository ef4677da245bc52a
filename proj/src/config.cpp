#include "ferrodyn/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "ferrodyn/constants.hpp"

namespace ferrodyn {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const char* end = v.data() + v.size();
    auto r = std::from_chars(v.data(), end, out);
    if (r.ec != std::errc() || r.ptr != end || !std::isfinite(out))
        throw ConfigError(key + ": expected a real number, got '" + v + "'");
    return out;
}

long to_long(const std::string& key, const std::string& v) {
    long out = 0;
    const char* end = v.data() + v.size();
    auto r = std::from_chars(v.data(), end, out);
    if (r.ec != std::errc() || r.ptr != end)
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return out;
}

int to_int(const std::string& key, const std::string& v) {
    const long l = to_long(key, v);
    if (l < -2147483647L || l > 2147483647L) throw ConfigError(key + ": integer out of range");
    return int(l);
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    if (trim(v).empty()) return out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
    return out;
}

std::string list_str(const std::vector<double>& v) {
    std::string s;
    for (std::size_t n = 0; n < v.size(); ++n) s += (n ? ", " : "") + fmt(v[n]);
    return s;
}

template <class E>
E to_enum(const std::string& key, const std::string& v,
          const std::vector<std::pair<const char*, E>>& names) {
    std::string allowed;
    for (const auto& [n, e] : names) {
        if (v == n) return e;
        allowed += std::string(allowed.empty() ? "" : "|") + n;
    }
    throw ConfigError(key + ": expected one of " + allowed + ", got '" + v + "'");
}

template <class E>
std::string enum_str(E e, const std::vector<std::pair<const char*, E>>& names) {
    for (const auto& [n, x] : names)
        if (x == e) return n;
    return "?";
}

const std::vector<std::pair<const char*, Material>> kMaterials = {
    {"ferroelectric", Material::ferroelectric},
    {"dielectric", Material::dielectric},
    {"semiconductor", Material::semiconductor}};
const std::vector<std::pair<const char*, PolarizationBC::Kind>> kPolBC = {
    {"surface_effect", PolarizationBC::Kind::surface_effect},
    {"free", PolarizationBC::Kind::free},
    {"zero", PolarizationBC::Kind::zero}};
const std::vector<std::pair<const char*, Statistics>> kStats = {
    {"fermi_dirac", Statistics::fermi_dirac}, {"maxwell_boltzmann", Statistics::maxwell_boltzmann}};
const std::vector<std::pair<const char*, InitKind>> kInit = {{"random", InitKind::random},
                                                             {"gaussian_bump", InitKind::gaussian_bump},
                                                             {"uniform_value", InitKind::uniform_value},
                                                             {"stripe", InitKind::stripe}};
const std::vector<std::pair<const char*, Waveform>> kWave = {
    {"hold", Waveform::hold}, {"triangular", Waveform::triangular}, {"list", Waveform::list}};
const std::vector<std::pair<const char*, CouplingScheme>> kScheme = {
    {"lagged", CouplingScheme::lagged}, {"newton", CouplingScheme::newton}};
const std::vector<std::pair<const char*, BottomSolver>> kBottom = {
    {"smoother_iterations", BottomSolver::smoother_iterations},
    {"direct_small", BottomSolver::direct_small}};
const std::vector<std::pair<const char*, Smoother>> kSmoother = {{"rbgs", Smoother::rbgs},
                                                                 {"jacobi", Smoother::jacobi}};

struct Key {
    std::string name;
    std::function<void(SimConfig&, const std::string& key, const std::string& value)> set;
    std::function<std::string(const SimConfig&)> get;
};

#define REAL(k, member)                                                                        \
    Key{k, [](SimConfig& c, const std::string& key, const std::string& v) { c.member = to_double(key, v); }, \
        [](const SimConfig& c) { return fmt(c.member); }}
#define INT(k, member)                                                                      \
    Key{k, [](SimConfig& c, const std::string& key, const std::string& v) { c.member = to_int(key, v); }, \
        [](const SimConfig& c) { return std::to_string(c.member); }}
#define LONG(k, member)                                                                      \
    Key{k, [](SimConfig& c, const std::string& key, const std::string& v) { c.member = to_long(key, v); }, \
        [](const SimConfig& c) { return std::to_string(c.member); }}
#define BOOL(k, member)                                                                      \
    Key{k, [](SimConfig& c, const std::string& key, const std::string& v) { c.member = to_bool(key, v); }, \
        [](const SimConfig& c) { return std::string(c.member ? "true" : "false"); }}
#define ENUM(k, member, table)                                                                       \
    Key{k, [](SimConfig& c, const std::string& key, const std::string& v) { c.member = to_enum(key, v, table); }, \
        [](const SimConfig& c) { return enum_str(c.member, table); }}
#define LIST(k, member)                                                                       \
    Key{k, [](SimConfig& c, const std::string& key, const std::string& v) { c.member = to_list(key, v); }, \
        [](const SimConfig& c) { return list_str(c.member); }}

// sc.Nc / sc.Nv and tdgl.lambda are handled separately (derived defaults and
// the lambda/pol_bc exclusivity rule).
const std::vector<Key>& keys() {
    static const std::vector<Key> k = {
        INT("grid.nx", nx),
        INT("grid.ny", ny),
        REAL("grid.dx", dx),
        REAL("grid.dy", dy),
        REAL("grid.dz", dz),
        LONG("grid.max_tile_cells", max_tile_cells),
        REAL("fe.alpha", fe.alpha),
        REAL("fe.beta", fe.beta),
        REAL("fe.gamma", fe.gamma),
        REAL("fe.g11", fe.g11),
        REAL("fe.g44", fe.g44),
        REAL("fe.eps", fe.eps_fe),
        REAL("fe.Gamma", fe.Gamma),
        REAL("sc.me_eff", sc.me_eff),
        REAL("sc.mp_eff", sc.mp_eff),
        REAL("sc.eps", sc.eps_sc),
        REAL("sc.Ec", sc.Ec),
        REAL("sc.Ev", sc.Ev),
        REAL("sc.Nd_plus", sc.Nd_plus),
        REAL("sc.Na_minus", sc.Na_minus),
        REAL("sc.T", sc.T),
        ENUM("sc.statistics", sc.statistics, kStats),
        ENUM("tdgl.pol_bc", pol_bc.kind, kPolBC),
        REAL("time.dt", dt),
        INT("time.order", temporal_order),
        LONG("time.steps", fixed_steps),
        REAL("poisson.tol", poisson_tol),
        INT("poisson.pre_smooth", mg.pre_smooth),
        INT("poisson.post_smooth", mg.post_smooth),
        INT("poisson.max_vcycles", mg.max_vcycles),
        ENUM("poisson.bottom", mg.bottom, kBottom),
        INT("poisson.bottom_iterations", mg.bottom_iterations),
        INT("poisson.coarsest_size", mg.coarsest_size),
        ENUM("poisson.smoother", mg.smoother, kSmoother),
        REAL("coupling.tol", fixedpoint_tol),
        ENUM("coupling.scheme", coupling_scheme, kScheme),
        INT("coupling.max_iters", fixedpoint_max_iters),
        ENUM("init.kind", init.kind, kInit),
        REAL("init.amplitude", init.amplitude),
        Key{"init.seed",
            [](SimConfig& c, const std::string& key, const std::string& v) {
                std::uint64_t s = 0;
                auto r = std::from_chars(v.data(), v.data() + v.size(), s);
                if (r.ec != std::errc() || r.ptr != v.data() + v.size())
                    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
                c.init.seed = s;
            },
            [](const SimConfig& c) { return std::to_string(c.init.seed); }},
        REAL("init.value", init.value),
        REAL("init.stripe_period", init.stripe_period),
        BOOL("init.y_uniform", init.y_uniform),
        REAL("init.sigma1", init.bump.sigma1),
        REAL("init.sigma2", init.bump.sigma2),
        REAL("init.z0", init.bump.z0),
        REAL("init.bump_amplitude", init.bump.amplitude),
        ENUM("sweep.waveform", sweep.waveform, kWave),
        REAL("sweep.v", sweep.v),
        REAL("sweep.vmax", sweep.vmax),
        INT("sweep.points_per_quarter", sweep.points_per_quarter),
        INT("sweep.cycles", sweep.cycles),
        LIST("sweep.values", sweep.values),
        REAL("settle.rel_change_tol", sweep.settle.rel_change_tol),
        INT("settle.consecutive_steps", sweep.settle.consecutive_steps),
        LONG("settle.max_steps", sweep.settle.max_steps),
        LONG("output.record_every", output.record_every),
        LIST("output.snapshot_vapp", output.snapshot_vapp),
        BOOL("output.snapshot_final", output.snapshot_final),
    };
    return k;
}

#undef REAL
#undef INT
#undef LONG
#undef BOOL
#undef ENUM
#undef LIST

}  // namespace

int SimConfig::nz() const {
    double total = 0.0;
    for (const auto& L : layers) total += L.thickness;
    return int(std::lround(total / dz));
}

std::vector<Layer> SimConfig::stack_layers() const {
    std::vector<Layer> out;
    for (const auto& L : layers) {
        double e = L.eps;
        if (L.kind == Material::ferroelectric) e = fe.eps_fe;
        if (L.kind == Material::semiconductor) e = sc.eps_sc;
        out.push_back({L.kind, L.thickness, e});
    }
    return out;
}

void SimConfig::validate() const {
    auto need = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError(msg);
    };
    need(nx >= 4 && ny >= 4, "grid.nx/grid.ny: must be >= 4");
    need(nx % 2 == 0 && ny % 2 == 0, "grid.nx/grid.ny: must be even");
    need(dx > 0 && dy > 0 && dz > 0, "grid.dx/dy/dz: must be positive");
    need(max_tile_cells >= 64, "grid.max_tile_cells: must be >= 64");
    need(!layers.empty(), "layers.count: at least one layer required");
    for (std::size_t n = 0; n < layers.size(); ++n) {
        const std::string p = "layers." + std::to_string(n);
        need(layers[n].thickness > 0, p + ".thickness: must be positive");
        if (layers[n].kind == Material::dielectric)
            need(layers[n].eps > 0, p + ".eps: dielectric layers need a positive eps");
        const double cells = layers[n].thickness / dz;
        need(std::abs(cells - std::round(cells)) <= 1e-9 * std::max(1.0, cells) && std::round(cells) >= 1,
             p + ".thickness: not a multiple of grid.dz");
    }
    need(nz() >= 4, "layers: total thickness must span at least 4 cells");
    try {
        fe.validate();
        sc.validate();
        mg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (pol_bc.kind == PolarizationBC::Kind::surface_effect)
        need(pol_bc.lambda > 0, "tdgl.lambda: must be positive");
    need(dt > 0, "time.dt: must be positive");
    need(temporal_order == 1 || temporal_order == 2, "time.order: must be 1 or 2");
    need(fixed_steps >= 0, "time.steps: must be >= 0");
    need(poisson_tol > 0 && poisson_tol < 1, "poisson.tol: must lie in (0, 1)");
    need(fixedpoint_tol > 0 && fixedpoint_tol < 1, "coupling.tol: must lie in (0, 1)");
    need(fixedpoint_max_iters >= 1, "coupling.max_iters: must be >= 1");
    need(init.amplitude >= 0, "init.amplitude: must be >= 0");
    need(init.stripe_period > 0, "init.stripe_period: must be positive");
    need(init.bump.sigma1 > 0 && init.bump.sigma2 > 0, "init.sigma1/sigma2: must be positive");
    if (sweep.waveform == Waveform::triangular) {
        need(sweep.vmax > 0, "sweep.vmax: must be positive");
        need(sweep.points_per_quarter >= 2, "sweep.points_per_quarter: must be >= 2");
    }
    if (sweep.waveform == Waveform::list) need(!sweep.values.empty(), "sweep.values: empty list");
    need(sweep.cycles >= 1, "sweep.cycles: must be >= 1");
    need(sweep.settle.rel_change_tol > 0, "settle.rel_change_tol: must be positive");
    need(sweep.settle.consecutive_steps >= 1, "settle.consecutive_steps: must be >= 1");
    need(sweep.settle.max_steps >= 1, "settle.max_steps: must be >= 1");
    need(output.record_every >= 0, "output.record_every: must be >= 0");
}

SimConfig parse_config(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (!kv.emplace(key, value).second) throw ConfigError(key + ": duplicate key");
    }

    SimConfig c;
    for (const Key& k : keys()) {
        auto it = kv.find(k.name);
        if (it == kv.end()) continue;
        k.set(c, k.name, it->second);
        kv.erase(it);
    }

    auto take = [&](const std::string& key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };

    const auto count = take("layers.count");
    if (!count) throw ConfigError("layers.count: missing required key");
    const int n_layers = to_int("layers.count", *count);
    if (n_layers < 1) throw ConfigError("layers.count: must be >= 1");
    for (int n = 0; n < n_layers; ++n) {
        const std::string p = "layers." + std::to_string(n);
        LayerConfig L;
        const auto kind = take(p + ".kind");
        if (!kind) throw ConfigError(p + ".kind: missing required key");
        L.kind = to_enum(p + ".kind", *kind, kMaterials);
        const auto t = take(p + ".thickness");
        if (!t) throw ConfigError(p + ".thickness: missing required key");
        L.thickness = to_double(p + ".thickness", *t);
        const auto e = take(p + ".eps");
        if (L.kind == Material::dielectric) {
            if (!e) throw ConfigError(p + ".eps: missing required key for a dielectric layer");
            L.eps = to_double(p + ".eps", *e);
        } else if (e) {
            throw ConfigError(p + ".eps: only dielectric layers take eps (use fe.eps / sc.eps)");
        }
        c.layers.push_back(L);
    }

    const auto lambda = take("tdgl.lambda");
    if (lambda) {
        if (c.pol_bc.kind != PolarizationBC::Kind::surface_effect)
            throw ConfigError("tdgl.lambda: only valid with tdgl.pol_bc = surface_effect");
        c.pol_bc.lambda = to_double("tdgl.lambda", *lambda);
    }
    if (c.pol_bc.kind != PolarizationBC::Kind::surface_effect) c.pol_bc.lambda = 0.0;

    const auto nc = take("sc.Nc");
    const auto nv = take("sc.Nv");
    c.sc.Nc = nc ? to_double("sc.Nc", *nc) : effective_dos(c.sc.me_eff, c.sc.T);
    c.sc.Nv = nv ? to_double("sc.Nv", *nv) : effective_dos(c.sc.mp_eff, c.sc.T);

    if (!kv.empty()) throw ConfigError(kv.begin()->first + ": unknown key");
    c.validate();
    return c;
}

SimConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const SimConfig& c) {
    std::string out;
    auto put = [&](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
    for (const Key& k : keys()) {
        if (k.name == "sweep.values" && c.sweep.values.empty()) continue;
        if (k.name == "output.snapshot_vapp" && c.output.snapshot_vapp.empty()) continue;
        put(k.name, k.get(c));
        if (k.name == "sc.Ev") {
            put("sc.Nc", fmt(c.sc.Nc));
            put("sc.Nv", fmt(c.sc.Nv));
        }
        if (k.name == "tdgl.pol_bc" && c.pol_bc.kind == PolarizationBC::Kind::surface_effect)
            put("tdgl.lambda", fmt(c.pol_bc.lambda));
    }
    put("layers.count", std::to_string(c.layers.size()));
    for (std::size_t n = 0; n < c.layers.size(); ++n) {
        const std::string p = "layers." + std::to_string(n);
        put(p + ".kind", enum_str(c.layers[n].kind, kMaterials));
        put(p + ".thickness", fmt(c.layers[n].thickness));
        if (c.layers[n].kind == Material::dielectric) put(p + ".eps", fmt(c.layers[n].eps));
    }
    return out;
}

namespace {
int cells(double lateral, double dx) { return int(std::lround(lateral / dx)); }
}  // namespace

SimConfig mfim_config(double lateral) {
    SimConfig c;
    c.nx = c.ny = cells(lateral, c.dx);
    c.layers = {{Material::dielectric, 4e-9, 10.0}, {Material::ferroelectric, 5e-9, 0.0}};
    return c;
}

SimConfig mfism_config(double lateral) {
    SimConfig c;
    c.nx = c.ny = cells(lateral, c.dx);
    c.layers = {{Material::semiconductor, 10e-9, 0.0},
                {Material::dielectric, 1e-9, 3.9},
                {Material::ferroelectric, 5e-9, 0.0}};
    return c;
}

SimConfig mfm_config(double lateral) {
    SimConfig c;
    c.nx = c.ny = cells(lateral, c.dx);
    c.layers = {{Material::ferroelectric, 10e-9, 0.0}};
    return c;
}

SimConfig bump_config(int n) {
    SimConfig c;
    const double L = 32e-9;
    c.nx = c.ny = n;
    c.dx = c.dy = c.dz = L / n;
    c.layers = {{Material::semiconductor, 0.25 * L, 0.0},
                {Material::dielectric, 0.25 * L, 3.9},
                {Material::ferroelectric, 0.5 * L, 0.0}};
    c.init.kind = InitKind::gaussian_bump;
    c.sweep.waveform = Waveform::hold;
    c.sweep.v = 0.0;
    return c;
}

}  // namespace ferrodyn
