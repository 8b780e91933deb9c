#include "spinsi/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace spinsi {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

}  // namespace

ConfigFile ConfigFile::parse(const std::string& text) {
    ConfigFile cfg;
    std::istringstream in(text);
    std::string line, section = "";
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error("config line " + std::to_string(lineno) +
                                         ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key");
        cfg.sections_[section][key] = value;
    }
    return cfg;
}

ConfigFile ConfigFile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(key) > 0;
}

std::string ConfigFile::get(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
    auto it = sections_.find(section);
    if (it == sections_.end()) return fallback;
    auto jt = it->second.find(key);
    return jt == it->second.end() ? fallback : jt->second;
}

double ConfigFile::get_double(const std::string& section, const std::string& key,
                              double fallback) const {
    if (!has(section, key)) return fallback;
    try {
        return std::stod(get(section, key));
    } catch (...) {
        throw std::runtime_error("config [" + section + "] " + key + ": not a number");
    }
}

long ConfigFile::get_long(const std::string& section, const std::string& key,
                          long fallback) const {
    if (!has(section, key)) return fallback;
    try {
        return std::stol(get(section, key));
    } catch (...) {
        throw std::runtime_error("config [" + section + "] " + key + ": not an integer");
    }
}

std::vector<std::string> ConfigFile::get_list(const std::string& section,
                                              const std::string& key) const {
    std::string raw = get(section, key);
    if (raw.empty()) return {};
    if (raw.front() == '[' && raw.back() == ']') raw = raw.substr(1, raw.size() - 2);
    raw = trim(raw);
    if (raw.empty()) return {};
    return split(raw, ',');
}

ExperimentConfig ExperimentConfig::from_file(const ConfigFile& cfg) {
    ExperimentConfig ec;
    ec.model_kind = cfg.get("model", "kind", ec.model_kind);
    if (ec.model_kind == "ising")
        ec.param = cfg.get_double("model", "beta", 0.0);
    else if (ec.model_kind == "potts")
        ec.param = cfg.get_double("model", "beta", 0.0);
    else if (ec.model_kind == "hardcore")
        ec.param = cfg.get_double("model", "lambda", 1.0);
    else
        throw std::runtime_error("config [model] kind: unknown \"" + ec.model_kind + "\"");
    ec.q = static_cast<int>(cfg.get_long("model", "q", ec.model_kind == "potts" ? 3 : 2));
    for (const auto& item : cfg.get_list("model", "field")) {
        auto parts = split(item, ':');
        if (parts.size() != 3)
            throw std::runtime_error("config [model] field: expected v:s:value entries");
        ec.field_overrides.emplace_back(std::stoi(parts[0]), std::stoi(parts[1]),
                                        std::stod(parts[2]));
    }
    for (const auto& item : cfg.get_list("model", "boundary")) {
        auto parts = split(item, ':');
        if (parts.size() != 2)
            throw std::runtime_error("config [model] boundary: expected v:s entries");
        ec.boundary.emplace_back(std::stoi(parts[0]), std::stoi(parts[1]));
    }
    if (cfg.has("graph", "file")) {
        ec.graph_spec = cfg.get("graph", "file");
    } else if (cfg.has("graph", "kind")) {
        std::string kind = cfg.get("graph", "kind");
        if (kind == "grid") {
            std::string dims;
            for (const auto& d : cfg.get_list("graph", "dims")) {
                if (!dims.empty()) dims += "x";
                dims += d;
            }
            ec.graph_spec = "grid:" + dims;
        } else if (kind == "gnp") {
            ec.graph_spec = "gnp:" + cfg.get("graph", "n", "16") + ":" +
                            cfg.get("graph", "p", "0.1") + ":" + cfg.get("graph", "seed", "1");
        } else if (kind == "edge") {
            ec.graph_spec = "edge";
        } else {
            ec.graph_spec = kind + ":" + cfg.get("graph", "n", "4");
        }
    }
    ec.seed = static_cast<uint64_t>(cfg.get_long("run", "seed", 1));
    ec.threads = static_cast<int>(cfg.get_long("run", "threads", 1));
    ec.cap_states = static_cast<uint64_t>(
        cfg.get_long("run", "cap_states", static_cast<long>(kDefaultStateCap)));
    if (ec.cap_states == 0) throw std::runtime_error("config [run] cap_states: must be positive");
    ec.steps = cfg.get_long("run", "steps", ec.steps);
    ec.replicas = cfg.get_long("run", "replicas", ec.replicas);
    ec.trials = cfg.get_long("run", "trials", ec.trials);
    ec.eps = cfg.get_double("run", "eps", ec.eps);
    ec.theta = cfg.get_double("run", "theta", ec.theta);
    ec.block_radius = static_cast<int>(cfg.get_long("run", "L", ec.block_radius));
    ec.out_dir = cfg.get("run", "out", "");
    ec.dynamics = cfg.get("dynamics", "kind", ec.dynamics);
    ec.order_file = cfg.get("dynamics", "order_file", "");
    ec.blocks_file = cfg.get("dynamics", "blocks_file", "");
    return ec;
}

Graph build_graph_spec(const std::string& spec) {
    {
        std::ifstream probe(spec);
        if (probe.good()) return read_graph_file(spec);
    }
    auto parts = split(spec, ':');
    const std::string& kind = parts[0];
    if (kind == "edge") return single_edge_graph();
    if (kind == "path") return path_graph(std::stoi(parts.at(1)));
    if (kind == "cycle") return cycle_graph(std::stoi(parts.at(1)));
    if (kind == "triangle") return cycle_graph(3);
    if (kind == "complete") return complete_graph(std::stoi(parts.at(1)));
    if (kind == "grid") {
        std::vector<int> dims;
        for (const auto& d : split(parts.at(1), 'x')) dims.push_back(std::stoi(d));
        return grid_graph(dims);
    }
    if (kind == "gnp") {
        int n = std::stoi(parts.at(1));
        double p = std::stod(parts.at(2));
        Rng rng(parts.size() > 3 ? std::stoull(parts[3]) : 1);
        return random_gnp(n, p, rng);
    }
    throw std::runtime_error("unknown graph spec \"" + spec + "\" (not a file either)");
}

SpinSystem build_model(const ExperimentConfig& cfg, std::shared_ptr<const Graph> g) {
    SpinSystem sys = make_model(cfg.model_kind, std::move(g), cfg.param, cfg.q);
    for (auto [v, s, val] : cfg.field_overrides) {
        if (v < 0 || v >= sys.n() || s < 0 || s >= sys.q)
            throw std::runtime_error("field override out of range");
        sys.U[v][s] += val;
        sys.kind = ModelKind::Custom;
    }
    if (!cfg.boundary.empty()) {
        Pinning tau;
        for (auto [v, s] : cfg.boundary) tau.set(v, s);
        sys = condition(sys, tau);
    }
    return sys;
}

ScanOrder read_order_file(const std::string& path, int n) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open order file: " + path);
    ScanOrder phi;
    int v;
    while (in >> v) phi.order.push_back(v);
    if (!phi.valid(n)) throw std::runtime_error("order file is not a permutation of [0,n)");
    return phi;
}

BlockSpec read_blocks_file(const std::string& path, int n) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open blocks file: " + path);
    // each line: weight v1 v2 ... ; weights renormalized to sum to 1
    BlockSpec spec;
    std::string line;
    double total = 0.0;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        double w;
        if (!(ls >> w)) throw std::runtime_error("blocks file: bad weight in line: " + line);
        std::vector<int> verts;
        int v;
        while (ls >> v) verts.push_back(v);
        if (verts.empty()) throw std::runtime_error("blocks file: empty block");
        spec.blocks.push_back(verts);
        spec.weights.push_back(w);
        total += w;
    }
    for (double& w : spec.weights) w /= total;
    spec.validate(n);
    return spec;
}

}  // namespace spinsi
