#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spinsi/dynamics.hpp"
#include "spinsi/spin.hpp"

namespace spinsi {

// Plain sectioned text config: [section] headers, key = value lines, lists in
// brackets, # comments. Values keep their raw text; typed getters parse.
class ConfigFile {
  public:
    static ConfigFile parse(const std::string& text);
    static ConfigFile load(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback = "") const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    long get_long(const std::string& section, const std::string& key, long fallback) const;
    std::vector<std::string> get_list(const std::string& section, const std::string& key) const;

    const std::map<std::string, std::map<std::string, std::string>>& sections() const {
        return sections_;
    }

  private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

struct ExperimentConfig {
    // model
    std::string model_kind = "ising";  // ising | potts | hardcore
    double param = 0.0;
    int q = 2;
    std::vector<std::tuple<int, int, double>> field_overrides;  // (vertex, spin, value)
    std::vector<std::pair<int, int>> boundary;                  // (vertex, spin)
    // graph
    std::string graph_spec = "edge";  // generator string or file path
    // run
    uint64_t seed = 1;
    int threads = 1;
    uint64_t cap_states = kDefaultStateCap;
    long steps = 100;
    long replicas = 100;
    long trials = 10000;
    double eps = 0.25;
    double theta = 0.0625;
    int block_radius = 2;  // L for rectangle blocks
    std::string out_dir;
    std::string order_file;
    std::string blocks_file;
    std::string dynamics = "glauber";

    static ExperimentConfig from_file(const ConfigFile& cfg);
};

// "path:8", "cycle:4", "grid:3x3", "complete:5", "gnp:64:0.05:7", "edge",
// or a file path in the "n m / u v" text format.
Graph build_graph_spec(const std::string& spec);

// "ising:0.3", "potts:3:0.5", "hardcore:1.0" or via config fields.
SpinSystem build_model(const ExperimentConfig& cfg, std::shared_ptr<const Graph> g);

ScanOrder read_order_file(const std::string& path, int n);
BlockSpec read_blocks_file(const std::string& path, int n);

}  // namespace spinsi
