#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "spinsi/accept.hpp"
#include "spinsi/config.hpp"
#include "spinsi/coupling.hpp"
#include "spinsi/exact.hpp"
#include "spinsi/spectral.hpp"

using nlohmann::json;
using namespace spinsi;

namespace {

bool g_literal_evenodd = false;

struct GlobalOpts {
    std::string config_path;
    std::string model = "";
    std::string graph = "";
    uint64_t seed = 1;
    int threads = 1;
    long cap_states = static_cast<long>(kDefaultStateCap);
    std::string out_dir;
};

ExperimentConfig resolve_config(const GlobalOpts& opts) {
    ExperimentConfig ec;
    if (!opts.config_path.empty()) ec = ExperimentConfig::from_file(ConfigFile::load(opts.config_path));
    if (!opts.model.empty()) {
        auto colon = opts.model.find(':');
        std::string kind = opts.model.substr(0, colon);
        ec.model_kind = kind;
        if (kind == "potts") {
            auto rest = opts.model.substr(colon + 1);
            auto colon2 = rest.find(':');
            ec.q = std::stoi(rest.substr(0, colon2));
            ec.param = std::stod(rest.substr(colon2 + 1));
        } else if (colon != std::string::npos) {
            ec.param = std::stod(opts.model.substr(colon + 1));
            ec.q = 2;
        }
    }
    if (!opts.graph.empty()) ec.graph_spec = opts.graph;
    if (const char* env = std::getenv("SEED")) ec.seed = std::stoull(env);
    if (opts.seed != 1) ec.seed = opts.seed;
    if (opts.threads != 1) ec.threads = opts.threads;
    if (opts.cap_states != static_cast<long>(kDefaultStateCap))
        ec.cap_states = static_cast<uint64_t>(opts.cap_states);
    if (!opts.out_dir.empty()) ec.out_dir = opts.out_dir;
    return ec;
}

json config_echo(const ExperimentConfig& ec) {
    json j;
    j["model"] = {{"kind", ec.model_kind}, {"param", ec.param}, {"q", ec.q}};
    j["graph"] = ec.graph_spec;
    j["seed"] = ec.seed;
    j["threads"] = ec.threads;
    j["cap_states"] = ec.cap_states;
    return j;
}

void emit_report(const ExperimentConfig& ec, const std::string& name, json& report) {
    report["config"] = config_echo(ec);
    report["version"] = kVersion;
    if (!ec.out_dir.empty()) {
        std::filesystem::create_directories(ec.out_dir);
        std::ofstream out(ec.out_dir + "/report.json");
        out << report.dump(2) << "\n";
        std::cout << name << ": report written to " << ec.out_dir << "/report.json\n";
    }
    std::cout << report.dump(2) << std::endl;
}

TransitionMatrix build_kernel(const std::string& kernel, const SpinSystem& sys,
                              const GibbsTable& tbl, const ExperimentConfig& ec) {
    if (kernel == "glauber") return induced_glauber(tbl);
    if (kernel == "scan") {
        ScanOrder phi = ec.order_file.empty() ? ScanOrder::identity(sys.n())
                                              : read_order_file(ec.order_file, sys.n());
        return induced_scan(tbl, phi);
    }
    if (kernel == "scan-oneway") {
        ScanOrder phi = ec.order_file.empty() ? ScanOrder::identity(sys.n())
                                              : read_order_file(ec.order_file, sys.n());
        return induced_scan_oneway(tbl, phi);
    }
    if (kernel == "evenodd") {
        std::vector<int> side;
        if (!is_bipartite(*sys.graph, &side))
            throw std::runtime_error("evenodd kernel requires a bipartite graph");
        std::vector<int> evens, odds;
        for (int v = 0; v < sys.n(); ++v) (side[v] == 0 ? evens : odds).push_back(v);
        return induced_even_odd(tbl, *sys.graph, evens, odds);
    }
    if (kernel == "block") {
        BlockSpec spec = ec.blocks_file.empty()
                             ? BlockSpec::from_partition(greedy_independent_partition(*sys.graph))
                             : read_blocks_file(ec.blocks_file, sys.n());
        return induced_block(tbl, spec);
    }
    if (kernel == "sw") return induced_sw(tbl, sys);
    throw std::runtime_error("unknown kernel \"" + kernel + "\"");
}

int cmd_sample(const ExperimentConfig& ec) {
    auto g = std::make_shared<Graph>(build_graph_spec(ec.graph_spec));
    SpinSystem sys = build_model(ec, g);
    Rng root(ec.seed);
    for (long r = 0; r < ec.replicas; ++r) {
        Rng rng = root.split(static_cast<uint64_t>(r));
        ChainState st = random_state(sys, rng);
        double energy_sum = 0.0;
        for (long t = 0; t < ec.steps; ++t) {
            if (ec.dynamics == "glauber") {
                st = glauber_step(sys, st, rng);
            } else if (ec.dynamics == "scan") {
                ScanOrder phi = ec.order_file.empty() ? ScanOrder::identity(sys.n())
                                                      : read_order_file(ec.order_file, sys.n());
                st = scan_step(sys, st, phi, rng);
            } else if (ec.dynamics == "scan-oneway") {
                ScanOrder phi = ec.order_file.empty() ? ScanOrder::identity(sys.n())
                                                      : read_order_file(ec.order_file, sys.n());
                st = scan_step_oneway(sys, st, phi, rng);
            } else if (ec.dynamics == "evenodd") {
                std::vector<int> side;
                if (!is_bipartite(*sys.graph, &side))
                    throw std::runtime_error("evenodd dynamics requires a bipartite graph");
                std::vector<int> evens, odds;
                for (int v = 0; v < sys.n(); ++v) (side[v] == 0 ? evens : odds).push_back(v);
                st = even_odd_scan_step(sys, st, evens, odds, rng, g_literal_evenodd);
            } else if (ec.dynamics == "block") {
                BlockSpec spec =
                    ec.blocks_file.empty()
                        ? BlockSpec::from_partition(greedy_independent_partition(*sys.graph))
                        : read_blocks_file(ec.blocks_file, sys.n());
                st = block_step(sys, st, spec, rng);
            } else if (ec.dynamics == "sw") {
                st = sw_step(sys, st, rng);
            } else {
                throw std::runtime_error("unknown dynamics \"" + ec.dynamics + "\"");
            }
            energy_sum += sys.hamiltonian(st.config);
        }
        json line;
        line["replica"] = r;
        line["steps"] = ec.steps;
        line["dynamics"] = ec.dynamics;
        line["final_energy"] = sys.hamiltonian(st.config);
        line["mean_energy"] = energy_sum / std::max<long>(ec.steps, 1);
        if (sys.n() <= 64) {
            std::string cfg;
            for (uint8_t s : st.config) cfg += std::to_string(static_cast<int>(s));
            line["final_config"] = cfg;
        }
        std::cout << line.dump() << "\n";
    }
    return 0;
}

int cmd_factorize(const ExperimentConfig& ec, const std::string& scheme, int ell, int num_f);

int cmd_exact(const ExperimentConfig& ec, const std::string& kernel, const std::string& check,
              const std::string& kernel2, const std::string& scheme) {
    if (check == "factorize") return cmd_factorize(ec, scheme, 0, 200);
    auto g = std::make_shared<Graph>(build_graph_spec(ec.graph_spec));
    SpinSystem sys = build_model(ec, g);
    GibbsTable tbl = exact_gibbs(sys, ec.cap_states);
    TransitionMatrix tm = build_kernel(kernel, sys, tbl, ec);
    json rep;
    rep["kernel"] = kernel;
    rep["check"] = check;
    rep["states"] = tbl.size();
    bool pass = true;
    if (check == "stationarity") {
        double r = stationarity_residual(tm);
        rep["stationarity_residual"] = r;
        pass = r < 1e-10;
    } else if (check == "reversibility") {
        double r = reversibility_residual(tm);
        rep["reversibility_residual"] = r;
        pass = r < 1e-10;
    } else if (check == "gap") {
        rep["spectral_gap"] = spectral_gap(tm);
    } else if (check == "tmix") {
        long t = tv_mixing_time(tm, ec.eps);
        rep["eps"] = ec.eps;
        rep["tv_mixing_time"] = t;
        double gap = spectral_gap(tm);
        double mu_min = *std::min_element(tm.table.probs.begin(), tm.table.probs.end());
        rep["gap_upper_bound"] = std::log(1.0 / (ec.eps * mu_min)) / gap;
        pass = t <= rep["gap_upper_bound"].get<double>() + 1;
    } else if (check == "mlsi") {
        Rng rng(ec.seed);
        MlsiEstimate est = mlsi_estimate(tm, static_cast<int>(ec.trials), rng);
        rep["witness"] = est.witness;
        rep["bracket_lo"] = est.bracket_lo;
        rep["bracket_hi"] = est.bracket_hi;
        rep["gap"] = est.gap;
        rep["mu_min"] = est.mu_min;
        pass = est.degenerate ||
               (est.witness >= est.bracket_lo - 1e-9 && est.witness <= est.bracket_hi + 1e-9);
    } else if (check == "censor") {
        TransitionMatrix other = build_kernel(kernel2, sys, tbl, ec);
        SpinOrder order = SpinOrder::natural(sys.n(), sys.q);
        bool le = censoring_order_check(tm, other, order);
        rep["kernel2"] = kernel2;
        rep["ordered"] = le;
        pass = le;
    } else {
        throw std::runtime_error("unknown check \"" + check + "\"");
    }
    rep["pass"] = pass;
    emit_report(ec, "exact", rep);
    return pass ? 0 : 1;
}

int cmd_eta(const ExperimentConfig& ec, int max_pinned, const std::string& what) {
    auto g = std::make_shared<Graph>(build_graph_spec(ec.graph_spec));
    SpinSystem sys = build_model(ec, g);
    json rep;
    rep["report"] = what;
    if (what == "eta") {
        EtaResult er = eta(sys, max_pinned, ec.cap_states);
        rep["eta"] = er.eta;
        rep["pinnings_checked"] = er.pinnings_checked;
        json w = json::object();
        for (auto [v, s] : er.witness.assign) w[std::to_string(v)] = s;
        rep["witness_pinning"] = w;
    } else if (what == "dobrushin") {
        DobrushinMatrix dob = dobrushin_matrix(sys, ec.cap_states);
        rep["spectral_norm"] = spectral_norm(dob.entries);
        rep["max_row_sum"] = max_row_sum(dob.entries);
        std::vector<std::vector<double>> rows(sys.n(), std::vector<double>(sys.n()));
        for (int i = 0; i < sys.n(); ++i)
            for (int j = 0; j < sys.n(); ++j) rows[i][j] = dob.entries(i, j);
        rep["entries"] = rows;
    } else if (what == "localwalk") {
        GibbsTable tbl = exact_gibbs(sys, ec.cap_states);
        Pinning empty;
        LocalWalk walk = local_random_walk(tbl, empty);
        InfluenceMatrix infl = influence_matrix(tbl, empty);
        rep["lambda1_influence"] = top_eigenvalue(infl.psi);
        rep["lambda2_walk"] = walk_lambda2(walk);
        rep["identity_residual"] = std::abs(top_eigenvalue(infl.psi) -
                                            (walk.free_count - 1) * walk_lambda2(walk));
        rep["reversibility_residual"] = walk_reversibility_residual(walk);
        if (static_cast<int>(walk.index.size()) <= 20) rep["conductance"] = conductance(walk);
    } else if (what == "bounds") {
        EtaResult er = eta(sys, max_pinned, ec.cap_states);
        MarginalBound mb = marginal_lower_bound(sys, ec.cap_states);
        ReferenceBounds rb = reference_bounds(er.eta, mb.b, sys.graph->max_degree, sys.n(),
                                              ec.theta > 0 ? ec.theta : 0.5);
        rep["eta"] = er.eta;
        rep["b"] = mb.b;
        rep["glauber_gap_lower"] = rb.glauber_gap_lower;
        rep["c_ubf"] = rb.c_ubf;
        rep["c_kpf_logn"] = rb.c_kpf_logn;
        rep["c_kpf_delta"] = rb.c_kpf_delta;
        rep["kappa"] = rb.kappa;
        rep["kpf_reference_flagged"] = rb.kpf_flagged;
    } else {
        throw std::runtime_error("unknown eta report \"" + what + "\"");
    }
    emit_report(ec, "eta", rep);
    return 0;
}

int cmd_mix(const ExperimentConfig& ec, const std::string& kernel) {
    auto g = std::make_shared<Graph>(build_graph_spec(ec.graph_spec));
    SpinSystem sys = build_model(ec, g);
    GibbsTable tbl = exact_gibbs(sys, ec.cap_states);
    TransitionMatrix tm = build_kernel(kernel, sys, tbl, ec);
    json rep;
    rep["kernel"] = kernel;
    rep["eps"] = ec.eps;
    rep["tv_mixing_time"] = tv_mixing_time(tm, ec.eps);
    rep["spectral_gap"] = spectral_gap(tm);
    double mu_min = *std::min_element(tm.table.probs.begin(), tm.table.probs.end());
    rep["mu_min"] = mu_min;
    rep["gap_route_upper"] = std::log(1.0 / (ec.eps * mu_min)) / spectral_gap(tm);
    emit_report(ec, "mix", rep);
    return 0;
}

int cmd_factorize(const ExperimentConfig& ec, const std::string& scheme, int ell, int num_f) {
    auto g = std::make_shared<Graph>(build_graph_spec(ec.graph_spec));
    SpinSystem sys = build_model(ec, g);
    GibbsTable tbl = exact_gibbs(sys, ec.cap_states);
    double b = marginal_lower_bound(sys, ec.cap_states).b;
    double eta_val = eta(sys, -1, ec.cap_states).eta;
    auto part = greedy_independent_partition(*sys.graph);
    ReferenceBounds rb =
        reference_bounds(eta_val, b, sys.graph->max_degree, sys.n(), 0.5);
    Rng rng(ec.seed);
    json rep;
    rep["scheme"] = scheme;
    rep["eta"] = eta_val;
    rep["b"] = b;
    double max_ratio = 0.0;
    bool all_hold = true;
    double reference = 0.0;
    bool flagged = false;
    for (int t = 0; t < num_f; ++t) {
        std::vector<double> f(tbl.size());
        for (double& v : f) v = rng.exponential() + 1e-12;
        FactorizationReport fr;
        if (scheme == "at") {
            fr = factorization_at(tbl, f, bound_c_ubf(1.0 / sys.n(), eta_val, b));
        } else if (scheme == "ubf") {
            int l = ell > 0 ? ell : (sys.n() + 1) / 2;
            fr = factorization_ubf(tbl, f, l,
                                   bound_c_ubf(static_cast<double>(l) / sys.n(), eta_val, b));
        } else if (scheme == "kpf") {
            fr = factorization_kpf(tbl, f, part.classes, rb.c_kpf_logn);
        } else if (scheme == "gbf") {
            fr = factorization_gbf(tbl, f, BlockSpec::from_partition(part),
                                   part.k() * rb.c_kpf_logn);
        } else if (scheme == "edge-spin") {
            JointTable joint = exact_edwards_sokal(sys);
            std::vector<double> jf(joint.size());
            for (double& v : jf) v = rng.exponential() + 1e-12;
            double es_ref = sys.param * sys.graph->max_degree * part.k() *
                            std::exp(sys.param * sys.graph->max_degree) * rb.c_kpf_logn;
            fr = factorization_edge_spin(joint, jf, es_ref);
        } else {
            throw std::runtime_error("unknown scheme \"" + scheme + "\"");
        }
        if (fr.ratio_defined) max_ratio = std::max(max_ratio, fr.ratio);
        all_hold = all_hold && fr.holds;
        reference = fr.reference_constant;
        flagged = fr.reference_flagged;
    }
    rep["functions_tested"] = num_f;
    rep["max_ratio"] = max_ratio;
    rep["reference_constant"] = reference;
    rep["reference_flagged"] = flagged;
    rep["holds"] = all_hold;
    emit_report(ec, "factorize", rep);
    return all_hold ? 0 : 1;
}

int cmd_couple(const ExperimentConfig& ec, const std::string& experiment) {
    auto g = std::make_shared<Graph>(build_graph_spec(ec.graph_spec));
    json rep;
    rep["experiment"] = experiment;
    Rng rng(ec.seed);
    if (experiment == "tail") {
        TailHistogram hist =
            component_tail(*g, ec.theta, g->n / 2, ec.trials, rng, ec.threads);
        rep["theta"] = ec.theta;
        rep["ell"] = hist.ell;
        rep["trials"] = hist.trials;
        json rows = json::array();
        bool ok = true;
        std::string csv = "k,count,phat,bound\n";
        for (int k = 0; k < static_cast<int>(hist.counts.size()); ++k) {
            if (hist.counts[k] == 0 && k > 0) continue;
            double phat = static_cast<double>(hist.counts[k]) / hist.trials;
            double bound = k >= 1 ? hist.bound_curve[k] : 1.0;
            double sigma =
                std::sqrt(std::max(phat * (1 - phat), 0.0) / hist.trials) + 1.0 / hist.trials;
            if (k >= 1 && phat > bound + 4 * sigma) ok = false;
            rows.push_back({{"k", k}, {"count", hist.counts[k]}, {"phat", phat}, {"bound", bound}});
            csv += std::to_string(k) + "," + std::to_string(hist.counts[k]) + "," +
                   std::to_string(phat) + "," + std::to_string(bound) + "\n";
        }
        rep["slices"] = rows;
        rep["within_bound"] = ok;
        if (!ec.out_dir.empty()) {
            std::filesystem::create_directories(ec.out_dir);
            std::ofstream(ec.out_dir + "/tail.csv") << csv;
        }
        emit_report(ec, "couple", rep);
        return ok ? 0 : 1;
    }
    SpinSystem sys = build_model(ec, g);
    if (experiment == "time") {
        SpinOrder order = SpinOrder::natural(sys.n(), sys.q);
        if (!is_heat_bath_monotone(sys, order))
            throw std::runtime_error("coupling time requires a monotone system");
        std::vector<int> side;
        CouplingKernel kernel = CouplingKernel::scan(ScanOrder::identity(sys.n()));
        if (ec.dynamics == "evenodd") {
            if (!is_bipartite(*sys.graph, &side))
                throw std::runtime_error("evenodd coupling requires a bipartite graph");
            std::vector<int> evens, odds;
            for (int v = 0; v < sys.n(); ++v) (side[v] == 0 ? evens : odds).push_back(v);
            kernel = CouplingKernel::even_odd(evens, odds);
        } else if (ec.dynamics == "glauber") {
            kernel = CouplingKernel::glauber();
        }
        auto ct = coupling_time(sys, kernel, order, static_cast<int>(ec.replicas), 0.75, rng,
                                100000, ec.threads);
        rep["dynamics"] = ec.dynamics;
        rep["quantile"] = ct.quantile;
        rep["quantile_step"] = ct.quantile_step;
        rep["censored"] = ct.censored;
        rep["bootstrap_ci"] = {ct.bootstrap_ci.first, ct.bootstrap_ci.second};
        if (!ec.out_dir.empty()) {
            std::filesystem::create_directories(ec.out_dir);
            std::ofstream csv(ec.out_dir + "/coupling_times.csv");
            csv << "replica,time\n";
            for (size_t i = 0; i < ct.times.size(); ++i) csv << i << "," << ct.times[i] << "\n";
        }
        emit_report(ec, "couple", rep);
        return 0;
    }
    if (experiment == "radius") {
        std::vector<int> side;
        if (!is_bipartite(*sys.graph, &side))
            throw std::runtime_error("radius experiment requires a bipartite graph");
        std::vector<int> evens, odds;
        for (int v = 0; v < sys.n(); ++v) (side[v] == 0 ? evens : odds).push_back(v);
        auto rr = disagreement_radius(sys, evens, odds, static_cast<int>(ec.steps),
                                      static_cast<int>(ec.trials), rng, -1, ec.threads);
        rep["max_radius_by_step"] = rr.max_radius_by_step;
        rep["within_three_per_step"] = rr.within_three_per_step;
        if (!ec.out_dir.empty()) {
            std::filesystem::create_directories(ec.out_dir);
            std::ofstream csv(ec.out_dir + "/radius.csv");
            csv << "step,max_radius,bound\n";
            for (size_t t = 1; t < rr.max_radius_by_step.size(); ++t)
                csv << t << "," << rr.max_radius_by_step[t] << "," << 3 * t << "\n";
        }
        emit_report(ec, "couple", rep);
        return rr.within_three_per_step ? 0 : 1;
    }
    if (experiment == "ssm") {
        auto est = rectangle_block_contraction(sys, ec.block_radius, ec.trials, rng, -1,
                                               ec.threads);
        rep["mean_hamming_after_step"] = est.mean;
        rep["std_error"] = est.std_error;
        rep["upper95"] = est.mean + 1.96 * est.std_error;
        rep["cases"] = {{"in_block", est.count_in_block},
                        {"boundary", est.count_boundary},
                        {"far", est.count_far}};
        rep["case_means"] = {{"in_block", est.mean_in_block},
                             {"boundary", est.mean_boundary},
                             {"far", est.mean_far}};
        rep["r"] = est.r;
        rep["contracts"] = est.mean + 1.96 * est.std_error < 1.0;
        emit_report(ec, "couple", rep);
        return rep["contracts"].get<bool>() ? 0 : 1;
    }
    throw std::runtime_error("unknown experiment \"" + experiment + "\"");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spin-system Gibbs samplers and exact verification toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOpts opts;
    app.add_option("--config", opts.config_path, "config file (sections, key = value)");
    app.add_option("--model", opts.model, "model spec: ising:BETA | potts:Q:BETA | hardcore:LAMBDA");
    app.add_option("--graph", opts.graph, "graph file or generator spec (path:8, grid:3x3, ...)");
    app.add_option("--seed", opts.seed, "root seed");
    app.add_option("--threads", opts.threads, "worker threads");
    app.add_option("--cap-states", opts.cap_states, "state-space cap");
    app.add_option("--out", opts.out_dir, "output directory for report.json / CSVs");

    auto* sample = app.add_subcommand("sample", "run a seeded dynamics sampler");
    std::string dynamics = "glauber";
    long steps = 100, replicas = 1;
    std::string order_file, blocks_file;
    sample->add_option("--dynamics", dynamics, "glauber|scan|scan-oneway|evenodd|block|sw");
    bool literal_evenodd = false;
    sample->add_flag("--literal-evenodd", literal_evenodd, "run the four-sweep even-odd form");
    sample->add_option("--steps", steps, "steps per replica");
    sample->add_option("--replicas", replicas, "replica count");
    sample->add_option("--order", order_file, "scan order file (one index per line)");
    sample->add_option("--blocks", blocks_file, "blocks file (weight v1 v2 ... per line)");

    auto* exact = app.add_subcommand("exact", "exact transition-matrix checks");
    std::string kernel = "glauber", check = "stationarity", kernel2 = "block";
    exact->add_option("--kernel", kernel, "glauber|scan|scan-oneway|evenodd|block|sw");
    exact->add_option("--check", check, "stationarity|reversibility|gap|tmix|mlsi|censor");
    exact->add_option("--kernel2", kernel2, "right-hand kernel for censor");
    std::string exact_scheme = "at";
    exact->add_option("--scheme", exact_scheme, "factorization scheme for --check factorize");
    double eps = 0.25;
    exact->add_option("--eps", eps, "TV accuracy for tmix");

    auto* etacmd = app.add_subcommand("eta", "influence matrices and related bounds");
    int max_pinned = -1;
    std::string eta_report = "eta";
    etacmd->add_option("--max-pinned", max_pinned, "cap on |pinned set|");
    etacmd->add_option("--report", eta_report, "eta|dobrushin|localwalk|bounds");

    auto* mix = app.add_subcommand("mix", "TV mixing time of an exact kernel");
    std::string mix_kernel = "glauber";
    mix->add_option("--kernel", mix_kernel, "kernel");
    double mix_eps = 0.25;
    mix->add_option("--eps", mix_eps, "TV accuracy");

    auto* factorize = app.add_subcommand("factorize", "entropy factorization checks");
    std::string scheme = "at";
    int ell = 0, num_f = 200;
    factorize->add_option("--scheme", scheme, "at|ubf|kpf|gbf|edge-spin");
    factorize->add_option("--ell", ell, "subset size for ubf");
    factorize->add_option("--functions", num_f, "random test functions");

    auto* couple = app.add_subcommand("couple", "coupling experiments");
    std::string experiment = "time";
    double theta = 0.0625;
    long trials = 10000;
    int block_l = 2;
    std::string couple_dynamics = "scan";
    couple->add_option("--experiment", experiment, "time|radius|tail|ssm");
    couple->add_option("--theta", theta, "subset fraction for tail");
    couple->add_option("--trials", trials, "Monte Carlo trials");
    couple->add_option("--L", block_l, "rectangle block radius for ssm");
    couple->add_option("--dynamics", couple_dynamics, "scan|evenodd|glauber (time experiment)");
    long couple_steps = 5, couple_replicas = 200;
    couple->add_option("--steps", couple_steps, "steps for radius experiment");
    couple->add_option("--replicas", couple_replicas, "replicas for time experiment");

    auto* accept = app.add_subcommand("accept", "run the acceptance suite");
    int only = 0;
    accept->add_option("--only", only, "run a single criterion (1-12)");

    CLI11_PARSE(app, argc, argv);

    try {
        ExperimentConfig ec = resolve_config(opts);
        if (sample->parsed()) {
            g_literal_evenodd = literal_evenodd;
            ec.dynamics = dynamics;
            ec.steps = steps;
            ec.replicas = replicas;
            if (!order_file.empty()) ec.order_file = order_file;
            if (!blocks_file.empty()) ec.blocks_file = blocks_file;
            return cmd_sample(ec);
        }
        if (exact->parsed()) {
            ec.eps = eps;
            return cmd_exact(ec, kernel, check, kernel2, exact_scheme);
        }
        if (etacmd->parsed()) return cmd_eta(ec, max_pinned, eta_report);
        if (mix->parsed()) {
            ec.eps = mix_eps;
            return cmd_mix(ec, mix_kernel);
        }
        if (factorize->parsed()) return cmd_factorize(ec, scheme, ell, num_f);
        if (couple->parsed()) {
            ec.theta = theta;
            ec.trials = trials;
            ec.block_radius = block_l;
            ec.steps = couple_steps;
            ec.replicas = couple_replicas;
            ec.dynamics = couple_dynamics;
            return cmd_couple(ec, experiment);
        }
        if (accept->parsed()) {
            AcceptanceReport rep = run_acceptance(ec.seed, ec.threads, std::cout, only);
            std::string out = ec.out_dir.empty() ? "." : ec.out_dir;
            std::filesystem::create_directories(out);
            std::ofstream(out + "/report.json") << acceptance_report_json(rep) << "\n";
            std::cout << (rep.all_passed() ? "ALL CRITERIA PASSED" : "SOME CRITERIA FAILED")
                      << " (report.json written to " << out << ")\n";
            return rep.all_passed() ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
