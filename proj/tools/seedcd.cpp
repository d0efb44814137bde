// seedcd: seed-driven fuzzy community detection and its benchmark harness.
//
// Exit codes: 0 success, 1 input/parse error, 2 nodes cannot reach any seed,
// 3 solver did not converge, 4 infeasible benchmark parameters,
// 5 verify gap too large, 64 usage error.

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "seedcd/detect.hpp"
#include "seedcd/eval.hpp"
#include "seedcd/lfr.hpp"
#include "seedcd/walker.hpp"

namespace {

using namespace seedcd;
using json = nlohmann::json;

enum Exit : int {
    ok = 0,
    parse_failure = 1,
    unreachable = 2,
    no_convergence = 3,
    infeasible = 4,
    gap_violation = 5,
    usage = 64,
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

const char* const formats_help = R"(
Formats:
  edge list      one edge per line, two whitespace-separated node labels;
                 '#' starts a comment line.            e.g.  alice bob
  seed file      'label community affinity' per line, affinity in [0,1],
                 community indices dense from 0; a label may repeat for
                 several communities.                  e.g.  alice 0 1
  ground truth   'label community' per line.           e.g.  17 3
  affinity CSV   node,c0,...,c{l-1}; every node, 9 significant digits.
  crisp CSV      node,community (argmax, ties to the lowest index).
  results CSV    N,avg_k,gamma,beta_exp,mu,sigma,trials,q_mean,q_std,q_min,
                 q_max,seconds_mean (seconds_mean empty unless --timing).
  histogram CSV  bin_lo,bin_hi,freq over equal-width bins on [0,1].
  manifest       JSON next to each output: argv, flags, seed, paths,
                 version, timestamp. 'seedcd replay <manifest>' reruns it.

Exit codes:
  0 ok, 1 parse/input error, 2 nodes cannot reach any seed,
  3 solver did not converge, 4 infeasible benchmark parameters,
  5 verify gap too large, 64 usage error.
)";

std::string timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    std::ostringstream out;
    out << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open '" + path + "'");
    }
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    return out;
}

json option_values(const CLI::App& sub) {
    json flags = json::object();
    for (const CLI::Option* opt : sub.get_options()) {
        const std::string name = opt->get_name(false, true);
        if (name.empty() || name == "--help" || name == "-h") {
            continue;
        }
        if (opt->count() > 0) {
            const auto& r = opt->results();
            flags[name] = r.size() == 1 ? json(r.front()) : json(r);
        } else if (!opt->get_default_str().empty()) {
            flags[name] = opt->get_default_str();
        }
    }
    return flags;
}

void write_manifest(const std::string& path, const CLI::App& sub, const std::vector<std::string>& argv,
                    std::uint64_t rng_seed, const json& inputs, const json& outputs) {
    json m;
    m["tool"] = "seedcd";
    m["version"] = SEEDCD_VERSION;
    m["subcommand"] = sub.get_name();
    m["argv"] = argv;
    m["flags"] = option_values(sub);
    m["rng_seed"] = rng_seed;
    m["inputs"] = inputs;
    m["outputs"] = outputs;
    m["timestamp"] = timestamp();
    auto out = open_out(path);
    out << m.dump(2) << '\n';
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
    LfrParams params;
    std::string out;
};

void add_lfr_flags(CLI::App* sub, LfrParams& p) {
    sub->add_option("--n", p.n, "number of nodes")->capture_default_str();
    sub->add_option("--avg-k", p.avg_k, "target average degree")->capture_default_str();
    sub->add_option("--gamma", p.gamma, "degree power-law exponent")->capture_default_str();
    sub->add_option("--beta-exp", p.beta_exp, "community-size power-law exponent")->capture_default_str();
    sub->add_option("--k-min", p.k_min, "minimum degree (0: calibrated)")->capture_default_str();
    sub->add_option("--k-max", p.k_max, "maximum degree (0: min(3 avg_k, n/10))")->capture_default_str();
    sub->add_option("--s-min", p.s_min, "minimum community size (0: 10)")->capture_default_str();
    sub->add_option("--s-max", p.s_max, "maximum community size (0: n/5)")->capture_default_str();
}

int run_generate(const GenerateArgs& a, const CLI::App& sub, const std::vector<std::string>& argv) {
    PlantedGraph pg = generate(a.params);
    const std::string edges = a.out + ".edges", truth = a.out + ".truth", manifest = a.out + ".manifest.json";
    {
        auto out = open_out(edges);
        write_edge_list(out, pg.graph);
    }
    {
        auto out = open_out(truth);
        write_ground_truth(out, pg);
    }
    json outputs{{"edges", edges}, {"truth", truth}};
    json stats{{"nodes", pg.graph.num_nodes()},
               {"edges", pg.graph.num_edges()},
               {"communities", pg.communities()},
               {"mixing", mixing_fraction(pg)},
               {"dropped_edges", pg.dropped_edges},
               {"k_min", pg.params.k_min},
               {"k_max", pg.params.k_max},
               {"s_min", pg.params.s_min},
               {"s_max", pg.params.s_max}};
    outputs["stats"] = stats;
    write_manifest(manifest, sub, argv, a.params.rng_seed, json::object(), outputs);
    std::cerr << "generated " << pg.graph.num_nodes() << " nodes, " << pg.graph.num_edges() << " edges, "
              << pg.communities() << " communities, mixing " << mixing_fraction(pg) << '\n';
    return ok;
}

// ------------------------------------------------------------------ detect

struct DetectArgs {
    std::string graph, seeds, out, solver = "iterative";
    double tol = default_tolerance;
    std::size_t max_iter = 0;
    std::size_t jobs = 0;
    bool verbose = false;
};

int run_detect(const DetectArgs& a, const CLI::App& sub, const std::vector<std::string>& argv) {
    DetectOptions opts;
    opts.mode = parse_solver_mode(a.solver);
    opts.tolerance = a.tol;
    opts.max_iterations = a.max_iter;
    opts.jobs = a.jobs;

    auto graph_in = open_in(a.graph);
    LoadReport report;
    const Graph g = load_edge_list(graph_in, &report);
    auto seeds_in = open_in(a.seeds);
    const SeedSet seeds = load_seed_file(seeds_in, g);
    if (a.verbose && report.duplicate_edges) {
        std::cerr << "collapsed " << report.duplicate_edges << " duplicate edge(s)\n";
    }

    AffinityMatrix aff;
    try {
        aff = detect_multi(g, seeds, opts);
    } catch (const ReachabilityError& e) {
        std::cerr << "error: " << e.what() << ":\n";
        for (std::size_t v : e.nodes()) {
            std::cerr << "  " << g.label(static_cast<NodeId>(v)) << '\n';
        }
        return unreachable;
    }
    if (a.verbose) {
        for (std::size_t c = 0; c < aff.reports.size(); ++c) {
            std::cerr << "community " << c << ": " << aff.reports[c].iterations << " iterations, relative residual "
                      << aff.reports[c].relative_residual << '\n';
        }
    }

    const std::string affinity = a.out + ".affinity.csv", crisp = a.out + ".crisp.csv";
    {
        auto out = open_out(affinity);
        write_affinity_csv(out, g, aff, seeds);
    }
    {
        auto out = open_out(crisp);
        write_crisp_csv(out, g, crisp_membership(aff, seeds, g.num_nodes()));
    }
    write_manifest(a.out + ".manifest.json", sub, argv, 0, json{{"graph", a.graph}, {"seeds", a.seeds}},
                   json{{"affinity", affinity}, {"crisp", crisp}});
    return ok;
}

// ------------------------------------------------------------------ verify

struct VerifyArgs {
    std::string graph, seeds, node;
    std::uint64_t walks = 100000;
    std::uint64_t rng_seed = 1;
    std::size_t jobs = 0;
};

int run_verify(const VerifyArgs& a) {
    auto graph_in = open_in(a.graph);
    const Graph g = load_edge_list(graph_in);
    auto seeds_in = open_in(a.seeds);
    const SeedSet seeds = load_seed_file(seeds_in, g);
    const auto node = g.find(a.node);
    if (!node) {
        throw UsageError("unknown node '" + a.node + "'");
    }
    if (seeds.contains(*node)) {
        throw UsageError("node '" + a.node + "' is a seed; verify needs a non-seed node");
    }
    if (a.walks == 0) {
        throw UsageError("--walks must be at least 1");
    }

    DetectOptions opts;
    opts.tolerance = 1e-10;
    const AffinityMatrix aff = detect_multi(g, seeds, opts);
    const auto ids = seeds.nodes();
    const AbsorbingChain chain = build_chain(g, ids);
    const WalkStats stats = run_walks(chain, *node, a.walks, a.rng_seed, default_step_cap, a.jobs);
    const std::size_t row = chain.transient_index(*node);

    const double bound = 4.0 * std::sqrt(0.25 / static_cast<double>(a.walks)) + 1e-6;
    bool pass = true;
    std::cout << "community,solver,walker,gap\n";
    for (std::size_t c = 0; c < aff.communities; ++c) {
        const double solved = aff(row, c);
        const double walked = estimate_affinity(stats, chain, seeds, c);
        const double gap = std::abs(solved - walked);
        pass = pass && gap <= bound;
        std::cout << c << ',' << format_affinity(solved) << ',' << format_affinity(walked) << ','
                  << detail::fmt(gap) << '\n';
    }
    std::cerr << (pass ? "PASS" : "FAIL") << ": max allowed gap " << bound << " at " << a.walks << " walks\n";
    return pass ? ok : gap_violation;
}

// ------------------------------------------------------------------- sweep

struct SweepArgs {
    LfrParams base;
    std::vector<double> mu{0.1};
    std::vector<double> sigma{0.1};
    std::size_t trials = 100;
    std::uint64_t rng_seed = 1;
    std::size_t jobs = 0;
    std::string out;
    bool timing = false;
};

int run_sweep_cmd(const SweepArgs& a, const CLI::App& sub, const std::vector<std::string>& argv) {
    if (a.trials == 0) {
        throw UsageError("--trials must be at least 1");
    }
    std::vector<SweepCell> grid;
    for (double mu : a.mu) {
        for (double sigma : a.sigma) {
            SweepCell cell;
            cell.params = a.base;
            cell.params.mu = mu;
            cell.sigma = sigma;
            resolve(cell.params);
            grid.push_back(cell);
        }
    }
    const SweepResult result = run_sweep(grid, a.trials, a.rng_seed, a.jobs);
    for (const auto& t : result.trials) {
        if (!t.ok) {
            std::cerr << "cell " << t.cell << " trial " << t.trial << " failed: " << t.error << '\n';
        }
    }
    {
        auto out = open_out(a.out);
        write_results_csv(out, result.cells, a.timing);
    }
    write_manifest(a.out + ".manifest.json", sub, argv, a.rng_seed, json::object(), json{{"results", a.out}});
    return ok;
}

// --------------------------------------------------------------- histogram

struct HistogramArgs {
    std::string graph, truth, out;
    double sigma = 0.1;
    std::size_t runs = 1000;
    std::size_t bins = 20;
    std::uint64_t rng_seed = 1;
    std::size_t jobs = 0;
};

int run_histogram_cmd(const HistogramArgs& a, const CLI::App& sub, const std::vector<std::string>& argv) {
    if (a.runs == 0 || a.bins == 0) {
        throw UsageError("--runs and --bins must be at least 1");
    }
    auto graph_in = open_in(a.graph);
    const Graph g = load_edge_list(graph_in);
    auto truth_in = open_in(a.truth);
    const auto truth = load_ground_truth(truth_in, g);
    const auto q = resample_quality(g, truth, a.sigma, a.runs, a.rng_seed, a.jobs);
    {
        auto out = open_out(a.out);
        write_histogram_csv(out, histogram(q, a.bins));
    }
    double mean = 0.0;
    for (double v : q) {
        mean += v / static_cast<double>(q.size());
    }
    std::cerr << "mean Q " << mean << " over " << q.size() << " runs\n";
    write_manifest(a.out + ".manifest.json", sub, argv, a.rng_seed, json{{"graph", a.graph}, {"truth", a.truth}},
                   json{{"histogram", a.out}});
    return ok;
}

int run(const std::vector<std::string>& argv);

int run_replay(const std::string& path) {
    auto in = open_in(path);
    json m;
    try {
        m = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError("bad manifest '" + path + "': " + e.what());
    }
    if (!m.contains("argv") || !m["argv"].is_array()) {
        throw ParseError("manifest '" + path + "' has no argv");
    }
    return run(m["argv"].get<std::vector<std::string>>());
}

int run(const std::vector<std::string>& argv) {
    CLI::App app{"Seed-driven fuzzy community detection via absorbing random walks", "seedcd"};
    app.footer(formats_help);
    app.require_subcommand(1);
    app.set_version_flag("--version", SEEDCD_VERSION);

    GenerateArgs gen;
    auto* generate_cmd = app.add_subcommand("generate", "generate a planted-community benchmark graph");
    add_lfr_flags(generate_cmd, gen.params);
    generate_cmd->add_option("--mu", gen.params.mu, "mixing parameter in [0,1]")->capture_default_str();
    generate_cmd->add_option("--rng-seed", gen.params.rng_seed, "random seed")->capture_default_str();
    generate_cmd->add_option("--out", gen.out, "output prefix: <out>.edges, <out>.truth, <out>.manifest.json")
        ->required();

    DetectArgs det;
    auto* detect_cmd = app.add_subcommand("detect", "compute affinities of all non-seed nodes");
    detect_cmd->add_option("--graph", det.graph, "edge list")->required();
    detect_cmd->add_option("--seeds", det.seeds, "seed file")->required();
    detect_cmd->add_option("--out", det.out, "output prefix: <out>.affinity.csv, <out>.crisp.csv")->required();
    detect_cmd->add_option("--solver", det.solver, "iterative or direct")
        ->check(CLI::IsMember({"iterative", "direct"}))
        ->capture_default_str();
    detect_cmd->add_option("--tol", det.tol, "relative residual tolerance")->capture_default_str();
    detect_cmd->add_option("--max-iter", det.max_iter, "iteration cap (0: 10 n + 100)")->capture_default_str();
    detect_cmd->add_option("--jobs", det.jobs, "parallel solves (0: all cores)");
    detect_cmd->add_flag("--verbose", det.verbose, "print solver telemetry");

    VerifyArgs ver;
    auto* verify_cmd = app.add_subcommand("verify", "cross-check one node against random-walk simulation");
    verify_cmd->add_option("--graph", ver.graph, "edge list")->required();
    verify_cmd->add_option("--seeds", ver.seeds, "seed file")->required();
    verify_cmd->add_option("--node", ver.node, "non-seed node label")->required();
    verify_cmd->add_option("--walks", ver.walks, "walks to simulate")->capture_default_str();
    verify_cmd->add_option("--rng-seed", ver.rng_seed, "random seed")->capture_default_str();
    verify_cmd->add_option("--jobs", ver.jobs, "parallel walkers (0: all cores)");

    SweepArgs swp;
    auto* sweep_cmd = app.add_subcommand("sweep", "mean quality over a grid of mixing and seed fractions");
    add_lfr_flags(sweep_cmd, swp.base);
    sweep_cmd->add_option("--mu", swp.mu, "mixing values, comma separated")->delimiter(',')->capture_default_str();
    sweep_cmd->add_option("--sigma", swp.sigma, "seed fractions, comma separated")
        ->delimiter(',')
        ->capture_default_str();
    sweep_cmd->add_option("--trials", swp.trials, "trials per grid cell")->capture_default_str();
    sweep_cmd->add_option("--rng-seed", swp.rng_seed, "random seed")->capture_default_str();
    sweep_cmd->add_option("--jobs", swp.jobs, "parallel trials (0: all cores)");
    sweep_cmd->add_option("--out", swp.out, "results CSV")->required();
    sweep_cmd->add_flag("--timing", swp.timing, "fill seconds_mean (makes output run-dependent)");

    HistogramArgs hist;
    auto* histogram_cmd = app.add_subcommand("histogram", "distribution of quality over seed resamples on one graph");
    histogram_cmd->add_option("--graph", hist.graph, "edge list")->required();
    histogram_cmd->add_option("--truth", hist.truth, "ground-truth file")->required();
    histogram_cmd->add_option("--sigma", hist.sigma, "seed fraction")->capture_default_str();
    histogram_cmd->add_option("--runs", hist.runs, "seed resamples")->capture_default_str();
    histogram_cmd->add_option("--bins", hist.bins, "equal-width bins on [0,1]")->capture_default_str();
    histogram_cmd->add_option("--rng-seed", hist.rng_seed, "random seed")->capture_default_str();
    histogram_cmd->add_option("--jobs", hist.jobs, "parallel runs (0: all cores)");
    histogram_cmd->add_option("--out", hist.out, "histogram CSV")->required();

    std::string manifest_path;
    auto* replay_cmd = app.add_subcommand("replay", "rerun the command recorded in a manifest");
    replay_cmd->add_option("manifest", manifest_path, "manifest JSON")->required();

    std::vector<const char*> raw{"seedcd"};
    for (const auto& arg : argv) {
        raw.push_back(arg.c_str());
    }
    try {
        app.parse(static_cast<int>(raw.size()), raw.data());
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage;
    }

    try {
        if (*generate_cmd) {
            return run_generate(gen, *generate_cmd, argv);
        }
        if (*detect_cmd) {
            return run_detect(det, *detect_cmd, argv);
        }
        if (*verify_cmd) {
            return run_verify(ver);
        }
        if (*sweep_cmd) {
            return run_sweep_cmd(swp, *sweep_cmd, argv);
        }
        if (*histogram_cmd) {
            return run_histogram_cmd(hist, *histogram_cmd, argv);
        }
        if (*replay_cmd) {
            return run_replay(manifest_path);
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return usage;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return parse_failure;
    } catch (const ReachabilityError& e) {
        std::cerr << "error: " << e.what() << ":\n";
        for (std::size_t v : e.nodes()) {
            std::cerr << "  " << v << '\n';
        }
        return unreachable;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return no_convergence;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible parameters: " << e.what() << '\n';
        return infeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return parse_failure;
    }
    return usage;
}

}

int main(int argc, char** argv) { return run(std::vector<std::string>(argv + 1, argv + argc)); }
