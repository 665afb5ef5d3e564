#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "matchsim/cftp.hpp"
#include "matchsim/erasing.hpp"
#include "matchsim/finite_buffer.hpp"
#include "matchsim/matchings.hpp"
#include "matchsim/properties.hpp"

namespace {

using namespace matchsim;

constexpr int kExitOk = 0;
constexpr int kExitViolated = 2;   // property violated / verification failed
constexpr int kExitUsage = 64;
constexpr int kExitSoftware = 70;
constexpr int kExitIo = 74;

int exit_code_for(errc code) {
    switch (code) {
        case errc::io_error:
            return kExitIo;
        case errc::verification_failed:
        case errc::none_found:
        case errc::coalescence_failed:
        case errc::not_stabilized:
        case errc::uncertified_word:
        case errc::depth_limit:
        case errc::not_fcfm:
        case errc::not_perfect:
            return kExitViolated;
        case errc::overflow:
        case errc::inadmissible_state:
        case errc::not_irreducible:
        case errc::no_convergence:
            return kExitSoftware;
        default:
            return kExitUsage;
    }
}

struct CommonArgs {
    std::string graph_spec;
    std::string policy_name = "fcfm";
    std::string priority_lists;
    std::string mu_spec;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int workers = 1;
    std::string out_path;
    std::string emit;
};

CompatibilityGraph resolve_graph(const std::string& spec) {
    if (spec == "paw") return make_paw();
    if (spec.rfind("cycle:", 0) == 0) return make_cycle(std::stoi(spec.substr(6)));
    if (spec == "k3") return make_cycle(3);
    if (spec.rfind("kpartite:", 0) == 0) {
        std::vector<int> sizes;
        std::istringstream in(spec.substr(9));
        std::string token;
        while (std::getline(in, token, ',')) sizes.push_back(std::stoi(token));
        return make_complete_multipartite(sizes);
    }
    if (spec == "k222") return make_complete_multipartite({2, 2, 2});
    return load_graph_file(spec);
}

PolicySpec resolve_policy(const CompatibilityGraph& g, const std::string& name,
                          const std::string& priority_lists) {
    PolicyKind kind = policy_from_name(name);
    if (kind != PolicyKind::priority) {
        if (!priority_lists.empty())
            throw Error(errc::bad_input, "--priority is only valid with --policy priority");
        return {kind, {}};
    }
    if (priority_lists.empty()) return PolicySpec::priority_ascending(g);
    std::vector<std::vector<int>> lists(1);  // index 0 unused
    std::istringstream in(priority_lists);
    std::string token;
    while (std::getline(in, token, ';')) {
        std::vector<int> list;
        std::istringstream classes(token);
        std::string c;
        while (std::getline(classes, c, ',')) list.push_back(std::stoi(c));
        lists.push_back(std::move(list));
    }
    PolicySpec policy = PolicySpec::priority(std::move(lists));
    policy.validate(g);
    return policy;
}

ArrivalDistribution resolve_mu(const CompatibilityGraph& g, const std::string& spec) {
    if (spec.empty()) return ArrivalDistribution::uniform(g.num_classes());
    std::vector<double> probs;
    std::istringstream in(spec);
    std::string token;
    while (std::getline(in, token, ',')) probs.push_back(std::stod(token));
    return ArrivalDistribution(probs);
}

// Reproducibility header: the exact resolved configuration, replayable as a
// command line.
std::string config_header(const std::string& command, const CommonArgs& args,
                          const std::vector<std::pair<std::string, std::string>>& extra) {
    std::ostringstream out;
    out << "# matchsim " << command;
    if (!args.graph_spec.empty()) out << " --graph " << args.graph_spec;
    if (!args.policy_name.empty()) out << " --policy " << args.policy_name;
    if (!args.priority_lists.empty()) out << " --priority " << args.priority_lists;
    if (!args.mu_spec.empty()) out << " --mu " << args.mu_spec;
    if (args.seed_given) out << " --seed " << args.seed;
    for (const auto& [key, value] : extra) out << " --" << key << ' ' << value;
    out << '\n';
    return out.str();
}

void write_artifact(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(errc::io_error, "cannot write " + path);
    out << content;
}

std::vector<std::pair<std::string, double>> read_distribution(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::io_error, "cannot read " + path);
    std::vector<std::pair<std::string, double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        std::string state;
        double prob = 0.0;
        row >> state >> prob;
        rows.emplace_back(state, prob);
    }
    return rows;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(errc::io_error, "cannot read " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic matching models: policy verifiers, erasing words, exact "
                 "stationary oracle and CFTP perfect sampling"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string property = "subadditive";
    std::string mode = "exhaustive";
    std::string target_word, word_arg, dict_path, replay_path;
    std::string window_spec = "0,20", depths_spec = "50,100,200,400", start_word = "-";
    std::string tv_a, tv_b;
    int max_len = 8, max_count = 2, capacity = 1, q_len = 3, n_samples = 10000, blocks = 100;
    long steps = 1000;
    std::uint64_t samples = 100000;
    bool minimal = false, no_search = false, no_constructors = false;

    auto add_common = [&](CLI::App* cmd, bool needs_seed) {
        cmd->add_option("--graph", args.graph_spec,
                        "graph file or builtin (paw, cycle:N, kpartite:a,b,c, k222, k3)")
            ->required();
        cmd->add_option("--policy", args.policy_name, "fcfm|lcfm|ml|ms|priority|uniform");
        cmd->add_option("--priority", args.priority_lists,
                        "priority lists per class, e.g. 2;1,3,4;2,4;2,3");
        cmd->add_option("--mu", args.mu_spec, "arrival probabilities, e.g. 0.2,0.3,0.25,0.25");
        cmd->add_option("--workers", args.workers, "parallel workers (output-independent)");
        cmd->add_option("--out", args.out_path, "output file (stdout when omitted)");
        cmd->add_option("--emit", args.emit, "extra artifact: plot-data");
        auto* seed_opt = cmd->add_option("--seed", args.seed, "master seed (all randomness)");
        if (needs_seed) seed_opt->required();
        seed_opt->each([&](const std::string&) { args.seed_given = true; });
    };

    auto* cmd_info = app.add_subcommand("graph-info", "graph predicates and certificates");
    add_common(cmd_info, false);

    auto* cmd_ncond = app.add_subcommand("check-ncond", "mu(I) < mu(E(I)) over independent sets");
    add_common(cmd_ncond, false);

    auto* cmd_policy = app.add_subcommand("check-policy", "non-expansiveness / sub-additivity");
    add_common(cmd_policy, false);
    cmd_policy->add_option("--property", property, "subadditive|nonexpansive");
    cmd_policy->add_option("--max-len", max_len, "total word length bound (subadditive)");
    cmd_policy->add_option("--max-count", max_count, "per-class count bound (nonexpansive)");
    cmd_policy->add_option("--mode", mode, "exhaustive|sampled");
    cmd_policy->add_option("--samples", n_samples, "trials in sampled mode");
    cmd_policy->add_option("--replay", replay_path, "re-verify the witness in a report file");

    auto* cmd_erase = app.add_subcommand("find-erasing", "construct or search erasing words");
    add_common(cmd_erase, false);
    cmd_erase->add_option("--target", target_word, "buffer content to erase, e.g. 1,3")->required();
    cmd_erase->add_flag("--minimal", minimal, "search minimal erasing words instead");
    cmd_erase->add_option("--max-len", max_len, "search bound for --minimal");

    auto* cmd_strong = app.add_subcommand("certify-strong", "verify a 2C-strong erasing word");
    add_common(cmd_strong, false);
    cmd_strong->add_option("--capacity", capacity, "C")->required();
    cmd_strong->add_option("--word", word_arg, "candidate word")->required();

    auto* cmd_dict = app.add_subcommand("build-dict", "dictionary of 2C-strong words");
    add_common(cmd_dict, false);
    cmd_dict->add_option("--capacity", capacity, "C")->required();
    cmd_dict->add_option("--q", q_len, "base word half-length q (base words have length 2q)");
    cmd_dict->add_flag("--no-search", no_search, "constructors only");
    cmd_dict->add_flag("--no-constructors", no_constructors, "search only");

    auto* cmd_stationary = app.add_subcommand("stationary", "exact stationary distribution");
    add_common(cmd_stationary, false);
    cmd_stationary->add_option("--capacity", capacity, "C")->required();

    auto* cmd_cftp = app.add_subcommand("cftp", "perfect sampling of the finite-buffer chain");
    add_common(cmd_cftp, true);
    cmd_cftp->add_option("--capacity", capacity, "C")->required();
    cmd_cftp->add_option("--dict", dict_path, "dictionary file from build-dict")->required();
    cmd_cftp->add_option("--samples", samples, "number of CFTP samples");

    auto* cmd_sim = app.add_subcommand("simulate", "forward run with construction points");
    add_common(cmd_sim, true);
    cmd_sim->add_option("--steps", steps, "arrival pairs");
    cmd_sim->add_option("--start", start_word, "initial buffer content");

    auto* cmd_bimatch = app.add_subcommand("bimatch", "stabilized bi-infinite window matching");
    add_common(cmd_bimatch, true);
    cmd_bimatch->add_option("--window", window_spec, "a,b (single-arrival times)");
    cmd_bimatch->add_option("--depths", depths_spec, "start depths, one parity, e.g. 50,100,200,400");

    auto* cmd_reverse = app.add_subcommand("reverse-check", "FCFM reverse-time block property");
    add_common(cmd_reverse, true);
    cmd_reverse->add_option("--blocks", blocks, "perfectly matched blocks to sample");

    auto* cmd_tv = app.add_subcommand("tv", "total variation between two distribution dumps");
    cmd_tv->add_option("--a", tv_a, "first dump")->required();
    cmd_tv->add_option("--b", tv_b, "second dump")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (cmd_tv->parsed()) {
            auto rows_a = read_distribution(tv_a);
            auto rows_b = read_distribution(tv_b);
            if (rows_a.size() != rows_b.size())
                throw Error(errc::dimension_mismatch, "dumps have different state counts");
            std::vector<double> pa, pb;
            for (std::size_t k = 0; k < rows_a.size(); ++k) {
                if (rows_a[k].first != rows_b[k].first)
                    throw Error(errc::dimension_mismatch, "dumps disagree on state order");
                pa.push_back(rows_a[k].second);
                pb.push_back(rows_b[k].second);
            }
            std::cout << "tv " << total_variation(pa, pb) << '\n';
            return kExitOk;
        }

        CompatibilityGraph g = resolve_graph(args.graph_spec);
        PolicySpec policy = resolve_policy(g, args.policy_name, args.priority_lists);

        if (cmd_info->parsed()) {
            std::ostringstream out;
            out << config_header("graph-info", args, {});
            out << "n " << g.num_classes() << '\n';
            for (auto [i, j] : g.edges()) out << "edge " << i << ' ' << j << '\n';
            out << "hash " << std::hex << g.hash() << std::dec << '\n';
            out << "bipartite " << (is_bipartite(g) ? "yes" : "no") << '\n';
            if (auto cycle = find_induced_odd_cycle(g)) {
                out << "induced-odd-cycle " << word_to_string(cycle->nodes) << '\n';
                out << "spanning-odd-cycle " << word_to_string(spanning_odd_cycle(g).nodes) << '\n';
            }
            auto mp = classify_complete_multipartite(g);
            out << "complete-multipartite " << (mp.is_cpp ? "yes" : "no") << '\n';
            if (mp.is_cpp)
                for (const auto& part : *mp.parts) out << "part " << word_to_string(part) << '\n';
            out << "independent-sets " << enumerate_independent_sets(g).size() << '\n';
            write_artifact(args.out_path, out.str());
            return kExitOk;
        }

        if (cmd_ncond->parsed()) {
            ArrivalDistribution mu = resolve_mu(g, args.mu_spec);
            NcondReport report = ncond_check(g, mu);
            std::ostringstream out;
            out << config_header("check-ncond", args, {});
            if (report.holds) {
                out << "ncond holds\n";
                write_artifact(args.out_path, out.str());
                return kExitOk;
            }
            out << "ncond violated witness " << word_to_string(*report.witness) << " mu(I) "
                << report.witness_mu_set << " mu(E(I)) " << report.witness_mu_neighborhood << '\n';
            write_artifact(args.out_path, out.str());
            return kExitViolated;
        }

        if (cmd_policy->parsed()) {
            if (!replay_path.empty()) {
                PropertyReport report = report_from_json(read_file(replay_path));
                bool ok = false;
                if (report.nonexpansive_witness)
                    ok = replay_nonexpansive_witness(g, policy, *report.nonexpansive_witness);
                else if (report.subadditive_witness)
                    ok = replay_subadditive_witness(g, policy, *report.subadditive_witness);
                std::cout << (ok ? "witness reproduced\n" : "witness failed to reproduce\n");
                return ok ? kExitOk : kExitViolated;
            }
            PropertyReport report;
            if (property == "nonexpansive") {
                report = check_nonexpansive(g, policy, max_count, args.workers);
            } else if (property == "subadditive") {
                SubAdditiveMode m =
                    mode == "sampled" ? SubAdditiveMode::sampled : SubAdditiveMode::exhaustive;
                report = check_subadditive(g, policy, max_len, m, args.seed, n_samples,
                                           args.workers);
            } else {
                throw Error(errc::bad_input, "unknown property " + property);
            }
            std::string body = report_to_json(report) + "\n";
            write_artifact(args.out_path, config_header("check-policy", args,
                                                        {{"property", property}}) +
                                              body);
            return report.violated() ? kExitViolated : kExitOk;
        }

        if (cmd_erase->parsed()) {
            Word u = word_from_string(target_word);
            std::ostringstream out;
            out << config_header("find-erasing", args, {{"target", target_word}});
            if (minimal) {
                auto words = find_minimal_erasing_words(g, policy, u, max_len);
                for (const Word& w : words) out << word_to_string(w) << '\n';
            } else {
                ErasingCert cert = construct_erasing_word(g, policy, u);
                out << "word " << word_to_string(cert.word) << '\n';
                out << "checked " << cert.checked_domain << '\n';
            }
            write_artifact(args.out_path, out.str());
            return kExitOk;
        }

        if (cmd_strong->parsed()) {
            Word z = word_from_string(word_arg);
            ErasingCert cert = certify_strong(g, policy, capacity, z);
            std::ostringstream out;
            out << config_header("certify-strong", args,
                                 {{"capacity", std::to_string(capacity)}, {"word", word_arg}});
            out << "certified " << 2 * capacity << "-strong\nchecked " << cert.checked_domain
                << '\n';
            write_artifact(args.out_path, out.str());
            return kExitOk;
        }

        if (cmd_dict->parsed()) {
            DictionaryOptions opts;
            opts.use_search = !no_search;
            opts.use_constructors = !no_constructors;
            auto words = build_dictionary(g, policy, capacity, q_len, opts);
            std::string body = dictionary_to_text(g, policy, capacity, q_len, words);
            write_artifact(args.out_path,
                           config_header("build-dict", args,
                                         {{"capacity", std::to_string(capacity)},
                                          {"q", std::to_string(q_len)}}) +
                               body);
            return kExitOk;
        }

        if (cmd_stationary->parsed()) {
            ArrivalDistribution mu = resolve_mu(g, args.mu_spec);
            FiniteBufferChain chain(g, policy, capacity, mu);
            StationaryDistribution pi = solve_stationary(build_transition_matrix(chain));
            std::string body = distribution_to_text(pi);
            write_artifact(args.out_path,
                           config_header("stationary", args,
                                         {{"capacity", std::to_string(capacity)}}) +
                               body);
            if (!args.emit.empty() && args.emit == "plot-data" && !args.out_path.empty()) {
                std::ostringstream plot;
                for (std::size_t k = 0; k < pi.states.size(); ++k)
                    plot << k << ' ' << pi.probs[k] << '\n';
                write_artifact(args.out_path + ".plot", plot.str());
            }
            return kExitOk;
        }

        if (cmd_cftp->parsed()) {
            ArrivalDistribution mu = resolve_mu(g, args.mu_spec);
            FiniteBufferChain chain(g, policy, capacity, mu);
            auto dict = dictionary_from_text(read_file(dict_path), g, capacity);
            MonteCarloResult mc = monte_carlo(chain, dict, samples, args.seed, args.workers);
            std::ostringstream out;
            // workers affect scheduling only, never the artifact bytes
            out << config_header("cftp", args,
                                 {{"capacity", std::to_string(capacity)},
                                  {"dict", dict_path},
                                  {"samples", std::to_string(samples)}});
            out << "# samples=" << mc.samples << " mean-scan-depth=" << mc.mean_scan_depth
                << " max-scan-depth=" << mc.max_scan_depth << '\n';
            out.precision(17);
            for (std::size_t k = 0; k < mc.states.size(); ++k)
                out << word_to_string(mc.states[k]) << ' ' << mc.histogram[k] << '\n';
            write_artifact(args.out_path, out.str());
            if (args.emit == "plot-data" && !args.out_path.empty()) {
                std::ostringstream plot;
                for (std::size_t k = 0; k < mc.states.size(); ++k)
                    plot << k << ' ' << mc.histogram[k] << '\n';
                write_artifact(args.out_path + ".plot", plot.str());
            }
            return kExitOk;
        }

        if (cmd_sim->parsed()) {
            ArrivalDistribution mu = resolve_mu(g, args.mu_spec);
            SimulateResult run = simulate_with_construction_points(
                g, policy, mu, word_from_string(start_word), steps, args.seed);
            std::ostringstream out;
            out << config_header("simulate", args,
                                 {{"steps", std::to_string(steps)}, {"start", start_word}});
            out << trace_to_text(run.trace);
            out << "construction-points";
            for (long t : run.cps.times) out << ' ' << t;
            out << '\n';
            write_artifact(args.out_path, out.str());
            if (args.emit == "plot-data" && !args.out_path.empty()) {
                std::ostringstream plot;  // arc diagram rows: t_i t_j class_i class_j
                for (const MatchEdge& e : run.trace.edges)
                    plot << e.a << ' ' << e.b << ' ' << run.trace.arrivals[e.a] << ' '
                         << run.trace.arrivals[e.b] << '\n';
                write_artifact(args.out_path + ".plot", plot.str());
            }
            return kExitOk;
        }

        if (cmd_bimatch->parsed()) {
            ArrivalDistribution mu = resolve_mu(g, args.mu_spec);
            auto parse_longs = [](const std::string& spec) {
                std::vector<long> out;
                std::istringstream in(spec);
                std::string token;
                while (std::getline(in, token, ',')) out.push_back(std::stol(token));
                return out;
            };
            auto window = parse_longs(window_spec);
            if (window.size() != 2) throw Error(errc::bad_input, "--window needs a,b");
            BiMatchWindow result = biinfinite_window(g, policy, mu, window[0], window[1],
                                                     parse_longs(depths_spec), args.seed);
            std::ostringstream out;
            out << config_header("bimatch", args,
                                 {{"window", window_spec}, {"depths", depths_spec}});
            out << "stabilized-from " << result.stabilized_from << '\n';
            out << window_to_text(result);
            write_artifact(args.out_path, out.str());
            if (args.emit == "plot-data" && !args.out_path.empty())
                write_artifact(args.out_path + ".plot", window_to_text(result));
            return kExitOk;
        }

        if (cmd_reverse->parsed()) {
            ArrivalDistribution mu = resolve_mu(g, args.mu_spec);
            int checked = 0;
            long chunk = 2000;
            std::uint64_t run_seed = args.seed;
            while (checked < blocks) {
                SimulateResult run = simulate_with_construction_points(
                    g, PolicySpec::fcfm(), mu, {}, chunk, run_seed);
                for (const MatchingTrace& block : split_into_blocks(run)) {
                    if (block.arrivals.empty()) continue;
                    if (!fcfm_reverse_check(g, block)) {
                        std::cout << "reverse-check failed on a block of length "
                                  << block.arrivals.size() << '\n';
                        return kExitViolated;
                    }
                    if (++checked >= blocks) break;
                }
                run_seed = mix64(run_seed);
            }
            std::cout << "reverse-check passed on " << checked << " blocks\n";
            return kExitOk;
        }
    } catch (const Error& err) {
        std::cerr << "error: " << err.what() << '\n';
        return exit_code_for(err.code());
    } catch (const std::invalid_argument& err) {
        std::cerr << "error: malformed argument: " << err.what() << '\n';
        return kExitUsage;
    } catch (const std::out_of_range& err) {
        std::cerr << "error: argument out of range: " << err.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitSoftware;
    }
    return kExitUsage;
}
