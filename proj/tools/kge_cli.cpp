// kge: train / evaluate / query knowledge-graph embedding models.
//
// Exit codes: 0 success, 1 internal error, 2 user or input error.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "kge/dataset.hpp"
#include "kge/eval.hpp"
#include "kge/train.hpp"

using namespace kge;

namespace {

// User/input mistakes (bad flags, missing files, unknown names) exit 2;
// everything else that throws exits 1.
struct UserError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require_file(const std::string& path) {
    if (!std::filesystem::exists(path)) throw UserError("no such file: " + path);
}

std::vector<Triple> load_triples_checked(const std::string& path) {
    require_file(path);
    try {
        return load_triples(path);
    } catch (const std::exception& e) {
        throw UserError(e.what());
    }
}

std::vector<RawPathQuery> load_paths_checked(const std::string& path) {
    require_file(path);
    try {
        return load_paths(path);
    } catch (const std::exception& e) {
        throw UserError(e.what());
    }
}

std::vector<PathQuery> resolve_checked(const KnowledgeGraph& g,
                                       const std::vector<RawPathQuery>& raw) {
    try {
        return resolve_queries(g, raw);
    } catch (const std::exception& e) {
        throw UserError(e.what());
    }
}

// Shared model/dims/training flags and the paths they came from, echoed
// verbatim into every report so runs are self-describing.
struct Manifest {
    std::string command;
    std::string model = "blockhole";
    int n = 0, b = 2, m = 25;
    TrainConfig train;
    std::vector<std::pair<std::string, std::string>> extra;

    ModelKind kind() const { return model_kind_from_name(model); }
    ModelDims dims() const {
        if (kind() == ModelKind::BlockHole) return {.n = b * m, .b = b, .m = m};
        if (n <= 0) throw UserError("--n must be positive for " + model);
        return {.n = n};
    }

    void print(std::ostream& out) const {
        out << "command = " << command << "\n";
        out << "model = " << model << "\n";
        if (kind() == ModelKind::BlockHole)
            out << "b = " << b << "\nm = " << m << "\n";
        else
            out << "n = " << n << "\n";
        out << "lambda = " << train.lambda << "\n";
        out << "eta = " << train.eta << "\n";
        out << "epochs = " << train.epochs << "\n";
        out << "negatives = " << train.negatives_per_positive << "\n";
        out << "seed = " << train.rng_seed << "\n";
        for (const auto& [k, v] : extra) out << k << " = " << v << "\n";
    }
};

// Reorder checkpoint rows to a graph's id assignment (matched by name).
ModelParams align_to_graph(const Checkpoint& ckpt, const KnowledgeGraph& g) {
    ModelParams out = ckpt.params;
    std::unordered_map<std::string, std::size_t> ent_at, rel_at;
    for (std::size_t i = 0; i < ckpt.entity_names.size(); i++) ent_at[ckpt.entity_names[i]] = i;
    for (std::size_t i = 0; i < ckpt.relation_names.size(); i++)
        rel_at[ckpt.relation_names[i]] = i;

    out.num_entities = g.entities.size();
    out.num_relations = g.relations.size();
    out.ent.assign(g.entities.size() * out.ent_stride(), 0.0);
    out.rel.assign(g.relations.size() * out.rel_stride(), 0.0);
    for (std::size_t e = 0; e < g.entities.size(); e++) {
        const auto it = ent_at.find(g.entities.name(static_cast<Id>(e)));
        if (it == ent_at.end())
            throw UserError("entity missing from checkpoint: " +
                            g.entities.name(static_cast<Id>(e)));
        std::copy_n(ckpt.params.ent_row(static_cast<Id>(it->second)), out.ent_stride(),
                    out.ent_row(static_cast<Id>(e)));
    }
    for (std::size_t r = 0; r < g.relations.size(); r++) {
        const auto it = rel_at.find(g.relations.name(static_cast<Id>(r)));
        if (it == rel_at.end())
            throw UserError("relation missing from checkpoint: " +
                            g.relations.name(static_cast<Id>(r)));
        std::copy_n(ckpt.params.rel_row(static_cast<Id>(it->second)), out.rel_stride(),
                    out.rel_row(static_cast<Id>(r)));
    }
    return out;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); j++) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); i++) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); j++)
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1,
                               prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::string nearest_names(const std::string& query, const std::vector<std::string>& names) {
    std::vector<std::pair<std::size_t, std::string>> ranked;
    for (const std::string& name : names) ranked.emplace_back(edit_distance(query, name), name);
    std::sort(ranked.begin(), ranked.end());
    std::string out;
    for (std::size_t i = 0; i < std::min<std::size_t>(3, ranked.size()); i++) {
        if (i) out += ", ";
        out += ranked[i].second;
    }
    return out;
}

std::vector<std::string> split_path(const std::string& s) {
    std::vector<std::string> out;
    std::string hop;
    std::istringstream iss(s);
    while (std::getline(iss, hop, '/')) {
        if (hop.empty()) throw UserError("empty relation segment in path: " + s);
        out.push_back(hop);
    }
    if (out.empty()) throw UserError("empty path");
    return out;
}

// ---- train ----

struct TrainArgs {
    Manifest manifest;
    std::string base_file, path_file, valid_file, out_file;
    bool add_inverses = false;
    bool grid = false;
    std::string metric = "mq";
    int threads = 1;
};

std::vector<GridPoint> default_grid(ModelKind kind, const Manifest& manifest) {
    std::vector<ModelDims> dims;
    if (kind == ModelKind::BlockHole)
        for (const auto [b, m] : {std::pair{2, 25}, {2, 50}, {2, 100}, {4, 25}, {4, 50}, {8, 25}})
            dims.push_back({.n = b * m, .b = b, .m = m});
    else
        dims.push_back(manifest.dims());

    std::vector<GridPoint> grid;
    for (const ModelDims& d : dims)
        for (const double lambda : {0.0001, 0.0})
            for (const double eta : {0.005, 0.01, 0.025, 0.05}) {
                TrainConfig cfg = manifest.train;
                cfg.lambda = lambda;
                cfg.eta = eta;
                grid.push_back({d, cfg});
            }
    return grid;
}

int cmd_train(const TrainArgs& args) {
    KnowledgeGraph g = build_graph(load_triples_checked(args.base_file));
    if (args.add_inverses) g = add_inverses(g);

    std::vector<PathQuery> train = triples_as_queries(g, load_triples_checked(args.base_file));
    if (!args.path_file.empty())
        for (const PathQuery& q : resolve_checked(g, load_paths_checked(args.path_file)))
            train.push_back(q);
    if (train.empty()) throw UserError("no training data");

    Manifest manifest = args.manifest;
    manifest.extra.emplace_back("base", args.base_file);
    if (!args.path_file.empty()) manifest.extra.emplace_back("paths", args.path_file);
    manifest.extra.emplace_back("entities", std::to_string(g.entities.size()));
    manifest.extra.emplace_back("relations", std::to_string(g.relations.size()));
    manifest.print(std::cout);

    ModelParams params;
    if (args.grid) {
        if (args.valid_file.empty()) throw UserError("--grid requires --valid");
        const auto valid = resolve_checked(g, load_paths_checked(args.valid_file));
        const GridMetric metric =
            args.metric == "acc" ? GridMetric::Accuracy : GridMetric::MeanQuantile;
        const GridResult r = grid_search(manifest.kind(), default_grid(manifest.kind(), manifest),
                                         train, valid, g, g, metric);
        std::cout << "grid points tried = " << r.tried.size() << "\n";
        std::cout << "grid best lambda = " << r.best.config.lambda << "\n";
        std::cout << "grid best eta = " << r.best.config.eta << "\n";
        if (manifest.kind() == ModelKind::BlockHole) {
            std::cout << "grid best b = " << r.best.dims.b << "\n";
            std::cout << "grid best m = " << r.best.dims.m << "\n";
        }
        std::cout << "grid best " << args.metric << " = " << r.best_metric << "\n";
        params = r.params;
    } else {
        params = init_params(manifest.kind(), manifest.dims(), g.entities.size(),
                             g.relations.size(), manifest.train.init_scale,
                             manifest.train.rng_seed);
        const TrainReport report = fit(params, train, g, manifest.train);
        std::cout << "epochs run = " << report.epochs_run << "\n";
        for (int e = 0; e < report.epochs_run; e++)
            std::cout << "epoch " << e << " loss = " << report.epoch_loss[static_cast<std::size_t>(e)]
                      << "\n";
    }

    save_checkpoint({params, g.entities.names(), g.relations.names()}, args.out_file);
    std::cout << "checkpoint = " << args.out_file << "\n";
    return 0;
}

// ---- eval-rank ----

struct EvalRankArgs {
    std::string checkpoint, base_file, deduction_file, induction_file, summary_file;
    bool add_inverses = false;
    int threads = 1;
};

int cmd_eval_rank(const EvalRankArgs& args) {
    require_file(args.checkpoint);
    const Checkpoint ckpt = load_checkpoint(args.checkpoint);
    KnowledgeGraph g = build_graph(load_triples_checked(args.base_file));
    if (args.add_inverses) g = add_inverses(g);
    const ModelParams params = align_to_graph(ckpt, g);

    std::ostringstream summary;
    summary << "command = eval-rank\n";
    summary << "model = " << model_kind_name(params.kind) << "\n";
    summary << "checkpoint = " << args.checkpoint << "\n";
    summary << "base = " << args.base_file << "\n";

    auto section = [&](const std::string& name, const std::string& file) {
        const auto queries = resolve_checked(g, load_paths_checked(file));
        std::vector<PathQuery> positives;
        for (const PathQuery& q : queries)
            if (!q.label || *q.label) positives.push_back(q);
        if (positives.empty()) throw UserError(name + " file has no positive queries: " + file);
        const RankingReport r = evaluate_ranking(params, positives, g, args.threads);
        std::cout << name << ": MQ " << std::fixed << std::setprecision(4) << r.mq << "  P@10 "
                  << std::setprecision(1) << r.p_at_10 << "  (included " << r.included
                  << ", excluded " << r.excluded << ")\n";
        std::cout.unsetf(std::ios::fixed);
        summary << name << ".mq = " << r.mq << "\n";
        summary << name << ".p_at_10 = " << r.p_at_10 << "\n";
        summary << name << ".included = " << r.included << "\n";
        summary << name << ".excluded = " << r.excluded << "\n";
    };

    if (args.deduction_file.empty() && args.induction_file.empty())
        throw UserError("need --deduction and/or --induction");
    if (!args.deduction_file.empty()) section("deduction", args.deduction_file);
    if (!args.induction_file.empty()) section("induction", args.induction_file);

    if (!args.summary_file.empty()) {
        std::ofstream out(args.summary_file);
        if (!out) throw std::runtime_error("cannot write " + args.summary_file);
        out << summary.str();
        std::cout << "summary = " << args.summary_file << "\n";
    }
    return 0;
}

// ---- eval-class ----

struct EvalClassArgs {
    std::string checkpoint, base_file, query_file;
    bool add_inverses = false;
    int threads = 1;
};

int cmd_eval_class(const EvalClassArgs& args) {
    require_file(args.checkpoint);
    const Checkpoint ckpt = load_checkpoint(args.checkpoint);
    KnowledgeGraph g = build_graph(load_triples_checked(args.base_file));
    if (args.add_inverses) g = add_inverses(g);
    const ModelParams params = align_to_graph(ckpt, g);

    const auto raw = load_paths_checked(args.query_file);
    if (raw.empty()) throw UserError("empty query file: " + args.query_file);
    const auto queries = resolve_checked(g, raw);

    const ClassReport total = evaluate_classification(params, queries, 0.0, args.threads);
    std::cout << "accuracy = " << total.accuracy << "\n";
    std::cout << "tp = " << total.tp << "\nfp = " << total.fp << "\ntn = " << total.tn
              << "\nfn = " << total.fn << "\n";

    // per-direction breakdown: group by the path's relation sequence
    std::map<std::string, std::vector<PathQuery>> by_path;
    for (const PathQuery& q : queries) {
        std::string key;
        for (std::size_t i = 0; i < q.path.size(); i++) {
            if (i) key += "/";
            key += g.relations.name(q.path[i]);
        }
        by_path[key].push_back(q);
    }
    if (by_path.size() > 1) {
        for (const auto& [path, group] : by_path) {
            const ClassReport r = evaluate_classification(params, group, 0.0, args.threads);
            std::cout << "accuracy[" << path << "] = " << r.accuracy << "  (n = " << group.size()
                      << ")\n";
        }
    }
    return 0;
}

// ---- answer ----

struct AnswerArgs {
    std::string checkpoint, base_file, subject, path;
    bool add_inverses = false;
    int top_k = 10;
};

int cmd_answer(const AnswerArgs& args) {
    require_file(args.checkpoint);
    const Checkpoint ckpt = load_checkpoint(args.checkpoint);
    KnowledgeGraph g = build_graph(load_triples_checked(args.base_file));
    if (args.add_inverses) g = add_inverses(g);
    const ModelParams params = align_to_graph(ckpt, g);

    const auto subject = g.entities.lookup(args.subject);
    if (!subject)
        throw UserError("unknown entity '" + args.subject +
                        "'; closest: " + nearest_names(args.subject, g.entities.names()));
    std::vector<Id> path;
    for (const std::string& hop : split_path(args.path)) {
        const auto r = g.relations.lookup(hop);
        if (!r)
            throw UserError("unknown relation '" + hop +
                            "'; closest: " + nearest_names(hop, g.relations.names()));
        path.push_back(*r);
    }

    std::vector<std::pair<double, Id>> scored;
    for (const Id o : candidate_set(g, path.back()))
        scored.push_back({score_path(params, *subject, path, o), o});
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });

    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(args.top_k),
                                                scored.size());
    for (std::size_t i = 0; i < k; i++)
        std::cout << (i + 1) << "\t" << g.entities.name(scored[i].second) << "\t"
                  << scored[i].first << "\n";
    return 0;
}

// ---- bench ----

double mean_ns_per_score(const ModelParams& p, int scores) {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<Id> ent(0, static_cast<Id>(p.num_entities - 1));
    std::uniform_int_distribution<Id> rel(0, static_cast<Id>(p.num_relations - 1));
    double sink = 0.0;
    for (int i = 0; i < scores / 10; i++) sink += score_triple(p, ent(rng), rel(rng), ent(rng));
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < scores; i++) sink += score_triple(p, ent(rng), rel(rng), ent(rng));
    const double ns =
        std::chrono::duration<double, std::nano>(std::chrono::steady_clock::now() - t0).count();
    if (sink == 12345.6789) std::cerr << "";
    return ns / scores;
}

int cmd_bench(int scores, int b) {
    std::cout << "model\tn\tns_per_score\n";
    std::vector<double> bh_ns, rs_ns;
    for (const int n : {50, 100, 150, 200}) {
        const ModelParams bh = init_params(ModelKind::BlockHole, {.n = n, .b = b, .m = n / b}, 64,
                                           8, 0.3, 1);
        const ModelParams rs = init_params(ModelKind::Rescal, {.n = n}, 64, 8, 0.3, 1);
        bh_ns.push_back(mean_ns_per_score(bh, scores));
        rs_ns.push_back(mean_ns_per_score(rs, scores));
        std::cout << "blockhole_b" << b << "\t" << n << "\t" << bh_ns.back() << "\n";
        std::cout << "rescal\t" << n << "\t" << rs_ns.back() << "\n";
    }
    std::cout << "blockhole_ratio_200_100 = " << bh_ns[3] / bh_ns[1] << "\n";
    std::cout << "rescal_ratio_200_100 = " << rs_ns[3] / rs_ns[1] << "\n";
    return 0;
}

// ---- gen ----

int cmd_gen(int families, std::uint64_t seed, const std::string& out_dir) {
    const DatasetBundle data = gen_order_benchmark(families, seed);
    std::filesystem::create_directories(out_dir);
    const auto at = [&](const std::string& name) { return (std::filesystem::path(out_dir) / name).string(); };
    save_triples(at("base_train.tsv"), data.base_train);
    save_paths(at("path_train.tsv"), data.path_train);
    save_paths(at("path_valid.tsv"), data.path_valid);
    save_paths(at("path_test.tsv"), data.path_test_deduction);
    std::cout << "wrote base_train.tsv, path_train.tsv, path_valid.tsv, path_test.tsv to "
              << out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"knowledge-graph embedding models with path-query support"};
    app.require_subcommand(1);

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "train a model and write a checkpoint");
    train_cmd->add_option("--model", train_args.manifest.model,
                          "blockhole|rescal|distmult|complex|hole|transe")
        ->check(CLI::IsMember({"blockhole", "rescal", "distmult", "complex", "hole", "transe"}));
    train_cmd->add_option("--b", train_args.manifest.b, "blocks per side (blockhole)");
    train_cmd->add_option("--m", train_args.manifest.m, "components per block (blockhole)");
    train_cmd->add_option("--n", train_args.manifest.n, "embedding dimension (other models)");
    train_cmd->add_option("--lambda", train_args.manifest.train.lambda, "L2 weight");
    train_cmd->add_option("--eta", train_args.manifest.train.eta, "learning rate");
    train_cmd->add_option("--epochs", train_args.manifest.train.epochs, "max epochs");
    train_cmd->add_option("--negatives", train_args.manifest.train.negatives_per_positive,
                          "negatives per positive");
    train_cmd->add_option("--seed", train_args.manifest.train.rng_seed, "rng seed");
    train_cmd->add_option("--init-scale", train_args.manifest.train.init_scale,
                          "init std deviation");
    train_cmd->add_option("--base", train_args.base_file, "base triples (tsv)")->required();
    train_cmd->add_option("--paths", train_args.path_file, "path queries (tsv)");
    train_cmd->add_option("--valid", train_args.valid_file, "validation queries for --grid");
    train_cmd->add_flag("--add-inverses", train_args.add_inverses, "add r_inv relations");
    train_cmd->add_flag("--grid", train_args.grid, "grid-search hyperparameters");
    train_cmd->add_option("--metric", train_args.metric, "grid metric")
        ->check(CLI::IsMember({"mq", "acc"}));
    train_cmd->add_option("--out", train_args.out_file, "checkpoint path")->required();

    EvalRankArgs rank_args;
    auto* rank_cmd = app.add_subcommand("eval-rank", "ranking evaluation (MQ, P@10)");
    rank_cmd->add_option("--checkpoint", rank_args.checkpoint)->required();
    rank_cmd->add_option("--base", rank_args.base_file, "ground-truth triples")->required();
    rank_cmd->add_option("--deduction", rank_args.deduction_file, "deduction test queries");
    rank_cmd->add_option("--induction", rank_args.induction_file, "induction test queries");
    rank_cmd->add_option("--summary", rank_args.summary_file, "summary key-value file");
    rank_cmd->add_flag("--add-inverses", rank_args.add_inverses);
    rank_cmd->add_option("--threads", rank_args.threads, "evaluation threads");

    EvalClassArgs class_args;
    auto* class_cmd = app.add_subcommand("eval-class", "classification evaluation");
    class_cmd->add_option("--checkpoint", class_args.checkpoint)->required();
    class_cmd->add_option("--base", class_args.base_file, "ground-truth triples")->required();
    class_cmd->add_option("--queries", class_args.query_file, "labeled queries")->required();
    class_cmd->add_flag("--add-inverses", class_args.add_inverses);
    class_cmd->add_option("--threads", class_args.threads, "evaluation threads");

    AnswerArgs answer_args;
    auto* answer_cmd = app.add_subcommand("answer", "rank candidate objects for a path query");
    answer_cmd->add_option("--checkpoint", answer_args.checkpoint)->required();
    answer_cmd->add_option("--base", answer_args.base_file, "ground-truth triples")->required();
    answer_cmd->add_option("--subject", answer_args.subject)->required();
    answer_cmd->add_option("--path", answer_args.path, "relations joined by '/'")->required();
    answer_cmd->add_option("--top-k", answer_args.top_k, "candidates to print");
    answer_cmd->add_flag("--add-inverses", answer_args.add_inverses);

    int bench_scores = 20000, bench_b = 2;
    auto* bench_cmd = app.add_subcommand("bench", "per-score timing table");
    bench_cmd->add_option("--scores", bench_scores, "scores per measurement");
    bench_cmd->add_option("--b", bench_b, "blockhole blocks per side");

    int gen_families = 200;
    std::uint64_t gen_seed = 0;
    std::string gen_dir = ".";
    auto* gen_cmd = app.add_subcommand("gen", "generate the order-discrimination benchmark");
    gen_cmd->add_option("--families", gen_families);
    gen_cmd->add_option("--seed", gen_seed);
    gen_cmd->add_option("--out-dir", gen_dir);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        train_args.manifest.command = "train";
        if (train_cmd->parsed()) return cmd_train(train_args);
        if (rank_cmd->parsed()) return cmd_eval_rank(rank_args);
        if (class_cmd->parsed()) return cmd_eval_class(class_args);
        if (answer_cmd->parsed()) return cmd_answer(answer_args);
        if (bench_cmd->parsed()) return cmd_bench(bench_scores, bench_b);
        if (gen_cmd->parsed()) return cmd_gen(gen_families, gen_seed, gen_dir);
    } catch (const UserError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
