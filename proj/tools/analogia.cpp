// SPDX-License-Identifier: Apache-2.0
// Command line front end: quadruple generation, training, ranking,
// evaluation, baselines, prototype sweeps and gradient checks.
//
// Exit status: 0 success, 1 usage error, 2 data or configuration error.
// Every output file is written through a temp file and a rename, and only
// after all inputs have been read and all work has finished.
#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "analogia/checkpoint.hpp"
#include "analogia/diagnostics.hpp"
#include "analogia/error.hpp"
#include "analogia/evaluation.hpp"
#include "analogia/io.hpp"
#include "analogia/quadgen.hpp"
#include "analogia/rng.hpp"
#include "analogia/synthetic.hpp"
#include "analogia/training.hpp"

namespace fs = std::filesystem;
using namespace analogia;

namespace {

enum class Level { error = 0, info = 1, debug = 2 };
int g_verbosity = 1;

template <typename... Args>
void log(Level level, const char* fmt, Args... args) {
    if (static_cast<int>(level) > g_verbosity) return;
    static const char* names[] = {"error", "info", "debug"};
    std::fprintf(stderr, "analogia: %s: ", names[static_cast<int>(level)]);
    if constexpr (sizeof...(Args) == 0) {
        std::fputs(fmt, stderr);
    } else {
        std::fprintf(stderr, fmt, args...);
    }
    std::fputc('\n', stderr);
}

// Thrown for flag combinations CLI11 cannot express; maps to exit status 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<WhType> parse_types(const std::vector<std::string>& names) {
    std::vector<WhType> out;
    for (const auto& n : names) {
        const auto t = parse_wh_type(n);
        if (!t || *t == WhType::Other) throw UsageError("--types: unknown wh-type '" + n + "'");
        out.push_back(*t);
    }
    if (out.empty()) throw UsageError("--types: at least one type is required");
    return out;
}

std::string join_types(const std::vector<WhType>& types) {
    std::string s;
    for (WhType t : types) s += (s.empty() ? "" : ",") + std::string(to_string(t));
    return s;
}

void require_output_dir(const std::string& path) {
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty() && !fs::is_directory(parent)) {
        throw ConfigError("output directory " + parent.string() + " does not exist");
    }
}

EmbeddingTable load_table(const std::string& path, std::optional<std::size_t> dim, std::uint64_t oov_seed) {
    log(Level::info, "loading embeddings from %s", path.c_str());
    EmbeddingTable table = load_embeddings(path, dim, oov_seed);
    log(Level::info, "%zu vectors of dimension %zu", table.vocab_size(), table.dim());
    return table;
}

QADataset load_data(const std::string& path, bool header) {
    QADataset ds = load_qa_dataset(path, header);
    log(Level::info, "%s: %zu questions (who %zu, when %zu, where %zu, other %zu), %zu candidates", path.c_str(),
        ds.questions.size(), ds.count(WhType::Who), ds.count(WhType::When), ds.count(WhType::Where),
        ds.count(WhType::Other), ds.candidate_count());
    return ds;
}

void report_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) log(Level::info, "warning: %s", w.c_str());
}

// Settings stored in a checkpoint next to the weights.
struct LoadedModel {
    Checkpoint checkpoint;
    EmbeddingTable table;
};

LoadedModel load_model(const std::string& dir, const std::string& embeddings_override) {
    LoadedModel m;
    m.checkpoint = load_checkpoint(dir);
    const auto& cfg = m.checkpoint.config;
    std::string embeddings = embeddings_override;
    if (embeddings.empty()) {
        const auto it = cfg.find("embeddings");
        if (it == cfg.end()) throw ConfigError(dir + ": checkpoint does not name its embeddings; pass --embeddings");
        embeddings = it->second;
    }
    std::uint64_t oov_seed = 0;
    if (const auto it = cfg.find("oov_seed"); it != cfg.end()) oov_seed = std::stoull(it->second);
    m.table = load_table(embeddings, m.checkpoint.params.input_dim, oov_seed);
    return m;
}

std::uint64_t oov_seed_for(std::uint64_t seed) { return stream_seed(seed, "oov"); }

// Gives `opt` a value from outside the command line. Validators and
// conversions run exactly as they would for a flag.
void set_option(CLI::Option* opt, const std::string& value, const std::string& source) {
    try {
        opt->add_result(value);
        opt->run_callback();
    } catch (const CLI::Error& e) {
        throw UsageError(source + ": " + opt->get_name() + ": " + e.what());
    }
}

// Merges a flat key=value file into `cmd`. Keys are long flag names without
// the leading dashes; flags already given on the command line are kept.
void apply_settings(CLI::App* cmd, const std::string& path) {
    const KeyValues settings = parse_key_values(read_file(path), path);
    for (const auto& [key, value] : settings) {
        CLI::Option* opt = cmd->get_option_no_throw("--" + key);
        if (opt == nullptr || key == "config" || key == "help") {
            throw UsageError(path + ": '" + key + "' is not a setting of " + cmd->get_name());
        }
        if (opt->count() == 0) set_option(opt, value, path);
    }
}

// ---------------------------------------------------------------------------

struct Common {
    bool header = false;
    std::uint64_t seed = 0;
    std::string mode = "energy";
};

void add_seed(CLI::App* cmd, Common& c) {
    cmd->add_option("--seed", c.seed, "Random seed (falls back to $ANALOGIA_SEED, then 0)")->capture_default_str();
}

void add_header(CLI::App* cmd, Common& c) {
    cmd->add_flag("--header", c.header, "Input QA TSV files start with a header row");
}

void add_mode(CLI::App* cmd, Common& c) {
    cmd->add_option("--mode", c.mode, "Candidate scoring: energy or dissimilarity")
        ->check(CLI::IsMember({"energy", "dissimilarity"}))
        ->capture_default_str();
}

// gen-quadruples -------------------------------------------------------------

struct GenArgs {
    Common common;
    std::string data, out, prototypes_out;
    std::size_t p = 30;
    std::size_t negatives = 1;
    std::vector<std::string> types{"who", "when", "where"};
};

int run_gen(const GenArgs& a) {
    const auto types = parse_types(a.types);
    require_output_dir(a.out);
    if (!a.prototypes_out.empty()) require_output_dir(a.prototypes_out);
    const QADataset ds = load_data(a.data, a.common.header);
    const PrototypeSet protos = select_prototypes(ds, a.p, a.common.seed, types);
    report_warnings(protos.warnings);
    const auto quads = generate_training_quadruples(ds, protos, a.negatives, stream_seed(a.common.seed, "quadruples"));
    log(Level::info, "%zu prototypes, %zu quadruples", protos.total(), quads.size());
    write_file_atomic(a.out, format_quadruples(quads));
    if (!a.prototypes_out.empty()) write_file_atomic(a.prototypes_out, format_prototypes(protos));
    return 0;
}

// train ----------------------------------------------------------------------

struct TrainArgs {
    Common common;
    std::string data, embeddings, out, loss_log;
    std::size_t p = 30;
    std::vector<std::string> types{"who", "when", "where"};
    TrainConfig cfg;
    std::string loss_variant = "hinge";
};

int run_train(TrainArgs a) {
    const auto types = parse_types(a.types);
    a.cfg.seed = a.common.seed;
    a.cfg.hp.loss_variant = parse_loss_variant(a.loss_variant);
    a.cfg.validate();
    const std::string loss_log = a.loss_log.empty() ? (fs::path(a.out) / "loss_log.tsv").string() : a.loss_log;
    if (!a.loss_log.empty()) require_output_dir(a.loss_log);

    const QADataset ds = load_data(a.data, a.common.header);
    const EmbeddingTable table = load_table(a.embeddings, std::nullopt, oov_seed_for(a.common.seed));
    const PrototypeSet protos = select_prototypes(ds, a.p, a.common.seed, types);
    report_warnings(protos.warnings);

    const TrainResult result = train(a.cfg, ds, protos, table, [](const EpochStats& s) {
        log(Level::debug, "epoch %zu: mean loss %.6f over %zu quadruples, %zu degenerate", s.epoch, s.mean_loss,
            s.quadruples, s.degenerate);
    });
    report_warnings(result.warnings);
    if (!result.log.empty()) {
        log(Level::info, "trained %zu epochs, loss %.6f -> %.6f", result.log.size(), result.log.front().mean_loss,
            result.log.back().mean_loss);
    }

    Checkpoint ck;
    ck.params = result.params;
    ck.prototypes = protos;
    ck.config = {
        {"embeddings", fs::absolute(a.embeddings).string()},
        {"oov_seed", std::to_string(oov_seed_for(a.common.seed))},
        {"seed", std::to_string(a.common.seed)},
        {"prototypes", std::to_string(a.p)},
        {"types", join_types(types)},
        {"epochs", std::to_string(a.cfg.epochs)},
        {"batch_size", std::to_string(a.cfg.batch_size)},
        {"lr", format_real(a.cfg.adam.lr)},
        {"beta1", format_real(a.cfg.adam.beta1)},
        {"beta2", format_real(a.cfg.adam.beta2)},
        {"adam_eps", format_real(a.cfg.adam.eps)},
        {"weight_decay", format_real(a.cfg.adam.weight_decay)},
        {"dropout", format_real(a.cfg.dropout)},
        {"margin", format_real(a.cfg.hp.margin)},
        {"loss_variant", std::string(to_string(a.cfg.hp.loss_variant))},
        {"l2_lambda", format_real(a.cfg.hp.l2_lambda)},
        {"cosine_epsilon", format_real(a.cfg.hp.cosine_epsilon)},
        {"negatives", std::to_string(a.cfg.negatives_per_positive)},
        {"clip_norm", format_real(a.cfg.clip_norm)},
    };
    save_checkpoint(a.out, ck);
    write_file_atomic(loss_log, format_loss_log(result.log));
    log(Level::info, "checkpoint written to %s", a.out.c_str());
    return 0;
}

// rank / eval ----------------------------------------------------------------

struct EvalArgs {
    Common common;
    std::string checkpoint, data, embeddings, report, rankings;
};

MetricsReport evaluate_checkpoint(const EvalArgs& a) {
    const LoadedModel m = load_model(a.checkpoint, a.embeddings);
    const QADataset ds = load_data(a.data, a.common.header);
    const MetricsReport report = evaluate(learned_encoder(m.checkpoint.params, m.table), ds, m.checkpoint.prototypes,
                                          parse_rank_mode(a.common.mode));
    if (report.degenerate) log(Level::info, "%zu degenerate energies scored as 0", report.degenerate);
    return report;
}

int run_rank(const EvalArgs& a) {
    require_output_dir(a.rankings);
    const MetricsReport report = evaluate_checkpoint(a);
    log(Level::info, "ranked %zu questions", report.lists.size());
    write_file_atomic(a.rankings, format_rankings(report.lists));
    return 0;
}

int run_eval(const EvalArgs& a) {
    require_output_dir(a.report);
    if (!a.rankings.empty()) require_output_dir(a.rankings);
    const MetricsReport report = evaluate_checkpoint(a);
    const auto& c = report.combined();
    log(Level::info, "combined: %zu questions, %zu skipped, MAP %.4f, MRR %.4f", c.questions, c.skipped, c.map, c.mrr);
    write_file_atomic(a.report, format_report(report));
    if (!a.rankings.empty()) write_file_atomic(a.rankings, format_rankings(report.lists));
    return 0;
}

// baseline -------------------------------------------------------------------

struct BaselineArgs {
    Common common;
    std::string data, embeddings, checkpoint, train_data, report, encoder = "average";
    std::size_t p = 30;
    std::vector<std::string> types{"who", "when", "where"};
};

int run_baseline(const BaselineArgs& a) {
    const auto types = parse_types(a.types);
    if (a.checkpoint.empty() == a.train_data.empty()) {
        throw UsageError("baseline needs exactly one prototype source: --checkpoint or --train-data");
    }
    require_output_dir(a.report);

    PrototypeSet protos;
    std::uint64_t oov_seed = oov_seed_for(a.common.seed);
    if (!a.checkpoint.empty()) {
        const Checkpoint ck = load_checkpoint(a.checkpoint);
        protos = ck.prototypes;
        if (const auto it = ck.config.find("oov_seed"); it != ck.config.end()) oov_seed = std::stoull(it->second);
    } else {
        protos = select_prototypes(load_data(a.train_data, a.common.header), a.p, a.common.seed, types);
        report_warnings(protos.warnings);
    }
    const EmbeddingTable table = load_table(a.embeddings, std::nullopt, oov_seed);
    const QADataset ds = load_data(a.data, a.common.header);
    const SentenceEncoder encoder = a.encoder == "average" ? averaging_encoder(table)
                                                           : random_encoder(table.dim(), stream_seed(a.common.seed, "random-baseline"));
    const MetricsReport report = evaluate(encoder, ds, protos, parse_rank_mode(a.common.mode));
    const auto& c = report.combined();
    log(Level::info, "%s baseline combined: MAP %.4f, MRR %.4f", a.encoder.c_str(), c.map, c.mrr);
    write_file_atomic(a.report, format_report(report));
    return 0;
}

// sweep-prototypes -----------------------------------------------------------

struct SweepArgs {
    Common common;
    std::string checkpoint, train_data, data, embeddings, report;
    std::vector<std::size_t> p{10, 20, 30, 40, 50};
};

int run_sweep(const SweepArgs& a) {
    require_output_dir(a.report);
    const LoadedModel m = load_model(a.checkpoint, a.embeddings);
    const QADataset source = load_data(a.train_data, a.common.header);
    const QADataset ds = load_data(a.data, a.common.header);
    const auto rows = sweep_prototypes(learned_encoder(m.checkpoint.params, m.table), source, ds, a.p, a.common.seed,
                                       parse_rank_mode(a.common.mode));
    for (const auto& r : rows) {
        report_warnings(r.warnings);
        log(Level::info, "p=%zu: MAP %.4f, MRR %.4f", r.p, r.map, r.mrr);
    }
    write_file_atomic(a.report, format_sweep(rows));
    return 0;
}

// check-gradients ------------------------------------------------------------

int run_check(const GradientSuiteConfig& cfg) {
    const GradientSuiteResult r = run_gradient_suite(cfg);
    std::printf("instances\t%zu\ncoordinates\t%zu\nmax_rel_error_32\t%.3e\nmax_rel_error_64\t%.3e\nfailures\t%zu\n",
                r.instances, r.coordinates, r.max_rel_error_32, r.max_rel_error_64, r.failures);
    if (!r.passed()) {
        log(Level::error, "%zu of %zu instances exceeded tolerance", r.failures, r.instances);
        return 2;
    }
    return 0;
}

// synth ----------------------------------------------------------------------

int run_synth(const SyntheticConfig& cfg, const std::string& out_dir) {
    if (!fs::is_directory(out_dir)) throw ConfigError("output directory " + out_dir + " does not exist");
    const SyntheticCorpus corpus = make_synthetic_corpus(cfg);
    const fs::path base(out_dir);
    save_qa_dataset(corpus.train, (base / "train.tsv").string());
    save_qa_dataset(corpus.test, (base / "test.tsv").string());
    save_embeddings(corpus.table, (base / "vectors.txt").string());
    log(Level::info, "wrote %zu train and %zu test questions, %zu vectors to %s", corpus.train.questions.size(),
        corpus.test.questions.size(), corpus.table.vocab_size(), out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Answer selection by analogical inference over sentence embeddings", "analogia"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);
    app.set_version_flag("--version", "analogia 0.3.0");
    bool verbose = false, quiet = false;
    app.add_flag("-v,--verbose", verbose, "Per-epoch progress on stderr");
    app.add_flag("-q,--quiet", quiet, "Only errors on stderr");

    // gen-quadruples
    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen-quadruples", "Select prototypes and dump labeled training quadruples");
    gen_cmd->add_option("--data", gen.data, "QA TSV: question_id, question, candidate, label")->required();
    gen_cmd->add_option("--out", gen.out, "Quadruple TSV output")->required();
    gen_cmd->add_option("--prototypes", gen.p, "Prototypes per wh-type")->capture_default_str()->check(CLI::PositiveNumber);
    gen_cmd->add_option("--types", gen.types, "Wh-types to use")->delimiter(',')->capture_default_str();
    gen_cmd->add_option("--negatives", gen.negatives, "Negatives per positive")->capture_default_str();
    gen_cmd->add_option("--prototypes-out", gen.prototypes_out, "Also write the selected prototypes");
    add_seed(gen_cmd, gen.common);
    add_header(gen_cmd, gen.common);

    // train
    TrainArgs tr;
    auto* train_cmd = app.add_subcommand("train", "Train the sentence encoder and write a checkpoint directory");
    train_cmd->add_option("--data", tr.data, "Training QA TSV")->required();
    train_cmd->add_option("--embeddings", tr.embeddings, "Word vectors in text format")->required();
    train_cmd->add_option("--out", tr.out, "Checkpoint directory")->required();
    train_cmd->add_option("--prototypes", tr.p, "Prototypes per wh-type")->capture_default_str()->check(CLI::PositiveNumber);
    train_cmd->add_option("--types", tr.types, "Wh-types to use")->delimiter(',')->capture_default_str();
    train_cmd->add_option("--epochs", tr.cfg.epochs)->capture_default_str();
    train_cmd->add_option("--batch-size", tr.cfg.batch_size)->capture_default_str();
    train_cmd->add_option("--lr", tr.cfg.adam.lr)->capture_default_str();
    train_cmd->add_option("--weight-decay", tr.cfg.adam.weight_decay, "Decoupled weight decay")->capture_default_str();
    train_cmd->add_option("--dropout", tr.cfg.dropout, "Dropout on pooled sentence vectors")->capture_default_str();
    train_cmd->add_option("--margin", tr.cfg.hp.margin, "Energy margin for negatives")->capture_default_str();
    train_cmd->add_option("--loss-variant", tr.loss_variant, "hinge or literal")
        ->check(CLI::IsMember({"hinge", "literal"}))
        ->capture_default_str();
    train_cmd->add_option("--l2", tr.cfg.hp.l2_lambda, "L2 coefficient added to the loss")->capture_default_str();
    train_cmd->add_option("--output-dim", tr.cfg.output_dim, "Sentence vector size (2 x GRU hidden)")->capture_default_str();
    train_cmd->add_option("--negatives", tr.cfg.negatives_per_positive, "Negatives per positive")->capture_default_str();
    train_cmd->add_option("--clip-norm", tr.cfg.clip_norm, "Global gradient norm clip, 0 disables")->capture_default_str();
    train_cmd->add_option("--loss-log", tr.loss_log, "Loss log path (default: <out>/loss_log.tsv)");
    add_seed(train_cmd, tr.common);
    add_header(train_cmd, tr.common);

    // rank and eval
    EvalArgs rk, ev;
    auto* rank_cmd = app.add_subcommand("rank", "Rank candidates with a trained checkpoint");
    auto* eval_cmd = app.add_subcommand("eval", "MAP/MRR per wh-type with a trained checkpoint");
    for (auto [cmd, args] : {std::pair{rank_cmd, &rk}, std::pair{eval_cmd, &ev}}) {
        cmd->add_option("--checkpoint", args->checkpoint, "Checkpoint directory")->required();
        cmd->add_option("--data", args->data, "QA TSV to rank")->required();
        cmd->add_option("--embeddings", args->embeddings, "Word vectors (default: the checkpoint's)");
        add_mode(cmd, args->common);
        add_header(cmd, args->common);
    }
    rank_cmd->add_option("--out", rk.rankings, "Rankings TSV output")->required();
    eval_cmd->add_option("--report", ev.report, "Report TSV output")->required();
    eval_cmd->add_option("--rankings", ev.rankings, "Also write per-candidate rankings");

    // baseline
    BaselineArgs bl;
    auto* base_cmd = app.add_subcommand("baseline", "Same ranking with averaged or random sentence vectors");
    base_cmd->add_option("--data", bl.data, "QA TSV to rank")->required();
    base_cmd->add_option("--embeddings", bl.embeddings, "Word vectors in text format")->required();
    base_cmd->add_option("--report", bl.report, "Report TSV output")->required();
    auto* bl_ck = base_cmd->add_option("--checkpoint", bl.checkpoint, "Take prototypes from this checkpoint");
    auto* bl_td = base_cmd->add_option("--train-data", bl.train_data, "Select prototypes from this QA TSV");
    bl_ck->excludes(bl_td);
    base_cmd->add_option("--prototypes", bl.p, "Prototypes per wh-type with --train-data")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    base_cmd->add_option("--types", bl.types, "Wh-types to use")->delimiter(',')->capture_default_str();
    base_cmd->add_option("--encoder", bl.encoder, "average or random")
        ->check(CLI::IsMember({"average", "random"}))
        ->capture_default_str();
    add_seed(base_cmd, bl.common);
    add_mode(base_cmd, bl.common);
    add_header(base_cmd, bl.common);

    // sweep-prototypes
    SweepArgs sw;
    auto* sweep_cmd = app.add_subcommand("sweep-prototypes", "Evaluate a checkpoint for several prototype counts");
    sweep_cmd->add_option("--checkpoint", sw.checkpoint, "Checkpoint directory")->required();
    sweep_cmd->add_option("--train-data", sw.train_data, "QA TSV to draw prototypes from")->required();
    sweep_cmd->add_option("--data", sw.data, "QA TSV to evaluate")->required();
    sweep_cmd->add_option("--embeddings", sw.embeddings, "Word vectors (default: the checkpoint's)");
    sweep_cmd->add_option("--p", sw.p, "Prototype counts")->delimiter(',')->capture_default_str()->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--report", sw.report, "Sweep TSV output")->required();
    add_seed(sweep_cmd, sw.common);
    add_mode(sweep_cmd, sw.common);
    add_header(sweep_cmd, sw.common);

    // check-gradients
    GradientSuiteConfig gc;
    Common gc_common;
    auto* check_cmd = app.add_subcommand("check-gradients", "Finite-difference check of the full training loss");
    check_cmd->add_option("--instances", gc.instances)->capture_default_str();
    check_cmd->add_option("--max-steps", gc.max_steps)->capture_default_str()->check(CLI::PositiveNumber);
    check_cmd->add_option("--max-hidden", gc.max_hidden)->capture_default_str()->check(CLI::PositiveNumber);
    check_cmd->add_option("--max-input", gc.max_input)->capture_default_str()->check(CLI::PositiveNumber);
    add_seed(check_cmd, gc_common);

    // synth
    SyntheticConfig sc;
    std::string synth_out;
    auto* synth_cmd = app.add_subcommand("synth", "Write the synthetic who/when/where corpus and its word vectors");
    synth_cmd->add_option("--out-dir", synth_out, "Existing directory for train.tsv, test.tsv, vectors.txt")->required();
    synth_cmd->add_option("--train-per-type", sc.train_per_type)->capture_default_str();
    synth_cmd->add_option("--test-per-type", sc.test_per_type)->capture_default_str();
    synth_cmd->add_option("--candidates", sc.candidates)->capture_default_str();
    synth_cmd->add_option("--fillers", sc.fillers)->capture_default_str();
    synth_cmd->add_option("--markers", sc.markers_per_type, "Answer markers per type")->capture_default_str();
    synth_cmd->add_option("--dim", sc.embedding_dim, "Word vector size")->capture_default_str();
    synth_cmd->add_option("--corpus-seed", sc.seed)->capture_default_str();

    // Required flags may also come from the settings file, so requiredness is
    // checked after the file has been merged.
    std::map<CLI::App*, std::vector<CLI::Option*>> required;
    std::map<CLI::App*, std::string> config_paths;
    for (CLI::App* cmd : app.get_subcommands({})) {
        for (CLI::Option* opt : cmd->get_options()) {
            if (!opt->get_required()) continue;
            opt->required(false);
            opt->description(opt->get_description() + " (required)");
            required[cmd].push_back(opt);
        }
        cmd->add_option("--config", config_paths[cmd], "Flat key=value settings; command line flags take precedence");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }
    g_verbosity = quiet ? 0 : (verbose ? 2 : 1);

    CLI::App* active = app.get_subcommands().front();
    try {
        if (!config_paths[active].empty()) apply_settings(active, config_paths[active]);
        if (CLI::Option* seed = active->get_option_no_throw("--seed"); seed && seed->count() == 0) {
            if (const char* env = std::getenv("ANALOGIA_SEED")) set_option(seed, env, "ANALOGIA_SEED");
        }
        for (CLI::Option* opt : required[active]) {
            if (opt->count() == 0) throw UsageError(opt->get_name() + " is required");
        }
    } catch (const UsageError& e) {
        std::fprintf(stderr, "analogia: usage error: %s\n\n%s", e.what(), active->help().c_str());
        return 1;
    } catch (const Error& e) {
        log(Level::error, "%s", e.what());
        return 2;
    }

    g_verbosity = quiet ? 0 : (verbose ? 2 : 1);

    try {
        if (*gen_cmd) return run_gen(gen);
        if (*train_cmd) return run_train(tr);
        if (*rank_cmd) return run_rank(rk);
        if (*eval_cmd) return run_eval(ev);
        if (*base_cmd) return run_baseline(bl);
        if (*sweep_cmd) return run_sweep(sw);
        if (*check_cmd) {
            gc.seed = gc_common.seed;
            return run_check(gc);
        }
        if (*synth_cmd) return run_synth(sc, synth_out);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "analogia: usage error: %s\nRun with --help for more information.\n", e.what());
        return 1;
    } catch (const Error& e) {
        log(Level::error, "%s", e.what());
        return 2;
    } catch (const std::exception& e) {
        log(Level::error, "%s", e.what());
        return 2;
    }
    return 1;
}
