// boundseg: train / tune / segment / eval for the MWE segmentation
// toolkit.  Exit codes: 0 success, 2 bad arguments, 3 parse failure,
// 4 model/format mismatch, 1 anything else.

#include <atomic>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "boundseg/boundseg.hpp"

namespace {

using namespace boundseg;

constexpr int kExitBadArgs = 2;
constexpr int kExitParse = 3;
constexpr int kExitMismatch = 4;

// "-" means the standard stream.
template <typename Fn>
auto with_input(const std::string& path, Fn&& fn) {
  if (path == "-") return fn(std::cin, std::string("<stdin>"));
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  return fn(in, path);
}

template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  fn(out);
}

struct RunConfig {
  std::string format = "dimsum";
  std::string model;
  std::string input;
  std::string gold;       // eval only
  std::string predicted;  // eval only
  std::string output;
  std::string support_lexicon;
  std::string support_context;
  std::string grid_out;
  bool use_lfd = false;
  bool use_pos = false;
  bool lowercase = false;
  bool raw = false;
  double q_tok = 0.5;
  bool q_tok_set = false;
  double q_pos = 0.5;
  bool q_pos_set = false;
  std::size_t gap_window = 3;
  std::size_t folds = 8;
  std::size_t workers = 1;
  std::optional<std::uint64_t> seed;
};

CorpusFormat format_of(const RunConfig& cfg) {
  return cfg.format == "dimsum" ? CorpusFormat::Dimsum
                                : CorpusFormat::Parseme;
}

EvalScheme scheme_of(const RunConfig& cfg) {
  return format_of(cfg) == CorpusFormat::Dimsum ? EvalScheme::Link
                                                : EvalScheme::Token;
}

std::vector<AnnotatedSentence> read_sentences(const RunConfig& cfg,
                                              const std::string& path) {
  return with_input(path, [&](std::istream& in, const std::string& source) {
    return cfg.raw ? read_raw(in, source)
                   : read_corpus(in, format_of(cfg), source);
  });
}

TrainOptions train_options(const RunConfig& cfg) {
  TrainOptions opts;
  opts.use_pos = cfg.use_pos;
  opts.lowercase = cfg.lowercase;
  opts.gap_window = cfg.gap_window;
  opts.q_tok = Threshold(cfg.q_tok);
  if (cfg.use_pos) opts.q_pos = Threshold(cfg.q_pos);
  if (!cfg.support_lexicon.empty())
    opts.support_forms = with_input(
        cfg.support_lexicon, [](std::istream& in, const std::string& source) {
          return read_support_lexicon(in, source);
        });
  if (!cfg.support_context.empty())
    opts.support_context = with_input(
        cfg.support_context, [](std::istream& in, const std::string& source) {
          return read_support_context(in, source);
        });
  return opts;
}

// Per-sentence fan-out with results stitched back in input order.
void for_each_sentence(std::vector<AnnotatedSentence>& sentences,
                       std::size_t workers,
                       const std::function<void(AnnotatedSentence&)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, sentences.size()));
  if (workers <= 1) {
    for (AnnotatedSentence& sent : sentences) fn(sent);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  const auto work = [&] {
    try {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= sentences.size()) return;
        fn(sentences[i]);
      }
    } catch (...) {
      const std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

int run_train(const RunConfig& cfg) {
  const auto corpus = read_sentences(cfg, cfg.input);
  const SegmenterModel model = train(corpus, train_options(cfg));
  save_bundle(cfg.model, model);
  std::cout << "sentences\t" << corpus.size() << '\n'
            << "surface_entries\t" << model.surface_stats.entry_count() << '\n'
            << "pos_entries\t"
            << (model.pos_stats ? model.pos_stats->entry_count() : 0) << '\n'
            << "lexicon_forms\t" << model.lexicon.size() << '\n'
            << "bundle\t" << cfg.model << '\n';
  return 0;
}

int run_tune(const RunConfig& cfg) {
  SegmenterModel model = load_bundle(cfg.model);
  const auto corpus = read_sentences(cfg, cfg.input);

  RunConfig train_cfg = cfg;
  train_cfg.use_pos = model.pos_stats.has_value();
  train_cfg.lowercase = model.lowercase;
  train_cfg.gap_window = model.gap_window;
  TuneOptions opts;
  opts.folds = cfg.folds;
  opts.workers = cfg.workers;
  opts.scheme = scheme_of(cfg);
  opts.train = train_options(train_cfg);

  const GridResult base = grid_search(corpus, opts);
  const GridResult* final_grid = &base;
  GridResult rescan;
  if (cfg.use_lfd) {
    rescan = grid_search_lfd(corpus, base, opts);
    final_grid = &rescan;
  }

  model.q_tok = Threshold(grid_value(final_grid->best.tok_index));
  if (model.pos_stats)
    model.q_pos = Threshold(grid_value(*final_grid->best.pos_index));
  save_bundle(cfg.model, model);

  if (!cfg.grid_out.empty())
    with_output(cfg.grid_out,
                [&](std::ostream& out) { write_grid(out, *final_grid); });

  std::cout << "best_q_tok\t" << grid_value(final_grid->best.tok_index) << '\n';
  if (final_grid->has_pos)
    std::cout << "best_q_pos\t" << grid_value(*final_grid->best.pos_index)
              << '\n';
  std::cout << "mean_f1\t" << final_grid->best.mean_f1 << '\n'
            << "points\t" << final_grid->points.size() << '\n'
            << "folds\t" << final_grid->folds << '\n';
  return 0;
}

// Demo mode: no model, boundaries drawn at random per sentence.  Seeding
// is explicit and per-sentence (seed + index), so output is reproducible
// and independent of worker count.
void stochastic_spans(AnnotatedSentence& sent, Threshold q,
                      std::uint64_t seed) {
  std::vector<Boundary> boundaries;
  boundaries.reserve(sent.boundaries.size());
  for (const std::string& surface : sent.boundaries)
    boundaries.push_back(Boundary{surface, std::nullopt});
  SymbolSequence seq(Channel::Surface, sent.surfaces(), std::move(boundaries));
  const SymbolSequence drawn = stochastic_partition(std::move(seq), q, seed);
  sent.mwes.clear();
  for (const SegmentRange& range : segments_of(drawn)) {
    if (range.length() < 2) continue;
    MweSpan span;
    for (std::size_t t = range.begin; t < range.end; ++t)
      span.indices.push_back(t);
    sent.mwes.push_back(std::move(span));
  }
}

int run_segment(const RunConfig& cfg) {
  auto sentences = read_sentences(cfg, cfg.input);

  if (cfg.seed) {
    const Threshold q(cfg.q_tok);
    for (std::size_t i = 0; i < sentences.size(); ++i)
      stochastic_spans(sentences[i], q, *cfg.seed + i);
  } else {
    SegmenterModel model = load_bundle(cfg.model);
    if (cfg.q_tok_set) model.q_tok = Threshold(cfg.q_tok);
    if (cfg.q_pos_set) {
      if (!model.pos_stats)
        throw MismatchError("--q-pos given but the model has no POS channel");
      model.q_pos = Threshold(cfg.q_pos);
    }
    for_each_sentence(sentences, cfg.workers, [&](AnnotatedSentence& sent) {
      sent.mwes = segment(model, sent, cfg.use_lfd);
    });
  }

  // Predictions carry no strength markers of their own.
  for (AnnotatedSentence& sent : sentences)
    for (Token& tok : sent.tokens) tok.strength.clear();

  with_output(cfg.output, [&](std::ostream& out) {
    write_corpus(out, format_of(cfg), sentences);
  });
  return 0;
}

int run_eval(const RunConfig& cfg) {
  const auto gold =
      with_input(cfg.gold, [&](std::istream& in, const std::string& source) {
        return read_corpus(in, format_of(cfg), source);
      });
  const auto predicted = with_input(
      cfg.predicted, [&](std::istream& in, const std::string& source) {
        return read_corpus(in, format_of(cfg), source);
      });
  const EvalResult result = evaluate(gold, predicted, scheme_of(cfg));
  format_report(std::cout, result);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Supervised MWE segmentation toolkit"};
  app.set_config("--config", "",
                 "Key-value config file; command-line flags take precedence");
  app.require_subcommand(1);

  RunConfig cfg;
  const auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", cfg.format, "Corpus format")
        ->check(CLI::IsMember({"dimsum", "parseme"}))
        ->capture_default_str();
  };
  const auto threshold_range = CLI::Range(0.0, 1.0);

  CLI::App* cmd_train =
      app.add_subcommand("train", "Learn a model bundle from a gold corpus");
  add_format(cmd_train);
  cmd_train->add_option("input", cfg.input, "Gold corpus file, or - for stdin")
      ->required();
  cmd_train->add_option("--model", cfg.model, "Bundle directory to write")
      ->required();
  cmd_train->add_flag("--pos", cfg.use_pos, "Train the POS channel too");
  cmd_train->add_flag("--lowercase", cfg.lowercase,
                      "Lowercase surfaces before counting");
  cmd_train->add_option("--gap-window", cfg.gap_window,
                        "Gap search window (in segments)")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1000}))
      ->capture_default_str();
  cmd_train->add_option("--q-tok", cfg.q_tok, "Surface threshold to store")
      ->check(threshold_range)
      ->capture_default_str();
  cmd_train->add_option("--q-pos", cfg.q_pos, "POS threshold to store")
      ->check(threshold_range)
      ->capture_default_str();
  cmd_train->add_option("--support-lexicon", cfg.support_lexicon,
                        "Bare MWE forms, one per line (lexicon only)");
  cmd_train->add_option("--support-context", cfg.support_context,
                        "Support sentences with [[...]] MWE markup");

  CLI::App* cmd_tune = app.add_subcommand(
      "tune", "Grid-search thresholds by cross-validation, update a bundle");
  add_format(cmd_tune);
  cmd_tune->add_option("input", cfg.input, "Gold corpus file, or - for stdin")
      ->required();
  cmd_tune->add_option("--model", cfg.model, "Bundle directory to update")
      ->required();
  cmd_tune->add_flag("--lfd", cfg.use_lfd,
                     "Also run the LFD-constrained rescan");
  cmd_tune->add_option("--folds", cfg.folds, "Cross-validation folds")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1000}))
      ->capture_default_str();
  cmd_tune->add_option("--workers", cfg.workers, "Grid worker threads")
      ->check(CLI::Range(std::size_t{1}, std::size_t{512}))
      ->capture_default_str();
  cmd_tune->add_option("--grid-out", cfg.grid_out,
                       "Write the scanned surface as q_tok<TAB>q_pos<TAB>F1");
  cmd_tune->add_option("--support-lexicon", cfg.support_lexicon,
                       "Bare MWE forms folded into every fold's lexicon");
  cmd_tune->add_option("--support-context", cfg.support_context,
                       "Support sentences folded into every fold's training");

  CLI::App* cmd_segment =
      app.add_subcommand("segment", "Predict MWE spans for new text");
  add_format(cmd_segment);
  cmd_segment->add_option("input", cfg.input, "Input file, or - for stdin")
      ->required();
  CLI::Option* opt_model =
      cmd_segment->add_option("--model", cfg.model, "Bundle directory");
  cmd_segment->add_option("--output,-o", cfg.output,
                          "Output file (default: stdout)");
  cmd_segment->add_flag("--raw", cfg.raw,
                        "Input is whitespace-tokenized plain text");
  cmd_segment->add_flag("--lfd", cfg.use_lfd, "Apply LFD pruning");
  CLI::Option* opt_qtok =
      cmd_segment
          ->add_option("--q-tok", cfg.q_tok, "Override the bundle's q_tok")
          ->check(threshold_range);
  CLI::Option* opt_qpos =
      cmd_segment
          ->add_option("--q-pos", cfg.q_pos, "Override the bundle's q_pos")
          ->check(threshold_range);
  cmd_segment->add_option("--workers", cfg.workers, "Worker threads")
      ->check(CLI::Range(std::size_t{1}, std::size_t{512}))
      ->capture_default_str();
  CLI::Option* opt_seed = cmd_segment->add_option(
      "--seed", cfg.seed,
      "Stochastic demo mode: partition at random with this seed");
  opt_seed->excludes(opt_model);
  opt_seed->needs(opt_qtok);

  CLI::App* cmd_eval =
      app.add_subcommand("eval", "Score predictions against gold");
  add_format(cmd_eval);
  cmd_eval->add_option("gold", cfg.gold, "Gold corpus file")->required();
  cmd_eval->add_option("predicted", cfg.predicted, "Predicted corpus file")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitBadArgs;
  }

  cfg.q_tok_set = opt_qtok->count() > 0;
  cfg.q_pos_set = opt_qpos->count() > 0;
  if (cmd_segment->parsed() && !cfg.seed && cfg.model.empty()) {
    std::cerr << "segment requires --model (or --seed for the demo mode)\n";
    return kExitBadArgs;
  }

  try {
    if (cmd_train->parsed()) return run_train(cfg);
    if (cmd_tune->parsed()) return run_tune(cfg);
    if (cmd_segment->parsed()) return run_segment(cfg);
    return run_eval(cfg);
  } catch (const boundseg::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const MismatchError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitMismatch;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
