#pragma once

// Threshold tuning: grid scan over (q_tok, q_pos) with k-fold
// cross-validation, and the LFD rescan constrained to thresholds no
// smaller than the unpruned optimum.
//
// Fold models depend only on the training split, not on thresholds, so
// each fold is trained once and every grid point reuses the same eight
// models.  Points are farmed out to a small thread pool; results land in
// pre-assigned slots, which keeps the output identical for any worker
// count.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <vector>

#include "boundseg/annotated.hpp"
#include "boundseg/core.hpp"
#include "boundseg/errors.hpp"
#include "boundseg/evaluation.hpp"
#include "boundseg/model_io.hpp"
#include "boundseg/segmenter.hpp"

namespace boundseg {

struct GridPoint {
  int tok_index = 0;                  // threshold value = index / 100
  std::optional<int> pos_index;
  double mean_f1 = 0.0;
};

struct GridResult {
  std::size_t folds = 0;
  bool has_pos = false;
  std::vector<GridPoint> points;      // q_tok-major scan order
  GridPoint best;
};

inline double grid_value(int index) { return index / 100.0; }

struct TuneOptions {
  std::size_t folds = 8;
  std::size_t workers = 1;
  EvalScheme scheme = EvalScheme::Link;
  TrainOptions train;
};

namespace detail {

struct Fold {
  SegmenterModel model{};
  std::vector<const AnnotatedSentence*> heldout;
  std::vector<std::vector<MweSpan>> gold;
};

// Round-robin fold split: sentence i is held out by fold i % folds.
inline std::vector<Fold> build_folds(
    const std::vector<AnnotatedSentence>& corpus, const TuneOptions& opts) {
  if (opts.folds < 2) throw std::invalid_argument("folds must be >= 2");
  if (corpus.size() < opts.folds)
    throw Error("corpus has " + std::to_string(corpus.size()) +
                " sentences but " + std::to_string(opts.folds) +
                " folds were requested");
  std::vector<Fold> folds(opts.folds);
  for (std::size_t f = 0; f < opts.folds; ++f) {
    std::vector<AnnotatedSentence> training;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      if (i % opts.folds == f) {
        folds[f].heldout.push_back(&corpus[i]);
        folds[f].gold.push_back(corpus[i].mwes);
      } else {
        training.push_back(corpus[i]);
      }
    }
    folds[f].model = train(training, opts.train);
  }
  return folds;
}

inline double eval_point(const std::vector<Fold>& folds, Threshold q_tok,
                         std::optional<Threshold> q_pos, bool use_lfd,
                         EvalScheme scheme) {
  double sum = 0.0;
  for (const Fold& fold : folds) {
    std::vector<std::vector<MweSpan>> predicted;
    predicted.reserve(fold.heldout.size());
    for (const AnnotatedSentence* sent : fold.heldout)
      predicted.push_back(
          segment_with(fold.model, *sent, use_lfd, q_tok, q_pos));
    const EvalResult result = scheme == EvalScheme::Link
                                  ? eval_links(fold.gold, predicted)
                                  : eval_tokens(fold.gold, predicted);
    sum += result.f1;
  }
  return sum / static_cast<double>(folds.size());
}

// Fills each point's mean_f1 slot in place, in parallel.
inline void run_points(const std::vector<Fold>& folds, bool use_lfd,
                       EvalScheme scheme, std::size_t workers,
                       std::vector<GridPoint>& points) {
  workers = std::max<std::size_t>(1, std::min(workers, points.size()));
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  const auto work = [&] {
    try {
      while (true) {
        const std::size_t p = next.fetch_add(1);
        if (p >= points.size()) return;
        GridPoint& point = points[p];
        std::optional<Threshold> q_pos;
        if (point.pos_index) q_pos = Threshold(grid_value(*point.pos_index));
        point.mean_f1 = eval_point(folds, Threshold(grid_value(point.tok_index)),
                                   q_pos, use_lfd, scheme);
      }
    } catch (...) {
      const std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
}

// Larger F1 wins; ties prefer larger q_tok, then larger q_pos.
inline GridPoint pick_best(const std::vector<GridPoint>& points) {
  const GridPoint* best = &points.front();
  for (const GridPoint& point : points) {
    if (point.mean_f1 > best->mean_f1 ||
        (point.mean_f1 == best->mean_f1 &&
         (point.tok_index > best->tok_index ||
          (point.tok_index == best->tok_index &&
           point.pos_index.value_or(0) > best->pos_index.value_or(0)))))
      best = &point;
  }
  return *best;
}

}  // namespace detail

/// Mean F1 over a deterministic k-fold split at one threshold pair.
inline double cross_validate(const std::vector<AnnotatedSentence>& corpus,
                             Threshold q_tok, std::optional<Threshold> q_pos,
                             bool use_lfd, const TuneOptions& opts = {}) {
  if (opts.train.use_pos != q_pos.has_value())
    throw Error("q_pos must be given exactly when POS training is enabled");
  const auto folds = detail::build_folds(corpus, opts);
  return detail::eval_point(folds, q_tok, q_pos, use_lfd, opts.scheme);
}

/// Full scan over the threshold grid {0, 0.01, ..., 1} (squared when the
/// POS channel is on), without LFD.
inline GridResult grid_search(const std::vector<AnnotatedSentence>& corpus,
                              const TuneOptions& opts = {}) {
  GridResult result;
  result.folds = opts.folds;
  result.has_pos = opts.train.use_pos;
  for (int tok = 0; tok <= 100; ++tok) {
    if (!result.has_pos) {
      result.points.push_back({tok, std::nullopt, 0.0});
      continue;
    }
    for (int pos = 0; pos <= 100; ++pos)
      result.points.push_back({tok, pos, 0.0});
  }
  const auto folds = detail::build_folds(corpus, opts);
  detail::run_points(folds, /*use_lfd=*/false, opts.scheme, opts.workers,
                     result.points);
  result.best = detail::pick_best(result.points);
  return result;
}

/// The LFD rescan: same protocol with pruning on, restricted to points
/// componentwise no smaller than the base optimum.
inline GridResult grid_search_lfd(const std::vector<AnnotatedSentence>& corpus,
                                  const GridResult& base,
                                  const TuneOptions& opts = {}) {
  if (base.has_pos != opts.train.use_pos)
    throw MismatchError(
        "base grid and rescan disagree about the POS channel");
  if (base.points.empty()) throw Error("base grid has no points");
  GridResult result;
  result.folds = opts.folds;
  result.has_pos = base.has_pos;
  for (int tok = base.best.tok_index; tok <= 100; ++tok) {
    if (!result.has_pos) {
      result.points.push_back({tok, std::nullopt, 0.0});
      continue;
    }
    for (int pos = base.best.pos_index.value_or(0); pos <= 100; ++pos)
      result.points.push_back({tok, pos, 0.0});
  }
  const auto folds = detail::build_folds(corpus, opts);
  detail::run_points(folds, /*use_lfd=*/true, opts.scheme, opts.workers,
                     result.points);
  result.best = detail::pick_best(result.points);
  return result;
}

/// Tab-separated dump of the scanned surface, one `q_tok q_pos F1` row
/// per point; the q_pos column is NA for surface-only scans.
inline void write_grid(std::ostream& out, const GridResult& result) {
  const auto fixed2 = [](int index) {
    std::string s = std::to_string(index / 100) + ".";
    s += static_cast<char>('0' + (index / 10) % 10);
    s += static_cast<char>('0' + index % 10);
    return s;
  };
  for (const GridPoint& point : result.points) {
    out << fixed2(point.tok_index) << '\t'
        << (point.pos_index ? fixed2(*point.pos_index) : std::string("NA"))
        << '\t' << detail::format_double(point.mean_f1) << '\n';
  }
}

}  // namespace boundseg
