// Copyright 2026 The sparsetopic Authors.
// SPDX-License-Identifier: Apache-2.0
//
// extern-C surface over the C++ core: opaque handles, status codes, and a
// thread-local last-error message.

#include "sparsetopic.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "checkpoint.hpp"
#include "corpus.hpp"
#include "error.hpp"
#include "metrics.hpp"
#include "topicmodel.hpp"

using namespace sparsetopic;

struct st_corpus {
  Corpus corpus;
};

struct st_testset {
  std::vector<SplitDocument> docs;
};

struct st_model {
  Model model;
};

struct st_trace {
  std::vector<TraceRow> rows;
  bool diverged = false;
};

struct st_report {
  std::vector<std::pair<std::string, double>> entries;
};

namespace {

thread_local std::string g_last_error;

st_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument:
      return ST_ERROR_INVALID_ARGUMENT;
    case ErrorCode::io:
      return ST_ERROR_IO;
    case ErrorCode::data:
      return ST_ERROR_DATA;
    case ErrorCode::numeric:
      return ST_ERROR_NUMERIC;
    case ErrorCode::diverged:
      return ST_DIVERGED;
    case ErrorCode::version:
      return ST_ERROR_VERSION;
  }
  return ST_ERROR_INVALID_ARGUMENT;
}

template <typename Fn>
st_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return ST_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ST_ERROR_INVALID_ARGUMENT;
  }
}

st_status arg_error(const char* msg) {
  g_last_error = msg;
  return ST_ERROR_INVALID_ARGUMENT;
}

TrainConfig to_config(const st_train_options& o) {
  TrainConfig cfg;
  cfg.variant = o.variant == ST_VARIANT_NSMTM ? Variant::nsmtm : Variant::nsmdm;
  cfg.regularizer = o.regularizer == ST_REGULARIZER_KL ? RegularizerKind::kl
                                                       : RegularizerKind::rw;
  cfg.topics = o.topics;
  cfg.latent_dim = o.latent_dim;
  cfg.embed_dim = o.embed_dim;
  cfg.hidden_dim = o.hidden_dim;
  cfg.epochs = o.epochs;
  cfg.batch_size = o.batch_size;
  cfg.gamma = o.gamma;
  cfg.learning_rate = o.learning_rate;
  cfg.dropout = o.dropout;
  cfg.prior_mean = o.prior_mean;
  cfg.prior_sigma = o.prior_sigma;
  cfg.eps_floor = o.eps_floor;
  cfg.seed = o.seed;
  return cfg;
}

}  // namespace

extern "C" {

const char* st_version(void) { return "0.1.0"; }

const char* st_last_error(void) { return g_last_error.c_str(); }

void st_train_options_init(st_train_options* opts) {
  if (opts == nullptr) return;
  const TrainConfig cfg;
  opts->variant = cfg.variant == Variant::nsmtm ? ST_VARIANT_NSMTM : ST_VARIANT_NSMDM;
  opts->regularizer =
      cfg.regularizer == RegularizerKind::kl ? ST_REGULARIZER_KL : ST_REGULARIZER_RW;
  opts->topics = cfg.topics;
  opts->latent_dim = cfg.latent_dim;
  opts->embed_dim = cfg.embed_dim;
  opts->hidden_dim = cfg.hidden_dim;
  opts->epochs = cfg.epochs;
  opts->batch_size = cfg.batch_size;
  opts->gamma = cfg.gamma;
  opts->learning_rate = cfg.learning_rate;
  opts->dropout = cfg.dropout;
  opts->prior_mean = cfg.prior_mean;
  opts->prior_sigma = cfg.prior_sigma;
  opts->eps_floor = cfg.eps_floor;
  opts->seed = cfg.seed;
}

st_status st_corpus_from_text_file(const char* path, int min_count,
                                   int max_vocab, st_corpus** out) {
  if (path == nullptr || out == nullptr) return arg_error("null argument");
  return guarded([&] {
    auto handle = new st_corpus{build_corpus_from_text_file(path, min_count, max_vocab)};
    *out = handle;
  });
}

st_status st_corpus_from_bow_files(const char* bow_path, const char* vocab_path,
                                   st_corpus** out) {
  if (bow_path == nullptr || vocab_path == nullptr || out == nullptr) {
    return arg_error("null argument");
  }
  return guarded([&] { *out = new st_corpus{load_bow(bow_path, vocab_path)}; });
}

st_status st_corpus_save_bow(const st_corpus* corpus, const char* bow_path,
                             const char* vocab_path) {
  if (corpus == nullptr || bow_path == nullptr || vocab_path == nullptr) {
    return arg_error("null argument");
  }
  return guarded([&] { save_bow(corpus->corpus, bow_path, vocab_path); });
}

void st_corpus_free(st_corpus* corpus) { delete corpus; }

size_t st_corpus_num_documents(const st_corpus* corpus) {
  return corpus == nullptr ? 0 : corpus->corpus.docs.size();
}

size_t st_corpus_vocab_size(const st_corpus* corpus) {
  return corpus == nullptr ? 0 : corpus->corpus.vocab.terms.size();
}

const char* st_corpus_term(const st_corpus* corpus, size_t term_id) {
  if (corpus == nullptr || term_id >= corpus->corpus.vocab.terms.size()) {
    return nullptr;
  }
  return corpus->corpus.vocab.terms[term_id].c_str();
}

int64_t st_corpus_empty_docs_dropped(const st_corpus* corpus) {
  return corpus == nullptr ? 0 : corpus->corpus.empty_docs_dropped;
}

st_status st_corpus_split(const st_corpus* corpus, double test_fraction,
                          uint64_t seed, st_corpus** train_out,
                          st_testset** test_out) {
  if (corpus == nullptr || train_out == nullptr || test_out == nullptr) {
    return arg_error("null argument");
  }
  return guarded([&] {
    SplitResult split = split_heldout(corpus->corpus, test_fraction, seed);
    *train_out = new st_corpus{std::move(split.train)};
    *test_out = new st_testset{std::move(split.test)};
  });
}

void st_testset_free(st_testset* test) { delete test; }

size_t st_testset_size(const st_testset* test) {
  return test == nullptr ? 0 : test->docs.size();
}

st_status st_train(const st_corpus* corpus, const st_train_options* opts,
                   st_progress_fn progress, void* user, st_model** model_out,
                   st_trace** trace_out) {
  if (corpus == nullptr || opts == nullptr || model_out == nullptr) {
    return arg_error("null argument");
  }
  TrainResult result;
  const st_status rc = guarded([&] {
    // The core loop has no per-epoch hook; replaying the trace keeps the C
    // surface simple while epochs stream through the callback.
    result = train(corpus->corpus, to_config(*opts));
  });
  if (rc != ST_OK) return rc;

  if (progress != nullptr) {
    int last_epoch = 0;
    for (std::size_t i = 0; i < result.epoch_mean_loss.size(); ++i) {
      last_epoch = static_cast<int>(i) + 1;
      progress(last_epoch, opts->epochs, result.epoch_mean_loss[i], user);
    }
  }

  const bool diverged = result.diverged;
  if (trace_out != nullptr) {
    *trace_out = new st_trace{std::move(result.trace), diverged};
  }
  *model_out = new st_model{std::move(result.model)};
  if (diverged) {
    g_last_error = "training diverged (non-finite loss) at epoch " +
                   std::to_string(result.diverged_epoch) + ", batch " +
                   std::to_string(result.diverged_batch);
    return ST_DIVERGED;
  }
  return ST_OK;
}

void st_trace_free(st_trace* trace) { delete trace; }

size_t st_trace_num_rows(const st_trace* trace) {
  return trace == nullptr ? 0 : trace->rows.size();
}

st_status st_trace_row(const st_trace* trace, size_t i, int* epoch, int* batch,
                       double* loss, double* recon, double* reg_term) {
  if (trace == nullptr || i >= trace->rows.size()) {
    return arg_error("trace row out of range");
  }
  const TraceRow& row = trace->rows[i];
  if (epoch != nullptr) *epoch = row.epoch;
  if (batch != nullptr) *batch = row.batch;
  if (loss != nullptr) *loss = row.loss;
  if (recon != nullptr) *recon = row.recon;
  if (reg_term != nullptr) *reg_term = row.reg_term;
  return ST_OK;
}

int st_trace_diverged(const st_trace* trace) {
  return trace != nullptr && trace->diverged ? 1 : 0;
}

void st_model_free(st_model* model) { delete model; }

st_status st_model_save(const st_model* model, const char* path) {
  if (model == nullptr || path == nullptr) return arg_error("null argument");
  return guarded([&] { save_model(model->model, path); });
}

st_status st_model_load(const char* path, st_model** out) {
  if (path == nullptr || out == nullptr) return arg_error("null argument");
  return guarded([&] { *out = new st_model{load_model(path)}; });
}

int st_model_variant(const st_model* model) {
  if (model == nullptr) return -1;
  return model->model.cfg.variant == Variant::nsmtm ? ST_VARIANT_NSMTM
                                                    : ST_VARIANT_NSMDM;
}

int st_model_num_topics(const st_model* model) {
  return model == nullptr ? 0 : model->model.cfg.topics;
}

size_t st_model_vocab_size(const st_model* model) {
  return model == nullptr ? 0 : model->model.vocab.terms.size();
}

const char* st_model_term(const st_model* model, size_t term_id) {
  if (model == nullptr || term_id >= model->model.vocab.terms.size()) {
    return nullptr;
  }
  return model->model.vocab.terms[term_id].c_str();
}

st_status st_model_top_words(const st_model* model, int topic, int n,
                             int* term_ids, double* weights, int* n_out) {
  if (model == nullptr || term_ids == nullptr || weights == nullptr) {
    return arg_error("null argument");
  }
  return guarded([&] {
    auto words = top_words(model->model, topic, n);
    for (std::size_t i = 0; i < words.size(); ++i) {
      term_ids[i] = words[i].first;
      weights[i] = words[i].second;
    }
    if (n_out != nullptr) *n_out = static_cast<int>(words.size());
  });
}

st_status st_model_infer_tokens(const st_model* model, const char* text,
                                double* theta, int* tokens_used,
                                int* tokens_dropped) {
  if (model == nullptr || text == nullptr || theta == nullptr) {
    return arg_error("null argument");
  }
  return guarded([&] {
    std::vector<std::string> tokens = tokenize(text);
    std::map<int, int> counts;
    int used = 0, dropped = 0;
    for (const auto& tok : tokens) {
      const int id = model->model.vocab.lookup(tok);
      if (id >= 0) {
        ++counts[id];
        ++used;
      } else {
        ++dropped;
      }
    }
    if (tokens_used != nullptr) *tokens_used = used;
    if (tokens_dropped != nullptr) *tokens_dropped = dropped;
    if (counts.empty()) {
      fail(ErrorCode::data, "document has no in-vocabulary tokens");
    }
    BowDocument doc;
    doc.counts.assign(counts.begin(), counts.end());
    for (const auto& [id, c] : doc.counts) doc.length += c;
    DocPosterior post = infer_theta(model->model, doc);
    std::memcpy(theta, post.theta.values.data(),
                post.theta.values.size() * sizeof(double));
  });
}

st_status st_model_infer_counts(const st_model* model, const int* term_ids,
                                const double* counts, size_t n, double* theta) {
  if (model == nullptr || term_ids == nullptr || counts == nullptr ||
      theta == nullptr) {
    return arg_error("null argument");
  }
  return guarded([&] {
    std::map<int, int> merged;
    for (size_t i = 0; i < n; ++i) {
      if (term_ids[i] < 0 || term_ids[i] >= model->model.vocab.size()) {
        fail(ErrorCode::invalid_argument, "term id out of range");
      }
      const double c = counts[i];
      if (!(c > 0.0) || c != std::floor(c)) {
        fail(ErrorCode::invalid_argument, "counts must be positive integers");
      }
      merged[term_ids[i]] += static_cast<int>(c);
    }
    if (merged.empty()) fail(ErrorCode::invalid_argument, "empty document");
    BowDocument doc;
    doc.counts.assign(merged.begin(), merged.end());
    for (const auto& [id, c] : doc.counts) doc.length += c;
    DocPosterior post = infer_theta(model->model, doc);
    std::memcpy(theta, post.theta.values.data(),
                post.theta.values.size() * sizeof(double));
  });
}

st_status st_evaluate(const st_model* model, const st_testset* test,
                      const st_corpus* cooc_corpus, int pmi_top_n,
                      double ts_threshold, st_report** out) {
  if (model == nullptr || test == nullptr || cooc_corpus == nullptr ||
      out == nullptr) {
    return arg_error("null argument");
  }
  return guarded([&] {
    const Model& m = model->model;
    auto report = std::make_unique<st_report>();

    PerplexityResult p_rw = perplexity(m, test->docs, PerplexityMode::bound_rw);
    PerplexityResult p_kl = perplexity(m, test->docs, PerplexityMode::bound_kl);
    PerplexityResult p_pred = perplexity(m, test->docs, PerplexityMode::predictive);
    report->entries.emplace_back("perplexity_bound_rw", p_rw.value);
    report->entries.emplace_back("perplexity_bound_kl", p_kl.value);
    report->entries.emplace_back("perplexity_predictive", p_pred.value);
    report->entries.emplace_back("floored_heldout_tokens",
                                 static_cast<double>(p_pred.floored_tokens));
    report->entries.emplace_back("skipped_test_docs",
                                 static_cast<double>(p_pred.skipped_docs));

    CoocStats cooc = build_cooc(cooc_corpus->corpus);
    if (pmi_top_n < 2) fail(ErrorCode::invalid_argument, "pmi_top_n must be >= 2");
    double pmi_sum = 0.0;
    for (int k = 0; k < m.cfg.topics; ++k) {
      auto words = top_words(m, k, pmi_top_n);
      std::vector<int> ids;
      ids.reserve(words.size());
      for (const auto& [id, w] : words) ids.push_back(id);
      pmi_sum += pmi(cooc, ids);
    }
    report->entries.emplace_back("pmi_mean", pmi_sum / m.cfg.topics);

    double ts_sum = 0.0;
    std::int64_t scored = 0;
    for (const auto& split : test->docs) {
      BowDocument merged = merge_split(split);
      DocPosterior post = infer_theta(m, merged);
      ts_sum += topic_sparsity_theta(post.theta);
      ++scored;
    }
    report->entries.emplace_back("ts_theta_mean", ts_sum / scored);

    TopicBasis basis = compute_topic_basis(m.gen, m.cfg.variant);
    double ts_phi_sum = 0.0;
    std::vector<double> ts_phi(m.cfg.topics);
    for (int k = 0; k < m.cfg.topics; ++k) {
      double ts = 0.0;
      if (m.cfg.variant == Variant::nsmtm) {
        ts = topic_sparsity_phi(basis.phi[k].values, ts_threshold);
      } else {
        // NSMDM rows are unnormalized; sparsity is reported on the
        // softmax-normalized row against the threshold.
        std::vector<double> norm = softmax(std::span(basis.rho.row(k), basis.rho.cols));
        ts = topic_sparsity_phi(norm, ts_threshold);
      }
      ts_phi[k] = ts;
      ts_phi_sum += ts;
    }
    report->entries.emplace_back("ts_phi_mean", ts_phi_sum / m.cfg.topics);
    for (int k = 0; k < m.cfg.topics; ++k) {
      report->entries.emplace_back("ts_phi_topic_" + std::to_string(k), ts_phi[k]);
    }

    *out = report.release();
  });
}

void st_report_free(st_report* report) { delete report; }

size_t st_report_num_entries(const st_report* report) {
  return report == nullptr ? 0 : report->entries.size();
}

const char* st_report_key(const st_report* report, size_t i) {
  if (report == nullptr || i >= report->entries.size()) return nullptr;
  return report->entries[i].first.c_str();
}

double st_report_value(const st_report* report, size_t i) {
  if (report == nullptr || i >= report->entries.size()) {
    return std::nan("");
  }
  return report->entries[i].second;
}

}  // extern "C"
