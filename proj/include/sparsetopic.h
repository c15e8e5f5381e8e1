/* Copyright 2026 The sparsetopic Authors.
 * SPDX-License-Identifier: Apache-2.0
 *
 * C API of the sparsetopic shared library: sparsity-inducing neural topic
 * models (NSMDM / NSMTM) with relaxed-Wasserstein-regularized variational
 * training, plus corpus handling and evaluation metrics.
 *
 * All objects are opaque handles created and released by this API. Every
 * fallible call returns an st_status; on failure st_last_error() describes
 * the problem (thread-local). Returned strings stay owned by their handle.
 */

#ifndef SPARSETOPIC_H_
#define SPARSETOPIC_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum st_status {
  ST_OK = 0,
  ST_ERROR_INVALID_ARGUMENT = 1, /* bad parameters or unusable paths */
  ST_ERROR_IO = 2,               /* file open/read/write failure */
  ST_ERROR_DATA = 3,             /* malformed or unusable input content */
  ST_ERROR_NUMERIC = 4,          /* non-finite values outside training */
  ST_DIVERGED = 5,               /* training loss went non-finite; the model
                                    holds the last finite parameters */
  ST_ERROR_VERSION = 6           /* checkpoint/config mismatch */
} st_status;

enum { ST_VARIANT_NSMDM = 0, ST_VARIANT_NSMTM = 1 };
enum { ST_REGULARIZER_RW = 0, ST_REGULARIZER_KL = 1 };

typedef struct st_corpus st_corpus;
typedef struct st_testset st_testset;
typedef struct st_model st_model;
typedef struct st_trace st_trace;
typedef struct st_report st_report;

typedef struct st_train_options {
  int variant;       /* ST_VARIANT_* */
  int regularizer;   /* ST_REGULARIZER_* */
  int topics;        /* K, >= 2 */
  int latent_dim;
  int embed_dim;
  int hidden_dim;
  int epochs;
  int batch_size;
  double gamma;          /* regularization weight, >= 0 */
  double learning_rate;
  double dropout;        /* on the second hidden layer, eval disables it */
  double prior_mean;
  double prior_sigma;
  double eps_floor;      /* floor inside log(phi^T theta), loss only */
  uint64_t seed;
} st_train_options;

/* Per-epoch progress callback; return value is ignored. */
typedef void (*st_progress_fn)(int epoch, int total_epochs, double mean_loss,
                               void* user);

const char* st_version(void);

/* Message for the most recent failure on this thread; empty string if none. */
const char* st_last_error(void);

/* Fills in the library defaults (NSMTM, K=50, gamma=0.5, lr=1e-3, ...). */
void st_train_options_init(st_train_options* opts);

/* ---- corpus ---- */

/* Builds a corpus from a UTF-8 text file, one document per line, tokens
 * whitespace-separated (lowercased). Keeps tokens with total frequency >=
 * min_count, truncated to the max_vocab most frequent. */
st_status st_corpus_from_text_file(const char* path, int min_count,
                                   int max_vocab, st_corpus** out);

/* Loads the BoW format: one document per line of "termid:count" entries,
 * with a vocabulary file of one term per line (line number = id). */
st_status st_corpus_from_bow_files(const char* bow_path, const char* vocab_path,
                                   st_corpus** out);

st_status st_corpus_save_bow(const st_corpus* corpus, const char* bow_path,
                             const char* vocab_path);

void st_corpus_free(st_corpus* corpus);
size_t st_corpus_num_documents(const st_corpus* corpus);
size_t st_corpus_vocab_size(const st_corpus* corpus);
/* NULL when term_id is out of range. */
const char* st_corpus_term(const st_corpus* corpus, size_t term_id);
int64_t st_corpus_empty_docs_dropped(const st_corpus* corpus);

/* Splits off round(test_fraction * n_docs) documents as a held-out test set;
 * each test document is further split into near-equal observed/heldout
 * halves. Deterministic given the seed. */
st_status st_corpus_split(const st_corpus* corpus, double test_fraction,
                          uint64_t seed, st_corpus** train_out,
                          st_testset** test_out);

void st_testset_free(st_testset* test);
size_t st_testset_size(const st_testset* test);

/* ---- training ---- */

/* Trains on the corpus. On ST_DIVERGED the model still holds the last
 * parameters that produced a finite loss, and the trace covers the completed
 * steps. trace_out and progress may be NULL. */
st_status st_train(const st_corpus* corpus, const st_train_options* opts,
                   st_progress_fn progress, void* user, st_model** model_out,
                   st_trace** trace_out);

void st_trace_free(st_trace* trace);
size_t st_trace_num_rows(const st_trace* trace);
/* Row fields: loss = recon + reg_term, reg_term = gamma * divergence. */
st_status st_trace_row(const st_trace* trace, size_t i, int* epoch, int* batch,
                       double* loss, double* recon, double* reg_term);
int st_trace_diverged(const st_trace* trace);

/* ---- model ---- */

void st_model_free(st_model* model);
st_status st_model_save(const st_model* model, const char* path);
st_status st_model_load(const char* path, st_model** out);

int st_model_variant(const st_model* model);
int st_model_num_topics(const st_model* model);
size_t st_model_vocab_size(const st_model* model);
const char* st_model_term(const st_model* model, size_t term_id);

/* Top-n terms of a topic by weight (NSMTM: probability; NSMDM: unnormalized
 * row value), ties broken by term id. Writes at most n entries and stores
 * the actual count (clamped to the vocabulary size) in *n_out. */
st_status st_model_top_words(const st_model* model, int topic, int n,
                             int* term_ids, double* weights, int* n_out);

/* Evaluation-mode posterior for a whitespace-tokenized document; tokens not
 * in the model vocabulary are dropped and counted. theta must hold K
 * doubles; it receives a sparse simplex point (exact zeros). */
st_status st_model_infer_tokens(const st_model* model, const char* text,
                                double* theta, int* tokens_used,
                                int* tokens_dropped);

/* Same for an explicit sparse count vector over the model vocabulary. */
st_status st_model_infer_counts(const st_model* model, const int* term_ids,
                                const double* counts, size_t n, double* theta);

/* ---- evaluation ---- */

/* Scores the model on a test set: perplexity in all three modes, mean PMI
 * of the top-pmi_top_n words per topic against cooc_corpus, mean topic
 * sparsity of theta over test documents, and per-topic sparsity of the
 * topic-word rows (ts_threshold counts entries <= threshold as zero; for
 * NSMDM the rows are softmax-normalized first). */
st_status st_evaluate(const st_model* model, const st_testset* test,
                      const st_corpus* cooc_corpus, int pmi_top_n,
                      double ts_threshold, st_report** out);

void st_report_free(st_report* report);
size_t st_report_num_entries(const st_report* report);
const char* st_report_key(const st_report* report, size_t i);
double st_report_value(const st_report* report, size_t i);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SPARSETOPIC_H_ */
