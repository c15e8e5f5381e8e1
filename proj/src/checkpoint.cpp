// Copyright 2026 The sparsetopic Authors.
// SPDX-License-Identifier: Apache-2.0

#include "checkpoint.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>

#include "error.hpp"

namespace sparsetopic {

namespace {

constexpr char kMagic[8] = {'S', 'P', 'T', 'M', 'C', 'K', 'P', '1'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void write_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void write_f64(std::ostream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void write_str(std::ostream& out, const std::string& s) {
  write_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) fail(ErrorCode::data, "checkpoint: truncated file");
  return v;
}
std::uint64_t read_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) fail(ErrorCode::data, "checkpoint: truncated file");
  return v;
}
double read_f64(std::istream& in) {
  double v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) fail(ErrorCode::data, "checkpoint: truncated file");
  return v;
}
std::string read_str(std::istream& in) {
  const std::uint32_t n = read_u32(in);
  std::string s(n, '\0');
  in.read(s.data(), n);
  if (!in) fail(ErrorCode::data, "checkpoint: truncated file");
  return s;
}

}  // namespace

void save_model(const Model& model, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io, "cannot write checkpoint: " + tmp);

    out.write(kMagic, sizeof kMagic);
    write_u32(out, kVersion);

    const TrainConfig& c = model.cfg;
    write_u32(out, static_cast<std::uint32_t>(c.variant));
    write_u32(out, static_cast<std::uint32_t>(c.regularizer));
    write_u32(out, static_cast<std::uint32_t>(c.topics));
    write_u32(out, static_cast<std::uint32_t>(c.latent_dim));
    write_u32(out, static_cast<std::uint32_t>(c.embed_dim));
    write_u32(out, static_cast<std::uint32_t>(c.hidden_dim));
    write_u32(out, static_cast<std::uint32_t>(c.epochs));
    write_u32(out, static_cast<std::uint32_t>(c.batch_size));
    write_u64(out, c.seed);
    write_f64(out, c.gamma);
    write_f64(out, c.learning_rate);
    write_f64(out, c.prior_mean);
    write_f64(out, c.prior_sigma);
    write_f64(out, c.dropout);
    write_f64(out, c.eps_floor);

    write_u64(out, static_cast<std::uint64_t>(model.vocab.size()));
    for (const auto& term : model.vocab.terms) write_str(out, term);

    Model& mutable_model = const_cast<Model&>(model);  // refs only, no writes
    ParamSet refs = param_refs(mutable_model);
    write_u32(out, static_cast<std::uint32_t>(refs.size()));
    for (const auto& r : refs) {
      write_str(out, r.name);
      write_u64(out, static_cast<std::uint64_t>(r.data->size()));
      out.write(reinterpret_cast<const char*>(r.data->data()),
                static_cast<std::streamsize>(r.data->size() * sizeof(double)));
    }
    if (!out.flush()) fail(ErrorCode::io, "short write: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    fail(ErrorCode::io, "cannot rename checkpoint into place: " + path);
  }
}

Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open checkpoint: " + path);

  char magic[8] = {};
  in.read(magic, sizeof magic);
  if (!in || std::string(magic, 8) != std::string(kMagic, 8)) {
    fail(ErrorCode::version, "not a checkpoint file: " + path);
  }
  if (read_u32(in) != kVersion) {
    fail(ErrorCode::version, "unsupported checkpoint version: " + path);
  }

  TrainConfig c;
  c.variant = static_cast<Variant>(read_u32(in));
  c.regularizer = static_cast<RegularizerKind>(read_u32(in));
  c.topics = static_cast<int>(read_u32(in));
  c.latent_dim = static_cast<int>(read_u32(in));
  c.embed_dim = static_cast<int>(read_u32(in));
  c.hidden_dim = static_cast<int>(read_u32(in));
  c.epochs = static_cast<int>(read_u32(in));
  c.batch_size = static_cast<int>(read_u32(in));
  c.seed = read_u64(in);
  c.gamma = read_f64(in);
  c.learning_rate = read_f64(in);
  c.prior_mean = read_f64(in);
  c.prior_sigma = read_f64(in);
  c.dropout = read_f64(in);
  c.eps_floor = read_f64(in);

  Vocabulary vocab;
  const std::uint64_t n_terms = read_u64(in);
  vocab.terms.reserve(n_terms);
  for (std::uint64_t i = 0; i < n_terms; ++i) {
    std::string term = read_str(in);
    vocab.index.emplace(term, vocab.size());
    vocab.terms.push_back(std::move(term));
  }

  Model model = init_model(vocab, c);  // allocates the right shapes
  ParamSet refs = param_refs(model);
  const std::uint32_t n_arrays = read_u32(in);
  if (n_arrays != refs.size()) {
    fail(ErrorCode::version, "checkpoint: unexpected parameter array count");
  }
  for (auto& r : refs) {
    const std::string name = read_str(in);
    if (name != r.name) {
      fail(ErrorCode::version, "checkpoint: parameter order mismatch at " + name);
    }
    const std::uint64_t n = read_u64(in);
    if (n != r.data->size()) {
      fail(ErrorCode::version, "checkpoint: shape mismatch for " + name);
    }
    in.read(reinterpret_cast<char*>(r.data->data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) fail(ErrorCode::data, "checkpoint: truncated array " + name);
  }
  return model;
}

}  // namespace sparsetopic
