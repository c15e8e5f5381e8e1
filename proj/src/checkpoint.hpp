// Copyright 2026 The sparsetopic Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Single-file binary checkpoint: config, vocabulary, and every parameter
// array with a name and shape header. Doubles are stored raw, so a
// save/load round trip is bit-exact. Writes go through a temp file plus
// rename.

#pragma once

#include <string>

#include "topicmodel.hpp"

namespace sparsetopic {

void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace sparsetopic
