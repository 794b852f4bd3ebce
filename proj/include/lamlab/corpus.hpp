#pragma once

#include "lamlab/branch.hpp"
#include "lamlab/parse.hpp"

namespace lamlab {

struct CorpusEntry {
  std::string name;
  std::string path;
  CorpusFile content;
};

// Registered dataset names (each backed by <dir>/<name>.lam).
const std::vector<std::string>& corpus_names();
std::string default_corpus_dir();
CorpusEntry load_corpus(const std::string& name, const std::string& dir = "");

// Built-in expectations for each dataset, checked by `corpus run` and the
// test suite. Ids are stable strings; details explain failures.
struct AssertionResult {
  std::string id;
  bool pass = false;
  std::string detail;
};
std::vector<AssertionResult> run_corpus_assertions(const CorpusEntry& entry,
                                                   const AnalysisConfig& cfg);

}  // namespace lamlab
