#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>

#include "lexsub/core.hpp"

namespace lexsub {

class Lemmatizer {
 public:
  virtual ~Lemmatizer() = default;
  // Returns the lowercase lemma of `word` read as part of speech `pos`.
  virtual std::string Lemmatize(std::string_view word, Pos pos) const = 0;
};

/// English suffix rules backed by an irregular-form table. No dictionary is
/// consulted, so regular forms of unusual words may be over-stripped.
class RuleLemmatizer final : public Lemmatizer {
 public:
  RuleLemmatizer();
  std::string Lemmatize(std::string_view word, Pos pos) const override;

 private:
  std::unordered_map<std::string, std::string> noun_exceptions_;
  std::unordered_map<std::string, std::string> verb_exceptions_;
  std::unordered_map<std::string, std::string> adj_exceptions_;
};

/// Lookup table of (form, pos) -> lemma, for reproducing an external
/// lemmatizer's output. File lines: "form<TAB>pos<TAB>lemma". Forms missing
/// from the table go to `fallback`.
class TableLemmatizer final : public Lemmatizer {
 public:
  TableLemmatizer(const std::filesystem::path& path,
                  std::shared_ptr<const Lemmatizer> fallback);
  std::string Lemmatize(std::string_view word, Pos pos) const override;

 private:
  std::unordered_map<std::string, std::string> table_;
  std::shared_ptr<const Lemmatizer> fallback_;
};

// Porter (1980) suffix-stripping stemmer on lowercase ASCII words.
std::string PorterStem(std::string_view word);

std::shared_ptr<const Lemmatizer> DefaultLemmatizer();

}  // namespace lexsub
