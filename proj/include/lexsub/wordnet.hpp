#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lexsub/core.hpp"

namespace lexsub {

using SynsetId = std::size_t;

struct Synset {
  std::string key;  // e.g. "02084071-n"
  Pos pos = Pos::kNoun;
  std::vector<std::string> lemmas;
  std::vector<SynsetId> hypernyms;
};

/// Immutable-after-load synset graph with a sense-ordered lemma index.
class SynsetGraph {
 public:
  SynsetId AddSynset(std::string key, Pos pos, std::vector<std::string> lemmas);
  // Hypernym (and instance-hypernym) link, child -> parent.
  void AddHypernym(SynsetId child, SynsetId parent);
  // Appends `id` to the sense list of (lemma, pos) unless already present.
  void AddSense(std::string_view lemma, Pos pos, SynsetId id);

  // Throws kInvalidArgument on a hypernym cycle or a cross-POS link.
  void Validate() const;

  std::size_t size() const { return synsets_.size(); }
  const Synset& synset(SynsetId id) const { return synsets_.at(id); }
  std::optional<SynsetId> Find(std::string_view key) const;
  // Sense-frequency order; empty when the lemma is unknown for pos.
  const std::vector<SynsetId>& Senses(std::string_view lemma, Pos pos) const;

  // Minimum hop count to every ancestor, including the synset itself at 0.
  std::unordered_map<SynsetId, std::size_t> AncestorDepths(SynsetId id) const;

  // Reads data.{noun,verb,adj,adv} and index.* from a WordNet database
  // directory. Missing index files fall back to data-file order.
  static SynsetGraph FromWordNetDir(const std::filesystem::path& dir);

 private:
  std::vector<Synset> synsets_;
  std::unordered_map<std::string, SynsetId> by_key_;
  std::map<std::pair<std::string, Pos>, std::vector<SynsetId>> senses_;
};

// WordNet lemma spelling to plain lowercase ("Ice_cream(a)" -> "ice cream").
std::string NormalizeWordNetLemma(std::string_view raw);

}  // namespace lexsub
