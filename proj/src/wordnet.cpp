#include "lexsub/wordnet.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>

namespace lexsub {

SynsetId SynsetGraph::AddSynset(std::string key, Pos pos,
                                std::vector<std::string> lemmas) {
  if (by_key_.count(key) != 0) {
    throw LexsubError(ErrorCode::kInvalidArgument, "duplicate synset " + key);
  }
  const SynsetId id = synsets_.size();
  by_key_.emplace(key, id);
  synsets_.push_back({std::move(key), pos, std::move(lemmas), {}});
  return id;
}

void SynsetGraph::AddHypernym(SynsetId child, SynsetId parent) {
  if (child >= synsets_.size() || parent >= synsets_.size()) {
    throw LexsubError(ErrorCode::kNotFound, "hypernym link to unknown synset");
  }
  auto& parents = synsets_[child].hypernyms;
  if (std::find(parents.begin(), parents.end(), parent) == parents.end()) {
    parents.push_back(parent);
  }
}

void SynsetGraph::AddSense(std::string_view lemma, Pos pos, SynsetId id) {
  auto& list = senses_[{ToLower(lemma), pos}];
  if (std::find(list.begin(), list.end(), id) == list.end()) list.push_back(id);
}

void SynsetGraph::Validate() const {
  enum class Mark : unsigned char { kNew, kOpen, kDone };
  std::vector<Mark> mark(synsets_.size(), Mark::kNew);
  for (SynsetId root = 0; root < synsets_.size(); ++root) {
    if (mark[root] != Mark::kNew) continue;
    // Iterative DFS; (node, next parent slot).
    std::vector<std::pair<SynsetId, std::size_t>> stack{{root, 0}};
    mark[root] = Mark::kOpen;
    while (!stack.empty()) {
      auto& [node, slot] = stack.back();
      const auto& parents = synsets_[node].hypernyms;
      if (slot == parents.size()) {
        mark[node] = Mark::kDone;
        stack.pop_back();
        continue;
      }
      const SynsetId next = parents[slot++];
      if (synsets_[next].pos != synsets_[node].pos) {
        throw LexsubError(ErrorCode::kInvalidArgument,
                          "cross-POS hypernym " + synsets_[node].key + " -> " +
                              synsets_[next].key);
      }
      if (mark[next] == Mark::kOpen) {
        throw LexsubError(ErrorCode::kInvalidArgument,
                          "hypernym cycle through " + synsets_[next].key);
      }
      if (mark[next] == Mark::kNew) {
        mark[next] = Mark::kOpen;
        stack.emplace_back(next, 0);
      }
    }
  }
}

std::optional<SynsetId> SynsetGraph::Find(std::string_view key) const {
  auto it = by_key_.find(std::string(key));
  if (it == by_key_.end()) return std::nullopt;
  return it->second;
}

const std::vector<SynsetId>& SynsetGraph::Senses(std::string_view lemma,
                                                 Pos pos) const {
  static const std::vector<SynsetId> kNone;
  auto it = senses_.find({ToLower(lemma), pos});
  return it == senses_.end() ? kNone : it->second;
}

std::unordered_map<SynsetId, std::size_t> SynsetGraph::AncestorDepths(
    SynsetId id) const {
  std::unordered_map<SynsetId, std::size_t> depth{{id, 0}};
  std::deque<SynsetId> queue{id};
  while (!queue.empty()) {
    const SynsetId cur = queue.front();
    queue.pop_front();
    for (SynsetId parent : synsets_.at(cur).hypernyms) {
      if (depth.emplace(parent, depth[cur] + 1).second) queue.push_back(parent);
    }
  }
  return depth;
}

std::string NormalizeWordNetLemma(std::string_view raw) {
  std::string out(raw.substr(0, raw.find('(')));
  for (auto& c : out) {
    if (c == '_') c = ' ';
  }
  return ToLower(out);
}

namespace {

struct PosFile {
  const char* suffix;
  Pos pos;
  char letter;
};

constexpr PosFile kPosFiles[] = {{"noun", Pos::kNoun, 'n'},
                                 {"verb", Pos::kVerb, 'v'},
                                 {"adj", Pos::kAdj, 'a'},
                                 {"adv", Pos::kAdv, 'r'}};

char FileLetter(char pos_char) { return pos_char == 's' ? 'a' : pos_char; }

std::string Key(const std::string& offset, char letter) {
  return offset + "-" + letter;
}

struct PendingPointer {
  SynsetId child;
  std::string target;
};

[[noreturn]] void Malformed(const std::filesystem::path& file, std::size_t line,
                            const std::string& what) {
  throw LexsubError(ErrorCode::kParseError, file.filename().string() + ":" +
                                                std::to_string(line) + ": " + what);
}

}  // namespace

SynsetGraph SynsetGraph::FromWordNetDir(const std::filesystem::path& dir) {
  SynsetGraph graph;
  std::vector<PendingPointer> pointers;
  bool any = false;
  for (const auto& pf : kPosFiles) {
    const auto path = dir / (std::string("data.") + pf.suffix);
    std::ifstream in(path);
    if (!in) continue;
    any = true;
    std::vector<SynsetId> file_order;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line[0] == ' ') continue;  // license header
      std::istringstream ss(line.substr(0, line.find('|')));
      std::string offset, lex_filenum, ss_type, w_cnt_hex;
      if (!(ss >> offset >> lex_filenum >> ss_type >> w_cnt_hex)) {
        Malformed(path, line_no, "truncated synset header");
      }
      std::size_t w_cnt = 0;
      try {
        w_cnt = std::stoul(w_cnt_hex, nullptr, 16);
      } catch (const std::exception&) {
        Malformed(path, line_no, "bad word count");
      }
      std::vector<std::string> lemmas;
      for (std::size_t i = 0; i < w_cnt; ++i) {
        std::string word, lex_id;
        if (!(ss >> word >> lex_id)) Malformed(path, line_no, "truncated word list");
        lemmas.push_back(NormalizeWordNetLemma(word));
      }
      const SynsetId id = graph.AddSynset(Key(offset, pf.letter), pf.pos, lemmas);
      file_order.push_back(id);
      std::size_t p_cnt = 0;
      if (!(ss >> p_cnt)) Malformed(path, line_no, "missing pointer count");
      for (std::size_t i = 0; i < p_cnt; ++i) {
        std::string symbol, target, pos_char, source_target;
        if (!(ss >> symbol >> target >> pos_char >> source_target)) {
          Malformed(path, line_no, "truncated pointer list");
        }
        if (symbol == "@" || symbol == "@i") {
          pointers.push_back({id, Key(target, FileLetter(pos_char.at(0)))});
        }
      }
    }
    const auto index_path = dir / (std::string("index.") + pf.suffix);
    std::ifstream index(index_path);
    if (index) {
      line_no = 0;
      while (std::getline(index, line)) {
        ++line_no;
        if (line.empty() || line[0] == ' ') continue;
        std::istringstream ss(line);
        std::string lemma, pos_char;
        std::size_t synset_cnt = 0, p_cnt = 0;
        if (!(ss >> lemma >> pos_char >> synset_cnt >> p_cnt)) {
          Malformed(index_path, line_no, "truncated index entry");
        }
        std::string skip;
        for (std::size_t i = 0; i < p_cnt; ++i) ss >> skip;
        ss >> skip >> skip;  // sense_cnt, tagsense_cnt
        for (std::size_t i = 0; i < synset_cnt; ++i) {
          std::string offset;
          if (!(ss >> offset)) Malformed(index_path, line_no, "missing offset");
          const auto id = graph.Find(Key(offset, pf.letter));
          if (!id) Malformed(index_path, line_no, "unknown synset " + offset);
          graph.AddSense(NormalizeWordNetLemma(lemma), pf.pos, *id);
        }
      }
    }
    // Lemmas missing from the index (or no index at all) keep file order.
    for (SynsetId id : file_order) {
      for (const auto& lemma : graph.synsets_[id].lemmas) {
        graph.AddSense(lemma, pf.pos, id);
      }
    }
  }
  if (!any) {
    throw LexsubError(ErrorCode::kIo, "no WordNet data files in " + dir.string());
  }
  for (const auto& p : pointers) {
    const auto parent = graph.Find(p.target);
    if (!parent) {
      throw LexsubError(ErrorCode::kParseError,
                        "hypernym pointer to unknown synset " + p.target);
    }
    graph.AddHypernym(p.child, *parent);
  }
  graph.Validate();
  return graph;
}

}  // namespace lexsub
