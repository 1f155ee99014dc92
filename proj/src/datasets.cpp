#include "lexsub/datasets.hpp"

#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <unordered_map>

#include "lexsub/io.hpp"

namespace lexsub {

namespace {

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string DecodeEntities(std::string_view s) {
  static const std::pair<std::string_view, char> kEntities[] = {
      {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'},
      {"&apos;", '\''}};
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    bool matched = false;
    if (s[i] == '&') {
      for (const auto& [name, c] : kEntities) {
        if (s.substr(i, name.size()) == name) {
          out.push_back(c);
          i += name.size();
          matched = true;
          break;
        }
      }
    }
    if (!matched) out.push_back(s[i++]);
  }
  return out;
}

// Just enough XML for the two corpus formats: elements, attributes, text.
struct XmlEvent {
  enum class Kind { kOpen, kClose, kText } kind;
  std::string name;
  std::map<std::string, std::string> attrs;
  bool self_closing = false;
  std::string text;
};

class XmlScanner {
 public:
  explicit XmlScanner(std::string doc) : doc_(std::move(doc)) {}

  bool Next(XmlEvent& ev) {
    if (pos_ >= doc_.size()) return false;
    if (doc_[pos_] != '<') {
      const auto end = doc_.find('<', pos_);
      ev = XmlEvent{XmlEvent::Kind::kText, {}, {}, false,
                    DecodeEntities(doc_.substr(pos_, end - pos_))};
      pos_ = end == std::string::npos ? doc_.size() : end;
      return true;
    }
    if (doc_.compare(pos_, 4, "<!--") == 0) {
      pos_ = Skip("-->");
      return Next(ev);
    }
    if (doc_.compare(pos_, 2, "<?") == 0 || doc_.compare(pos_, 2, "<!") == 0) {
      pos_ = Skip(">");
      return Next(ev);
    }
    const auto close = doc_.find('>', pos_);
    if (close == std::string::npos) {
      throw LexsubError(ErrorCode::kParseError,
                        "unterminated tag at byte " + std::to_string(pos_));
    }
    std::string_view tag(doc_.data() + pos_ + 1, close - pos_ - 1);
    pos_ = close + 1;
    ev = XmlEvent{};
    if (!tag.empty() && tag.front() == '/') {
      ev.kind = XmlEvent::Kind::kClose;
      ev.name = Trim(tag.substr(1));
      return true;
    }
    ev.kind = XmlEvent::Kind::kOpen;
    if (!tag.empty() && tag.back() == '/') {
      ev.self_closing = true;
      tag.remove_suffix(1);
    }
    std::size_t i = 0;
    while (i < tag.size() && !std::isspace(static_cast<unsigned char>(tag[i])))
      ++i;
    ev.name = std::string(tag.substr(0, i));
    while (i < tag.size()) {
      while (i < tag.size() && std::isspace(static_cast<unsigned char>(tag[i])))
        ++i;
      const auto eq = tag.find('=', i);
      if (eq == std::string_view::npos) break;
      const std::string key = Trim(tag.substr(i, eq - i));
      std::size_t q = eq + 1;
      while (q < tag.size() && std::isspace(static_cast<unsigned char>(tag[q])))
        ++q;
      if (q >= tag.size()) break;
      const char quote = tag[q];
      const auto endq = tag.find(quote, q + 1);
      if (endq == std::string_view::npos) {
        throw LexsubError(ErrorCode::kParseError, "unterminated attribute");
      }
      ev.attrs[key] = DecodeEntities(tag.substr(q + 1, endq - q - 1));
      i = endq + 1;
    }
    return true;
  }

 private:
  std::size_t Skip(std::string_view terminator) {
    const auto end = doc_.find(terminator, pos_);
    return end == std::string::npos ? doc_.size() : end + terminator.size();
  }

  std::string doc_;
  std::size_t pos_ = 0;
};

std::string Slurp(std::istream& in) {
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::ifstream OpenOrThrow(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LexsubError(ErrorCode::kIo, "cannot open " + path.string());
  return in;
}

}  // namespace

std::vector<LexSubInstance> load_semeval_gold(std::istream& in) {
  std::vector<LexSubInstance> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (Trim(line).empty()) continue;
    auto fail = [&](const std::string& what) {
      return LexsubError(ErrorCode::kParseError,
                         "gold line " + std::to_string(lineno) + ": " + what);
    };
    const auto sep = line.find("::");
    if (sep == std::string::npos) throw fail("missing '::'");
    const auto head = SplitWhitespace(line.substr(0, sep));
    if (head.size() != 2) throw fail("expected 'lemma.pos id'");
    const auto dot = head[0].rfind('.');
    if (dot == std::string::npos || dot == 0 || dot + 2 != head[0].size()) {
      throw fail("bad item '" + head[0] + "'");
    }
    LexSubInstance inst;
    inst.id = head[1];
    inst.lemma = ToLower(head[0].substr(0, dot));
    try {
      inst.pos = ParsePos(head[0].substr(dot + 1));
    } catch (const LexsubError&) {
      throw fail("bad POS in '" + head[0] + "'");
    }
    GoldWeights gold;
    std::stringstream rest(line.substr(sep + 2));
    std::string entry;
    while (std::getline(rest, entry, ';')) {
      auto words = SplitWhitespace(entry);
      if (words.empty()) continue;
      if (words.size() < 2) throw fail("entry '" + Trim(entry) + "' has no weight");
      int weight = 0;
      try {
        weight = std::stoi(words.back());
      } catch (const std::exception&) {
        throw fail("bad weight in '" + Trim(entry) + "'");
      }
      if (weight < 1) throw fail("non-positive weight");
      if (words.size() > 2) continue;  // multiword expression
      gold[words.front()] += weight;
    }
    if (gold.empty()) continue;
    inst.gold = std::move(gold);
    inst.tokens = {inst.lemma};
    inst.target_index = 0;
    out.push_back(std::move(inst));
  }
  return out;
}

std::vector<LexSubInstance> load_semeval_gold(
    const std::filesystem::path& path) {
  auto in = OpenOrThrow(path);
  return load_semeval_gold(in);
}

std::vector<LexSubInstance> AttachSemevalContexts(
    std::vector<LexSubInstance> instances, std::istream& xml) {
  struct Context {
    std::vector<std::string> tokens;
    std::size_t target = 0;
  };
  std::unordered_map<std::string, Context> contexts;
  XmlScanner scanner(Slurp(xml));
  XmlEvent ev;
  std::string instance_id;
  bool in_context = false;
  bool in_head = false;
  bool have_head = false;
  std::string left;
  std::string head;
  std::string right;
  while (scanner.Next(ev)) {
    if (ev.kind == XmlEvent::Kind::kOpen) {
      if (ev.name == "instance") instance_id = ev.attrs["id"];
      if (ev.name == "context") {
        in_context = true;
        have_head = false;
        left.clear();
        head.clear();
        right.clear();
      }
      if (ev.name == "head" && in_context) in_head = true;
    } else if (ev.kind == XmlEvent::Kind::kClose) {
      if (ev.name == "head") {
        in_head = false;
        have_head = true;
      }
      if (ev.name == "context" && in_context) {
        in_context = false;
        if (!have_head) continue;
        Context ctx;
        ctx.tokens = SplitWhitespace(left);
        ctx.target = ctx.tokens.size();
        ctx.tokens.push_back(Trim(head));
        for (auto& t : SplitWhitespace(right)) ctx.tokens.push_back(std::move(t));
        contexts[instance_id] = std::move(ctx);
      }
    } else if (in_context) {
      (in_head ? head : (have_head ? right : left)) += ev.text;
    }
  }
  std::vector<LexSubInstance> out;
  out.reserve(instances.size());
  for (auto& inst : instances) {
    auto it = contexts.find(inst.id);
    if (it == contexts.end()) continue;
    inst.tokens = it->second.tokens;
    inst.target_index = it->second.target;
    out.push_back(std::move(inst));
  }
  return out;
}

std::vector<LexSubInstance> AttachSemevalContexts(
    std::vector<LexSubInstance> instances, const std::filesystem::path& xml) {
  auto in = OpenOrThrow(xml);
  return AttachSemevalContexts(std::move(instances), in);
}

CoincoSplit ParseCoincoSplit(std::string_view text) {
  if (text == "all") return CoincoSplit::kAll;
  if (text == "first35") return CoincoSplit::kFirst35;
  if (text == "last65") return CoincoSplit::kLast65;
  throw LexsubError(ErrorCode::kInvalidArgument,
                    "unknown CoInCo split '" + std::string(text) + "'");
}

Pos PosFromPennTag(std::string_view tag) {
  if (tag.starts_with("NN")) return Pos::kNoun;
  // TreeTagger splits verbs into VB (be), VH (have) and VV (lexical).
  if (tag.starts_with("VB") || tag.starts_with("VV") || tag.starts_with("VH")) {
    return Pos::kVerb;
  }
  if (tag.starts_with("JJ")) return Pos::kAdj;
  if (tag.starts_with("RB")) return Pos::kAdv;
  throw LexsubError(ErrorCode::kUnknownPos,
                    "tag '" + std::string(tag) + "' is not a content POS");
}

std::vector<LexSubInstance> ConvertCoinco(std::istream& xml,
                                          CoincoSplit split) {
  struct Target {
    std::size_t token_index;
    std::string id;
    std::string lemma;
    std::string tag;
    bool problematic;
    GoldWeights gold;
  };
  std::vector<std::vector<LexSubInstance>> sentences;
  XmlScanner scanner(Slurp(xml));
  XmlEvent ev;
  std::vector<std::string> tokens;
  std::vector<Target> targets;
  std::optional<Target> current;
  bool in_sent = false;

  auto finish_token = [&]() {
    if (current && !current->gold.empty()) targets.push_back(*current);
    current.reset();
  };

  while (scanner.Next(ev)) {
    if (ev.kind == XmlEvent::Kind::kOpen && ev.name == "sent") {
      in_sent = true;
      tokens.clear();
      targets.clear();
    } else if (ev.kind == XmlEvent::Kind::kOpen && ev.name == "token" &&
               in_sent) {
      finish_token();
      Target t{tokens.size(), ev.attrs["id"], ToLower(ev.attrs["lemma"]),
               ev.attrs.count("posMASC") ? ev.attrs["posMASC"] : ev.attrs["posTT"],
               ev.attrs["problematic"] == "yes", {}};
      tokens.push_back(ev.attrs["wordform"]);
      if (!ev.self_closing) current = std::move(t);
    } else if (ev.kind == XmlEvent::Kind::kOpen && ev.name == "subst" &&
               current) {
      const std::string lemma = Trim(ev.attrs["lemma"]);
      const std::string freq = ev.attrs["freq"];
      if (lemma.empty() || lemma.find(' ') != std::string::npos) continue;
      int weight = 0;
      try {
        weight = std::stoi(freq);
      } catch (const std::exception&) {
        throw LexsubError(ErrorCode::kParseError,
                          "bad freq '" + freq + "' in token " + current->id);
      }
      if (weight > 0) current->gold[lemma] += weight;
    } else if (ev.kind == XmlEvent::Kind::kClose && ev.name == "token") {
      finish_token();
    } else if (ev.kind == XmlEvent::Kind::kClose && ev.name == "sent") {
      finish_token();
      in_sent = false;
      std::vector<LexSubInstance> sent;
      for (auto& t : targets) {
        if (t.problematic) continue;
        Pos pos;
        try {
          pos = PosFromPennTag(t.tag);
        } catch (const LexsubError&) {
          continue;
        }
        LexSubInstance inst;
        inst.id = t.id;
        inst.tokens = tokens;
        inst.target_index = t.token_index;
        inst.lemma = t.lemma;
        inst.pos = pos;
        inst.gold = std::move(t.gold);
        sent.push_back(std::move(inst));
      }
      sentences.push_back(std::move(sent));
    }
  }

  const std::size_t cut = static_cast<std::size_t>(
      static_cast<double>(sentences.size()) * 0.35 + 0.5);
  std::size_t begin = 0;
  std::size_t end = sentences.size();
  if (split == CoincoSplit::kFirst35) end = cut;
  if (split == CoincoSplit::kLast65) begin = cut;
  std::vector<LexSubInstance> out;
  for (std::size_t i = begin; i < end; ++i) {
    for (auto& inst : sentences[i]) out.push_back(std::move(inst));
  }
  return out;
}

std::vector<LexSubInstance> ConvertCoinco(const std::filesystem::path& xml,
                                          CoincoSplit split) {
  auto in = OpenOrThrow(xml);
  return ConvertCoinco(in, split);
}

}  // namespace lexsub
